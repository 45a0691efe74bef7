"""Constrained cadlag evolutions driven by maximal monotone operators.

The package solves ``dx + A(x)(dt) + dk^d = dm`` on a finite horizon for
cadlag inputs ``m``, with jumps corrected by a generalized projection, and
provides the Yosida-regularized approximation schemes together with a
checker harness for the underlying inequalities.
"""

from .errors import (ConfigurationError, ConstructionError, ConvergenceError,
                     DomainError, IterationError)
from .operators import (Ball, Box, HalfSpace, Intersection, MonotoneOperator,
                        OperatorSpec, Whole, halfline, make_operator,
                        resolvent, resolvent_of_yosida, semigroup, yosida)
from .paths import (BVPath, CadlagPath, Partition, SAMPLED, STEP,
                    cadlag_modulus, covariation, discretize,
                    eval_with_left_limit, jump_decompose, read_path_csv,
                    skorokhod_d0, stieltjes_integral, sup_distance, sup_norm,
                    total_variation, write_path_csv)
from .penalized import (PenalizedSolution, constant_input_study,
                        convergence_study, solve_yosida_amortized,
                        solve_yosida_free)
from .projections import (GeneralizedProjection, custom_coordinatewise,
                          elastic, g_cap, g_linear, iterated, limit,
                          limit_elastic, orthogonal, project)
from .scenario import (Scenario, jump_train, load_scenario, parse_scenario,
                       sinusoid_drift)
from .skorokhod import (JumpEvent, SkorokhodSolution, SolverConfig,
                        apriori_constant, oscillation_partition, solve,
                        solve_step_input, vi_residual)
from .verify import (CheckBundle, CheckReport, PenalizedEntry, SolutionEntry,
                     helly_bray_check, negated_compensator,
                     run_invariant_suite)

__version__ = "0.1.0"
