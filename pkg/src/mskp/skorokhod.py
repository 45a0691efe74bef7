"""Solver for constrained evolutions driven by cadlag inputs.

For a step input the solution is exact in structure: project the displaced
left limit at each jump, then flow with the operator's contraction
semigroup until the next jump.  General inputs are handled by step
discretizations on oscillation-controlled partitions, refined until two
successive solutions agree in sup norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, ConvergenceError, DomainError
from .operators import MonotoneOperator
from .paths import (BVPath, CadlagPath, Partition, STEP, discretize, shift,
                    stieltjes_integral, sup_distance, sup_norm, time_integral)
from .projections import GeneralizedProjection, project

__all__ = [
    "SolverConfig",
    "JumpEvent",
    "SkorokhodSolution",
    "LevelRecord",
    "solve_step_input",
    "solve",
    "vi_residual",
    "oscillation_partition",
    "apriori_constant",
]


@dataclass(frozen=True)
class SolverConfig:
    """Controls discretization, flow sampling and refinement stopping."""

    n_sub: int = 32               # uniform flow substeps per inter-jump interval
    geometric_substeps: int = 8   # extra substeps refining just after a jump
    geometric_factor: float = 0.5
    h0: float = 0.25              # level-0 mesh target
    refine: float = 2.0           # mesh shrink factor per level
    max_levels: int = 8
    tol_conv: float = 1e-4        # sup-distance between successive levels
    osc_factor: float = 1.0       # oscillation target = osc_factor * mesh
    membership_tol: float = 1e-9
    keep_levels: bool = True

    def __post_init__(self):
        if self.n_sub < 1 or self.refine <= 1.0 or self.h0 <= 0 or self.tol_conv <= 0:
            raise ConfigurationError("solver config values must be positive, refine > 1")


@dataclass(frozen=True)
class JumpEvent:
    """Ledger entry at one jump time of the input."""

    t: float
    dm: np.ndarray
    x_left: np.ndarray
    x_right: np.ndarray
    dk: np.ndarray


@dataclass
class SkorokhodSolution:
    """Solution pair ``(x, k)`` with the jump ledger and diagnostics."""

    x: CadlagPath
    k: BVPath
    events: list
    diagnostics: dict
    levels: Optional[list] = None

    @property
    def kc(self) -> CadlagPath:
        return self.k.continuous_part

    @property
    def kd(self) -> CadlagPath:
        return self.k.jump_part


@dataclass(frozen=True)
class LevelRecord:
    level: int
    points: int
    mesh: float
    solution: "SkorokhodSolution"


# -- oscillation-controlled partitions ----------------------------------------


def _diameter_bound(lo, hi):
    return float(np.sqrt(((hi - lo) ** 2).sum()))


def oscillation_partition(m: CadlagPath, threshold, max_cell=np.inf) -> Partition:
    """Greedy left-to-right partition of ``[0, T]`` whose cells have
    oscillation at most ``threshold`` (soft: linear segments are pre-split so
    overshoot is bounded by half a segment move) and length at most
    ``max_cell``.  Jump times of ``m`` are always cut points.
    """
    if threshold <= 0:
        raise DomainError("oscillation threshold must be positive")
    T = m.horizon
    base = m.times if m.times[-1] == T else np.concatenate([m.times, [T]])

    # refined sweep grid: every gap <= max_cell, every linear move <= threshold/2
    moves = np.linalg.norm(m.left_many(base[1:]) - m.eval_many(base[:-1]), axis=1)
    pieces = np.maximum(1, np.ceil(moves / (threshold / 2.0)).astype(int))
    if np.isfinite(max_cell):
        pieces = np.maximum(pieces, np.ceil(np.diff(base) / max_cell).astype(int))
    grid = [np.array([0.0])]
    for u, v, p in zip(base[:-1], base[1:], pieces):
        if p > 1:
            grid.append(u + (v - u) * np.arange(1, p) / p)
        grid.append(np.array([v]))
    grid = np.concatenate(grid)

    la = m.left_many(grid)
    ra = m.eval_many(grid)
    is_jump = np.isin(grid, m.jump_times())
    cuts = [0.0]
    lo = ra[0].copy()
    hi = ra[0].copy()
    guard = 2.0 / 3.0 * threshold
    for i in range(1, len(grid)):
        t = grid[i]
        if (_diameter_bound(np.minimum(lo, la[i]), np.maximum(hi, la[i])) > guard
                or is_jump[i]
                or t - cuts[-1] >= max_cell):
            cuts.append(float(t))
            lo = ra[i].copy()
            hi = ra[i].copy()
        else:
            lo = np.minimum(np.minimum(lo, la[i]), ra[i])
            hi = np.maximum(np.maximum(hi, la[i]), ra[i])
    if cuts[-1] != T:
        cuts.append(T)
    return Partition(np.asarray(cuts))


# -- a-priori energy/variation bound ------------------------------------------


def apriori_constant(op: MonotoneOperator, m: CadlagPath):
    """Computable constant C with ``|x|_T^2 + var(k) <= C (1 + |m|_T^2)``.

    Derived from the certificate ball ``(a, r0, mu)`` and the cell count of
    an oscillation partition at threshold ``r0 / 2``; deliberately loose.
    """
    M = sup_norm(m)
    alpha = float(np.linalg.norm(op.cert_a))
    mu, r0, T = op.cert_mu, op.cert_r0, m.horizon
    n0 = len(oscillation_partition(m, r0 / 2.0).times)
    b = 2.0 * mu * T + 4.0 * n0 * (M + alpha)
    c = 2.0 * mu * T * (M + alpha) + 2.0 * r0 * mu * T
    y = 0.5 * (b + np.sqrt(b * b + 4.0 * c))
    var = (2.0 * mu * T * (y + M + alpha) + 2.0 * r0 * mu * T
           + 4.0 * n0 * (M + alpha) * y) / r0
    return float(((y + M) ** 2 + 3.0 * var) / (1.0 + M ** 2))


def _bound_diagnostics(op, m, x, k):
    C = apriori_constant(op, m)
    M = sup_norm(m)
    lhs = sup_norm(x) ** 2 + k.variation()
    return {
        "apriori_C": C,
        "apriori_lhs": float(lhs),
        "apriori_margin": float(C * (1.0 + M ** 2) - lhs),
    }


# -- step-input solver ---------------------------------------------------------


def _interval_offsets(length, cfg: SolverConfig):
    uni = np.linspace(0.0, length, cfg.n_sub + 1)[1:]
    if cfg.geometric_substeps > 0:
        geo = length * cfg.geometric_factor ** np.arange(1, cfg.geometric_substeps + 1)
        uni = np.unique(np.concatenate([uni, geo]))
    return uni[uni > 0]


def solve_step_input(op: MonotoneOperator, pi: GeneralizedProjection,
                     m: CadlagPath, cfg: SolverConfig = SolverConfig()) -> SkorokhodSolution:
    """Exact-in-structure solution for a step input.

    At each jump time ``r`` the state restarts from the projected displaced
    left limit; in between it follows the contraction flow, sampled by
    backward Euler on a geometric-then-uniform grid (each grid value equals
    the exponential-formula approximation at that time).
    """
    if m.mode != STEP:
        raise DomainError("step-input solver requires a STEP path")
    if not pi.admissible:
        raise ConfigurationError(
            "projection may land outside the closed domain; wrap it in a "
            "limit projection or use delta = 0")
    x0 = m.values[0]
    if op.domain.distance(x0) > cfg.membership_tol:
        raise DomainError(
            f"m_0 violates the domain constraint (distance "
            f"{op.domain.distance(x0):.3e} > {cfg.membership_tol:.1e})")

    T = m.horizon
    times = [0.0]
    rights = [x0.copy()]
    lefts = [x0.copy()]
    flags = [False]
    events = []
    bp = m.times

    x_cur = x0.copy()
    for i, r in enumerate(bp):
        if i > 0:
            x_left = x_cur
            if m.jumps[i]:
                dm = m.values[i] - m.left_values[i]
                x_cur = project(pi, x_left + dm)
                # the flow sample at r becomes the left limit of the restart
                rights[-1] = x_cur.copy()
                lefts[-1] = x_left.copy()
                flags[-1] = bool(np.any(x_cur != x_left))
                events.append(JumpEvent(float(r), dm.copy(), x_left.copy(),
                                        x_cur.copy(), dm - (x_cur - x_left)))
        end = bp[i + 1] if i + 1 < len(bp) else T
        if end <= r:
            continue
        prev_off = 0.0
        for off in _interval_offsets(end - r, cfg):
            h = off - prev_off
            prev_off = off
            x_cur = op.resolvent(h, x_cur)
            t_abs = end if off == end - r else r + off
            if t_abs <= times[-1]:
                continue
            times.append(float(t_abs))
            rights.append(x_cur.copy())
            lefts.append(x_cur.copy())
            flags.append(False)

    x = CadlagPath.sampled(np.asarray(times), np.vstack(rights),
                           left_values=np.vstack(lefts),
                           jumps=np.asarray(flags), horizon=T)
    ts = np.asarray(times)
    k_r = m.eval_many(ts) - np.vstack(rights)
    k_l = m.left_many(ts) - np.vstack(lefts)
    k_path = CadlagPath.sampled(ts, k_r, left_values=k_l,
                                jumps=np.any(k_r != k_l, axis=1), horizon=T)
    k = BVPath(k_path)

    diag = {
        "sup_x": sup_norm(x),
        "sup_m": sup_norm(m),
        "var_k": k.variation(),
        "jump_count": len(events),
        "partition_points": len(bp),
    }
    diag.update(_bound_diagnostics(op, m, x, k))
    return SkorokhodSolution(x=x, k=k, events=events, diagnostics=diag)


# -- general inputs via refinement ---------------------------------------------


def _strip_artifact_jumps(path: CadlagPath, true_times) -> CadlagPath:
    """Keep jump flags only at the input's genuine jump times; partition
    transitions become ordinary samples of the piecewise-linear carrier."""
    keep = path.jumps & np.isin(path.times, true_times)
    lefts = path.left_values.copy()
    lefts[~keep] = path.values[~keep]
    return CadlagPath.sampled(path.times, path.values, left_values=lefts,
                              jumps=keep, horizon=path.horizon)


def _relabel_events(sol: SkorokhodSolution, m: CadlagPath) -> SkorokhodSolution:
    """Restrict the ledger and both paths' jump sets to the true jumps of
    ``m``, rewriting each ledger increment as the input's exact jump."""
    true_times = m.jump_times()
    x = _strip_artifact_jumps(sol.x, true_times)
    k = BVPath(_strip_artifact_jumps(sol.k.path, true_times))
    events = []
    for e in sol.events:
        if e.t in true_times:
            dm = m.eval(e.t) - m.left(e.t)
            events.append(JumpEvent(e.t, dm, e.x_left, e.x_right,
                                    dm - (e.x_right - e.x_left)))
    diag = dict(sol.diagnostics)
    diag["jump_count"] = len(events)
    diag["var_k"] = k.variation()
    return SkorokhodSolution(x=x, k=k, events=events, diagnostics=diag)


def solve(op: MonotoneOperator, pi: GeneralizedProjection, m: CadlagPath,
          cfg: SolverConfig = SolverConfig()) -> SkorokhodSolution:
    """Discretize-and-refine solution for a general cadlag input.

    A STEP input is its own discretization, so it is solved directly.
    Otherwise step approximants on oscillation-controlled partitions (jump
    times always included) are solved until two successive levels agree
    within ``tol_conv`` in sup norm.  Returned paths carry jumps only at the
    input's true jump times; discretization transitions stay continuous in
    the sampled carrier, so a continuous input yields an empty jump part.
    """
    if m.mode == STEP:
        return solve_step_input(op, pi, m, cfg)
    if op.domain.distance(m.values[0]) > cfg.membership_tol:
        raise DomainError("m_0 violates the domain constraint")

    records = []
    seq = []
    prev = None
    for level in range(cfg.max_levels):
        h = cfg.h0 / cfg.refine ** level
        part = oscillation_partition(m, cfg.osc_factor * h, max_cell=h)
        approx = discretize(m, part)
        sol = _relabel_events(solve_step_input(op, pi, approx, cfg), m)
        records.append(LevelRecord(level, len(part.times), h, sol))
        if prev is not None:
            d = sup_distance(sol.x, prev.x)
            seq.append(d)
            if d < cfg.tol_conv:
                sol.diagnostics["error_sequence"] = seq
                sol.diagnostics["levels_used"] = level + 1
                sol.levels = records if cfg.keep_levels else None
                return sol
        prev = sol
    raise ConvergenceError(
        f"no convergence within {cfg.max_levels} refinement levels", errors=seq)


# -- variational-inequality residual --------------------------------------------


def vi_residual(sol: SkorokhodSolution, op: MonotoneOperator, graph_samples,
                windows):
    """Worst residual of the graph inequality against the continuous part.

    For each window ``(s, t)`` and graph pair ``(alpha, beta)`` evaluates
    the integral of ``<x - alpha, dk^c - beta dr>``; valid solutions stay
    above ``-tol``.
    """
    kc = sol.kc
    worst = np.inf
    where = None
    for (s, t) in windows:
        for j, (alpha, beta) in enumerate(graph_samples):
            xs = shift(sol.x, alpha)
            val = stieltjes_integral(xs, kc, s, t)
            beta = np.asarray(beta, dtype=float)
            if np.any(beta):
                val -= float(beta @ time_integral(xs, s, t))
            if val < worst:
                worst = val
                where = (s, t, j)
    return float(worst), where
