import numpy as np
import pytest

import mskp
from mskp import Ball, Box, HalfSpace, OperatorSpec, make_operator
from mskp.errors import ConstructionError, DomainError
from mskp.operators import (halfline, resolvent_of_yosida, semigroup,
                            yosida)
from mskp.scenario import bidiagonal_matrix


def gallery(rng=None, tight=False):
    """Operators spanning every constructor branch."""
    inner = {"inner_tol": 1e-13} if tight else {}
    return [
        make_operator(OperatorSpec("indicator", 1, set=halfline(0.0))),
        make_operator(OperatorSpec("indicator", 2, set=Ball(np.zeros(2), 1.0))),
        make_operator(OperatorSpec("indicator", 2,
                                   set=HalfSpace(np.array([1.0, 1.0]), 1.0))),
        make_operator(OperatorSpec("scaled_identity", 3, lam=2.0)),
        make_operator(OperatorSpec("linear", 2,
                                   matrix=np.array([[1.0, 0.8], [-0.8, 1.0]]))),
        make_operator(OperatorSpec("prox", 2, lam=1.5,
                                   prox_center=np.array([0.5, -0.5]))),
        make_operator(OperatorSpec("sum", 3, matrix=bidiagonal_matrix(3),
                                   set=Box(np.zeros(3), np.full(3, np.inf)),
                                   **inner)),
    ]


def solve_regularized_fixed_point(op, eps, lam, x, tol=1e-14, budget=400_000):
    """Damped iteration for ``y + lam A_eps(y) = x``; oracle for the closed
    form, touching only Yosida evaluations."""
    tau = 1.0 / (1.0 + lam / eps) ** 2
    y = np.asarray(x, dtype=float).copy()
    for _ in range(budget):
        y_next = y - tau * (y + lam * op.yosida(eps, y) - x)
        if np.linalg.norm(y_next - y) < tol:
            return y_next
        y = y_next
    raise RuntimeError("fixed-point oracle did not converge")


class TestResolvent:
    def test_scaled_identity_closed_form(self):
        op = make_operator(OperatorSpec("scaled_identity", 1, lam=1.0))
        assert op.resolvent(1.0, np.array([2.0]))[0] == pytest.approx(1.0)

    def test_indicator_eps_independent(self, halfline_op):
        for eps in (0.3, 1.0, 7.0):
            assert halfline_op.resolvent(eps, np.array([-2.0]))[0] == 0.0

    def test_sum_kkt_oracle(self, rng):
        mat = np.array([[1.0, 1.0], [0.0, 1.0]])
        box = Box(np.zeros(2), np.full(2, np.inf))
        op = make_operator(OperatorSpec("sum", 2, matrix=mat, set=box))
        eps = 0.1
        for _ in range(100):
            x = 2.0 * rng.standard_normal(2)
            y = op.resolvent(eps, x)
            slack = x - y - eps * (mat @ y)
            assert np.all(y >= -1e-12)
            assert np.all(slack <= 1e-8)
            assert np.max(np.abs(y * slack)) <= 1e-8

    def test_sum_matches_unconstrained_inside(self):
        # far from the boundary the constraint is inactive: plain linear solve
        mat = np.array([[1.0]])
        op = make_operator(OperatorSpec("sum", 1, matrix=mat, set=halfline(0.0)))
        x = np.array([5.0])
        assert op.resolvent(0.2, x)[0] == pytest.approx(5.0 / 1.2, abs=1e-10)

    def test_eps_positive_required(self, halfline_op):
        with pytest.raises(DomainError):
            halfline_op.resolvent(0.0, np.array([1.0]))


class TestYosida:
    def test_halfline_outside(self, halfline_op):
        assert yosida(halfline_op, 0.5, np.array([-2.0]))[0] == pytest.approx(-4.0)

    def test_zero_inside_domain(self, halfline_op):
        assert yosida(halfline_op, 0.3, np.array([1.5]))[0] == 0.0

    def test_scaled_identity_closed_form(self):
        op = make_operator(OperatorSpec("scaled_identity", 1, lam=2.0))
        # (x - x/(1+eps*lam))/eps = lam/(1+eps*lam) x = 4 at eps=0.25, x=3
        assert yosida(op, 0.25, np.array([3.0]))[0] == pytest.approx(4.0)

    @pytest.mark.parametrize("idx", range(7))
    def test_resolvent_pair_in_graph(self, idx, rng):
        # (J_eps x, A_eps x) must satisfy the graph inequality against the
        # analytic principal sections
        op = gallery()[idx]
        pts = op.graph_points(rng, 40)
        for _ in range(20):
            x = 3.0 * rng.standard_normal(op.dim)
            eps = float(rng.uniform(0.05, 1.0))
            j = op.resolvent(eps, x)
            a = op.yosida(eps, x)
            for alpha, beta in pts:
                assert (a - beta) @ (j - alpha) >= -1e-8


class TestSemigroup:
    def test_time_zero(self, halfline_op):
        y = np.array([0.7])
        assert semigroup(halfline_op, 0.0, y, 5)[0] == 0.7

    def test_indicator_stationary(self, halfline_op):
        y = np.array([0.7])
        for t, n in ((0.5, 3), (2.0, 17)):
            assert semigroup(halfline_op, t, y, n)[0] == 0.7

    def test_exponential_formula_scalar(self):
        op = make_operator(OperatorSpec("scaled_identity", 1, lam=1.0))
        y = np.array([1.0])
        v10 = semigroup(op, 1.0, y, 10)[0]
        assert v10 == pytest.approx((1.0 + 0.1) ** -10, abs=1e-14)
        errs = [abs(semigroup(op, 1.0, y, n)[0] - np.exp(-1.0))
                for n in (10, 100, 1000)]
        assert all(e <= 0.2 / n for e, n in zip(errs, (10, 100, 1000)))

    def test_contraction_in_initial_value(self, rng):
        for op in gallery():
            y = op.domain.project(rng.standard_normal(op.dim))
            z = op.domain.project(rng.standard_normal(op.dim))
            sy = semigroup(op, 0.8, y, 16)
            sz = semigroup(op, 0.8, z, 16)
            assert np.linalg.norm(sy - sz) <= np.linalg.norm(y - z) + 1e-12

    def test_outside_domain_rejected(self, halfline_op):
        with pytest.raises(DomainError):
            semigroup(halfline_op, 1.0, np.array([-0.5]), 4)


class TestConstruction:
    def test_empty_box_rejected(self):
        with pytest.raises(ConstructionError):
            Box(np.array([1.0]), np.array([0.0]))

    def test_non_monotone_matrix_rejected(self):
        with pytest.raises(ConstructionError):
            make_operator(OperatorSpec("linear", 2,
                                       matrix=np.array([[-1.0, 0.0], [0.0, 1.0]])))

    def test_ball_projection_formula(self):
        op = make_operator(OperatorSpec("indicator", 2, set=Ball(np.zeros(2), 1.0)))
        x = np.array([3.0, 4.0])
        assert np.allclose(op.resolvent(1.0, x), x / 5.0)

    def test_box_from_two_halflines(self):
        box = Box(np.zeros(2), np.full(2, np.inf))
        op = make_operator(OperatorSpec("indicator", 2, set=box))
        assert np.allclose(op.resolvent(0.5, np.array([-1.0, 2.0])), [0.0, 2.0])

    def test_certificate_ball_inside_domain(self, rng):
        for op in gallery():
            for _ in range(40):
                u = rng.standard_normal(op.dim)
                u /= np.linalg.norm(u)
                assert op.domain.distance(op.cert_a + op.cert_r0 * u) <= 1e-7

    def test_certificate_bounds_principal_sections(self, rng):
        for op in gallery():
            for _ in range(40):
                u = rng.standard_normal(op.dim)
                u /= max(np.linalg.norm(u), 1e-12)
                z = op.cert_a + op.cert_r0 * rng.uniform(0.0, 1.0) * u
                z = op.domain.project(z)
                a0 = op.principal(z)
                assert np.linalg.norm(a0) <= op.cert_mu + 1e-9

    def test_intersection_box_box(self):
        inter = mskp.Intersection(Box(np.array([0.0]), np.array([np.inf])),
                                  Box(np.array([-np.inf]), np.array([2.0])))
        assert inter.project(np.array([5.0]))[0] == 2.0
        assert inter.project(np.array([-1.0]))[0] == 0.0

    def test_intersection_dykstra_box_ball(self):
        inter = mskp.Intersection(Box(np.zeros(2), np.full(2, np.inf)),
                                  Ball(np.zeros(2), 1.0))
        p = inter.project(np.array([-2.0, 2.0]))
        # oracle: clip then renormalize is exact here (projection onto the
        # quarter-disc of a point with one negative coordinate)
        assert np.allclose(p, [0.0, 1.0], atol=1e-10)


class TestProperties:
    """Sampled inequalities for the whole gallery."""

    @pytest.mark.parametrize("idx", range(7))
    def test_nonexpansive_and_lipschitz(self, idx, rng):
        op = gallery()[idx]
        for _ in range(200):
            x, y = 3.0 * rng.standard_normal((2, op.dim))
            eps = float(rng.uniform(0.02, 2.0))
            jd = np.linalg.norm(op.resolvent(eps, x) - op.resolvent(eps, y))
            ad = np.linalg.norm(op.yosida(eps, x) - op.yosida(eps, y))
            d = np.linalg.norm(x - y)
            assert jd <= d + 1e-10
            assert ad <= d / eps + 1e-10

    @pytest.mark.parametrize("idx", range(7))
    def test_yosida_norm_decreasing_in_eps(self, idx, rng):
        op = gallery()[idx]
        ladder = 2.0 ** -np.arange(0, 8)
        for _ in range(50):
            x = 3.0 * rng.standard_normal(op.dim)
            norms = [np.linalg.norm(op.yosida(e, x)) for e in ladder]
            # ladder decreases in eps, so norms must be nondecreasing
            assert all(b >= a - 1e-10 for a, b in zip(norms, norms[1:]))

    def test_yosida_converges_to_principal_on_domain(self, halfline_op):
        # on the closed domain the principal section vanishes, so the
        # regularization must shrink monotonically to zero
        x = np.array([0.0])
        vals = [np.linalg.norm(halfline_op.yosida(2.0 ** -k, x)) for k in range(8)]
        assert vals[-1] <= 1e-12
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("idx", range(7))
    def test_strengthened_monotonicity(self, idx, rng):
        # <x-y, A_eps x - A_eps y> >= eps |A_eps x - A_eps y|^2
        op = gallery()[idx]
        for _ in range(60):
            x, y = 2.0 * rng.standard_normal((2, op.dim))
            eps = float(rng.uniform(0.05, 1.0))
            ax = op.yosida(eps, x)
            ay = op.yosida(eps, y)
            lhs = (x - y) @ (ax - ay)
            assert lhs >= eps * (ax - ay) @ (ax - ay) - 1e-8

    @pytest.mark.parametrize("idx", range(7))
    def test_interior_ball_inequality(self, idx, rng):
        op = gallery()[idx]
        a, r0, mu = op.cert_a, op.cert_r0, op.cert_mu
        a0 = np.linalg.norm(op.principal(a))
        for _ in range(60):
            z = a + 4.0 * rng.standard_normal(op.dim)
            eps = float(rng.uniform(0.05, 1.0))
            az = op.yosida(eps, z)
            lhs = r0 * np.linalg.norm(az)
            rhs = az @ (z - a) + mu * np.linalg.norm(z - a) + (a0 + r0) * mu
            assert lhs <= rhs + 1e-8


class TestRegularizedResolventIdentity:
    def test_closed_form_vs_fixed_point(self, rng):
        ops = gallery(tight=True)
        for trial in range(60):
            op = ops[trial % len(ops)]
            eps = float(rng.uniform(0.05, 1.0))
            lam = eps * float(rng.uniform(0.1, 4.0))
            x = 3.0 * rng.standard_normal(op.dim)
            closed = resolvent_of_yosida(op, eps, lam, x)
            fp = solve_regularized_fixed_point(op, eps, lam, x)
            assert np.linalg.norm(closed - fp) <= 1e-10

    def test_direct_substitution(self, halfline_op):
        # y + lam A_eps(y) must reproduce x when y is the closed form
        x = np.array([-2.0])
        y = resolvent_of_yosida(halfline_op, 1.0, 1.0, x)
        assert y[0] == pytest.approx(-1.0)
        assert y + 1.0 * halfline_op.yosida(1.0, y) == pytest.approx(x)
