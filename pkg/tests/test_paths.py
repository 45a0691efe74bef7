import io

import numpy as np
import pytest

import mskp
from mskp import CadlagPath, Partition
from mskp.errors import DomainError
from mskp.paths import (BVPath, cadlag_modulus, combine, covariation,
                        discretize, eval_with_left_limit, jump_decompose,
                        read_path_csv, shift, skorokhod_d0, stieltjes_integral,
                        sup_distance, sup_norm, total_variation,
                        write_path_csv)


# -- oracles -------------------------------------------------------------------


def riemann_stieltjes(x, k, s, t, n=100_000):
    """Left-point Riemann sums plus the jump bracket (independent route)."""
    ts = np.linspace(s, t, n + 1)
    xl = x.eval_many(ts[:-1])
    dk = k.eval_many(ts[1:]) - k.eval_many(ts[:-1])
    return float(np.einsum("ij,ij->", xl, dk))


def polygon_length(points):
    return float(np.linalg.norm(np.diff(points, axis=0), axis=1).sum())


def brute_modulus_1d(path, delta, T, n_grid=160):
    """Exhaustive partition search on a uniform cut grid (1-d paths).

    Plain O(n^2) dynamic program over all grid partitions whose cells, the
    last one excepted, are at least ``delta`` long; cell oscillations come
    from dense sampling, independent of the library's candidate pruning.
    """
    cuts = np.linspace(0.0, T, n_grid + 1)
    dense = np.linspace(0.0, T, 8 * n_grid + 1)
    vals = path.eval_many(dense).ravel()

    def osc(u, v):
        lo = np.searchsorted(dense, u, "left")
        hi = np.searchsorted(dense, v, "left")
        seg = vals[lo:hi]
        return float(seg.max() - seg.min()) if len(seg) else 0.0

    f = np.full(n_grid + 1, np.inf)
    f[0] = 0.0
    best = osc(0.0, T)
    for j in range(1, n_grid + 1):
        for i in range(j):
            if cuts[j] - cuts[i] >= delta - 1e-12 and np.isfinite(f[i]):
                f[j] = min(f[j], max(f[i], osc(cuts[i], cuts[j])))
        if np.isfinite(f[j]):
            best = min(best, max(f[j], osc(cuts[j], T)))
    return best


# -- evaluation ------------------------------------------------------------------


class TestEval:
    def test_step_left_right_at_jump(self):
        p = CadlagPath.step([0.0, 2.0], [[1.0], [5.0]], horizon=2.0)
        left, right = eval_with_left_limit(p, 2.0)
        assert left == 1.0 and right == 5.0

    def test_step_constant_segment(self):
        p = CadlagPath.step([0.0, 2.0], [[1.0], [5.0]], horizon=2.0)
        assert eval_with_left_limit(p, 1.0) == (1.0, 1.0)

    def test_sampled_interpolation(self):
        p = CadlagPath.sampled([0.0, 1.0], [[0.0], [2.0]])
        left, right = eval_with_left_limit(p, 0.5)
        assert left == right == 1.0

    def test_time_zero_convention(self, step_m):
        left, right = eval_with_left_limit(step_m, 0.0)
        assert np.array_equal(left, right)

    def test_outside_horizon_raises(self, step_m):
        with pytest.raises(DomainError):
            step_m.eval(3.5)
        with pytest.raises(DomainError):
            step_m.eval(-0.1)

    def test_right_continuity_on_breakpoints(self, step_m):
        for t in step_m.times:
            just_after = min(t + 1e-9, step_m.horizon)
            assert abs(step_m.eval(just_after) - step_m.eval(t)) < 1e-6

    def test_step_consistency_between_breakpoints(self, step_m):
        # right value at t_i equals left limit at t_{i+1} when nothing jumps
        p = CadlagPath.step([0.0, 1.0, 2.0], [[1.0], [1.0], [3.0]], horizon=2.0)
        assert not p.jumps[1]
        assert p.left(2.0) == 1.0


class TestPartition:
    def test_invariants(self):
        p = Partition.uniform(2.0, 4)
        assert p.norm == 0.5 and p.mesh == 0.5
        with pytest.raises(DomainError):
            Partition(np.array([0.5, 1.0]))
        with pytest.raises(DomainError):
            Partition(np.array([0.0]))

    def test_discretize_samples_linear(self):
        m = CadlagPath.sampled([0.0, 1.0], [[0.0], [1.0]])
        d = discretize(m, Partition(np.array([0.0, 0.5, 1.0])))
        assert d.mode == "step"
        assert d.eval(0.25) == 0.0 and d.eval(0.75) == 0.5

    def test_discretize_idempotent_on_step(self, step_m):
        d = discretize(step_m, Partition(np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])))
        ts = np.linspace(0, 3.0, 61)
        assert np.array_equal(d.eval_many(ts), step_m.eval_many(ts))

    def test_discretize_error_equals_mesh_for_identity(self):
        # m(t) = t: the held value lags by exactly one mesh at cell ends
        m = CadlagPath.sampled([0.0, 1.0], [[0.0], [1.0]])
        for n in (4, 8, 16):
            d = discretize(m, Partition.uniform(1.0, n))
            assert sup_distance(d, m) == pytest.approx(1.0 / n, abs=1e-15)

    def test_refinement_error_nonincreasing(self):
        ts = np.linspace(0, 1, 301)
        m = CadlagPath.sampled(ts, np.sin(5 * ts)[:, None])
        errs = [sup_distance(discretize(m, Partition.uniform(1.0, n)), m)
                for n in (3, 6, 12, 24, 48)]
        assert all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))


# -- variation and integration -----------------------------------------------------


class TestVariation:
    def test_step_jump_sum(self):
        p = CadlagPath.step([0.0, 1.0, 2.0], [[0.0], [3.0], [1.0]], horizon=2.0)
        assert total_variation(p, 0.0, 2.0) == 5.0

    def test_constant(self):
        p = CadlagPath.constant([2.0], 1.0)
        assert total_variation(p) == 0.0

    def test_polygonal_arc_length(self):
        th = np.linspace(0.0, np.pi, 1000)
        p = CadlagPath.sampled(th, np.c_[np.cos(th), np.sin(th)], horizon=np.pi)
        oracle = polygon_length(np.c_[np.cos(th), np.sin(th)])
        assert total_variation(p) == pytest.approx(oracle, abs=1e-12)
        assert total_variation(p) == pytest.approx(np.pi, abs=1e-4)

    def test_superadditive_exact_at_breakpoints(self, step_m):
        bv = BVPath(step_m)
        whole = bv.variation(0.0, 3.0)
        assert bv.variation(0.0, 1.0) + bv.variation(1.0, 3.0) == pytest.approx(whole, abs=1e-14)

    def test_window_order_error(self, step_m):
        with pytest.raises(DomainError):
            total_variation(step_m, 2.0, 1.0)

    def test_jump_part_variation_bounded(self, step_m):
        bv = BVPath(step_m)
        kd_var = BVPath(bv.jump_part).variation()
        assert kd_var <= bv.variation() + 1e-14


class TestStieltjes:
    def test_constant_integrand(self, step_m):
        c = CadlagPath.constant([2.0], 3.0)
        val = stieltjes_integral(c, step_m, 0.5, 2.5)
        expected = 2.0 * (step_m.eval(2.5) - step_m.eval(0.5))[0]
        assert val == pytest.approx(expected, abs=1e-14)

    def test_step_self_integral_and_parts(self):
        k = CadlagPath.step([0.0, 1.0], [[0.0], [1.0]], horizon=1.0)
        val = stieltjes_integral(k, k, 0.0, 1.0)
        assert val == pytest.approx(1.0, abs=1e-15)
        parts = 0.5 * 1.0 - 0.5 * 0.0 + 0.5 * covariation(k, k, 0.0, 1.0)
        assert val == pytest.approx(parts, abs=1e-15)

    def test_parts_identity_random_step(self, rng):
        times = np.concatenate([[0.0], np.sort(rng.uniform(0.1, 1.9, 12))])
        vals = rng.normal(size=(13, 2))
        k = CadlagPath.step(times, vals, horizon=2.0)
        lhs = stieltjes_integral(k, k, 0.0, 2.0)
        kt = k.eval(2.0)
        k0 = k.eval(0.0)
        rhs = 0.5 * kt @ kt - 0.5 * k0 @ k0 + 0.5 * covariation(k, k, 0.0, 2.0)
        assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_sampled_linear_vs_riemann(self):
        ts = np.linspace(0.0, 1.0, 10_001)
        p = CadlagPath.sampled(ts, ts[:, None])
        val = stieltjes_integral(p, p, 0.0, 1.0)
        assert val == pytest.approx(0.5, abs=1e-6)
        assert val == pytest.approx(riemann_stieltjes(p, p, 0.0, 1.0), abs=1e-4)

    def test_bound_by_variation(self, step_m, rng):
        x = CadlagPath.step([0.0, 0.7], [[0.3], [-0.9]], horizon=3.0)
        val = stieltjes_integral(x, step_m, 0.0, 3.0)
        assert abs(val) <= sup_norm(x) * total_variation(step_m) + 1e-14

    def test_dimension_mismatch(self, step_m):
        x2 = CadlagPath.constant([1.0, 1.0], 3.0)
        with pytest.raises(DomainError):
            stieltjes_integral(x2, step_m, 0.0, 1.0)


class TestDecompose:
    def test_continuous_path(self):
        ts = np.linspace(0, 1, 50)
        k = CadlagPath.sampled(ts, np.cos(ts)[:, None])
        kc, kd = jump_decompose(k)
        assert len(kd.jump_times()) == 0
        assert np.allclose(kd.eval_many(ts), 0.0)
        assert np.allclose(kc.eval_many(ts), k.eval_many(ts))

    def test_pure_step_zero_start(self):
        k = CadlagPath.step([0.0, 0.5, 1.0], [[0.0], [2.0], [-1.0]], horizon=1.0)
        kc, kd = jump_decompose(k)
        ts = np.linspace(0, 1, 21)
        assert np.allclose(kc.eval_many(ts), 0.0)
        assert np.allclose(kd.eval_many(ts), k.eval_many(ts))

    def test_drift_plus_jump(self):
        ts = np.linspace(0.0, 1.0, 21)
        vals = ts + (ts >= 0.5)
        lefts = ts + (ts > 0.5)
        k = CadlagPath.sampled(ts, vals[:, None], left_values=lefts[:, None],
                               jumps=(ts == 0.5))
        kc, kd = jump_decompose(k)
        assert kc.eval(0.7) == pytest.approx(0.7, abs=1e-14)
        assert kd.eval(0.7) == 1.0 and kd.eval(0.3) == 0.0

    def test_recomposition_at_breakpoints(self, step_m):
        kc, kd = jump_decompose(step_m)
        recomposed = kc.eval_many(step_m.times) + kd.eval_many(step_m.times)
        assert np.allclose(recomposed, step_m.values, atol=1e-12)


# -- modulus and distance -------------------------------------------------------------


class TestModulus:
    def test_spaced_jumps_zero(self):
        p = CadlagPath.step([0.0, 0.4, 0.8], [[0.0], [1.0], [2.0]], horizon=1.2)
        assert cadlag_modulus(p, 0.3) == 0.0

    def test_identity_map(self):
        ts = np.linspace(0, 1, 201)
        p = CadlagPath.sampled(ts, ts[:, None])
        assert cadlag_modulus(p, 0.25) == pytest.approx(0.25, abs=1e-12)
        assert cadlag_modulus(p, 0.25) == pytest.approx(
            brute_modulus_1d(p, 0.25, 1.0), abs=5e-3)

    def test_constant_zero(self):
        assert cadlag_modulus(CadlagPath.constant([3.0], 1.0), 0.1) == 0.0

    def test_delta_past_horizon_single_cell(self):
        p = CadlagPath.step([0.0, 0.5], [[0.0], [1.0]], horizon=1.0)
        assert cadlag_modulus(p, 2.0) == 1.0

    def test_delta_positive_required(self, step_m):
        with pytest.raises(DomainError):
            cadlag_modulus(step_m, 0.0)


class TestD0:
    def test_identical(self, step_m):
        r = skorokhod_d0(step_m, step_m)
        assert r.value == 0.0 and r.exact

    def test_shifted_jump_times(self):
        x = CadlagPath.step([0.0, 0.50], [[0.0], [1.0]], horizon=1.0)
        y = CadlagPath.step([0.0, 0.51], [[0.0], [1.0]], horizon=1.0)
        r = skorokhod_d0(x, y)
        assert 0.0 < r.value <= 0.01 + 1e-12
        assert r.value < sup_distance(x, y)

    def test_different_heights_no_time_change_helps(self):
        x = CadlagPath.step([0.0, 0.5], [[0.0], [1.0]], horizon=1.0)
        y = CadlagPath.step([0.0, 0.5], [[0.0], [2.0]], horizon=1.0)
        assert skorokhod_d0(x, y).value == pytest.approx(1.0, abs=1e-14)

    def test_bounded_by_sup_distance(self, rng):
        for _ in range(20):
            x = _random_step(rng)
            y = _random_step(rng)
            assert skorokhod_d0(x, y).value <= sup_distance(x, y) + 1e-12

    def test_pseudometric_properties(self, rng):
        paths = [_random_step(rng) for _ in range(6)]
        for a in paths:
            for b in paths:
                dab = skorokhod_d0(a, b).value
                assert dab == pytest.approx(skorokhod_d0(b, a).value, abs=1e-12)
                for c in paths:
                    assert dab <= (skorokhod_d0(a, c).value
                                   + skorokhod_d0(c, b).value + 1e-9)

    def test_sampled_flagged_approximate(self):
        ts = np.linspace(0, 1, 11)
        p = CadlagPath.sampled(ts, ts[:, None])
        assert not skorokhod_d0(p, p).exact


def _random_step(rng, horizon=1.0):
    n = int(rng.integers(1, 5))
    times = np.concatenate([[0.0], np.sort(rng.uniform(0.05, 0.95, n))])
    vals = rng.normal(size=(n + 1, 1))
    return CadlagPath.step(times, vals, horizon=horizon)


# -- combination helpers -----------------------------------------------------------


class TestCombine:
    def test_difference_of_steps(self, step_m):
        d = combine(step_m, step_m, np.subtract)
        assert sup_norm(d) == 0.0

    def test_shift(self, step_m):
        s = shift(step_m, np.array([1.0]))
        ts = np.linspace(0, 3, 31)
        assert np.allclose(s.eval_many(ts), step_m.eval_many(ts) - 1.0)

    def test_mixed_mode(self, step_m):
        ts = np.linspace(0, 3, 31)
        lin = CadlagPath.sampled(ts, ts[:, None], horizon=3.0)
        d = combine(lin, step_m, np.subtract)
        assert np.allclose(d.eval_many(ts),
                           lin.eval_many(ts) - step_m.eval_many(ts))
        assert np.allclose(d.left_many(ts),
                           lin.left_many(ts) - step_m.left_many(ts))


# -- CSV interchange ------------------------------------------------------------------


class TestCsv:
    def test_step_round_trip(self, step_m):
        buf = io.StringIO()
        write_path_csv(step_m, buf)
        buf.seek(0)
        back = read_path_csv(buf, horizon=3.0)
        assert back.mode == "step"
        assert np.array_equal(back.times, step_m.times)
        assert np.array_equal(back.values, step_m.values)

    def test_sampled_round_trip_with_jumps(self):
        ts = np.array([0.0, 0.25, 0.5, 1.0])
        vals = np.array([[0.0, 1.0], [0.5, 1.0], [2.0, -1.0], [2.5, 0.0]])
        lefts = vals.copy()
        lefts[2] = [1.0, 1.0]
        p = CadlagPath.sampled(ts, vals, left_values=lefts,
                               jumps=np.array([False, False, True, False]))
        buf = io.StringIO()
        write_path_csv(p, buf)
        buf.seek(0)
        back = read_path_csv(buf, horizon=1.0)
        assert back.mode == "sampled"
        assert np.array_equal(back.times, p.times)
        assert np.array_equal(back.values, p.values)
        assert np.array_equal(back.left_values, p.left_values)
        assert np.array_equal(back.jumps, p.jumps)

    def test_emitted_text_shape(self):
        p = CadlagPath.step([0.0, 1.0], [[1.0], [2.0]], horizon=1.0)
        buf = io.StringIO()
        write_path_csv(p, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "t,flag,c1"
        assert lines[1].startswith("0.0,R,")
        assert lines[2].startswith("1.0,R,") and lines[3].startswith("1.0,J,")

    def test_orphan_jump_row_rejected(self):
        bad = "t,flag,c1\n0.0,R,1.0\n0.5,J,2.0\n"
        with pytest.raises(DomainError):
            read_path_csv(io.StringIO(bad), horizon=1.0)
