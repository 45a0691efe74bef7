"""Cadlag paths on [0, T] and their calculus.

A path is stored as a finite breakpoint grid with right values, an explicit
jump ledger (left value recorded at every flagged time), and one of two
interpolation modes:

* ``STEP``: constant on ``[t_i, t_{i+1})``; every value change is a jump.
* ``SAMPLED``: linear between samples, jumping only at flagged breakpoints.

Both modes extend constantly after the last breakpoint up to the horizon.
Jump times are matched by exact float equality of the stored keys; no
epsilon matching is performed anywhere.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError

STEP = "step"
SAMPLED = "sampled"

__all__ = [
    "STEP",
    "SAMPLED",
    "CadlagPath",
    "BVPath",
    "Partition",
    "D0Result",
    "eval_with_left_limit",
    "discretize",
    "total_variation",
    "stieltjes_integral",
    "stieltjes_cumulative",
    "covariation",
    "jump_decompose",
    "cadlag_modulus",
    "skorokhod_d0",
    "sup_norm",
    "sup_distance",
    "time_integral",
    "norm_time_integral",
    "combine",
    "shift",
    "write_path_csv",
    "read_path_csv",
]


def _as_matrix(values, dim=None):
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None] if dim in (None, 1) else v.reshape(1, -1)
    if v.ndim != 2:
        raise DomainError("path values must be a (n, d) array")
    return v


@dataclass(frozen=True)
class CadlagPath:
    """Right-continuous path with left limits on ``[0, horizon]``."""

    horizon: float
    times: np.ndarray        # (n,) strictly increasing, times[0] == 0
    values: np.ndarray       # (n, d) right values x_{t_i}
    left_values: np.ndarray  # (n, d) left limits x_{t_i-}; row 0 equals values[0]
    jumps: np.ndarray        # (n,) bool; True where left != right
    mode: str

    def __post_init__(self):
        t, v, lv = self.times, self.values, self.left_values
        if t.ndim != 1 or v.shape != lv.shape or v.shape[0] != t.shape[0]:
            raise DomainError("inconsistent path arrays")
        if t[0] != 0.0:
            raise DomainError("paths start at t = 0")
        if t.shape[0] > 1 and not np.all(np.diff(t) > 0):
            raise DomainError("breakpoints must be strictly increasing")
        if t[-1] > self.horizon:
            raise DomainError("breakpoint beyond the horizon")
        if self.jumps[0]:
            raise DomainError("no jump at t = 0 (x_{0-} = x_0 by convention)")
        for a in (t, v, lv, self.jumps):
            a.flags.writeable = False

    # -- constructors ------------------------------------------------------

    @classmethod
    def step(cls, times, values, horizon=None):
        """Piecewise-constant path; jumps are the value changes."""
        t = np.asarray(times, dtype=float)
        v = _as_matrix(values)
        if v.shape[0] != t.shape[0]:
            raise DomainError("times/values length mismatch")
        lv = np.vstack([v[:1], v[:-1]])
        jumps = np.zeros(len(t), dtype=bool)
        if len(t) > 1:
            jumps[1:] = np.any(v[1:] != v[:-1], axis=1)
        T = float(horizon) if horizon is not None else float(t[-1])
        return cls(T, t, v, lv, jumps, STEP)

    @classmethod
    def sampled(cls, times, values, left_values=None, jumps=None, horizon=None):
        """Piecewise-linear path with explicit jumps.

        ``left_values`` is only consulted at flagged indices; elsewhere the
        left limit is the sample itself.
        """
        t = np.asarray(times, dtype=float)
        v = _as_matrix(values)
        if jumps is None:
            jumps = np.zeros(len(t), dtype=bool)
        else:
            jumps = np.asarray(jumps, dtype=bool).copy()
        lv = v.copy()
        if left_values is not None:
            lw = _as_matrix(left_values, dim=v.shape[1])
            lv[jumps] = lw[jumps] if lw.shape == v.shape else lw
        jumps = jumps & np.any(lv != v, axis=1)
        lv[~jumps] = v[~jumps]
        T = float(horizon) if horizon is not None else float(t[-1])
        return cls(T, t, v, lv, jumps, SAMPLED)

    @classmethod
    def constant(cls, value, horizon):
        return cls.step([0.0], [np.atleast_1d(np.asarray(value, dtype=float))],
                        horizon=horizon)

    # -- basic queries -----------------------------------------------------

    @property
    def dim(self):
        return self.values.shape[1]

    def _check_times(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if ts.size and (ts.min() < 0.0 or ts.max() > self.horizon):
            raise DomainError("evaluation time outside [0, T]")
        return ts

    def eval_many(self, ts):
        """Right values x_t at each t (vectorized)."""
        ts = self._check_times(ts)
        idx = np.searchsorted(self.times, ts, side="right") - 1
        out = self.values[idx].copy()
        if self.mode == SAMPLED and len(self.times) > 1:
            interior = (idx < len(self.times) - 1) & (ts != self.times[idx])
            if np.any(interior):
                i = idx[interior]
                t0, t1 = self.times[i], self.times[i + 1]
                th = ((ts[interior] - t0) / (t1 - t0))[:, None]
                out[interior] = (1.0 - th) * self.values[i] + th * self.left_values[i + 1]
        return out

    def left_many(self, ts):
        """Left limits x_{t-} at each t; x_{0-} = x_0."""
        ts = self._check_times(ts)
        idx = np.searchsorted(self.times, ts, side="right") - 1
        at_bp = ts == self.times[idx]
        out = self.eval_many(ts)
        if np.any(at_bp):
            out[at_bp] = self.left_values[idx[at_bp]]
        return out

    def eval(self, t):
        return self.eval_many([t])[0]

    def left(self, t):
        return self.left_many([t])[0]

    def jump_times(self):
        return self.times[self.jumps]

    def jump_deltas(self):
        return self.values[self.jumps] - self.left_values[self.jumps]


def eval_with_left_limit(path: CadlagPath, t: float):
    """Return ``(x_{t-}, x_t)``; domain error outside ``[0, T]``."""
    return path.left(t), path.eval(t)


def sup_norm(path: CadlagPath, *, s=0.0, t=None):
    """sup norm of the path over [s, t] (default the full horizon)."""
    t = path.horizon if t is None else t
    ts = _window_grid(path.times, s, t)
    r = np.linalg.norm(path.eval_many(ts), axis=1).max()
    l = np.linalg.norm(path.left_many(ts[1:]), axis=1).max() if len(ts) > 1 else 0.0
    return float(max(r, l))


def sup_distance(x: CadlagPath, y: CadlagPath):
    """sup_t |x_t - y_t| over the common horizon (exact for the representations)."""
    _check_pair(x, y)
    ts = np.unique(np.concatenate([x.times, y.times, [x.horizon]]))
    d_right = np.linalg.norm(x.eval_many(ts) - y.eval_many(ts), axis=1).max()
    d_left = np.linalg.norm(x.left_many(ts) - y.left_many(ts), axis=1).max()
    return float(max(d_right, d_left))


def _check_pair(x, y):
    if x.dim != y.dim:
        raise DomainError("dimension mismatch")
    if x.horizon != y.horizon:
        raise DomainError("horizon mismatch")


def _window_grid(times, s, t, extra=()):
    if s > t:
        raise DomainError("window start after end")
    inner = times[(times > s) & (times < t)]
    return np.unique(np.concatenate([[s], inner, [t], np.asarray(extra, dtype=float)]))


# -- partitions and discretization ----------------------------------------


@dataclass(frozen=True)
class Partition:
    """Finite partition 0 = t_0 < t_1 < ... of a time interval."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", t)
        if t.ndim != 1 or len(t) < 2:
            raise DomainError("a partition needs at least two points")
        if t[0] != 0.0 or not np.all(np.diff(t) > 0):
            raise DomainError("partition times must start at 0 and increase")
        t.flags.writeable = False

    @classmethod
    def uniform(cls, horizon, n):
        return cls(np.linspace(0.0, float(horizon), int(n) + 1))

    @classmethod
    def from_times(cls, times):
        return cls(np.unique(np.asarray(times, dtype=float)))

    @property
    def norm(self):
        """Largest spacing sup(r' - r)."""
        return float(np.diff(self.times).max())

    @property
    def mesh(self):
        """Smallest spacing inf(r' - r)."""
        return float(np.diff(self.times).min())


def discretize(path: CadlagPath, partition: Partition) -> CadlagPath:
    """Step discretization: value ``path(r)`` held on ``[r, r')``."""
    ts = partition.times[partition.times <= path.horizon]
    return CadlagPath.step(ts, path.eval_many(ts), horizon=path.horizon)


# -- bounded variation ------------------------------------------------------


def total_variation(path, s=0.0, t=None):
    """Exact variation of the represented path on ``[s, t]``.

    For STEP this is the sum of jump magnitudes in ``(s, t]``; for SAMPLED
    the polygonal-chain length plus jumps (representation-exact).
    """
    p = path.path if isinstance(path, BVPath) else path
    t = p.horizon if t is None else t
    if s > t:
        raise DomainError("window start after end")
    ts = _window_grid(p.times, s, t)
    r = p.eval_many(ts)
    l = p.left_many(ts)
    lin = np.linalg.norm(l[1:] - r[:-1], axis=1).sum()
    jmp = np.linalg.norm(r[1:] - l[1:], axis=1).sum()
    return float(lin + jmp)


class BVPath:
    """A cadlag path of bounded variation with cached variation and split.

    Immutable by convention; safe to share between readers.
    """

    def __init__(self, path: CadlagPath):
        self.path = path

    @property
    def horizon(self):
        return self.path.horizon

    @property
    def dim(self):
        return self.path.dim

    @cached_property
    def cumulative_variation(self):
        """Variation on ``[0, t_i]`` for each breakpoint ``t_i``."""
        r, l = self.path.values, self.path.left_values
        seg = np.linalg.norm(l[1:] - r[:-1], axis=1) + np.linalg.norm(r[1:] - l[1:], axis=1)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def variation_to(self, t):
        """Variation on ``[0, t]``."""
        p = self.path
        if t < 0 or t > p.horizon:
            raise DomainError("time outside [0, T]")
        i = int(np.searchsorted(p.times, t, side="right") - 1)
        partial = 0.0
        if t != p.times[i]:
            partial = float(np.linalg.norm(p.eval(t) - p.values[i]))
        return float(self.cumulative_variation[i] + partial)

    def variation(self, s=0.0, t=None):
        t = self.horizon if t is None else t
        if s > t:
            raise DomainError("window start after end")
        return self.variation_to(t) - self.variation_to(s)

    @cached_property
    def split(self):
        return jump_decompose(self.path)

    @property
    def continuous_part(self) -> CadlagPath:
        return self.split[0]

    @property
    def jump_part(self) -> CadlagPath:
        return self.split[1]


def jump_decompose(k: CadlagPath):
    """Split ``k = k^c + k^d`` with ``k^d_t`` the accumulated jumps up to t."""
    jt = k.jump_times()
    jd = k.jump_deltas()
    kd_times = np.concatenate([[0.0], jt])
    kd_vals = np.vstack([np.zeros((1, k.dim)), np.cumsum(jd, axis=0)])
    kd = CadlagPath.step(kd_times, kd_vals, horizon=k.horizon)
    cum = kd.eval_many(k.times)
    kc = CadlagPath.sampled(k.times, k.values - cum, horizon=k.horizon)
    return kc, kd


# -- Stieltjes integration ---------------------------------------------------


def _segment_sweep(x: CadlagPath, k: CadlagPath, s, t, extra=()):
    """Common grid and evaluated arrays for integrals over ``(s, t]``."""
    _check_pair(x, k)
    grid = _window_grid(np.concatenate([x.times, k.times]), s, t, extra=extra)
    xr, xl = x.eval_many(grid), x.left_many(grid)
    kr, kl = k.eval_many(grid), k.left_many(grid)
    return grid, xr, xl, kr, kl


def stieltjes_integral(x: CadlagPath, k, s=0.0, t=None, left_integrand=False):
    """Lebesgue-Stieltjes integral of ``<x, dk>`` over ``(s, t]``.

    Jumps of ``k`` weigh the right value ``x_r`` (left limit when
    ``left_integrand``); the continuous part is integrated exactly for the
    piecewise-linear representations.
    """
    k = k.path if isinstance(k, BVPath) else k
    t = k.horizon if t is None else t
    if s == t:
        return 0.0
    grid, xr, xl, kr, kl = _segment_sweep(x, k, s, t)
    lin = kl[1:] - kr[:-1]
    cont = 0.5 * np.einsum("ij,ij->", xr[:-1] + xl[1:], lin)
    dk = kr[1:] - kl[1:]
    weights = xl[1:] if left_integrand else xr[1:]
    jmp = np.einsum("ij,ij->", weights, dk)
    return float(cont + jmp)


def stieltjes_cumulative(x: CadlagPath, k, taus):
    """Prefix integrals ``(0, tau]`` of ``<x, dk>`` for each tau (sorted)."""
    k = k.path if isinstance(k, BVPath) else k
    taus = np.asarray(taus, dtype=float)
    grid, xr, xl, kr, kl = _segment_sweep(x, k, 0.0, float(k.horizon), extra=taus)
    lin = kl[1:] - kr[:-1]
    seg = 0.5 * np.einsum("ij,ij->i", xr[:-1] + xl[1:], lin)
    seg += np.einsum("ij,ij->i", xr[1:], kr[1:] - kl[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    return cum[np.searchsorted(grid, taus)]


def covariation(x: CadlagPath, k: CadlagPath, s=0.0, t=None):
    """Jump bracket: sum of ``<Dx_r, Dk_r>`` over ``(s, t]``."""
    _check_pair(x, k)
    t = k.horizon if t is None else t
    jt = np.unique(np.concatenate([x.jump_times(), k.jump_times()]))
    jt = jt[(jt > s) & (jt <= t)]
    if len(jt) == 0:
        return 0.0
    dx = x.eval_many(jt) - x.left_many(jt)
    dk = k.eval_many(jt) - k.left_many(jt)
    return float(np.einsum("ij,ij->", dx, dk))


def time_integral(path: CadlagPath, s=0.0, t=None):
    """Vector integral of the path against dt over ``(s, t]`` (exact)."""
    t = path.horizon if t is None else t
    if s == t:
        return np.zeros(path.dim)
    grid = _window_grid(path.times, s, t)
    r, l = path.eval_many(grid), path.left_many(grid)
    dt = np.diff(grid)[:, None]
    return 0.5 * ((r[:-1] + l[1:]) * dt).sum(axis=0)


def norm_time_integral(path: CadlagPath, a, s=0.0, t=None, refine=8):
    """Integral of ``|path_r - a|`` dr on ``(s, t]`` (trapezoid on a refined grid).

    Overestimates slightly: the norm is convex along linear segments.
    """
    t = path.horizon if t is None else t
    if s == t:
        return 0.0
    a = np.asarray(a, dtype=float)
    grid = _window_grid(path.times, s, t)
    total = 0.0
    th = np.linspace(0.0, 1.0, refine + 1)[:, None]
    for u, v in zip(grid[:-1], grid[1:]):
        p0 = path.eval(u)
        p1 = path.left(v)
        vals = np.linalg.norm((1 - th) * (p0 - a) + th * (p1 - a), axis=1)
        total += np.trapezoid(vals, dx=(v - u) / refine)
    return float(total)


# -- pointwise combinations --------------------------------------------------


def combine(x: CadlagPath, y: CadlagPath, f) -> CadlagPath:
    """Pointwise combination on the merged grid.

    Exact only for affine ``f`` (sums, differences, shifts, scalings), since
    those preserve the piecewise-linear/step structure.
    """
    _check_pair(x, y)
    ts = np.unique(np.concatenate([x.times, y.times]))
    r = f(x.eval_many(ts), y.eval_many(ts))
    l = f(x.left_many(ts), y.left_many(ts))
    jumps = np.any(r != l, axis=1)
    if x.mode == STEP and y.mode == STEP:
        return CadlagPath.step(ts, r, horizon=x.horizon)
    return CadlagPath.sampled(ts, r, left_values=l, jumps=jumps, horizon=x.horizon)


def shift(x: CadlagPath, a) -> CadlagPath:
    """The path ``t -> x_t - a`` for a constant vector ``a``."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if x.mode == STEP:
        return CadlagPath.step(x.times, x.values - a, horizon=x.horizon)
    return CadlagPath.sampled(x.times, x.values - a, left_values=x.left_values - a,
                              jumps=x.jumps.copy(), horizon=x.horizon)


# -- cadlag modulus ----------------------------------------------------------


def _cell_oscillation(path: CadlagPath, u, v, cap=400):
    """sup |y_s - y_t| over ``[u, v)`` for the represented path."""
    i0 = int(np.searchsorted(path.times, u, side="right") - 1)
    i1 = int(np.searchsorted(path.times, v, side="left"))  # first bp >= v
    pts = [path.eval(u)]
    if path.mode == STEP:
        pts.extend(path.values[i0 + 1:i1])
    else:
        for i in range(i0 + 1, i1):
            if path.jumps[i]:
                pts.append(path.left_values[i])
            pts.append(path.values[i])
        pts.append(path.left(v))
    pts = np.asarray(pts)
    if len(pts) > cap:
        sel = np.unique(np.linspace(0, len(pts) - 1, cap).astype(int))
        pts = pts[sel]
    if len(pts) < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


def cadlag_modulus(path: CadlagPath, delta, horizon=None, grid_candidates=8):
    """Cadlag modulus: best worst-cell oscillation over partitions of
    ``[0, T)`` whose cells (except the last) are at least ``delta`` long.

    Exact for STEP paths (cuts at jump times); grid search for SAMPLED
    paths with ``grid_candidates`` candidate cuts per ``delta``.
    """
    if delta <= 0:
        raise DomainError("delta must be positive")
    T = path.horizon if horizon is None else float(horizon)
    if path.mode == STEP:
        cand = path.jump_times()
    else:
        g = np.arange(0.0, T, delta / grid_candidates)
        cand = np.concatenate([g, path.times])
    cand = np.unique(np.concatenate([[0.0], cand[(cand > 0) & (cand < T)]]))
    if len(cand) > 400:
        sel = np.unique(np.linspace(0, len(cand) - 1, 400).astype(int))
        sel[0] = 0
        cand = cand[sel]

    n = len(cand)
    osc_to_T = [_cell_oscillation(path, c, T) for c in cand]
    # f[j]: best worst-cell value over partitions 0 = c_0 < ... < c_j with all
    # cells >= delta; the final cell [c_j, T) is exempt from the spacing rule.
    f = np.full(n, np.inf)
    f[0] = 0.0
    best = max(f[0], osc_to_T[0])
    for j in range(1, n):
        for i in range(j):
            if cand[j] - cand[i] < delta or not np.isfinite(f[i]):
                continue
            val = max(f[i], _cell_oscillation(path, cand[i], cand[j]))
            if val < f[j]:
                f[j] = val
        if np.isfinite(f[j]):
            best = min(best, max(f[j], osc_to_T[j]))
    return float(best)


# -- Skorokhod distance ------------------------------------------------------


@dataclass(frozen=True)
class D0Result:
    """Value of the time-change distance; ``exact`` only for STEP inputs."""

    value: float
    exact: bool


def _step_segments(path: CadlagPath):
    """Jump times and held values of the step skeleton of a path."""
    if path.mode == STEP:
        jt = path.jump_times()
        keep = np.concatenate([[True], path.jumps[1:]])
        vals = path.values[keep]
    else:
        jt = path.times[1:]
        vals = path.values
    return jt, vals


def skorokhod_d0(x: CadlagPath, y: CadlagPath) -> D0Result:
    """Distance inf over time changes of max(value distance, time distortion).

    Computed by a dynamic program over monotone alignments of the two jump
    sequences with piecewise-linear time changes; exact for STEP paths and
    evaluated on the discretized skeleton (flagged approximate) otherwise.
    Always bounded by the uniform distance.
    """
    _check_pair(x, y)
    T = x.horizon
    exact = x.mode == STEP and y.mode == STEP
    sx, a = _step_segments(x)
    sy, b = _step_segments(y)
    p, q = len(sx), len(sy)
    ex = np.concatenate([[0.0], sx, [T]])  # segment i spans [ex[i], ex[i+1])
    ey = np.concatenate([[0.0], sy, [T]])

    cell = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    f = np.full((p + 1, q + 1), np.inf)
    f[0, 0] = cell[0, 0]
    for i in range(p + 1):
        for j in range(q + 1):
            if i == 0 and j == 0:
                continue
            best = np.inf
            if i > 0:  # x jump s_i taken alone inside y segment j
                pen = max(0.0, ey[j] - ex[i], ex[i] - ey[j + 1])
                best = min(best, max(f[i - 1, j], pen))
            if j > 0:  # y jump u_j taken alone inside x segment i
                pen = max(0.0, ex[i] - ey[j], ey[j] - ex[i + 1])
                best = min(best, max(f[i, j - 1], pen))
            if i > 0 and j > 0:  # matched jumps
                best = min(best, max(f[i - 1, j - 1], abs(ex[i] - ey[j])))
            f[i, j] = max(best, cell[i, j])
    return D0Result(float(f[p, q]), exact)


# -- CSV interchange ---------------------------------------------------------


def _fmt(v):
    return repr(float(v))


def write_path_csv(path: CadlagPath, target):
    """Emit the breakpoint rows: ``t,flag,c1,...,cd``.

    A jump time yields two rows sharing ``t``: the left limit first, then
    the right value flagged ``J``.
    """
    own = isinstance(target, (str, bytes))
    fh = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        cols = ",".join(f"c{i + 1}" for i in range(path.dim))
        fh.write(f"t,flag,{cols}\n")
        for i, t in enumerate(path.times):
            if i > 0 and path.jumps[i]:
                row = ",".join(_fmt(v) for v in path.left_values[i])
                fh.write(f"{_fmt(t)},R,{row}\n")
                row = ",".join(_fmt(v) for v in path.values[i])
                fh.write(f"{_fmt(t)},J,{row}\n")
            else:
                row = ",".join(_fmt(v) for v in path.values[i])
                fh.write(f"{_fmt(t)},R,{row}\n")
    finally:
        if own:
            fh.close()


def read_path_csv(source, horizon=None, mode="auto") -> CadlagPath:
    """Ingest the CSV breakpoint format.

    ``mode`` is ``"step"``, ``"sampled"`` or ``"auto"``: auto returns STEP
    exactly when the sampled reading would be piecewise constant (every left
    limit equal to the previous right value), which is the shape the STEP
    writer produces.
    """
    own = isinstance(source, (str, bytes))
    fh = open(source, "r", encoding="utf-8") if own else source
    try:
        header = fh.readline().strip()
        parts = header.split(",")
        if parts[:2] != ["t", "flag"]:
            raise DomainError("bad path CSV header")
        dim = len(parts) - 2
        times, values, lefts, flags = [], [], [], []
        pending = None  # left-limit row waiting for its J partner
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            t = float(cells[0])
            flag = cells[1]
            vec = np.array([float(c) for c in cells[2:2 + dim]])
            if flag == "J":
                if pending is None or pending[0] != t:
                    raise DomainError("J row without matching left-limit row")
                times.append(t)
                values.append(vec)
                lefts.append(pending[1])
                flags.append(True)
                pending = None
            elif flag == "R":
                if pending is not None:
                    times.append(pending[0])
                    values.append(pending[1])
                    lefts.append(pending[1])
                    flags.append(False)
                pending = (t, vec)
            else:
                raise DomainError(f"unknown flag {flag!r}")
        if pending is not None:
            times.append(pending[0])
            values.append(pending[1])
            lefts.append(pending[1])
            flags.append(False)
    finally:
        if own:
            fh.close()
    times = np.asarray(times)
    values = np.vstack(values)
    lefts = np.vstack(lefts)
    flags = np.asarray(flags, dtype=bool)
    if mode == "auto":
        is_step = len(times) == 1 or np.array_equal(lefts[1:], values[:-1])
        mode = STEP if is_step else SAMPLED
    if mode == STEP:
        return CadlagPath.step(times, values, horizon=horizon)
    return CadlagPath.sampled(times, values, left_values=lefts, jumps=flags,
                              horizon=horizon)
