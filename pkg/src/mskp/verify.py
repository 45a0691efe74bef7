"""Checker harness: evaluates the library's inequalities on produced artifacts.

Every check is a pure function of the bundle and the recorded seed; margins
are signed with uniform semantics (pass when ``margin >= -tol``).  Exact
algebraic checks carry tolerance 1e-10 to 1e-8; integral checks on sampled
trajectories carry the discretization-class tolerance 1e-3.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .operators import MonotoneOperator
from .paths import (BVPath, CadlagPath, combine, norm_time_integral, shift,
                    stieltjes_cumulative, sup_distance, sup_norm)
from .projections import GeneralizedProjection, ORTHOGONAL, elastic, orthogonal, project
from .skorokhod import SkorokhodSolution

__all__ = [
    "CheckReport",
    "SolutionEntry",
    "PenalizedEntry",
    "CheckBundle",
    "run_invariant_suite",
    "helly_bray_check",
    "negated_compensator",
    "CHECK_IDS",
]

_EXACT_TOL = 1e-10
_ELASTIC_TOL = 1e-8
_RANGE_TOL = 1e-9
_INTEGRAL_TOL = 1e-3
_BOUND_TOL = 1e-6


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    digest: str
    margin: float
    tol: float
    location: str
    details: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self):
        return self.margin >= -self.tol


@dataclass
class SolutionEntry:
    """A solved scenario; entries sharing ``group`` form comparison pairs."""

    name: str
    operator: MonotoneOperator
    projection: GeneralizedProjection
    m: CadlagPath
    solution: SkorokhodSolution
    group: str = ""


@dataclass
class PenalizedEntry:
    name: str
    operator: MonotoneOperator
    projection: GeneralizedProjection
    m: CadlagPath
    solution: object  # PenalizedSolution
    group: str = ""


@dataclass
class CheckBundle:
    operators: list = field(default_factory=list)      # (name, MonotoneOperator)
    projections: list = field(default_factory=list)    # (name, projection, operator)
    solutions: list = field(default_factory=list)      # SolutionEntry
    penalized: list = field(default_factory=list)      # PenalizedEntry
    seed: int = 0
    window_depth: int = 6

    def pairs(self):
        return _grouped_pairs(self.solutions)

    def penalized_pairs(self):
        return _grouped_pairs(self.penalized)


def _grouped_pairs(entries):
    out = []
    by_group = {}
    for e in entries:
        if e.group:
            by_group.setdefault(e.group, []).append(e)
    for group in sorted(by_group):
        members = by_group[group]
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                out.append((members[i], members[j]))
    return out


def negated_compensator(sol: SkorokhodSolution) -> SkorokhodSolution:
    """Corruption harness: flip the sign of ``k`` (and its ledger)."""
    k = sol.k.path
    flipped = CadlagPath.sampled(k.times, -k.values, left_values=-k.left_values,
                                 jumps=k.jumps.copy(), horizon=k.horizon) \
        if k.mode != "step" else CadlagPath.step(k.times, -k.values, horizon=k.horizon)
    events = [replace(e, dk=-e.dk) for e in sol.events]
    return SkorokhodSolution(x=sol.x, k=BVPath(flipped), events=events,
                             diagnostics=dict(sol.diagnostics), levels=None)


# -- shared helpers -------------------------------------------------------------


def _digest(*parts):
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
    return h.hexdigest()[:12]


def _rng(bundle, check_id):
    tag = int.from_bytes(hashlib.sha256(check_id.encode()).digest()[:4], "big")
    return np.random.default_rng([bundle.seed, tag])


def _draw_cloud(rng, op, count):
    scale = 2.0 * (op.cert_r0 + np.linalg.norm(op.cert_a) + 1.0)
    return op.cert_a + scale * rng.standard_normal((count, op.dim))


def _dyadic_points(T, depth):
    return np.linspace(0.0, T, 2 ** depth + 1)


def _window_values(cum):
    """All window increments cum[j] - cum[i], i < j, flattened."""
    diff = cum[None, :] - cum[:, None]
    iu = np.triu_indices(len(cum), k=1)
    return diff[iu], iu


def _jump_sq_cumulative(k: CadlagPath, pts):
    jt = k.jump_times()
    sq = np.sum(k.jump_deltas() ** 2, axis=1)
    return np.array([sq[jt <= t].sum() for t in pts])


def _min_report(check_id, digest, samples, tol, locate):
    m = np.asarray(samples, dtype=float)
    i = int(np.argmin(m))
    return CheckReport(check_id, digest, float(m[i]), tol, locate(i))


# -- projection checks ----------------------------------------------------------


def _check_projection_pointwise(bundle, check_id, fn, tol, count=300):
    """Generic projection inequality evaluated on a seeded point cloud."""
    rng = _rng(bundle, check_id)
    worst = np.inf
    where = "no projections in bundle"
    for name, pi, op in bundle.projections:
        cloud = _draw_cloud(rng, op, count)
        margins = fn(pi, op, cloud, rng)
        i = int(np.argmin(margins))
        if margins[i] < worst:
            worst = float(margins[i])
            where = f"{name}[{i}]"
    digest = _digest(check_id, [n for n, _, _ in bundle.projections], bundle.seed)
    return CheckReport(check_id, digest, worst, tol, where)


def _proj_shift_bound(pi, op, cloud, rng):
    half = len(cloud) // 2
    xs, ys = cloud[:half], cloud[half:2 * half]
    out = []
    for x, y in zip(xs, ys):
        px, py = project(pi, x), project(pi, y)
        w = (px - x) - (py - y)
        out.append(0.5 * w @ w - (px - py) @ w)
    return out


def _proj_anchor_bound(pi, op, cloud, rng):
    out = []
    anchors = [op.domain.project(z) for z in cloud[:20]]
    for x in cloud:
        px = project(pi, x)
        w = px - x
        for a in anchors:
            out.append(0.5 * w @ w - (px - a) @ w)
    return out


def _proj_ball_bound(pi, op, cloud, rng):
    a, r0 = op.cert_a, op.cert_r0
    out = []
    for x in cloud:
        px = project(pi, x)
        w = px - x
        out.append((a - px) @ w + 0.5 * w @ w - r0 * np.linalg.norm(w))
    return out


def _proj_fixes_domain(pi, op, cloud, rng):
    out = []
    for z in cloud:
        inside = op.domain.project(z)
        out.append(-float(np.linalg.norm(project(pi, inside) - inside)))
        out.append(-op.domain.distance(project(pi, z)))
    return out


def _check_elastic_energy(bundle):
    check_id = "elastic-energy-decay"
    rng = _rng(bundle, check_id)
    worst, where = np.inf, "no operators"
    for name, op in bundle.operators:
        a, r0 = op.cert_a, op.cert_r0
        for delta in (0.0, 0.3, 0.7, 1.0):
            refl = elastic(op.domain, delta)
            for i, z in enumerate(_draw_cloud(rng, op, 150)):
                p = op.domain.project(z)
                gap = float(np.linalg.norm(z - p))
                lhs = (np.linalg.norm(project(refl, z) - a) ** 2
                       + (1.0 - delta ** 2) * gap ** 2
                       + 2.0 * r0 * (1.0 + delta) * gap)
                margin = float(np.linalg.norm(z - a) ** 2 - lhs)
                if margin < worst:
                    worst, where = margin, f"{name}[delta={delta},{i}]"
    digest = _digest(check_id, [n for n, _ in bundle.operators], bundle.seed)
    return CheckReport(check_id, digest, worst, _ELASTIC_TOL, where)


def _check_firm_nonexpansive(bundle):
    check_id = "firm-nonexpansive"
    rng = _rng(bundle, check_id)
    worst, where = np.inf, "no operators"
    for name, op in bundle.operators:
        cloud = _draw_cloud(rng, op, 300)
        half = len(cloud) // 2
        for i, (x, y) in enumerate(zip(cloud[:half], cloud[half:])):
            px, py = op.domain.project(x), op.domain.project(y)
            margin = float((px - py) @ (x - y) - (px - py) @ (px - py))
            if margin < worst:
                worst, where = margin, f"{name}[{i}]"
    digest = _digest(check_id, [n for n, _ in bundle.operators], bundle.seed)
    return CheckReport(check_id, digest, worst, _EXACT_TOL, where)


# -- resolvent / regularization checks -------------------------------------------


def _check_operator_pointwise(bundle, check_id, fn, tol, count=1000):
    rng = _rng(bundle, check_id)
    worst, where = np.inf, "no operators"
    for name, op in bundle.operators:
        cloud = _draw_cloud(rng, op, count)
        margins = fn(op, cloud)
        i = int(np.argmin(margins))
        if margins[i] < worst:
            worst, where = float(margins[i]), f"{name}[{i}]"
    digest = _digest(check_id, [n for n, _ in bundle.operators], bundle.seed)
    return CheckReport(check_id, digest, worst, tol, where)


def _resolvent_nonexpansive(op, cloud):
    half = len(cloud) // 2
    out = []
    for eps in (0.05, 0.5, 2.0):
        for x, y in zip(cloud[:half], cloud[half:]):
            out.append(np.linalg.norm(x - y)
                       - np.linalg.norm(op.resolvent(eps, x) - op.resolvent(eps, y)))
    return out


def _yosida_lipschitz(op, cloud):
    half = len(cloud) // 2
    out = []
    for eps in (0.05, 0.5, 2.0):
        for x, y in zip(cloud[:half], cloud[half:]):
            out.append(np.linalg.norm(x - y) / eps
                       - np.linalg.norm(op.yosida(eps, x) - op.yosida(eps, y)))
    return out


def _yosida_eps_monotone(op, cloud):
    ladder = 2.0 ** -np.arange(0, 7)[::-1]  # increasing eps
    out = []
    for x in cloud[:200]:
        norms = np.array([np.linalg.norm(op.yosida(e, x)) for e in ladder])
        out.extend(-np.diff(norms))  # |A_eps x| decreasing in eps
    return out


def _yosida_ball_bound(op, cloud):
    a, r0, mu = op.cert_a, op.cert_r0, op.cert_mu
    a0 = op.principal(a)
    a0n = 0.0 if a0 is None else float(np.linalg.norm(a0))
    out = []
    for z in cloud[:300]:
        for eps in (0.05, 0.5, 1.0):
            az = op.yosida(eps, z)
            lhs = r0 * np.linalg.norm(az)
            rhs = az @ (z - a) + mu * np.linalg.norm(z - a) + (a0n + r0) * mu
            out.append(rhs - lhs)
    return out


# -- trajectory checks ------------------------------------------------------------


def _check_jump_bounds(bundle):
    check_id = "jump-bounds"
    worst, where = np.inf, "no solutions"
    for e in bundle.solutions:
        for j, ev in enumerate(e.solution.events):
            dm = np.linalg.norm(ev.dm)
            dx = np.linalg.norm(ev.x_right - ev.x_left)
            dk = np.linalg.norm(ev.dk)
            margin = float(min(dm - dx, 2.0 * dm - dk))
            if margin < worst:
                worst, where = margin, f"{e.name}[event {j} at t={ev.t}]"
    digest = _digest(check_id, [e.name for e in bundle.solutions])
    return CheckReport(check_id, digest, worst, _EXACT_TOL, where)


def _pair_arrays(x, xh, k, kh, m, mh, pts):
    dx = combine(x, xh, np.subtract)
    dk = combine(k, kh, np.subtract)
    dm = combine(m, mh, np.subtract)
    return dx, dk, dm


def _check_pair_monotonicity(bundle, pairs, check_id):
    worst, where = np.inf, "no pairs"
    for (ea, eb) in pairs:
        T = ea.m.horizon
        pts = _dyadic_points(T, bundle.window_depth)
        dx, dk, _ = _pair_arrays(ea.solution.x, eb.solution.x,
                                 ea.solution.k.path, eb.solution.k.path,
                                 ea.m, eb.m, pts)
        f_cum = stieltjes_cumulative(dx, dk, pts)
        s_cum = _jump_sq_cumulative(dk, pts)
        vals, iu = _window_values(f_cum + 0.5 * s_cum)
        i = int(np.argmin(vals))
        if vals[i] < worst:
            worst = float(vals[i])
            where = f"{ea.name}|{eb.name}[{pts[iu[0][i]]:.4g},{pts[iu[1][i]]:.4g}]"
    digest = _digest(check_id, [f"{a.name}|{b.name}" for a, b in pairs])
    return CheckReport(check_id, digest, worst, _INTEGRAL_TOL, where)


def _check_pair_distance(bundle, pairs, check_id):
    worst, where = np.inf, "no pairs"
    for (ea, eb) in pairs:
        T = ea.m.horizon
        pts = _dyadic_points(T, bundle.window_depth)
        dx, dk, dm = _pair_arrays(ea.solution.x, eb.solution.x,
                                  ea.solution.k.path, eb.solution.k.path,
                                  ea.m, eb.m, pts)
        int_cum = stieltjes_cumulative(dm, dk, pts)
        dm_t = dm.eval_many(pts)
        dk_t = dk.eval_many(pts)
        dx_t = dx.eval_many(pts)
        for i, t in enumerate(pts):
            rhs = (dm_t[i] @ dm_t[i]
                   - 2.0 * (dm_t[i] @ dk_t[i] - int_cum[i]))
            margin = float(rhs - dx_t[i] @ dx_t[i])
            if margin < worst:
                worst, where = margin, f"{ea.name}|{eb.name}[t={t:.4g}]"
    digest = _digest(check_id, [f"{a.name}|{b.name}" for a, b in pairs])
    return CheckReport(check_id, digest, worst, _INTEGRAL_TOL, where)


def _check_variation_bound(bundle):
    check_id = "variation-bound"
    worst, where = np.inf, "no solutions"
    for e in bundle.solutions:
        op = e.operator
        a, r0, mu = op.cert_a, op.cert_r0, op.cert_mu
        sol = e.solution
        T = e.m.horizon
        pts = _dyadic_points(T, min(bundle.window_depth, 5))
        x_shift = shift(sol.x, a)
        f_cum = stieltjes_cumulative(x_shift, sol.k.path, pts)
        s_cum = _jump_sq_cumulative(sol.k.path, pts)
        v_cum = np.array([sol.k.variation_to(t) for t in pts])
        n_cum = np.array([0.0] + [norm_time_integral(sol.x, a, 0.0, t)
                                  for t in pts[1:]])
        rhs = f_cum + 0.5 * s_cum + mu * n_cum + pts * r0 * mu
        vals, iu = _window_values(rhs - r0 * v_cum)
        i = int(np.argmin(vals))
        if vals[i] < worst:
            worst = float(vals[i])
            where = f"{e.name}[{pts[iu[0][i]]:.4g},{pts[iu[1][i]]:.4g}]"
    digest = _digest(check_id, [e.name for e in bundle.solutions])
    return CheckReport(check_id, digest, worst, _INTEGRAL_TOL, where)


def _check_apriori(bundle, entries, check_id):
    worst, where = np.inf, "no entries"
    for e in entries:
        sols = [("", e.solution)]
        if getattr(e.solution, "levels", None):
            sols += [(f"/level{r.level}", r.solution) for r in e.solution.levels]
        for tag, s in sols:
            margin = s.diagnostics["apriori_margin"]
            if margin < worst:
                worst, where = float(margin), e.name + tag
    digest = _digest(check_id, [e.name for e in entries])
    return CheckReport(check_id, digest, worst, _BOUND_TOL, where)


def _check_penalized_bound(bundle):
    check_id = "penalized-apriori-bound"
    entries = sorted(bundle.penalized, key=lambda e: e.solution.eps)
    if not entries:
        return CheckReport(check_id, _digest(check_id), np.inf, _BOUND_TOL, "no entries")
    eps0 = None
    margins = []
    for e in entries:  # increasing eps
        margins.append((e.solution.eps, e.solution.diagnostics["apriori_margin"], e.name))
    worst, where = np.inf, entries[0].name
    for eps, margin, name in margins:
        if margin < -_BOUND_TOL:
            break
        eps0 = eps
        if margin < worst:
            worst, where = margin, name
    if eps0 is None:
        worst = max(m for _, m, _ in margins)
    digest = _digest(check_id, [e.name for e in entries])
    return CheckReport(check_id, digest, float(worst), _BOUND_TOL, where,
                       details={"eps0": eps0})


# -- registry ----------------------------------------------------------------------

CHECK_IDS = (
    "apriori-bound",
    "elastic-energy-decay",
    "firm-nonexpansive",
    "jump-bounds",
    "pair-distance-bound",
    "pair-monotonicity",
    "penalized-apriori-bound",
    "penalized-pair-distance",
    "proj-anchor-bound",
    "proj-ball-bound",
    "proj-fixes-domain",
    "proj-shift-bound",
    "resolvent-nonexpansive",
    "variation-bound",
    "yosida-ball-bound",
    "yosida-eps-monotone",
    "yosida-lipschitz",
)


def run_invariant_suite(bundle: CheckBundle, selection=None):
    """Evaluate the selected checks (all by default), ordered by id."""
    if selection is None:
        selection = CHECK_IDS
    unknown = sorted(set(selection) - set(CHECK_IDS))
    if unknown:
        raise ConfigurationError(f"unknown check ids: {', '.join(unknown)}")

    reports = []
    for cid in sorted(set(selection)):
        if cid == "proj-shift-bound":
            r = _check_projection_pointwise(bundle, cid, _proj_shift_bound, _EXACT_TOL)
        elif cid == "proj-anchor-bound":
            r = _check_projection_pointwise(bundle, cid, _proj_anchor_bound, _EXACT_TOL)
        elif cid == "proj-ball-bound":
            r = _check_projection_pointwise(bundle, cid, _proj_ball_bound, _EXACT_TOL)
        elif cid == "proj-fixes-domain":
            r = _check_projection_pointwise(bundle, cid, _proj_fixes_domain, _RANGE_TOL)
        elif cid == "elastic-energy-decay":
            r = _check_elastic_energy(bundle)
        elif cid == "firm-nonexpansive":
            r = _check_firm_nonexpansive(bundle)
        elif cid == "resolvent-nonexpansive":
            r = _check_operator_pointwise(bundle, cid, _resolvent_nonexpansive, _EXACT_TOL)
        elif cid == "yosida-lipschitz":
            r = _check_operator_pointwise(bundle, cid, _yosida_lipschitz, _EXACT_TOL)
        elif cid == "yosida-eps-monotone":
            r = _check_operator_pointwise(bundle, cid, _yosida_eps_monotone, _EXACT_TOL, count=200)
        elif cid == "yosida-ball-bound":
            r = _check_operator_pointwise(bundle, cid, _yosida_ball_bound, _ELASTIC_TOL, count=300)
        elif cid == "jump-bounds":
            r = _check_jump_bounds(bundle)
        elif cid == "pair-monotonicity":
            r = _check_pair_monotonicity(bundle, bundle.pairs(), cid)
        elif cid == "pair-distance-bound":
            r = _check_pair_distance(bundle, bundle.pairs(), cid)
        elif cid == "variation-bound":
            r = _check_variation_bound(bundle)
        elif cid == "apriori-bound":
            r = _check_apriori(bundle, bundle.solutions, cid)
        elif cid == "penalized-pair-distance":
            r = _check_pair_distance(bundle, bundle.penalized_pairs(), cid)
        elif cid == "penalized-apriori-bound":
            r = _check_penalized_bound(bundle)
        reports.append(r)
    return reports


# -- sequence check ------------------------------------------------------------------


def _variation_norm_cumulative(x: CadlagPath, k: CadlagPath, pts):
    """Prefix integrals of |x| against the variation measure of k."""
    ts = np.unique(np.concatenate([x.times, k.times, pts, [x.horizon]]))
    xr, xl = x.eval_many(ts), x.left_many(ts)
    kr, kl = k.eval_many(ts), k.left_many(ts)
    lin = np.linalg.norm(kl[1:] - kr[:-1], axis=1)
    avg = 0.5 * (np.linalg.norm(xr[:-1], axis=1) + np.linalg.norm(xl[1:], axis=1))
    jmp = np.linalg.norm(kr[1:] - kl[1:], axis=1) * np.linalg.norm(xr[1:], axis=1)
    cum = np.concatenate([[0.0], np.cumsum(lin * avg + jmp)])
    return cum[np.searchsorted(ts, pts)]


def helly_bray_check(sequence, limit, window_depth=4, tol_hb1=1e-3,
                     var_factor=10.0):
    """Stability of the pairing integral along an approximating sequence.

    ``sequence`` is a list of ``(x, k)`` pairs, ``limit`` the pair they
    approximate.  Measures the hypotheses first (uniform convergence of both
    components, bounded variations); when violated the report is flagged
    NOT-APPLICABLE instead of failing.  HB margins: the last window-integral
    difference must sit below ``tol_hb1``, and the limit's
    variation-weighted norm integral must not exceed the tail approximants'.
    """
    x_lim, k_lim = limit
    k_lim_path = k_lim.path if isinstance(k_lim, BVPath) else k_lim
    k_lim_bv = k_lim if isinstance(k_lim, BVPath) else BVPath(k_lim)
    seq = [(x, k.path if isinstance(k, BVPath) else k) for x, k in sequence]
    T = x_lim.horizon
    pts = _dyadic_points(T, window_depth)

    dxs = [sup_distance(x, x_lim) for x, _ in seq]
    dks = [sup_distance(k, k_lim_path) for _, k in seq]
    vars_ = [BVPath(k).variation() for _, k in seq]
    details = {"dx": dxs, "dk": dks, "variations": vars_}

    hyp_ok = (max(vars_) <= var_factor * (1.0 + k_lim_bv.variation())
              and dxs[-1] <= dxs[0] + 1e-12 and dks[-1] <= dks[0] + 1e-12)
    digest = _digest("helly-bray", len(seq), T)
    if not hyp_ok:
        details["status"] = "NOT-APPLICABLE"
        return CheckReport("helly-bray", digest, 0.0, _BOUND_TOL,
                           "hypotheses not met", details=details)

    lim_cum = stieltjes_cumulative(x_lim, k_lim_path, pts)
    hb1 = []
    for x, k in seq:
        cum = stieltjes_cumulative(x, k, pts)
        vals, _ = _window_values(cum - lim_cum)
        hb1.append(float(np.abs(vals).max()))
    details["hb1_sequence"] = hb1

    tail = seq[max(0, len(seq) - max(1, len(seq) // 2)):]
    lim_vn = _variation_norm_cumulative(x_lim, k_lim_path, pts)
    lim_windows, _ = _window_values(lim_vn)
    hb2 = np.inf
    for x, k in tail:
        vn = _variation_norm_cumulative(x, k, pts)
        windows, _ = _window_values(vn)
        hb2 = min(hb2, float((windows - lim_windows).min()))
    details["hb2_residual"] = float(hb2)
    details["status"] = "OK"

    margin = float(min(tol_hb1 - hb1[-1], hb2))
    return CheckReport("helly-bray", digest, margin, _BOUND_TOL,
                       f"windows depth {window_depth}", details=details)
