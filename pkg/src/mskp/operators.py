"""Maximal monotone operators given through their resolvents.

The gallery covers indicator operators of closed convex sets, monotone
linear maps, scaled identities, quadratic proximal operators, and the sum
``L + normal cone`` used by constrained linear systems.  Every operator
carries a domain descriptor (membership, projection, distance) and an
interior-ball certificate ``(a, r0, mu)`` with ``closure(B(a, r0))``
contained in the domain and ``mu`` bounding the minimal sections there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import ConstructionError, DomainError, IterationError

__all__ = [
    "Box",
    "Ball",
    "HalfSpace",
    "Whole",
    "Intersection",
    "OperatorSpec",
    "MonotoneOperator",
    "make_operator",
    "resolvent",
    "yosida",
    "semigroup",
    "resolvent_of_yosida",
    "halfline",
]

_MEMBERSHIP_TOL = 1e-9


# -- closed convex sets ------------------------------------------------------


class ConvexSet:
    dim: int

    def project(self, x):
        raise NotImplementedError

    def distance(self, x):
        return float(np.linalg.norm(np.asarray(x, dtype=float) - self.project(x)))

    def contains(self, x, tol=_MEMBERSHIP_TOL):
        return self.distance(x) <= tol

    def interior_point(self):
        """Some point with positive margin, or None when unavailable."""
        return None


@dataclass(frozen=True)
class Box(ConvexSet):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ConstructionError("box bounds must be matching vectors")
        if np.any(lo > hi):
            raise ConstructionError("empty box")

    @property
    def dim(self):
        return len(self.lo)

    def project(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def interior_point(self):
        p = np.zeros(self.dim)
        for i in range(self.dim):
            lo, hi = self.lo[i], self.hi[i]
            if np.isfinite(lo) and np.isfinite(hi):
                p[i] = 0.5 * (lo + hi)
            elif np.isfinite(lo):
                p[i] = lo + 1.0
            elif np.isfinite(hi):
                p[i] = hi - 1.0
        return p

    def margin(self, x):
        """Distance from x to the complement (> 0 strictly inside)."""
        x = np.asarray(x, dtype=float)
        return float(np.minimum(x - self.lo, self.hi - x).min())


@dataclass(frozen=True)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius < 0:
            raise ConstructionError("negative radius")

    @property
    def dim(self):
        return len(self.center)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        d = np.linalg.norm(x - self.center)
        if d <= self.radius:
            return x.copy()
        return self.center + (x - self.center) * (self.radius / d)

    def interior_point(self):
        return self.center.copy()


@dataclass(frozen=True)
class HalfSpace(ConvexSet):
    """Points with ``<normal, x> <= offset``; the normal is unit length."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        nn = np.linalg.norm(n)
        if nn == 0:
            raise ConstructionError("zero normal")
        object.__setattr__(self, "normal", n / nn)
        object.__setattr__(self, "offset", float(self.offset) / nn)

    @property
    def dim(self):
        return len(self.normal)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        excess = float(self.normal @ x) - self.offset
        return x - max(excess, 0.0) * self.normal

    def interior_point(self):
        return self.normal * (self.offset - 1.0)


@dataclass(frozen=True)
class Whole(ConvexSet):
    dim: int

    def project(self, x):
        return np.asarray(x, dtype=float).copy()

    def distance(self, x):
        return 0.0

    def interior_point(self):
        return np.zeros(self.dim)


@dataclass(frozen=True)
class Intersection(ConvexSet):
    first: ConvexSet
    second: ConvexSet

    def __post_init__(self):
        if self.first.dim != self.second.dim:
            raise ConstructionError("intersection dimension mismatch")
        if isinstance(self.first, Box) and isinstance(self.second, Box):
            merged = Box(np.maximum(self.first.lo, self.second.lo),
                         np.minimum(self.first.hi, self.second.hi))
            object.__setattr__(self, "_merged", merged)
        else:
            object.__setattr__(self, "_merged", None)

    @property
    def dim(self):
        return self.first.dim

    def project(self, x, tol=1e-13, budget=20_000):
        if self._merged is not None:
            return self._merged.project(x)
        # Dykstra alternating projections with correction terms.
        x = np.asarray(x, dtype=float)
        y = x.copy()
        p = np.zeros_like(y)
        q = np.zeros_like(y)
        for _ in range(budget):
            u = self.first.project(y + p)
            p = y + p - u
            v = self.second.project(u + q)
            q = u + q - v
            if np.linalg.norm(v - y) <= tol and np.linalg.norm(u - v) <= 10 * tol:
                return v
            y = v
        raise IterationError("intersection projection did not converge",
                             residual=float(np.linalg.norm(u - v)))

    def interior_point(self):
        if self._merged is not None:
            return self._merged.interior_point()
        return None


def halfline(lo=0.0):
    """The one-dimensional constraint ``[lo, +inf)``."""
    return Box(np.array([lo]), np.array([np.inf]))


# -- operator specification ---------------------------------------------------

INDICATOR = "indicator"
LINEAR = "linear"
SCALED_IDENTITY = "scaled_identity"
SUM = "sum"
PROX = "prox"


@dataclass(frozen=True)
class OperatorSpec:
    """Tagged description consumed by :func:`make_operator`."""

    kind: str
    dim: int
    set: Optional[ConvexSet] = None
    matrix: Optional[np.ndarray] = None
    lam: float = 0.0
    prox_center: Optional[np.ndarray] = None
    cert_a: Optional[np.ndarray] = None
    cert_r0: Optional[float] = None
    cert_mu: Optional[float] = None
    inner_tol: float = 1e-10
    inner_budget: int = 100_000


@dataclass(frozen=True)
class MonotoneOperator:
    """A maximal monotone operator evaluated through its resolvent.

    Immutable after construction; resolvent calls are pure.
    """

    dim: int
    kind: str
    domain: ConvexSet
    resolvent_fn: Callable[[float, np.ndarray], np.ndarray]
    cert_a: np.ndarray
    cert_r0: float
    cert_mu: float
    principal_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    graph_fn: Optional[Callable] = None
    matrix: Optional[np.ndarray] = None
    lam: float = 0.0

    def resolvent(self, eps, x):
        if eps <= 0:
            raise DomainError("resolvent needs eps > 0")
        return self.resolvent_fn(float(eps), np.asarray(x, dtype=float))

    def yosida(self, eps, x):
        x = np.asarray(x, dtype=float)
        return (x - self.resolvent(eps, x)) / eps

    def principal(self, x):
        """Minimal section A0(x) where an analytic form exists."""
        if self.principal_fn is None:
            return None
        return self.principal_fn(np.asarray(x, dtype=float))

    def graph_points(self, rng, count):
        """Sample pairs ``(alpha, beta)`` from the analytic graph."""
        if self.graph_fn is None:
            return []
        return self.graph_fn(rng, count)


def resolvent(op: MonotoneOperator, eps, x):
    """``(I + eps A)^{-1} x``."""
    return op.resolvent(eps, x)


def yosida(op: MonotoneOperator, eps, x):
    """``(x - J_eps(x)) / eps``; Lipschitz with constant ``1/eps``."""
    return op.yosida(eps, x)


def semigroup(op: MonotoneOperator, t, y, n, membership_tol=_MEMBERSHIP_TOL):
    """Contraction flow by the exponential formula: n-fold resolvent of step t/n."""
    y = np.asarray(y, dtype=float)
    if t < 0:
        raise DomainError("semigroup needs t >= 0")
    if n < 1:
        raise DomainError("semigroup needs n >= 1")
    if op.domain.distance(y) > membership_tol:
        raise DomainError("initial point outside the closed domain")
    if t == 0:
        return y.copy()
    h = t / n
    out = y
    for _ in range(int(n)):
        out = op.resolvent(h, out)
    return out


def resolvent_of_yosida(op: MonotoneOperator, eps, lam, x):
    """Closed form for ``(I + lam * A_eps)^{-1} x``.

    Follows from the resolvent equation: the regularized operator's
    resolvent is a convex combination of the input and ``J_{eps+lam}``.
    """
    x = np.asarray(x, dtype=float)
    return (eps * x + lam * op.resolvent(eps + lam, x)) / (eps + lam)


# -- construction -------------------------------------------------------------


def _spectral_norm(mat):
    return float(np.linalg.norm(mat, 2))


def _check_monotone_matrix(mat):
    sym = 0.5 * (mat + mat.T)
    w = np.linalg.eigvalsh(sym)
    if w.min() < -1e-12 * max(1.0, abs(w).max()):
        raise ConstructionError("linear part is not monotone: <Lx, x> < 0")


def _sphere_samples(dim, count, rng):
    v = rng.standard_normal((count, dim))
    n = np.linalg.norm(v, axis=1, keepdims=True)
    n[n == 0] = 1.0
    return v / n


def _derive_box_certificate(box: Box, r0):
    a = np.zeros(box.dim)
    for i in range(box.dim):
        lo, hi = box.lo[i], box.hi[i]
        if np.isfinite(lo) and np.isfinite(hi):
            if hi - lo < 2 * r0:
                r0 = 0.5 * (hi - lo)
            a[i] = 0.5 * (lo + hi)
        elif np.isfinite(lo):
            a[i] = lo + r0
        elif np.isfinite(hi):
            a[i] = hi - r0
    if r0 <= 0:
        raise ConstructionError("box has empty interior; no certificate ball")
    return a, float(r0)


def _derive_certificate(domain: ConvexSet, r0_default=1.0):
    if isinstance(domain, Box):
        return _derive_box_certificate(domain, r0_default)
    if isinstance(domain, Ball):
        if domain.radius <= 0:
            raise ConstructionError("ball has empty interior")
        return domain.center.copy(), float(min(r0_default, domain.radius))
    if isinstance(domain, HalfSpace):
        return domain.normal * (domain.offset - r0_default), float(r0_default)
    if isinstance(domain, Whole):
        return np.zeros(domain.dim), float(r0_default)
    if isinstance(domain, Intersection) and domain._merged is not None:
        return _derive_box_certificate(domain._merged, r0_default)
    raise ConstructionError(
        "no analytic certificate for this domain; supply cert_a/cert_r0")


def _validate_certificate(domain, a, r0, rng):
    for u in _sphere_samples(len(a), 2 * len(a) + 16, rng):
        if domain.distance(a + r0 * u) > 1e-7:
            raise ConstructionError("certificate ball leaves the closed domain")


def _sum_resolvent(mat, box, inner_tol, inner_budget):
    norm_l = _spectral_norm(mat)
    eye = np.eye(mat.shape[0])

    def res(eps, x):
        y = box.project(x)
        if eps * norm_l <= 0.9:
            step = lambda z: box.project(x - eps * (mat @ z))
        else:
            tau = 1.0 / (1.0 + eps * norm_l) ** 2
            m_eff = eye + eps * mat
            step = lambda z: box.project(z - tau * (m_eff @ z - x))
        for _ in range(inner_budget):
            y_next = step(y)
            if np.linalg.norm(y_next - y) < inner_tol:
                return y_next
            y = y_next
        raise IterationError(
            "sum-operator resolvent did not converge",
            residual=float(np.linalg.norm(y - box.project(x - eps * (mat @ y)))))

    return res


def _box_normal_minimal(box: Box, x, v, tol=1e-12):
    """Minimal-norm element of ``v + N_box(x)`` componentwise."""
    out = v.copy()
    at_lo = np.isfinite(box.lo) & (np.abs(x - box.lo) <= tol)
    at_hi = np.isfinite(box.hi) & (np.abs(x - box.hi) <= tol)
    out[at_lo] = np.minimum(out[at_lo], 0.0)
    out[at_hi] = np.maximum(out[at_hi], 0.0)
    return out


def _indicator_graph(domain, cert_a, cert_r0, mu):
    def sample(rng, count):
        pts = []
        for _ in range(count):
            z = cert_a + cert_r0 * 2.0 * rng.standard_normal(len(cert_a))
            alpha = domain.project(z)
            gap = z - alpha
            norm = np.linalg.norm(gap)
            if norm > 1e-12:
                beta = gap / norm * rng.uniform(0.0, mu)
            else:
                beta = np.zeros_like(alpha)
            pts.append((alpha, beta))
        return pts

    return sample


def _sum_graph(mat, box):
    def sample(rng, count):
        pts = []
        for _ in range(count):
            alpha = box.project(rng.standard_normal(box.dim) * 2.0)
            beta = mat @ alpha
            at_lo = np.isfinite(box.lo) & (alpha == box.lo)
            at_hi = np.isfinite(box.hi) & (alpha == box.hi)
            nu = np.zeros_like(alpha)
            nu[at_lo] = -rng.uniform(0.0, 1.0, at_lo.sum())
            nu[at_hi] = rng.uniform(0.0, 1.0, at_hi.sum())
            pts.append((alpha, beta + nu))
        return pts

    return sample


def _analytic_graph(fn):
    def sample(rng, count):
        return [(z, fn(z)) for z in rng.standard_normal((count, fn.dim)) * 2.0]

    return sample


def make_operator(spec: OperatorSpec) -> MonotoneOperator:
    """Build a gallery operator, deriving certificates where analytic."""
    rng = np.random.default_rng(1_234_567)
    dim = spec.dim
    kind = spec.kind
    matrix = None
    lam = float(spec.lam)
    principal = None
    graph = None

    if kind == INDICATOR:
        if spec.set is None or spec.set.dim != dim:
            raise ConstructionError("indicator needs a set of matching dimension")
        domain = spec.set
        res = lambda eps, x: domain.project(x)

        def principal(x):
            if domain.distance(x) > _MEMBERSHIP_TOL:
                raise DomainError("principal section queried outside the domain")
            return np.zeros(dim)

    elif kind == SCALED_IDENTITY:
        if lam < 0:
            raise ConstructionError("scaled identity needs lam >= 0")
        domain = Whole(dim)
        res = lambda eps, x: x / (1.0 + eps * lam)
        principal = lambda x: lam * x

    elif kind == LINEAR:
        matrix = np.asarray(spec.matrix, dtype=float)
        if matrix.shape != (dim, dim):
            raise ConstructionError("linear operator needs a (d, d) matrix")
        _check_monotone_matrix(matrix)
        domain = Whole(dim)
        eye = np.eye(dim)
        res = lambda eps, x: np.linalg.solve(eye + eps * matrix, x)
        principal = lambda x: matrix @ x

    elif kind == PROX:
        # quadratic catalogue: 0.5 * lam * |x - c|^2
        if lam < 0:
            raise ConstructionError("prox catalogue needs lam >= 0")
        center = (np.zeros(dim) if spec.prox_center is None
                  else np.asarray(spec.prox_center, dtype=float))
        domain = Whole(dim)
        res = lambda eps, x: (x + eps * lam * center) / (1.0 + eps * lam)
        principal = lambda x: lam * (x - center)

    elif kind == SUM:
        matrix = np.asarray(spec.matrix, dtype=float)
        if matrix.shape != (dim, dim):
            raise ConstructionError("sum operator needs a (d, d) matrix")
        _check_monotone_matrix(matrix)
        if not isinstance(spec.set, Box):
            raise ConstructionError("sum operator supports box constraints")
        domain = spec.set
        res = _sum_resolvent(matrix, domain, spec.inner_tol, spec.inner_budget)

        def principal(x, _m=matrix, _b=domain):
            if _b.distance(x) > _MEMBERSHIP_TOL:
                raise DomainError("principal section queried outside the domain")
            return _box_normal_minimal(_b, np.asarray(x, dtype=float), _m @ x)

        graph = _sum_graph(matrix, domain)

    else:
        raise ConstructionError(f"unknown operator kind {kind!r}")

    # certificate
    if spec.cert_a is not None and spec.cert_r0 is not None:
        cert_a = np.asarray(spec.cert_a, dtype=float)
        cert_r0 = float(spec.cert_r0)
    else:
        cert_a, cert_r0 = _derive_certificate(domain)
    _validate_certificate(domain, cert_a, cert_r0, rng)

    if spec.cert_mu is not None:
        cert_mu = float(spec.cert_mu)
    elif kind == INDICATOR:
        cert_mu = 0.0
    elif kind == SCALED_IDENTITY:
        cert_mu = lam * (np.linalg.norm(cert_a) + cert_r0)
    elif kind == PROX:
        cert_mu = lam * (np.linalg.norm(cert_a - center) + cert_r0)
    else:  # LINEAR, SUM: |L a| + |L| r0 dominates the minimal sections
        cert_mu = float(np.linalg.norm(matrix @ cert_a) + _spectral_norm(matrix) * cert_r0)

    if graph is None:
        if kind == INDICATOR:
            graph = _indicator_graph(domain, cert_a, cert_r0, cert_mu)
        else:
            fn = lambda z: principal(z)
            fn.dim = dim
            graph = _analytic_graph(fn)

    return MonotoneOperator(
        dim=dim, kind=kind, domain=domain, resolvent_fn=res,
        cert_a=cert_a, cert_r0=cert_r0, cert_mu=cert_mu,
        principal_fn=principal, graph_fn=graph, matrix=matrix, lam=lam)
