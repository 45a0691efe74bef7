"""Generalized projections onto a closed convex domain.

An admissible map fixes the domain pointwise, is nonexpansive, and lands in
the domain.  The elastic reflection and its iterates are building blocks:
they may overshoot outside, so standalone use as a solver projection is
rejected unless wrapped in the limit map (or degenerate with delta = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, IterationError
from .operators import Box, ConvexSet

__all__ = [
    "GeneralizedProjection",
    "project",
    "limit_elastic",
    "orthogonal",
    "elastic",
    "iterated",
    "limit",
    "custom_coordinatewise",
    "g_linear",
    "g_cap",
]

ORTHOGONAL = "orthogonal"
ELASTIC = "elastic"
ITERATED = "iterated"
LIMIT = "limit"
CUSTOM = "custom"

_DEFAULT_STEP_TOL = 1e-12
_DEFAULT_DIST_TOL = 1e-9
_DEFAULT_BUDGET = 1_000_000


@dataclass(frozen=True)
class GeneralizedProjection:
    kind: str
    domain: ConvexSet
    delta: float = 0.0
    n: int = 1
    tol: float = _DEFAULT_STEP_TOL
    g: Optional[Callable[[np.ndarray], np.ndarray]] = None
    cert_a: Optional[np.ndarray] = None
    cert_r0: Optional[float] = None

    @property
    def admissible(self):
        """Whether the range provably lies in the domain."""
        if self.kind in (ORTHOGONAL, LIMIT, CUSTOM):
            return True
        return self.delta == 0.0

    def __call__(self, z):
        return project(self, z)


def _elastic_step(domain, delta, z):
    p = domain.project(z)
    return p - delta * (z - p)


def project(pi: GeneralizedProjection, z):
    z = np.asarray(z, dtype=float)
    if pi.kind == ORTHOGONAL:
        return pi.domain.project(z)
    if pi.kind == ELASTIC:
        return _elastic_step(pi.domain, pi.delta, z)
    if pi.kind == ITERATED:
        out = z
        for _ in range(pi.n):
            out = _elastic_step(pi.domain, pi.delta, out)
        return out
    if pi.kind == LIMIT:
        out, _ = limit_elastic(pi.domain, pi.delta, z, tol=pi.tol,
                               cert_a=pi.cert_a, cert_r0=pi.cert_r0)
        return out
    if pi.kind == CUSTOM:
        return _custom_project(pi, z)
    raise ConfigurationError(f"unknown projection kind {pi.kind!r}")


def limit_elastic(domain, delta, z, tol=_DEFAULT_STEP_TOL,
                  dist_tol=_DEFAULT_DIST_TOL, budget=_DEFAULT_BUDGET,
                  cert_a=None, cert_r0=None):
    """Limit of iterated elastic reflections; returns ``(point, iterations)``.

    Stops as soon as an iterate enters the closed domain (finite under an
    interior ball), else on Cauchy stagnation near the domain.  On budget
    exhaustion the raised error carries the telescoping displacement bound
    ``|z0 - a|^2 / (2 r0 (1 + delta))`` as a diagnostic when a certificate
    is available.
    """
    z = np.asarray(z, dtype=float)
    cur = z.copy()
    for it in range(budget):
        if domain.distance(cur) <= 1e-12:
            return domain.project(cur), it
        nxt = _elastic_step(domain, delta, cur)
        step = np.linalg.norm(nxt - cur)
        cur = nxt
        if step < tol and domain.distance(cur) < dist_tol:
            return cur, it + 1
    diagnostic = None
    if cert_a is not None and cert_r0:
        diagnostic = float(np.linalg.norm(z - cert_a) ** 2 / (2 * cert_r0 * (1 + delta)))
    raise IterationError("iterated elastic reflections did not stabilize",
                         residual=float(domain.distance(cur)),
                         diagnostic=diagnostic)


def _custom_project(pi: GeneralizedProjection, z):
    box = pi.domain
    out = z.copy()
    g = pi.g
    g0 = g(np.zeros(1))[0]
    constrained = np.isfinite(box.lo)
    zc = z[constrained]
    out[constrained] = np.maximum(zc, 0.0) + np.maximum(g(np.maximum(-zc, 0.0)) - g0, 0.0)
    return out


# -- constructors --------------------------------------------------------------


def orthogonal(domain):
    return GeneralizedProjection(ORTHOGONAL, domain)


def elastic(domain, delta):
    _check_delta(delta)
    return GeneralizedProjection(ELASTIC, domain, delta=delta)


def iterated(domain, delta, n):
    _check_delta(delta)
    if n < 1:
        raise ConfigurationError("iterated projection needs n >= 1")
    return GeneralizedProjection(ITERATED, domain, delta=delta, n=int(n))


def limit(domain, delta, tol=_DEFAULT_STEP_TOL, cert_a=None, cert_r0=None):
    _check_delta(delta)
    return GeneralizedProjection(LIMIT, domain, delta=delta, tol=tol,
                                 cert_a=cert_a, cert_r0=cert_r0)


def custom_coordinatewise(domain, g):
    """Componentwise map ``p = z^+ + [g(z^-) - g(0)]^+`` on constrained
    coordinates; requires a box domain with lower bounds 0 (or free)."""
    if not isinstance(domain, Box):
        raise ConfigurationError("custom projection needs a box domain")
    bad = np.isfinite(domain.lo) & (domain.lo != 0.0)
    if np.any(bad) or np.any(np.isfinite(domain.hi)):
        raise ConfigurationError("custom projection needs [0, inf) constraints")
    return GeneralizedProjection(CUSTOM, domain, g=g)


def _check_delta(delta):
    if not 0.0 <= delta <= 1.0:
        raise ConfigurationError("delta must lie in [0, 1]")


def g_linear(c):
    """1-Lipschitz catalogue entry ``g(u) = c u`` with ``|c| <= 1``."""
    if abs(c) > 1.0:
        raise ConfigurationError("|c| must be at most 1")
    return lambda u: c * np.asarray(u, dtype=float)


def g_cap(cap):
    """1-Lipschitz catalogue entry ``g(u) = min(u, cap)``."""
    return lambda u: np.minimum(np.asarray(u, dtype=float), cap)
