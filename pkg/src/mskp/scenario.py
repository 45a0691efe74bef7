"""Scenario files: flat ``key = value`` text with dotted sections.

Grammar (one assignment per line, ``#`` comments)::

    name = reflection
    horizon = 2.0
    dim = 1
    seed = 2024
    operator.kind = indicator | scaled_identity | linear | prox | sum
    operator.set = box:<lo,hi>[;<lo,hi>...] | halfline:<lo> | ball:<c1,..>:<R>
                   | halfspace:<n1,..>:<b> | all
    operator.set2 = ...              # optional second set -> intersection
    operator.matrix = r11,r12;r21,r22
    operator.lambda = 1.0
    operator.prox_center = 0,0
    operator.cert_a = 1 / cert_r0 = 1.0 / cert_mu = 0.0   # optional overrides
    projection.kind = orthogonal | elastic | iterated | limit | custom
    projection.delta = 0.5 / projection.n = 3 / projection.tol = 1e-12
    projection.g = linear:<c> | cap:<v>
    input.kind = step | csv | generator
    input.times = 0,1,2                input.values = 1;-2;0.5
    input.csv = m.csv                  input.mode = step | sampled | auto
    input.generator = jump-train | sinusoid-drift | constant
    input.m0 = 1    input.jumps = 50   input.amplitude = 1.0
    input.samples = 10000  input.freq = 4.0  input.drift = -0.5
    solver.* -> SolverConfig fields    penalize.eps / penalize.h / penalize.scheme
    study.eps = 0.2,0.1  study.h_factor = 0.1  study.grid = 201

Jump trains are drawn with numpy's seeded PCG64 generator and are meant to
be emitted to CSV and re-read, so corpora are reproducible at file level.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .operators import (Ball, Box, HalfSpace, Intersection, MonotoneOperator,
                        OperatorSpec, Whole, make_operator)
from .paths import CadlagPath, read_path_csv
from .projections import (GeneralizedProjection, custom_coordinatewise,
                          elastic, g_cap, g_linear, iterated, limit,
                          orthogonal)
from .skorokhod import SolverConfig

__all__ = [
    "Scenario",
    "parse_scenario",
    "load_scenario",
    "jump_train",
    "sinusoid_drift",
    "bidiagonal_matrix",
    "write_example_scenario",
]


@dataclass
class Scenario:
    name: str
    horizon: float
    dim: int
    seed: int
    operator: MonotoneOperator
    projection: GeneralizedProjection
    input_path: CadlagPath
    solver: SolverConfig
    penalize: dict = field(default_factory=dict)
    study: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _parse_kv(text):
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigurationError(f"line {lineno}: empty key or value")
        out[key] = (value, lineno)
    return out


class _Config:
    def __init__(self, kv):
        self.kv = kv
        self.used = set()

    def get(self, key, default=None, required=False):
        if key in self.kv:
            self.used.add(key)
            return self.kv[key][0]
        if required:
            raise ConfigurationError(f"missing required key '{key}'")
        return default

    def line(self, key):
        return self.kv[key][1] if key in self.kv else 0

    def number(self, key, default=None, required=False):
        raw = self.get(key, required=required)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigurationError(
                f"line {self.line(key)}: '{key}' is not a number") from None

    def integer(self, key, default=None, required=False):
        v = self.number(key, required=required)
        return default if v is None else int(v)


def _floats(raw, key="value"):
    try:
        return np.array([float(p) for p in raw.split(",") if p != ""])
    except ValueError:
        raise ConfigurationError(f"bad float list in {key}: {raw!r}") from None


def _matrix(raw):
    return np.array([[float(c) for c in row.split(",")] for row in raw.split(";")])


def _parse_set(raw, dim, key):
    tag, _, rest = raw.partition(":")
    if tag == "all":
        return Whole(dim)
    if tag == "halfline":
        lo = float(rest) if rest else 0.0
        if dim != 1:
            raise ConfigurationError(f"{key}: halfline is one-dimensional")
        return Box(np.array([lo]), np.array([np.inf]))
    if tag == "box":
        lo, hi = [], []
        for pair in rest.split(";"):
            a, _, b = pair.partition(",")
            lo.append(float(a))
            hi.append(float(b))
        if len(lo) != dim:
            raise ConfigurationError(f"{key}: box needs {dim} lo,hi pairs")
        return Box(np.array(lo), np.array(hi))
    if tag == "ball":
        center, _, radius = rest.rpartition(":")
        c = _floats(center, key)
        if len(c) != dim:
            raise ConfigurationError(f"{key}: ball center needs {dim} entries")
        return Ball(c, float(radius))
    if tag == "halfspace":
        normal, _, offset = rest.rpartition(":")
        n = _floats(normal, key)
        if len(n) != dim:
            raise ConfigurationError(f"{key}: halfspace normal needs {dim} entries")
        return HalfSpace(n, float(offset))
    raise ConfigurationError(f"{key}: unknown set kind {tag!r}")


def _build_operator(cfg: _Config, dim):
    kind = cfg.get("operator.kind", required=True)
    set_raw = cfg.get("operator.set")
    the_set = _parse_set(set_raw, dim, "operator.set") if set_raw else None
    set2_raw = cfg.get("operator.set2")
    if set2_raw:
        the_set = Intersection(the_set, _parse_set(set2_raw, dim, "operator.set2"))
    matrix_raw = cfg.get("operator.matrix")
    cert_a = cfg.get("operator.cert_a")
    spec = OperatorSpec(
        kind=kind,
        dim=dim,
        set=the_set,
        matrix=_matrix(matrix_raw) if matrix_raw else None,
        lam=cfg.number("operator.lambda", 0.0),
        prox_center=_floats(cfg.get("operator.prox_center"), "operator.prox_center")
        if cfg.get("operator.prox_center") else None,
        cert_a=_floats(cert_a, "operator.cert_a") if cert_a else None,
        cert_r0=cfg.number("operator.cert_r0"),
        cert_mu=cfg.number("operator.cert_mu"),
    )
    return make_operator(spec)


def _build_projection(cfg: _Config, op: MonotoneOperator):
    kind = cfg.get("projection.kind", "orthogonal")
    delta = cfg.number("projection.delta", 0.0)
    if kind == "orthogonal":
        return orthogonal(op.domain)
    if kind == "elastic":
        return elastic(op.domain, delta)
    if kind == "iterated":
        return iterated(op.domain, delta, cfg.integer("projection.n", 1))
    if kind == "limit":
        return limit(op.domain, delta, tol=cfg.number("projection.tol", 1e-12),
                     cert_a=op.cert_a, cert_r0=op.cert_r0)
    if kind == "custom":
        raw = cfg.get("projection.g", required=True)
        tag, _, arg = raw.partition(":")
        if tag == "linear":
            g = g_linear(float(arg))
        elif tag == "cap":
            g = g_cap(float(arg))
        else:
            raise ConfigurationError(f"unknown projection.g {tag!r}")
        return custom_coordinatewise(op.domain, g)
    raise ConfigurationError(f"unknown projection.kind {kind!r}")


# -- input generators ------------------------------------------------------------


def jump_train(horizon, dim, n_jumps, amplitude, m0, seed):
    """STEP path: ``n_jumps`` at sorted uniform times, heights uniform in
    ``[-amplitude, amplitude]^d``, accumulated from ``m0``."""
    rng = np.random.default_rng(seed)
    times = np.sort(rng.uniform(0.0, horizon, n_jumps))
    while len(np.unique(times)) < n_jumps or (n_jumps and times[0] == 0.0):
        times = np.sort(rng.uniform(0.0, horizon, n_jumps))
    heights = rng.uniform(-amplitude, amplitude, (n_jumps, dim))
    m0 = np.broadcast_to(np.atleast_1d(np.asarray(m0, dtype=float)), (dim,))
    values = np.vstack([m0, m0 + np.cumsum(heights, axis=0)])
    return CadlagPath.step(np.concatenate([[0.0], times]), values, horizon=horizon)


def sinusoid_drift(horizon, dim, samples, amplitude, freq, drift, m0):
    """SAMPLED path ``m0 + amplitude sin(freq t) + drift t`` per coordinate."""
    ts = np.linspace(0.0, horizon, int(samples))
    m0 = np.broadcast_to(np.atleast_1d(np.asarray(m0, dtype=float)), (dim,))
    vals = m0[None, :] + (amplitude * np.sin(freq * ts) + drift * ts)[:, None]
    return CadlagPath.sampled(ts, vals, horizon=horizon)


def _build_input(cfg: _Config, horizon, dim, seed, base_dir):
    kind = cfg.get("input.kind", required=True)
    if kind == "step":
        times = _floats(cfg.get("input.times", required=True), "input.times")
        values = _matrix(cfg.get("input.values", required=True))
        return CadlagPath.step(times, values, horizon=horizon)
    if kind == "csv":
        rel = cfg.get("input.csv", required=True)
        path = rel if os.path.isabs(rel) else os.path.join(base_dir, rel)
        if not os.path.exists(path):
            raise ConfigurationError(f"input.csv file not found: {path}")
        return read_path_csv(path, horizon=horizon,
                             mode=cfg.get("input.mode", "auto"))
    if kind == "generator":
        gen = cfg.get("input.generator", required=True)
        m0 = _floats(cfg.get("input.m0", "0"), "input.m0")
        if len(m0) == 1 and dim > 1:
            m0 = np.full(dim, m0[0])
        if gen == "jump-train":
            return jump_train(horizon, dim, cfg.integer("input.jumps", 50),
                              cfg.number("input.amplitude", 1.0), m0, seed)
        if gen == "sinusoid-drift":
            return sinusoid_drift(horizon, dim, cfg.integer("input.samples", 2001),
                                  cfg.number("input.amplitude", 1.0),
                                  cfg.number("input.freq", 4.0),
                                  cfg.number("input.drift", 0.0), m0)
        if gen == "constant":
            return CadlagPath.constant(m0, horizon)
        raise ConfigurationError(f"unknown input.generator {gen!r}")
    raise ConfigurationError(f"unknown input.kind {kind!r}")


def _build_solver(cfg: _Config):
    return SolverConfig(
        n_sub=cfg.integer("solver.n_sub", 32),
        geometric_substeps=cfg.integer("solver.geometric_substeps", 8),
        geometric_factor=cfg.number("solver.geometric_factor", 0.5),
        h0=cfg.number("solver.h0", 0.25),
        refine=cfg.number("solver.refine", 2.0),
        max_levels=cfg.integer("solver.max_levels", 8),
        tol_conv=cfg.number("solver.tol_conv", 1e-4),
        osc_factor=cfg.number("solver.osc_factor", 1.0),
    )


def parse_scenario(text, base_dir=".", seed_override=None) -> Scenario:
    kv = _parse_kv(text)
    cfg = _Config(kv)
    name = cfg.get("name", "scenario")
    horizon = cfg.number("horizon", required=True)
    dim = cfg.integer("dim", required=True)
    seed = cfg.integer("seed", 0) if seed_override is None else int(seed_override)
    if horizon <= 0 or dim < 1:
        raise ConfigurationError("horizon must be positive and dim >= 1")

    op = _build_operator(cfg, dim)
    pi = _build_projection(cfg, op)
    m = _build_input(cfg, horizon, dim, seed, base_dir)
    if m.dim != dim:
        raise ConfigurationError(
            f"input path has dimension {m.dim}, scenario says {dim}")
    solver = _build_solver(cfg)

    penalize = {
        "eps": cfg.number("penalize.eps", 0.1),
        "h": cfg.number("penalize.h"),
        "scheme": cfg.get("penalize.scheme", "amortized"),
    }
    study_eps = cfg.get("study.eps", "0.2,0.1,0.05,0.025")
    study = {
        "eps": list(_floats(study_eps, "study.eps")),
        "h_factor": cfg.number("study.h_factor", 0.1),
        "grid": cfg.integer("study.grid", 201),
    }
    return Scenario(name=name, horizon=horizon, dim=dim, seed=seed,
                    operator=op, projection=pi, input_path=m, solver=solver,
                    penalize=penalize, study=study,
                    raw={k: v for k, (v, _) in kv.items()})


def load_scenario(path, seed_override=None) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_scenario(text, base_dir=os.path.dirname(os.path.abspath(path)),
                          seed_override=seed_override)


# -- constrained bidiagonal example -----------------------------------------------


def bidiagonal_matrix(dim):
    """Upper bidiagonal drift: row i couples coordinates i and i+1."""
    return np.eye(dim) + np.eye(dim, k=1)


def write_example_scenario(n_constrained, out_dir, seed=7, pad=2, horizon=2.0,
                           n_jumps=20, amplitude=0.5):
    """Write a truncated constrained bidiagonal scenario with ``pad`` extra
    unconstrained coordinates and a seeded jump-train input (emitted to CSV
    and read back, so the scenario is reproducible at file level).

    Returns the scenario file path.
    """
    from .paths import write_path_csv  # local import to avoid cycle noise

    dim = int(n_constrained) + int(pad)
    os.makedirs(out_dir, exist_ok=True)
    m0 = np.concatenate([np.ones(n_constrained), np.zeros(pad)])
    m = jump_train(horizon, dim, n_jumps, amplitude, m0, seed)
    csv_path = os.path.join(out_dir, f"bidiagonal{n_constrained}_input.csv")
    write_path_csv(m, csv_path)

    lo = ";".join(["0,inf"] * n_constrained + ["-inf,inf"] * pad)
    matrix = ";".join(",".join(repr(float(v)) for v in row)
                      for row in bidiagonal_matrix(dim))
    lines = [
        f"name = bidiagonal{n_constrained}",
        f"horizon = {horizon!r}",
        f"dim = {dim}",
        f"seed = {seed}",
        "operator.kind = sum",
        f"operator.set = box:{lo}",
        f"operator.matrix = {matrix}",
        "projection.kind = orthogonal",
        "input.kind = csv",
        f"input.csv = {os.path.basename(csv_path)}",
        "input.mode = step",
        "solver.n_sub = 32",
        "solver.tol_conv = 1e-6",
    ]
    scn_path = os.path.join(out_dir, f"bidiagonal{n_constrained}.cfg")
    with open(scn_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return scn_path
