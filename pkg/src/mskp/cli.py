"""Batch front door: solve, penalize, study, certify, example.

Exit codes: 0 success, 1 failed certification checks, 2 malformed
configuration, 3 numerical failure (diagnostics file emitted).
All files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from .errors import (ConfigurationError, ConstructionError, ConvergenceError,
                     DomainError, IterationError)
from .paths import shift, write_path_csv
from .penalized import (STUDY_COLUMNS, convergence_study,
                        solve_yosida_amortized, solve_yosida_free)
from .projections import elastic, limit, orthogonal
from .scenario import load_scenario, write_example_scenario
from .skorokhod import solve
from .verify import (CheckBundle, PenalizedEntry, SolutionEntry,
                     run_invariant_suite)

__all__ = ["main"]


def _fmt(v):
    return repr(float(v))


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_path(path_obj, out_path):
    import io

    buf = io.StringIO()
    write_path_csv(path_obj, buf)
    _atomic_write(out_path, buf.getvalue())


def _emit_solution(sol, out_dir, prefix=""):
    _emit_path(sol.x, os.path.join(out_dir, f"{prefix}x.csv"))
    _emit_path(sol.k.path, os.path.join(out_dir, f"{prefix}k.csv"))
    _emit_path(sol.kc, os.path.join(out_dir, f"{prefix}kc.csv"))
    _emit_path(sol.kd, os.path.join(out_dir, f"{prefix}kd.csv"))
    lines = []
    for key in sorted(sol.diagnostics):
        val = sol.diagnostics[key]
        if isinstance(val, (list, tuple, np.ndarray)):
            val = ",".join(_fmt(v) for v in val)
        elif isinstance(val, float):
            val = _fmt(val)
        lines.append(f"{key} = {val}")
    _atomic_write(os.path.join(out_dir, f"{prefix}diagnostics.txt"),
                  "\n".join(lines) + "\n")


def _out_dir(args):
    out = args.out or os.environ.get("MSKP_OUT") or "mskp-out"
    os.makedirs(out, exist_ok=True)
    return out


def _cmd_solve(args):
    scn = load_scenario(args.scenario, seed_override=args.seed)
    cfg = scn.solver
    if args.level is not None:
        from dataclasses import replace

        cfg = replace(cfg, max_levels=int(args.level))
    sol = solve(scn.operator, scn.projection, scn.input_path, cfg)
    out = _out_dir(args)
    _emit_solution(sol, out)
    print(f"solved '{scn.name}': sup|x| = {sol.diagnostics['sup_x']:.6g}, "
          f"var(k) = {sol.diagnostics['var_k']:.6g} -> {out}")
    return 0


def _cmd_penalize(args):
    scn = load_scenario(args.scenario, seed_override=args.seed)
    eps = scn.penalize["eps"]
    h = scn.penalize["h"] or eps / 10.0
    if scn.penalize["scheme"] == "free":
        sol = solve_yosida_free(scn.operator, eps, scn.input_path, h)
    else:
        sol = solve_yosida_amortized(scn.operator, eps, scn.projection,
                                     scn.input_path, h)
    out = _out_dir(args)
    _emit_solution(sol, out, prefix="eps_")
    print(f"penalized '{scn.name}' ({sol.scheme}, eps={eps:g}, h={h:g}) -> {out}")
    return 0


def _cmd_study(args):
    scn = load_scenario(args.scenario, seed_override=args.seed)
    hs = [scn.study["h_factor"] * e for e in scn.study["eps"]]
    rows = convergence_study(scn.operator, scn.projection, scn.input_path,
                             scn.study["eps"], hs, scn.solver,
                             eval_points=scn.study["grid"])
    out = _out_dir(args)
    lines = [",".join(STUDY_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in STUDY_COLUMNS))
    _atomic_write(os.path.join(out, "study.csv"), "\n".join(lines) + "\n")
    print(f"study '{scn.name}': {len(rows)} rows -> {out}/study.csv")
    return 0


def build_certification_bundle(scn):
    """Scenario corpus for the invariant suite: the scenario's solution, a
    shifted-input companion (same operator and projection), and amortized
    regularizations over the study schedule."""
    op, pi, m = scn.operator, scn.projection, scn.input_path
    sol = solve(op, pi, m, scn.solver)
    c = 0.5 * (op.cert_a - m.values[0])
    m_shift = shift(m, -c)  # input translated toward the certificate point
    sol_shift = solve(op, pi, m_shift, scn.solver)

    bundle = CheckBundle(seed=scn.seed)
    bundle.operators.append((f"{scn.name}/op", op))
    bundle.projections.append((f"{scn.name}/pi", pi, op))
    bundle.projections.append((f"{scn.name}/orthogonal", orthogonal(op.domain), op))
    bundle.projections.append(
        (f"{scn.name}/limit05",
         limit(op.domain, 0.5, cert_a=op.cert_a, cert_r0=op.cert_r0), op))
    bundle.solutions.append(SolutionEntry(
        f"{scn.name}/base", op, pi, m, sol, group="pair"))
    bundle.solutions.append(SolutionEntry(
        f"{scn.name}/shifted", op, pi, m_shift, sol_shift, group="pair"))

    eps_list = sorted(scn.study["eps"])
    for eps in eps_list:
        h = scn.study["h_factor"] * eps
        pen = solve_yosida_amortized(op, eps, pi, m, h)
        group = "pen-pair" if eps == eps_list[-1] else ""
        bundle.penalized.append(PenalizedEntry(
            f"{scn.name}/amortized-eps{eps:g}", op, pi, m, pen, group=group))
    h = scn.study["h_factor"] * eps_list[-1]
    pen_shift = solve_yosida_amortized(op, eps_list[-1], pi, m_shift, h)
    bundle.penalized.append(PenalizedEntry(
        f"{scn.name}/amortized-shifted", op, pi, m_shift, pen_shift,
        group="pen-pair"))
    return bundle


def _cmd_certify(args):
    scn = load_scenario(args.scenario, seed_override=args.seed)
    bundle = build_certification_bundle(scn)
    reports = run_invariant_suite(bundle)
    out = _out_dir(args)

    lines = ["check_id,margin,location,pass"]
    for r in reports:
        lines.append(f"{r.check_id},{_fmt(r.margin)},{r.location},{r.passed}")
    _atomic_write(os.path.join(out, "checks.csv"), "\n".join(lines) + "\n")

    width = max(len(r.check_id) for r in reports)
    table = [f"{'check':{width}}  {'margin':>13}  {'tol':>8}  ok  location"]
    for r in reports:
        table.append(f"{r.check_id:{width}}  {r.margin:13.6g}  {r.tol:8.1g}  "
                     f"{'y' if r.passed else 'N'}  {r.location}")
    _atomic_write(os.path.join(out, "checks.txt"), "\n".join(table) + "\n")

    failed = [r for r in reports if not r.passed]
    print("\n".join(table))
    if failed:
        print(f"{len(failed)} check(s) failed")
        return 1
    return 0


def _cmd_example(args):
    out = _out_dir(args)
    path = write_example_scenario(args.n, out, seed=args.seed or 7)
    print(f"wrote {path}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mskp",
        description="Constrained cadlag evolutions driven by maximal "
                    "monotone operators: solve, regularize, study, certify.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True, help="scenario file")
        p.add_argument("--out", default=None,
                       help="output directory (default $MSKP_OUT or ./mskp-out)")
        p.add_argument("--seed", type=int, default=None, help="seed override")

    common(sub.add_parser("solve", help="solve the constrained evolution"))
    common(sub.add_parser("penalize", help="run one regularized scheme"))
    common(sub.add_parser("study", help="emit the convergence table"))
    common(sub.add_parser("certify", help="run the invariant suite"))
    pe = sub.add_parser("example", help="write a constrained bidiagonal scenario")
    pe.add_argument("n", type=int, help="number of constrained coordinates")
    common(pe, scenario=False)
    pe.add_argument("--level", type=int, default=None, help=argparse.SUPPRESS)

    for name in ("solve", "penalize", "study", "certify"):
        sub.choices[name].add_argument("--level", type=int, default=None,
                                       help="override max refinement levels")

    args = parser.parse_args(argv)
    handlers = {"solve": _cmd_solve, "penalize": _cmd_penalize,
                "study": _cmd_study, "certify": _cmd_certify,
                "example": _cmd_example}
    try:
        return handlers[args.command](args)
    except (ConfigurationError, ConstructionError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, IterationError) as exc:
        out = args.out or os.environ.get("MSKP_OUT") or "mskp-out"
        os.makedirs(out, exist_ok=True)
        detail = [f"error = {exc}"]
        if getattr(exc, "errors", None):
            detail.append("error_sequence = " +
                          ",".join(_fmt(e) for e in exc.errors))
        if getattr(exc, "residual", None) is not None:
            detail.append(f"residual = {_fmt(exc.residual)}")
        _atomic_write(os.path.join(out, "failure.txt"), "\n".join(detail) + "\n")
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
