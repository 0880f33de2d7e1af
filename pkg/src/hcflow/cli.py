"""Command line interface.

Exit codes: 0 success, 1 validation failure, 2 numerical failure, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import LieAlgebraSpec, validate
from .catalog import NAMES, catalog, is_catalog_name
from .curvature import curvature_bundle, unitary_bracket
from .errors import AlgebraError, DimensionError, HCFlowError, NumericalError, RealityError, SchemaError
from .flows import Driver, FlowConfig, bracket_flow, metric_flow, normalized_bracket_flow
from .io import dumps, export_spec, fmt, load_spec, parse_document, parse_metric
from .soliton import algebraic_promotion_check, multistart, soliton_fit, static_residual

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(source: str) -> str:
    try:
        return Path(source).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {source!r}: {exc.strerror}") from exc


def _spec(source: str) -> LieAlgebraSpec:
    if is_catalog_name(source) and not Path(source).exists():
        return catalog(source)
    return load_spec(_read(source))


def _form(H):
    return {"re": H.matrix.real.tolist(), "im": H.matrix.imag.tolist()}


def _emit(obj, out):
    out.write(dumps(obj) + "\n")


def cmd_validate(args, out):
    if is_catalog_name(args.file) and not Path(args.file).exists():
        spec = catalog(args.file)
        name, mu = spec.name, spec.bracket
    else:
        name, mu, _, _ = parse_document(_read(args.file))
    rep = validate(mu)
    _emit({"name": name, "n": mu.n, **rep.summary()}, out)
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_curvature(args, out):
    spec = _spec(args.file)
    g = parse_metric(args.metric, spec.n) if args.metric else spec.metric
    mu = unitary_bracket(spec.bracket, g)
    b = curvature_bundle(mu)
    rep = {
        "name": spec.name,
        "frame": "g-unitary",
        "S": _form(b.S), "Q1": _form(b.Q1), "Q2": _form(b.Q2), "Q3": _form(b.Q3), "Q4": _form(b.Q4),
        "Theta": _form(b.Theta), "K": _form(b.K), "Ric11": _form(b.Ric11),
        "traces": b.traces,
        "balanced_defect_vector": b.balanced_defect_vector,
        "balanced_defect_norm": float(np.linalg.norm(b.balanced_defect_vector)),
        "scalar_gap": b.scalar_gap,
    }
    _emit(rep, out)
    return EXIT_OK


def _csv_rows(series, mode, n):
    keys = ["norm2", "trace_theta", "trace_driver", "F", "center_dim", "center_real_dim"]
    header = ["t"]
    if mode == "metric":
        pairs = [(j, k) for j in range(n) for k in range(j, n)]
        header += [f"g_{j + 1}{k + 1}_{p}" for j, k in pairs for p in ("re", "im")]
        header += ["min_eig"]
        if series.driver.kind == "hcf_plus_conformal":
            header += [f"gorig_{j + 1}{k + 1}_{p}" for j, k in pairs for p in ("re", "im")]
    header += keys
    rows = [header]
    for st in series.states:
        d = st.diagnostics
        row = [fmt(st.t)]
        if mode == "metric":
            M = st.g.matrix
            row += [fmt(x) for j, k in pairs for x in (M[j, k].real, M[j, k].imag)]
            row += [fmt(d["min_eig"])]
            if series.driver.kind == "hcf_plus_conformal":
                go = d.get("g_original")
                row += [fmt(x) if go is not None else "" for j, k in pairs
                        for x in ((go.matrix[j, k].real, go.matrix[j, k].imag) if go is not None else (0, 0))]
        for key in keys:
            v = d.get(key)
            row.append("" if v is None else (str(v) if key.startswith("center") else fmt(v)))
        rows.append(row)
    return rows


def cmd_flow(args, out):
    spec = _spec(args.file)
    if args.t_max is None:
        args.t_max = 500.0 if args.normalized else 10.0
    if args.t_max <= 0:
        raise UsageError("--t-max must be positive")
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    mode = "metric" if args.metric else "normalized" if args.normalized else "bracket"
    driver = Driver.make(args.driver, spec.n)
    if mode == "normalized" and driver.kind != "hcf_plus":
        raise UsageError("--normalized is only defined for the hcf+ driver")
    g0 = parse_metric(args.g0, spec.n) if args.g0 else spec.metric
    cfg = FlowConfig(t_max=args.t_max, samples=args.samples)
    wall = time.perf_counter()
    if mode == "metric":
        series = metric_flow(spec, g0, driver, cfg)
    elif mode == "bracket":
        g_start = g0
        if driver.kind == "hcf_plus_conformal":
            from .curvature import psi_norm
            g_start = g0 * psi_norm(spec.psi, g0)
        series = bracket_flow(spec, driver, cfg, mu0=unitary_bracket(spec.bracket, g_start))
    else:
        series = normalized_bracket_flow(spec, cfg, g0=g0)
    rows = _csv_rows(series, mode, spec.n)
    buf = _io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())
    summary = {
        "name": spec.name, "mode": mode, "driver": driver.kind, "reason": series.reason,
        "samples": len(series.states),
        "accepted_steps": series.stats["accepted"], "rejected_steps": series.stats["rejected"],
        "max_drift": series.stats["max_drift"],
    }
    if series.limit is not None:
        L = series.limit
        summary.update(converged=L.converged, t_limit=L.t, r=L.r, velocity=L.velocity,
                       derivation_residual=L.derivation_residual, theta_spectrum=L.theta_spectrum)
    print(dumps(summary), file=sys.stderr if not args.out else out)
    print(f"wall-clock {time.perf_counter() - wall:.3f}s", file=sys.stderr)
    if series.reason in ("metric_degenerate", "step_underflow"):
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_soliton(args, out):
    spec = _spec(args.file)
    g = parse_metric(args.metric, spec.n) if args.metric else spec.metric
    rep = soliton_fit(spec, g)
    res = {"name": spec.name, **rep.summary(),
           "algebraic_promotion": algebraic_promotion_check(rep),
           "static_residual": static_residual(spec, g)}
    if args.multistart:
        if args.multistart < 1:
            raise UsageError("--multistart needs K >= 1")
        ms = multistart(spec, args.multistart, args.seed)
        res["multistart"] = {
            "seed": args.seed,
            "all_converged": ms.all_converged,
            "theta_spectra": ms.spectra,
            "max_discrepancy": ms.max_discrepancy,
            "c": [r.c for r in ms.reports],
            "algebraic": [algebraic_promotion_check(r) for r in ms.reports],
        }
    _emit(res, out)
    return EXIT_OK


def cmd_examples(args, out):
    if args.action == "list":
        for name in NAMES:
            out.write(name + "\n")
        return EXIT_OK
    if not args.name:
        raise UsageError("examples export needs a NAME")
    text = export_spec(catalog(args.name))
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hcflow", description="Hermitian curvature flows on nilpotent Lie algebras.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check Jacobi, integrability and class flags")
    v.add_argument("file", help="algebra document or catalog name")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("curvature", help="print S, Q1-Q4, Theta, K, Ric11 and the balanced defect")
    c.add_argument("file")
    c.add_argument("--metric", help="diag(a,b,...) or JSON matrix; default: document metric")
    c.set_defaults(func=cmd_curvature)

    f = sub.add_parser("flow", help="integrate a flow and write samples as CSV")
    f.add_argument("file")
    f.add_argument("--driver", choices=["hcf+", "hcf", "ric11", "iib"], default="hcf+")
    mode = f.add_mutually_exclusive_group()
    mode.add_argument("--bracket", action="store_true", help="bracket flow (default)")
    mode.add_argument("--metric", action="store_true", help="metric flow")
    mode.add_argument("--normalized", action="store_true", help="normalized bracket flow")
    f.add_argument("--t-max", type=float, default=None,
                   help="final time (default 10, or 500 for --normalized)")
    f.add_argument("--samples", type=int, default=101)
    f.add_argument("--g0", help="initial metric, diag(a,b,...) or JSON matrix")
    f.add_argument("--out", help="CSV path; default: stdout")
    f.set_defaults(func=cmd_flow)

    s = sub.add_parser("soliton", help="fit soliton data at a metric")
    s.add_argument("file")
    s.add_argument("--metric")
    s.add_argument("--multistart", type=int, default=0, metavar="K")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_soliton)

    e = sub.add_parser("examples", help="list or export catalog entries")
    e.add_argument("action", choices=["list", "export"])
    e.add_argument("name", nargs="?")
    e.add_argument("--out")
    e.set_defaults(func=cmd_examples)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"hcflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, RealityError, AlgebraError, DimensionError) as exc:
        print(f"hcflow: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"hcflow: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except HCFlowError as exc:
        print(f"hcflow: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"hcflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
