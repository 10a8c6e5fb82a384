"""Command-line front end.

Exit status: 0 when every check passes, 1 on a failed check or a numeric
failure, 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from .atomic import a_quantity, atom_check, atomic_decompose
from .core import ExponentFunction, Grid, NumericError, VarCMOError, grid_of, min_moment_degree
from .duality_czo import CZO_KINDS, apply, build_multiplier_czo, czo_cmo_experiment, pairing, standard_kernel_report
from .fileio import coeffs_text, read_coeffs, read_signal, signal_csv, write_signal
from .luxemburg import luxemburg_norm
from .phi_transform import analyze, reconstruction_error, synthesize
from .signals import band_noise, make_rng, smooth_function, sparse_field, sparse_signal
from .space_norms import campanato_norm, cmo_norm, hardy_norm, seq_c_norm, seq_s_norm, zygmund_norm
from .specs import RunConfig, exponent_from_spec, family_from_spec, load_document
from .suites import SCHEMA, SUITES, Check, SuiteConfig, _clean, build_report, dumps, run_suite, validate_suite_config

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SPACES = ("lp", "hardy", "cmo", "s", "c", "campanato", "zygmund")
GLOBAL_KEYS = ("grid", "exponent", "kernels", "seed", "trials", "threads", "out", "format")
DEFAULT_GRID = 8


class UsageError(Exception):
    pass


def _parent(suppress: bool = False) -> argparse.ArgumentParser:
    # subcommand copies must not overwrite flags given before the subcommand
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS if suppress else None)
    g = p.add_argument_group("global options")
    g.add_argument("--config", help="JSON run config (file or inline); flags override it")
    g.add_argument("--grid", type=int, metavar="J", help="log2 of the sample count")
    g.add_argument("--exponent", metavar="SPEC", help="exponent spec: number, inline JSON or JSON file")
    g.add_argument("--kernels", metavar="SPEC", help="window name, or JSON {window, j_min, j_max, shift}")
    g.add_argument("--seed", type=int, metavar="U64")
    g.add_argument("--trials", type=int, metavar="K")
    g.add_argument("--threads", type=int)
    g.add_argument("--out", metavar="DIR", help="write outputs here instead of stdout")
    g.add_argument("--format", choices=("csv", "structured"))
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="varcmo", parents=[_parent()],
                                 description="Variable-exponent Hardy/CMO numerics on the periodic grid.")
    sub = ap.add_subparsers(dest="command", required=True)
    parent = _parent(suppress=True)

    gen = sub.add_parser("gen", parents=[parent], help="generate seeded signals, exponents or coefficient fields")
    gen.add_argument("what", choices=("signal", "exponent", "coeffs"))
    gen.add_argument("--kind", choices=("band", "sparse", "smooth"), default="sparse")
    gen.add_argument("--count", type=int, default=8, help="cubes in a sparse field")
    gen.add_argument("--stream", type=int, default=0, help="trial index within the seed")

    norm = sub.add_parser("norm", parents=[parent], help="evaluate one norm of a signal or coefficient file")
    norm.add_argument("--space", choices=SPACES, required=True)
    norm.add_argument("--input", required=True, help="signal file, or coefficient file for s and c")
    norm.add_argument("--q", type=float, default=2.0)
    norm.add_argument("--degree", type=int, default=0)
    norm.add_argument("--form", choices=("discrete", "integral"), default="discrete")
    norm.add_argument("--probe", default="left")

    tr = sub.add_parser("transform", parents=[parent], help="phi-transform analysis and synthesis")
    tr.add_argument("mode", choices=("analyze", "synthesize", "roundtrip"))
    tr.add_argument("--input", required=True)
    tr.add_argument("--probe", default="left")

    dec = sub.add_parser("decompose", parents=[parent], help="atomic decomposition of a signal")
    dec.add_argument("--input", required=True)
    dec.add_argument("--degree", type=int)

    pair = sub.add_parser("pair", parents=[parent], help="coefficient pairing of f and g with the norm product")
    pair.add_argument("--f", required=True)
    pair.add_argument("--g", required=True)

    czo = sub.add_parser("czo", parents=[parent], help="multiplier operators")
    czo.add_argument("mode", choices=("apply", "experiment", "kernel"))
    czo.add_argument("--operator", help="operator kind or JSON {kind, gamma, multiplier}")
    czo.add_argument("--input")

    ver = sub.add_parser("verify", parents=[parent], help="run acceptance suites")
    ver.add_argument("suite", choices=sorted(SUITES) + ["all"])
    return ap


def resolve_config(args) -> RunConfig:
    cfg = RunConfig.from_document(args.config) if args.config else RunConfig()
    for key in GLOBAL_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, v)
    if getattr(args, "operator", None) is not None:
        cfg.operator = args.operator
    return cfg.validate()


class Output:
    """Routes named artifacts to --out or stdout."""

    def __init__(self, out: str | None):
        self.out = out
        if out:
            os.makedirs(out, exist_ok=True)

    def text(self, name: str, content: str):
        if self.out:
            with open(os.path.join(self.out, name), "w") as fh:
                fh.write(content)
        else:
            sys.stdout.write(content)
            if not content.endswith("\n"):
                sys.stdout.write("\n")

    def sidecar(self, name: str, content: str):
        """Files that only make sense next to a report; dropped when writing to stdout."""
        if self.out:
            with open(os.path.join(self.out, name), "w") as fh:
                fh.write(content)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else v for v in r])
    return buf.getvalue()


def _cell(v):
    return v if isinstance(v, (int, float, str)) or v is None else json.dumps(v)


def _check_rows(report: dict):
    for c in report["checks"]:
        yield [report["suite"], c["name"], _cell(c["value"]), _cell(c["threshold"]), c["passed"]]


def emit_report(out: Output, cfg: RunConfig, report: dict, stem: str = "report"):
    if cfg.format == "csv":
        out.text(f"{stem}.csv", _rows_csv(["suite", "check", "value", "threshold", "passed"], _check_rows(report)))
    else:
        out.text(f"{stem}.json", dumps(report) + "\n")


def _op_report(op: str, cfg: RunConfig, checks: list[Check], result: dict) -> dict:
    echo = {k: getattr(cfg, k) for k in ("grid", "exponent", "kernels", "operator", "seed", "trials")}
    report = build_report(op, SuiteConfig(log2_size=cfg.grid or 0, seed=cfg.seed), checks)
    report["config"] = _clean({**echo, "rng": report["config"]["rng"]})
    report["result"] = _clean(result)
    return report


def _grid(cfg: RunConfig, f=None) -> Grid:
    if f is not None:
        g = grid_of(f)
        if cfg.grid is not None and cfg.grid != g.log2_size:
            raise UsageError(f"input has 2**{g.log2_size} samples but --grid is {cfg.grid}")
        return g
    return Grid(cfg.grid if cfg.grid is not None else DEFAULT_GRID)


def _exponent(cfg: RunConfig, g: Grid, default: float = 1.0) -> ExponentFunction:
    return exponent_from_spec(cfg.exponent if cfg.exponent is not None else default, g)


def _operator(cfg: RunConfig, g: Grid):
    spec = cfg.operator if cfg.operator is not None else "hilbert_smooth"
    if isinstance(spec, str) and spec.strip() in CZO_KINDS:
        spec = {"kind": spec.strip()}
    doc = load_document(spec)
    if not isinstance(doc, dict) or set(doc) - {"kind", "gamma", "multiplier"}:
        raise UsageError("operator spec must be a kind name or JSON {kind, gamma, multiplier}")
    return build_multiplier_czo(g, doc.get("kind", "hilbert_smooth"), float(doc.get("gamma", 1.0)),
                                doc.get("multiplier"))


def cmd_gen(args, cfg: RunConfig, out: Output) -> int:
    g = _grid(cfg)
    rng = make_rng(cfg.seed, 61, args.stream)
    if args.what == "exponent":
        p = _exponent(cfg, g)
        out.text("exponent.csv", _rows_csv(["index", "p"], ([i, repr(float(v))] for i, v in enumerate(p.samples))))
        return EXIT_OK
    fam = family_from_spec(cfg.kernels, g)
    if args.what == "coeffs":
        out.text("coeffs.txt", coeffs_text(sparse_field(fam, rng, args.count)))
        return EXIT_OK
    if args.kind == "band":
        f = band_noise(fam, rng)
    elif args.kind == "smooth":
        f = smooth_function(g, args.stream)
    else:
        f = sparse_signal(fam, rng, args.count)
    if out.out:
        write_signal(os.path.join(out.out, "signal.csv"), f)
    else:
        out.text("signal.csv", signal_csv(f))
    return EXIT_OK


def cmd_norm(args, cfg: RunConfig, out: Output) -> int:
    if args.space in ("s", "c"):
        field = read_coeffs(args.input, cfg.grid)
        g = Grid(field.log2_size)
        p = _exponent(cfg, g)
        value = (seq_s_norm if args.space == "s" else seq_c_norm)(field, p)
    else:
        f = read_signal(args.input)
        g = _grid(cfg, f)
        p = _exponent(cfg, g)
        if args.space == "lp":
            value = luxemburg_norm(f, p)
        elif args.space == "hardy":
            value = hardy_norm(f, p, family_from_spec(cfg.kernels, g), args.probe)
        elif args.space == "cmo":
            value = cmo_norm(f, p, family_from_spec(cfg.kernels, g), args.form, args.probe)
        elif args.space == "campanato":
            value = campanato_norm(f, p, args.q, args.degree)
        else:
            value = zygmund_norm(f, p, args.degree)
    cfg.grid = g.log2_size
    finite = bool(np.isfinite(value))
    check = Check("finite", value, "finite", finite, {"space": args.space})
    report = _op_report("norm", cfg, [check], {"space": args.space, "value": value})
    emit_report(out, cfg, report)
    return EXIT_OK if finite else EXIT_FAIL


def cmd_transform(args, cfg: RunConfig, out: Output) -> int:
    if args.mode == "synthesize":
        field = read_coeffs(args.input, cfg.grid)
        g = Grid(field.log2_size)
        f = synthesize(field, family_from_spec(cfg.kernels, g), args.probe)
        if out.out:
            write_signal(os.path.join(out.out, "signal.csv"), f)
        else:
            out.text("signal.csv", signal_csv(f))
        return EXIT_OK
    f = read_signal(args.input)
    g = _grid(cfg, f)
    fam = family_from_spec(cfg.kernels, g)
    if args.mode == "analyze":
        out.text("coeffs.txt", coeffs_text(analyze(f, fam, args.probe)))
        return EXIT_OK
    cfg.grid = g.log2_size
    err = reconstruction_error(f, fam)
    check = Check("roundtrip_relative_l2", err, 1e-8, err <= 1e-8, {})
    emit_report(out, cfg, _op_report("roundtrip", cfg, [check], {"error": err}))
    return EXIT_OK if check.passed else EXIT_FAIL


def cmd_decompose(args, cfg: RunConfig, out: Output) -> int:
    f = read_signal(args.input)
    g = _grid(cfg, f)
    cfg.grid = g.log2_size
    p = _exponent(cfg, g, 0.9)
    fam = family_from_spec(cfg.kernels, g)
    d = min_moment_degree(p) if args.degree is None else args.degree
    dec = atomic_decompose(f, p, fam, d)
    atoms = []
    moment_worst, support_ok = 0.0, True
    for Q, lam in dec.lambdas.items():
        chk = atom_check(dec.atoms[Q], dec.supports[Q], p, 2.0, d, np.inf)
        top = float(np.max(np.abs(dec.atoms[Q])))
        rel = chk.moment_max / top if top > 0 else 0.0
        moment_worst = max(moment_worst, rel)
        support_ok &= chk.support
        atoms.append({"scale": Q.scale, "position": Q.position, "lambda": lam, "support_ok": chk.support,
                      "size_ratio": chk.size_ratio, "moment_max_relative": rel})
    err = dec.reconstruction_error()
    A = a_quantity(list(dec.lambdas.values()), list(dec.lambdas), p)
    checks = [Check("reconstruction", err, 1e-6, err <= 1e-6, {}),
              Check("support_in_5Q", support_ok, True, support_ok, {}),
              Check("moments", moment_worst, 1e-8, moment_worst <= 1e-8, {"degree": d})]
    result = {"degree": d, "hardy_norm": dec.source_norm, "a_quantity": A, "tail_fraction": dec.tail_fraction(),
              "stopping_cubes": [{"scale": Q.scale, "position": Q.position, "generation": gen}
                                 for Q, gen in dec.stopping_cubes],
              "atoms": atoms}
    report = _op_report("decompose", cfg, checks, result)
    if cfg.format == "csv":
        keys = ["scale", "position", "lambda", "support_ok", "size_ratio", "moment_max_relative"]
        out.sidecar("atoms.csv", _rows_csv(keys, ([a[k] for k in keys] for a in _clean(atoms))))
    emit_report(out, cfg, report)
    return EXIT_OK if report["verdict"] == "pass" else EXIT_FAIL


def cmd_pair(args, cfg: RunConfig, out: Output) -> int:
    f, gsig = read_signal(args.f), read_signal(args.g)
    g = _grid(cfg, f)
    if len(gsig) != g.size:
        raise UsageError("f and g must have the same length")
    cfg.grid = g.log2_size
    p = _exponent(cfg, g, 1.0)
    fam = family_from_spec(cfg.kernels, g)
    value = pairing(f, gsig, fam)
    hn, cn = hardy_norm(f, p, fam), cmo_norm(gsig, p, fam)
    ratio = abs(value) / (hn * cn) if hn * cn > 0 else float("nan")
    ok = bool(np.isfinite(value))
    result = {"pairing_re": value.real, "pairing_im": value.imag, "hardy_norm": hn, "cmo_norm": cn, "ratio": ratio}
    emit_report(out, cfg, _op_report("pair", cfg, [Check("finite", ok, True, ok, {})], result))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_czo(args, cfg: RunConfig, out: Output) -> int:
    if args.mode == "apply":
        if not args.input:
            raise UsageError("czo apply needs --input")
        f = read_signal(args.input)
        g = _grid(cfg, f)
        Tf = apply(_operator(cfg, g), f)
        if out.out:
            write_signal(os.path.join(out.out, "signal.csv"), Tf)
        else:
            out.text("signal.csv", signal_csv(Tf))
        return EXIT_OK
    g = _grid(cfg)
    cfg.grid = g.log2_size
    op = _operator(cfg, g)
    if args.mode == "kernel":
        rep = standard_kernel_report(op)
        ok = bool(np.isfinite(rep.c_size) and np.isfinite(rep.c_smooth))
        emit_report(out, cfg, _op_report("czo-kernel", cfg, [Check("finite", ok, True, ok, {})],
                                         {"kind": op.kind, "c_size": rep.c_size, "c_smooth": rep.c_smooth}))
        return EXIT_OK if ok else EXIT_FAIL
    p = _exponent(cfg, g, 0.9)
    fam = family_from_spec(cfg.kernels, g)
    rep = czo_cmo_experiment(op, p, fam, cfg.trials or 100, cfg.seed, cfg.threads)
    finite = bool(np.isfinite(rep.max_ratio))
    checks = [Check("ratio_finite", rep.max_ratio, "finite", finite, {"trials_used": rep.trials_used}),
              Check("adjoint_identity", rep.adjoint_error, 1e-10, rep.adjoint_error <= 1e-10, {})]
    emit_report(out, cfg, _op_report("czo-experiment", cfg, checks,
                                     {"kind": op.kind, "max_ratio": rep.max_ratio, "ratios": rep.ratios}))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def cmd_verify(args, cfg: RunConfig, out: Output) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    scfg = SuiteConfig(log2_size=cfg.grid if cfg.grid is not None else DEFAULT_GRID, seed=cfg.seed,
                       trials=cfg.trials, threads=cfg.threads, exponent=cfg.exponent)
    for name in names:
        if args.suite == "all" and scfg.exponent is not None:
            raise UsageError("--exponent cannot be combined with 'verify all'")
        validate_suite_config(name, scfg)
    reports, timings = [], {}
    for name in names:
        t0 = time.perf_counter()
        try:
            checks = run_suite(name, scfg)
        except (NumericError, FloatingPointError, ArithmeticError) as exc:
            checks = [Check("numeric_failure", str(exc), None, False, {})]
        timings[name] = time.perf_counter() - t0
        reports.append(build_report(name, scfg, checks))
    if cfg.format == "csv":
        rows = [r for rep in reports for r in _check_rows(rep)]
        out.text("report.csv", _rows_csv(["suite", "check", "value", "threshold", "passed"], rows))
    elif len(reports) == 1:
        out.text("report.json", dumps(reports[0]) + "\n")
    else:
        combined = {"schema": SCHEMA, "suite": "all", "reports": reports,
                    "verdict": "pass" if all(r["verdict"] == "pass" for r in reports) else "fail"}
        out.text("report.json", dumps(combined) + "\n")
    out.sidecar("timings.json", json.dumps({"seconds": timings, "threads": cfg.threads}, sort_keys=True, indent=2) + "\n")
    for rep in reports:
        print(f"{rep['verdict'].upper()} {rep['suite']}", file=sys.stderr)
    return EXIT_OK if all(r["verdict"] == "pass" for r in reports) else EXIT_FAIL


COMMANDS = {"gen": cmd_gen, "norm": cmd_norm, "transform": cmd_transform, "decompose": cmd_decompose,
            "pair": cmd_pair, "czo": cmd_czo, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg, Output(cfg.out))
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, VarCMOError, ValueError, TypeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
