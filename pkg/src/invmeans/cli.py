"""Command-line front end.

Subcommands: eval, construct, extract, extend, taylor, check, scan, demo.
Exit codes: 0 success / pass / evidence-only; 1 violation found or sign claim
failed; 2 convergence failure; 3 usage or configuration error.

Numbers are printed with 6 significant digits in plain mode and 17 in the
machine formats (json, csv); machine-format values re-parse to the identical
float.  An optional key=value config file (--config) supplies defaults for
tolerance, box, format and out; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence

from ._version import __version__
from .core import eval2, eval3, mean2, mean3
from .errors import (
    ContractionViolation,
    DegenerateLimit,
    MeansError,
    NoBracket,
    NoConvergence,
    NonIsotoneM,
    NumericOverflow,
    StepUnderflow,
)
from .taylor import homogeneous_rescale_eval, taylor_eval, taylor_polynomial
from .type1 import ToleranceConfig, check_type1, construct_invariant, iterate_triple
from .type2 import EXTRACT_CONFIG, check_type2, extract_mean2
from .verify import (
    ScanConfig,
    both_invariance_demo,
    conjecture1_scan,
    conjecture2_scan,
    diagonal_identity_suite,
    lehmer_noncomparability,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_NO_CONVERGENCE = 2
EXIT_USAGE = 3

_CONVERGENCE_ERRORS = (
    NoConvergence,
    NoBracket,
    DegenerateLimit,
    NumericOverflow,
    ContractionViolation,
    NonIsotoneM,
    StepUnderflow,
)

_CONFIG_KEYS = ("tolerance", "box", "format", "out")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; the CLI contract wants 3.
    def error(self, message):
        raise UsageError(message)


def _fmt(value: float, fmt: str) -> str:
    return format(value, ".6g") if fmt == "plain" else format(value, ".17g")


def _parse_args_list(text: str, want: Optional[int] = None) -> List[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--args must be comma-separated numbers, got {text!r}") from exc
    if want is not None and len(values) != want:
        raise UsageError(f"expected {want} comma-separated values, got {len(values)}")
    if want is None and len(values) not in (2, 3):
        raise UsageError("expected 2 or 3 comma-separated values")
    return values


def _parse_box(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"--box must look like lo:hi, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise UsageError(f"--box must contain numbers, got {text!r}") from exc
    if not (0.0 < lo < hi):
        raise UsageError("--box must satisfy 0 < lo < hi")
    return (lo, hi)


def _load_config_file(path: str) -> dict:
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _CONFIG_KEYS:
                    raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
                values[key] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return values


def _emit_value(command: str, value: float, fmt: str, extra: Optional[dict] = None) -> None:
    if fmt == "json":
        payload = {"command": command, "value": value}
        if extra:
            payload.update(extra)
        print(json.dumps(payload, sort_keys=True))
    elif fmt == "csv":
        print(f"{command},{_fmt(value, fmt)}")
    else:
        print(_fmt(value, fmt))


def _build_parser() -> _Parser:
    parser = _Parser(prog="invmeans", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"invmeans {__version__}")
    parser.add_argument("--config", help="key=value config file; flags override")
    parser.add_argument("--format", choices=("plain", "json", "csv"), default=None,
                        help="output format (default plain)")
    parser.add_argument("--tolerance", type=float, default=None,
                        help="tolerance override for iteration/check commands")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a catalog mean")
    p.add_argument("--mean", required=True, help="catalog id (arity from --args)")
    p.add_argument("--args", required=True, help="a,b or a,b,c")

    p = sub.add_parser("construct", help="run the invariant-mean triple recursion")
    p.add_argument("--base", required=True, help="two-variable base mean id")
    p.add_argument("--args", required=True, help="a,b,c")
    p.add_argument("--trace", action="store_true", help="print the visited triples")

    p = sub.add_parser("extract", help="type-2 fixed-point extraction")
    p.add_argument("--mean3", required=True, help="three-variable mean id")
    p.add_argument("--args", required=True, help="a,b")
    p.add_argument("--seed-mean", default="A2", help="seed mean id (default A2)")

    p = sub.add_parser("extend", help="symmetric three-variable extension of a base mean")
    p.add_argument("--base", required=True, help="symmetric two-variable mean id")
    p.add_argument("--n", required=True, help="weighting two-variable mean id")
    p.add_argument("--args", required=True, help="a,b,c")

    p = sub.add_parser("taylor", help="diagonal Taylor polynomial of an invariant mean")
    p.add_argument("--base", required=True, help="two-variable base mean id with diagonal data")
    p.add_argument("--order", type=int, choices=(2, 3, 4), required=True)
    p.add_argument("--args", required=True, help="x,y,z")
    p.add_argument("--rescale", action="store_true",
                   help="rescale the point to the expansion center first (homogeneous means)")

    p = sub.add_parser("check", help="signed invariance residual")
    p.add_argument("--type", dest="kind", type=int, choices=(1, 2), required=True)
    p.add_argument("--mean3", required=True)
    p.add_argument("--mean2", required=True)
    p.add_argument("--args", required=True, help="a,b,c for type 1; a,b for type 2")

    p = sub.add_parser("scan", help="run a verification scan and write a report")
    p.add_argument("--claim", required=True,
                   choices=("conj1", "conj2", "lehmer", "diagonal", "both-demo"))
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1729)
    p.add_argument("--box", default=None, help="lo:hi sampling box (default 0.1:10)")
    p.add_argument("--out", default=None, help="report file (stdout when omitted)")

    sub.add_parser("demo", help="run the both-types invariance demonstration")
    return parser


def _cmd_eval(opts, fmt: str) -> int:
    values = _parse_args_list(opts.args)
    if len(values) == 2:
        result = eval2(mean2(opts.mean), *values)
    else:
        result = eval3(mean3(opts.mean), *values)
    _emit_value("eval", result, fmt)
    return EXIT_OK


def _cmd_construct(opts, fmt: str, tolerance: Optional[float]) -> int:
    a, b, c = _parse_args_list(opts.args, 3)
    cfg = ToleranceConfig(
        rel_tol=tolerance if tolerance is not None else 1e-14,
        max_iter=200,
        trace_states=opts.trace,
    )
    trace = iterate_triple(mean2(opts.base), (a, b, c), cfg)
    extra = {"iterations": trace.iterations, "converged": trace.converged}
    if opts.trace and fmt == "json":
        extra["states"] = [list(s) for s in trace.states]
    _emit_value("construct", trace.limit, fmt, extra)
    if opts.trace and fmt != "json":
        for state in trace.states:
            print(" ".join(_fmt(x, fmt) for x in state))
    return EXIT_OK


def _cmd_extract(opts, fmt: str, tolerance: Optional[float]) -> int:
    a, b = _parse_args_list(opts.args, 2)
    cfg = EXTRACT_CONFIG if tolerance is None else ToleranceConfig(
        rel_tol=tolerance, max_iter=EXTRACT_CONFIG.max_iter)
    trace = extract_mean2(mean3(opts.mean3), a, b, seed=mean2(opts.seed_mean), cfg=cfg)
    _emit_value("extract", trace.limit, fmt, {
        "iterations": trace.iterations,
        "direction": trace.monotone_direction,
        "contraction": trace.contraction_at_limit,
    })
    return EXIT_OK


def _cmd_extend(opts, fmt: str) -> int:
    from .type2 import symmetric_extension

    a, b, c = _parse_args_list(opts.args, 3)
    extended = symmetric_extension(mean2(opts.base), mean2(opts.n))
    _emit_value("extend", eval3(extended, a, b, c), fmt)
    return EXIT_OK


def _cmd_taylor(opts, fmt: str) -> int:
    base = mean2(opts.base)
    if base.diagonal_data is None:
        raise UsageError(f"mean {opts.base} carries no diagonal derivative data")
    x, y, z = _parse_args_list(opts.args, 3)
    poly = taylor_polynomial(base.diagonal_data.d2, base.diagonal_data.d4, opts.order)
    if opts.rescale:
        if not base.homogeneous:
            raise UsageError("--rescale requires a homogeneous base mean")
        result = homogeneous_rescale_eval(poly, (x, y, z))
    else:
        result = taylor_eval(poly, (x, y, z))
    _emit_value("taylor", result, fmt)
    return EXIT_OK


def _cmd_check(opts, fmt: str, tolerance: Optional[float]) -> int:
    tol = tolerance if tolerance is not None else 1e-10
    M = mean3(opts.mean3)
    m = mean2(opts.mean2)
    if opts.kind == 1:
        point = _parse_args_list(opts.args, 3)
        residual = check_type1(M, m, point)
        scale = eval3(M, *point)
    else:
        a, b = _parse_args_list(opts.args, 2)
        residual = check_type2(M, m, a, b)
        scale = eval2(m, a, b)
    _emit_value("check", residual, fmt, {"tolerance": tol})
    return EXIT_OK if abs(residual) <= tol * abs(scale) else EXIT_VIOLATION


def _cmd_scan(opts, fmt: str, tolerance: Optional[float], out: Optional[str]) -> int:
    cfg = ScanConfig(
        box=_parse_box(opts.box) if opts.box else (0.1, 10.0),
        samples=opts.samples,
        seed=opts.seed,
        tolerance=tolerance if tolerance is not None else 1e-10,
    )
    scanner = {
        "conj1": conjecture1_scan,
        "conj2": conjecture2_scan,
        "lehmer": lehmer_noncomparability,
        "diagonal": lambda c: diagonal_identity_suite(cfg=c),
        "both-demo": both_invariance_demo,
    }[opts.claim]
    report = scanner(cfg)
    payload = report.to_csv() if fmt == "csv" else report.to_json()
    destination = opts.out if opts.out is not None else out
    if destination:
        with open(destination, "w", encoding="utf-8") as handle:
            handle.write(payload)
        print(f"{report.claim}: {report.verdict} "
              f"(tested {report.samples_tested}, excluded {report.excluded_near_diagonal}, "
              f"violations {len(report.violations)}) -> {destination}")
    else:
        sys.stdout.write(payload)
    return EXIT_OK if report.verdict in ("pass", "evidence-only") else EXIT_VIOLATION


def _cmd_demo(fmt: str) -> int:
    report = both_invariance_demo()
    if fmt == "plain":
        print(f"both-types demo: {report.verdict} "
              f"({report.samples_tested} identity checks, "
              f"max residual {_fmt(report.max_residual, fmt)})")
        for violation in report.violations:
            print(f"  FAIL {violation.get('identity', '?')} at {violation['point']}")
    else:
        sys.stdout.write(report.to_csv() if fmt == "csv" else report.to_json())
    return EXIT_OK if report.verdict == "pass" else EXIT_VIOLATION


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        opts = parser.parse_args(argv)
        file_cfg = _load_config_file(opts.config) if opts.config else {}
        fmt = opts.format or file_cfg.get("format") or "plain"
        if fmt not in ("plain", "json", "csv"):
            raise UsageError(f"unknown format {fmt!r}")
        tolerance = opts.tolerance
        if tolerance is None and "tolerance" in file_cfg:
            try:
                tolerance = float(file_cfg["tolerance"])
            except ValueError as exc:
                raise UsageError(f"bad tolerance in config: {file_cfg['tolerance']!r}") from exc
        out = file_cfg.get("out")
        if getattr(opts, "box", None) is None and "box" in file_cfg:
            _parse_box(file_cfg["box"])  # validate eagerly
            if hasattr(opts, "box"):
                opts.box = file_cfg["box"]

        if opts.command == "eval":
            return _cmd_eval(opts, fmt)
        if opts.command == "construct":
            return _cmd_construct(opts, fmt, tolerance)
        if opts.command == "extract":
            return _cmd_extract(opts, fmt, tolerance)
        if opts.command == "extend":
            return _cmd_extend(opts, fmt)
        if opts.command == "taylor":
            return _cmd_taylor(opts, fmt)
        if opts.command == "check":
            return _cmd_check(opts, fmt, tolerance)
        if opts.command == "scan":
            return _cmd_scan(opts, fmt, tolerance, out)
        return _cmd_demo(fmt)
    except UsageError as exc:
        print(f"invmeans: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _CONVERGENCE_ERRORS as exc:
        print(f"invmeans: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except MeansError as exc:
        print(f"invmeans: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"invmeans: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
