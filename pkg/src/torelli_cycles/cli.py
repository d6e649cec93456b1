"""Command-line front end.

Exit status: 0 success, 1 failed check or domain error, 2 usage or parse
error, 3 resource guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .cycles import (
    BPConfiguration,
    ConfigurationError,
    StandardBoundingPair,
    TrulyNestedFamily,
    p_wedge,
    phi_pipeline,
    proportionality,
    psi_image,
    psi_pipeline,
)
from .reptheory import IrrepLabel, Partition, decompose, weyl_dimension
from .suites import SUITE_NAMES, Options, run_suite, to_plain
from .tensors import DEFAULT_TERM_CAP, ResourceLimitExceeded, parse_shape, weight_band_histogram, word_str

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

PIPELINES = ("none", "phi", "psi", "p")


class UsageError(Exception):
    """Input that could not be parsed at all."""


# -- configuration documents ----------------------------------------------------


def _expect_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise UsageError(f"{where}: expected an integer, got {json.dumps(value)}")
    return value


def parse_config_document(text: str) -> BPConfiguration:
    """Parse ``{"genus": g, "pairs": [{"support": [...], "class_index": j}, ...]}``.

    Syntax and schema problems raise UsageError with a position; documents
    that parse but describe an invalid configuration raise ConfigurationError.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise UsageError("$: expected an object with keys 'genus' and 'pairs'")
    unknown = sorted(set(doc) - {"genus", "pairs"})
    if unknown:
        raise UsageError(f"$: unknown keys {unknown}")
    if "genus" not in doc or "pairs" not in doc:
        raise UsageError("$: missing 'genus' or 'pairs'")
    genus = _expect_int(doc["genus"], "$.genus")
    if not isinstance(doc["pairs"], list):
        raise UsageError("$.pairs: expected an array")
    pairs = []
    for k, item in enumerate(doc["pairs"]):
        where = f"$.pairs[{k}]"
        if not isinstance(item, dict) or set(item) != {"support", "class_index"}:
            raise UsageError(f"{where}: expected an object with keys 'support' and 'class_index'")
        if not isinstance(item["support"], list):
            raise UsageError(f"{where}.support: expected an array")
        support = [_expect_int(x, f"{where}.support[{i}]") for i, x in enumerate(item["support"])]
        if len(set(support)) != len(support):
            raise ConfigurationError(f"{where}.support: repeated handle")
        cls = _expect_int(item["class_index"], f"{where}.class_index")
        try:
            pairs.append(StandardBoundingPair(support, cls))
        except ConfigurationError as exc:
            raise ConfigurationError(f"{where}: {exc}") from None
    return BPConfiguration(genus, pairs)


def load_config(path: str) -> BPConfiguration:
    if path == "-":
        return parse_config_document(sys.stdin.read())
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config_document(text)


# -- commands -------------------------------------------------------------------


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        out = text if text.endswith("\n") else text + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _genus(args, default: int | None = None) -> int:
    g = args.g if args.g is not None else default
    if g is None:
        raise UsageError("--g is required")
    return g


def cmd_dims(args) -> int:
    try:
        lam = Partition.parse(args.partition)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    g = _genus(args)
    dim = weyl_dimension(IrrepLabel(lam, g))
    _emit(args, {"partition": list(lam.parts), "genus": g, "dimension": dim}, str(dim))
    return EXIT_OK


def cmd_decompose(args) -> int:
    try:
        shape = parse_shape(args.shape)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    g = _genus(args)
    report = decompose(shape, g, term_cap=args.term_cap)
    entries = report.sorted_entries(args.weight)
    text = "\n".join(f"{lam}:{m}" for lam, m in entries) or "(no constituents)"
    _emit(args, report.to_json(args.weight), text)
    return EXIT_OK


def cmd_cycle(args) -> int:
    config = load_config(args.config)
    if args.g is not None and args.g != config.genus:
        raise ConfigurationError(f"--g {args.g} disagrees with document genus {config.genus}")
    t = psi_image(config)
    n = config.n
    if args.pipeline != "none" and n < 1:
        raise ConfigurationError("pipelines need at least one pair")
    if args.pipeline == "phi":
        t = phi_pipeline(n, t)
    elif args.pipeline == "psi":
        t = psi_pipeline(n, t)
    elif args.pipeline == "p":
        t = p_wedge(t)
    hist = weight_band_histogram(t)
    payload: dict[str, Any] = {
        "genus": config.genus,
        "pipeline": args.pipeline,
        "shape": str(t.shape),
        "term_count": len(t),
        "weight_histogram": {str(k): v for k, v in hist.items()},
    }
    lines = [f"shape {t.shape}, genus {config.genus}, pipeline {args.pipeline}", f"terms: {len(t)}"]
    lines.append("weight histogram: " + (", ".join(f"{k}:{v}" for k, v in hist.items()) or "(empty)"))
    if args.pipeline == "phi":
        try:
            family = TrulyNestedFamily(config)
        except ConfigurationError:
            family = None
        if family is not None:
            scalar = proportionality(t, family.target())
            payload["nested_target_scalar"] = to_plain(scalar)
            lines.append(
                "proportional to omega0^c_1^...^c_n with scalar " + str(scalar)
                if scalar is not None
                else "not proportional to omega0^c_1^...^c_n"
            )
    if args.terms:
        payload["terms"] = [[word_str(t.shape, w), str(c)] for w, c in t.items()]
        lines += [f"  {c} * {word_str(t.shape, w)}" for w, c in t.items()]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    opts = Options(seed=args.seed, samples=args.samples, term_cap=args.term_cap, timing=args.timing)
    report = run_suite(args.suite, opts, jobs=args.jobs)
    if args.json:
        out = report.dumps()
    else:
        out = report.render_text()
    if args.out:
        Path(args.out).write_text(report.dumps())
        if not args.json:
            sys.stdout.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK if report.passed else EXIT_FAIL


# -- parser ---------------------------------------------------------------------


def _cap(text: str) -> int | None:
    if text.lower() in ("none", "off", "0"):
        return None
    try:
        value = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a term count: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("term cap must be nonnegative")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--g", type=_positive, default=d(None), help="genus")
    parser.add_argument("--json", action="store_true", default=d(False), help="structured output")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for sampled checks (default 0)")
    parser.add_argument("--jobs", type=_positive, default=d(1), help="parallel checks (default 1)")
    parser.add_argument("--term-cap", type=_cap, default=d(DEFAULT_TERM_CAP),
                        help="abort above this many estimated terms; 'none' disables (default 1e7)")
    parser.add_argument("--out", default=d(None), help="write the report to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torelli-cycles", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", parents=[common], help="dimension of V_lambda")
    p.add_argument("partition", help='comma-separated parts, e.g. 2,2,1,1 ("" for the trivial rep)')
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("decompose", parents=[common], help="irreducible constituents of a shape")
    p.add_argument("shape", help="H, w3, wedge(n,w3), tensor(...)")
    p.add_argument("--weight", type=int, default=None, help="only this weight band")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("cycle", parents=[common], help="psi-image of a configuration document")
    p.add_argument("config", help="path to a configuration JSON document, or - for stdin")
    p.add_argument("--pipeline", choices=PIPELINES, default="none")
    p.add_argument("--terms", action="store_true", help="list every term")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITE_NAMES)
    p.add_argument("--samples", type=_positive, default=20, help="random configurations per sampled check")
    p.add_argument("--timing", action="store_true", help="record wall time (breaks byte-stability)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitExceeded as exc:
        print(f"resource guard: {exc.what}: estimated {exc.estimate} terms > cap {exc.cap}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigurationError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
