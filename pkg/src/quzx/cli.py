"""Command-line front end: ``quzx <command> [options]``.

Exit status: 0 when every check passes, 1 on a failed or inconclusive
verification, 2 on unreadable or malformed input, 3 when a contraction
exceeds the size cap.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .diagram import validate
from .normal_form import matrix_normal_form
from .rewrite import simplify
from .rules import verify_all
from .serialize import (FormatError, diagram_dumps, diagram_loads, dumps, matrix_from_dict,
                        tensor_to_dict)
from .tensor import ContractionCapError, default_cap, interpret

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
MIN_CAP = 2 ** 16


class InputError(Exception):
    pass


def _d_range(text: str) -> list:
    try:
        ds = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--d expects comma-separated integers, got {text!r}")
    bad = [d for d in ds if not 2 <= d <= 16]
    if bad:
        raise argparse.ArgumentTypeError(f"--d values must lie in [2, 16], got {bad}")
    return ds


def _positive_float(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"--tol must be > 0, got {text}")
    return val


def _cap(text: str) -> int:
    val = int(text)
    if val < MIN_CAP:
        raise argparse.ArgumentTypeError(f"--cap must be >= {MIN_CAP}, got {val}")
    return val


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_diagram(path: str):
    try:
        D = diagram_loads(_read(path))
    except FormatError as exc:
        raise InputError(f"{path}: {exc}") from None
    problems = validate(D)
    if problems:
        raise InputError(f"{path}: invalid diagram: " + "; ".join(problems))
    return D


def _load_matrix(path: str) -> np.ndarray:
    text = _read(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return matrix_from_dict(obj)
    except FormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_eval(args) -> int:
    D = _load_diagram(args.diagram)
    _write(dumps(tensor_to_dict(interpret(D, cap=args.cap))), args.output)
    return EXIT_OK


def cmd_synth(args) -> int:
    M = _load_matrix(args.matrix)
    _write(diagram_dumps(matrix_normal_form(M)), args.output)
    return EXIT_OK


def cmd_simplify(args) -> int:
    D = _load_diagram(args.diagram)
    S, trace = simplify(D, max_steps=args.max_steps)
    _write(diagram_dumps(S), args.output)
    if args.trace:
        _write(trace.to_json(), args.trace)
    return EXIT_OK


def _verify(args, kind: str) -> int:
    report = verify_all(args.d, seed=args.seed, trials_per_rule=args.trials, kind=kind,
                        tol=args.tol, flipped=args.flipped, cap=args.cap)
    text = dumps(report.to_dict())
    if args.output:
        _write(text, args.output)
    if args.format == "table":
        _write(report.table() + "\n", None)
    elif not args.output:
        _write(text, None)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_roundtrip(args) -> int:
    M = _load_matrix(args.matrix)
    D = _load_diagram(args.diagram) if args.diagram else matrix_normal_form(M)
    T = interpret(D, cap=args.cap)
    if T.axis_dims != (M.shape[0], M.shape[1]):
        dev = float("inf")
    else:
        dev = float(np.max(np.abs(T.matrix() - M)))
    ok = dev <= args.tol
    rec = {"rows": M.shape[0], "cols": M.shape[1], "max_dev": dev, "tol": args.tol,
           "pass": ok}
    if args.format == "table":
        _write(f"{M.shape[0]}x{M.shape[1]}  max_dev {dev:.3e}  "
               f"{'pass' if ok else 'fail'}\n", None)
    else:
        _write(dumps(rec), None)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=_d_range, default=[2, 3, 4, 5],
                        help="comma-separated dimensions (default 2,3,4,5)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=_positive_float, default=None)
    common.add_argument("--max-steps", type=int, default=None)
    common.add_argument("--cap", type=_cap, default=None,
                        help="peak tensor size (default QUZX_CAP or 2^24)")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="quzx", description="Qudit ZX-calculus engine.")
    p.add_argument("--version", action="version", version=f"quzx {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="interpret a diagram file")
    s.add_argument("diagram")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("synth", parents=[common], help="normal-form diagram for a matrix")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("simplify", parents=[common], help="simplify a diagram")
    s.add_argument("diagram")
    s.add_argument("--trace", default=None, help="write the rewrite trace here")
    s.set_defaults(func=cmd_simplify)

    for name, kind in (("verify-rules", "rules"), ("lemmas", "lemmas")):
        s = sub.add_parser(name, parents=[common], help=f"check the {kind} semantically")
        s.add_argument("--trials", type=int, default=5)
        s.add_argument("--flipped", action="store_true", help="check transposed forms")
        s.set_defaults(func=lambda a, k=kind: _verify(a, k))

    s = sub.add_parser("roundtrip", parents=[common],
                       help="compare a matrix with a diagram (synthesised if omitted)")
    s.add_argument("matrix")
    s.add_argument("diagram", nargs="?")
    s.set_defaults(func=cmd_roundtrip)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is None:
        args.tol = 1e-9 if args.command == "roundtrip" else 1e-10
    if args.cap is None:
        args.cap = default_cap()
    try:
        return args.func(args)
    except InputError as exc:
        print(f"quzx: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ContractionCapError as exc:
        print(f"quzx: contraction cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
