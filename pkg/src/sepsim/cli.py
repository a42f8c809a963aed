"""Command-line front end.

Exit codes: 0 success or accepted, 1 rejected or negative verdict, 2 usage or
input error (including the dense size cap), 3 internal invariant breach.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import circuit as cm
from .classifier import Rejection, classify_circuit, report
from .errors import (ControlNotInBasis, GateIndexError, NonUnitary,
                     PhaseIncoherent, SchemaError, TooLarge)
from .gates import decompose_4x4
from .generate import generate_product_control_circuit
from .jsonio import decode_matrix, dumps, encode_matrix, encode_vector, loads
from .oracle import exact_normalized_trace, product_eigenbasis_verdict
from .sampler import audit_csv, estimate_normalized_trace, estimate_to_json

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
MAX_CAP = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _cap() -> int:
    raw = os.environ.get("SEPSIM_CAP")
    if raw is None:
        return cm.DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"SEPSIM_CAP must be an integer, got {raw!r}") from None
    if not 1 <= cap <= MAX_CAP:
        raise UsageError(f"SEPSIM_CAP must be between 1 and {MAX_CAP}")
    return cap


def _read(path: str) -> bytes:
    try:
        if path == "-":
            return sys.stdin.buffer.read()
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _circuit(path: str) -> cm.Circuit:
    return cm.parse(_read(path))


def _emit(obj, out) -> None:
    out.write(dumps(obj, indent=2) + "\n")


def cmd_decompose(args, out) -> int:
    doc = loads(_read(args.file))
    if isinstance(doc, dict):
        if "m" not in doc:
            raise SchemaError("expected a 4x4 matrix or an object with field 'm'")
        doc = doc["m"]
    m = decode_matrix(doc, 4, "matrix")
    g = decompose_4x4(m)
    if g is None:
        out.write('"none"\n')
        return EXIT_NEGATIVE
    _emit({"control_slot": g.control_slot.name.lower(), "kind": g.kind.value,
           "basis": [encode_vector(g.control_basis.v0), encode_vector(g.control_basis.v1)],
           "b": encode_matrix(g.branch0), "c": encode_matrix(g.branch1)}, out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    res = classify_circuit(_circuit(args.file))
    _emit(report(res), out)
    return EXIT_NEGATIVE if isinstance(res, Rejection) else EXIT_OK


def _classified(c):
    res = classify_circuit(c)
    if isinstance(res, Rejection):
        return None, report(res)
    return res, None


def cmd_simulate(args, out) -> int:
    c = _circuit(args.file)
    cls, rej = _classified(c)
    if cls is None:
        _emit(rej, out)
        return EXIT_NEGATIVE
    est, labels, lam = estimate_normalized_trace(c, args.basis, args.eps, args.delta, args.seed,
                                                 cls=cls, return_samples=True)
    if args.csv:
        out.write(audit_csv(labels, lam))
    else:
        _emit(estimate_to_json(est), out)
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    c = _circuit(args.file)
    cap = _cap()
    tr = exact_normalized_trace(c, cap)
    verdict = product_eigenbasis_verdict(cm.build_full_unitary(c, cap), cap)
    _emit({"n": c.n, "trace": [tr.real, tr.imag], "verdict": verdict.value}, out)
    return EXIT_NEGATIVE if verdict.value == "No" else EXIT_OK


def cmd_compare(args, out) -> int:
    c = _circuit(args.file)
    cap = _cap()
    exact = exact_normalized_trace(c, cap)
    cls, rej = _classified(c)
    if cls is None:
        _emit(rej, out)
        return EXIT_NEGATIVE
    rows = {}
    ok = True
    for basis, ref in (("X", exact.real), ("Y", exact.imag)):
        est = estimate_normalized_trace(c, basis, args.eps, args.delta, args.seed, cls=cls)
        diff = abs(est.value - ref)
        ok &= diff <= args.eps
        rows[basis] = {"estimate": est.value, "exact": ref, "abs_diff": diff, "samples": est.samples}
    _emit({"epsilon": args.eps, "delta": args.delta, "seed": args.seed, "bases": rows, "pass": bool(ok)}, out)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_gen(args, out) -> int:
    if args.n < 2 or args.depth < 1:
        raise UsageError("gen needs --n >= 2 and --depth >= 1")
    c = generate_product_control_circuit(args.n, args.depth, args.seed)
    _emit(cm.to_json(c), out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sepsim", description="Classify and simulate product-eigenbasis one-clean-qubit circuits.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("decompose", help="basis-controlled form of a 4x4 unitary")
    s.add_argument("file")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("check", help="classify a circuit gate by gate")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    for name, func in (("simulate", cmd_simulate), ("compare", cmd_compare)):
        s = sub.add_parser(name)
        s.add_argument("file")
        if name == "simulate":
            s.add_argument("--basis", choices=["X", "Y"], default="X")
            s.add_argument("--csv", action="store_true", help="per-sample audit rows instead of JSON")
        s.add_argument("--eps", type=float, default=0.05)
        s.add_argument("--delta", type=float, default=0.01)
        s.add_argument("--seed", type=int, default=0)
        s.set_defaults(func=func)

    s = sub.add_parser("oracle", help="dense trace and product-eigenbasis verdict")
    s.add_argument("file")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("gen", help="random admissible circuit")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_gen)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        for name in ("eps", "delta"):
            v = getattr(args, name, None)
            if v is not None and not 0 < v < 1:
                raise UsageError(f"--{name} must lie strictly between 0 and 1")
        return args.func(args, out)
    except (UsageError, SchemaError, NonUnitary, GateIndexError, TooLarge) as exc:
        err.write(f"sepsim: {exc}\n")
        return EXIT_USAGE
    except (PhaseIncoherent, ControlNotInBasis) as exc:
        err.write(f"sepsim: internal invariant breach: {exc}\n")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
