"""Command-line interface.

Exit status: 0 success, 1 verification failure, 2 malformed or invalid input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .circuit import (
    Circuit, ParseError, apply_circuit, circuit_unitary, count_gates, emit_text, parse_matrix,
    parse_state, parse_text, phase_error, write_matrix, write_state,
)
from .csd import csd_decompose, csd_decompose_rotations
from .linalg import PreconditionError, is_unitary, random_state, random_unitary
from .lowering import lower
from .nq import nq_decompose
from .qr import qr_decompose
from .stateprep import state_to_state

METHODS = ("csd", "csd-rot", "nq", "nq-improved", "qr", "qr-plain")
INPUT_TOL = 1e-10
# largest register for which a dense reconstruction check is run by `tables`
TABLES_VERIFY_MAX_N = 6

# Published reference counts, n = 1..9
REFERENCE_CNOT = {
    "csd": [0, 4, 26, 118, 494, 2014, 8126, 32638, 130814],
    "nq": [0, 3, 21, 105, 465, 1953, 8001, 32385, 130305],
}
REFERENCE_TOTAL = {
    "csd": [1, 11, 58, 249, 1016, 4087, 16374, 65525, 262132],
    "nq": [1, 10, 54, 262, 1142, 4758, 19414, 78422, 315222],
}


class UsageError(Exception):
    """Input that cannot be processed; maps to exit status 2."""


@dataclass
class DecompositionOptions:
    method: str = "csd"
    nearest_neighbor: bool = False
    tolerance: float = 1e-8
    seed: int = 0
    verify: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.nearest_neighbor and self.method.startswith("qr"):
            raise UsageError("nearest-neighbor lowering applies to multiplexor-based methods; "
                             "it is not available for qr")


def default_seed() -> int:
    raw = os.environ.get("UCIRC_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"UCIRC_SEED must be an integer, got {raw!r}") from None


def synthesize(u, n: int, method: str, nearest_neighbor: bool = False) -> Circuit:
    """Elementary circuit for U by the named method."""
    nn = nearest_neighbor
    if method == "csd":
        return csd_decompose(u, n, nearest_neighbor=nn)
    if method == "csd-rot":
        return csd_decompose_rotations(u, n, nearest_neighbor=nn)
    if method in ("nq", "nq-improved"):
        return nq_decompose(u, n, improved=method == "nq-improved", nearest_neighbor=nn)
    if method in ("qr", "qr-plain"):
        if nn:
            raise UsageError("nearest-neighbor lowering is not available for qr")
        return qr_decompose(u, n, eliminate=method == "qr")
    raise UsageError(f"unknown method {method!r}")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _qubits(dim: int) -> int:
    if dim < 2 or dim & (dim - 1):
        raise UsageError(f"dimension {dim} is not a power of two")
    return dim.bit_length() - 1


def _load_unitary(path: str) -> tuple[np.ndarray, int]:
    u = parse_matrix(_read(path))
    n = _qubits(u.shape[0])
    if not is_unitary(u, INPUT_TOL):
        raise UsageError(f"{path}: matrix is not unitary within {INPUT_TOL:g}")
    return u, n


def _emit_report(report: dict, path: str | None):
    text = json.dumps(report, indent=2) + "\n"
    if path:
        _write(path, text)
    else:
        sys.stdout.write(text)


def cmd_decompose(args) -> int:
    opts = DecompositionOptions(args.method, args.nearest_neighbor, args.tol, default_seed(), args.verify)
    u, n = _load_unitary(args.matrix)
    t0 = time.perf_counter()
    circ = synthesize(u, n, opts.method, opts.nearest_neighbor)
    elapsed = (time.perf_counter() - t0) * 1000
    if args.output:
        _write(args.output, emit_text(circ))
    report = {"method": opts.method, "n": n, "nearest_neighbor": opts.nearest_neighbor}
    report.update({k: v for k, v in count_gates(circ, opts.method).as_dict().items() if k != "method"})
    err = None
    if opts.verify:
        err = phase_error(circuit_unitary(circ), u)
    report["reconstruction_error"] = err
    report["elapsed_ms"] = round(elapsed, 3)
    _emit_report(report, args.report)
    if opts.verify and not err <= opts.tolerance:
        print(f"verification failed: error {err:.3e} exceeds {opts.tolerance:g}", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    if not args.tol > 0:
        raise UsageError("tolerance must be positive")
    u = parse_matrix(_read(args.matrix))
    circ = parse_text(_read(args.circuit))
    if u.shape[0] != 1 << circ.n_qubits:
        raise UsageError(f"matrix dimension {u.shape[0]} does not match a {circ.n_qubits}-qubit circuit")
    err = phase_error(circuit_unitary(circ), u)
    ok = err <= args.tol
    print(f"error {err:.3e} ({'ok' if ok else 'FAIL'} at tol {args.tol:g})")
    return 0 if ok else 1


def cmd_counts(args) -> int:
    circ = parse_text(_read(args.circuit))
    report = {"n": circ.n_qubits}
    report.update({k: v for k, v in count_gates(lower(circ)).as_dict().items() if k != "method"})
    _emit_report(report, None)
    return 0


def tables(max_n: int, seed: int = 0, methods=METHODS) -> list[dict]:
    """Counts of every method on one seeded random unitary per n."""
    if not 1 <= max_n <= 8:
        raise UsageError("max_n must be between 1 and 8")
    rows = []
    for n in range(1, max_n + 1):
        u = random_unitary(n, seed + n)
        for method in methods:
            t0 = time.perf_counter()
            circ = synthesize(u, n, method)
            elapsed = (time.perf_counter() - t0) * 1000
            r = count_gates(circ, method)
            row = {"n": n, "method": method, "cnot": r.cnot, "one_qubit": r.one_qubit,
                   "rotation": r.rotation, "total": r.total, "elapsed_ms": round(elapsed, 1)}
            ref = REFERENCE_CNOT.get(method)
            if ref:
                row["ref_cnot"] = ref[n - 1]
                row["ref_total"] = REFERENCE_TOTAL[method][n - 1]
                row["match"] = r.cnot == ref[n - 1] and r.total == row["ref_total"]
            if n <= TABLES_VERIFY_MAX_N:
                row["reconstruction_error"] = phase_error(circuit_unitary(circ), u)
            rows.append(row)
    return rows


def cmd_tables(args) -> int:
    methods = args.methods.split(",") if args.methods else METHODS
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}")
    rows = tables(args.max_n, default_seed(), methods)
    if args.json:
        _emit_report({"rows": rows}, None)
        return 0
    head = f"{'n':>2} {'method':<12} {'cnot':>8} {'ref':>8} {'total':>8} {'ref':>8}  flag"
    print(head)
    for r in rows:
        ref_c = r.get("ref_cnot", "")
        ref_t = r.get("ref_total", "")
        flag = "" if "match" not in r else ("ok" if r["match"] else "MISMATCH")
        print(f"{r['n']:>2} {r['method']:<12} {r['cnot']:>8} {ref_c:>8} {r['total']:>8} {ref_t:>8}  {flag}")
    return 0


def cmd_stateprep(args) -> int:
    if not args.tol > 0:
        raise UsageError("tolerance must be positive")
    a = parse_state(_read(args.source))
    b = parse_state(_read(args.dest))
    if a.shape != b.shape:
        raise UsageError("state dimensions differ")
    n = _qubits(a.shape[0])
    t0 = time.perf_counter()
    circ = state_to_state(a, b)
    elapsed = (time.perf_counter() - t0) * 1000
    if args.output:
        _write(args.output, emit_text(circ))
    report = {"method": "stateprep", "n": n}
    report.update({k: v for k, v in count_gates(circ).as_dict().items() if k != "method"})
    err = None
    if args.verify:
        err = float(abs(1 - abs(np.vdot(b, apply_circuit(circ, a)))))
    report["reconstruction_error"] = err
    report["elapsed_ms"] = round(elapsed, 3)
    _emit_report(report, args.report)
    if args.verify and not err <= args.tol:
        print(f"verification failed: infidelity {err:.3e} exceeds {args.tol:g}", file=sys.stderr)
        return 1
    return 0


def _seed(args) -> int:
    return args.seed if args.seed is not None else default_seed()


def cmd_random_unitary(args) -> int:
    if args.n < 1:
        raise UsageError("n must be positive")
    _write(args.output, write_matrix(random_unitary(args.n, _seed(args))))
    return 0


def cmd_random_state(args) -> int:
    if args.n < 1:
        raise UsageError("n must be positive")
    _write(args.output, write_state(random_state(args.n, _seed(args))))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ucirc", description="Synthesize unitaries into CNOT and one-qubit gates.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="synthesize a circuit for a unitary matrix file")
    d.add_argument("matrix")
    d.add_argument("-o", "--output", help="circuit text file (omit to skip writing)")
    d.add_argument("--method", choices=METHODS, default="csd")
    d.add_argument("--nearest-neighbor", "--nn", dest="nearest_neighbor", action="store_true",
                   help="use only CNOTs between adjacent qubits")
    d.add_argument("--verify", action="store_true", help="check the circuit against the input")
    d.add_argument("--report", help="write the JSON report here instead of stdout")
    d.add_argument("--tol", type=float, default=1e-8)
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="compare a circuit file with a matrix file")
    v.add_argument("matrix")
    v.add_argument("circuit")
    v.add_argument("--tol", type=float, default=1e-8)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("counts", help="elementary gate counts of a circuit file")
    c.add_argument("circuit")
    c.set_defaults(func=cmd_counts)

    t = sub.add_parser("tables", help="gate counts of every method next to the reference values")
    t.add_argument("--max-n", type=int, default=4)
    t.add_argument("--methods", help="comma-separated subset of methods")
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_tables)

    s = sub.add_parser("stateprep", help="circuit taking one state vector to another")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="dest", required=True)
    s.add_argument("-o", "--output")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--report")
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_stateprep)

    for name, func, what in (("random-unitary", cmd_random_unitary, "unitary matrix"),
                             ("random-state", cmd_random_state, "state vector")):
        r = sub.add_parser(name, help=f"write a seeded random {what}")
        r.add_argument("n", type=int)
        r.add_argument("--seed", type=int, help="defaults to $UCIRC_SEED or 0")
        r.add_argument("-o", "--output")
        r.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
