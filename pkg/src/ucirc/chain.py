"""Uniformly controlled gates on a linear nearest-neighbor chain.

A gate acts on a contiguous run of qubits. Its target may first be swapped
toward a better working position; the swap CNOT adjacent to the gate is
folded into the payload as an X on the target. At the working position a
template of nearest-neighbor CNOTs is played: "feeds" (neighbor -> target)
and shuffles among the controls. The linear function of the controls that
each feed XORs into the target is tracked and handed to the angle solver
(rotations) or to the multiplexor engine (one-qubit gates).
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .circuit import CNOT, Circuit, Diagonal, Rotation, UCRotation
from .linalg import PreconditionError
from .ucg import UCDecomposition, check_multiplexor_feeds, multiplexed_gates, solve_feed_angles

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)

# Shortest templates found by exhaustive search over feed/shuffle sequences.
# Keys are (chain length, target position); positions past the middle are mirrored.
# "f2" feeds from position 2, "o43" is CNOT 4 -> 3.
ROTATION_TEMPLATES = {
    (2, 1): "f2 f2",
    (3, 1): "o32 f2 o32 f2 o32 f2 o32 f2",
    (3, 2): "f1 f3 f1 f3",
    (4, 1): "o32 f2 o32 f2 o43 o32 f2 o32 f2 o43 o32 f2 o32 f2 o43 o32 f2 o32 o43 f2",
    (4, 2): "f1 f3 o43 f3 o43 f3 f1 f3 o43 f3 o43 f3",
    (5, 3): "f2 f4 o12 f2 f4 o12 f2 f4 o54 f4 f2 o54 f4 f2 o12 f2 o12 f2 f4 f2 o54 f4 o54 f4",
}
MULTIPLEXOR_TEMPLATES = {
    (2, 1): "f2",
    (3, 1): "f2 o32 f2 o32 f2",
    (3, 2): "f1 f3 f1",
    (4, 1): "f2 o32 f2 o32 f2 o43 o32 f2 o32 f2 o43 o32 f2 o32 f2",
    (4, 2): "f1 f3 f1 o43 f3 f1 o43 f3 f1",
    (5, 3): "f2 f4 f2 o12 f2 f4 o12 f2 f4 o54 f4 f2 o54 f4 f2 o12 f2 f4 o12 f2 f4",
}


def cnot_bound_ucg(n: int, s: int) -> int:
    """Budget for a one-qubit multiplexor up to a diagonal, target s from the chain end."""
    tail = Fraction(1, 3) if n % 2 == 0 else Fraction(5, 3)
    return int(Fraction(5, 6) * 2**n + 2 * n - 6 * s - tail)


def cnot_bound_ucr(n: int, s: int) -> int:
    """Budget for a uniformly controlled rotation, target s from the chain end."""
    tail = Fraction(4, 3) if n % 2 == 0 else Fraction(5, 3)
    return int(Fraction(5, 6) * 2**n + 3 * n - 6 * s - tail)


def _parse(text: str) -> list[tuple]:
    ops = []
    for tok in text.split():
        if tok[0] == "f":
            ops.append(("f", int(tok[1:])))
        else:
            ops.append(("o", int(tok[1]), int(tok[2])))
    return ops


def _mirror(ops, n):
    m = n + 1
    return [("f", m - op[1]) if op[0] == "f" else ("o", m - op[1], m - op[2]) for op in ops]


def generic_template(kind: str, n: int, t: int) -> list[tuple]:
    """Recursive template for any chain length and target position.

    Controls are added nearest first, so the farthest control is handled by
    the outermost level. A control at distance d is brought to the target by a
    CNOT cascade toward the neighboring feeder (d - 1 CNOTs), fed once, and the
    cascade is undone.
    """
    ctrls = sorted((q for q in range(1, n + 1) if q != t), key=lambda q: (abs(q - t), q))
    seq: list[tuple] = []
    for c in ctrls:
        step = 1 if c < t else -1
        feeder = t - step
        down = [("o", q, q + step) for q in range(c, feeder, step)]
        inject = down + [("f", feeder)] + down[::-1]
        if kind == "u":
            seq = seq + inject + seq
        else:
            cut = max((i for i, op in enumerate(seq) if op[0] == "f"), default=None)
            half = seq if cut is None else _cancel(seq[:cut] + seq[cut + 1:])
            seq = half + inject + half + inject
    return seq


def _cancel(ops):
    """Drop adjacent equal shuffle pairs."""
    out = []
    for op in ops:
        if out and op[0] == "o" and out[-1] == op:
            out.pop()
        else:
            out.append(op)
    return out


def template(kind: str, n: int, t: int) -> list[tuple]:
    """Best known template for a gate of the given kind ("r" or "u") at position t."""
    table = ROTATION_TEMPLATES if kind == "r" else MULTIPLEXOR_TEMPLATES
    if (n, t) in table:
        return _parse(table[(n, t)])
    if (n, n + 1 - t) in table:
        return _mirror(_parse(table[(n, n + 1 - t)]), n)
    return generic_template(kind, n, t)


def working_position(kind: str, n: int, p: int) -> tuple[int, list[tuple]]:
    """Position minimizing template size plus 4 CNOTs per swap step."""
    best = None
    for w in range(1, n + 1):
        ops = template(kind, n, w)
        cost = len(ops) + 4 * abs(w - p)
        if best is None or cost < best[0]:
            best = (cost, w, ops)
    return best[1], best[2]


def _play(ops, contents, t):
    """Feed masks of a template; the shuffles must restore every control."""
    cur = dict(contents)
    feeds = []
    for op in ops:
        if op[0] == "f":
            if abs(op[1] - t) != 1:
                raise PreconditionError("feed from a non-neighbor")
            feeds.append(cur[op[1]])
        else:
            a, b = op[1], op[2]
            if abs(a - b) != 1 or t in (a, b):
                raise PreconditionError("bad shuffle in template")
            cur[b] ^= cur[a]
    if cur != contents:
        raise PreconditionError("template does not restore the controls")
    return feeds


def nn_decompose(g, s: int | None = None):
    """Nearest-neighbor realization of a uniformly controlled gate.

    The gate must act on a contiguous run of qubits with every other qubit of
    the run as a control. Returns a Circuit for a UCRotation and a
    UCDecomposition (core plus residual diagonal) for a UCGate.
    """
    qubits = sorted(g.qubits)
    lo, hi = qubits[0], qubits[-1]
    n = hi - lo + 1
    if qubits != list(range(lo, hi + 1)):
        raise PreconditionError("nearest-neighbor mode needs the gate on a contiguous run of qubits")
    p = g.target - lo + 1
    dist = min(p, n + 1 - p)
    if s is not None and (s < 1 or s > (n + 1) // 2 or s != dist):
        raise PreconditionError(f"target distance {s} is not valid for this gate (expected {dist})")
    k = len(g.controls)
    bit = {q - lo + 1: 1 << (k - 1 - i) for i, q in enumerate(g.controls)}
    rotation = isinstance(g, UCRotation)
    if rotation and g.axis not in ("y", "z"):
        raise PreconditionError("only y and z rotations are supported")
    kind = "r" if rotation else "u"
    w, ops = working_position(kind, n, p)

    phys = lambda pos: pos + lo - 1  # noqa: E731
    step = 1 if w > p else -1
    path = list(range(p, w, step))  # target positions before each swap step
    swap_in, swap_out = [], []
    contents = dict(bit)
    ell = 0
    for a in path:
        b = a + step
        c = contents.pop(b)
        contents[a] = c
        ell ^= c
        swap_in += [CNOT(phys(a), phys(b)), CNOT(phys(b), phys(a))]
    for a in reversed(path):
        b = a + step
        swap_out += [CNOT(phys(b), phys(a)), CNOT(phys(a), phys(b))]
    feeds = _play(ops, contents, w)
    parity = np.array([bin(x & ell).count("1") & 1 for x in range(1 << k)], dtype=bool)
    circ = Circuit(hi)
    circ.extend(swap_in)
    target = phys(w)

    def emit_ops(emit_after_feed):
        j = 0
        for op in ops:
            if op[0] == "f":
                circ.append(CNOT(phys(op[1]), target))
                j += 1
                emit_after_feed(j)
            else:
                circ.append(CNOT(phys(op[1]), phys(op[2])))

    if rotation:
        angles = np.where(parity, -1.0, 1.0) * np.asarray(g.angles, dtype=float)
        if k == 0:
            circ.append(Rotation(g.axis, target, float(angles[0])))
            return circ
        phis = solve_feed_angles(angles, feeds)
        circ.append(Rotation(g.axis, target, float(phis[0])))
        emit_ops(lambda j: j < len(phis) and circ.append(Rotation(g.axis, target, float(phis[j]))))
        circ.extend(swap_out)
        return circ

    mats = np.array(g.matrices, dtype=complex)
    mats[parity] = PAULI_X @ mats[parity] @ PAULI_X
    check_multiplexor_feeds(feeds, k)
    gates, delta = multiplexed_gates(mats, feeds)
    delta[parity] = delta[parity][:, ::-1]
    circ.add_unitary(target, gates[0])
    emit_ops(lambda j: circ.add_unitary(target, gates[j]))
    circ.extend(swap_out)
    return UCDecomposition(circ, Diagonal(tuple(g.controls) + (g.target,), delta.reshape(-1)))


def is_nearest_neighbor(c: Circuit) -> bool:
    return all(abs(gate.control - gate.target) == 1 for gate in c.gates if isinstance(gate, CNOT))
