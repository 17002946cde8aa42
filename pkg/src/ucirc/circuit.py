"""Gate IR, circuit container, simulation oracle, gate counting and text I/O.

Qubits are numbered from 1 and qubit 1 is the most significant bit of a basis
label. Gates are stored in application order, so the circuit unitary is
G_last ... G_2 G_1 times exp(i * global_phase).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .linalg import PreconditionError

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


# --- one-qubit algebra ------------------------------------------------------

def rotation_matrix(axis: Sequence[float], theta: float) -> np.ndarray:
    """exp(i theta/2 a.sigma) = I cos(theta/2) + i (a.sigma) sin(theta/2)."""
    a = np.asarray(axis, dtype=float)
    if a.shape != (3,) or abs(np.linalg.norm(a) - 1) > 1e-10:
        raise PreconditionError("rotation axis must be a unit 3-vector")
    gen = a[0] * PAULI_X + a[1] * PAULI_Y + a[2] * PAULI_Z
    return math.cos(theta / 2) * np.eye(2, dtype=complex) + 1j * math.sin(theta / 2) * gen


def axis_rotation(axis: str, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if axis == "z":
        return np.array([[complex(c, s), 0], [0, complex(c, -s)]])
    if axis == "y":
        return np.array([[c, s], [-s, c]], dtype=complex)
    if axis == "x":
        return np.array([[c, 1j * s], [1j * s, c]])
    raise ValueError(f"unknown axis {axis!r}")


def euler_zyz(u) -> tuple[float, float, float]:
    """Angles with Rz(alpha) Ry(beta) Rz(gamma) = u for u in SU(2), beta in [0, pi]."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or abs(np.linalg.det(u) - 1) > 1e-10:
        raise PreconditionError("euler_zyz needs a 2x2 matrix with determinant 1")
    beta = 2 * math.atan2(abs(u[0, 1]), abs(u[0, 0]))
    p = np.angle(u[0, 0]) if abs(u[0, 0]) > 1e-14 else 0.0
    q = np.angle(u[0, 1]) if abs(u[0, 1]) > 1e-14 else 0.0
    return float(p + q), float(beta), float(p - q)


def to_su2(m) -> tuple[np.ndarray, float]:
    """Split a U(2) matrix into (SU(2) part, phase) with m = exp(i phase) * su."""
    m = np.asarray(m, dtype=complex)
    phase = float(np.angle(np.linalg.det(m))) / 2
    return m * np.exp(-1j * phase), phase


# --- gates --------------------------------------------------------------------

@dataclass(frozen=True)
class CNOT:
    control: int
    target: int
    negated: bool = False  # white control node

    @property
    def qubits(self):
        return (self.control, self.target)


@dataclass(frozen=True, eq=False)
class OneQubit:
    target: int
    matrix: np.ndarray

    @property
    def qubits(self):
        return (self.target,)


@dataclass(frozen=True)
class Rotation:
    axis: str
    target: int
    angle: float

    @property
    def qubits(self):
        return (self.target,)

    @property
    def matrix(self):
        return axis_rotation(self.axis, self.angle)


@dataclass(frozen=True, eq=False)
class Diagonal:
    qubits: tuple
    phases: np.ndarray  # unit-modulus, indexed with qubits[0] as MSB


@dataclass(frozen=True, eq=False)
class UCRotation:
    axis: str
    controls: tuple
    target: int
    angles: np.ndarray  # indexed with controls[0] as MSB

    @property
    def qubits(self):
        return tuple(self.controls) + (self.target,)

    def matrices(self):
        return np.array([axis_rotation(self.axis, a) for a in self.angles])


@dataclass(frozen=True, eq=False)
class UCGate:
    controls: tuple
    target: int
    matrices: np.ndarray  # shape (2^k, 2, 2)

    @property
    def qubits(self):
        return tuple(self.controls) + (self.target,)


@dataclass(frozen=True, eq=False)
class MultiControlled:
    controls: tuple
    polarities: tuple  # True = black node (acts on |1>), False = white node
    target: int
    matrix: np.ndarray

    @property
    def qubits(self):
        return tuple(self.controls) + (self.target,)


Gate = Union[CNOT, OneQubit, Rotation, Diagonal, UCRotation, UCGate, MultiControlled]
ELEMENTARY = (CNOT, OneQubit, Rotation)


def one_qubit(target: int, m) -> tuple[OneQubit, float]:
    su, phase = to_su2(m)
    return OneQubit(target, su), phase


# --- circuit ------------------------------------------------------------------

@dataclass
class Circuit:
    n_qubits: int
    gates: list = field(default_factory=list)
    global_phase: float = 0.0

    def append(self, gate) -> "Circuit":
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable) -> "Circuit":
        self.gates.extend(gates)
        return self

    def add_unitary(self, target: int, m) -> "Circuit":
        """Append a U(2) matrix as an SU(2) gate, moving its phase to the circuit."""
        g, ph = one_qubit(target, m)
        self.global_phase += ph
        return self.append(g)

    def compose(self, other: "Circuit") -> "Circuit":
        """other applied after self."""
        return Circuit(max(self.n_qubits, other.n_qubits), self.gates + other.gates,
                       self.global_phase + other.global_phase)

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, list(self.gates), self.global_phase)

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, [inverse_gate(g) for g in reversed(self.gates)], -self.global_phase)

    def validate(self):
        for g in self.gates:
            qs = _gate_qubits(g)
            if len(set(qs)) != len(qs):
                raise PreconditionError(f"repeated qubit in {g}")
            if any(q < 1 or q > self.n_qubits for q in qs):
                raise PreconditionError(f"qubit index out of range in {g}")
        return self


def _gate_qubits(g) -> tuple:
    return tuple(g.qubits)


def fuse_one_qubit(c: Circuit) -> Circuit:
    """Merge each one-qubit gate into the previous one-qubit gate on its qubit.

    A z rotation may also slide back over CNOTs that use its qubit as control.
    The decision depends only on gate types and positions, so counts stay
    input-independent.
    """
    out: list = []
    last: dict[int, int] = {}  # qubit -> index in out of the latest gate touching it
    blocked: dict[int, bool] = {}  # a CNOT targeting the qubit came after that gate
    for g in c.gates:
        if isinstance(g, (OneQubit, Rotation)):
            q = g.target
            idx = last.get(q)
            if idx is not None and isinstance(out[idx], (OneQubit, Rotation)):
                crossed = blocked.get(q, False)
                z_slide = isinstance(g, Rotation) and g.axis == "z"
                if crossed is False or (crossed == "control" and z_slide):
                    h = out[idx]
                    if isinstance(h, Rotation) and isinstance(g, Rotation) and h.axis == g.axis:
                        out[idx] = Rotation(g.axis, q, h.angle + g.angle)
                    else:
                        out[idx] = OneQubit(q, g.matrix @ h.matrix)
                    continue
            out.append(g)
            last[q] = len(out) - 1
            blocked[q] = False
            continue
        if isinstance(g, CNOT):
            # controls only block non-diagonal gates; a target blocks everything
            if blocked.get(g.control) is False:
                blocked[g.control] = "control"
            blocked[g.target] = True
            out.append(g)
            continue
        for q in _gate_qubits(g):
            blocked[q] = True
        out.append(g)
    return Circuit(c.n_qubits, out, c.global_phase)


def inverse_gate(g):
    if isinstance(g, CNOT):
        return g
    if isinstance(g, OneQubit):
        return OneQubit(g.target, g.matrix.conj().T)
    if isinstance(g, Rotation):
        return Rotation(g.axis, g.target, -g.angle)
    if isinstance(g, Diagonal):
        return Diagonal(g.qubits, np.conj(g.phases))
    if isinstance(g, UCRotation):
        return UCRotation(g.axis, g.controls, g.target, -np.asarray(g.angles))
    if isinstance(g, UCGate):
        return UCGate(g.controls, g.target, np.conj(np.transpose(g.matrices, (0, 2, 1))))
    if isinstance(g, MultiControlled):
        return MultiControlled(g.controls, g.polarities, g.target, g.matrix.conj().T)
    raise TypeError(g)


# --- simulation ---------------------------------------------------------------

def _apply_multiplexed(state, n, controls, target, mats):
    """Apply mats[pattern] on target for every control pattern. state: (2,)*n + (m,)."""
    k = len(controls)
    axes = [c - 1 for c in controls] + [target - 1]
    rest = [a for a in range(n + 1) if a not in axes]
    perm = axes + rest
    t = np.transpose(state, perm)
    shp = t.shape
    t = t.reshape(2**k, 2, -1)
    t = np.einsum("pij,pjr->pir", mats, t)
    t = t.reshape(shp)
    return np.transpose(t, np.argsort(perm))


def apply_gate(state: np.ndarray, g, n: int) -> np.ndarray:
    """state has shape (2,)*n + (m,)."""
    if isinstance(g, CNOT):
        out = state.copy()
        c, t = g.control - 1, g.target - 1
        sel = [slice(None)] * (n + 1)
        sel[c] = 0 if g.negated else 1
        tax = t if t < c else t - 1
        out[tuple(sel)] = np.flip(state[tuple(sel)], axis=tax)
        return out
    if isinstance(g, (OneQubit, Rotation)):
        return _apply_multiplexed(state, n, (), g.target, g.matrix[None])
    if isinstance(g, Diagonal):
        k = len(g.qubits)
        ph = np.asarray(g.phases, dtype=complex).reshape((2,) * k)
        shape = [1] * (n + 1)
        order = np.argsort([q - 1 for q in g.qubits])
        ph = np.transpose(ph, order)
        for q in g.qubits:
            shape[q - 1] = 2
        return state * ph.reshape(shape)
    if isinstance(g, UCRotation):
        return _apply_multiplexed(state, n, g.controls, g.target, g.matrices())
    if isinstance(g, UCGate):
        return _apply_multiplexed(state, n, g.controls, g.target, np.asarray(g.matrices, dtype=complex))
    if isinstance(g, MultiControlled):
        k = len(g.controls)
        mats = np.tile(np.eye(2, dtype=complex), (2**k, 1, 1))
        idx = 0
        for p in g.polarities:
            idx = 2 * idx + (1 if p else 0)
        mats[idx] = g.matrix
        return _apply_multiplexed(state, n, g.controls, g.target, mats)
    raise TypeError(f"unknown gate {g!r}")


def apply_circuit(c: Circuit, vectors: np.ndarray) -> np.ndarray:
    """Apply the circuit to a vector or to the columns of a matrix."""
    v = np.asarray(vectors, dtype=complex)
    single = v.ndim == 1
    m = v.reshape(2**c.n_qubits, -1)
    state = m.reshape((2,) * c.n_qubits + (m.shape[1],))
    for g in c.gates:
        state = apply_gate(state, g, c.n_qubits)
    out = state.reshape(2**c.n_qubits, -1) * np.exp(1j * c.global_phase)
    return out[:, 0] if single else out


def circuit_unitary(c: Circuit) -> np.ndarray:
    return apply_circuit(c, np.eye(2**c.n_qubits, dtype=complex))


def gate_unitary(g, n: int) -> np.ndarray:
    return circuit_unitary(Circuit(n, [g]))


def phase_error(u, v) -> float:
    """min over phi of ||u - e^{i phi} v||_F / sqrt(dim), phi from the trace overlap."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise PreconditionError(f"dimension mismatch {u.shape} vs {v.shape}")
    ov = np.trace(v.conj().T @ u)
    if abs(ov) < 1e-12:
        w = v.conj().T @ u
        ov = w.flat[np.argmax(np.abs(w))]
    phi = np.angle(ov)
    return float(np.linalg.norm(u - np.exp(1j * phi) * v) / math.sqrt(u.shape[0]))


def equal_up_to_phase(u, v, tol: float = 1e-8) -> bool:
    return phase_error(u, v) <= tol


def exact_error(u, v) -> float:
    u = np.asarray(u)
    return float(np.linalg.norm(u - v) / math.sqrt(u.shape[0]))


# --- counting -----------------------------------------------------------------

@dataclass(frozen=True)
class GateCountReport:
    cnot: int = 0
    one_qubit: int = 0
    rotation: int = 0
    method: str = ""

    @property
    def total(self) -> int:
        return self.cnot + self.one_qubit + self.rotation

    @property
    def single_qubit(self) -> int:
        """One-qubit gates of either kind."""
        return self.one_qubit + self.rotation

    def __add__(self, other: "GateCountReport") -> "GateCountReport":
        return GateCountReport(self.cnot + other.cnot, self.one_qubit + other.one_qubit,
                               self.rotation + other.rotation, self.method or other.method)

    def as_dict(self) -> dict:
        return {"method": self.method, "cnot": self.cnot, "one_qubit": self.one_qubit,
                "rotation": self.rotation, "total": self.total}


def count_gates(c: Circuit, method: str = "") -> GateCountReport:
    cn = oq = rot = 0
    for g in c.gates:
        if isinstance(g, CNOT):
            cn += 1
        elif isinstance(g, OneQubit):
            oq += 1
        elif isinstance(g, Rotation):
            rot += 1
        else:
            raise PreconditionError(f"{type(g).__name__} is not elementary; expand it first")
    return GateCountReport(cn, oq, rot, method)


# --- text format --------------------------------------------------------------

def _f(x: float) -> str:
    return repr(float(x))


def _u_line(t: int, m) -> str:
    a, b = m[0, 0], m[0, 1]
    return f"u {t} {_f(a.real)} {_f(a.imag)} {_f(b.real)} {_f(b.imag)}"


def _su2_or_raise(m, what: str):
    m = np.asarray(m, dtype=complex)
    if abs(np.linalg.det(m) - 1) > 1e-9:
        raise PreconditionError(f"{what} payload must be in SU(2) for the text format")
    return m


def emit_text(c: Circuit) -> str:
    lines = [f"qubits {c.n_qubits}"]
    if c.global_phase:
        lines.append(f"phase {_f(c.global_phase)}")
    for g in c.gates:
        if isinstance(g, CNOT):
            lines.append(f"cnot {g.control} {g.target}" + (" neg" if g.negated else ""))
        elif isinstance(g, OneQubit):
            lines.append(_u_line(g.target, _su2_or_raise(g.matrix, "u")))
        elif isinstance(g, Rotation):
            lines.append(f"r{g.axis} {g.target} {_f(g.angle)}")
        elif isinstance(g, Diagonal):
            qs = " ".join(map(str, g.qubits))
            ph = " ".join(_f(a) for a in np.angle(g.phases))
            lines.append(f"diag {len(g.qubits)} {qs} {ph}")
        elif isinstance(g, UCRotation):
            cs = " ".join(map(str, g.controls))
            ang = " ".join(_f(a) for a in g.angles)
            lines.append(" ".join(x for x in ("ucr", g.axis, str(len(g.controls)), cs, str(g.target), ang) if x))
        elif isinstance(g, UCGate):
            cs = " ".join(map(str, g.controls))
            lines.append(" ".join(x for x in ("ucg", str(len(g.controls)), cs, str(g.target)) if x))
            for m in g.matrices:
                lines.append(_u_line(g.target, _su2_or_raise(m, "ucg")))
        elif isinstance(g, MultiControlled):
            cs = " ".join(str(q) if p else f"-{q}" for q, p in zip(g.controls, g.polarities))
            lines.append(" ".join(x for x in ("mcu", str(len(g.controls)), cs, str(g.target)) if x))
            lines.append(_u_line(g.target, _su2_or_raise(g.matrix, "mcu")))
        else:
            raise TypeError(g)
    return "\n".join(lines) + "\n"


def _su2_from(fields, lineno):
    try:
        are, aim, bre, bim = map(float, fields)
    except ValueError:
        raise ParseError(lineno, "u needs four real numbers") from None
    a, b = complex(are, aim), complex(bre, bim)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-9:
        raise ParseError(lineno, "u parameters must satisfy |a|^2 + |b|^2 = 1")
    return np.array([[a, b], [-b.conjugate(), a.conjugate()]])


def parse_text(text: str) -> Circuit:
    rows = []
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((i, line.split()))
    if not rows or rows[0][1][0] != "qubits" or len(rows[0][1]) != 2:
        raise ParseError(rows[0][0] if rows else 1, "expected header 'qubits <n>'")
    try:
        n = int(rows[0][1][1])
    except ValueError:
        raise ParseError(rows[0][0], "qubit count must be an integer") from None
    if n < 1:
        raise ParseError(rows[0][0], "qubit count must be positive")
    c = Circuit(n)
    pos = 1
    if pos < len(rows) and rows[pos][1][0] == "phase":
        try:
            c.global_phase = float(rows[pos][1][1])
        except (ValueError, IndexError):
            raise ParseError(rows[pos][0], "bad phase line") from None
        pos += 1

    def ints(xs, lineno):
        try:
            return [int(x) for x in xs]
        except ValueError:
            raise ParseError(lineno, "expected integer qubit indices") from None

    def payload(k, lineno, target):
        nonlocal pos
        mats = []
        for _ in range(k):
            if pos >= len(rows) or rows[pos][1][0] != "u":
                raise ParseError(rows[pos][0] if pos < len(rows) else lineno, "missing u payload line")
            ln, f = rows[pos]
            if len(f) != 6 or int(f[1]) != target:
                raise ParseError(ln, "payload line must be 'u <target> are aim bre bim'")
            mats.append(_su2_from(f[2:], ln))
            pos += 1
        return mats

    while pos < len(rows):
        lineno, f = rows[pos]
        pos += 1
        op = f[0]
        try:
            if op == "cnot":
                if len(f) not in (3, 4) or (len(f) == 4 and f[3] != "neg"):
                    raise ParseError(lineno, "expected 'cnot <c> <t> [neg]'")
                cq, tq = ints(f[1:3], lineno)
                c.append(CNOT(cq, tq, len(f) == 4))
            elif op == "u":
                if len(f) != 6:
                    raise ParseError(lineno, "expected 'u <t> are aim bre bim'")
                c.append(OneQubit(ints(f[1:2], lineno)[0], _su2_from(f[2:], lineno)))
            elif op in ("rx", "ry", "rz"):
                if len(f) != 3:
                    raise ParseError(lineno, f"expected '{op} <t> <angle>'")
                c.append(Rotation(op[1], ints(f[1:2], lineno)[0], float(f[2])))
            elif op == "diag":
                k = int(f[1])
                if len(f) != 2 + k + 2**k:
                    raise ParseError(lineno, "diag field count mismatch")
                qs = tuple(ints(f[2:2 + k], lineno))
                ph = np.exp(1j * np.array([float(x) for x in f[2 + k:]]))
                c.append(Diagonal(qs, ph))
            elif op == "ucr":
                axis, k = f[1], int(f[2])
                if axis not in AXES or len(f) != 3 + k + 1 + 2**k:
                    raise ParseError(lineno, "ucr field count or axis mismatch")
                cs = tuple(ints(f[3:3 + k], lineno))
                t = ints(f[3 + k:4 + k], lineno)[0]
                c.append(UCRotation(axis, cs, t, np.array([float(x) for x in f[4 + k:]])))
            elif op == "ucg":
                k = int(f[1])
                if len(f) != 2 + k + 1:
                    raise ParseError(lineno, "ucg field count mismatch")
                cs = tuple(ints(f[2:2 + k], lineno))
                t = ints(f[2 + k:], lineno)[0]
                c.append(UCGate(cs, t, np.array(payload(2**k, lineno, t))))
            elif op == "mcu":
                k = int(f[1])
                if len(f) != 2 + k + 1:
                    raise ParseError(lineno, "mcu field count mismatch")
                raw_cs = ints(f[2:2 + k], lineno)
                t = ints(f[2 + k:], lineno)[0]
                (m,) = payload(1, lineno, t)
                c.append(MultiControlled(tuple(abs(q) for q in raw_cs), tuple(q > 0 for q in raw_cs), t, m))
            else:
                raise ParseError(lineno, f"unknown gate '{op}'")
        except ParseError:
            raise
        except (ValueError, IndexError) as exc:
            raise ParseError(lineno, str(exc)) from None
    try:
        c.validate()
    except PreconditionError as exc:
        raise ParseError(rows[-1][0], str(exc)) from None
    return c


def same_circuit(a: Circuit, b: Circuit, tol: float = 1e-12) -> bool:
    """Gate-for-gate equality of two circuits."""
    if a.n_qubits != b.n_qubits or len(a.gates) != len(b.gates):
        return False
    if abs(a.global_phase - b.global_phase) > tol:
        return False
    for g, h in zip(a.gates, b.gates):
        if type(g) is not type(h) or tuple(g.qubits) != tuple(h.qubits):
            return False
        if isinstance(g, CNOT) and g.negated != h.negated:
            return False
        if isinstance(g, (Rotation, UCRotation)) and g.axis != h.axis:
            return False
        if isinstance(g, MultiControlled) and g.polarities != h.polarities:
            return False
        pa, pb = _payload(g), _payload(h)
        if pa is not None and not np.allclose(pa, pb, atol=tol, rtol=0):
            return False
    return True


def _payload(g):
    if isinstance(g, (OneQubit, MultiControlled)):
        return g.matrix
    if isinstance(g, Rotation):
        return np.array([g.angle])
    if isinstance(g, Diagonal):
        return g.phases
    if isinstance(g, UCRotation):
        return np.asarray(g.angles)
    if isinstance(g, UCGate):
        return g.matrices
    return None


# --- matrix and state files ---------------------------------------------------

def write_matrix(m, path=None) -> str:
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    lines = [f"dim {d}"]
    for row in m:
        lines.append(" ".join(f"{_f(z.real)} {_f(z.imag)}" for z in row))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _numbers(text: str):
    rows = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows or rows[0][0] != "dim" or len(rows[0]) != 2:
        raise ParseError(1, "expected header 'dim <d>'")
    try:
        d = int(rows[0][1])
        vals = [float(x) for r in rows[1:] for x in r]
    except ValueError as exc:
        raise ParseError(1, f"bad number: {exc}") from None
    return d, vals


def parse_matrix(text: str) -> np.ndarray:
    d, vals = _numbers(text)
    if len(vals) != 2 * d * d:
        raise ParseError(1, f"expected {2 * d * d} numbers for a {d}x{d} matrix, got {len(vals)}")
    a = np.array(vals).reshape(d, d, 2)
    return a[..., 0] + 1j * a[..., 1]


def write_state(v, path=None) -> str:
    v = np.asarray(v, dtype=complex)
    lines = [f"dim {v.shape[0]}"] + [f"{_f(z.real)} {_f(z.imag)}" for z in v]
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def parse_state(text: str) -> np.ndarray:
    d, vals = _numbers(text)
    if len(vals) != 2 * d:
        raise ParseError(1, f"expected {2 * d} numbers for a length-{d} state, got {len(vals)}")
    a = np.array(vals).reshape(d, 2)
    return a[:, 0] + 1j * a[:, 1]
