"""QR decomposition by Givens rotations on Gray-adjacent basis states.

Every rotation acts on two basis labels that differ in one bit, so it is a
single multi-controlled one-qubit gate. Controls whose removal cannot spoil
an already nullified entry are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import (
    CNOT, HADAMARD, PAULI_X, Circuit, MultiControlled, axis_rotation, euler_zyz, fuse_one_qubit,
    gate_unitary, to_su2,
)
from .linalg import PreconditionError, givens_for, is_unitary

ZERO_TOL = 1e-12
# CNOT cost of expand_multicontrolled is at most MC_SLOPE * k + MC_OFFSET for SU(2) payloads
MC_SLOPE = 48
MC_OFFSET = 0

T_GATE = np.diag([1, np.exp(1j * np.pi / 4)])


def gray(i: int) -> int:
    """Value of the i-th word (1-based) of the binary reflected Gray code."""
    if i < 1:
        raise PreconditionError("gray is defined for positive integers")
    return (i - 1) ^ ((i - 1) >> 1)


@dataclass
class GivensStep:
    """Rotation nullifying row rows[1] of column `column` against row rows[0].

    core maps the amplitudes of (rows[0], rows[1]) and lies in SU(2).
    """

    column: int
    rows: tuple
    core: np.ndarray
    n: int
    controls: tuple  # retained control qubits
    polarities: tuple

    @property
    def target(self) -> int:
        bit = (self.rows[0] ^ self.rows[1]).bit_length() - 1
        return self.n - bit

    def gate(self) -> MultiControlled:
        """The step as a gate in the qubit basis."""
        m = self.core
        if (self.rows[0] >> (self.n - self.target)) & 1:
            m = PAULI_X @ m @ PAULI_X
        return MultiControlled(self.controls, self.polarities, self.target, m)


def _check(u, n):
    u = np.asarray(u, dtype=complex)
    if n < 1 or u.shape != (1 << n, 1 << n):
        raise PreconditionError(f"expected a {1 << n}x{1 << n} matrix")
    if not is_unitary(u, 1e-8):
        raise PreconditionError("input is not unitary")
    return u


def _relaxable(r1, r2, cand, pos, i, j):
    """True if the rotation may act on every pair (r1^s, r2^s), s in span(cand).

    Done rows (positions before i) must stay untouched, and a pair must not
    mix a row already zeroed in the current column with one still pending.
    """
    span = np.array([s for s in range(cand + 1) if s & ~cand == 0 and s], dtype=np.int64)
    pa, pb = pos[r1 ^ span], pos[r2 ^ span]
    return not (np.any(pa < i) or np.any(pb < i) or np.any((pa > j) != (pb > j)))


def qr_plan(u, n: int, eliminate: bool = True) -> list[GivensStep]:
    """Givens steps G_1, ..., G_K with G_K ... G_1 U = I (U taken to SU(2^n))."""
    u = _check(u, n)
    dim = 1 << n
    w = u * np.exp(-1j * np.angle(np.linalg.det(u)) / dim)
    order = [gray(i) for i in range(1, dim + 1)]
    pos = np.empty(dim, dtype=np.int64)
    pos[order] = np.arange(dim)
    steps = []
    for i in range(dim - 1):
        col = order[i]
        for j in range(dim - 1, i, -1):
            r1, r2 = order[j - 1], order[j]
            tbit = r1 ^ r2
            relax = 0
            if eliminate:
                for b in range(n):
                    bit = 1 << b
                    if bit != tbit and _relaxable(r1, r2, relax | bit, pos, i, j):
                        relax |= bit
            b1, b2 = w[r1, col], w[r2, col]
            if abs(b1) < ZERO_TOL and abs(b2) < ZERO_TOL:
                core = np.eye(2, dtype=complex)
            else:
                core = givens_for(b1, b2)
            span = np.array([s for s in range(relax + 1) if s & ~relax == 0], dtype=np.int64)
            rows1, rows2 = r1 ^ span, r2 ^ span
            top, bot = w[rows1].copy(), w[rows2]
            w[rows1] = core[0, 0] * top + core[0, 1] * bot
            w[rows2] = core[1, 0] * top + core[1, 1] * bot
            kept = [b for b in reversed(range(n)) if b != tbit.bit_length() - 1 and not (relax >> b) & 1]
            steps.append(GivensStep(
                column=col, rows=(r1, r2), core=core, n=n,
                controls=tuple(n - b for b in kept),
                polarities=tuple(bool((r1 >> b) & 1) for b in kept),
            ))
    return steps


def apply_plan(plan: list[GivensStep], u, n: int) -> np.ndarray:
    """G_K ... G_1 U, using the gates' full embeddings."""
    w = np.asarray(u, dtype=complex)
    w = w * np.exp(-1j * np.angle(np.linalg.det(w)) / (1 << n))
    for s in plan:
        w = gate_unitary(s.gate(), n) @ w
    return w


def elimination_profile(plan: list[GivensStep]) -> dict[int, int]:
    """Number of steps with k retained controls, for k = 0 .. n - 1."""
    if not plan:
        return {}
    n = plan[0].n
    hist = {k: 0 for k in range(n)}
    for s in plan:
        hist[len(s.controls)] += 1
    return hist


# --- expansion of multi-controlled gates ---------------------------------------

def _toffoli(a: int, b: int, t: int, circ: Circuit):
    tdg = T_GATE.conj()
    circ.add_unitary(t, HADAMARD)
    circ.append(CNOT(b, t))
    circ.add_unitary(t, tdg)
    circ.append(CNOT(a, t))
    circ.add_unitary(t, T_GATE)
    circ.append(CNOT(b, t))
    circ.add_unitary(t, tdg)
    circ.append(CNOT(a, t))
    circ.add_unitary(b, T_GATE)
    circ.add_unitary(t, HADAMARD @ T_GATE)
    circ.append(CNOT(a, b))
    circ.add_unitary(a, T_GATE)
    circ.add_unitary(b, tdg)
    circ.append(CNOT(a, b))


def _mcx(controls, t, ancillas, circ: Circuit):
    """X on t controlled by all controls, borrowing len(controls) - 2 ancillas in any state."""
    m = len(controls)
    if m == 1:
        circ.append(CNOT(controls[0], t))
        return
    if m == 2:
        _toffoli(controls[0], controls[1], t, circ)
        return
    c, a = controls, ancillas
    if len(a) < m - 2:
        raise PreconditionError("not enough borrowed qubits")
    down = [(c[m - 1], a[m - 3], t)] + [(c[i], a[i - 2], a[i - 1]) for i in range(m - 2, 1, -1)]
    half = down + [(c[0], c[1], a[0])] + down[1:][::-1]
    for x, y, z in half + half:
        _toffoli(x, y, z, circ)


def _controlled(c: int, t: int, v, circ: Circuit):
    """Singly controlled U(2) gate with two CNOTs."""
    su, phase = to_su2(v)
    alpha, beta, gamma = euler_zyz(su)
    # su = Rz(alpha) Ry(beta) Rz(gamma) and X Ry(b) X = Ry(-b), X Rz(a) X = Rz(-a)
    a_m = axis_rotation("z", alpha) @ axis_rotation("y", beta / 2)
    b_m = axis_rotation("y", -beta / 2) @ axis_rotation("z", -(alpha + gamma) / 2)
    c_m = axis_rotation("z", (gamma - alpha) / 2)
    circ.add_unitary(t, c_m)
    circ.append(CNOT(c, t))
    circ.add_unitary(t, b_m)
    circ.append(CNOT(c, t))
    circ.add_unitary(t, a_m)
    circ.add_unitary(c, np.diag([1, np.exp(1j * phase)]))


def _sqrt2(v):
    _, vecs = np.linalg.eig(v)
    q, _ = np.linalg.qr(vecs)
    d = np.diag(q.conj().T @ v @ q)
    return q @ np.diag(np.sqrt(d)) @ q.conj().T


def _expand(controls, t, v, circ: Circuit):
    k = len(controls)
    if k == 0:
        circ.add_unitary(t, v)
        return
    if k == 1:
        _controlled(controls[0], t, v, circ)
        return
    if k == 2:
        half = _sqrt2(v)
        c1, c2 = controls
        _controlled(c2, t, half, circ)
        circ.append(CNOT(c1, c2))
        _controlled(c2, t, half.conj().T, circ)
        circ.append(CNOT(c1, c2))
        _controlled(c1, t, half, circ)
        return
    su, phase = to_su2(v)
    if abs(np.exp(1j * phase) - 1) > 1e-15:
        # the phase lives on the all-ones pattern of the controls
        _expand(controls[:-1], controls[-1], np.diag([1, np.exp(1j * phase)]), circ)
    # su = D Ry(phi) D^dagger; with A = Ry(phi / 4), (A X A^dagger X)^2 = Ry(phi)
    vals, vecs = np.linalg.eig(su)
    q, _ = np.linalg.qr(vecs[:, np.argsort(np.angle(vals))[::-1]])
    phi = 2 * np.angle(q[:, 0].conj() @ su @ q[:, 0])
    eig_y = np.array([[1, 1], [1j, -1j]]) / np.sqrt(2)  # Ry eigenvectors, e^{+i phi/2} first
    d = q @ eig_y.conj().T
    a = axis_rotation("y", phi / 4)
    k1 = (k + 1) // 2
    g1, g2 = list(controls[:k1]), list(controls[k1:])
    circ.add_unitary(t, d.conj().T)
    for _ in range(2):
        _mcx(g1, t, g2, circ)
        circ.add_unitary(t, a.conj().T)
        _mcx(g2, t, g1, circ)
        circ.add_unitary(t, a)
    circ.add_unitary(t, d)


def expand_multicontrolled(g: MultiControlled, n: int | None = None) -> Circuit:
    """CNOT and one-qubit circuit for a multi-controlled U(2) gate."""
    n = n or max(g.qubits)
    circ = Circuit(n)
    white = [q for q, p in zip(g.controls, g.polarities) if not p]
    for q in white:
        circ.add_unitary(q, PAULI_X)
    _expand(tuple(g.controls), g.target, np.asarray(g.matrix, dtype=complex), circ)
    for q in white:
        circ.add_unitary(q, PAULI_X)
    return circ


def qr_decompose(u, n: int, eliminate: bool = True) -> Circuit:
    """Elementary circuit equal to U up to a global phase."""
    u = _check(u, n)
    plan = qr_plan(u, n, eliminate)
    circ = Circuit(n)
    circ.global_phase = float(np.angle(np.linalg.det(u)) / (1 << n))
    for s in reversed(plan):
        g = s.gate()
        inv = MultiControlled(g.controls, g.polarities, g.target, g.matrix.conj().T)
        part = expand_multicontrolled(inv, n)
        circ.extend(part.gates)
        circ.global_phase += part.global_phase
    return fuse_one_qubit(circ)
