"""Uniformly controlled rotations and one-qubit gates lowered to CNOT + one-qubit gates.

Bit conventions: a control pattern x is an integer whose most significant of
k bits belongs to controls[0]. A "feed" is a CNOT into the target whose
effect on the target is X raised to a parity of the control pattern; parities
are written as k-bit masks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .circuit import (
    CNOT, HADAMARD, Circuit, Diagonal, OneQubit, Rotation, UCGate, UCRotation,
    axis_rotation, one_qubit,
)
from .linalg import PreconditionError

LAMBDA = np.diag([np.exp(1j * np.pi / 2), -np.exp(1j * np.pi / 2)])
D_HALF = np.diag([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)])


def trailing_zeros(i: int) -> int:
    return (i & -i).bit_length() - 1


def gray_code(j: int) -> int:
    return j ^ (j >> 1)


def _num_controls(length: int) -> int:
    k = length.bit_length() - 1
    if length < 1 or 1 << k != length:
        raise PreconditionError(f"payload length {length} is not a power of two")
    return k


# --- uniformly controlled rotations ---------------------------------------------

def gray_feeds(k: int) -> list[int]:
    """Masks flipped by the CNOTs of the Gray-code rotation circuit (2^k of them)."""
    if k == 0:
        return []
    n = 1 << k
    return [1 << trailing_zeros(j + 1) for j in range(n - 1)] + [1 << (k - 1)]


def solve_ucr_angles(target_angles) -> np.ndarray:
    """Angles of the 2^k plain rotations in the Gray-code circuit.

    Rotation j sees the target conjugated by X^(x . gray(j)), so the realized
    angle for pattern x is sum_j (-1)^(x . gray(j)) phi_j. The matrix of that
    map is a column permutation of the Sylvester Hadamard matrix H, whose
    inverse is H^T / 2^k.
    """
    theta = np.asarray(target_angles, dtype=float)
    k = _num_controls(theta.size)
    n = 1 << k
    h = scipy.linalg.hadamard(n) if n > 1 else np.ones((1, 1))
    walsh = h @ theta / n
    return walsh[[gray_code(j) for j in range(n)]]


def solve_feed_angles(target_angles, feeds) -> np.ndarray:
    """Rotation angles for an arbitrary feed sequence.

    Rotation j is applied after the first j feeds; their accumulated parity
    must run through all 2^k masks and the full sequence must return to 0.
    """
    theta = np.asarray(target_angles, dtype=float)
    k = _num_controls(theta.size)
    n = 1 << k
    sums = [0]
    for f in feeds[:-1]:
        sums.append(sums[-1] ^ f)
    if len(feeds) != n or sorted(sums) != list(range(n)) or sums[-1] ^ feeds[-1] != 0:
        raise PreconditionError("feed parities must visit every control pattern once and close")
    h = scipy.linalg.hadamard(n) if n > 1 else np.ones((1, 1))
    return (h @ theta / n)[sums]


def decompose_uc_rotation(g: UCRotation, mirrored: bool = False) -> Circuit:
    """2^k rotations and 2^k CNOTs; mirrored=True reverses the gate order."""
    if g.axis not in ("y", "z"):
        raise PreconditionError(
            "only y and z rotations are supported; conjugate an x rotation into z first")
    k = len(g.controls)
    angles = np.asarray(g.angles, dtype=float)
    if angles.size != 1 << k:
        raise PreconditionError("UCRotation needs 2^k angles")
    n = max(g.qubits)
    phis = solve_ucr_angles(angles)
    gates = []
    for j, (phi, mask) in enumerate(zip(phis, gray_feeds(k) or [None])):
        gates.append(Rotation(g.axis, g.target, float(phi)))
        if mask is not None:
            gates.append(CNOT(g.controls[k - mask.bit_length()], g.target))
    if mirrored:
        gates.reverse()
    return Circuit(n, gates)


# --- constant quantum multiplexor -------------------------------------------------

@dataclass(frozen=True)
class MultiplexorParts:
    """block(a, b) = block(r^dag, r) . (I x u) . block(d, d^dag) . (I x v).

    r = Rz on the control by control_angle times a z rotation on the target
    uniformly controlled with angles rz_angle_pair; d = diag(e^{i pi/4}, e^{-i pi/4}).
    """

    u_prime: np.ndarray
    v_prime: np.ndarray
    rz_angle_pair: tuple
    control_angle: float
    r: np.ndarray
    lam: np.ndarray

    def reassemble(self) -> np.ndarray:
        z = np.zeros((2, 2))
        rr = np.block([[self.r.conj().T, z], [z, self.r]])
        dd = np.block([[D_HALF, z], [z, D_HALF.conj()]])
        eye = np.eye(2)
        return rr @ np.kron(eye, self.u_prime) @ dd @ np.kron(eye, self.v_prime)


def constant_multiplexor(a, b) -> MultiplexorParts:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    u, v, r, phi, arg1 = _multiplexor_batch(a[None], b[None])
    beta = np.pi / 4 + arg1[0] / 2
    return MultiplexorParts(u[0], v[0], (2 * beta, -2 * beta), phi[0] / 2, np.diag(r[0]), LAMBDA.copy())


def _multiplexor_batch(a, b):
    """Constant-multiplexor split of many pairs at once.

    a, b have shape (N, 2, 2). Returns u', v', the diagonals of r (N, 2),
    the determinant phases phi and the arguments arg1.
    """
    x = a @ np.conj(np.swapaxes(b, 1, 2))
    phi = np.angle(x[:, 0, 0] * x[:, 1, 1] - x[:, 0, 1] * x[:, 1, 0])
    x1 = x[:, 0, 0] * np.exp(-0.5j * phi)
    arg1 = np.where(np.abs(x1) > 1e-14, np.angle(x1), 0.0)
    r = np.stack([np.exp(0.5j * (-np.pi / 2 - phi / 2 - arg1)),
                  np.exp(0.5j * (np.pi / 2 - phi / 2 + arg1))], axis=1)
    rxr = r[:, :, None] * x * r[:, None, :]
    u = np.stack([_eigvec_batch(rxr, lam) for lam in (1j, -1j)], axis=2)
    rb = np.conj(r)[:, :, None] * b
    v = D_HALF @ np.conj(np.swapaxes(u, 1, 2)) @ rb
    return u, v, r, phi, arg1


def _eigvec_batch(m, lam):
    """Unit eigenvectors for eigenvalue lam of 2x2 unitaries with spectrum {i, -i}.

    The null space of m - lam*I is the orthogonal complement of its larger
    row; the first non-negligible entry is made real and positive.
    """
    k = m - lam * np.eye(2)
    n0, n1 = np.linalg.norm(k[:, 0], axis=1), np.linalg.norm(k[:, 1], axis=1)
    row = np.where((n0 >= n1)[:, None], k[:, 0], k[:, 1])
    vec = np.stack([-row[:, 1], row[:, 0]], axis=1)
    degenerate = np.maximum(n0, n1) <= 1e-12
    vec[degenerate] = [1.0, 0.0] if lam == 1j else [0.0, 1.0]
    vec /= np.linalg.norm(vec, axis=1)[:, None]
    lead = np.where(np.abs(vec[:, 0]) > 1e-12, vec[:, 0], vec[:, 1])
    return vec * (np.abs(lead) / lead)[:, None]


def decompose_d_gate() -> Circuit:
    """exp(i pi/4 Z x Z) on qubits (1, 2) with a single CNOT."""
    c = Circuit(2)
    c.add_unitary(2, HADAMARD)
    c.append(CNOT(1, 2))
    c.add_unitary(2, HADAMARD)
    c.append(Rotation("z", 1, np.pi / 2))
    c.append(Rotation("z", 2, np.pi / 2))
    c.global_phase -= np.pi / 4
    return c


# --- uniformly controlled one-qubit gates -------------------------------------------

@dataclass
class UCDecomposition:
    core: Circuit
    residual_diagonal: Diagonal

    def full(self) -> Circuit:
        return Circuit(self.core.n_qubits, self.core.gates + [self.residual_diagonal],
                       self.core.global_phase)


def _parity(a: int, b: int) -> int:
    return bin(a & b).count("1") & 1


def _gf2_solve(rows: list[int], rhs: list[int], k: int) -> int:
    """Some x with parity(rows[i] & x) == rhs[i] for all i."""
    piv = []  # (pivot bit, row, rhs)
    for r, v in zip(rows, rhs):
        for pb, pr, pv in piv:
            if r >> pb & 1:
                r ^= pr
                v ^= pv
        if r == 0:
            if v:
                raise PreconditionError("inconsistent feed structure")
            continue
        pb = r.bit_length() - 1
        piv = [(qb, qr ^ r, qv ^ v) if qr >> pb & 1 else (qb, qr, qv) for qb, qr, qv in piv]
        piv.append((pb, r, v))
    x = 0
    for pb, r, v in piv:
        if v:
            x |= 1 << pb
    return x


def _rank(vs) -> int:
    basis = []
    for v in vs:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def check_multiplexor_feeds(feeds: list[int], k: int) -> None:
    """The nested structure a feed list must have to carry a uniformly controlled gate."""
    n = len(feeds) + 1
    if n != 1 << k:
        raise PreconditionError(f"need {(1 << k) - 1} feeds, got {len(feeds)}")

    def rec(fs, m):
        if not fs:
            return
        h = len(fs) // 2
        left, mid, right = fs[:h], fs[h], fs[h + 1:]
        rl = _rank(left)
        if rl != m - 1 or _rank(right) != rl or _rank(left + right) != rl or _rank(left + [mid]) != m:
            raise PreconditionError("feed list is not a nested multiplexor structure")
        rec(left, m - 1)
        rec(right, m - 1)

    rec(list(feeds), k)


def multiplexed_gates(mats, feeds: list[int]):
    """Plain gates g_0..g_{N-1} and diagonal phases (2^k, 2) with, for every x,

        mats[x] = diag(delta[x]) g_{N-1} X^(x.f_{N-1}) ... g_1 X^(x.f_1) g_0.
    """
    mats = np.asarray(mats, dtype=complex)
    k = _num_controls(mats.shape[0])
    check_multiplexor_feeds(feeds, k)
    gates, delta = _mux(mats, list(feeds), np.arange(1 << k), [], k)
    return gates, delta


def _mux(mats, feeds, reps, ancestors, k):
    """Recursive split; only the entries listed in reps are meaningful."""
    delta = np.ones((1 << k, 2), dtype=complex)
    if not feeds:
        g = mats[reps[0]].copy()
        return [g], delta
    h = len(feeds) // 2
    left, y, right = feeds[:h], feeds[h], feeds[h + 1:]
    # a pattern step that changes y but nothing else the halves can see
    step = _gf2_solve(left + ancestors + [y], [0] * (len(left) + len(ancestors)) + [1], k)
    reps = np.asarray(reps)
    odd = np.array([_parity(x, y) for x in reps], dtype=bool)
    sub = reps[~odd]
    u = np.empty_like(mats)
    v = np.empty_like(mats)
    rmat = np.empty((1 << k, 2), dtype=complex)
    pu, pv, pr, _, _ = _multiplexor_batch(mats[sub], mats[sub ^ step])
    u[sub] = u[sub ^ step] = pu
    v[sub] = v[sub ^ step] = pv
    rmat[sub] = pr.conj()
    rmat[sub ^ step] = pr
    gv, dv = _mux(v, left, sub, ancestors + [y], k)
    # v-half diagonal commutes with block(d, d^dag) and moves into the u-half
    rz_h = np.diag([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)]) @ HADAMARD
    xr = np.where(odd, reps ^ step, reps)
    u2 = np.empty_like(mats)
    u2[reps] = (u[reps] * dv[xr][:, None, :]) @ rz_h
    gu, du = _mux(u2, right, sub, ancestors + [y], k)
    gv[-1] = HADAMARD @ gv[-1]
    delta[reps] = rmat[reps] * np.where(odd, -1j, 1.0)[:, None] * du[xr]
    return gv + gu, delta


def standard_feeds(k: int) -> list[int]:
    """Feed masks of the recursive construction that splits on controls[0] first."""
    return [1 << trailing_zeros(j) for j in range(1, 1 << k)]


def decompose_uc_onequbit(g: UCGate) -> UCDecomposition:
    """2^k one-qubit gates, 2^k - 1 CNOTs and a residual diagonal applied last."""
    mats = np.asarray(g.matrices, dtype=complex)
    k = _num_controls(mats.shape[0])
    if len(g.controls) != k:
        raise PreconditionError("UCGate needs 2^k payload matrices")
    n = max(g.qubits)
    feeds = standard_feeds(k)
    gates, delta = multiplexed_gates(mats, feeds)
    core = Circuit(n)
    for j, m in enumerate(gates):
        if j:
            core.append(CNOT(g.controls[k - 1 - trailing_zeros(j)], g.target))
        core.add_unitary(g.target, m)
    diag = Diagonal(tuple(g.controls) + (g.target,), delta.reshape(-1))
    return UCDecomposition(core, diag)


# --- diagonal gates -----------------------------------------------------------------

def diagonal_cascade(phases, qubits) -> tuple[list[UCRotation], float]:
    """Split a diagonal into z rotations uniformly controlled by the earlier qubits.

    Returns gates for targets qubits[0], qubits[1], ... (all commute) and the
    leftover global phase.
    """
    ang = np.angle(np.asarray(phases, dtype=complex))
    m = len(qubits)
    if ang.size != 1 << m:
        raise PreconditionError("diagonal needs 2^m phases")
    # unwrap pairs so differences stay small; any branch is exact
    out = []
    cur = ang.astype(float)
    for j in range(m - 1, -1, -1):
        pairs = cur.reshape(-1, 2)
        out.append(UCRotation("z", tuple(qubits[:j]), qubits[j], pairs[:, 0] - pairs[:, 1]))
        cur = pairs.mean(axis=1)
    out.reverse()
    return out, float(cur[0])


def decompose_diagonal(d: Diagonal) -> Circuit:
    """At most 2^m - 2 CNOTs; a scalar diagonal becomes an empty circuit."""
    ph = np.asarray(d.phases, dtype=complex)
    n = max(d.qubits)
    if np.allclose(ph, ph[0], atol=1e-14, rtol=0):
        return Circuit(n, [], float(np.angle(ph[0])))
    cascade, phase = diagonal_cascade(ph, d.qubits)
    c = Circuit(n, [], phase)
    for g in cascade:
        c.extend(decompose_uc_rotation(g).gates)
    return c
