"""Recursive cosine-sine decomposition of n-qubit unitaries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import nn_decompose
from .circuit import CNOT, Circuit, OneQubit, UCGate, UCRotation, axis_rotation, euler_zyz, to_su2
from .linalg import PreconditionError, cs_decompose, is_unitary
from .ucg import decompose_uc_onequbit, decompose_uc_rotation, diagonal_cascade

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def ruler(i: int) -> int:
    """1 + the exponent of 2 in i."""
    if i < 1:
        raise PreconditionError("ruler is defined for positive integers")
    return (i & -i).bit_length()


@dataclass
class ChainItem:
    """One uniformly controlled one-qubit factor of the recursive CSD.

    matrices are indexed by the pattern of the other qubits in increasing order.
    """

    target: int
    matrices: np.ndarray
    is_rotation: bool = False

    def controls(self, n: int) -> tuple:
        return tuple(q for q in range(1, n + 1) if q != self.target)


@dataclass
class CSDPlan:
    """The 2^n - 1 multiplexed factors of U, leftmost (applied last) first."""

    items: list
    variant: str = "standard"  # or "rotations"

    def rotation_targets(self) -> list[int]:
        return [it.target for it in self.items if it.is_rotation]


def csd_plan(u, n: int, variant: str = "standard") -> CSDPlan:
    if variant not in ("standard", "rotations"):
        raise PreconditionError(f"unknown variant {variant!r}")
    u = _check(u, n)
    return CSDPlan(csd_chain(u, n) if n > 1 else [ChainItem(1, u[None])], variant)


def csd_chain(u, n: int) -> list[ChainItem]:
    """Factors of the full recursion, leftmost (applied last) first.

    The list alternates 2^(n-1) gates on qubit n with 2^(n-1) - 1 y rotations
    whose targets follow n - ruler(i).
    """
    blocks = [np.asarray(u, dtype=complex)]
    return _chain(blocks, n, 0)


def _chain(blocks, n, depth):
    if depth == n - 1:
        return [ChainItem(n, np.array(blocks))]
    left, right, angles = [], [], []
    for b in blocks:
        r = cs_decompose(b)
        left += [r.u1, r.u2]
        right += [r.u3, r.u4]
        angles.append(2 * r.thetas)
    # target depth+1; its controls are qubits 1..depth then depth+2..n
    ry = np.array([axis_rotation("y", a) for a in np.concatenate(angles)])
    mid = ChainItem(depth + 1, ry, is_rotation=True)
    return _chain(left, n, depth + 1) + [mid] + _chain(right, n, depth + 1)


def _layout(n: int, order) -> np.ndarray:
    """For every basis index (qubit 1 = MSB) its index when qubits are listed in order."""
    i = np.arange(1 << n)
    out = np.zeros_like(i)
    for q in order:
        out = (out << 1) | ((i >> (n - q)) & 1)
    return out


def _delta_blocks(delta, n, target):
    """Full diagonal as (pattern of the other qubits, target bit) pairs."""
    order = [q for q in range(1, n + 1) if q != target] + [target]
    blocks = np.empty(1 << n, dtype=complex)
    blocks[_layout(n, order)] = delta
    return blocks.reshape(-1, 2)


def _delta_full(blocks, n, target):
    order = [q for q in range(1, n + 1) if q != target] + [target]
    return np.asarray(blocks).reshape(-1)[_layout(n, order)]


def _check(u, n):
    u = np.asarray(u, dtype=complex)
    if n < 1 or u.shape != (1 << n, 1 << n):
        raise PreconditionError(f"expected a {1 << n}x{1 << n} matrix")
    if not is_unitary(u, 1e-8):
        raise PreconditionError("input is not unitary")
    return u


def csd_decompose(u, n: int, nearest_neighbor: bool = False) -> Circuit:
    """CNOT + one-qubit circuit with 4^n/2 - 2^(n-1) - 2 CNOTs (n >= 2).

    With nearest_neighbor every multiplexor and rotation is routed on the chain
    1..n; the cross-block merges and the CNOT cancellation are then skipped.
    """
    u = _check(u, n)
    if n == 1:
        return Circuit(1).add_unitary(1, u)
    timeline = csd_chain(u, n)[::-1]
    circ = Circuit(n)
    delta = np.ones(1 << n, dtype=complex)
    last_on = {}
    for pos, item in enumerate(timeline):
        mats = item.matrices * _delta_blocks(delta, n, item.target)[:, None, :]
        gate = UCGate(item.controls(n), item.target, mats)
        if nearest_neighbor:
            dec = nn_decompose(gate)
        else:
            if pos == len(timeline) - 1:
                # absorb CNOT(1 -> n) so the closing CNOT of the diagonal cascade cancels it
                half = mats.shape[0] // 2
                mats = mats.copy()
                mats[half:] = PAULI_X @ mats[half:]
                gate = UCGate(gate.controls, gate.target, mats)
            dec = decompose_uc_onequbit(gate)
        circ.extend(dec.core.gates)
        circ.global_phase += dec.core.global_phase
        last_on[item.target] = len(circ.gates) - 1
        delta = _delta_full(dec.residual_diagonal.phases, n, item.target)
    cascade, phase = diagonal_cascade(delta, tuple(range(1, n + 1)))
    circ.global_phase += phase
    if nearest_neighbor:
        for g in cascade:
            circ.extend(nn_decompose(g).gates)
        return circ
    for g in cascade:
        part = decompose_uc_rotation(g).gates
        # the leading z rotation commutes back through CNOT controls
        idx = last_on[g.target]
        circ.gates[idx] = OneQubit(g.target, part[0].matrix @ circ.gates[idx].matrix)
        circ.extend(part[1:])
    last = circ.gates.pop()
    assert last == CNOT(1, n)
    return circ


def csd_decompose_rotations(u, n: int, nearest_neighbor: bool = False) -> Circuit:
    """Variant whose one-qubit content is only y and z rotations (4^n - 1 of them)."""
    u = _check(u, n)
    chain = csd_chain(u, n)
    circ = Circuit(n)
    delta = np.ones(1 << n, dtype=complex)
    for item in chain[::-1]:
        mats = item.matrices * _delta_blocks(delta, n, item.target)[:, None, :]
        controls = item.controls(n)
        k = len(controls)
        ry = np.empty(1 << k)
        rz = np.empty(1 << k)
        blocks = np.empty((1 << k, 2), dtype=complex)
        for x, m in enumerate(mats):
            su, ph = to_su2(m)
            alpha, beta, gamma = euler_zyz(su)
            ry[x], rz[x] = beta, gamma
            blocks[x] = np.exp(1j * (ph + np.array([alpha, -alpha]) / 2))
        zgate = UCRotation("z", controls, item.target, rz)
        ygate = UCRotation("y", controls, item.target, ry)
        if nearest_neighbor:
            circ.extend(nn_decompose(zgate).gates + nn_decompose(ygate).gates)
            delta = _delta_full(blocks, n, item.target)
            continue
        zpart = decompose_uc_rotation(zgate).gates
        ypart = decompose_uc_rotation(ygate, mirrored=True).gates
        if zpart and isinstance(zpart[-1], CNOT) and ypart and zpart[-1] == ypart[0]:
            zpart, ypart = zpart[:-1], ypart[1:]
        circ.extend(zpart + ypart)
        delta = _delta_full(blocks, n, item.target)
    cascade, phase = diagonal_cascade(delta, tuple(range(1, n + 1)))
    circ.global_phase += phase
    for g in cascade:
        circ.extend((nn_decompose(g) if nearest_neighbor else decompose_uc_rotation(g)).gates)
    return circ
