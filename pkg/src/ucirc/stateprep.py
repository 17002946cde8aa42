"""Circuits taking one state vector to another.

A state is disentangled one qubit at a time, starting from the last qubit:
a multiplexed one-qubit gate on qubit i, controlled by qubits 1..i-1, rotates
every amplitude pair onto its |0> component. The multiplexor is realized up
to a diagonal; the diagonal is never emitted because the next stage simply
reads the state it leaves behind.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, UCGate, apply_circuit, axis_rotation, fuse_one_qubit
from .linalg import PreconditionError
from .ucg import decompose_uc_onequbit

NORM_TOL = 1e-8


@dataclass
class PrepStage:
    """Stage acting on qubit `target`, controlled by the qubits before it.

    Each control pattern x gets Ry(ry[x]) Rz(rz[x]).
    """

    target: int
    rz: np.ndarray
    ry: np.ndarray


@dataclass
class PrepPlan:
    stages: list = field(default_factory=list)  # in time order: qubit n first
    direction: str = "to-e1"


def pair_angles(even: complex, odd: complex) -> tuple[float, float]:
    """(rz, ry) with Ry(ry) Rz(rz) (even, odd) = (r, 0), r >= 0 up to a phase."""
    if abs(even) == 0 or abs(odd) == 0:
        # a single nonzero amplitude needs no relative phase fix
        return 0.0, (0.0 if abs(odd) == 0 else math.pi)
    rz = np.angle(odd) - np.angle(even)
    ry = 2 * math.atan2(abs(odd), abs(even))
    return float(rz), float(ry)


def _check_state(a, n=None) -> tuple[np.ndarray, int]:
    a = np.asarray(a, dtype=complex).reshape(-1)
    dim = a.size
    if dim < 2 or dim & (dim - 1):
        raise PreconditionError("state length must be a power of two (at least 2)")
    nrm = np.linalg.norm(a)
    if nrm == 0:
        raise PreconditionError("zero state vector")
    if abs(nrm - 1) > NORM_TOL:
        raise PreconditionError("state vector is not normalized")
    k = dim.bit_length() - 1
    if n is not None and k != n:
        raise PreconditionError("state dimensions differ")
    return a / nrm, k


def disentangle(a) -> tuple[Circuit, PrepPlan]:
    """Circuit C with C a = e_1 exactly (the global phase is carried by C)."""
    a, n = _check_state(a)
    circ = Circuit(n)
    plan = PrepPlan()
    state = a.copy()
    for i in range(n, 0, -1):
        k = i - 1
        pairs = state[:: 1 << (n - i)].reshape(1 << k, 2)
        angles = np.array([pair_angles(e, o) for e, o in pairs]).reshape(-1, 2)
        plan.stages.append(PrepStage(i, angles[:, 0], angles[:, 1]))
        mats = np.array([axis_rotation("y", ry) @ axis_rotation("z", rz) for rz, ry in angles])
        stage = Circuit(n)
        if k == 0:
            stage.add_unitary(i, mats[0])
        else:
            core = decompose_uc_onequbit(UCGate(tuple(range(1, i)), i, mats)).core
            stage.extend(core.gates)
            stage.global_phase = core.global_phase
        state = apply_circuit(stage, state)
        circ.extend(stage.gates)
        circ.global_phase += stage.global_phase
    circ.global_phase -= float(np.angle(state[0]))
    return circ, plan


def state_to_state(a, b) -> Circuit:
    """Circuit C with C a = b.

    The disentangler of a is followed by the inverse disentangler of b; the
    one-qubit gates meeting at the seam are merged, one per qubit. A side
    whose state is already e_1 (up to phase) is skipped.
    """
    a, n = _check_state(a)
    b, _ = _check_state(b, n)
    ca = _basis_side(a, n) or disentangle(a)[0]
    cb = _basis_side(b, n) or disentangle(b)[0]
    return fuse_one_qubit(ca.compose(cb.inverse()))


def _basis_side(a, n):
    if abs(abs(a[0]) - 1) < 1e-12:
        return Circuit(n, [], -float(np.angle(a[0])))
    return None
