"""Expansion of composite gates into CNOTs and one-qubit gates."""
from __future__ import annotations

from .circuit import (
    CNOT, HADAMARD, Circuit, Diagonal, MultiControlled, OneQubit, Rotation, UCGate, UCRotation,
)
from .qr import expand_multicontrolled
from .ucg import decompose_diagonal, decompose_uc_onequbit, decompose_uc_rotation


def _expand_gate(g, n: int) -> Circuit:
    if isinstance(g, (CNOT, OneQubit, Rotation)):
        return Circuit(n, [g])
    if isinstance(g, UCRotation):
        if g.axis == "x":
            inner = decompose_uc_rotation(UCRotation("z", g.controls, g.target, g.angles))
            c = Circuit(n).add_unitary(g.target, HADAMARD)
            c.extend(inner.gates)
            return c.add_unitary(g.target, HADAMARD)
        return Circuit(n, decompose_uc_rotation(g).gates)
    if isinstance(g, UCGate):
        if not g.controls:
            return Circuit(n).add_unitary(g.target, g.matrices[0])
        dec = decompose_uc_onequbit(g)
        tail = decompose_diagonal(dec.residual_diagonal)
        return Circuit(n, dec.core.gates + tail.gates, dec.core.global_phase + tail.global_phase)
    if isinstance(g, Diagonal):
        d = decompose_diagonal(g)
        return Circuit(n, d.gates, d.global_phase)
    if isinstance(g, MultiControlled):
        return expand_multicontrolled(g, n)
    raise TypeError(f"unknown gate {g!r}")


def lower(c: Circuit) -> Circuit:
    """Equivalent circuit (including global phase) of CNOT, OneQubit and Rotation gates."""
    out = Circuit(c.n_qubits, [], c.global_phase)
    for g in c.gates:
        part = _expand_gate(g, c.n_qubits)
        out.extend(part.gates)
        out.global_phase += part.global_phase
    return out
