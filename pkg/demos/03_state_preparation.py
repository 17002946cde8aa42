"""Prepare states without building a full unitary.

First a GHZ state from |000>, then a transfer between two random states.
"""
import numpy as np

from ucirc import apply_circuit, count_gates, random_state, state_to_state

n = 3
zero = np.zeros(2**n, dtype=complex)
zero[0] = 1
ghz = np.zeros(2**n, dtype=complex)
ghz[[0, -1]] = 1 / np.sqrt(2)

c = state_to_state(zero, ghz)
out = apply_circuit(c, zero)
r = count_gates(c)
print(f"|000> -> GHZ: {r.cnot} CNOTs, {r.single_qubit} one-qubit gates, "
      f"fidelity {abs(np.vdot(ghz, out)):.12f}")

a, b = random_state(n, 1), random_state(n, 2)
c = state_to_state(a, b)
r = count_gates(c)
print(f"random -> random: {r.cnot} CNOTs, {r.single_qubit} one-qubit gates, "
      f"fidelity {abs(np.vdot(b, apply_circuit(c, a))):.12f}")
