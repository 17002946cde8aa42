"""Decompose one random three-qubit unitary with every method.

Each method yields a circuit of CNOTs and one-qubit gates. We print the gate
counts and check the circuit against the input matrix.
"""
from ucirc import circuit_unitary, count_gates, phase_error, random_unitary
from ucirc.cli import METHODS, synthesize

n = 3
u = random_unitary(n, seed=2024)
print(f"random {n}-qubit unitary, {2**n}x{2**n}")
print(f"{'method':<12} {'cnot':>6} {'1-qubit':>8} {'rotation':>9} {'error':>10}")
for method in METHODS:
    circ = synthesize(u, n, method)
    r = count_gates(circ)
    err = phase_error(circuit_unitary(circ), u)
    print(f"{method:<12} {r.cnot:>6} {r.one_qubit:>8} {r.rotation:>9} {err:>10.1e}")
