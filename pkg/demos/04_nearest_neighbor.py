"""Restrict CNOTs to neighbors on a linear chain.

A multiplexed rotation normally couples its target to every control. The
chain variant routes the same gate through adjacent pairs only.
"""
import numpy as np

from ucirc import UCRotation, circuit_unitary, count_gates, decompose_uc_rotation, phase_error
from ucirc.chain import cnot_bound_ucr, is_nearest_neighbor, nn_decompose
from ucirc.circuit import gate_unitary

rng = np.random.default_rng(0)
for n in range(3, 7):
    g = UCRotation("y", tuple(range(2, n + 1)), 1, rng.uniform(-np.pi, np.pi, 2 ** (n - 1)))
    free = decompose_uc_rotation(g)
    chain = nn_decompose(g)
    err = phase_error(circuit_unitary(chain), gate_unitary(g, n))
    print(f"n={n}: any-pair {count_gates(free).cnot:>3} CNOTs, chain {count_gates(chain).cnot:>3} "
          f"(budget {cnot_bound_ucr(n, 1)}), adjacent={is_nearest_neighbor(chain)}, error {err:.1e}")
