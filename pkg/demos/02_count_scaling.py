"""How CNOT counts grow with the number of qubits.

The multiplexor-based methods stay close to 4^n / 2 CNOTs. The Givens-rotation
method is within a constant factor of 4^n once controls are pruned.
"""
from ucirc import count_gates, random_unitary
from ucirc.cli import synthesize

methods = ("csd", "nq", "nq-improved", "qr")
print(f"{'n':>2} " + " ".join(f"{m:>12}" for m in methods) + f" {'4^n/2':>8}")
for n in range(2, 6):
    u = random_unitary(n, seed=n)
    row = [count_gates(synthesize(u, n, m)).cnot for m in methods]
    print(f"{n:>2} " + " ".join(f"{c:>12}" for c in row) + f" {4**n // 2:>8}")
