"""Which controls a Givens rotation really needs.

Each rotation in the QR plan acts on two Gray-adjacent basis states. Many of
its controls can be dropped without disturbing entries that are already zero.
The histogram shows how many rotations keep k controls.
"""
from ucirc import elimination_profile, qr_plan, random_unitary

for n in range(2, 7):
    plan = qr_plan(random_unitary(n, n), n)
    hist = elimination_profile(plan)
    full = hist[n - 1]
    print(f"n={n}: {len(plan):>5} rotations, {full:>4} keep all {n - 1} controls, "
          f"histogram {[hist[k] for k in range(n)]}")
