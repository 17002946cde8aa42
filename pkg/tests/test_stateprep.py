import numpy as np
import pytest

from ucirc.circuit import Circuit, apply_circuit, axis_rotation, count_gates
from ucirc.linalg import PreconditionError, random_state
from ucirc.stateprep import disentangle, pair_angles, state_to_state


def e1(n):
    v = np.zeros(1 << n, dtype=complex)
    v[0] = 1
    return v


@pytest.mark.parametrize("even,odd", [(1, 0), (0, 1), (0.6, 0.8j), (-0.3 + 0.1j, 0.5 - 0.7j)])
def test_pair_angles_nullify(even, odd):
    rz, ry = pair_angles(even, odd)
    out = axis_rotation("y", ry) @ axis_rotation("z", rz) @ np.array([even, odd])
    assert abs(out[1]) < 1e-12
    assert abs(abs(out[0]) - np.hypot(abs(even), abs(odd))) < 1e-12


def test_basis_input_has_zero_angles():
    for n in (1, 3):
        c, plan = disentangle(e1(n))
        for st_ in plan.stages:
            assert np.allclose(st_.rz, 0) and np.allclose(st_.ry, 0)
        assert np.abs(apply_circuit(c, e1(n)) - e1(n)).max() < 1e-12


def test_single_qubit_plus_state():
    a = np.array([1, 1]) / np.sqrt(2)
    c, plan = disentangle(a)
    assert np.isclose(plan.stages[0].ry[0], np.pi / 2) and np.isclose(plan.stages[0].rz[0], 0)
    assert abs(abs(apply_circuit(c, a)[0]) - 1) < 1e-12
    assert count_gates(c).total == 1


@pytest.mark.parametrize("n", range(1, 7))
def test_disentangle_exact(n):
    a = random_state(n, 30 + n)
    c, plan = disentangle(a)
    assert len(plan.stages) == n
    assert [s.target for s in plan.stages] == list(range(n, 0, -1))
    assert [len(s.ry) for s in plan.stages] == [1 << (t - 1) for t in range(n, 0, -1)]
    assert np.abs(apply_circuit(c, a) - e1(n)).max() < 1e-10


@pytest.mark.parametrize("n", range(2, 7))
def test_stage_support(n):
    # after the stage on qubit i, qubits i..n are all |0>
    a = random_state(n, n)
    c, plan = disentangle(a)
    state = a
    stage_ends = np.cumsum([(1 << (s.target - 1)) - 1 + (1 << (s.target - 1)) for s in plan.stages])
    gates = c.gates
    start = 0
    for s, end in zip(plan.stages, stage_ends):
        state = apply_circuit(Circuit(n, gates[start:end]), state)
        start = end
        low_bits = n - s.target + 1
        mask = (1 << low_bits) - 1
        off = [abs(state[j]) ** 2 for j in range(1 << n) if j & mask]
        assert sum(off) < 1e-18


@pytest.mark.parametrize("n", range(1, 9))
def test_state_to_state_fidelity_and_counts(n):
    worst = 0.0
    for seed in range(50):
        a = random_state(n, 1000 * n + seed)
        b = random_state(n, 2000 * n + seed)
        c = state_to_state(a, b)
        worst = max(worst, 1 - abs(np.vdot(b, apply_circuit(c, a))))
        if n >= 2 and seed < 3:
            r = count_gates(c)
            assert r.cnot == 2 * 2**n - 2 * n - 2
            assert r.single_qubit == 2 * 2**n - n - 2
    assert worst < 1e-9


def test_small_counts():
    for n, (cx, one) in {2: (2, 4), 3: (8, 11)}.items():
        r = count_gates(state_to_state(random_state(n, 1), random_state(n, 2)))
        assert (r.cnot, r.single_qubit) == (cx, one)


def test_basis_target_halves_cost():
    n = 6
    a = random_state(n, 5)
    full = count_gates(state_to_state(a, random_state(n, 6)))
    half = count_gates(state_to_state(a, e1(n)))
    assert half.cnot * 2 <= full.cnot + 2 * n
    assert abs(abs(np.vdot(e1(n), apply_circuit(state_to_state(a, e1(n)), a))) - 1) < 1e-10


def test_same_state():
    a = random_state(4, 3)
    c = state_to_state(a, a)
    assert 1 - abs(np.vdot(a, apply_circuit(c, a))) < 1e-9


def test_errors():
    with pytest.raises(PreconditionError):
        disentangle(np.zeros(4))
    with pytest.raises(PreconditionError):
        disentangle(np.ones(3) / np.sqrt(3))
    with pytest.raises(PreconditionError):
        state_to_state(random_state(2, 0), random_state(3, 0))
