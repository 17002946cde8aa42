import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import X, Z, aligned_error, cnot, diagonal, embed, multiplexed, random_su2, reference_unitary, rot
from ucirc.circuit import (
    CNOT, Circuit, Diagonal, MultiControlled, OneQubit, ParseError, Rotation, UCGate, UCRotation,
    apply_circuit, circuit_unitary, count_gates, emit_text, equal_up_to_phase, euler_zyz,
    fuse_one_qubit, gate_unitary, parse_matrix, parse_state, parse_text, phase_error,
    rotation_matrix, same_circuit, write_matrix, write_state,
)
from ucirc.linalg import PreconditionError, random_state, random_unitary

angles = st.floats(-10, 10, allow_nan=False)
AXES = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}


def test_rotation_matrix_zero_angle():
    assert np.allclose(rotation_matrix((0.6, 0, 0.8), 0), np.eye(2))


def test_rotation_matrix_z_pi():
    assert np.allclose(rotation_matrix((0, 0, 1), np.pi), np.diag([1j, -1j]))


def test_rotation_matrix_matches_exponential():
    a = np.array([1, 2, 2]) / 3
    gen = a[0] * X + a[1] * np.array([[0, -1j], [1j, 0]]) + a[2] * Z
    import scipy.linalg
    assert np.allclose(rotation_matrix(a, 0.9), scipy.linalg.expm(0.45j * gen))


def test_rotation_matrix_rejects_non_unit_axis():
    with pytest.raises(PreconditionError):
        rotation_matrix((1, 1, 0), 0.3)


@given(angles, angles, st.sampled_from(["x", "y", "z"]))
def test_rotation_additivity(t1, t2, axis):
    a = AXES[axis]
    assert np.allclose(rotation_matrix(a, t1) @ rotation_matrix(a, t2), rotation_matrix(a, t1 + t2), atol=1e-10)
    c = Circuit(1, [Rotation(axis, 1, t1), Rotation(axis, 1, t2)])
    assert np.abs(circuit_unitary(c) - circuit_unitary(Circuit(1, [Rotation(axis, 1, t1 + t2)]))).max() < 1e-10


@given(angles, st.sampled_from(["y", "z"]))
def test_pauli_x_conjugation_negates(theta, axis):
    xg = OneQubit(1, X * -1j)  # SU(2) form of X; the two phases cancel
    c = Circuit(1, [xg, Rotation(axis, 1, theta), xg])
    assert np.abs(-circuit_unitary(c) - rot(axis, -theta)).max() < 1e-10


@given(st.integers(0, 2**32 - 1))
def test_euler_reassembly(seed):
    u = random_su2(np.random.default_rng(seed))
    a, b, g = euler_zyz(u)
    assert 0 <= b <= np.pi
    assert np.abs(rot("z", a) @ rot("y", b) @ rot("z", g) - u).max() < 1e-10


def test_euler_examples():
    assert np.allclose(euler_zyz(np.eye(2)), (0, 0, 0))
    assert np.allclose(euler_zyz(rot("y", 0.7)), (0, 0.7, 0))
    with pytest.raises(PreconditionError):
        euler_zyz(X)


def test_circuit_unitary_empty():
    assert np.allclose(circuit_unitary(Circuit(2)), np.eye(4))


def test_circuit_unitary_cnot():
    expected = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.allclose(circuit_unitary(Circuit(2, [CNOT(1, 2)])), expected)


def test_circuit_unitary_negated_cnot():
    expected = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert np.allclose(circuit_unitary(Circuit(2, [CNOT(1, 2, negated=True)])), expected)


def test_circuit_unitary_multiplexor_block():
    rng = np.random.default_rng(3)
    a, b = random_su2(rng), random_su2(rng)
    u = circuit_unitary(Circuit(2, [UCGate((1,), 2, np.array([a, b]))]))
    assert np.allclose(u, np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), b]]))


def _random_elementary(n, rng, length):
    c = Circuit(n, [], float(rng.uniform(-3, 3)))
    for _ in range(length):
        kind = rng.integers(3)
        if kind == 0 and n > 1:
            q = rng.choice(np.arange(1, n + 1), 2, replace=False)
            c.append(CNOT(int(q[0]), int(q[1]), bool(rng.integers(2))))
        elif kind == 1:
            c.append(Rotation("xyz"[rng.integers(3)], int(rng.integers(1, n + 1)), float(rng.uniform(-7, 7))))
        else:
            c.append(OneQubit(int(rng.integers(1, n + 1)), random_su2(rng)))
    return c


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_circuit_unitary_matches_kron_oracle(n):
    rng = np.random.default_rng(n)
    c = _random_elementary(n, rng, 30)
    assert np.abs(circuit_unitary(c) - reference_unitary(c)).max() < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_simulation_agrees_on_basis_states(n):
    rng = np.random.default_rng(10 + n)
    c = _random_elementary(n, rng, 25)
    ref = reference_unitary(c)
    for x in range(1 << n):
        e = np.zeros(1 << n, dtype=complex)
        e[x] = 1
        assert np.abs(apply_circuit(c, e) - ref[:, x]).max() < 1e-12


def test_composite_gate_semantics():
    rng = np.random.default_rng(5)
    n = 3
    mats = np.array([random_su2(rng) for _ in range(4)])
    assert np.allclose(gate_unitary(UCGate((3, 1), 2, mats), n), multiplexed(n, (3, 1), 2, mats))
    ang = rng.uniform(-3, 3, 4)
    ucr = UCRotation("y", (1, 2), 3, ang)
    assert np.allclose(gate_unitary(ucr, n), multiplexed(n, (1, 2), 3, [rot("y", a) for a in ang]))
    ph = np.exp(1j * rng.uniform(-3, 3, 4))
    assert np.allclose(gate_unitary(Diagonal((3, 2), ph), n), diagonal(n, (3, 2), ph))
    v = random_su2(rng)
    mc = MultiControlled((1, 3), (False, True), 2, v)
    block = [np.eye(2), np.eye(2), np.eye(2), np.eye(2)]
    block[0b01] = v
    assert np.allclose(gate_unitary(mc, n), multiplexed(n, (1, 3), 2, block))


def test_equal_up_to_phase_examples():
    u = random_unitary(2, 1)
    assert equal_up_to_phase(u, np.exp(1.3j) * u)
    assert not equal_up_to_phase(np.eye(2), X)
    with pytest.raises(PreconditionError):
        phase_error(np.eye(2), np.eye(4))


def test_phase_error_matches_brute_force():
    rng = np.random.default_rng(0)
    u = random_unitary(2, 3)
    v = u @ np.diag(np.exp(1j * rng.normal(scale=0.1, size=4)))
    grid = np.linspace(-np.pi, np.pi, 20001)
    brute = min(np.linalg.norm(u - np.exp(1j * p) * v) for p in grid) / 2
    assert abs(phase_error(u, v) - brute) < 1e-6
    assert abs(phase_error(u, v) - aligned_error(u, v)) < 1e-12


def test_phase_error_traceless_fallback():
    # tr(X^dagger Z) = 0: the overlap falls back to the largest entry
    assert phase_error(Z @ X, 1j * Z @ X) < 1e-12


def test_count_gates():
    assert count_gates(Circuit(2)).total == 0
    c = Circuit(2, [CNOT(1, 2), Rotation("z", 1, 0.1), OneQubit(2, np.eye(2))], 0.0)
    r = count_gates(c, "x")
    assert (r.cnot, r.one_qubit, r.rotation, r.total, r.method) == (1, 1, 1, 3, "x")
    with pytest.raises(PreconditionError):
        count_gates(Circuit(2, [Diagonal((1,), np.array([1, 1j]))]))


def test_count_gates_additive():
    rng = np.random.default_rng(9)
    a, b = _random_elementary(3, rng, 12), _random_elementary(3, rng, 17)
    assert count_gates(a.compose(b)) == count_gates(a) + count_gates(b)


def test_text_fixtures():
    assert emit_text(Circuit(1)) == "qubits 1\n"
    assert emit_text(Circuit(2, [CNOT(1, 2)])) == "qubits 2\ncnot 1 2\n"
    c = parse_text("qubits 2\n# comment\ncnot 2 1 neg\nrz 1 0.5\n")
    assert same_circuit(c, Circuit(2, [CNOT(2, 1, True), Rotation("z", 1, 0.5)]))


def _random_any(rng):
    n = 4
    c = _random_elementary(n, rng, 30)
    c.append(Diagonal((2, 4), np.exp(1j * rng.uniform(-3, 3, 4))))
    c.append(UCRotation("x", (1, 3), 2, rng.uniform(-3, 3, 4)))
    c.append(UCGate((4,), 1, np.array([random_su2(rng) for _ in range(2)])))
    c.append(MultiControlled((2, 3), (True, False), 4, random_su2(rng)))
    return c


@given(st.integers(0, 2**32 - 1))
def test_text_round_trip(seed):
    c = _random_any(np.random.default_rng(seed))
    back = parse_text(emit_text(c))
    assert same_circuit(c, back)
    assert np.abs(circuit_unitary(c) - circuit_unitary(back)).max() < 1e-12


@pytest.mark.parametrize("text", [
    "cnot 1 2\n",
    "qubits 2\ncnot 1\n",
    "qubits 2\nfoo 1\n",
    "qubits 1\nu 1 2 0 0 0\n",
    "qubits 2\nucg 1 1 2\nu 2 1 0 0 0\n",
])
def test_parse_errors_carry_line_numbers(text):
    with pytest.raises(ParseError) as exc:
        parse_text(text)
    assert "line" in str(exc.value)


def test_validate_rejects_bad_indices():
    with pytest.raises(PreconditionError):
        Circuit(2, [CNOT(1, 3)]).validate()
    with pytest.raises(PreconditionError):
        Circuit(2, [CNOT(1, 1)]).validate()


def test_matrix_and_state_files_round_trip():
    u = random_unitary(2, 4)
    assert np.abs(parse_matrix(write_matrix(u)) - u).max() < 1e-15
    a = random_state(3, 4)
    assert np.abs(parse_state(write_state(a)) - a).max() < 1e-15
    with pytest.raises(ParseError):
        parse_matrix("dim 2\n1 0 0 0\n")


def test_fuse_merges_and_keeps_unitary():
    rng = np.random.default_rng(2)
    c = _random_elementary(3, rng, 60)
    f = fuse_one_qubit(c)
    assert aligned_error(circuit_unitary(f), circuit_unitary(c)) < 1e-12
    assert count_gates(f).cnot == count_gates(c).cnot
    assert count_gates(f).total <= count_gates(c).total


def test_fuse_slides_z_over_control_only():
    c = Circuit(2, [Rotation("z", 1, 0.3), CNOT(1, 2), Rotation("z", 1, 0.4)])
    assert len(fuse_one_qubit(c).gates) == 2
    c = Circuit(2, [Rotation("z", 2, 0.3), CNOT(1, 2), Rotation("z", 2, 0.4)])
    assert len(fuse_one_qubit(c).gates) == 3
    c = Circuit(2, [Rotation("y", 1, 0.3), CNOT(1, 2), Rotation("y", 1, 0.4)])
    assert len(fuse_one_qubit(c).gates) == 3


def test_embedding_helpers_agree():
    # guards the oracle itself: CNOT(1, 2) on 2 qubits is the textbook matrix
    assert np.allclose(cnot(2, 1, 2), circuit_unitary(Circuit(2, [CNOT(1, 2)])))
    assert np.allclose(embed(2, 1, X), np.kron(X, np.eye(2)))
