"""Reference constructions built directly from gate definitions (dense kron products)."""
import numpy as np
import scipy.linalg

from ucirc.circuit import CNOT, OneQubit, Rotation

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": X, "y": Y, "z": Z}


def rot(axis, theta):
    """exp(i theta/2 sigma_axis) by matrix exponential."""
    return scipy.linalg.expm(0.5j * theta * PAULI[axis])


def embed(n, q, m):
    """m on qubit q (1 = most significant) of an n-qubit register."""
    out = np.eye(1, dtype=complex)
    for j in range(1, n + 1):
        out = np.kron(out, m if j == q else np.eye(2))
    return out


def bit(x, n, q):
    return (x >> (n - q)) & 1


def cnot(n, c, t, negated=False):
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        y = x ^ (1 << (n - t)) if bit(x, n, c) == (0 if negated else 1) else x
        m[y, x] = 1
    return m


def multiplexed(n, controls, target, mats):
    """Block operator applying mats[pattern of controls] to the target."""
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        pat = 0
        for c in controls:
            pat = 2 * pat + bit(x, n, c)
        tb = bit(x, n, target)
        for out_bit in (0, 1):
            y = (x & ~(1 << (n - target))) | (out_bit << (n - target))
            m[y, x] += mats[pat][out_bit, tb]
    return m


def diagonal(n, qubits, phases):
    dim = 1 << n
    d = np.empty(dim, dtype=complex)
    for x in range(dim):
        idx = 0
        for q in qubits:
            idx = 2 * idx + bit(x, n, q)
        d[x] = phases[idx]
    return np.diag(d)


def reference_unitary(circ):
    """Product of elementary gate embeddings in time order, times the global phase."""
    n = circ.n_qubits
    u = np.eye(1 << n, dtype=complex)
    for g in circ.gates:
        if isinstance(g, CNOT):
            m = cnot(n, g.control, g.target, g.negated)
        elif isinstance(g, Rotation):
            m = embed(n, g.target, rot(g.axis, g.angle))
        elif isinstance(g, OneQubit):
            m = embed(n, g.target, g.matrix)
        else:
            raise TypeError(g)
        u = m @ u
    return np.exp(1j * circ.global_phase) * u


def aligned_error(u, v):
    """Dimension-normalized Frobenius distance after the best global phase."""
    ov = np.trace(v.conj().T @ u)
    ph = ov / abs(ov) if abs(ov) > 1e-12 else 1
    return np.linalg.norm(u - ph * v) / np.sqrt(u.shape[0])


def random_su2(rng):
    z = rng.normal(size=4)
    z /= np.linalg.norm(z)
    a, b = complex(z[0], z[1]), complex(z[2], z[3])
    return np.array([[a, b], [-b.conjugate(), a.conjugate()]])


def random_u2(rng):
    return random_su2(rng) * np.exp(1j * rng.uniform(-np.pi, np.pi))
