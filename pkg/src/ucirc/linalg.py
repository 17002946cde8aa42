"""Dense complex linear algebra kernels shared by the decompositions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

UNITARY_TOL = 1e-10


class PreconditionError(ValueError):
    """Raised when an input violates an operation's precondition."""


def _square(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {m.shape}")
    return m


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    """True iff ||M^dagger M - I||_F <= tol."""
    m = _square(m)
    return bool(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])) <= tol)


def first_nonzero_real(vecs: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rescale each column so its first non-negligible entry is real and positive."""
    vecs = np.array(vecs, dtype=complex)
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size:
            z = col[idx[0]]
            vecs[:, j] = col * (abs(z) / z)
    return vecs


def unitary_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a unitary matrix, M = V diag(w) V^dagger.

    The complex Schur form of a normal matrix is diagonal, so the Schur vectors
    are an orthonormal eigenbasis even for repeated eigenvalues. Eigenvalues are
    sorted by principal argument in [-pi, pi); ties keep the order of the index
    of each vector's dominant component.
    """
    m = _square(m)
    if not is_unitary(m, 1e-8):
        raise PreconditionError("unitary_eig needs a unitary matrix")
    if np.abs(m - m[0, 0] * np.eye(len(m))).max() < 1e-12:
        # a scalar matrix: every basis is an eigenbasis, keep the standard one
        t, z = m, np.eye(len(m), dtype=complex)
    else:
        t, z = scipy.linalg.schur(m, output="complex")
    w = np.diag(t).copy()
    w /= np.abs(w)
    ang = np.angle(w)
    ang[ang >= np.pi - 1e-12] -= 2 * np.pi
    # round so that numerically equal eigenvalues fall back to the tie-break
    key_ang = np.round(ang, 9)
    dominant = np.argmax(np.abs(z), axis=0)
    order = np.lexsort((dominant, key_ang))
    return first_nonzero_real(z[:, order]), w[order]


@dataclass(frozen=True)
class CSDResult:
    """block(u1, u2) @ [[c, s], [-s, c]] @ block(u3, u4) with c, s = cos, sin of thetas."""

    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    u4: np.ndarray
    thetas: np.ndarray

    def middle(self) -> np.ndarray:
        c = np.diag(np.cos(self.thetas))
        s = np.diag(np.sin(self.thetas))
        return np.block([[c, s], [-s, c]]).astype(complex)

    def reassemble(self) -> np.ndarray:
        z = np.zeros_like(self.u1)
        left = np.block([[self.u1, z], [z, self.u2]])
        right = np.block([[self.u3, z], [z, self.u4]])
        return left @ self.middle() @ right


def cs_decompose(u) -> CSDResult:
    """Cosine-sine decomposition split at the midpoint."""
    u = _square(u)
    dim = u.shape[0]
    if dim < 2 or dim & (dim - 1):
        raise PreconditionError("cs_decompose needs dimension 2^n with n >= 1")
    if not is_unitary(u, 1e-8):
        raise PreconditionError("cs_decompose needs a unitary matrix")
    h = dim // 2
    (u1, u2), theta, (v1, v2) = scipy.linalg.cossin(u, p=h, q=h, separate=True)
    # scipy's middle factor is [[c, -s], [s, c]]; conjugating with diag(I, -I)
    # turns it into [[c, s], [-s, c]]
    return CSDResult(u1, -u2, v1, -v2, np.clip(np.asarray(theta, dtype=float), 0.0, np.pi / 2))


def givens_for(b1: complex, b2: complex) -> np.ndarray:
    """SU(2) matrix G with G @ (b1, b2) = (|b|, 0)."""
    nrm = np.hypot(abs(b1), abs(b2))
    if nrm == 0:
        raise PreconditionError("givens_for needs a nonzero vector")
    return np.array([[np.conj(b1), np.conj(b2)], [-b2, b1]], dtype=complex) / nrm


def random_unitary(n_qubits: int, seed: int) -> np.ndarray:
    """Haar-random element of SU(2^n) from a seeded Gaussian QR."""
    if n_qubits < 1:
        raise PreconditionError("n_qubits must be positive")
    dim = 2**n_qubits
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    det = np.linalg.det(q)
    return q * np.exp(-1j * np.angle(det) / dim)


def random_state(n_qubits: int, seed: int) -> np.ndarray:
    """Seeded random normalized amplitude vector."""
    if n_qubits < 1:
        raise PreconditionError("n_qubits must be positive")
    rng = np.random.default_rng(seed)
    dim = 2**n_qubits
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)
