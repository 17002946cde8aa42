"""Top-down decomposition through quantum multiplexors, with two-qubit leaves."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import nn_decompose
from .circuit import (CNOT, PAULI_X, PAULI_Y, PAULI_Z, Circuit, Diagonal, Rotation, fuse_one_qubit, UCGate, UCRotation,
                      axis_rotation, circuit_unitary)
from .linalg import PreconditionError, cs_decompose, is_unitary, unitary_eig
from .ucg import decompose_uc_onequbit, decompose_uc_rotation

MAGIC = np.array([[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]]) / np.sqrt(2)
XX = np.kron(PAULI_X, PAULI_X)
YY = np.kron(PAULI_Y, PAULI_Y)
ZZ = np.kron(PAULI_Z, PAULI_Z)


@dataclass(frozen=True)
class MultiplexorSplit:
    """block(a, b) = (I x u) . diag(d, d*) . (I x v)."""

    u: np.ndarray
    d: np.ndarray
    v: np.ndarray

    def reassemble(self) -> np.ndarray:
        z = np.zeros_like(self.u)
        left = np.block([[self.u, z], [z, self.u]])
        right = np.block([[self.v, z], [z, self.v]])
        mid = np.diag(np.concatenate([self.d, self.d.conj()]))
        return left @ mid @ right


def multiplexor_split(a, b) -> MultiplexorSplit:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PreconditionError("multiplexor blocks must be square and of equal size")
    vecs, w = unitary_eig(a @ b.conj().T)
    half = np.angle(w) / 2  # principal root, arguments in (-pi/2, pi/2]
    order = np.argsort(np.round(half, 9), kind="stable")
    u = vecs[:, order]
    d = np.exp(1j * half[order])
    v = np.diag(d.conj()) @ u.conj().T @ a
    return MultiplexorSplit(u, d, v)


# --- two-qubit synthesis ------------------------------------------------------------

def _su4(u):
    u = np.asarray(u, dtype=complex)
    return u / np.linalg.det(u) ** 0.25


def _orthogonal_eig(m2):
    """Real orthogonal P (det 1) with P^T m2 P diagonal for a symmetric unitary m2."""
    re, im = m2.real, m2.imag
    for r in (0.5772156649, 1.6180339887, 2.7182818284, 0.3183098862):
        _, p = np.linalg.eigh(re + r * im)
        diag = p.T @ m2 @ p
        if np.linalg.norm(diag - np.diag(np.diag(diag))) < 1e-9:
            break
    if np.linalg.det(p) < 0:
        p[:, 0] = -p[:, 0]
    return p, np.diag(p.T @ m2 @ p)


def _canonical(u):
    """u (SU(4)) in the magic basis as O1 . diag(d) . O2 with O1, O2 in SO(4)."""
    up = MAGIC.conj().T @ u @ MAGIC
    p, lam = _orthogonal_eig(up.T @ up)
    d = np.exp(1j * np.angle(lam) / 2)
    o1 = up @ p @ np.diag(d.conj())
    if np.linalg.det(o1.real) < 0:
        d[0] = -d[0]
        o1[:, 0] = -o1[:, 0]
    return o1.real, d, p.T


def kak_coefficients(u) -> tuple[float, float, float]:
    """(a, b, c) with u locally equivalent to exp(i(a XX + b YY + c ZZ))."""
    _, d, _ = _canonical(_su4(u))
    # magic basis vectors are joint eigenvectors of XX, YY, ZZ
    signs = np.array([np.real(np.diag(MAGIC.conj().T @ m @ MAGIC)) for m in (XX, YY, ZZ)]).T
    sol = np.linalg.lstsq(np.hstack([signs, np.ones((4, 1))]), np.angle(d), rcond=None)[0]
    return tuple(float(x) for x in sol[:3])


def _kron_factor(k):
    """A, C in SU(2) and a phase with k = phase * kron(A, C)."""
    blocks = [k[2 * i:2 * i + 2, 2 * j:2 * j + 2] for i in range(2) for j in range(2)]
    big = max(blocks, key=np.linalg.norm)
    c = big / np.sqrt(np.linalg.det(big))
    a = np.array([[np.trace(c.conj().T @ k[2 * i:2 * i + 2, 2 * j:2 * j + 2]) / 2
                   for j in range(2)] for i in range(2)])
    ph = np.sqrt(np.linalg.det(a))
    return a / ph, c, ph


def _match_locals(u, t):
    """Local gates with u = phase . L1 . t . L2 when u and t are locally equivalent."""
    o1, du, o2 = _canonical(_su4(u))
    t = _su4(t)
    for cand in (t, 1j * t):
        j1, dt, j2 = _canonical(cand)
        perm = _pairing(du ** 2, dt ** 2)
        if perm is not None:
            break
    else:
        raise PreconditionError("gates are not locally equivalent")
    pi = np.eye(4)[:, perm]
    if np.linalg.det(pi) < 0:
        pi[:, 0] = -pi[:, 0]
    s = (dt[perm] / du).real
    left = o1 @ np.diag(s) @ pi.T @ j1.T
    right = j2.T @ pi @ o2
    return MAGIC @ left @ MAGIC.conj().T, MAGIC @ right @ MAGIC.conj().T


def _pairing(x, y, tol=1e-7):
    """perm with y[perm] == x, or None."""
    perm, used = [], set()
    for xi in x:
        best = None
        for j, yj in enumerate(y):
            if j not in used and abs(xi - yj) < tol and (best is None or abs(xi - yj) < abs(xi - y[best])):
                best = j
        if best is None:
            return None
        used.add(best)
        perm.append(best)
    return perm


def _relabel(c: Circuit, q1, q2) -> Circuit:
    """The same gates on a two-qubit register."""
    remap = {q1: 1, q2: 2}
    out = Circuit(2)
    for g in c.gates:
        if isinstance(g, CNOT):
            out.append(CNOT(remap[g.control], remap[g.target]))
        elif isinstance(g, Rotation):
            out.append(Rotation(g.axis, remap[g.target], g.angle))
        else:
            out.append(type(g)(remap[g.target], g.matrix))
    return out


def three_cnot_template(a: float, b: float, c: float, q1: int = 1, q2: int = 2, n: int = 2) -> Circuit:
    """CNOT, Rz x Ry, CNOT, Ry, CNOT; locally equivalent to exp(i(a XX + b YY + c ZZ))."""
    h = np.pi / 2
    return Circuit(n, [CNOT(q2, q1), Rotation("z", q1, 2 * a + h), Rotation("y", q2, 2 * b + h),
                       CNOT(q1, q2), Rotation("y", q2, -2 * c + h), CNOT(q2, q1)])


def two_cnot_template(x: float, z: float, q1: int = 1, q2: int = 2, n: int = 2) -> Circuit:
    """CNOT, Rx x Rz, CNOT; locally equivalent to exp(i(x XX + z ZZ))."""
    return Circuit(n, [CNOT(q1, q2), Rotation("x", q1, 2 * x), Rotation("z", q2, 2 * z), CNOT(q1, q2)])


def _wrap(core: Circuit, u, q1, q2, n) -> Circuit:
    """Outer local gates around a template, then the global phase."""
    l1, l2 = _match_locals(u, circuit_unitary(_relabel(core, q1, q2)))
    out = Circuit(n)
    for loc in (l2, None, l1):
        if loc is None:
            out.extend(core.gates)
            continue
        a, b, _ = _kron_factor(loc)
        out.add_unitary(q1, a)
        out.add_unitary(q2, b)
    m = circuit_unitary(_relabel(out, q1, q2))
    k = np.argmax(np.abs(m))
    out.global_phase = float(np.angle(np.asarray(u).flat[k] / m.flat[k]))
    return out


def _check4(u):
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4) or not is_unitary(u, 1e-8):
        raise PreconditionError("expected a 4x4 unitary")
    return u


def two_qubit_minimal(u, q1: int = 1, q2: int = 2, n: int = 2) -> Circuit:
    """3 CNOTs, 4 outer one-qubit gates and 3 interior rotations."""
    u = _check4(u)
    a, b, c = kak_coefficients(u)
    return _wrap(three_cnot_template(a, b, c, q1, q2, n), u, q1, q2, n)


def two_qubit_up_to_diagonal(u, q1: int = 1, q2: int = 2, n: int = 2) -> tuple[Circuit, Diagonal]:
    """W with 2 CNOTs and a diagonal D such that D . W = u."""
    u = _check4(u)
    su = _su4(u)
    g = su @ YY @ su.T @ YY
    psi = np.arctan2(-np.trace(g).imag, np.trace(ZZ @ g).real) / 2
    zz = np.exp(1j * psi * np.diag(ZZ).real)
    w = np.diag(zz) @ u
    a, b, c = kak_coefficients(w)
    coeffs = [a, b, c]
    # one coefficient sits on a multiple of pi/2; the 2-CNOT template carries the other two
    off = min(range(3), key=lambda i: abs(np.sin(2 * coeffs[i])))
    x, z = [coeffs[i] for i in range(3) if i != off]
    circ = _wrap(two_cnot_template(x, z, q1, q2, n), w, q1, q2, n)
    return circ, Diagonal((q1, q2), zz.conj())


# --- n-qubit decomposition ------------------------------------------------------------

def _block(a, b):
    z = np.zeros_like(a)
    return np.block([[a, z], [z, b]])


def _plan(u, lo, n, improved, nn, seen):
    """Time-ordered items: ("leaf", 4x4), ("ucr", UCRotation, mirrored), ("core", Circuit).

    Steps on the same target alternate their mirroring so every rotation end
    meets another rotation end on that qubit: (m, u, m) then (u, m, u).
    """
    if n - lo + 1 == 2:
        return [("leaf", u, None)]
    controls = tuple(range(lo + 1, n + 1))
    i = seen.get(lo, 0)
    seen[lo] = i + 1
    if improved:
        flips = (True, None, False)
    else:
        flips = (True, False, True) if i % 2 == 0 else (False, True, False)
    r = cs_decompose(u)
    items = _split(r.u3, r.u4, lo, n, improved, nn, seen, flips[0])
    ry = UCRotation("y", controls, lo, 2 * r.thetas)
    u1, u2 = r.u1, r.u2
    if improved:
        mats = np.array([axis_rotation("y", t) for t in ry.angles])
        gate = UCGate(controls, lo, mats)
        dec = nn_decompose(gate) if nn else decompose_uc_onequbit(gate)
        delta = dec.residual_diagonal.phases.reshape(-1, 2)
        u1 = u1 * delta[:, 0]
        u2 = u2 * delta[:, 1]
        items.append(("core", dec.core, None))
    else:
        items.append(("ucr", ry, flips[1]))
    return items + _split(u1, u2, lo, n, improved, nn, seen, flips[2])


def _split(a, b, lo, n, improved, nn, seen, mirrored):
    s = multiplexor_split(a, b)
    rz = UCRotation("z", tuple(range(lo + 1, n + 1)), lo, 2 * np.angle(s.d))
    return (_plan(s.v, lo + 1, n, improved, nn, seen) + [("ucr", rz, mirrored)]
            + _plan(s.u, lo + 1, n, improved, nn, seen))


def nq_decompose(u, n: int, improved: bool = False, nearest_neighbor: bool = False) -> Circuit:
    """Standard mode: 4^n/2 - 3/2 2^n + 1 CNOTs. Improved mode saves one CNOT per
    y multiplexor by realizing it up to a diagonal that moves into the next block."""
    u = np.asarray(u, dtype=complex)
    if n < 1 or u.shape != (1 << n, 1 << n):
        raise PreconditionError(f"expected a {1 << n}x{1 << n} matrix")
    if not is_unitary(u, 1e-8):
        raise PreconditionError("input is not unitary")
    if n == 1:
        return Circuit(1).add_unitary(1, u)
    items = _plan(u, 1, n, improved, nearest_neighbor, {})
    last_leaf = max(i for i, it in enumerate(items) if it[0] == "leaf")
    circ = Circuit(n)
    pending = np.ones(4, dtype=complex)
    for i, (kind, obj, *flag) in enumerate(items):
        if kind == "leaf":
            m = obj * pending
            if i == last_leaf:
                part = two_qubit_minimal(m, n - 1, n, n)
            else:
                part, diag = two_qubit_up_to_diagonal(m, n - 1, n, n)
                pending = diag.phases
            circ.extend(part.gates)
            circ.global_phase += part.global_phase
        elif kind == "ucr":
            part = nn_decompose(obj) if nearest_neighbor else decompose_uc_rotation(obj, mirrored=flag[0])
            circ.extend(part.gates)
        else:
            circ.extend(obj.gates)
            circ.global_phase += obj.global_phase
    return fuse_one_qubit(circ)
