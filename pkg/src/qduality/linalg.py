"""Small dense linear algebra for 2x2, 3x3 and 4x4 operators.

Everything here works on plain numpy arrays. Two-qubit operators are
ordered with the S factor first, so ``kron(a, b)`` acts as ``a`` on S and
``b`` on M.
"""
import numpy as np
from scipy.spatial.transform import Rotation

from .errors import NonHermitian, NotUnitary

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)
# (3, 2, 2) stack, convenient for einsum over Bloch components
PAULI_STACK = np.stack(PAULIS)


def _square(a, n=None):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ValueError(f"expected a {n}x{n} matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def tensor_product(a, b):
    """Kronecker product of two 2x2 matrices, S factor first."""
    return np.kron(_square(a, 2), _square(b, 2))


def partial_trace(rho, subsystem):
    """Trace out ``subsystem`` ("S" or "M") of a 4x4 operator.

    Returns the reduced 2x2 operator of the *other* qubit.
    """
    r = _square(rho, 4).reshape(2, 2, 2, 2)  # (s, m, s', m')
    if subsystem == "M":
        return np.einsum("ijkj->ik", r)
    if subsystem == "S":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"subsystem must be 'S' or 'M', got {subsystem!r}")


def symmetrize(h, tol=HERMITIAN_TOL):
    """Return (h + h^dagger)/2, raising if h is further than ``tol`` from Hermitian."""
    h = _square(h)
    asym = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if asym > tol:
        raise NonHermitian(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    return (h + h.conj().T) / 2


def hermitian_eigen(h, tol=HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with real eigenvalues sorted in
    descending order and eigenvectors as the matching columns.
    """
    h = symmetrize(h, tol)
    vals, vecs = np.linalg.eigh(h)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def trace_norm(a):
    """Sum of singular values, Tr sqrt(A^dagger A)."""
    return float(np.sum(np.linalg.svd(_square(a), compute_uv=False)))


def svd3(t):
    """Signed SVD of a real 3x3 matrix with both factors in SO(3).

    Returns ``(o_left, d, o_right)`` with ``t = o_left @ diag(d) @ o_right.T``.
    ``|d|`` is sorted descending; any reflection is absorbed as a sign in
    the smallest diagonal entry.
    """
    t = np.asarray(_square(t, 3), dtype=float)
    u, s, vt = np.linalg.svd(t)
    v = vt.T
    d = s.copy()
    if np.linalg.det(u) < 0:
        u[:, 2] *= -1
        d[2] *= -1
    if np.linalg.det(v) < 0:
        v[:, 2] *= -1
        d[2] *= -1
    return u, d, v


def is_unitary(u, tol=UNITARY_TOL):
    u = _square(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def su2_to_so3(u):
    """Rotation O with u (x.sigma) u^dagger = (O x).sigma."""
    u = _square(u, 2)
    if not is_unitary(u):
        raise NotUnitary("operator is not unitary")
    # O_kj = Tr[sigma_k u sigma_j u^dagger] / 2
    conj = np.einsum("ab,jbc,dc->jad", u, PAULI_STACK, u.conj())
    return np.einsum("kda,jad->kj", PAULI_STACK, conj).real / 2


def so3_to_su2(o):
    """Lift a proper rotation to SU(2), picking the rotation angle in [0, pi]."""
    o = np.asarray(_square(o, 3), dtype=float)
    if np.max(np.abs(o.T @ o - np.eye(3))) > 1e-8 or np.linalg.det(o) < 0:
        raise ValueError("not a proper rotation")
    rotvec = Rotation.from_matrix(o).as_rotvec()
    angle = np.linalg.norm(rotvec)
    if angle < 1e-15:
        return I2.copy()
    axis = rotvec / angle
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * np.einsum("k,kab->ab", axis, PAULI_STACK)
