"""Maximal Bell factor, local-unitary normal form of the correlation
matrix, and Euler-rotation bounds on the distinguishability excesses."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadOrdering, BadParameter
from .linalg import so3_to_su2, svd3
from .states import TwoQubitState, bloch_decompose

# maps singular direction 0 -> z, 1 -> x, 2 -> y so the dominant correlation
# lands in the 33 slot and the runner-up in the 11 slot
_SLOT_PERM = np.array([
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0],
])


def bell_max(s: TwoQubitState) -> float:
    """Maximal CHSH factor 2 sqrt(u1 + u2), u1 >= u2 the top eigenvalues of T^T T."""
    T = bloch_decompose(s).T
    u = np.sort(np.linalg.eigvalsh(T.T @ T))[::-1]
    return float(2 * np.sqrt(max(u[0] + u[1], 0.0)))


def violates_bell(s: TwoQubitState, tol: float = 1e-12) -> bool:
    return bell_max(s) > 2 + tol


def is_entangled(s: TwoQubitState, tol: float = 1e-12) -> bool:
    """Peres-Horodecki test (exact for two qubits)."""
    r = s.rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return bool(np.linalg.eigvalsh((r + r.conj().T) / 2)[0] < -tol)


@dataclass(frozen=True)
class NormalForm:
    """Diagonal correlation matrix reachable by local unitaries.

    ``tbar`` is ``(t33, t11, t22)`` with |t33| >= |t11| >= |t22|; after
    applying ``(u_S, u_M)`` the correlation matrix is
    ``diag(t11, t22, t33)`` and the local Bloch vectors are ``nbar``, ``mbar``.
    """

    tbar: np.ndarray
    nbar: np.ndarray
    mbar: np.ndarray
    u_S: np.ndarray
    u_M: np.ndarray
    o_S: np.ndarray
    o_M: np.ndarray

    @property
    def diagonal(self) -> np.ndarray:
        """Diagonal of the transformed T in natural (x, y, z) order."""
        t33, t11, t22 = self.tbar
        return np.array([t11, t22, t33])


def normal_form(s: TwoQubitState) -> NormalForm:
    b = bloch_decompose(s)
    o_left, d, o_right = svd3(b.T)
    o_S = _SLOT_PERM @ o_left.T
    o_M = _SLOT_PERM @ o_right.T
    return NormalForm(
        tbar=np.array(d),
        nbar=o_S @ b.n,
        mbar=o_M @ b.m,
        u_S=so3_to_su2(o_S),
        u_M=so3_to_su2(o_M),
        o_S=o_S,
        o_M=o_M,
    )


@dataclass(frozen=True)
class EulerAngles:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        two_pi = 2 * np.pi
        if not (0 <= self.alpha < two_pi and 0 <= self.beta < np.pi and 0 <= self.gamma < two_pi):
            raise BadParameter(f"Euler angles out of range: {self}")

    @classmethod
    def random(cls, rng) -> "EulerAngles":
        rng = np.random.default_rng(rng)
        return cls(rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))


def euler_rotation(e: EulerAngles) -> np.ndarray:
    ca, sa = np.cos(e.alpha), np.sin(e.alpha)
    cb, sb = np.cos(e.beta), np.sin(e.beta)
    cg, sg = np.cos(e.gamma), np.sin(e.gamma)
    return np.array([
        [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
        [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
        [-sb * cg, sb * sg, cb],
    ])


def rotated_excess_bounds(tbar, e: EulerAngles):
    """Upper bounds on the squared distinguishability excesses after rotating S.

    For a state whose correlation matrix is ``O(e) @ diag(t11, t22, t33)``
    (``tbar = (t33, t11, t22)``, |t33| dominant), returns
    ``(bound_z, bound_perp)``: the bound for measuring S along z, and for the
    complementary axis tied to the larger of |t11|, |t22|: x when
    t11^2 >= t22^2, otherwise y. Each bound is the squared norm of the
    corresponding row of the rotated correlation matrix.
    """
    t33, t11, t22 = (float(x) for x in tbar)
    if t33**2 < t11**2 or t33**2 < t22**2:
        raise BadOrdering("|t33| must dominate |t11| and |t22|")
    ca, sa = np.cos(e.alpha), np.sin(e.alpha)
    cb, sb = np.cos(e.beta), np.sin(e.beta)
    cg, sg = np.cos(e.gamma), np.sin(e.gamma)
    bound_z = t33**2 * cb**2 + sb**2 * (t11**2 * cg**2 + t22**2 * sg**2)
    if t11**2 >= t22**2:
        bound_perp = (
            t11**2 * (ca * cb * cg - sa * sg) ** 2
            + t22**2 * (ca * cb * sg + sa * cg) ** 2
            + t33**2 * ca**2 * sb**2
        )
    else:
        bound_perp = (
            t11**2 * (sa * cb * cg + ca * sg) ** 2
            + t22**2 * (-sa * cb * sg + ca * cg) ** 2
            + t33**2 * sa**2 * sb**2
        )
    return float(bound_z), float(bound_perp)


def complementary_slot(tbar) -> int:
    """Index (0 = x, 1 = y) of the complementary S axis used by :func:`rotated_excess_bounds`."""
    _, t11, t22 = tbar
    return 0 if t11**2 >= t22**2 else 1
