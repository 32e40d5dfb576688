"""Two-outcome projective qubit measurements and the conditional
decomposition of a two-qubit state they induce.

Outcome 0 of an axis ``a`` is the projector (1 + a.sigma)/2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .linalg import I2, PAULI_STACK
from .states import ZERO_PROB, TwoQubitState

AXIS_TOL = 1e-12
COMPLEMENTARY_TOL = 1e-9


@dataclass(frozen=True)
class MeasurementAxis:
    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(3)
        if abs(np.linalg.norm(a) - 1) > AXIS_TOL:
            raise ValueError(f"measurement axis must be a unit vector, got norm {np.linalg.norm(a)!r}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @classmethod
    def from_vector(cls, v) -> "MeasurementAxis":
        v = np.asarray(v, dtype=float).reshape(3)
        norm = np.linalg.norm(v)
        if not np.isfinite(norm) or norm < 1e-15:
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(v / norm)

    def to_json(self) -> str:
        return json.dumps(self.a.tolist())

    @classmethod
    def from_json(cls, text: str) -> "MeasurementAxis":
        return cls.from_vector(json.loads(text))

    def __neg__(self):
        return MeasurementAxis(-self.a)


X = MeasurementAxis([1.0, 0.0, 0.0])
Y = MeasurementAxis([0.0, 1.0, 0.0])
Z = MeasurementAxis([0.0, 0.0, 1.0])


def projectors(ax: MeasurementAxis):
    """Return (Pi_0, Pi_1) = ((1 + a.sigma)/2, (1 - a.sigma)/2)."""
    asig = np.einsum("k,kab->ab", ax.a, PAULI_STACK)
    return (I2 + asig) / 2, (I2 - asig) / 2


def is_complementary(ax1: MeasurementAxis, ax2: MeasurementAxis, tol: float = COMPLEMENTARY_TOL) -> bool:
    p0, _ = projectors(ax1)
    q0, _ = projectors(ax2)
    return bool(abs(np.trace(p0 @ q0).real - 0.5) <= tol)


def _fix_phase(v):
    for c in v:
        if abs(c) > 1e-12:
            return v * (np.conj(c) / abs(c))
    return v


def axis_basis(ax: MeasurementAxis):
    """Kets |Psi>, |Psi_perp> for outcomes 0 and 1 of ``ax``.

    |Psi> is |V> rotated onto ``ax``; each ket is phased so its first
    nonzero amplitude is real and positive.
    """
    x, y, z = ax.a
    # (1 + z, x + iy) is proportional to (cos t/2, e^{i phi} sin t/2) without arccos round-off
    if z >= 0:
        psi = np.array([1 + z, x + 1j * y], dtype=complex)
    else:
        psi = np.array([x - 1j * y, 1 - z], dtype=complex)
    psi /= np.linalg.norm(psi)
    perp = np.array([-np.conj(psi[1]), np.conj(psi[0])], dtype=complex)
    return _fix_phase(psi), _fix_phase(perp)


@dataclass(frozen=True)
class ConditionalDecomposition:
    """rho_SM = w |Psi><Psi| rho_M + w_perp |Psi_perp><Psi_perp| rho_M_perp
    + sqrt(w w_perp)(|Psi><Psi_perp| chi_M + h.c.)."""

    w: float
    w_perp: float
    rho_M: np.ndarray
    rho_M_perp: np.ndarray
    chi_M: np.ndarray
    psi: np.ndarray
    psi_perp: np.ndarray

    def reconstruct(self) -> np.ndarray:
        pp = np.outer(self.psi, self.psi.conj())
        qq = np.outer(self.psi_perp, self.psi_perp.conj())
        pq = np.outer(self.psi, self.psi_perp.conj())
        coh = np.sqrt(self.w * self.w_perp) * np.kron(pq, self.chi_M)
        return (
            self.w * np.kron(pp, self.rho_M)
            + self.w_perp * np.kron(qq, self.rho_M_perp)
            + coh
            + coh.conj().T
        )

    def weighted_difference(self) -> np.ndarray:
        """w rho_M - w_perp rho_M_perp, the operator whose trace norm gives the distinguishability."""
        return self.w * self.rho_M - self.w_perp * self.rho_M_perp


def _block(rho4, bra, ket):
    """<bra|_S rho |ket>_S as a 2x2 operator on M."""
    r = rho4.reshape(2, 2, 2, 2)
    return np.einsum("s,smtn,t->mn", bra.conj(), r, ket)


def decompose(s: TwoQubitState, pi_S: MeasurementAxis) -> ConditionalDecomposition:
    psi, perp = axis_basis(pi_S)
    a = _block(s.rho, psi, psi)
    b = _block(s.rho, perp, perp)
    off = _block(s.rho, psi, perp)
    w = float(np.trace(a).real)
    w_perp = float(np.trace(b).real)
    w, w_perp = max(w, 0.0), max(w_perp, 0.0)
    total = w + w_perp
    w, w_perp = w / total, w_perp / total
    zero = np.zeros((2, 2), dtype=complex)
    rho_M = a / w if w > ZERO_PROB else zero
    rho_M_perp = b / w_perp if w_perp > ZERO_PROB else zero
    if w > ZERO_PROB and w_perp > ZERO_PROB:
        chi = off / np.sqrt(w * w_perp)
    else:
        chi = zero
    return ConditionalDecomposition(w, w_perp, rho_M, rho_M_perp, chi, psi, perp)


@dataclass(frozen=True)
class OutcomeStatistics:
    """Per meter-outcome quantities, each an array indexed by outcome i in {0, 1}.

    ``resolved[i]`` is False for outcomes with pi_i <= 1e-14; their
    posterior weights are set to zero and they drop out of knowledge sums.
    """

    pi: np.ndarray
    p: np.ndarray
    p_perp: np.ndarray
    c: np.ndarray
    w: np.ndarray
    w_perp: np.ndarray
    resolved: np.ndarray


def outcome_statistics(d: ConditionalDecomposition, pi_M: MeasurementAxis) -> OutcomeStatistics:
    projs = projectors(pi_M)
    p = np.array([np.trace(P @ d.rho_M).real for P in projs])
    p_perp = np.array([np.trace(P @ d.rho_M_perp).real for P in projs])
    c = np.array([np.trace(P @ d.chi_M) for P in projs])
    pi = d.w * p + d.w_perp * p_perp
    resolved = pi > ZERO_PROB
    safe = np.where(resolved, pi, 1.0)
    w_i = np.where(resolved, d.w * p / safe, 0.0)
    w_i_perp = np.where(resolved, d.w_perp * p_perp / safe, 0.0)
    return OutcomeStatistics(pi, p, p_perp, c, w_i, w_i_perp, resolved)
