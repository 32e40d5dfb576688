"""Two-qubit states, their Bloch/correlation-tensor form, and local operations.

Basis order is |VV>, |VH>, |HV>, |HH> with the S qubit first, where |V> and
|H> are the +1 and -1 eigenvectors of sigma_z.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter, BadProbabilities, NotDensityMatrix, NotUnitary, ZeroProbability
from .linalg import (
    I2,
    PAULI_STACK,
    hermitian_eigen,
    is_unitary,
    partial_trace,
    su2_to_so3,
    symmetrize,
)

TRACE_TOL = 1e-10
NEG_EIG_TOL = 1e-10
BLOCH_TOL = 1e-9
FILTER_TOL = 1e-10
ZERO_PROB = 1e-14

KET_V = np.array([1, 0], dtype=complex)
KET_H = np.array([0, 1], dtype=complex)

_s2 = np.sqrt(0.5)
PSI_MINUS = np.array([0, _s2, -_s2, 0], dtype=complex)
PHI_MINUS = np.array([_s2, 0, 0, -_s2], dtype=complex)
PSI_PLUS = np.array([0, _s2, _s2, 0], dtype=complex)
PHI_PLUS = np.array([_s2, 0, 0, _s2], dtype=complex)
# ordering used by bell_mixture weights p1..p4
BELL_BASIS = (PSI_MINUS, PHI_MINUS, PSI_PLUS, PHI_PLUS)

# sigma_k (x) 1, 1 (x) sigma_l and sigma_k (x) sigma_l, precomputed
_S_OPS = np.stack([np.kron(p, I2) for p in PAULI_STACK])
_M_OPS = np.stack([np.kron(I2, p) for p in PAULI_STACK])
_SM_OPS = np.stack([[np.kron(a, b) for b in PAULI_STACK] for a in PAULI_STACK])


@dataclass(frozen=True)
class TwoQubitState:
    """A validated 4x4 density matrix. Build it through :func:`validate`."""

    rho: np.ndarray = field(repr=False)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    @property
    def rank(self) -> int:
        return int(np.sum(np.linalg.eigvalsh(self.rho) > 1e-9))

    def marginal(self, qubit: str) -> np.ndarray:
        """Reduced state of ``qubit`` ("S" or "M")."""
        return partial_trace(self.rho, "M" if qubit == "S" else "S")

    def fidelity_with(self, ket) -> float:
        ket = np.asarray(ket, dtype=complex)
        return float(np.real(ket.conj() @ self.rho @ ket))


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors ``n`` (qubit S), ``m`` (qubit M) and correlations ``T``."""

    n: np.ndarray
    m: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float).reshape(3)
        m = np.asarray(self.m, dtype=float).reshape(3)
        T = np.asarray(self.T, dtype=float).reshape(3, 3)
        if np.linalg.norm(n) > 1 + BLOCH_TOL or np.linalg.norm(m) > 1 + BLOCH_TOL:
            raise NotDensityMatrix("local Bloch vector longer than 1")
        if np.max(np.abs(T)) > 1 + BLOCH_TOL:
            raise NotDensityMatrix("correlation entry outside [-1, 1]")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "T", T)


@dataclass(frozen=True)
class LocalFilter:
    """Local filtering operator with f^dagger f <= 1."""

    f: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=complex).reshape(2, 2)
        top = np.linalg.eigvalsh(f.conj().T @ f)[-1]
        if top > 1 + FILTER_TOL:
            raise BadParameter(f"filter is not trace non-increasing (largest f'f eigenvalue {top:.6g})")
        object.__setattr__(self, "f", f)

    @classmethod
    def identity(cls) -> "LocalFilter":
        return cls(I2.copy())

    @classmethod
    def rescaled(cls, f) -> "LocalFilter":
        """Scale an arbitrary nonzero operator to unit largest singular value."""
        f = np.asarray(f, dtype=complex)
        top = np.linalg.norm(f, 2)
        if top == 0:
            raise BadParameter("cannot rescale the zero operator")
        return cls(f / top)


def validate(rho) -> TwoQubitState:
    """Check ``rho`` is a density matrix and wrap it.

    Eigenvalues in [-1e-10, 0) are clamped to zero and the result is
    renormalized.
    """
    rho = np.array(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise NotDensityMatrix(f"expected a 4x4 matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise NotDensityMatrix("matrix has non-finite entries")
    try:
        rho = symmetrize(rho)
    except ValueError as exc:
        raise NotDensityMatrix(str(exc)) from exc
    tr = np.trace(rho).real
    if abs(tr - 1) > TRACE_TOL:
        raise NotDensityMatrix(f"trace is {tr!r}, not 1")
    vals, vecs = hermitian_eigen(rho)
    if vals[-1] < -NEG_EIG_TOL:
        raise NotDensityMatrix(f"negative eigenvalue {vals[-1]:.3e}")
    if vals[-1] < 0:
        vals = np.clip(vals, 0, None)
        rho = (vecs * vals) @ vecs.conj().T
        rho = rho / np.trace(rho).real
        rho = (rho + rho.conj().T) / 2
    rho.setflags(write=False)
    return TwoQubitState(rho)


def bloch_decompose(s: TwoQubitState) -> BlochForm:
    rho = s.rho
    n = np.einsum("kab,ba->k", _S_OPS, rho).real
    m = np.einsum("kab,ba->k", _M_OPS, rho).real
    T = np.einsum("klab,ba->kl", _SM_OPS, rho).real
    return BlochForm(n, m, T)


def bloch_compose(b: BlochForm) -> TwoQubitState:
    """Rebuild the density matrix (1 + n.s x 1 + 1 x m.s + t_kl s_k x s_l)/4."""
    rho = (
        np.eye(4, dtype=complex)
        + np.einsum("k,kab->ab", b.n, _S_OPS)
        + np.einsum("k,kab->ab", b.m, _M_OPS)
        + np.einsum("kl,klab->ab", b.T, _SM_OPS)
    ) / 4
    return validate(rho)


def _projector(ket):
    return np.outer(ket, ket.conj())


def bell_mixture(p1, p2, p3, p4) -> TwoQubitState:
    """p1 |Psi-><Psi-| + p2 |Phi-><Phi-| + p3 |Psi+><Psi+| + p4 |Phi+><Phi+|."""
    p = np.array([p1, p2, p3, p4], dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
        raise BadProbabilities(f"Bell weights must be nonnegative and sum to 1, got {p.tolist()}")
    rho = sum(pk * _projector(b) for pk, b in zip(p, BELL_BASIS))
    return validate(rho)


def bell_weights(s: TwoQubitState) -> np.ndarray:
    """Populations of the four Bell states, in bell_mixture order."""
    return np.array([s.fidelity_with(b) for b in BELL_BASIS])


def _unit_interval(name, x):
    if not (np.isfinite(x) and 0 <= x <= 1):
        raise BadParameter(f"{name} must lie in [0, 1], got {x!r}")
    return float(x)


def depolarized_weights(R1, R2) -> np.ndarray:
    R1 = _unit_interval("R1", R1)
    R2 = _unit_interval("R2", R2)
    return np.array([
        (1 + R2) * (1 + R1),
        (1 + R2) * (1 - R1),
        (1 - R2) * (1 + R1),
        (1 - R2) * (1 - R1),
    ]) / 4


def depolarized_state(R1, R2) -> TwoQubitState:
    """Singlet after a random V/H flip (prob (1-R1)/2) and a random pi phase (prob (1-R2)/2) on M."""
    return bell_mixture(*depolarized_weights(R1, R2))


def werner(R) -> TwoQubitState:
    R = _unit_interval("R", R)
    return validate(R * _projector(PSI_MINUS) + (1 - R) / 4 * np.eye(4))


def pure_schmidt(lam) -> TwoQubitState:
    """sqrt(lam)|VH> - sqrt(1-lam)|HV>."""
    lam = _unit_interval("schmidt weight", lam)
    ket = np.array([0, np.sqrt(lam), -np.sqrt(1 - lam), 0], dtype=complex)
    return validate(_projector(ket))


def product_state(rho_s, rho_m) -> TwoQubitState:
    return validate(np.kron(rho_s, rho_m))


def random_state(rng_seed, rank: int = 4) -> TwoQubitState:
    """Ginibre-induced random state G G^dagger / Tr(G G^dagger), G of shape 4 x rank.

    ``rng_seed`` may be anything accepted by ``numpy.random.default_rng``,
    including an existing Generator.
    """
    if rank not in (1, 2, 3, 4):
        raise BadParameter(f"rank must be 1..4, got {rank!r}")
    rng = np.random.default_rng(rng_seed)
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    rho = g @ g.conj().T
    return validate(rho / np.trace(rho).real)


def apply_local_unitary(s: TwoQubitState, u_S, u_M) -> TwoQubitState:
    u_S = np.asarray(u_S, dtype=complex)
    u_M = np.asarray(u_M, dtype=complex)
    if not (is_unitary(u_S) and is_unitary(u_M)):
        raise NotUnitary("local operation is not unitary")
    u = np.kron(u_S, u_M)
    return validate(u @ s.rho @ u.conj().T)


def correlation_rotation(u) -> np.ndarray:
    """SO(3) image of a qubit unitary; T transforms as O_S T O_M^T."""
    return su2_to_so3(u)


def apply_local_filter(s: TwoQubitState, f_S: LocalFilter, f_M: LocalFilter):
    """Apply F_S (x) F_M and renormalize. Returns ``(state, success_prob)``."""
    f = np.kron(f_S.f, f_M.f)
    out = f @ s.rho @ f.conj().T
    prob = float(np.trace(out).real)
    if prob < ZERO_PROB:
        raise ZeroProbability(f"filter success probability {prob:.3e} is effectively zero")
    return validate(out / prob), prob


def state_to_dict(s: TwoQubitState) -> dict:
    return {"re": s.rho.real.tolist(), "im": s.rho.imag.tolist()}


def state_from_dict(d) -> TwoQubitState:
    try:
        rho = np.array(d["re"], dtype=float) + 1j * np.array(d["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise NotDensityMatrix(f"malformed state object: {exc}") from exc
    return validate(rho)


def dumps_state(s: TwoQubitState) -> str:
    return json.dumps(state_to_dict(s))


def loads_state(text: str) -> TwoQubitState:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotDensityMatrix(f"state file is not valid JSON: {exc}") from exc
    return state_from_dict(d)
