"""A priori knowledge, knowledge, knowledge excess and distinguishability excess.

Knowledge is the fractional excess of right over wrong guesses about the
outcome of a measurement on S. The meter measurement on M splits the
ensemble into sub-ensembles; in each one we guess the more likely S
outcome.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import PAULI_STACK, trace_norm
from .measurement import MeasurementAxis, Z, decompose, outcome_statistics
from .states import ZERO_PROB, TwoQubitState, bloch_decompose

ZERO_CORRELATION = 1e-12


@dataclass(frozen=True)
class KnowledgeResult:
    apriori: float
    knowledge: float

    @property
    def excess(self) -> float:
        return self.knowledge - self.apriori


def apriori_knowledge(s: TwoQubitState, pi_S: MeasurementAxis) -> float:
    d = decompose(s, pi_S)
    return abs(d.w - d.w_perp)


def knowledge(s: TwoQubitState, pi_M: MeasurementAxis, pi_S: MeasurementAxis) -> KnowledgeResult:
    """Knowledge about ``pi_S`` gained from the meter measurement ``pi_M``.

    K = sum_i pi_i |w_i - w_i_perp| over outcomes with nonzero probability.
    """
    d = decompose(s, pi_S)
    st = outcome_statistics(d, pi_M)
    k = float(np.sum(np.where(st.resolved, st.pi * np.abs(st.w - st.w_perp), 0.0)))
    return KnowledgeResult(apriori=abs(d.w - d.w_perp), knowledge=k)


def knowledge_excess(s, pi_M, pi_S) -> float:
    return knowledge(s, pi_M, pi_S).excess


def _excess_parts(s: TwoQubitState, pi_S: MeasurementAxis):
    b = bloch_decompose(s)
    bias = float(b.n @ pi_S.a)
    corr = b.T.T @ pi_S.a
    return bias, corr


def distinguishability_excess(s: TwoQubitState, pi_S: MeasurementAxis) -> float:
    """Largest knowledge excess about ``pi_S`` over all meter measurements.

    Closed form max(|n.a|, |T^T a|) - |n.a|, obtained from the Bloch form of
    w rho_M - w_perp rho_M_perp = ((n.a) 1 + (T^T a).sigma)/2.
    """
    bias, corr = _excess_parts(s, pi_S)
    return max(abs(bias), float(np.linalg.norm(corr))) - abs(bias)


def distinguishability_excess_trace_norm(s: TwoQubitState, pi_S: MeasurementAxis) -> float:
    """Same quantity evaluated literally as Tr|w rho_M - w_perp rho_M_perp| - |w - w_perp|."""
    d = decompose(s, pi_S)
    return trace_norm(d.weighted_difference()) - abs(d.w - d.w_perp)


def optimal_meter_axis(s: TwoQubitState, pi_S: MeasurementAxis) -> MeasurementAxis:
    """Meter axis attaining the distinguishability excess.

    When no meter measurement helps (|T^T a| <= |n.a|) every axis gives
    zero excess and the z axis is returned.
    """
    bias, corr = _excess_parts(s, pi_S)
    norm = float(np.linalg.norm(corr))
    if norm < ZERO_CORRELATION or norm <= abs(bias):
        return Z
    return MeasurementAxis(corr / norm)


# --- brute-force oracles -------------------------------------------------


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z * z)
    phi = np.pi * (1 + np.sqrt(5)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def cone(center, half_angle: float, n: int) -> np.ndarray:
    """``n`` unit vectors spread over the spherical cap of ``half_angle`` around ``center``."""
    center = np.asarray(center, dtype=float)
    center = center / np.linalg.norm(center)
    i = np.arange(n) + 0.5
    cos_t = 1 - (1 - np.cos(half_angle)) * i / n
    sin_t = np.sqrt(1 - cos_t**2)
    phi = np.pi * (1 + np.sqrt(5)) * i
    helper = np.array([1.0, 0, 0]) if abs(center[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = np.cross(center, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(center, e1)
    pts = (
        cos_t[:, None] * center
        + (sin_t * np.cos(phi))[:, None] * e1
        + (sin_t * np.sin(phi))[:, None] * e2
    )
    return np.vstack([center, pts])


def excess_over_axes(s: TwoQubitState, pi_S: MeasurementAxis, axes: np.ndarray) -> np.ndarray:
    """Knowledge excess for each meter axis (rows of ``axes``), via the outcome-statistics route.

    Vectorized equivalent of ``knowledge(s, b, pi_S).excess`` for many b.
    """
    d = decompose(s, pi_S)
    axes = np.asarray(axes, dtype=float)
    bsig = np.einsum("nk,kab->nab", axes, PAULI_STACK)
    total = 0.0
    for sign in (1, -1):
        proj = (np.eye(2) + sign * bsig) / 2
        p = np.einsum("nab,ba->n", proj, d.rho_M).real
        q = np.einsum("nab,ba->n", proj, d.rho_M_perp).real
        # pi_i |w_i - w_i_perp| = |w p_i - w_perp p_i_perp|
        pi = d.w * p + d.w_perp * q
        total = total + np.where(pi > ZERO_PROB, np.abs(d.w * p - d.w_perp * q), 0.0)
    return total - abs(d.w - d.w_perp)


def grid_search_distinguishability(
    s: TwoQubitState,
    pi_S: MeasurementAxis,
    n_grid: int = 2000,
    refine=((np.radians(4.0), 100), (np.radians(1.0), 100)),
):
    """Maximize the knowledge excess over meter axes by brute force.

    A Fibonacci sphere of ``n_grid`` points, then one cone refinement per
    ``(half_angle, n_points)`` entry of ``refine`` around the running best.
    Returns ``(best_excess, best_axis)``.
    """
    pts = fibonacci_sphere(n_grid)
    vals = excess_over_axes(s, pi_S, pts)
    k = int(np.argmax(vals))
    best_val, best_axis = float(vals[k]), pts[k]
    for half_angle, n in refine:
        pts = cone(best_axis, half_angle, n)
        vals = excess_over_axes(s, pi_S, pts)
        k = int(np.argmax(vals))
        if vals[k] >= best_val:
            best_val, best_axis = float(vals[k]), pts[k]
    return best_val, MeasurementAxis.from_vector(best_axis)
