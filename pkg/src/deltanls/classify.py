"""Region classification of initial data: scattering side, blow-up side, or
above the usable threshold.

Below the threshold the sign of the virial functional P decides the side; the
Nehari functional and every admissible scaling-pair functional carry the same
sign there, which the consistency checks in this module verify empirically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functionals import ScalingPair, evaluate, k_functional, sigma
from .grid import GridFunction, Params, reflect
from .groundstate import free_state_constants, threshold_n, threshold_r

__all__ = [
    "SCATTER_PLUS",
    "BLOWUP_MINUS",
    "ABOVE_THRESHOLD",
    "SymmetryError",
    "ClassificationResult",
    "SignEquivalenceReport",
    "PGapReport",
    "classify_fixed_omega",
    "optimal_omega",
    "classify_frequency_free",
    "sign_equivalence_check",
    "p_gap_check",
    "is_even",
]

SCATTER_PLUS = "scatter_plus"
BLOWUP_MINUS = "blowup_minus"
ABOVE_THRESHOLD = "above_threshold"

# |P| at or below this fraction of the calH norm counts as P >= 0: the
# scattering region includes its P = 0 boundary.
TIE_TOLERANCE = 1e-10
EVENNESS_TOLERANCE = 1e-10


class SymmetryError(ValueError):
    """Radial classification requested for data that is not even."""


def is_even(f: GridFunction, tol: float = EVENNESS_TOLERANCE) -> bool:
    return float(np.max(np.abs(f.values - reflect(f).values))) <= tol


def _sign_class(value: float, scale_sq: float) -> int:
    """+1 for '>= 0' (including ties within tolerance), -1 for '< 0'."""
    return 1 if value >= -TIE_TOLERANCE * max(scale_sq, 1e-300) else -1


@dataclass(frozen=True)
class ClassificationResult:
    region: str
    mode: str  # "fixed_omega" | "radial" | "frequency_free"
    omega: float | None
    threshold_used: float
    value: float  # action (fixed modes) or mass-energy product (frequency-free)
    margin: float  # threshold - value
    p_sign: int
    i_sign: int
    p_value: float
    i_value: float

    def to_dict(self) -> dict:
        return {
            "region": self.region,
            "mode": self.mode,
            "omega": self.omega,
            "threshold_used": self.threshold_used,
            "value": self.value,
            "margin": self.margin,
            "p_sign": self.p_sign,
            "i_sign": self.i_sign,
            "p_value": self.p_value,
            "i_value": self.i_value,
        }


def classify_fixed_omega(
    f: GridFunction, params: Params, radial: bool = False
) -> ClassificationResult:
    """Place f relative to the fixed-frequency threshold (radial uses the larger one)."""
    omega = params.require_omega()
    if radial and not is_even(f):
        raise SymmetryError("radial classification needs even data (max |f - Rf| > 1e-10)")
    rep = evaluate(f, params)
    if radial:
        threshold = threshold_r(omega, params.gamma, params.p)
    else:
        threshold = threshold_n(omega, params.gamma, params.p)
    p_sign = _sign_class(rep.virial, rep.calh_norm_sq)
    i_sign = _sign_class(rep.nehari, rep.calh_norm_sq)
    if rep.action < threshold:
        region = SCATTER_PLUS if p_sign >= 0 else BLOWUP_MINUS
    else:
        region = ABOVE_THRESHOLD
    return ClassificationResult(
        region=region,
        mode="radial" if radial else "fixed_omega",
        omega=omega,
        threshold_used=threshold,
        value=rep.action,
        margin=threshold - rep.action,
        p_sign=p_sign,
        i_sign=i_sign,
        p_value=rep.virial,
        i_value=rep.nehari,
    )


def optimal_omega(f: GridFunction, params: Params) -> float:
    """Frequency maximizing the gap between the free threshold and the action of f."""
    rep = evaluate(f, params.with_omega(1.0))
    if rep.mass <= 0:
        raise ValueError("optimal_omega needs f != 0")
    p = params.p
    kappa = (p + 3.0) / (2.0 * (p - 1.0))
    l1 = free_state_constants(p)["l1"]
    return float((rep.mass / (kappa * l1)) ** (-2.0 * (p - 1.0) / (p - 5.0)))


def classify_frequency_free(f: GridFunction, params: Params) -> ClassificationResult:
    """Frequency-independent criterion: compare E(f) M(f)^sigma with the
    free-soliton value. Equivalent to being below the fixed threshold at the
    optimal frequency."""
    p = params.p
    rep = evaluate(f, params.with_omega(1.0))  # omega only enters S/I, not E, M, P
    s = sigma(p)
    value = rep.energy * rep.mass**s
    threshold = free_state_constants(p)["em_sigma"]
    p_sign = _sign_class(rep.virial, rep.calh_norm_sq)
    i_sign = _sign_class(rep.nehari, rep.calh_norm_sq)
    region = (
        (SCATTER_PLUS if p_sign >= 0 else BLOWUP_MINUS)
        if value < threshold
        else ABOVE_THRESHOLD
    )
    return ClassificationResult(
        region=region,
        mode="frequency_free",
        omega=None,
        threshold_used=threshold,
        value=value,
        margin=threshold - value,
        p_sign=p_sign,
        i_sign=i_sign,
        p_value=rep.virial,
        i_value=rep.nehari,
    )


@dataclass(frozen=True)
class SignEquivalenceReport:
    checked: bool  # False when the action is not below the threshold
    m_omega: float
    action: float
    pairs: tuple[tuple[float, float], ...]
    k_values: tuple[float, ...]
    sign_classes: tuple[int, ...]
    all_agree: bool


def sign_equivalence_check(
    f: GridFunction,
    params: Params,
    sp_list: list[ScalingPair],
    radial: bool = False,
) -> SignEquivalenceReport:
    """Below the threshold, every admissible scaling-pair functional must carry
    the same sign class; data at or above the threshold is skipped."""
    omega = params.require_omega()
    rep = evaluate(f, params)
    m_omega = (
        threshold_r(omega, params.gamma, params.p)
        if radial
        else threshold_n(omega, params.gamma, params.p)
    )
    pairs = tuple((sp.alpha, sp.beta) for sp in sp_list)
    if not rep.action < m_omega:
        return SignEquivalenceReport(False, m_omega, rep.action, pairs, (), (), True)
    ks = tuple(k_functional(f, params, sp) for sp in sp_list)
    signs = tuple(_sign_class(k, rep.calh_norm_sq) for k in ks)
    return SignEquivalenceReport(
        True, m_omega, rep.action, pairs, ks, signs, len(set(signs)) <= 1
    )


@dataclass(frozen=True)
class PGapReport:
    checked: bool
    m_omega: float
    action: float
    p_value: float
    calh_norm_sq: float
    gradient_part: float  # (1/2)||d_x f||^2 - (gamma/2)|f(0)|^2
    gap: float  # m_omega - action
    delta_declared: float
    ok_declared: bool  # bound with the full calH norm
    ok_gradient_form: bool  # bound with the translation-invariant part
    empirical_delta: float | None  # P / ||f||_calH^2, recorded on a declared miss

    def ok_at(self, delta: float) -> bool:
        if not self.checked:
            return True
        lower = min(2.0 * self.gap, delta * self.calh_norm_sq)
        return self.p_value >= lower or self.p_value <= -2.0 * self.gap


def p_gap_check(f: GridFunction, params: Params, radial: bool = False) -> PGapReport:
    """Quantitative dichotomy below the threshold, delta = (p-5)/(p+3).

    Two variants are evaluated. The declared one bounds P from below by
    min{2(m - S), delta ||f||_calH^2} (or P <= -2(m - S)); wide flat states
    with S < m violate it for any fixed delta, because the calH norm carries
    the omega ||f||^2 term that P lacks. The provable variant replaces the
    calH norm by its translation-invariant part (1/2)||d_x f||^2 -
    (gamma/2)|f(0)|^2: in the case 4P >= (p-5)/(2(p+1)) L[||f||_{p+1}^{p+1}]
    one gets P >= delta (that part) outright, and otherwise the action-gap
    branch applies. A declared miss records the empirical ratio instead of
    failing hard.
    """
    omega = params.require_omega()
    rep = evaluate(f, params)
    m_omega = (
        threshold_r(omega, params.gamma, params.p)
        if radial
        else threshold_n(omega, params.gamma, params.p)
    )
    delta = (params.p - 5.0) / (params.p + 3.0)
    grad_part = rep.h_norm_sq - 0.5 * (-params.gamma) * rep.center_value_sq
    if not rep.action < m_omega:
        return PGapReport(
            False, m_omega, rep.action, rep.virial, rep.calh_norm_sq, grad_part,
            math.nan, delta, True, True, None,
        )
    gap = m_omega - rep.action
    ok = rep.virial >= min(2.0 * gap, delta * rep.calh_norm_sq) or (
        rep.virial <= -2.0 * gap
    )
    ok_grad = rep.virial >= min(2.0 * gap, delta * grad_part) or (
        rep.virial <= -2.0 * gap
    )
    empirical = None if ok else rep.virial / rep.calh_norm_sq
    return PGapReport(
        True, m_omega, rep.action, rep.virial, rep.calh_norm_sq, grad_part,
        gap, delta, ok, ok_grad, empirical,
    )
