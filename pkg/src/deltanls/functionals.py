"""Conserved and variational functionals, the two-parameter scaling transform,
and the derivative of the action along the scaling flow.

All reported quantities reduce to four discrete integrals: ||d_x f||^2,
||f||^2, |f(0)|^2 and ||f||_{p+1}^{p+1}. The scaling-pair functional is their
(alpha, beta)-weighted combination; it equals the lambda-derivative of the
action along f -> e^{alpha lambda} f(e^{-beta lambda} x), which is also
computed directly by finite differences as an independent cross-check.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import (
    GridFunction,
    Params,
    gradient_norm_sq,
    l2_norm_sq,
    lp_norm_pow,
)

__all__ = [
    "FunctionalReport",
    "ScalingPair",
    "evaluate",
    "k_functional",
    "j_functional",
    "scale",
    "scaling_derivative",
    "sigma",
]


@dataclass(frozen=True)
class ScalingPair:
    """Admissible scaling exponents: alpha > 0, 2a - b >= 0, 2a + b >= 0."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if 2 * self.alpha - self.beta < 0 or 2 * self.alpha + self.beta < 0:
            raise ValueError(
                f"need 2a-b >= 0 and 2a+b >= 0, got (a, b) = ({self.alpha}, {self.beta})"
            )

    @property
    def mu_bar(self) -> float:
        return max(2 * self.alpha - self.beta, 2 * self.alpha + self.beta)

    @property
    def mu_underbar(self) -> float:
        return min(2 * self.alpha - self.beta, 2 * self.alpha + self.beta)


VIRIAL_PAIR = ScalingPair(0.5, -1.0)
NEHARI_PAIR = ScalingPair(1.0, 0.0)


@dataclass(frozen=True)
class FunctionalReport:
    """All functional values of one state at one frequency."""

    mass: float
    energy: float
    action: float
    virial: float
    nehari: float
    calh_norm_sq: float
    h_norm_sq: float
    center_value_sq: float
    omega: float


def evaluate(f: GridFunction, params: Params) -> FunctionalReport:
    """Mass, energy, action, virial P, Nehari I and the two quadratic norms."""
    omega = params.require_omega()
    gamma, p = params.gamma, params.p
    grad = gradient_norm_sq(f)
    l2 = l2_norm_sq(f)
    lp1 = lp_norm_pow(f, p + 1.0)
    c0 = abs(f.center_value) ** 2

    mass = 0.5 * l2
    energy = 0.25 * grad - 0.5 * gamma * c0 - lp1 / (p + 1.0)
    action = energy + omega * mass
    virial = 0.5 * grad - 0.5 * gamma * c0 - (p - 1.0) / (2.0 * (p + 1.0)) * lp1
    nehari = 0.5 * grad - gamma * c0 + omega * l2 - lp1
    calh = 0.25 * grad + 0.5 * omega * l2 - 0.5 * gamma * c0
    hnorm = 0.5 * grad - gamma * c0
    return FunctionalReport(
        mass=mass,
        energy=energy,
        action=action,
        virial=virial,
        nehari=nehari,
        calh_norm_sq=calh,
        h_norm_sq=hnorm,
        center_value_sq=c0,
        omega=omega,
    )


def k_functional(f: GridFunction, params: Params, sp: ScalingPair) -> float:
    """Derivative of the action along the (alpha, beta) scaling flow, in closed form."""
    omega = params.require_omega()
    gamma, p = params.gamma, params.p
    a, b = sp.alpha, sp.beta
    grad = gradient_norm_sq(f)
    l2 = l2_norm_sq(f)
    lp1 = lp_norm_pow(f, p + 1.0)
    c0 = abs(f.center_value) ** 2
    return (
        0.25 * (2 * a - b) * grad
        + 0.5 * omega * (2 * a + b) * l2
        - gamma * a * c0
        - ((p + 1.0) * a + b) / (p + 1.0) * lp1
    )


def j_functional(f: GridFunction, params: Params, sp: ScalingPair) -> float:
    """Action minus K/mu_bar; nonnegative on all of H^1 for p > 5."""
    return evaluate(f, params).action - k_functional(f, params, sp) / sp.mu_bar


def scale(f: GridFunction, lam: float, sp: ScalingPair) -> GridFunction:
    """Samples of e^{alpha lam} f(e^{-beta lam} x), by cubic interpolation of f.

    Warns when the rescaled support sticks out of the grid window and gets
    truncated to zero there.
    """
    if lam == 0.0:
        return f
    grid = f.grid
    stretch = np.exp(-sp.beta * lam)
    window = min(grid.half_width, grid.half_width * stretch)
    outside = np.abs(grid.x) > window
    lost = float(np.sum(grid.quad_weights[outside] * np.abs(f.values[outside]) ** 2))
    total = l2_norm_sq(f)
    if total > 0 and lost > 1e-12 * total:
        warnings.warn(
            f"scale(lam={lam}): {lost / total:.2e} of the squared L2 mass is "
            "truncated at the grid boundary",
            stacklevel=2,
        )
    spline = CubicSpline(grid.x, f.values, extrapolate=False)
    vals = spline(stretch * grid.x)
    vals = np.where(np.isnan(vals), 0.0, vals)
    return GridFunction(grid, np.exp(sp.alpha * lam) * vals)


def scaling_derivative(
    f: GridFunction, params: Params, sp: ScalingPair, step: float = 1e-5
) -> float:
    """Central finite difference of the action along the scaling flow.

    Independent of the closed-form k_functional; agreement between the two is
    the defining identity of K and is asserted in the test suite.
    """
    s_plus = evaluate(scale(f, step, sp), params).action
    s_minus = evaluate(scale(f, -step, sp), params).action
    return (s_plus - s_minus) / (2.0 * step)


def sigma(p: float) -> float:
    """Mass-energy exponent (p+3)/(p-5) of the frequency-free criterion."""
    if not p > 5:
        raise ValueError(f"p must be > 5, got {p}")
    return (p + 3.0) / (p - 5.0)
