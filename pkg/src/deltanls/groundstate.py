"""Closed-form ground states and the variational threshold values.

Both solitons are sech powers. The free one solves
    -(1/2) Q'' + omega Q = |Q|^{p-1} Q,
and the delta one (for omega > gamma^2/2) shifts the sech argument by
atanh(gamma / sqrt(2 omega)) <= 0, which produces the derivative jump
-2 gamma Q(0) at the origin. For gamma < 0 that shift puts the two symmetric
maxima away from x = 0 with a dip in between; the profile decays
monotonically only beyond the peaks.

Thresholds are action values of those closed forms, computed by adaptive
quadrature; no minimization is ever run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .grid import Grid, GridFunction, Params

__all__ = [
    "GroundState",
    "Thresholds",
    "NoGroundStateError",
    "delta_soliton_exists",
    "peak_offset",
    "free_soliton_value",
    "delta_soliton_value",
    "soliton_value",
    "soliton_derivative",
    "ground_state",
    "threshold_l",
    "threshold_n",
    "threshold_r",
    "thresholds",
    "free_state_constants",
]

_LOG2 = math.log(2.0)


class NoGroundStateError(ValueError):
    """Raised when the delta soliton does not exist (omega <= gamma^2/2)."""


def delta_soliton_exists(omega: float, gamma: float) -> bool:
    return omega > gamma * gamma / 2.0


def peak_offset(omega: float, gamma: float) -> float:
    """Argument shift atanh(gamma / sqrt(2 omega)); <= 0 for gamma <= 0.

    Evaluated as 0.5 log((1+z)/(1-z)), stable for z in (-1, 0].
    """
    z = gamma / math.sqrt(2.0 * omega)
    if not -1.0 < z <= 0.0:
        raise NoGroundStateError(
            f"no delta ground state: need omega > gamma^2/2, got omega={omega}, gamma={gamma}"
        )
    return 0.5 * math.log1p(z) - 0.5 * math.log1p(-z)


def _log_sech(t: np.ndarray) -> np.ndarray:
    """log(sech t), overflow-free for large |t|."""
    a = np.abs(t)
    return _LOG2 - a - np.log1p(np.exp(-2.0 * a))


def _profile(omega: float, gamma: float, p: float) -> tuple[float, float, float]:
    """Amplitude, rate and offset of Q(x) = amp * sech(c|x| + a)^(2/(p-1))."""
    amp = ((p + 1.0) * omega / 2.0) ** (1.0 / (p - 1.0))
    c = (p - 1.0) * math.sqrt(omega) / math.sqrt(2.0)
    a = 0.0 if gamma == 0.0 else peak_offset(omega, gamma)
    return amp, c, a


def soliton_value(omega: float, gamma: float, p: float, x) -> np.ndarray | float:
    """Ground-state profile at x; gamma = 0 gives the free soliton."""
    amp, c, a = _profile(omega, gamma, p)
    t = c * np.abs(np.asarray(x, dtype=float)) + a
    out = amp * np.exp((2.0 / (p - 1.0)) * _log_sech(t))
    return float(out) if np.isscalar(x) else out


def soliton_derivative(omega: float, gamma: float, p: float, x) -> np.ndarray | float:
    """d/dx of the profile (defined a.e.; at x = 0 returns 0, the even-part value)."""
    amp, c, a = _profile(omega, gamma, p)
    xv = np.asarray(x, dtype=float)
    t = c * np.abs(xv) + a
    out = (
        -amp
        * (2.0 * c / (p - 1.0))
        * np.sign(xv)
        * np.tanh(t)
        * np.exp((2.0 / (p - 1.0)) * _log_sech(t))
    )
    return float(out) if np.isscalar(x) else out


def free_soliton_value(omega: float, p: float, x) -> np.ndarray | float:
    if not omega > 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    return soliton_value(omega, 0.0, p, x)


def delta_soliton_value(omega: float, gamma: float, p: float, x) -> np.ndarray | float:
    if not delta_soliton_exists(omega, gamma):
        raise NoGroundStateError(
            f"no delta ground state: need omega > gamma^2/2, got omega={omega}, gamma={gamma}"
        )
    return soliton_value(omega, gamma, p, x)


@dataclass(frozen=True)
class GroundState:
    """Closed-form ground state of one kind ('free' or 'delta')."""

    params: Params
    kind: str
    existence: bool
    peak_offset: float

    def value(self, x):
        gamma = self.params.gamma if self.kind == "delta" else 0.0
        return soliton_value(self.params.require_omega(), gamma, self.params.p, x)

    def derivative(self, x):
        gamma = self.params.gamma if self.kind == "delta" else 0.0
        return soliton_derivative(self.params.require_omega(), gamma, self.params.p, x)

    def sample(self, grid: Grid) -> GridFunction:
        return GridFunction(grid, self.value(grid.x).astype(complex))


def ground_state(params: Params, kind: str = "delta") -> GroundState:
    if kind not in ("free", "delta"):
        raise ValueError(f"kind must be 'free' or 'delta', got {kind!r}")
    omega = params.require_omega()
    if kind == "free":
        return GroundState(params, "free", True, 0.0)
    if not delta_soliton_exists(omega, params.gamma):
        return GroundState(params, "delta", False, math.nan)
    return GroundState(params, "delta", True, peak_offset(omega, params.gamma))


# -- threshold values ---------------------------------------------------------

def _cutoff(omega: float, gamma: float, p: float, tiny: float = 1e-14) -> float:
    """x beyond which the profile is below `tiny` (tail then treated as zero)."""
    amp, c, a = _profile(omega, gamma, p)
    # Q ~ amp * (2 exp(-t))^{2/(p-1)}; solve for t, then x = (t - a)/c.
    t = 0.5 * (p - 1.0) * math.log(amp / tiny) + _LOG2
    return 1.2 * (abs(t) + abs(a)) / c + 1.0


def _soliton_integrals(omega: float, gamma: float, p: float) -> dict[str, float]:
    """Adaptive quadrature of ||Q||^2, ||Q||_{p+1}^{p+1}, ||Q'||^2 and |Q(0)|^2."""
    X = _cutoff(omega, gamma, p)
    opts = dict(epsabs=1e-15, epsrel=1e-13, limit=300)
    l2 = 2.0 * quad(lambda x: soliton_value(omega, gamma, p, x) ** 2, 0.0, X, **opts)[0]
    lp1 = 2.0 * quad(lambda x: soliton_value(omega, gamma, p, x) ** (p + 1), 0.0, X, **opts)[0]
    grad = 2.0 * quad(lambda x: soliton_derivative(omega, gamma, p, x) ** 2, 0.0, X, **opts)[0]
    q0_sq = float(soliton_value(omega, gamma, p, 0.0)) ** 2
    return {"l2": l2, "lp1": lp1, "grad": grad, "q0_sq": q0_sq}


def _action(omega: float, gamma: float, p: float) -> float:
    ints = _soliton_integrals(omega, gamma, p)
    return (
        0.25 * ints["grad"]
        - 0.5 * gamma * ints["q0_sq"]
        + 0.5 * omega * ints["l2"]
        - ints["lp1"] / (p + 1.0)
    )


@lru_cache(maxsize=512)
def threshold_l(omega: float, p: float) -> float:
    """Potential-free threshold: action of the free soliton at this frequency."""
    if not omega > 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    if not p > 5:
        raise ValueError(f"p must be > 5, got {p}")
    return _action(omega, 0.0, p)


def threshold_n(omega: float, gamma: float, p: float) -> float:
    """Non-radial threshold; equals the potential-free one for gamma <= 0."""
    if gamma > 0:
        raise ValueError(f"gamma must be <= 0, got {gamma}")
    return threshold_l(omega, p)


@lru_cache(maxsize=512)
def threshold_r(omega: float, gamma: float, p: float) -> float:
    """Radial threshold: delta-soliton action if it exists, else twice the free one."""
    if gamma > 0:
        raise ValueError(f"gamma must be <= 0, got {gamma}")
    if not delta_soliton_exists(omega, gamma):
        return 2.0 * threshold_l(omega, p)
    return _action(omega, gamma, p)


@dataclass(frozen=True)
class Thresholds:
    l_omega: float
    n_omega: float
    r_omega: float
    omega: float
    gamma: float
    p: float


def thresholds(params: Params) -> Thresholds:
    omega = params.require_omega()
    return Thresholds(
        l_omega=threshold_l(omega, params.p),
        n_omega=threshold_n(omega, params.gamma, params.p),
        r_omega=threshold_r(omega, params.gamma, params.p),
        omega=omega,
        gamma=params.gamma,
        p=params.p,
    )


@lru_cache(maxsize=64)
def free_state_constants(p: float) -> dict[str, float]:
    """Frequency-one free-soliton constants used by the frequency-free criterion.

    energy/mass are the gamma = 0 values of the p-dependent profile at omega = 1;
    em_sigma is E * M^sigma with sigma = (p+3)/(p-5).
    """
    ints = _soliton_integrals(1.0, 0.0, p)
    mass = 0.5 * ints["l2"]
    energy = 0.25 * ints["grad"] - ints["lp1"] / (p + 1.0)
    sigma = (p + 3.0) / (p - 5.0)
    return {
        "l1": 0.25 * ints["grad"] + 0.5 * ints["l2"] - ints["lp1"] / (p + 1.0),
        "mass": mass,
        "energy": energy,
        "em_sigma": energy * mass**sigma,
        "grad_sq": ints["grad"],
        "l2_sq": ints["l2"],
        "lp1_pow": ints["lp1"],
    }
