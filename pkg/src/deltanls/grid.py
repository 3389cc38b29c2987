"""Uniform symmetric grid, discrete norms and the delta-corrected Schrodinger operator.

The grid always has an odd number of nodes so that x = 0 is exactly a node;
the point interaction lives there as a diagonal correction of the standard
three-point Laplacian. Everything outside [-L, L] is treated as zero
(homogeneous Dirichlet).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "GridFunction",
    "Params",
    "make_grid",
    "l2_norm_sq",
    "lp_norm_pow",
    "gradient_norm_sq",
    "inner_product",
    "hamiltonian_diagonals",
    "apply_hamiltonian",
    "translate",
    "reflect",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-L, L] with an odd node count, so x = 0 is the center node."""

    half_width: float
    n_points: int

    def __post_init__(self):
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ValueError(f"n_points must be odd and >= 3, got {self.n_points}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)

    @property
    def center_index(self) -> int:
        return (self.n_points - 1) // 2

    @cached_property
    def x(self) -> np.ndarray:
        # Built symmetrically around the center node so x[j0] == 0.0 exactly
        # and x[j0+k] == -x[j0-k] exactly.
        x = (np.arange(self.n_points) - self.center_index) * self.h
        x.flags.writeable = False
        return x

    @cached_property
    def quad_weights(self) -> np.ndarray:
        """Trapezoid weights: h everywhere, h/2 at the two boundary nodes."""
        w = np.full(self.n_points, self.h)
        w[0] = w[-1] = 0.5 * self.h
        w.flags.writeable = False
        return w

    def snap(self, y: float) -> tuple[int, float, float]:
        """Nearest node shift for a translation by y.

        Returns (node shift, snapped translation, snap distance).
        """
        k = int(round(y / self.h))
        return k, k * self.h, abs(y - k * self.h)


def make_grid(half_width: float, n_points: int) -> Grid:
    return Grid(half_width, n_points)


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on a grid; the discrete stand-in for an H^1 function."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise ValueError(
                f"values must have shape ({self.grid.n_points},), got {v.shape}"
            )
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def center_value(self) -> complex:
        return complex(self.values[self.grid.center_index])

    def __mul__(self, c) -> "GridFunction":
        return GridFunction(self.grid, self.values * c)

    __rmul__ = __mul__

    def __add__(self, other: "GridFunction") -> "GridFunction":
        if other.grid != self.grid:
            raise ValueError("grids do not match")
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        if other.grid != self.grid:
            raise ValueError("grids do not match")
        return GridFunction(self.grid, self.values - other.values)


@dataclass(frozen=True)
class Params:
    """Physical parameters: delta coupling gamma <= 0, power p > 5, frequency omega > 0.

    omega is optional; operations that need a frequency raise if it is absent.
    """

    gamma: float
    p: float
    omega: float | None = None

    def __post_init__(self):
        if not self.gamma <= 0:
            raise ValueError(f"gamma must be <= 0 (repulsive), got {self.gamma}")
        if not self.p > 5:
            raise ValueError(f"p must be > 5 (mass-supercritical), got {self.p}")
        if self.omega is not None and not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")

    def require_omega(self) -> float:
        if self.omega is None:
            raise ValueError("this operation needs params.omega")
        return self.omega

    def with_omega(self, omega: float) -> "Params":
        return Params(self.gamma, self.p, omega)


def l2_norm_sq(f: GridFunction) -> float:
    """Trapezoid quadrature of |f|^2 over [-L, L]."""
    return float(np.real(np.sum(f.grid.quad_weights * np.abs(f.values) ** 2)))


def lp_norm_pow(f: GridFunction, q: float) -> float:
    """Trapezoid quadrature of |f|^q, q > 2 (returns the q-th power, not the norm)."""
    if not q > 2:
        raise ValueError(f"q must be > 2, got {q}")
    return float(np.sum(f.grid.quad_weights * np.abs(f.values) ** q))


def gradient_norm_sq(f: GridFunction) -> float:
    """Sum of forward differences |f_{j+1} - f_j|^2 / h; second-order for smooth f."""
    d = np.diff(f.values)
    return float(np.sum(np.abs(d) ** 2) / f.grid.h)


def inner_product(f: GridFunction, g: GridFunction) -> complex:
    """Plain h-weighted inner product <f, g> = h * sum(conj(f) g).

    Deliberately not trapezoid-weighted: with plain weights the discrete
    Hamiltonian is exactly symmetric and the Crank-Nicolson step exactly
    unitary. For fields vanishing at the boundary the two agree.
    """
    if f.grid != g.grid:
        raise ValueError("grids do not match")
    return complex(f.grid.h * np.sum(np.conj(f.values) * g.values))


def hamiltonian_diagonals(grid: Grid, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Diagonals of H_gamma = -(1/2) d^2/dx^2 - gamma delta_0, Dirichlet at +-L.

    Returns (main, off). The -gamma/h diagonal correction at the center node is
    the finite-volume discretization of the delta; it reproduces the derivative
    jump condition d_x f(0+) - d_x f(0-) = -2 gamma f(0) as h -> 0.
    """
    h = grid.h
    main = np.full(grid.n_points, 1.0 / h**2)
    main[grid.center_index] -= gamma / h
    off = np.full(grid.n_points - 1, -0.5 / h**2)
    return main, off


def apply_hamiltonian(f: GridFunction, gamma: float) -> GridFunction:
    """Apply the delta-corrected Hamiltonian to f (symmetric tridiagonal stencil)."""
    if gamma > 0:
        raise ValueError(f"gamma must be <= 0, got {gamma}")
    main, off = hamiltonian_diagonals(f.grid, gamma)
    v = f.values
    out = main * v
    out[:-1] += off * v[1:]
    out[1:] += off * v[:-1]
    return GridFunction(f.grid, out)


def translate(f: GridFunction, y: float) -> GridFunction:
    """Shift f by y, snapped to the nearest whole number of grid spacings.

    Values entering from outside the window are zero. Use grid.snap(y) to
    inspect the snap distance.
    """
    k, _, _ = f.grid.snap(y)
    n = f.grid.n_points
    out = np.zeros(n, dtype=complex)
    if k >= 0:
        out[k:] = f.values[: n - k]
    else:
        out[:k] = f.values[-k:]
    return GridFunction(f.grid, out)


def reflect(f: GridFunction) -> GridFunction:
    """Spatial reflection about x = 0 (the center node stays fixed)."""
    return GridFunction(f.grid, f.values[::-1])
