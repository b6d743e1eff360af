"""Uniform grids, sampled complex functions, a fixed Fourier pair and quadrature.

Conventions
-----------
Forward:  F(k) = (2 pi)^-1 * integral f(x) exp(-i k x) dx
Inverse:  f(x) = integral F(k) exp(+i k x) dk

Grids exclude their right endpoint: samples sit at ``x_min + j*spacing`` for
``j = 0..n-1`` with ``spacing = (x_max - x_min)/n``.  Transforms and
quadrature treat the sampled window as one period.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Raised for malformed grids or sampled data."""


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n >= 1 and (int(n) & (int(n) - 1)) == 0


def next_power_of_two(n: int) -> int:
    n = int(n)
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic sampling of ``[x_min, x_max)`` with ``n`` points."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise GridError("grid endpoints must be finite")
        if not self.x_max > self.x_min:
            raise GridError(
                f"degenerate interval: x_max ({self.x_max}) must exceed x_min ({self.x_min})"
            )
        if not is_power_of_two(self.n) or self.n < 2:
            raise GridError(f"n must be a power of two and >= 2, got {self.n}")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.n)

    @property
    def k_spacing(self) -> float:
        return 2.0 * np.pi / (self.n * self.spacing)

    def conjugate(self) -> "Grid1D":
        """Wavenumber grid ``[-pi/spacing, pi/spacing)`` with spacing ``2 pi/(n spacing)``."""
        half = np.pi / self.spacing
        return Grid1D(-half, half, self.n)

    def index_of(self, x: float) -> int:
        """Index of the sample nearest to ``x`` (clipped to the grid)."""
        j = int(np.rint((x - self.x_min) / self.spacing))
        return min(max(j, 0), self.n - 1)


@dataclass(frozen=True)
class SampledComplex:
    """Complex samples on a grid.

    ``domain`` is ``"x"`` or ``"k"``.  For k-domain data ``origin`` holds the
    left edge of the x-grid the spectrum came from, so the inverse transform
    lands back on the same positions.
    """

    grid: Grid1D
    values: np.ndarray
    domain: str = "x"
    origin: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise GridError(
                f"values has shape {values.shape}, expected ({self.grid.n},)"
            )
        if not np.all(np.isfinite(values)):
            raise GridError("sampled values contain NaN or Inf")
        if self.domain not in ("x", "k"):
            raise GridError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "values", values)

    @property
    def points(self) -> np.ndarray:
        return self.grid.points


def make_grid(x_min: float, x_max: float, n: int) -> Grid1D:
    """Build a :class:`Grid1D`; rejects degenerate intervals and non-power-of-two ``n``."""
    return Grid1D(float(x_min), float(x_max), int(n))


def forward_transform(f: SampledComplex) -> SampledComplex:
    """Samples of ``F(k) = (2 pi)^-1 int f(x) e^{-ikx} dx`` on the conjugate grid (ascending k)."""
    if f.domain != "x":
        raise GridError("forward_transform expects x-domain samples")
    g = f.grid
    kg = g.conjugate()
    k = kg.points
    spectrum = np.fft.fftshift(np.fft.fft(f.values))
    values = spectrum * (g.spacing / (2.0 * np.pi)) * np.exp(-1j * k * g.x_min)
    return SampledComplex(kg, values, domain="k", origin=g.x_min)


def inverse_transform(F: SampledComplex) -> SampledComplex:
    """Samples of ``f(x) = int F(k) e^{ikx} dk`` on the x-grid recorded in ``F.origin``."""
    if F.domain != "k":
        raise GridError("inverse_transform expects k-domain samples")
    kg = F.grid
    dk = kg.spacing
    dx = 2.0 * np.pi / (kg.n * dk)
    xg = Grid1D(F.origin, F.origin + kg.n * dx, kg.n)
    k = kg.points
    shifted = np.fft.ifftshift(F.values * np.exp(1j * k * F.origin))
    values = np.fft.ifft(shifted) * (kg.n * dk)
    return SampledComplex(xg, values, domain="x")


def quadrature(f: SampledComplex) -> complex:
    """Periodic trapezoidal rule over the grid span.

    Spectrally accurate for periodic or rapidly decaying integrands.
    """
    return complex(np.sum(f.values) * f.grid.spacing)


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights
