"""Uniform Dirichlet grid on a rectangle and the type-I discrete sine transform.

Fields store interior nodes only; boundary values are implicitly zero.
The forward transform is

    U_hat[k, m] = sum_ij U[i, j] sin(pi i k / (Nx+1)) sin(pi j m / (Ny+1))

and the inverse carries the factor 4 / ((Nx+1)(Ny+1)).
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft


def fft_workers() -> int | None:
    """Worker count for scipy.fft, read from ``FRACRD_THREADS`` (0 = all cores)."""
    raw = os.environ.get("FRACRD_THREADS", "").strip()
    if not raw:
        return None
    n = int(raw)
    if n < 0:
        raise ValueError(f"FRACRD_THREADS must be >= 0, got {n}")
    return -1 if n == 0 else n


@dataclass(frozen=True)
class Grid2D:
    """Interior nodes of (0, Lx) x (0, Ly): x_i = i*hx, i = 1..Nx."""

    Lx: float
    Ly: float
    Nx: int
    Ny: int

    def __post_init__(self):
        if int(self.Nx) != self.Nx or int(self.Ny) != self.Ny:
            raise ValueError("Nx and Ny must be integers")
        if self.Nx < 1 or self.Ny < 1:
            raise ValueError(f"grid needs Nx, Ny >= 1, got ({self.Nx}, {self.Ny})")
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValueError(f"domain lengths must be positive, got ({self.Lx}, {self.Ly})")

    @classmethod
    def square(cls, L: float, N: int) -> "Grid2D":
        return cls(L, L, N, N)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.Nx, self.Ny)

    @property
    def hx(self) -> float:
        return self.Lx / (self.Nx + 1)

    @property
    def hy(self) -> float:
        return self.Ly / (self.Ny + 1)

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def x(self) -> np.ndarray:
        return np.arange(1, self.Nx + 1) * self.hx

    @property
    def y(self) -> np.ndarray:
        return np.arange(1, self.Ny + 1) * self.hy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates with ``indexing='ij'`` (row i <-> x_i)."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    @property
    def parseval_factor(self) -> float:
        """c such that sum U^2 = c * sum U_hat^2."""
        return 4.0 / ((self.Nx + 1) * (self.Ny + 1))

    @cached_property
    def _eigenvalues(self) -> np.ndarray:
        kx = np.arange(1, self.Nx + 1) * np.pi / self.Lx
        ky = np.arange(1, self.Ny + 1) * np.pi / self.Ly
        lam = kx[:, None] ** 2 + ky[None, :] ** 2
        lam.setflags(write=False)
        return lam


class Space(enum.Enum):
    PHYSICAL = "physical"
    SPECTRAL = "spectral"


@dataclass(frozen=True, eq=False)
class Field:
    """Real Nx x Ny array on a grid, tagged with its representation."""

    grid: Grid2D
    values: np.ndarray
    space: Space = Space.PHYSICAL

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ValueError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray, space: Space | None = None) -> "Field":
        return Field(self.grid, values, self.space if space is None else space)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())


def _check_finite(values: np.ndarray, what: str) -> None:
    if not np.isfinite(values).all():
        raise ValueError(f"{what} contains non-finite entries")


def dst1(values: np.ndarray) -> np.ndarray:
    """Unnormalised 2D DST-I sum (the forward transform); no checks."""
    return scipy.fft.dstn(values, type=1, workers=fft_workers()) * 0.25


def idst1(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dst1`; no checks."""
    nx, ny = coeffs.shape
    return scipy.fft.dstn(coeffs, type=1, workers=fft_workers()) / ((nx + 1) * (ny + 1))


def dst1_forward(f: Field) -> Field:
    if f.space is not Space.PHYSICAL:
        raise ValueError("dst1_forward expects a physical-space field")
    _check_finite(f.values, "input field")
    return Field(f.grid, dst1(f.values), Space.SPECTRAL)


def dst1_inverse(F: Field) -> Field:
    if F.space is not Space.SPECTRAL:
        raise ValueError("dst1_inverse expects a spectral-space field")
    _check_finite(F.values, "input coefficients")
    return Field(F.grid, idst1(F.values), Space.PHYSICAL)


def to_spectral(f: Field) -> Field:
    return f if f.space is Space.SPECTRAL else dst1_forward(f)


def to_physical(f: Field) -> Field:
    return f if f.space is Space.PHYSICAL else dst1_inverse(f)


def eigenvalues(grid: Grid2D) -> np.ndarray:
    """Dirichlet Laplacian eigenvalues (k pi/Lx)^2 + (m pi/Ly)^2, read-only."""
    return grid._eigenvalues


def first_eigenfunction(grid: Grid2D) -> Field:
    """L2-normalised first Dirichlet eigenfunction sampled on interior nodes."""
    X, Y = grid.mesh()
    phi = 2.0 / np.sqrt(grid.Lx * grid.Ly) * np.sin(np.pi * X / grid.Lx) * np.sin(np.pi * Y / grid.Ly)
    return Field(grid, phi)


def integrate(values: np.ndarray, grid: Grid2D) -> float:
    """Midpoint-rule integral over the domain (boundary nodes contribute zero)."""
    return float(values.sum() * grid.cell_area)


def l2_norm(values: np.ndarray, grid: Grid2D) -> float:
    return float(np.sqrt((values * values).sum() * grid.cell_area))
