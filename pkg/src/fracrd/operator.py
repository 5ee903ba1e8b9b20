"""Spectral fractional Laplacian as a diagonal multiplier in the sine basis."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .grid import Field, Grid2D, Space, dst1, eigenvalues, idst1


@dataclass(frozen=True)
class FractionalDiffusion:
    """The operator ``-r (-Laplacian)^alpha`` with constant boundary value ``g``.

    ``multipliers`` holds mu_km = r * lambda_km**alpha, so the linear part of
    the evolution is ``d/dt u_hat = -mu * u_hat``.
    """

    grid: Grid2D
    alpha: float
    r: float = 1.0
    g: float = 0.0
    _exp_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0,1], got {self.alpha}")
        if not self.r >= 0.0:
            raise ValueError(f"diffusion coefficient must be >= 0, got {self.r}")
        if not np.isfinite(self.g):
            raise ValueError("boundary value g must be a finite constant")

    @cached_property
    def symbol(self) -> np.ndarray:
        """lambda_km ** alpha."""
        out = eigenvalues(self.grid) ** self.alpha
        out.setflags(write=False)
        return out

    @cached_property
    def multipliers(self) -> np.ndarray:
        out = self.r * self.symbol
        out.setflags(write=False)
        return out

    @property
    def lambda1_alpha(self) -> float:
        return float(self.symbol[0, 0])

    def decay_factors(self, t: float) -> np.ndarray:
        """exp(-t * mu), cached per t."""
        if t < 0:
            raise ValueError(f"semigroup time must be >= 0, got {t}")
        key = float(t)
        table = self._exp_cache.get(key)
        if table is None:
            table = np.exp(-key * self.multipliers)
            table.setflags(write=False)
            self._exp_cache[key] = table
        return table

    def _multiply(self, f: Field, factor: np.ndarray) -> Field:
        if not f.is_finite():
            raise ValueError("input field contains non-finite entries")
        if f.space is Space.SPECTRAL:
            return f.with_values(f.values * factor)
        return f.with_values(idst1(dst1(f.values) * factor))

    def apply(self, f: Field) -> Field:
        """(-Laplacian)^alpha f, without the coefficient r."""
        return self._multiply(f, self.symbol)

    def scaled_apply(self, f: Field) -> Field:
        """r (-Laplacian)^alpha f."""
        return self._multiply(f, self.multipliers)

    def semigroup_apply(self, t: float, f: Field) -> Field:
        """exp(-t r (-Laplacian)^alpha) f."""
        if t < 0:
            raise ValueError(f"semigroup time must be >= 0, got {t}")
        if t == 0:
            if not f.is_finite():
                raise ValueError("input field contains non-finite entries")
            return f.with_values(f.values.copy())
        return self._multiply(f, self.decay_factors(t))


def lift_to_homogeneous(u: Field, g: float) -> Field:
    """Shift a field with boundary trace ``g`` to one with zero trace."""
    if u.space is not Space.PHYSICAL:
        raise ValueError("lifting acts on physical-space fields")
    return u.with_values(u.values - g)


def unlift(w: Field, g: float) -> Field:
    if w.space is not Space.PHYSICAL:
        raise ValueError("unlifting acts on physical-space fields")
    return w.with_values(w.values + g)


def inner(a: Field, b: Field) -> float:
    """Discrete L2 inner product (midpoint weight), computed spectrally via Parseval."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    grid = a.grid
    ah = a.values if a.space is Space.SPECTRAL else dst1(a.values)
    bh = b.values if b.space is Space.SPECTRAL else dst1(b.values)
    return float((ah * bh).sum() * grid.parseval_factor * grid.cell_area)
