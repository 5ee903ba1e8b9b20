"""Localized initial data with a compactly supported smoothstep edge."""

from __future__ import annotations

import numpy as np

from .config import InitialCondition, RunConfig
from .grid import Grid2D


def smoothstep_profile(distance: np.ndarray, radius: float, width: float) -> np.ndarray:
    """1 inside ``radius``, 0 beyond ``radius + width``, C^1 cubic in between."""
    if width <= 0:
        return (distance <= radius).astype(np.float64)
    rho = np.clip((distance - radius) / width, 0.0, 1.0)
    return 1.0 - (3.0 * rho**2 - 2.0 * rho**3)


def region_profile(grid: Grid2D, ic: InitialCondition) -> np.ndarray:
    width = 2.0 * max(grid.hx, grid.hy) if ic.mollifier_width is None else ic.mollifier_width
    cx, cy = ic.center
    reach = ic.size + width
    if cx - reach <= 0 or cx + reach >= grid.Lx or cy - reach <= 0 or cy + reach >= grid.Ly:
        raise ValueError(
            f"initial {ic.shape} at ({cx}, {cy}) with size {ic.size} and mollifier width "
            f"{width:g} does not fit inside the domain"
        )
    X, Y = grid.mesh()
    if ic.shape == "disk":
        dist = np.hypot(X - cx, Y - cy)
    elif ic.shape == "square":
        dist = np.maximum(np.abs(X - cx), np.abs(Y - cy))
    else:
        raise ValueError(f"unknown initial shape {ic.shape!r}")
    return smoothstep_profile(dist, ic.size, width)


def build_initial_condition(cfg: RunConfig) -> tuple[np.ndarray, ...]:
    """Initial state in shifted variables, one array per component.

    Each component equals its boundary value outside the region and its plateau
    value inside, so after subtracting the boundary value it vanishes near the
    boundary.
    """
    profile = region_profile(cfg.grid, cfg.initial)
    rng = np.random.default_rng(cfg.seed)
    out = []
    for plateau, g in zip(cfg.initial.values, cfg.boundary_values):
        w = (plateau - g) * profile
        if cfg.initial.noise > 0:
            w = w + cfg.initial.noise * rng.uniform(-1.0, 1.0, size=w.shape) * profile
        out.append(w)
    return tuple(out)
