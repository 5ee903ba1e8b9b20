"""Discrete monitors for energy decay, invariant ranges, spreading and weighted bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import Field, Grid2D, Space, dst1, first_eigenfunction, idst1, integrate, l2_norm
from .models import BistableModel, Bound, GrayScottModel, UnsupportedModelError
from .operator import FractionalDiffusion

THEOREM_TOL = 1e-8
WEIGHTED_SLACK = 1e-3


@dataclass
class DiagnosticRecord:
    t: float
    minima: tuple[float, ...]
    maxima: tuple[float, ...]
    l2_norms: tuple[float, ...]
    range_violation: tuple[float, ...]
    stationarity_residual: float
    energy: float | None = None
    area_theta: dict[float, float] = field(default_factory=dict)
    weighted_v_integral: float | None = None
    weighted_bound_rhs: float | None = None

    def row(self, names: Sequence[str], thresholds: Sequence[float]) -> dict[str, float | str]:
        out: dict[str, float | str] = {"t": self.t}
        for name, lo, hi, l2, viol in zip(names, self.minima, self.maxima, self.l2_norms, self.range_violation):
            out[f"min_{name}"] = lo
            out[f"max_{name}"] = hi
            out[f"l2_{name}"] = l2
            out[f"range_violation_{name}"] = viol
        out["stationarity_residual"] = self.stationarity_residual
        if self.energy is not None:
            out["energy"] = self.energy
        for theta in thresholds:
            if theta in self.area_theta:
                out[f"area_{theta:g}"] = self.area_theta[theta]
        if self.weighted_v_integral is not None:
            out["weighted_v_integral"] = self.weighted_v_integral
            out["weighted_bound_rhs"] = self.weighted_bound_rhs
        return out


def _physical(u: Field | np.ndarray) -> np.ndarray:
    if isinstance(u, Field):
        return u.values if u.space is Space.PHYSICAL else idst1(u.values)
    return np.asarray(u, dtype=np.float64)


def energy(model: BistableModel, op: FractionalDiffusion, u: Field | np.ndarray) -> float:
    """(eps^2/2) |(-Lap)^(alpha/2) u|^2 + integral of W(u), with eps^2 = op.r.

    The gradient term is evaluated by Parseval on the sine coefficients.
    """
    if not isinstance(model, BistableModel):
        raise UnsupportedModelError("energy is defined for bistable models only")
    grid = op.grid
    values = _physical(u)
    coeffs = dst1(values)
    c_p = grid.parseval_factor * grid.cell_area
    gradient = 0.5 * op.r * float((op.symbol * coeffs * coeffs).sum()) * c_p
    return gradient + integrate(model.potential(values), grid)


def dissipation_check(energies: Sequence[float]) -> tuple[float, bool]:
    """Largest energy increase between consecutive records and whether it is within tolerance."""
    energies = [e for e in energies if e is not None]
    if len(energies) < 2:
        raise ValueError("dissipation check needs at least two energy values")
    e = np.asarray(energies, dtype=np.float64)
    jump = float(np.max(np.diff(e)))
    tol = THEOREM_TOL * (1 + abs(e[0]))
    return jump, jump <= tol


def range_monitor(bounds: Sequence[Bound], state: Sequence[np.ndarray], t: float) -> tuple[float, ...]:
    """Per-component excess beyond the invariant interval (0 when inside or not applicable)."""
    out = []
    for b, s in zip(bounds, state):
        excess = 0.0
        if b.lower_applicable and math.isfinite(b.lower):
            excess = max(excess, b.lower - float(s.min()))
        if b.upper_applicable:
            hi = b.upper_at(t)
            if math.isfinite(hi):
                excess = max(excess, float(s.max()) - hi)
        out.append(excess)
    return tuple(out)


def superlevel_area(u: Field | np.ndarray, theta: float, grid: Grid2D | None = None) -> float:
    """Measure of the node set where u >= theta (nodal counting)."""
    if grid is None:
        if not isinstance(u, Field):
            raise TypeError("pass a grid when u is a bare array")
        grid = u.grid
    values = _physical(u)
    return float(np.count_nonzero(values >= theta)) * grid.cell_area


def weighted_rhs(op_u: FractionalDiffusion, u0_original: np.ndarray, t: float) -> float:
    grid = op_u.grid
    phi1 = first_eigenfunction(grid).values
    decay = math.exp(-op_u.r * op_u.lambda1_alpha * t)
    return integrate(phi1, grid) + decay * integrate(u0_original * phi1, grid)


def weighted_v_check(op_u: FractionalDiffusion, u0_original: np.ndarray,
                     v_history: Sequence[np.ndarray], times: Sequence[float],
                     t: float | None = None) -> tuple[float, float, bool]:
    """Both sides of the eigenfunction-weighted bound on v at time ``t``.

    lhs = int_0^t exp(-r_u lam1^alpha (t-s)) (int v(s)^2 phi_1) ds (trapezoid over
    ``times``), rhs = int phi_1 + exp(-r_u lam1^alpha t) int u0 phi_1, with u0 in
    unshifted variables. Returns (lhs, rhs, passed).
    """
    if float(np.abs(u0_original).max()) > 1.0:
        raise ValueError("weighted bound needs ||u0||_inf <= 1 (not applicable)")
    if len(times) != len(v_history):
        raise ValueError("need one time per v snapshot")
    if t is None:
        t = float(times[-1]) if len(times) else 0.0
    grid = op_u.grid
    phi1 = first_eigenfunction(grid).values
    rate = op_u.r * op_u.lambda1_alpha
    kept = [(s, v) for s, v in zip(times, v_history) if s <= t + 1e-12]
    ts = np.array([s for s, _ in kept])
    f = np.array([math.exp(-rate * (t - s)) * integrate(v * v * phi1, grid) for s, v in kept])
    lhs = float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(ts))) if len(ts) > 1 else 0.0
    rhs = weighted_rhs(op_u, u0_original, t)
    return lhs, rhs, lhs <= rhs * (1 + WEIGHTED_SLACK)


class WeightedIntegral:
    """Streaming trapezoid accumulator for the weighted v integral."""

    def __init__(self, op_u: FractionalDiffusion, u0_original: np.ndarray):
        self.op_u = op_u
        self.u0_original = np.asarray(u0_original, dtype=np.float64)
        self.applicable = float(np.abs(self.u0_original).max()) <= 1.0
        self.phi1 = first_eigenfunction(op_u.grid).values
        self.rate = op_u.r * op_u.lambda1_alpha
        self.value = 0.0
        self._last: tuple[float, float] | None = None

    def update(self, t: float, v: np.ndarray) -> tuple[float, float]:
        current = integrate(v * v * self.phi1, self.op_u.grid)
        if self._last is not None:
            t_prev, prev = self._last
            h = t - t_prev
            decay = math.exp(-self.rate * h)
            self.value = decay * self.value + 0.5 * h * (current + decay * prev)
        self._last = (t, current)
        return self.value, weighted_rhs(self.op_u, self.u0_original, t)


def interior_bound_report(op_u: FractionalDiffusion, u0_original: np.ndarray,
                          v_history: Sequence[np.ndarray], times: Sequence[float],
                          margin: float) -> dict[str, float]:
    """Both sides of the interior L2 estimate on {dist(x, boundary) >= margin}."""
    grid = op_u.grid
    X, Y = grid.mesh()
    dist = np.minimum.reduce([X, grid.Lx - X, Y, grid.Ly - Y])
    inside = dist >= margin
    if not inside.any():
        raise ValueError(f"no interior nodes at distance >= {margin}")
    phi1 = first_eigenfunction(grid).values
    m_delta = float(phi1[inside].min())
    times = np.asarray(times, dtype=np.float64)
    integrand = np.array([integrate(np.where(inside, v * v, 0.0), grid) for v in v_history])
    lhs = float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(times))) if len(times) > 1 else 0.0
    T = float(times[-1]) if len(times) else 0.0
    area = grid.Lx * grid.Ly
    rhs = (math.exp(op_u.r * op_u.lambda1_alpha * T) * math.sqrt(area) + l2_norm(u0_original, grid)) / m_delta
    return {"lhs": lhs, "rhs": rhs, "M_delta": m_delta, "passed": float(lhs <= rhs)}


def stationarity_residual(ops: Sequence[FractionalDiffusion], model, state: Sequence[np.ndarray]) -> float:
    """Discrete L2 norm of the full right-hand side -mu*u + reaction(u)."""
    state = [_physical(s) for s in state]
    reactions = model.reaction(*state)
    total = 0.0
    for op, s, r in zip(ops, state, reactions):
        diffusion = idst1(dst1(s) * op.multipliers)
        total += l2_norm(r - diffusion, op.grid) ** 2
    return math.sqrt(total)
