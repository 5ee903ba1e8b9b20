"""Reaction terms in shifted (homogeneous-boundary) variables.

Convention used everywhere: ``d/dt state = -mu * state + reaction(state)``,
so ``reaction`` already carries the sign of the right-hand side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class UnsupportedModelError(TypeError):
    pass


@dataclass(frozen=True)
class BistableModel:
    """Cubic with zeros u_minus < u_mid < u_plus, shifted so the boundary value is 0.

    In the shifted variable w = u - u_minus the nonlinearity is
    N(w) = w (w - p)(w - q) / delta with p = u_mid - u_minus, q = u_plus - u_minus,
    and the evolution reads w' = -eps^2 (-Lap)^alpha w - N(w).
    """

    u_minus: float = 0.0
    u_mid: float = 0.35
    u_plus: float = 1.0
    delta: float = 1e-2

    component_count = 1
    names = ("u",)

    def __post_init__(self):
        if not self.u_minus < self.u_mid < self.u_plus:
            raise ValueError(
                f"bistable roots must satisfy u_minus < u_mid < u_plus, got "
                f"({self.u_minus}, {self.u_mid}, {self.u_plus})"
            )
        if self.delta == 0 or not math.isfinite(self.delta):
            raise ValueError("delta must be a finite nonzero constant")

    @classmethod
    def nagumo(cls, a: float = 0.35, delta: float = 1e-2) -> "BistableModel":
        return cls(0.0, a, 1.0, delta)

    @classmethod
    def allen_cahn(cls, delta: float = 1.0) -> "BistableModel":
        return cls(-1.0, 0.0, 1.0, delta)

    @property
    def p(self) -> float:
        return self.u_mid - self.u_minus

    @property
    def q(self) -> float:
        return self.u_plus - self.u_minus

    @property
    def boundary_values(self) -> tuple[float]:
        return (self.u_minus,)

    def nonlinearity(self, w):
        """N(w) in shifted variables (enters the equation with a minus sign)."""
        return w * (w - self.p) * (w - self.q) / self.delta

    def reaction(self, w):
        return (-self.nonlinearity(w),)

    def potential(self, w):
        """W(w) = integral_0^w N(s) ds."""
        p, q = self.p, self.q
        return (w**4 / 4 - (p + q) * w**3 / 3 + p * q * w**2 / 2) / self.delta


@dataclass(frozen=True)
class GrayScottModel:
    """Gray-Scott kinetics with reactant shifted by its boundary value 1.

    u' = -r_u (-Lap)^alpha u - (u+1) v^2 - F u
    v' = -r_v (-Lap)^beta  v + (u+1) v^2 - (F+kappa) v
    """

    F: float
    kappa: float
    r_u: float = 1e-6
    r_v: float = 5e-7
    alpha: float = 0.95
    beta: float = 0.85

    component_count = 2
    names = ("u", "v")
    boundary_values = (1.0, 0.0)

    def __post_init__(self):
        for name in ("F", "kappa", "r_u", "r_v"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("alpha", "beta"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in (0,1], got {getattr(self, name)}")

    def reaction(self, u, v):
        growth = (u + 1.0) * v * v
        return (-growth - self.F * u, growth - (self.F + self.kappa) * v)

    def potential(self, w):
        raise UnsupportedModelError("Gray-Scott has no energy functional")


def potential(model, w):
    if not isinstance(model, BistableModel):
        raise UnsupportedModelError(f"no potential for {type(model).__name__}")
    return model.potential(w)


@dataclass(frozen=True)
class Bound:
    """Admissible interval for one component; ``upper`` may depend on time."""

    lower: float = -math.inf
    upper: float | Callable[[float], float] = math.inf
    upper_applicable: bool = True
    lower_applicable: bool = True

    def upper_at(self, t: float) -> float:
        return self.upper(t) if callable(self.upper) else self.upper


def invariant_bounds(model, initial: tuple[np.ndarray, ...]) -> tuple[Bound, ...]:
    """Invariant intervals for each shifted component, given the initial state.

    Bounds whose hypotheses fail on ``initial`` are flagged not applicable.
    """
    if isinstance(model, BistableModel):
        (w0,) = initial
        ok = bool(w0.min() >= 0.0 and w0.max() <= model.q)
        return (Bound(0.0, model.q, ok, ok),)
    if isinstance(model, GrayScottModel):
        u0, v0 = initial
        # hypotheses are stated for the unshifted reactant
        u0_norm = float(np.abs(u0 + 1.0).max())
        v0_norm = float(np.abs(v0).max())
        u_ok = u0_norm <= 1.0 and bool(u0.min() >= -1.0)
        F = model.F
        envelope = 1.0 - u0_norm
        u_bound = Bound(-1.0, lambda t: math.exp(-F * t) * envelope, u_ok, u_ok)
        v_cap = (model.F + model.kappa) / (2.0 - u0_norm) if u0_norm < 2 else math.inf
        v_bound = Bound(0.0, v_cap, u_ok and v0_norm <= v_cap, bool(v0.min() >= 0.0))
        return (u_bound, v_bound)
    raise UnsupportedModelError(f"unknown model {type(model).__name__}")
