"""ETDRK4 time stepping in sine-coefficient space.

Each component evolves as ``d/dt U_hat = -mu * U_hat + N_hat(U)`` with a diagonal
``mu``. Stages (per component, mode by mode):

    a = E_half U + Q N(U)
    b = E_half U + Q N(a)
    c = E_half a + Q (2 N(b) - N(U))
    U_next = E U + w1 N(U) + 2 w2 (N(a) + N(b)) + w3 N(c)

with Q = (dt/2) phi_1(z/2), z = -dt*mu. The update weights depend on the scheme:

* ``Scheme.PAPER``: w1 = dt phi_1, w2 = dt^2 phi_2, w3 = dt^3 phi_3
  (the weights Phi_j = dt^j phi_j(dt L) taken literally). This is first order.
* ``Scheme.COX_MATTHEWS``: w1 = dt (phi_1 - 3 phi_2 + 4 phi_3),
  w2 = dt (phi_2 - 2 phi_3), w3 = dt (4 phi_3 - phi_2). Fourth order.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .grid import dst1, idst1
from .operator import FractionalDiffusion
from .phi import phi_eval

logger = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e6


class SolverDivergenceError(RuntimeError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"solver diverged at step {step}: {reason}")
        self.step = step


class Scheme(enum.Enum):
    PAPER = "paper"
    COX_MATTHEWS = "coxmatthews"

    @classmethod
    def parse(cls, name: str | "Scheme") -> "Scheme":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "").replace("_", "")
        for scheme in cls:
            if scheme.value == key:
                return scheme
        raise ValueError(f"unknown scheme {name!r}; expected 'paper' or 'coxmatthews'")


@dataclass(frozen=True, eq=False)
class PhiTable:
    """Per-mode exponential and phi-function tables for one component."""

    dt: float
    z: np.ndarray
    E: np.ndarray
    E_half: np.ndarray
    Phi1: np.ndarray
    Phi1_half: np.ndarray
    Phi2: np.ndarray
    Phi3: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    phi3: np.ndarray

    @classmethod
    def build(cls, multipliers: np.ndarray, dt: float) -> "PhiTable":
        if not dt > 0:
            raise ValueError(f"time step must be positive, got {dt}")
        z = -dt * np.asarray(multipliers, dtype=np.float64)
        p1, p2, p3 = (phi_eval(j, z) for j in (1, 2, 3))
        return cls(
            dt=dt,
            z=z,
            E=np.exp(z),
            E_half=np.exp(z / 2),
            Phi1=dt * p1,
            Phi1_half=(dt / 2) * phi_eval(1, z / 2),
            Phi2=dt**2 * p2,
            Phi3=dt**3 * p3,
            phi1=p1,
            phi2=p2,
            phi3=p3,
        )

    @classmethod
    def for_operator(cls, op: FractionalDiffusion, dt: float) -> "PhiTable":
        return cls.build(op.multipliers, dt)

    def update_weights(self, scheme: Scheme) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if scheme is Scheme.PAPER:
            return self.Phi1, self.Phi2, self.Phi3
        dt, p1, p2, p3 = self.dt, self.phi1, self.phi2, self.phi3
        return dt * (p1 - 3 * p2 + 4 * p3), dt * (p2 - 2 * p3), dt * (4 * p3 - p2)


@dataclass(frozen=True, eq=False)
class StepperConfig:
    scheme: Scheme
    dt: float
    tables: tuple[PhiTable, ...]

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"time step must be positive, got {self.dt}")
        if not self.tables:
            raise ValueError("need one PhiTable per evolved component")
        for t in self.tables:
            if t.dt != self.dt:
                raise ValueError("PhiTable step size does not match the stepper")
        object.__setattr__(self, "_weights", tuple(t.update_weights(self.scheme) for t in self.tables))

    @classmethod
    def build(cls, operators: Sequence[FractionalDiffusion], dt: float,
              scheme: Scheme | str = Scheme.COX_MATTHEWS) -> "StepperConfig":
        return cls(Scheme.parse(scheme), float(dt), tuple(PhiTable.for_operator(op, dt) for op in operators))

    @property
    def weights(self):
        return self._weights


SpectralRHS = Callable[[list[np.ndarray]], list[np.ndarray]]


def etdrk4_advance(state: list[np.ndarray], rhs: SpectralRHS, cfg: StepperConfig) -> list[np.ndarray]:
    """One step on raw coefficient arrays with an arbitrary spectral right-hand side."""
    tabs = cfg.tables
    n_u = rhs(state)
    a = [t.E_half * s + t.Phi1_half * n for t, s, n in zip(tabs, state, n_u)]
    n_a = rhs(a)
    b = [t.E_half * s + t.Phi1_half * n for t, s, n in zip(tabs, state, n_a)]
    n_b = rhs(b)
    c = [t.E_half * ai + t.Phi1_half * (2 * nb - nu) for t, ai, nb, nu in zip(tabs, a, n_b, n_u)]
    n_c = rhs(c)
    out = []
    for t, (w1, w2, w3), s, nu, na, nb, nc in zip(tabs, cfg.weights, state, n_u, n_a, n_b, n_c):
        out.append(t.E * s + w1 * nu + 2 * w2 * (na + nb) + w3 * nc)
    return out


def reaction_rhs(model, step: int = 0) -> SpectralRHS:
    """Spectral right-hand side of ``model``: inverse transform, react pointwise, transform back."""

    def rhs(coeffs: list[np.ndarray]) -> list[np.ndarray]:
        phys = [idst1(c) for c in coeffs]
        for p in phys:
            if not np.isfinite(p).all():
                raise SolverDivergenceError(step, "non-finite values in a stage")
            if np.abs(p).max() > DIVERGENCE_LIMIT:
                raise SolverDivergenceError(step, f"|state| exceeded {DIVERGENCE_LIMIT:g}")
        return [dst1(r) for r in model.reaction(*phys)]

    return rhs


def etdrk4_step(state: Sequence[np.ndarray], model, cfg: StepperConfig, step: int = 0) -> list[np.ndarray]:
    """Advance spectral coefficients of every component by one step of size ``cfg.dt``."""
    if len(state) != len(cfg.tables) or len(state) != model.component_count:
        raise ValueError("state, model and stepper disagree on the number of components")
    shape = state[0].shape
    if any(s.shape != shape for s in state):
        raise ValueError("state components must share one grid")
    new = etdrk4_advance(list(state), reaction_rhs(model, step), cfg)
    for c in new:
        if not np.isfinite(c).all():
            raise SolverDivergenceError(step, "non-finite values after update")
    return new


@dataclass(frozen=True, eq=False)
class Snapshot:
    t: float
    step: int
    fields: tuple[np.ndarray, ...]


@dataclass(eq=False)
class Trajectory:
    snapshots: list[Snapshot]
    final: Snapshot

    @property
    def times(self) -> list[float]:
        return [s.t for s in self.snapshots]


def schedule_to_steps(schedule: Iterable[float], dt: float, T: float) -> list[int]:
    """Round snapshot times onto the step lattice (warn when rounding moves a time)."""
    n_total = int(round(T / dt))
    steps = []
    for t in schedule:
        if t < 0 or t > T * (1 + 1e-12):
            raise ValueError(f"snapshot time {t} outside [0, {T}]")
        n = int(round(t / dt))
        if not math.isclose(n * dt, t, rel_tol=1e-9, abs_tol=1e-12):
            logger.warning("snapshot time %g is not a multiple of dt=%g; using %g", t, dt, n * dt)
        steps.append(min(n, n_total))
    return sorted(set(steps))


def integrate(state0: Sequence[np.ndarray], model, cfg: StepperConfig, T: float,
              schedule: Iterable[float] = (),
              hooks: Iterable[Callable[[float, tuple[np.ndarray, ...]], None]] = ()) -> Trajectory:
    """Run from physical-space ``state0`` to time ``T``.

    Hooks are called as ``hook(t, fields)`` with fresh physical-space copies at each
    scheduled time. With an empty schedule only the final state is returned.
    """
    dt = cfg.dt
    n_total = int(round(T / dt))
    if not math.isclose(n_total * dt, T, rel_tol=1e-9, abs_tol=1e-12):
        logger.warning("final time %g is not a multiple of dt=%g; using %g", T, dt, n_total * dt)
    steps = schedule_to_steps(schedule, dt, n_total * dt)
    hooks = list(hooks)
    coeffs = [dst1(np.asarray(s, dtype=np.float64)) for s in state0]

    snapshots: list[Snapshot] = []

    def record(n: int) -> Snapshot:
        snap = Snapshot(round(n * dt, 12), n, tuple(idst1(c) for c in coeffs))
        for hook in hooks:
            hook(snap.t, tuple(f.copy() for f in snap.fields))
        return snap

    pending = list(steps)
    n = 0
    while True:
        while pending and pending[0] == n:
            snapshots.append(record(n))
            pending.pop(0)
        if n >= n_total:
            break
        coeffs = etdrk4_step(coeffs, model, cfg, step=n)
        n += 1

    if snapshots and snapshots[-1].step == n_total:
        final = snapshots[-1]
    else:
        final = Snapshot(round(n_total * dt, 12), n_total, tuple(idst1(c) for c in coeffs))
    if not snapshots:
        snapshots = [final]
    return Trajectory(snapshots, final)
