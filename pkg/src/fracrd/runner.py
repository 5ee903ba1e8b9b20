"""Run a configured experiment: integrate, monitor, and write the run directory.

A run directory holds ``config.echo``, ``diagnostics.csv``, ``summary.txt`` and
``snapshots/``. Diagnostics are reported in the shifted (zero-boundary)
variables the solver evolves; snapshot files hold the original variables.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import diagnostics as diag
from .config import RunConfig
from .grid import Grid2D
from .initial import build_initial_condition
from .io import write_binary, write_csv, write_pgm, write_table
from .models import BistableModel, GrayScottModel, invariant_bounds
from .stepper import SolverDivergenceError, StepperConfig, integrate

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_MONITOR_FAILED, EXIT_USAGE, EXIT_DIVERGED = 0, 1, 2, 3
INTERIOR_MARGIN = 0.1


@dataclass
class Monitor:
    name: str
    status: str  # PASS, FAIL or N/A
    value: float | None = None
    detail: str = ""
    hard: bool = True

    def line(self) -> str:
        kind = "hard" if self.hard else "soft"
        value = "" if self.value is None else f" value={self.value:.6g}"
        detail = f" ({self.detail})" if self.detail else ""
        return f"{self.status:4s} {self.name} [{kind}]{value}{detail}"


@dataclass
class RunResult:
    cfg: RunConfig
    records: list[diag.DiagnosticRecord]
    monitors: list[Monitor]
    final: tuple[np.ndarray, ...] | None
    out_dir: Path | None
    diverged: str | None = None
    snapshot_fields: list[tuple[float, tuple[np.ndarray, ...]]] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.diverged:
            return EXIT_DIVERGED
        if any(m.hard and m.status == "FAIL" for m in self.monitors):
            return EXIT_MONITOR_FAILED
        return EXIT_OK

    def monitor(self, name: str) -> Monitor:
        for m in self.monitors:
            if m.name == name:
                return m
        raise KeyError(name)


class _Recorder:
    """Diagnostic hook: builds one DiagnosticRecord per snapshot time."""

    def __init__(self, cfg: RunConfig, ops, state0, out_dir: Path | None, keep_fields: bool):
        self.cfg = cfg
        self.ops = ops
        self.model = cfg.model
        self.grid: Grid2D = cfg.grid
        self.bounds = invariant_bounds(self.model, state0)
        self.records: list[diag.DiagnosticRecord] = []
        self.out_dir = out_dir
        self.keep_fields = keep_fields
        self.kept: list[tuple[float, tuple[np.ndarray, ...]]] = []
        self.v_times: list[float] = []
        self.v_history: list[np.ndarray] = []
        self.weighted = None
        if isinstance(self.model, GrayScottModel):
            self.u0_original = state0[0] + 1.0
            self.weighted = diag.WeightedIntegral(ops[0], self.u0_original)
        self._next_write = 0.0

    def __call__(self, t: float, fields: tuple[np.ndarray, ...]) -> None:
        cfg, grid = self.cfg, self.grid
        original = tuple(f + g for f, g in zip(fields, cfg.boundary_values))
        rec = diag.DiagnosticRecord(
            t=t,
            minima=tuple(float(f.min()) for f in fields),
            maxima=tuple(float(f.max()) for f in fields),
            l2_norms=tuple(diag.l2_norm(f, grid) for f in fields),
            range_violation=diag.range_monitor(self.bounds, fields, t),
            stationarity_residual=diag.stationarity_residual(self.ops, self.model, fields),
        )
        if isinstance(self.model, BistableModel):
            rec.energy = diag.energy(self.model, self.ops[0], fields[0])
            rec.area_theta = {th: diag.superlevel_area(original[0], th, grid) for th in cfg.thresholds}
        if self.weighted is not None:
            lhs, rhs = self.weighted.update(t, fields[1])
            rec.weighted_v_integral, rec.weighted_bound_rhs = lhs, rhs
            self.v_times.append(t)
            self.v_history.append(fields[1])
        self.records.append(rec)
        if self.keep_fields:
            self.kept.append((t, fields))
        self._maybe_write(t, original)

    def _maybe_write(self, t: float, original) -> None:
        if self.out_dir is None:
            return
        every = self.cfg.write_every if self.cfg.write_every is not None else self.cfg.T / 10 or 1.0
        final = math.isclose(t, self.cfg.T, rel_tol=1e-9, abs_tol=1e-12)
        if t + 1e-9 * max(1.0, every) < self._next_write and not final:
            return
        while self._next_write <= t + 1e-9 * max(1.0, every):
            self._next_write += every
        write_snapshot(self.out_dir / "snapshots", original, self.cfg, t)


def write_snapshot(directory: Path, original: Sequence[np.ndarray], cfg: RunConfig, t: float) -> list[Path]:
    """Write one snapshot (original variables) in every configured format."""
    directory.mkdir(parents=True, exist_ok=True)
    step = int(round(t / cfg.dt))
    stem = f"snap_{step:08d}"
    written = []
    if "bin" in cfg.formats:
        written.append(write_binary(directory / f"{stem}.frde", original, cfg.grid, t))
    if "csv" in cfg.formats:
        written.append(write_csv(directory / f"{stem}.csv", original, cfg.grid, cfg.component_names))
    if "pgm" in cfg.formats:
        for name, f in zip(cfg.component_names, original):
            written.append(write_pgm(directory / f"{stem}_{name}.pgm", f))
    return written


def _monitors(rec: _Recorder, cfg: RunConfig) -> list[Monitor]:
    records = rec.records
    out: list[Monitor] = []
    tol = diag.THEOREM_TOL
    if isinstance(cfg.model, BistableModel) and len(records) >= 2:
        jump, ok = diag.dissipation_check([r.energy for r in records])
        out.append(Monitor("energy_dissipation", "PASS" if ok else "FAIL", jump,
                           f"max energy increase, tol {tol:g}*(1+|E0|)"))
    for i, (name, bound) in enumerate(zip(cfg.component_names, rec.bounds)):
        sides = []
        if bound.lower_applicable:
            sides.append("lower")
        if bound.upper_applicable:
            sides.append("upper")
        if not sides:
            out.append(Monitor(f"range_{name}", "N/A", detail="initial data violates the hypotheses"))
            continue
        worst = max(r.range_violation[i] for r in records)
        skipped = {"lower", "upper"} - set(sides)
        detail = "checked: " + "+".join(sides)
        if skipped:
            detail += "; not applicable: " + "+".join(sorted(skipped))
        out.append(Monitor(f"range_{name}", "PASS" if worst <= tol else "FAIL", worst, detail))
    if isinstance(cfg.model, GrayScottModel):
        if rec.weighted is not None and rec.weighted.applicable:
            ratios = [r.weighted_v_integral / r.weighted_bound_rhs for r in records]
            worst = max(ratios)
            out.append(Monitor("weighted_v_bound", "PASS" if worst <= 1 + diag.WEIGHTED_SLACK else "FAIL",
                               worst, "max lhs/rhs"))
            if len(rec.v_times) >= 2:
                report = diag.interior_bound_report(rec.ops[0], rec.u0_original, rec.v_history,
                                                    rec.v_times, INTERIOR_MARGIN)
                out.append(Monitor("interior_v_bound", "PASS" if report["passed"] else "FAIL",
                                   report["lhs"] / report["rhs"],
                                   f"lhs/rhs on dist >= {INTERIOR_MARGIN}", hard=False))
        else:
            out.append(Monitor("weighted_v_bound", "N/A", detail="||u0||_inf > 1"))
    if len(records) >= 3:
        mid = records[len(records) // 2].stationarity_residual
        last = records[-1].stationarity_residual
        out.append(Monitor("stationarity_trend", "PASS" if last <= mid else "FAIL", last / mid if mid else 0.0,
                           "residual(T)/residual(T/2)", hard=False))
    return out


def run(cfg: RunConfig, out_dir: str | Path | None = None, write: bool = True,
        keep_fields: bool = False) -> RunResult:
    """Execute one run. With ``write=False`` nothing touches the filesystem."""
    target = Path(out_dir if out_dir is not None else cfg.out_dir) if write else None
    if target is not None:
        target.mkdir(parents=True, exist_ok=True)
        (target / "config.echo").write_text(cfg.echo())
    ops = cfg.operators()
    stepper = StepperConfig.build(ops, cfg.dt, cfg.scheme)
    state0 = build_initial_condition(cfg)
    recorder = _Recorder(cfg, ops, state0, target, keep_fields)
    diverged = None
    final = None
    try:
        traj = integrate(state0, cfg.model, stepper, cfg.T, cfg.snapshot_times, [recorder])
        final = traj.final.fields
    except SolverDivergenceError as exc:
        diverged = str(exc)
        logger.error("%s", exc)
    monitors = _monitors(recorder, cfg) if recorder.records else []
    if diverged:
        monitors.append(Monitor("solver", "FAIL", detail=diverged))
    result = RunResult(cfg, recorder.records, monitors, final, target, diverged, recorder.kept)
    if target is not None:
        rows = [r.row(cfg.component_names, cfg.thresholds) for r in recorder.records]
        write_table(target / "diagnostics.csv", rows)
        lines = [m.line() for m in monitors]
        lines.append(f"exit_status = {result.exit_code}")
        (target / "summary.txt").write_text("\n".join(lines) + "\n")
    return result


def _sweep_one(args):
    cfg, directory = args
    result = run(cfg, directory)
    return result.exit_code, [(r.t, dict(r.area_theta)) for r in result.records]


def sweep(cfg: RunConfig, param: str, values: Sequence[float], out_dir: str | Path,
          jobs: int = 1) -> tuple[int, Path]:
    """Independent runs over ``alpha`` or ``beta``; joins A_theta(t) into area_theta.csv."""
    if param not in ("alpha", "beta"):
        raise ValueError(f"can only sweep alpha or beta, got {param!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = []
    for value in values:
        if isinstance(cfg.model, GrayScottModel):
            variant = replace(cfg, model=replace(cfg.model, **{param: value}))
        elif param == "alpha":
            variant = replace(cfg, alpha=value)
        else:
            raise ValueError("beta only applies to two-component models")
        tasks.append((variant, out / f"{param}_{value:g}"))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, tasks))
    else:
        results = [_sweep_one(t) for t in tasks]
    if isinstance(cfg.model, BistableModel):
        rows = []
        for i, (t, _) in enumerate(results[0][1]):
            row = {"t": t}
            for value, (_, recs) in zip(values, results):
                for theta, area in recs[i][1].items():
                    row[f"area_{theta:g}[{param}={value:g}]"] = area
            rows.append(row)
        write_table(out / "area_theta.csv", rows)
    worst = max(code for code, _ in results)
    return worst, out
