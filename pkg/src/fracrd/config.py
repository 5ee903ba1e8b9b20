"""Run configuration: INI-style text, built-in presets and validation.

Layout::

    preset = "nagumo-fig1"      # optional top-level keys: preset, seed
    [grid]     n, nx, ny, L, lx, ly
    [model]    type, a, delta, u_minus, u_mid, u_plus, eps2, alpha, beta,
               F, kappa, r_u, r_v, g_u, g_v
    [initial]  shape, center_x, center_y, size, u, v, mollifier_width, noise
    [time]     dt, T, scheme, snapshot_every, snapshots
    [output]   dir, formats, thresholds, write_every

Later sources override earlier ones: preset < config text < command-line flags.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from typing import Any, Mapping

from .grid import Grid2D
from .models import BistableModel, GrayScottModel
from .operator import FractionalDiffusion
from .stepper import Scheme


class ConfigError(ValueError):
    pass


BISTABLE_TYPES = ("nagumo", "allen-cahn", "bistable")
MODEL_TYPES = BISTABLE_TYPES + ("gray-scott",)
FORMATS = ("bin", "csv", "pgm")

# section -> key -> parser
_FLOAT, _INT, _STR = float, int, str


def _float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(x) for x in text.split(","))


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip().lower() for x in text.split(",") if x.strip())


SCHEMA: dict[str, dict[str, Any]] = {
    "run": {"preset": _STR, "seed": _INT},
    "grid": {"n": _INT, "nx": _INT, "ny": _INT, "l": _FLOAT, "lx": _FLOAT, "ly": _FLOAT},
    "model": {
        "type": _STR, "a": _FLOAT, "delta": _FLOAT, "u_minus": _FLOAT, "u_mid": _FLOAT,
        "u_plus": _FLOAT, "eps2": _FLOAT, "alpha": _FLOAT, "beta": _FLOAT, "f": _FLOAT,
        "kappa": _FLOAT, "r_u": _FLOAT, "r_v": _FLOAT, "g_u": _FLOAT, "g_v": _FLOAT,
    },
    "initial": {
        "shape": _STR, "center_x": _FLOAT, "center_y": _FLOAT, "size": _FLOAT,
        "u": _FLOAT, "v": _FLOAT, "mollifier_width": _FLOAT, "noise": _FLOAT,
    },
    "time": {"dt": _FLOAT, "t": _FLOAT, "scheme": _STR, "snapshot_every": _FLOAT,
             "snapshots": _float_list},
    "output": {"dir": _STR, "formats": _str_list, "thresholds": _float_list, "write_every": _FLOAT},
}

_NAGUMO_FIG1 = {
    "grid": {"l": 2.0, "n": 512},
    "model": {"type": "nagumo", "a": 0.35, "delta": 1e-2, "eps2": 5e-3},
    "initial": {"shape": "disk", "center_x": 1.0, "center_y": 1.0, "size": 0.02, "u": 0.5},
    "time": {"dt": 1e-3, "t": 5.0, "snapshot_every": 0.05},
    "output": {"thresholds": (0.5,)},
}


def _gs_preset(F: float, kappa: float, T: float) -> dict:
    return {
        "grid": {"l": 1.0, "n": 512},
        "model": {"type": "gray-scott", "f": F, "kappa": kappa, "r_u": 1e-6, "r_v": 5e-7,
                  "alpha": 0.95, "beta": 0.85},
        "initial": {"shape": "square", "center_x": 0.5, "center_y": 0.5, "size": 0.04,
                    "u": 0.5, "v": 0.25},
        "time": {"dt": 1.0, "t": T, "snapshot_every": 10.0},
    }


PRESETS: dict[str, dict] = {
    "nagumo-fig1": _NAGUMO_FIG1,
    "gs-rings": _gs_preset(0.026, 0.063, 4000.0),
    "gs-rings-2": _gs_preset(0.026, 0.061, 4000.0),
    "gs-spots": _gs_preset(0.03, 0.058, 2000.0),
    "allen-cahn": {
        "grid": {"l": 2.0, "n": 128},
        "model": {"type": "allen-cahn", "delta": 1e-2, "eps2": 5e-3, "alpha": 0.85},
        "initial": {"shape": "disk", "center_x": 1.0, "center_y": 1.0, "size": 0.3, "u": 1.0},
        "time": {"dt": 1e-3, "t": 1.0, "snapshot_every": 0.05},
        "output": {"thresholds": (0.0,)},
    },
}


@dataclass(frozen=True)
class InitialCondition:
    """Plateau values (unshifted variables) on a disk or max-norm square.

    Outside the region every component equals its boundary value; the edge is
    smoothed over ``mollifier_width`` (None = 2 max(hx, hy)).
    """

    shape: str
    center: tuple[float, float]
    size: float
    values: tuple[float, ...]
    mollifier_width: float | None = None
    noise: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    model: BistableModel | GrayScottModel
    model_type: str
    grid: Grid2D
    dt: float
    T: float
    scheme: Scheme
    snapshot_times: tuple[float, ...]
    initial: InitialCondition
    eps2: float | None = None
    alpha: float | None = None
    preset: str | None = None
    out_dir: str = "fracrd-out"
    formats: tuple[str, ...] = ("bin",)
    thresholds: tuple[float, ...] = (0.5,)
    write_every: float | None = None
    seed: int = 0
    snapshot_every: float | None = None

    @property
    def boundary_values(self) -> tuple[float, ...]:
        return tuple(self.model.boundary_values)

    @property
    def component_names(self) -> tuple[str, ...]:
        return self.model.names

    @property
    def orders(self) -> tuple[float, ...]:
        if isinstance(self.model, GrayScottModel):
            return (self.model.alpha, self.model.beta)
        return (self.alpha,)

    def operators(self) -> list[FractionalDiffusion]:
        if isinstance(self.model, GrayScottModel):
            m = self.model
            return [FractionalDiffusion(self.grid, m.alpha, m.r_u, 1.0),
                    FractionalDiffusion(self.grid, m.beta, m.r_v, 0.0)]
        return [FractionalDiffusion(self.grid, self.alpha, self.eps2, self.model.u_minus)]

    def echo(self) -> str:
        """Fully resolved config text; ``parse_config(cfg.echo())`` reproduces ``cfg``."""
        g, m, ic = self.grid, self.model, self.initial
        lines = [f"seed = {self.seed}"]
        if self.preset:
            lines.insert(0, f'# resolved from preset "{self.preset}"')
        lines += ["", "[grid]", f"nx = {g.Nx}", f"ny = {g.Ny}", f"lx = {g.Lx!r}", f"ly = {g.Ly!r}"]
        lines += ["", "[model]", f"type = {self.model_type}"]
        if isinstance(m, GrayScottModel):
            lines += [f"F = {m.F!r}", f"kappa = {m.kappa!r}", f"r_u = {m.r_u!r}", f"r_v = {m.r_v!r}",
                      f"alpha = {m.alpha!r}", f"beta = {m.beta!r}", "g_u = 1.0", "g_v = 0.0"]
        else:
            if self.model_type == "nagumo":
                lines.append(f"a = {m.u_mid!r}")
            elif self.model_type == "bistable":
                lines += [f"u_minus = {m.u_minus!r}", f"u_mid = {m.u_mid!r}", f"u_plus = {m.u_plus!r}"]
            lines += [f"delta = {m.delta!r}", f"eps2 = {self.eps2!r}", f"alpha = {self.alpha!r}",
                      f"g_u = {m.u_minus!r}"]
        lines += ["", "[initial]", f"shape = {ic.shape}", f"center_x = {ic.center[0]!r}",
                  f"center_y = {ic.center[1]!r}", f"size = {ic.size!r}", f"u = {ic.values[0]!r}"]
        if len(ic.values) > 1:
            lines.append(f"v = {ic.values[1]!r}")
        if ic.mollifier_width is not None:
            lines.append(f"mollifier_width = {ic.mollifier_width!r}")
        lines.append(f"noise = {ic.noise!r}")
        lines += ["", "[time]", f"dt = {self.dt!r}", f"T = {self.T!r}", f"scheme = {self.scheme.value}"]
        if self.snapshot_every is not None:
            lines.append(f"snapshot_every = {self.snapshot_every!r}")
        else:
            lines.append("snapshots = " + ", ".join(repr(t) for t in self.snapshot_times))
        lines += ["", "[output]", f"dir = {self.out_dir}", "formats = " + ",".join(self.formats),
                  "thresholds = " + ", ".join(repr(t) for t in self.thresholds)]
        if self.write_every is not None:
            lines.append(f"write_every = {self.write_every!r}")
        return "\n".join(lines) + "\n"


def _parse_text(text: str) -> dict[str, dict[str, Any]]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str.lower
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    out: dict[str, dict[str, Any]] = {}
    for section in parser.sections():
        if section.lower() not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]; expected one of {sorted(SCHEMA)}")
        schema = SCHEMA[section.lower()]
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(f"unknown key '{key}' in [{section}]")
            value = raw.strip().strip('"').strip("'")
            try:
                out.setdefault(section.lower(), {})[key] = schema[key](value)
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key} = {raw!r}: cannot parse ({exc})") from exc
    return out


def _merge(base: dict, extra: Mapping) -> dict:
    merged = {s: dict(v) for s, v in base.items()}
    for section, values in extra.items():
        for key, value in values.items():
            if value is not None:
                merged.setdefault(section, {})[key] = value
    return merged


def resolve(text: str = "", preset: str | None = None,
            overrides: Mapping[str, Mapping[str, Any]] | None = None) -> RunConfig:
    """Combine a preset, config text and overrides into a validated RunConfig."""
    settings = _parse_text(text) if text else {}
    preset = preset or settings.get("run", {}).get("preset")
    base: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; available presets: {', '.join(PRESETS)}")
        base = PRESETS[preset]
    merged = _merge(_merge(base, settings), overrides or {})
    return _build(merged, preset)


def parse_config(text: str) -> RunConfig:
    return resolve(text)


def _need(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing required key '{key}' in [{where}]")
    return section[key]


def _check(cond: bool, key: str, value, constraint: str):
    if not cond:
        raise ConfigError(f"{key} = {value!r}: {constraint}")


def _build(s: dict, preset: str | None) -> RunConfig:
    run, grid_s, model_s = s.get("run", {}), s.get("grid", {}), s.get("model", {})
    init_s, time_s, out_s = s.get("initial", {}), s.get("time", {}), s.get("output", {})

    # grid
    nx = grid_s.get("nx", grid_s.get("n"))
    ny = grid_s.get("ny", grid_s.get("n"))
    lx = grid_s.get("lx", grid_s.get("l"))
    ly = grid_s.get("ly", grid_s.get("l"))
    for key, value in (("nx", nx), ("ny", ny), ("lx", lx), ("ly", ly)):
        if value is None:
            raise ConfigError(f"missing required key '{key}' (or n / L) in [grid]")
    _check(nx >= 1 and ny >= 1, "grid.n", (nx, ny), "grid needs at least one interior node per axis")
    _check(lx > 0 and ly > 0, "grid.L", (lx, ly), "domain lengths must be positive")
    grid = Grid2D(float(lx), float(ly), int(nx), int(ny))

    # model
    mtype = _need(model_s, "type", "model").lower()
    _check(mtype in MODEL_TYPES, "model.type", mtype, f"must be one of {', '.join(MODEL_TYPES)}")

    def order(key: str) -> float:
        value = _need(model_s, key, "model")
        _check(0.0 < value <= 1.0, f"model.{key}", value, f"{key} must lie in (0,1]")
        return value

    eps2 = alpha = None
    if mtype == "gray-scott":
        for key in ("f", "kappa", "r_u", "r_v"):
            _check(_need(model_s, key, "model") > 0, f"model.{key}", model_s[key], "must be positive")
        for key, fixed in (("g_u", 1.0), ("g_v", 0.0)):
            if key in model_s:
                _check(model_s[key] == fixed, f"model.{key}", model_s[key],
                       f"Gray-Scott boundary value is fixed at {fixed}")
        model = GrayScottModel(model_s["f"], model_s["kappa"], model_s["r_u"], model_s["r_v"],
                               order("alpha"), order("beta"))
        if "eps2" in model_s:
            raise ConfigError("model.eps2 does not apply to gray-scott (use r_u, r_v)")
    else:
        if mtype == "nagumo":
            model = BistableModel.nagumo(model_s.get("a", 0.35), model_s.get("delta", 1e-2))
        elif mtype == "allen-cahn":
            model = BistableModel.allen_cahn(model_s.get("delta", 1.0))
        else:
            try:
                model = BistableModel(_need(model_s, "u_minus", "model"), _need(model_s, "u_mid", "model"),
                                      _need(model_s, "u_plus", "model"), model_s.get("delta", 1.0))
            except ValueError as exc:
                raise ConfigError(f"model: {exc}") from exc
        _check(model.delta > 0, "model.delta", model.delta,
               "delta must be positive so u_minus and u_plus are the stable zeros")
        if "g_u" in model_s:
            _check(model_s["g_u"] == model.u_minus, "model.g_u", model_s["g_u"],
                   "bistable boundary value must equal u_minus")
        if "beta" in model_s or "g_v" in model_s:
            raise ConfigError("beta / g_v only apply to two-component models")
        eps2 = _need(model_s, "eps2", "model")
        _check(eps2 >= 0, "model.eps2", eps2, "diffusion coefficient must be >= 0")
        alpha = order("alpha")

    # initial condition
    shape = init_s.get("shape", "disk").lower()
    _check(shape in ("disk", "square"), "initial.shape", shape, "must be 'disk' or 'square'")
    center = (init_s.get("center_x", lx / 2), init_s.get("center_y", ly / 2))
    size = _need(init_s, "size", "initial")
    _check(size > 0, "initial.size", size, "must be positive")
    values = (_need(init_s, "u", "initial"),)
    if model.component_count == 2:
        values += (_need(init_s, "v", "initial"),)
    moll = init_s.get("mollifier_width")
    if moll is not None:
        _check(moll >= 0, "initial.mollifier_width", moll, "must be >= 0")
    noise = init_s.get("noise", 0.0)
    _check(noise >= 0, "initial.noise", noise, "must be >= 0")
    initial = InitialCondition(shape, (float(center[0]), float(center[1])), float(size), values, moll, noise)

    # time
    dt = _need(time_s, "dt", "time")
    T = _need(time_s, "t", "time")
    _check(dt > 0 and math.isfinite(dt), "time.dt", dt, "must be positive")
    _check(T >= 0 and math.isfinite(T), "time.T", T, "must be >= 0")
    try:
        scheme = Scheme.parse(time_s.get("scheme", "coxmatthews"))
    except ValueError as exc:
        raise ConfigError(f"time.scheme: {exc}") from exc
    every = time_s.get("snapshot_every")
    if "snapshots" in time_s and time_s["snapshots"]:
        times = tuple(sorted(time_s["snapshots"]))
        every = None
    elif every is not None:
        _check(every > 0, "time.snapshot_every", every, "must be positive")
        count = int(math.floor(T / every + 1e-9))
        times = tuple(round(i * every, 12) for i in range(count + 1))
        if times[-1] < T - 1e-12:
            times += (T,)
    else:
        times = (0.0, T)
    for t in times:
        _check(0 <= t <= T * (1 + 1e-12), "time.snapshots", t, f"snapshot times must lie in [0, {T}]")

    formats = tuple(out_s.get("formats", ("bin",)))
    for f in formats:
        _check(f in FORMATS, "output.formats", f, f"must be drawn from {', '.join(FORMATS)}")
    write_every = out_s.get("write_every")
    if write_every is not None:
        _check(write_every > 0, "output.write_every", write_every, "must be positive")

    return RunConfig(
        model=model, model_type=mtype, grid=grid, dt=float(dt), T=float(T), scheme=scheme,
        snapshot_times=times, initial=initial, eps2=eps2, alpha=alpha, preset=preset,
        out_dir=out_s.get("dir", "fracrd-out"), formats=formats,
        thresholds=tuple(out_s.get("thresholds", (0.5,))), write_every=write_every,
        seed=run.get("seed", 0), snapshot_every=every,
    )
