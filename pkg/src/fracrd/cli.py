"""Command line entry point: ``fracrd run|sweep|check``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .config import PRESETS, ConfigError, RunConfig, resolve
from .runner import EXIT_OK, EXIT_USAGE, run, sweep


def _list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracrd", description="Fractional reaction-diffusion solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, multi: bool) -> None:
        p.add_argument("--preset", help=f"one of: {', '.join(PRESETS)}")
        p.add_argument("--config", type=Path, help="INI-style config file")
        order = _list if multi else float
        p.add_argument("--alpha", type=order if multi else float)
        p.add_argument("--beta", type=order if multi else float)
        p.add_argument("--n", type=int, help="interior points per axis")
        p.add_argument("--dt", type=float)
        p.add_argument("--T", dest="T", type=float, help="final time")
        p.add_argument("--scheme", choices=["paper", "coxmatthews"])
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--formats", help="comma list drawn from bin,csv,pgm")

    common(sub.add_parser("run", help="run one experiment"), multi=False)
    sp = sub.add_parser("sweep", help="independent runs over a list of alpha or beta values")
    common(sp, multi=True)
    sp.add_argument("--jobs", type=int, default=1, help="parallel runs")
    common(sub.add_parser("check", help="validate a config and run quick self-checks"), multi=False)
    return parser


def _overrides(args, alpha=None, beta=None) -> dict:
    formats = None
    if args.formats:
        formats = tuple(x.strip().lower() for x in args.formats.split(",") if x.strip())
    return {
        "grid": {"n": args.n, "nx": args.n, "ny": args.n},
        "model": {"alpha": alpha, "beta": beta},
        "time": {"dt": args.dt, "t": args.T, "scheme": args.scheme},
        "output": {"dir": str(args.out) if args.out else None, "formats": formats},
    }


def _load(args, alpha=None, beta=None) -> RunConfig:
    text = args.config.read_text() if args.config else ""
    return resolve(text, args.preset, _overrides(args, alpha, beta))


def _self_check(cfg: RunConfig) -> list[str]:
    from .grid import dst1, idst1
    from .phi import TAYLOR_RADIUS, _direct, _taylor

    rng = np.random.default_rng(cfg.seed)
    u = rng.uniform(-1, 1, cfg.grid.shape)
    roundtrip = float(np.abs(idst1(dst1(u)) - u).max() / np.abs(u).max())
    z = np.array([-TAYLOR_RADIUS])
    branch = max(float(abs(_taylor(j, z)[0] - _direct(j, z)[0]) / _direct(j, z)[0]) for j in (1, 2, 3))
    lines = [
        f"{'PASS' if roundtrip < 1e-12 else 'FAIL'} transform roundtrip rel err {roundtrip:.3g}",
        f"{'PASS' if branch < 1e-13 else 'FAIL'} phi branch continuity rel err {branch:.3g}",
    ]
    return lines


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "sweep":
            if args.alpha and args.beta:
                raise ConfigError("sweep over either --alpha or --beta, not both")
            if not (args.alpha or args.beta):
                raise ConfigError("sweep needs --alpha or --beta with a comma-separated list")
            param, values = ("alpha", args.alpha) if args.alpha else ("beta", args.beta)
            kw = {param: values[0]}
            cfg = _load(args, **kw)
            code, out = sweep(cfg, param, values, args.out or Path(cfg.out_dir), jobs=args.jobs)
            print(f"sweep written to {out} (worst exit status {code})")
            return code
        cfg = _load(args, args.alpha, args.beta)
    except (ConfigError, OSError) as exc:
        print(f"fracrd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "check":
        print(cfg.echo(), end="")
        lines = _self_check(cfg)
        print("\n".join(lines))
        return EXIT_OK if all(line.startswith("PASS") for line in lines) else 1

    result = run(cfg)
    for m in result.monitors:
        print(m.line())
    print(f"run written to {result.out_dir}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
