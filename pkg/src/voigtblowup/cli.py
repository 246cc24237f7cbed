"""Command-line interface: ``voigt-blowup {run,sweep,analyze,oracle}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .blowup import BBM_HORIZONS, EV3D_HORIZONS
from .config import _KEYS, DEFAULT_BBM_ALPHAS, DEFAULT_EV3D_ALPHAS, ConfigError, _convert, build_config, parse_values
from .models import Model
from .oracle import CharacteristicSolution, burgers_blowup_time, burgers_eval, burgers_grad_norm
from .sweep import SweepError, analyze, default_workers, load_series_dir, run_single, run_sweep, write_analysis

log = logging.getLogger("voigtblowup")

# flag -> config key
_OVERRIDES = {
    "model": "model",
    "n": "n",
    "alpha": "alpha",
    "nu": "nu",
    "cfl": "cfl",
    "t_end": "t_end",
    "sample_interval": "sample_interval",
    "horizons": "horizons",
    "output": "output",
    "checkpoint_every": "checkpoint_every",
    "spectrum_every": "spectrum_every",
    "fit_count": "fit_count",
}


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value configuration file")
    for flag in _OVERRIDES:
        p.add_argument("--" + flag.replace("_", "-"), dest=flag, metavar="VALUE",
                       help=f"override '{_OVERRIDES[flag]}' from the config file")


def _resolve_config(args):
    values = parse_values(args.config.read_text(encoding="utf-8")) if args.config else {}
    for flag, key in _OVERRIDES.items():
        raw = getattr(args, flag)
        if raw is not None:
            values[_KEYS[key]] = _convert(key, raw)
    if "model" in values and "alphas" not in values:
        values["alphas"] = DEFAULT_EV3D_ALPHAS if values["model"] is Model.EV3D else DEFAULT_BBM_ALPHAS
    return build_config(values)


def cmd_run(args) -> int:
    cfg = _resolve_config(args)
    if len(cfg.alphas) != 1 or len(cfg.nus) != 1:
        raise ConfigError("'run' takes exactly one alpha and one nu; use 'sweep' for lists")
    cfg.output.mkdir(parents=True, exist_ok=True)
    series = run_single(cfg, cfg.alphas[0], cfg.nus[0])
    log.info("wrote %s (%d samples)", cfg.output / io.series_filename(cfg.alphas[0], cfg.nus[0]), len(series))
    return 0


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    workers = args.workers or default_workers()
    _, result = run_sweep(cfg, workers=workers)
    for nu, v in sorted(result.verdicts.items()):
        print(f"nu={io.fmt(nu)} blow_up_indicated={io.fmt(v.blow_up_indicated)} "
              f"earliest_T={io.fmt(v.earliest_T)} min_slope={io.fmt(v.min_slope)}")
    for note in result.notes:
        print(note)
    return 0


def cmd_analyze(args) -> int:
    series = load_series_dir(args.input)
    if args.horizons:
        horizons = _convert("horizons", args.horizons)
    else:
        default = EV3D_HORIZONS if Model(args.model) is Model.EV3D else BBM_HORIZONS
        t_last = min(s.times[-1] for s in series)
        horizons = [T for T in default if T <= t_last + 1e-12]
    result = analyze(series, horizons, args.fit_count)
    out = args.output or args.input
    write_analysis(out, result)
    for nu, v in sorted(result.verdicts.items()):
        print(f"nu={io.fmt(nu)} blow_up_indicated={io.fmt(v.blow_up_indicated)} "
              f"earliest_T={io.fmt(v.earliest_T)} min_slope={io.fmt(v.min_slope)}")
    return 0


def cmd_oracle(args) -> int:
    sol = CharacteristicSolution(amplitude=args.amplitude)
    out = args.output
    out.mkdir(parents=True, exist_ok=True)
    tstar = burgers_blowup_time(args.amplitude)
    times = _convert("horizons", args.times) if args.times else tuple(np.round(np.arange(0, 100) * 0.01 * tstar, 12))
    rows = [(t, burgers_grad_norm(t, sol)) for t in times]
    io.write_table(out / "burgers_grad_norm.csv", ("t", "grad_norm"), rows)
    if args.profile is not None:
        x = -np.pi + 2 * np.pi * np.arange(args.points) / args.points
        u = burgers_eval(x, args.profile, sol)
        io.write_table(out / f"burgers_profile_t={io.fmt(args.profile)}.csv", ("x", "u"), zip(x, u))
    print(f"blow-up time {io.fmt(tstar)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voigt-blowup", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single integration")
    _add_run_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="alpha/nu sweep with slope analysis")
    _add_run_options(p)
    p.add_argument("--workers", type=int, help="parallel jobs (default: $VOIGT_WORKERS or CPU count)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="recompute slopes and verdicts from diagnostics files")
    p.add_argument("input", type=Path, help="directory holding diag_alpha=*_nu=*.csv files")
    p.add_argument("--model", default="bbm", choices=[m.value for m in Model], help="selects default horizons")
    p.add_argument("--horizons", help="horizon list or start:step:stop range")
    p.add_argument("--fit-count", type=int, default=2)
    p.add_argument("--output", type=Path)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", help="Burgers reference tables by characteristics")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--times", help="time list or start:step:stop range (default: 0 to 0.99 T*)")
    p.add_argument("--profile", type=float, help="also tabulate u(x, t) at this time")
    p.add_argument("--points", type=int, default=1024)
    p.add_argument("--output", type=Path, default=Path("oracle"))
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, SweepError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
