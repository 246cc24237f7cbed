"""Single runs, (alpha, nu) sweeps and their analysis."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import io
from .blowup import SlopeTable, SMinTable, Verdict, build_table, loglog_slopes, s_min_of_nu, verdict
from .config import RunConfig
from .diagnostics import DiagnosticSeries, spectrum
from .models import initial_condition
from .timestep import IntegrationError, integrate

log = logging.getLogger(__name__)

WORKERS_ENV = "VOIGT_WORKERS"


class SweepError(RuntimeError):
    pass


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def run_single(cfg: RunConfig, alpha: float, nu: float) -> DiagnosticSeries:
    """Integrate one (alpha, nu) case and write its diagnostics, spectra and checkpoints."""
    params = cfg.params(alpha, nu)
    out = cfg.output
    tag = f"alpha={io.fmt(alpha)}_nu={io.fmt(nu)}"
    count = {"sample": 0}

    def on_sample(t, u):
        j = count["sample"]
        count["sample"] += 1
        if cfg.spectrum_every and j % cfg.spectrum_every == 0:
            kappa, e = spectrum(u)
            io.write_spectrum(out / "spectra" / f"spectrum_{tag}_t={io.fmt(t)}.csv", kappa, e)
        if cfg.checkpoint_every and j % cfg.checkpoint_every == 0:
            io.write_checkpoint(out / "checkpoints" / f"state_{tag}_t={io.fmt(t)}.bin", u, cfg.model, alpha, nu, t)

    series = integrate(initial_condition(cfg.grid, params), params, cfg.stepper, on_sample=on_sample)
    io.write_series(out / io.series_filename(alpha, nu), series)
    return series


def _job(args):
    cfg, alpha, nu = args
    try:
        return run_single(cfg, alpha, nu)
    except IntegrationError as exc:
        raise SweepError(f"integration failed for alpha={alpha!r}, nu={nu!r} at t={exc.t!r}") from exc


@dataclass
class Analysis:
    tables: dict[float, SlopeTable] = field(default_factory=dict)
    verdicts: dict[float, Verdict] = field(default_factory=dict)
    s_min: list[SMinTable] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def analyze(series: Sequence[DiagnosticSeries], horizons: Sequence[float], fit_count: int = 2) -> Analysis:
    """Slope tables and verdicts per viscosity, plus S_min when several viscosities share two alphas."""
    result = Analysis()
    by_nu: dict[float, list[DiagnosticSeries]] = {}
    for s in series:
        by_nu.setdefault(s.nu, []).append(s)
    for nu, runs in sorted(by_nu.items()):
        table = build_table(runs, horizons)
        loglog_slopes(table, fit_count=max(2, min(fit_count, len(runs))))
        result.tables[nu] = table
        if table.note:
            result.notes.append(f"nu={io.fmt(nu)}: {table.note}")
        else:
            result.verdicts[nu] = verdict(table)
    if len(by_nu) > 1 and all(len(r) >= 2 for r in by_nu.values()):
        pairs = {nu: tuple(sorted(r, key=lambda s: s.alpha)[:2]) for nu, r in by_nu.items()}
        if len({(lo.alpha, hi.alpha) for lo, hi in pairs.values()}) == 1:
            result.s_min.append(s_min_of_nu(pairs, horizons, mode="loglog"))
            result.s_min.append(s_min_of_nu(pairs, horizons, mode="literal"))
    return result


def write_analysis(out: Path, result: Analysis) -> None:
    out = Path(out)
    for nu, table in result.tables.items():
        io.write_q(out / f"q_nu={io.fmt(nu)}.csv", table)
        io.write_slopes(out / f"slopes_nu={io.fmt(nu)}.csv", table)
    io.write_verdicts(out / "verdicts.csv", result.verdicts)
    if result.s_min:
        io.write_s_min(out / "s_min.csv", result.s_min)
    if result.notes:
        (out / "notes.txt").write_text("\n".join(result.notes) + "\n")


def run_sweep(cfg: RunConfig, workers: int | None = None) -> tuple[list[DiagnosticSeries], Analysis]:
    """Run every (alpha, nu) combination and write the merged analysis.

    Jobs are independent and write to distinct files; the analysis is merged
    afterwards in this process. A verdict of blow-up is a result, not an error.
    """
    workers = workers or default_workers()
    jobs = [(cfg, a, nu) for nu in cfg.nus for a in cfg.alphas]
    cfg.output.mkdir(parents=True, exist_ok=True)
    if workers == 1 or len(jobs) == 1:
        series = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            series = list(pool.map(_job, jobs))
    result = analyze(series, cfg.horizons, cfg.fit_count)
    write_analysis(cfg.output, result)
    return series, result


def load_series_dir(path: Path) -> list[DiagnosticSeries]:
    files = sorted(Path(path).glob("diag_alpha=*_nu=*.csv"))
    if not files:
        raise FileNotFoundError(f"no diagnostics files in {path}")
    return [io.read_series(f) for f in files]
