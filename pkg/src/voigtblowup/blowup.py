"""Alpha-scaling blow-up analysis.

For each regularization length ``alpha`` and horizon ``T`` the tracked
quantity is ``Q(alpha, T) = max_{0 <= t <= T} ||grad u^alpha(t)||``. If
``Q ~ alpha^p`` with ``p <= -1`` as ``alpha -> 0`` then ``alpha * Q`` stays
bounded away from zero, which signals a singularity of the unregularized
equation by time ``T``. The exponent is estimated from finite differences in
log-log coordinates between neighbouring ``alpha`` values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .diagnostics import DiagnosticSeries

CRITICAL_SLOPE = -1.0
TIME_MATCH_TOL = 1e-9

BBM_HORIZONS = np.round(np.arange(65, 126) * 0.01, 10)
EV3D_HORIZONS = np.round(np.arange(0, 51) * 0.1, 10)


@dataclass
class SlopeTable:
    alphas: np.ndarray
    t_grid: np.ndarray
    q: np.ndarray  # (n_alpha, n_T)
    slopes: np.ndarray = field(default=None)  # (n_alpha - 1, n_T); row i pairs alphas[i], alphas[i+1]
    p_estimate: np.ndarray = field(default=None)  # (n_T,)
    fit_count: int = 2
    note: str = ""

    def __post_init__(self):
        self.alphas = np.asarray(self.alphas, dtype=float)
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        self.q = np.atleast_2d(np.asarray(self.q, dtype=float))
        if self.q.shape != (self.alphas.size, self.t_grid.size):
            raise ValueError(f"q has shape {self.q.shape}, expected {(self.alphas.size, self.t_grid.size)}")
        if np.any(self.alphas <= 0) or np.any(np.diff(self.alphas) <= 0):
            raise ValueError("alphas must be positive and strictly increasing")


@dataclass(frozen=True)
class Verdict:
    blow_up_indicated: bool
    earliest_T: float | None
    min_slope: float
    min_slope_T: float | None = None


def _match_indices(times: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    if t_grid.size and (t_grid.max() > times[-1] + TIME_MATCH_TOL or t_grid.min() < times[0] - TIME_MATCH_TOL):
        raise ValueError(f"horizons [{t_grid.min()}, {t_grid.max()}] exceed series range [{times[0]}, {times[-1]}]")
    idx = np.searchsorted(times, t_grid - TIME_MATCH_TOL)
    idx = np.minimum(idx, times.size - 1)
    bad = np.abs(times[idx] - t_grid) > TIME_MATCH_TOL
    if np.any(bad):
        raise ValueError(f"horizon {t_grid[bad][0]} is not a sample time of the series")
    return idx


def running_sup(series: DiagnosticSeries, t_grid: Sequence[float]) -> np.ndarray:
    """``Q(T_j)``: supremum of the gradient norm over every step with ``t <= T_j``."""
    times = np.asarray(series.times, dtype=float)
    if times.size == 0:
        raise ValueError("empty series")
    t_grid = np.asarray(t_grid, dtype=float)
    sup = np.maximum.accumulate(np.asarray(series.grad_norm, dtype=float))
    if len(series.running_sup_grad) == times.size:
        sup = np.maximum(sup, np.asarray(series.running_sup_grad, dtype=float))
    return sup[_match_indices(times, t_grid)]


def build_table(series: Sequence[DiagnosticSeries], t_grid: Sequence[float]) -> SlopeTable:
    """Stack ``Q`` rows of several runs (any order) into a table sorted by alpha."""
    runs = sorted(series, key=lambda s: s.alpha)
    alphas = [s.alpha for s in runs]
    if len(set(alphas)) != len(alphas):
        raise ValueError("duplicate alpha values")
    q = np.array([running_sup(s, t_grid) for s in runs]).reshape(len(runs), len(t_grid))
    return SlopeTable(alphas=alphas, t_grid=t_grid, q=q)


def loglog_slopes(table: SlopeTable, fit_count: int = 2) -> SlopeTable:
    """Fill pairwise log-log slopes and the per-horizon exponent estimate.

    ``p_estimate`` is the slope of the two smallest alphas, or with
    ``fit_count > 2`` the least-squares slope through the ``fit_count``
    smallest alphas.
    """
    if np.any(table.q <= 0) or not np.all(np.isfinite(table.q)):
        raise ValueError("Q entries must be positive and finite")
    n = table.alphas.size
    if n < 2:
        table.slopes = np.empty((0, table.t_grid.size))
        table.p_estimate = np.full(table.t_grid.size, np.nan)
        table.note = "slopes need at least two alpha values"
        return table
    if not 2 <= fit_count <= n:
        raise ValueError(f"fit_count must lie in [2, {n}]")
    la = np.log(table.alphas)
    lq = np.log(table.q)
    table.slopes = np.diff(lq, axis=0) / np.diff(la)[:, None]
    if fit_count == 2:
        table.p_estimate = table.slopes[0].copy()
    else:
        x = la[:fit_count] - la[:fit_count].mean()
        y = lq[:fit_count] - lq[:fit_count].mean(axis=0)
        table.p_estimate = x @ y / (x @ x)
    table.fit_count = fit_count
    return table


def verdict(table: SlopeTable, threshold: float = CRITICAL_SLOPE) -> Verdict:
    p = table.p_estimate
    if p is None:
        raise ValueError("slopes have not been computed")
    finite = np.isfinite(p)
    if not finite.any():
        return Verdict(False, None, float("nan"))
    hits = np.nonzero(finite & (p <= threshold))[0]
    j = int(np.nanargmin(p))
    earliest = float(table.t_grid[hits[0]]) if hits.size else None
    return Verdict(earliest is not None, earliest, float(p[j]), float(table.t_grid[j]))


@dataclass
class SMinTable:
    nus: np.ndarray
    s_min: np.ndarray
    alpha_lo: float
    alpha_hi: float
    mode: str

    def crossing(self, level: float = CRITICAL_SLOPE) -> float | None:
        """Viscosity where ``S_min`` first reaches ``level``, interpolated in ``log nu``."""
        s = self.s_min
        for i in range(len(s) - 1):
            if (s[i] - level) * (s[i + 1] - level) <= 0 and s[i] != s[i + 1]:
                w = (level - s[i]) / (s[i + 1] - s[i])
                ln = np.log(self.nus[i]) + w * (np.log(self.nus[i + 1]) - np.log(self.nus[i]))
                return float(np.exp(ln))
        return None


def s_min_of_nu(
    runs: Mapping[float, tuple[DiagnosticSeries, DiagnosticSeries]],
    t_grid: Sequence[float] | None = None,
    mode: str = "loglog",
) -> SMinTable:
    """Minimum slope between two fixed alphas as a function of viscosity.

    ``runs`` maps each ``nu`` to its ``(alpha_lo, alpha_hi)`` pair of series.
    ``mode="loglog"`` minimizes the log-log slope of ``Q`` over the horizons
    ``t_grid`` (default: every positive sample time). ``mode="literal"``
    minimizes the raw difference quotient
    ``(||u^{a2}_x(t)|| - ||u^{a1}_x(t)||) / (a2 - a1)`` over positive sample
    times up to the last horizon.
    """
    if mode not in ("loglog", "literal"):
        raise ValueError(f"unknown mode {mode!r}")
    nus = sorted(runs)
    out = []
    pair = None
    for nu in nus:
        lo, hi = sorted(runs[nu], key=lambda s: s.alpha)
        if lo.alpha == hi.alpha:
            raise ValueError("the two alpha values must differ")
        if pair is None:
            pair = (lo.alpha, hi.alpha)
        elif pair != (lo.alpha, hi.alpha):
            raise ValueError("every viscosity must use the same alpha pair")
        t_lo, t_hi = np.asarray(lo.times), np.asarray(hi.times)
        if t_lo.shape != t_hi.shape or np.any(np.abs(t_lo - t_hi) > TIME_MATCH_TOL):
            raise ValueError("the two runs do not share a time grid")
        horizons = t_lo[t_lo > 0] if t_grid is None else np.asarray(t_grid, dtype=float)
        if mode == "loglog":
            table = loglog_slopes(build_table([lo, hi], horizons))
            out.append(float(np.min(table.slopes[0])))
        else:
            idx = _match_indices(t_lo, horizons)
            upto = (t_lo > 0) & (t_lo <= t_lo[idx].max() + TIME_MATCH_TOL)
            diff = (np.asarray(hi.grad_norm) - np.asarray(lo.grad_norm)) / (hi.alpha - lo.alpha)
            out.append(float(np.min(diff[upto])))
    return SMinTable(np.asarray(nus, dtype=float), np.asarray(out), pair[0], pair[1], mode)
