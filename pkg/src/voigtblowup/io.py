"""Plain-text tables and binary checkpoints.

Tables are comma-separated with one header row; floats are written with 17
significant digits so they round-trip exactly.

Checkpoints carry a short text header followed by the stored (half-lattice)
coefficients as little-endian float64, real and imaginary parts interleaved,
component-major, modes in row-major order of the stored lattice.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .blowup import SlopeTable, SMinTable, Verdict
from .diagnostics import DiagnosticSeries
from .models import Model
from .spectral import GridSpec, SpectralField

DIAG_COLUMNS = (
    "t",
    "l2_energy",
    "scaled_enstrophy",
    "alpha_energy",
    "grad_norm",
    "vort_max",
    "dissipation",
    "running_sup_grad",
)

CHECKPOINT_MAGIC = "voigtblowup-checkpoint 1"

_SERIES_NAME = re.compile(r"^diag_alpha=(?P<alpha>[^_]+)_nu=(?P<nu>[^_]+)\.csv$")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty table")
    return rows[0], rows[1:]


def series_filename(alpha: float, nu: float) -> str:
    return f"diag_alpha={fmt(alpha)}_nu={fmt(nu)}.csv"


def write_series(path: Path, s: DiagnosticSeries) -> Path:
    e = s.alpha_energy
    rows = zip(s.times, s.l2_energy, s.scaled_enstrophy, e, s.grad_norm, s.vort_max, s.dissipation, s.running_sup_grad)
    return write_table(path, DIAG_COLUMNS, rows)


def read_series(path: Path, alpha: float | None = None, nu: float | None = None) -> DiagnosticSeries:
    """Load a diagnostics table; ``alpha`` and ``nu`` default to the values in the file name."""
    path = Path(path)
    if alpha is None or nu is None:
        m = _SERIES_NAME.match(path.name)
        if not m:
            raise ValueError(f"{path.name}: cannot infer alpha and nu from the file name")
        alpha = float(m["alpha"]) if alpha is None else alpha
        nu = float(m["nu"]) if nu is None else nu
    header, rows = read_table(path)
    if tuple(header) != DIAG_COLUMNS:
        raise ValueError(f"{path}: unexpected columns {header}")
    s = DiagnosticSeries(alpha=alpha, nu=nu)
    for r in rows:
        t, l2, ens, _, gn, vm, diss, sup = map(float, r)
        s.append(t, l2, ens, gn, vm, diss, sup)
    return s


def write_spectrum(path: Path, kappa: np.ndarray, energy: np.ndarray) -> Path:
    return write_table(path, ("kappa", "E_kappa"), zip(kappa.tolist(), energy))


def write_q(path: Path, table: SlopeTable) -> Path:
    rows = ((T, a, table.q[i, j]) for j, T in enumerate(table.t_grid) for i, a in enumerate(table.alphas))
    return write_table(path, ("T", "alpha", "Q"), rows)


def write_slopes(path: Path, table: SlopeTable) -> Path:
    """Rows ``T, alpha_lo, alpha_hi, slope, p_estimate``; ``p_estimate`` is filled on the smallest pair only."""
    rows = []
    for j, T in enumerate(table.t_grid):
        for i in range(table.slopes.shape[0]):
            p = table.p_estimate[j] if i == 0 else None
            rows.append((T, table.alphas[i], table.alphas[i + 1], table.slopes[i, j], p))
    return write_table(path, ("T", "alpha_lo", "alpha_hi", "slope", "p_estimate"), rows)


def write_verdicts(path: Path, verdicts: dict[float, Verdict]) -> Path:
    rows = (
        (nu, v.blow_up_indicated, v.earliest_T, v.min_slope, v.min_slope_T)
        for nu, v in sorted(verdicts.items())
    )
    return write_table(path, ("nu", "blow_up_indicated", "earliest_T", "min_slope", "min_slope_T"), rows)


def read_verdicts(path: Path) -> dict[float, Verdict]:
    _, rows = read_table(path)
    out = {}
    for nu, flag, earliest, smin, smin_t in rows:
        out[float(nu)] = Verdict(
            flag == "true",
            float(earliest) if earliest else None,
            float(smin),
            float(smin_t) if smin_t else None,
        )
    return out


def write_s_min(path: Path, tables: Sequence[SMinTable]) -> Path:
    rows = ((nu, s, t.alpha_lo, t.alpha_hi, t.mode) for t in tables for nu, s in zip(t.nus, t.s_min))
    return write_table(path, ("nu", "s_min", "alpha_lo", "alpha_hi", "mode"), rows)


def write_checkpoint(path: Path, u: SpectralField, model: Model, alpha: float, nu: float, t: float) -> Path:
    g = u.grid
    header = [
        CHECKPOINT_MAGIC,
        f"model={Model(model).value}",
        f"dim={g.dim}",
        "n=" + ",".join(str(v) for v in g.n),
        "length=" + ",".join(fmt(v) for v in g.length),
        f"components={u.ncomp}",
        f"alpha={fmt(alpha)}",
        f"nu={fmt(nu)}",
        f"t={fmt(t)}",
        "end",
    ]
    data = np.ascontiguousarray(u.coeffs).view(np.float64).astype("<f8", copy=False)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(data.tobytes())
    return path


def read_checkpoint(path: Path) -> tuple[SpectralField, dict]:
    with open(path, "rb") as fh:
        if fh.readline().decode("ascii").strip() != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        meta: dict = {}
        for line in fh:
            line = line.decode("ascii").strip()
            if line == "end":
                break
            key, _, value = line.partition("=")
            meta[key] = value
        else:
            raise ValueError(f"{path}: truncated header")
        raw = fh.read()
    grid = GridSpec(int(meta["dim"]), tuple(int(v) for v in meta["n"].split(",")),
                    tuple(float(v) for v in meta["length"].split(",")))
    ncomp = int(meta["components"])
    values = np.frombuffer(raw, dtype="<f8")
    expected = 2 * ncomp * int(np.prod(grid.spectral_shape))
    if values.size != expected:
        raise ValueError(f"{path}: expected {expected} values, found {values.size}")
    coeffs = values.astype(np.float64).view(np.complex128).reshape((ncomp,) + grid.spectral_shape)
    info = {
        "model": Model(meta["model"]),
        "alpha": float(meta["alpha"]),
        "nu": float(meta["nu"]),
        "t": float(meta["t"]),
    }
    return SpectralField(grid, coeffs), info
