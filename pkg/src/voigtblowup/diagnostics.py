"""Energies, gradient norms, energy-error and spectral diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import GridSpec, SpectralField, curl, to_physical

__all__ = [
    "DiagnosticSeries",
    "energy_l2",
    "grad_norm_sq",
    "alpha_energy",
    "inner_l2",
    "relative_energy_error",
    "spectrum",
    "vorticity_max",
]


def _mode_sum(grid: GridSpec, values: np.ndarray) -> float:
    # values: per-mode quantity on the stored half lattice (components already reduced)
    return float(np.sum(grid.hermitian_weight * values))


def inner_l2(f: SpectralField, g: SpectralField) -> float:
    """Real L2 inner product ``integral of f . g`` summed over components."""
    prod = np.sum((f.coeffs * np.conj(g.coeffs)).real, axis=0)
    return f.grid.volume * _mode_sum(f.grid, prod)


def energy_l2(f: SpectralField) -> float:
    """``||f||^2_L2`` by Parseval."""
    return f.grid.volume * _mode_sum(f.grid, np.sum(np.abs(f.coeffs) ** 2, axis=0))


def grad_norm_sq(f: SpectralField) -> float:
    """``||grad f||^2_L2``; the Frobenius norm of the Jacobian for vector fields."""
    g = f.grid
    return g.volume * _mode_sum(g, g.k2 * np.sum(np.abs(f.coeffs) ** 2, axis=0))


def alpha_energy(f: SpectralField, alpha: float, nu: float = 0.0, dissipation: float = 0.0) -> float:
    """``||u||^2 + alpha^2 ||grad u||^2``, plus the accumulated dissipation when ``nu > 0``."""
    e = energy_l2(f) + alpha**2 * grad_norm_sq(f)
    if nu > 0:
        e += dissipation
    return e


@dataclass
class DiagnosticSeries:
    """Sampled diagnostics of one integration.

    ``running_sup_grad`` is the supremum of ``grad_norm`` over every time step
    up to the sample time, not only over the samples themselves.
    """

    alpha: float
    nu: float = 0.0
    times: list[float] = field(default_factory=list)
    l2_energy: list[float] = field(default_factory=list)
    scaled_enstrophy: list[float] = field(default_factory=list)
    grad_norm: list[float] = field(default_factory=list)
    vort_max: list[float] = field(default_factory=list)
    dissipation: list[float] = field(default_factory=list)
    running_sup_grad: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def alpha_energy(self) -> np.ndarray:
        e = np.asarray(self.l2_energy) + np.asarray(self.scaled_enstrophy)
        if self.nu > 0:
            e = e + np.asarray(self.dissipation)
        return e

    def append(self, t, l2_energy, scaled_enstrophy, grad_norm, vort_max, dissipation, running_sup_grad):
        self.times.append(float(t))
        self.l2_energy.append(float(l2_energy))
        self.scaled_enstrophy.append(float(scaled_enstrophy))
        self.grad_norm.append(float(grad_norm))
        self.vort_max.append(float(vort_max))
        self.dissipation.append(float(dissipation))
        self.running_sup_grad.append(float(running_sup_grad))


def relative_energy_error(series) -> float:
    """``max_t |E(t) - E(0)| / |E(0)|`` over the recorded samples.

    Accepts a :class:`DiagnosticSeries` or a plain sequence of alpha-energies.
    """
    e = series.alpha_energy if isinstance(series, DiagnosticSeries) else np.asarray(series, dtype=float)
    if len(e) == 0:
        raise ValueError("empty series")
    if e[0] == 0:
        raise ValueError("initial alpha-energy is zero")
    return float(np.max(np.abs((e - e[0]) / e[0])))


def spectrum(f: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    """Shell sums ``E(kappa)`` for ``kappa = 1, 2, ...``.

    Shell ``kappa`` holds modes with ``kappa - 1/2 <= |m| < kappa + 1/2``
    (``m`` in integer fundamental-mode units), counting each conjugate pair
    twice so that the shells add up to ``energy_l2``. The table runs to the
    outermost occupied shell of the lattice (the corners of a dealiased cube
    reach ``sqrt(3) * n / 3``), so shell ``floor(n/3)`` is the cutoff shell,
    not the last one.
    """
    g = f.grid
    mag = np.sqrt(sum(m.astype(float) ** 2 for m in g.modes))
    shell = np.broadcast_to(np.floor(mag + 0.5).astype(int), g.spectral_shape)
    power = g.volume * g.hermitian_weight * np.sum(np.abs(f.coeffs) ** 2, axis=0)
    totals = np.bincount(shell.ravel(), weights=power.ravel())
    kappa = np.arange(1, totals.size)
    return kappa, totals[1:]


def vorticity_max(f: SpectralField) -> float:
    """``max |curl f|`` over the collocation points."""
    if f.grid.dim != 3 or f.ncomp != 3:
        raise ValueError("vorticity needs a 3-component field on a 3D grid")
    w = to_physical(curl(f))
    return float(np.sqrt(np.max(np.sum(w * w, axis=0))))
