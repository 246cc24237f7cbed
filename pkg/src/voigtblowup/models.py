"""Initial data and semi-discrete right-hand sides.

Two models share the same machinery:

* ``EV3D`` -- 3D Euler-Voigt on the unit cube,
  ``(I - alpha^2 Lap) u_t + (u . grad) u + grad p = 0``, ``div u = 0``.
* ``BBM1D`` -- 1D (viscous) Benjamin-Bona-Mahony on ``[-pi, pi]``,
  ``(1 - alpha^2 d_xx) u_t + u u_x = nu u_xx``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .spectral import (
    GridSpec,
    SpectralField,
    dealias,
    divergence,
    fft_workers,
    helmholtz_invert,
    leray_project,
    to_physical,
    to_spectral,
)

DIVERGENCE_TOL = 1e-10


class Model(str, enum.Enum):
    EV3D = "ev3d"
    BBM1D = "bbm"


@dataclass(frozen=True)
class VoigtParams:
    alpha: float
    nu: float = 0.0
    model: Model = Model.BBM1D

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.nu < 0:
            raise ValueError("nu must be non-negative")
        if self.model is Model.EV3D and self.nu != 0:
            raise ValueError("viscosity is not supported for the 3D model")


def _zero_mean(f: SpectralField) -> SpectralField:
    f.coeffs[(slice(None),) + (0,) * f.grid.dim] = 0
    return f


def taylor_green(grid: GridSpec) -> SpectralField:
    """Taylor-Green vortex on the unit cube (one shell, ``|m| = sqrt(3)``)."""
    if grid.dim != 3:
        raise ValueError("Taylor-Green data needs a 3D grid")
    if any(abs(L - 1.0) > 1e-14 for L in grid.length):
        raise ValueError("Taylor-Green data is defined on the unit cube")
    x, y, z = (2 * np.pi * c for c in grid.points())
    u = np.zeros((3,) + grid.shape)
    u[0] = np.sin(x) * np.cos(y) * np.cos(z)
    u[1] = -np.cos(x) * np.sin(y) * np.cos(z)
    return _zero_mean(to_spectral(u, grid))


def bbm_initial(grid: GridSpec, amplitude: float = 1.0) -> SpectralField:
    """``u0(x) = -amplitude * sin(x)`` on the ``2 pi`` periodic line."""
    if grid.dim != 1:
        raise ValueError("BBM data needs a 1D grid")
    if abs(grid.length[0] - 2 * np.pi) > 1e-12:
        raise ValueError("BBM data is defined on an interval of length 2 pi")
    (x,) = grid.points()
    return _zero_mean(to_spectral(-amplitude * np.sin(x), grid))


def _axes(grid: GridSpec) -> tuple[int, ...]:
    return tuple(range(-grid.dim, 0))


def advection(u: SpectralField) -> SpectralField:
    """Dealiased ``(u . grad) u`` in advective form, products taken on the collocation grid."""
    g = u.grid
    axes = _axes(g)
    w = fft_workers()
    up = sfft.irfftn(u.coeffs, s=g.shape, axes=axes, norm="forward", workers=w)
    nl = np.zeros_like(up)
    for j, kj in enumerate(g.odd_wavenumbers):
        du = sfft.irfftn(1j * kj * u.coeffs, s=g.shape, axes=axes, norm="forward", workers=w)
        nl += up[j] * du
    out = sfft.rfftn(nl, axes=axes, norm="forward", workers=w) * g.dealias_mask
    # the exact product has zero mean for these models; drop the round-off
    out[(slice(None),) + (0,) * g.dim] = 0
    return SpectralField(g, out)


def ev3d_rhs(u: SpectralField, p: VoigtParams, check: bool = False) -> SpectralField:
    """Tendency ``u_t = -(I - alpha^2 Lap)^{-1} P[(u . grad) u]``."""
    if check:
        div = np.max(np.abs(to_physical(divergence(u))))
        scale = max(1.0, float(np.max(np.abs(to_physical(u)))))
        if div > DIVERGENCE_TOL * scale:
            raise ValueError(f"input is not divergence-free (max |div u| = {div:.3e})")
    return -helmholtz_invert(leray_project(advection(u)), p.alpha)


def bbm_rhs(u: SpectralField, p: VoigtParams, viscous: bool = True) -> SpectralField:
    """Tendency ``u_t = (1 - alpha^2 d_xx)^{-1} (-u u_x + nu u_xx)``.

    With ``viscous=False`` only the advective part is returned, for use with
    the integrating-factor stepper.
    """
    if u.grid.dim != 1:
        raise ValueError("BBM needs a 1D grid")
    g = u.grid
    c = -advection(u).coeffs
    if viscous and p.nu > 0:
        c = c - p.nu * g.k2 * u.coeffs
    return helmholtz_invert(SpectralField(g, c), p.alpha)


def bbm_linear_symbol(grid: GridSpec, p: VoigtParams) -> np.ndarray:
    """Diagonal viscous symbol ``-nu k^2 / (1 + alpha^2 k^2)``."""
    return -p.nu * grid.k2 / (1.0 + p.alpha**2 * grid.k2)


def initial_condition(grid: GridSpec, p: VoigtParams) -> SpectralField:
    if p.model is Model.EV3D:
        return dealias(taylor_green(grid))
    return dealias(bbm_initial(grid))

