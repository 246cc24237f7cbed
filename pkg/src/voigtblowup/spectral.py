"""Periodic pseudospectral kernels.

Fields are stored as Fourier coefficients ``c_m`` of

    u(x) = sum_m c_m exp(i k(m) . x),    k_j(m) = 2 pi m_j / L_j,

so the coefficient lattice is ``rfftn(samples) / n_total``. Only the
non-negative half of the last axis is kept (real-to-complex layout); the
conjugate half is implied by Hermitian symmetry. With this normalization
``||u||^2_L2 = volume * sum over the full lattice of |c_m|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "GridSpec",
    "SpectralField",
    "to_physical",
    "to_spectral",
    "derivative",
    "gradient",
    "divergence",
    "dealias",
    "helmholtz_invert",
    "leray_project",
    "curl",
    "single_mode",
    "fft_workers",
]


def fft_workers() -> int:
    """Worker count for the FFT backend (``VOIGT_FFT_WORKERS``, default 1)."""
    import os

    return int(os.environ.get("VOIGT_FFT_WORKERS", "1"))


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: ``dim`` axes, ``n`` points and extent ``length`` per axis."""

    dim: int
    n: tuple[int, ...]
    length: tuple[float, ...]

    def __post_init__(self):
        if self.dim not in (1, 3):
            raise ValueError(f"dim must be 1 or 3, got {self.dim}")
        n = tuple(int(v) for v in np.broadcast_to(np.asarray(self.n), (self.dim,)))
        length = tuple(float(v) for v in np.broadcast_to(np.asarray(self.length, dtype=float), (self.dim,)))
        for v in n:
            if v < 4 or v % 2:
                raise ValueError(f"points per axis must be even and >= 4, got {v}")
        for v in length:
            if not v > 0:
                raise ValueError(f"domain lengths must be positive, got {v}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "length", length)

    @classmethod
    def cube(cls, n: int, length: float = 1.0) -> GridSpec:
        return cls(3, (n, n, n), (length, length, length))

    @classmethod
    def line(cls, n: int, length: float = 2 * np.pi) -> GridSpec:
        return cls(1, (n,), (length,))

    # Cached spectral geometry. cached_property writes into __dict__, which a
    # frozen dataclass still permits.

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def spectral_shape(self) -> tuple[int, ...]:
        return self.n[:-1] + (self.n[-1] // 2 + 1,)

    @property
    def volume(self) -> float:
        return float(np.prod(self.length))

    @property
    def npoints(self) -> int:
        return int(np.prod(self.n))

    @property
    def dx(self) -> float:
        return min(L / n for L, n in zip(self.length, self.n))

    @property
    def cutoff(self) -> tuple[int, ...]:
        """Largest retained ``|m|`` per axis: the largest ``K`` with ``3 K < n``.

        This is ``floor(n/3)`` unless ``n`` is a multiple of 3, where
        ``floor(n/3)`` would let quadratic products alias onto mode ``K``.
        """
        return tuple((v - 1) // 3 for v in self.n)

    @cached_property
    def modes(self) -> tuple[np.ndarray, ...]:
        """Integer mode index per axis, broadcastable against the coefficient lattice."""
        out = []
        for axis, n in enumerate(self.n):
            if axis == self.dim - 1:
                m = np.arange(n // 2 + 1)
            else:
                m = np.fft.fftfreq(n, 1.0 / n).round().astype(int)
            shape = [1] * self.dim
            shape[axis] = m.size
            out.append(m.reshape(shape))
        return tuple(out)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        return tuple(2 * np.pi * m / L for m, L in zip(self.modes, self.length))

    @cached_property
    def odd_wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Wavenumbers for odd symbols (i k): the Nyquist mode is zeroed to keep fields real."""
        out = []
        for k, m, n in zip(self.wavenumbers, self.modes, self.n):
            out.append(np.where(2 * np.abs(m) == n, 0.0, k))
        return tuple(out)

    @cached_property
    def k2(self) -> np.ndarray:
        return sum(k * k for k in self.wavenumbers)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        mask = np.ones(self.spectral_shape, dtype=bool)
        for m, c in zip(self.modes, self.cutoff):
            mask &= np.abs(m) <= c
        return mask

    @cached_property
    def hermitian_weight(self) -> np.ndarray:
        """Multiplicity of each stored mode in the full lattice (1 or 2)."""
        m = self.modes[-1]
        w = np.where((m == 0) | (2 * m == self.n[-1]), 1.0, 2.0)
        return np.broadcast_to(w, self.spectral_shape)

    def points(self) -> tuple[np.ndarray, ...]:
        """Collocation coordinates ``x_j = j * L / n`` (broadcastable, ``indexing='ij'``)."""
        axes = [np.arange(n) * (L / n) for n, L in zip(self.n, self.length)]
        return tuple(np.meshgrid(*axes, indexing="ij", sparse=True))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """A real periodic field held as Fourier coefficients, shape ``(ncomp, *spectral_shape)``."""

    grid: GridSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape == self.grid.spectral_shape:
            c = c[np.newaxis]
        if c.shape[1:] != self.grid.spectral_shape:
            raise ValueError(
                f"coefficient shape {c.shape[1:]} does not match grid {self.grid.spectral_shape}"
            )
        object.__setattr__(self, "coeffs", c)

    @property
    def ncomp(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def zeros(cls, grid: GridSpec, ncomp: int | None = None) -> SpectralField:
        ncomp = ncomp if ncomp is not None else (3 if grid.dim == 3 else 1)
        return cls(grid, np.zeros((ncomp,) + grid.spectral_shape, dtype=complex))

    def _like(self, coeffs: np.ndarray) -> SpectralField:
        return SpectralField(self.grid, coeffs)

    def __add__(self, other: SpectralField) -> SpectralField:
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other: SpectralField) -> SpectralField:
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self) -> SpectralField:
        return self._like(-self.coeffs)

    def __mul__(self, scalar: float) -> SpectralField:
        return self._like(self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> SpectralField:
        return self._like(self.coeffs / scalar)

    def mean(self) -> np.ndarray:
        """Zero-mode coefficient per component."""
        return self.coeffs[(slice(None),) + (0,) * self.grid.dim]


def _axes(grid: GridSpec) -> tuple[int, ...]:
    return tuple(range(-grid.dim, 0))


def to_physical(f: SpectralField) -> np.ndarray:
    """Samples on the collocation grid, shape ``(ncomp, *grid.shape)``."""
    g = f.grid
    return sfft.irfftn(f.coeffs, s=g.shape, axes=_axes(g), norm="forward", workers=fft_workers())


def to_spectral(samples: np.ndarray, grid: GridSpec) -> SpectralField:
    samples = np.asarray(samples, dtype=float)
    if samples.shape == grid.shape:
        samples = samples[np.newaxis]
    if samples.ndim != grid.dim + 1 or samples.shape[1:] != grid.shape:
        raise ValueError(f"sample shape {samples.shape} does not match grid {grid.shape}")
    c = sfft.rfftn(samples, axes=_axes(grid), norm="forward", workers=fft_workers())
    return SpectralField(grid, c)


def single_mode(grid: GridSpec, m: tuple[int, ...] | int, amplitude: float = 1.0, phase: float = 0.0) -> SpectralField:
    """Scalar field ``amplitude * cos(k(m) . x + phase)``."""
    m = (m,) if np.isscalar(m) else tuple(m)
    x = grid.points()
    arg = sum(2 * np.pi * mj * xj / L for mj, xj, L in zip(m, x, grid.length))
    return to_spectral(amplitude * np.cos(arg + phase) + np.zeros(grid.shape), grid)


def derivative(f: SpectralField, axis: int) -> SpectralField:
    if not 0 <= axis < f.grid.dim:
        raise ValueError(f"axis {axis} out of range for a {f.grid.dim}D grid")
    k = f.grid.odd_wavenumbers[axis]
    return f._like(1j * k * f.coeffs)


def gradient(f: SpectralField) -> SpectralField:
    """Gradient of every component; component index is ``axis + dim * comp``."""
    g = f.grid
    parts = [1j * g.odd_wavenumbers[a] * f.coeffs[c] for c in range(f.ncomp) for a in range(g.dim)]
    return SpectralField(g, np.stack(parts))


def divergence(f: SpectralField) -> SpectralField:
    g = f.grid
    if f.ncomp != g.dim:
        raise ValueError("divergence needs one component per axis")
    return SpectralField(g, sum(1j * g.odd_wavenumbers[a] * f.coeffs[a] for a in range(g.dim)))


def dealias(f: SpectralField) -> SpectralField:
    return f._like(f.coeffs * f.grid.dealias_mask)


def helmholtz_invert(f: SpectralField, alpha: float) -> SpectralField:
    """Apply ``(I - alpha^2 Laplacian)^{-1}``."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if alpha == 0:
        return f._like(f.coeffs.copy())
    return f._like(f.coeffs / (1.0 + alpha**2 * f.grid.k2))


def _require_vector(f: SpectralField) -> None:
    if f.grid.dim != 3 or f.ncomp != 3:
        raise ValueError("operation needs a 3-component field on a 3D grid")


def leray_project(f: SpectralField) -> SpectralField:
    """Orthogonal projection onto divergence-free fields; the mean is left untouched."""
    _require_vector(f)
    g = f.grid
    k = g.wavenumbers
    k2 = g.k2.copy()
    k2.flat[0] = 1.0
    kdotc = sum(k[a] * f.coeffs[a] for a in range(3)) / k2
    return f._like(np.stack([f.coeffs[a] - k[a] * kdotc for a in range(3)]))


def curl(f: SpectralField) -> SpectralField:
    _require_vector(f)
    kx, ky, kz = f.grid.odd_wavenumbers
    u, v, w = f.coeffs
    return f._like(1j * np.stack([ky * w - kz * v, kz * u - kx * w, kx * v - ky * u]))
