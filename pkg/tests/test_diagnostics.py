import numpy as np
import pytest

from voigtblowup.diagnostics import (
    DiagnosticSeries,
    alpha_energy,
    energy_l2,
    grad_norm_sq,
    relative_energy_error,
    spectrum,
    vorticity_max,
)
from voigtblowup.models import bbm_initial, taylor_green
from voigtblowup.spectral import GridSpec, SpectralField, gradient, single_mode

from conftest import random_field


def test_taylor_green_energies(cube16):
    tg = taylor_green(cube16)
    assert energy_l2(tg) == pytest.approx(0.25, rel=1e-14)
    assert grad_norm_sq(tg) == pytest.approx(3 * np.pi**2, rel=1e-14)


def test_minus_sine_energies(line64):
    u = bbm_initial(line64)
    assert energy_l2(u) == pytest.approx(np.pi, rel=1e-14)
    assert grad_norm_sq(u) == pytest.approx(np.pi, rel=1e-14)
    assert alpha_energy(u, 0.5) == pytest.approx(np.pi * 1.25, rel=1e-14)


def test_zero_field(cube16):
    z = SpectralField.zeros(cube16)
    assert energy_l2(z) == 0
    assert grad_norm_sq(z) == 0


def test_alpha_energy_includes_dissipation_only_when_viscous(line64):
    u = bbm_initial(line64)
    assert alpha_energy(u, 0.0, nu=0.0, dissipation=1.0) == pytest.approx(np.pi)
    assert alpha_energy(u, 0.0, nu=0.1, dissipation=1.0) == pytest.approx(np.pi + 1.0)


class TestRelativeError:
    def test_constant(self):
        assert relative_energy_error([2.0, 2.0, 2.0]) == 0.0

    def test_formula(self):
        assert relative_energy_error([1, 1 + 1e-11, 1 - 2e-11]) == pytest.approx(2e-11, rel=1e-4)

    def test_empty(self):
        with pytest.raises(ValueError):
            relative_energy_error([])

    def test_series_includes_dissipation(self):
        s = DiagnosticSeries(alpha=0.1, nu=0.01)
        s.append(0.0, 1.0, 0.5, 0, 0, 0.0, 0)
        s.append(0.1, 0.9, 0.5, 0, 0, 0.1, 0)
        assert relative_energy_error(s) == pytest.approx(0.0, abs=1e-15)


class TestSpectrum:
    def test_taylor_green_single_shell(self, cube16):
        kappa, e = spectrum(taylor_green(cube16))
        assert kappa[0] == 1
        assert e[1] == pytest.approx(0.25, rel=1e-14)
        assert np.abs(np.delete(e, 1)).max() < 1e-28

    def test_zero(self, cube16):
        _, e = spectrum(SpectralField.zeros(cube16))
        assert not np.any(e)

    @pytest.mark.parametrize("dim, n", [(1, 64), (3, 16), (3, 12)])
    def test_sums_to_energy(self, dim, n):
        g = GridSpec(dim, n, 1.3)
        f = random_field(g, seed=41, smooth=False)
        _, e = spectrum(f)
        assert e.sum() == pytest.approx(energy_l2(f), rel=1e-13)

    def test_half_open_shells(self):
        g = GridSpec.line(32)
        # |m| = 3 belongs to shell 3
        _, e = spectrum(single_mode(g, 3, 1.0))
        assert e[2] == pytest.approx(np.pi, rel=1e-14)

    def test_shell_boundary_goes_up(self):
        # |m| = sqrt(1 + 1 + 0) ~ 1.414 rounds to shell 1; |m| = 2.5 does not occur on an
        # integer lattice, but |m| = sqrt(2^2 + 1 + 1) ~ 2.449 rounds to shell 2
        g = GridSpec.cube(16)
        _, e = spectrum(single_mode(g, (2, 1, 1), 1.0))
        assert e[1] == pytest.approx(0.5, rel=1e-13)


class TestVorticityMax:
    def test_zero(self, cube16):
        assert vorticity_max(SpectralField.zeros(cube16)) == 0.0

    def test_irrotational(self, cube16):
        assert vorticity_max(gradient(random_field(cube16, ncomp=1, seed=42))) < 1e-12

    def test_taylor_green(self, cube16):
        # closed-form curl evaluated on a fine lattice that includes off-grid points
        s = np.linspace(0, 1, 201)
        x, y, z = np.meshgrid(s, s, s, indexing="ij", sparse=True)
        sx, cx = np.sin(2 * np.pi * x), np.cos(2 * np.pi * x)
        sy, cy = np.sin(2 * np.pi * y), np.cos(2 * np.pi * y)
        sz, cz = np.sin(2 * np.pi * z), np.cos(2 * np.pi * z)
        w1 = -2 * np.pi * cx * sy * sz
        w2 = -2 * np.pi * sx * cy * sz
        w3 = 4 * np.pi * sx * sy * cz
        fine = np.sqrt(np.max(w1**2 + w2**2 + w3**2))
        assert vorticity_max(taylor_green(cube16)) == pytest.approx(fine, rel=1e-12)

    def test_wrong_dimension(self, line64):
        with pytest.raises(ValueError):
            vorticity_max(SpectralField.zeros(line64))
