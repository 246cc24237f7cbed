"""End-to-end acceptance runs.

Every criterion records one PASS/FAIL line (shown in the terminal summary)
before asserting. Criterion 6 integrates three 128^3 cases and is marked
slow; deselect it with ``-m "not slow"``.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, random_field
from test_timestep import observed_orders
from voigtblowup.blowup import BBM_HORIZONS, s_min_of_nu
from voigtblowup.config import DEFAULT_BBM_ALPHAS, RunConfig
from voigtblowup.diagnostics import energy_l2, relative_energy_error, spectrum
from voigtblowup.models import Model, VoigtParams, initial_condition
from voigtblowup.oracle import burgers_blowup_time, burgers_eval
from voigtblowup.spectral import GridSpec, dealias, divergence, leray_project, to_physical
from voigtblowup.sweep import run_sweep
from voigtblowup.timestep import StepperConfig, integrate

N_BBM = 8192
PAIR = (128 / 8192, 138 / 8192)


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {number} {'PASS' if ok else 'FAIL'}: {detail}")
    print(ACCEPTANCE_LINES[-1])


def bbm_series(alpha, nu, t_end=1.25, sample_interval=0.01):
    g = GridSpec.line(N_BBM)
    p = VoigtParams(alpha=alpha, nu=nu)
    return integrate(initial_condition(g, p), p, StepperConfig(t_end=t_end, sample_interval=sample_interval))


def final_state(grid, p, t_end):
    states = {}
    integrate(initial_condition(grid, p), p, StepperConfig(t_end=t_end, sample_interval=t_end),
              on_sample=lambda t, u: states.update({t: u}))
    return states[max(states)]


@pytest.fixture(scope="session")
def bbm_sweep(tmp_path_factory):
    assert DEFAULT_BBM_ALPHAS[:2] == PAIR
    cfg = RunConfig(model=Model.BBM1D, n=N_BBM, alphas=DEFAULT_BBM_ALPHAS, nus=(0.0, 0.005),
                    output=tmp_path_factory.mktemp("bbm_sweep"))
    return run_sweep(cfg)


@pytest.fixture(scope="session")
def s_min_tables():
    nus = np.geomspace(1e-5, 5e-3, 10)
    runs = {float(nu): tuple(bbm_series(a, float(nu)) for a in PAIR) for nu in nus}
    return s_min_of_nu(runs, BBM_HORIZONS), s_min_of_nu(runs, BBM_HORIZONS, mode="literal")


@pytest.fixture(scope="session")
def ev3d_desk():
    g = GridSpec.cube(64)
    p = VoigtParams(alpha=4 / 64, model=Model.EV3D)
    checks = {"div": [], "mean": [], "tail": []}
    cutoff = g.cutoff[0]

    def on_sample(t, u):
        checks["div"].append(float(np.abs(to_physical(divergence(u))).max()))
        checks["mean"].append(float(np.abs(u.mean()).max()))
        if t <= 1 + 1e-12:
            kappa, e = spectrum(u)
            checks["tail"].append(e[kappa == cutoff][0] / e.max())
        checks["last"] = u

    series = integrate(initial_condition(g, p), p, StepperConfig(t_end=5.0, sample_interval=0.1),
                       on_sample=on_sample)
    return series, checks


def test_criterion_1_inviscid_bbm_blowup(bbm_sweep):
    _, result = bbm_sweep
    v = result.verdicts[0.0]
    ok = v.blow_up_indicated and v.earliest_T is not None and abs(v.earliest_T - 1.138) <= 0.02
    record(1, ok, f"inviscid BBM earliest_T={v.earliest_T} (target 1.138 +/- 0.02), min_slope={v.min_slope:.4f}")
    assert ok


def test_criterion_2_viscous_bbm_true_negative(bbm_sweep):
    _, result = bbm_sweep
    v = result.verdicts[0.005]
    ok = not v.blow_up_indicated and abs(v.min_slope - (-0.235)) <= 0.05
    record(2, ok, f"nu=0.005 blow_up_indicated={v.blow_up_indicated}, min_slope={v.min_slope:.4f} "
                  "(target -0.235 +/- 0.05)")
    assert ok


def test_criterion_3_s_min_crossing(s_min_tables):
    loglog, literal = s_min_tables
    nu_star = loglog.crossing(-1.0)
    ok = nu_star is not None and 2.3e-4 / 2 <= nu_star <= 2.3e-4 * 2
    s = ", ".join(f"{nu:.3g}:{v:.3f}" for nu, v in zip(loglog.nus, loglog.s_min))
    record(3, ok, f"S_min crossing nu*={nu_star} (target 2.3e-4 within x2); log-log S_min {s}; "
                  f"literal-mode range [{literal.s_min.min():.1f}, {literal.s_min.max():.1f}]")
    assert ok


def test_criterion_4_bbm_conservation(bbm_sweep):
    series, _ = bbm_sweep
    inviscid = max(relative_energy_error(s) for s in series if s.nu == 0)
    viscous = max(relative_energy_error(s) for s in series if s.nu > 0)
    ok = inviscid < 1e-12 and viscous < 1e-11
    record(4, ok, f"BBM eps_rel inviscid={inviscid:.3e} (<1e-12), viscous={viscous:.3e} (<1e-11)")
    assert ok


def test_criterion_5_ev3d_desk_conservation(ev3d_desk):
    series, checks = ev3d_desk
    err = relative_energy_error(series)
    div, mean = max(checks["div"]), max(checks["mean"])
    ok = err < 1e-9 and div < 1e-10 and mean < 1e-15 and series.times[-1] == pytest.approx(5.0)
    record(5, ok, f"EV3D n=64 alpha=4/64 eps_rel={err:.3e} (<1e-9), max|div u|={div:.3e} (<1e-10), "
                  f"max|mean|={mean:.3e}")
    assert ok


@pytest.mark.slow
def test_criterion_6_ev3d_scaled_sweep(tmp_path_factory):
    cfg = RunConfig(model=Model.EV3D, n=128, alphas=(8 / 128, 12 / 128, 16 / 128),
                    output=tmp_path_factory.mktemp("ev3d_sweep"))
    series, result = run_sweep(cfg)
    table = result.tables[0.0]
    monotone = bool(np.all(np.diff(table.q, axis=1) >= 0))
    finite = table.slopes.shape == (2, 51) and bool(np.all(np.isfinite(table.slopes)))
    transfer = all(
        s.l2_energy[-1] < s.l2_energy[0] and s.scaled_enstrophy[-1] > s.scaled_enstrophy[0]
        and relative_energy_error(s) < 1e-9
        for s in series
    )
    errs = ", ".join(f"{s.alpha:.4g}:{relative_energy_error(s):.2e}" for s in series)
    moved = ", ".join(f"{s.alpha:.4g}:{s.l2_energy[0] - s.l2_energy[-1]:.3e}" for s in series)
    ok = monotone and finite and transfer
    record(6, ok, f"EV3D n=128 monotone Q={monotone}, finite slopes={finite}, transfer with constant sum="
                  f"{transfer}; min p_estimate={np.min(table.p_estimate):.4f}; eps_rel {errs}; "
                  f"energy moved {moved}")
    assert ok


def test_criterion_7_burgers_oracle():
    g = GridSpec.line(N_BBM)
    (x,) = g.points()
    exact = burgers_eval(x, 0.5)
    diffs = []
    for a in (64 / 8192, 32 / 8192, 16 / 8192, 8 / 8192):
        u = to_physical(final_state(g, VoigtParams(alpha=a), 0.5))[0]
        diffs.append(math.sqrt(g.dx * np.sum((u - exact) ** 2)))
    decreasing = all(d1 < d0 for d0, d1 in zip(diffs, diffs[1:]))
    ok = decreasing and burgers_blowup_time(1.0) == 1.0
    record(7, ok, "||u^alpha(0.5) - u_Burgers(0.5)|| for alpha={64,32,16,8}/8192: "
                  + ", ".join(f"{d:.3e}" for d in diffs) + f"; burgers_blowup_time(1)={burgers_blowup_time(1.0)}")
    assert ok


def test_criterion_8_numerics(ev3d_desk):
    _, checks = ev3d_desk
    orders = observed_orders(VoigtParams(alpha=0.1), "rk4") + observed_orders(VoigtParams(alpha=0.1, nu=0.5), "ifrk4")
    order_ok = all(abs(o - 4.0) <= 0.2 for o in orders)

    parseval = []
    for g in (GridSpec.line(256), GridSpec.cube(32)):
        f = random_field(g, seed=81, smooth=False)
        u = to_physical(f)
        direct = g.volume * np.mean(np.sum(u * u, axis=0))
        parseval.append(abs(energy_l2(f) - direct) / direct)
        parseval.append(abs(spectrum(f)[1].sum() - energy_l2(f)) / energy_l2(f))
    final = checks["last"]
    parseval.append(abs(spectrum(final)[1].sum() - energy_l2(final)) / energy_l2(final))
    parseval_ok = max(parseval) < 1e-13

    eps = np.finfo(float).eps
    f = random_field(GridSpec.cube(32), seed=82, smooth=False)
    p1 = leray_project(f)
    proj = np.abs(leray_project(p1).coeffs - p1.coeffs).max() / np.abs(p1.coeffs).max()
    d1 = dealias(f)
    deal = np.abs(dealias(d1).coeffs - d1.coeffs).max()
    idem_ok = proj <= 4 * eps and deal == 0

    tail = max(checks["tail"])
    tail_ok = tail < 1e-12

    ok = order_ok and parseval_ok and idem_ok and tail_ok
    record(8, ok, f"orders {', '.join(f'{o:.3f}' for o in orders)} (4 +/- 0.2); Parseval/spectrum-sum "
                  f"max rel {max(parseval):.2e} (<1e-13); projector idempotence {proj:.1e}, dealias {deal:.1e}; "
                  f"cutoff-shell tail/peak at t<=1 {tail:.2e} (<1e-12)")
    assert ok
