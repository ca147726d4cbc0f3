"""
Acceptance criteria AC-1 .. AC-8.  Each test prints one PASS/FAIL line
(visible with ``pytest -v``); tolerances are the criterion's own.
"""
import math

import numpy as np
import pytest

from conftest import make_config, sweet_spot
from dqdcqed.cli import load_recipe
from dqdcqed.eigen import (
    dark_state_fixed_frequency_check,
    dressed_gap,
    qubit_like_splitting,
)
from dqdcqed.fitting import FitProblem, Stage, exchange_scaling_fit, master_equation_fit, staged_fit
from dqdcqed.fitting.peaks import minima_positions
from dqdcqed.fitting.traces import synthesize_dataset
from dqdcqed.model import (
    DqdParams,
    build_hamiltonian,
    config_from_dict,
    scattering_operator,
    set_param,
)
from dqdcqed.operators import embed, fock_destroy
from dqdcqed.solver import liouvillian_residual, scattering, spectrum_trace, steady_state_at

GRID_STEP = 0.5


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n{label} {'PASS' if ok else 'FAIL'}: {detail}")
    return emit


def fig2b():
    return config_from_dict(load_recipe("fig2b")["config"])


def doublet_grid():
    return np.arange(5020.0, 5320.0 + GRID_STEP / 2, GRID_STEP)


# -- AC-1 ------------------------------------------------------------------------

def test_ac1_empty_cavity_oracle(report):
    ki, ke, nu_r = 17.0, 6.0, 5000.0
    kt = ki + ke
    grid = np.linspace(nu_r - 10 * kt, nu_r + 10 * kt, 401)
    s11 = spectrum_trace(make_config(nu_r, ki, ke), grid).s11
    d = grid - nu_r
    # closed-form single-port reflection; the package's S11 follows the
    # exp(-i w t) rotating frame, so its imaginary part is that of the
    # exp(+i w t) form below with the sign reversed
    textbook = (0.5 * (ki - ke) + 1j * d) / (0.5 * kt + 1j * d)
    err = np.abs(s11 - np.conj(textbook)).max()
    on_res = abs(spectrum_trace(make_config(nu_r, ki, ke), [nu_r]).s11[0])
    ok = err < 1e-6 and abs(on_res - 11 / 23) < 1e-6
    report("AC-1", ok, f"max |S11 - analytic| = {err:.2e} (< 1e-6), |S11(nu_r)| = {on_res:.9f} vs 11/23")
    assert err < 1e-6
    assert on_res == pytest.approx(11 / 23, abs=1e-6)


# -- AC-2 / AC-3 ------------------------------------------------------------------

def test_ac2_vacuum_rabi_splitting(report):
    grid = doublet_grid()
    y = spectrum_trace(fig2b(), grid).abs_s11
    minima = minima_positions(grid, y, 0.01)
    sep = minima.max() - minima.min() if minima.size >= 2 else float("nan")
    ok = minima.size == 2 and abs(sep - 106.8) <= 2.0
    report("AC-2", ok, f"{minima.size} minima at {np.round(minima, 1).tolist()} MHz, separation {sep:.1f} "
                       "vs 2 g1 = 106.8 +- 2 MHz")
    assert minima.size == 2
    assert sep == pytest.approx(106.8, abs=2.0)


def test_ac3_collective_enhancement(report):
    cfg = fig2b()
    cfg = set_param(cfg, "layout.fock_cutoff", 4)
    two = make_config(cfg.resonator.omega_r, cfg.resonator.kappa_int, cfg.resonator.kappa_ext,
                      [cfg.dqds[0], sweet_spot(5156.2, 6.0)], [cfg.couplings[0], 56.7], fock=4)
    grid = doublet_grid()
    y = spectrum_trace(two, grid).abs_s11
    minima = minima_positions(grid, y, 0.01)
    sep = minima.max() - minima.min()
    target = 2 * math.hypot(53.4, 56.7)
    ok = abs(sep - target) <= 3.0
    report("AC-3", ok, f"outer minima {minima.min():.1f}, {minima.max():.1f} MHz, separation {sep:.1f} "
                       f"vs 2 g_c = {target:.1f} +- 3 MHz (g_c = {target / 2:.1f})")
    assert sep == pytest.approx(target, abs=3.0)


# -- AC-4 ------------------------------------------------------------------------

def _contrast_ratio(g1, g2, nu_r=5172.0):
    cfg = make_config(nu_r, 17.0, 6.1, [sweet_spot(nu_r, 5.3), sweet_spot(nu_r, 6.0)], [g1, g2], fock=4)
    grid = nu_r + np.arange(-160.0, 160.0 + GRID_STEP / 2, GRID_STEP)
    depth = 1.0 - spectrum_trace(cfg, grid).abs_s11
    centre = depth[np.argmin(np.abs(grid - nu_r))]
    return centre / depth.max(), minima_positions(grid, 1 - depth, 0.01)


def test_ac4_dark_state_suppression(report):
    sym, sym_min = _contrast_ratio(55.0, 55.0)
    asym, asym_min = _contrast_ratio(34.0, 69.0)
    ok_sym = sym < 0.10
    ok_asym = asym > 0.10
    report("AC-4", ok_sym and ok_asym,
           f"(a) g1=g2=55: centre/bright = {sym:.4f} (< 0.10) {'ok' if ok_sym else 'FAILED'}; "
           f"(b) g1=34, g2=69: centre/bright = {asym:.4f} (needs > 0.10) {'ok' if ok_asym else 'FAILED'}, "
           f"{asym_min.size} minima - at exact three-way resonance g1|g,e> - g2|e,g> is dark for any g1, g2")
    assert ok_sym
    assert ok_asym, "no third feature: the unequal-coupling state is still dark at exact resonance"


# -- AC-5 ------------------------------------------------------------------------

def test_ac5_dispersive_perturbation_theory(report):
    g1, g2 = 34.0, 69.0
    gc2 = g1 * g1 + g2 * g2
    valid = np.linspace(8 * max(g1, g2), 5000.0, 40)
    rel = max(abs(qubit_like_splitting(g1, g2, d) / (gc2 / d) - 1) for d in valid)
    deltas = np.linspace(300.0, 800.0, 11)
    fit = exchange_scaling_fit([(d, dressed_gap(g1, g2, d)[0]) for d in deltas])
    a_err = fit.A / (2 * g1 * g2) - 1
    dark = dark_state_fixed_frequency_check(g1, g2, deltas)
    energies = [r["dark_energy_MHz"] for r in dark["rows"]]
    variation = (max(energies) - min(energies)) / (gc2 / deltas.min())
    ok = rel < 0.10 and abs(a_err) < 0.10 and variation < 0.01
    report("AC-5", ok, f"splitting vs (g1^2+g2^2)/Delta max rel. dev. {rel:.3f} (< 0.10) for Delta >= 8 g_max; "
                       f"A = {fit.A:.1f} MHz^2 vs 2 g1 g2 = {2 * g1 * g2:.0f} ({a_err:+.1%}, within 10%); "
                       f"dark-branch variation {variation:.1e} of g_c^2/Delta_min (< 1%)")
    assert rel < 0.10
    assert abs(a_err) < 0.10
    assert variation < 0.01


# -- AC-6 ------------------------------------------------------------------------

def _within(res, truth, path):
    v, s = res.value(path), res.uncertainty(path)
    return abs(v - truth) <= 3 * s and abs(v / truth - 1) <= 0.05


@pytest.mark.slow
def test_ac6_fit_round_trip(report):
    truth = set_param(fig2b(), "layout.fock_cutoff", 3)
    grid = np.linspace(5020.0, 5320.0, 161)
    clean = spectrum_trace(truth, grid).abs_s11
    sigma = 0.02 * np.ptp(clean)
    traces = synthesize_dataset(truth, grid, sigma, seed=2024)
    values = {"resonator.omega_r": 5170.0, "resonator.kappa_int": 18.0, "resonator.kappa_ext": 6.5,
              "dqds[0].two_t": 5166.0, "couplings[0]": 53.4, "dqds[0].gamma2": 5.3}
    free = {
        "resonator.omega_r": (5175.0, (5100, 5250)),
        "resonator.kappa_int": (20.0, (5, 40)),
        "resonator.kappa_ext": (6.0, (1, 15)),
        "dqds[0].two_t": (5160.0, (5100, 5250)),
        "couplings[0]": (50.0, (20, 90)),
        "dqds[0].gamma2": (6.0, (0.5, 20)),
    }
    res = master_equation_fit(FitProblem(truth, free, traces, seed=1))
    single = {p: _within(res, v, p) for p, v in values.items()}

    # staged: far-detuned cut for resonator + DQD1, then the DQD2-resonant cut
    two = make_config(5172.0, 17.0, 6.1, [sweet_spot(5138.0, 6.4), DqdParams(0.0, 2578.1, 12.0)],
                      [51.1, 56.7], fock=3)
    grid2 = np.linspace(4970.0, 5370.0, 161)
    far = synthesize_dataset(two, grid2, 0.02 * np.ptp(spectrum_trace(set_param(two, "dqds[1].delta", 20000.0),
                                                                         grid2).abs_s11),
                             seed=7, sweep=("dqds[1].delta", [20000.0]))
    near = synthesize_dataset(two, grid2, 0.02 * np.ptp(spectrum_trace(two, grid2).abs_s11),
                              seed=8, sweep=("dqds[1].delta", [0.0]))
    start = make_config(5170.0, 15.0, 7.0, [sweet_spot(5140.0, 5.0), DqdParams(0.0, 2585.0, 10.0)],
                        [48.0, 50.0], fock=3)
    stages = [
        Stage("resonator+DQD1", {"resonator.omega_r": (5170.0, (5100, 5250)),
                                 "resonator.kappa_int": (15.0, (5, 40)),
                                 "resonator.kappa_ext": (7.0, (1, 15)),
                                 "dqds[0].two_t": (5140.0, (5050, 5250)),
                                 "couplings[0]": (48.0, (20, 90)),
                                 "dqds[0].gamma2": (5.0, (0.5, 20))}, far),
        Stage("DQD2", {"dqds[1].two_t": (5170.0, (5050, 5300)),
                       "couplings[1]": (50.0, (20, 90)),
                       "dqds[1].gamma2": (5.0, (0.5, 20))}, near),
    ]
    _, results, _ = staged_fit(start, stages, seed=3)
    stage2 = results[1]
    dqd2 = {"dqds[1].two_t": 5156.2, "couplings[1]": 56.7, "dqds[1].gamma2": 6.0}
    staged = {p: abs(stage2.value(p) / v - 1) <= 0.05 for p, v in dqd2.items()}
    echoed = {p.name: p.stage for p in stage2.parameters if p.fixed}
    star_ok = all(echoed.get(p) == "resonator+DQD1" for p in free)

    ok = all(single.values()) and all(staged.values()) and star_ok
    detail = ", ".join(f"{p.split('.')[-1]}={res.value(p):.2f}+-{res.uncertainty(p):.2f}" for p in values)
    detail2 = ", ".join(f"{p}={stage2.value(p):.2f}" for p in dqd2)
    report("AC-6", ok, f"single-qubit fit [{detail}] all within 3 sigma and 5%: {all(single.values())}; "
                       f"staged DQD2 [{detail2}] within 5%: {all(staged.values())}; stage-1 values held fixed: {star_ok}")
    assert all(single.values()), single
    assert all(staged.values()), staged
    assert star_ok, echoed


# -- AC-7 ------------------------------------------------------------------------

def _random_config(rng):
    k = int(rng.integers(0, 3))
    nu_r = rng.uniform(4000.0, 6000.0)
    ki = rng.uniform(5.0, 30.0)
    ke = rng.uniform(1.0, ki)  # undercoupled, as in the devices of interest
    dqds, gs = [], []
    for _ in range(k):
        freq = nu_r + rng.uniform(-300.0, 300.0)
        delta = rng.uniform(-0.5, 0.5) * freq
        t = 0.5 * math.sqrt(freq * freq - delta * delta)
        dqds.append(DqdParams(delta, t, rng.uniform(0.5, 30.0), rng.uniform(0.0, 10.0)))
        gs.append(rng.uniform(0.0, 80.0))
    omega_p = nu_r + rng.uniform(-200.0, 200.0)
    cfg = make_config(nu_r, ki, ke, dqds, gs, omega_p, 0.05, fock=5)
    # rescale the drive until the resonator holds about nbar photons (the
    # occupation is ~|alpha|^2 at weak drive, qubit saturation bends it)
    nbar = rng.uniform(0.01, 0.5)
    for _ in range(8):
        n = _photons(cfg, steady_state_at(cfg)[0])
        if abs(n - nbar) < 0.02 * nbar:
            break
        alpha = min(abs(cfg.probe.alpha) * math.sqrt(nbar / max(n, 1e-12)), 100.0)
        cfg = set_param(cfg, "probe.alpha", alpha)
    return cfg


def _photons(cfg, rho):
    a = embed(fock_destroy(cfg.layout.fock_cutoff), 0, cfg.layout)
    return float(np.trace(a.conj().T @ a @ rho).real)


@pytest.mark.slow
def test_ac7_state_validity(report):
    rng = np.random.default_rng(7)
    worst = {"herm": 0.0, "trace": 0.0, "mineig": 0.0, "resid": 0.0, "s11": 0.0, "fock": 0.0, "nbar": 0.0}
    fock_fail = 0
    for _ in range(500):
        cfg = _random_config(rng)
        rho, liou = steady_state_at(cfg)
        worst["herm"] = max(worst["herm"], np.abs(rho - rho.conj().T).max())
        worst["trace"] = max(worst["trace"], abs(np.trace(rho) - 1))
        worst["mineig"] = min(worst["mineig"], np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
        worst["resid"] = max(worst["resid"], liouvillian_residual(liou, rho))
        beta, _ = scattering(rho, scattering_operator(cfg))
        s11 = abs(beta / cfg.probe.alpha)
        worst["s11"] = max(worst["s11"], s11)
        worst["nbar"] = max(worst["nbar"], _photons(cfg, rho))
        rho6, _ = steady_state_at(set_param(cfg, "layout.fock_cutoff", 6))
        beta6, _ = scattering(rho6, scattering_operator(set_param(cfg, "layout.fock_cutoff", 6)))
        dfock = abs(abs(beta6 / cfg.probe.alpha) - s11)
        worst["fock"] = max(worst["fock"], dfock)
        fock_fail += dfock >= 1e-3
    checks = {
        "hermitian": worst["herm"] < 1e-9,
        "trace": worst["trace"] < 1e-9,
        "positive": worst["mineig"] > -1e-7,
        "residual": worst["resid"] < 1e-8,
        "passive": worst["s11"] <= 1 + 1e-6,
        "fock 5->6": worst["fock"] < 1e-3,
    }
    report("AC-7", all(checks.values()),
           f"500 configs, max <a+a> {worst['nbar']:.3f}: herm {worst['herm']:.1e}, trace {worst['trace']:.1e}, "
           f"min eig {worst['mineig']:.1e}, residual {worst['resid']:.1e}, max |S11| {worst['s11']:.6f}, "
           f"max fock 5->6 |S11| change {worst['fock']:.2e} ({fock_fail}/500 configs >= 1e-3; "
           "truncation error near <a+a> = 0.5 is of order N P(N-1), above the threshold)")
    failed = [k for k, v in checks.items() if not v]
    assert not failed, failed


# -- AC-8 ------------------------------------------------------------------------

def test_ac8_rwa_consistency(report):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(300):
        k = int(rng.integers(1, 3))
        nu_r = rng.uniform(4000.0, 6000.0)
        dqds, gs = [], []
        for _ in range(k):
            freq = nu_r + rng.uniform(-300.0, 300.0)
            delta = rng.uniform(-0.6, 0.6) * freq
            dqds.append(DqdParams(delta, 0.5 * math.sqrt(freq * freq - delta * delta)))
            gs.append(rng.uniform(0.0, 0.02) * nu_r)
        kw = dict(dqds=dqds, couplings=gs, omega_p=0.0, alpha=0.0, fock=6)
        rwa = np.linalg.eigvalsh(build_hamiltonian(make_config(nu_r, **kw)))
        full = np.linalg.eigvalsh(build_hamiltonian(make_config(nu_r, rwa=False, **kw)))
        # ground state plus the single-excitation manifold
        n = k + 2
        bound = 5 * max(gs) ** 2 / nu_r
        if bound > 0:
            worst = max(worst, np.abs(rwa[:n] - full[:n]).max() / bound)
    report("AC-8", worst < 1, f"300 configs, max level difference = {worst:.3f} x 5 g^2/nu_r (< 1)")
    assert worst < 1

