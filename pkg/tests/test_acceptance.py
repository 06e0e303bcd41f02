"""Acceptance gate: one recorded PASS/FAIL line per criterion, each at its stated tolerance."""
import json
import math
import time

import numpy as np
import pytest

from twowell.bifurcation import census, find_fixed_points
from twowell.cli import run
from twowell.contour import contour_grid, grid_critical_points
from twowell.dynamics import detect_trapping, integrate, measure_period, reverse
from twowell.fluctuation import (coefficients, critical_asymptote, fixed_point_for, predict,
                                 scaling_exponents)
from twowell.model import ModelParams, PhasePoint, reduced_energy
from twowell.quantum import build, ground_state, localized_doublet


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def run_critical(tmp_path, delta):
    out = tmp_path / f"critical_{delta}.json"
    code = run(["critical", "--delta", str(delta), "--out", str(out)])
    assert code == 0
    return json.loads(out.read_text())[0]


# ------------------------------------------------------------------ 1

def test_c1_critical_point_zero_tilt(tmp_path, verdict):
    r, dt = timed(lambda: run_critical(tmp_path, 0.0))
    width = r["bracket_hi"] - r["bracket_lo"]
    ok = abs(r["xi_c"] - 1.0) <= 1e-9 and width <= 1e-9 and dt < 1.0
    verdict("1a critical --delta 0: xi_c = 1, width <= 1e-9, < 1 s", ok,
            f"xi_c={r['xi_c']:.12f} width={width:.2e} t={dt:.3f}s")
    assert ok


def test_c1_critical_point_band(tmp_path, verdict):
    r, dt = timed(lambda: run_critical(tmp_path, 0.1))
    ok = 1.30 <= r["xi_c"] <= 1.44 and dt < 1.0
    verdict("1b critical --delta 0.1: xi_c in [1.30, 1.44], < 1 s", ok,
            f"xi_c={r['xi_c']:.9f} t={dt:.3f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="the converged bracket around 1.33999 cannot contain 1.37; "
                                       "see the decisions ledger")
def test_c1_quoted_value_inside_bracket(tmp_path, verdict):
    r = run_critical(tmp_path, 0.1)
    ok = r["bracket_lo"] <= 1.37 <= r["bracket_hi"]
    verdict("1c quoted 1.37 inside the bracket-derived confidence", ok,
            f"bracket=[{r['bracket_lo']:.9f}, {r['bracket_hi']:.9f}]")
    assert ok


# ------------------------------------------------------------------ 2

def test_c2_fixed_point_census(verdict):
    cases = {(0.6, 0.0): (2, 0), (1.8, 0.0): (3, 1), (1.1, 0.1): (2, 0), (1.8, 0.1): (3, 1)}
    t0 = time.perf_counter()
    got = {k: census(find_fixed_points(*k)) for k in cases}
    worst = 0.0
    for xi in (0.6, 1.8):
        fps = {fp.branch: fp.x0 for fp in find_fixed_points(xi, 0.0)}
        expected = {"P": 0.5, "S": 0.5}
        if xi > 1:
            r = math.sqrt(1 - xi**-2)
            expected.update(S_minus=(1 - r) / 2, S_plus=(1 + r) / 2)
        assert fps.keys() == expected.keys()
        worst = max(worst, max(abs(fps[k] - v) for k, v in expected.items()))
    dt = time.perf_counter() - t0
    ok = got == cases and worst <= 1e-10 and dt < 1.0
    verdict("2 census of the four contour sets; zero-tilt locations to 1e-10, < 1 s", ok,
            f"{got} max|dx|={worst:.1e} t={dt:.3f}s")
    assert ok


# ------------------------------------------------------------------ 3

def test_c3_dynamics(verdict):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    drift, reversal = 0.0, 0.0
    for _ in range(20):
        pt = PhasePoint(rng.uniform(0.05, 0.95), rng.uniform(-math.pi, math.pi))
        xi, delta = rng.uniform(-3, 3), rng.uniform(-0.5, 0.5)
        traj = integrate(pt, xi, delta, 1000.0)
        assert not traj.step_stats.boundary_event
        drift = max(drift, traj.step_stats.max_energy_drift)
        back = integrate(reverse(integrate(pt, xi, delta, 100.0).end), xi, delta, 100.0)
        home = reverse(back.end)
        reversal = max(reversal, abs(home.x - pt.x),
                       abs(math.remainder(home.phi - pt.phi, 2 * math.pi)))
    # seeds strictly inside the S+- basins: energy above the separatrix through P
    xi = 1.8
    h_sep = reduced_energy(PhasePoint(0.5, 0.0), xi, 0.0)
    trapped, seeds = 0, 0
    while seeds < 10:
        side = 1 if seeds % 2 == 0 else -1
        pt = PhasePoint(0.5 + side * rng.uniform(0.3, 0.46), rng.uniform(-0.4, 0.4))
        if reduced_energy(pt, xi, 0.0) < h_sep + 1e-3:
            continue
        seeds += 1
        rep = detect_trapping(integrate(pt, xi, 0.0, 100.0))
        trapped += rep.trapped and rep.side == ("left" if side > 0 else "right")
    dt = time.perf_counter() - t0
    ok = drift <= 1e-8 and reversal <= 1e-6 and trapped == 10 and dt < 10.0
    verdict("3 drift <= 1e-8 over tau=1000 (20 starts), reversal <= 1e-6, 10 trapped orbits, < 10 s",
            ok, f"drift={drift:.1e} reversal={reversal:.1e} trapped={trapped}/10 t={dt:.2f}s")
    assert ok


# ------------------------------------------------------------------ 4

def test_c4_linearization_period(verdict):
    t0 = time.perf_counter()
    errs = {}
    for xi in (0.0, 0.5, 2.0, 5.0):
        p = ModelParams.from_reduced(xi, 0.0, 1000)
        coef = coefficients(fixed_point_for(p, "S"), p, "generic")
        predicted = 2 * math.pi * (2 * p.tunneling) / math.sqrt(coef.E_J * coef.E_C)
        measured = measure_period(integrate(PhasePoint(0.5 + 1e-3, math.pi), xi, 0.0, 60.0)).period
        errs[xi] = abs(measured / predicted - 1)
        if xi == 0.0:
            rabi = abs(measured / (2 * math.pi) - 1)
    dt = time.perf_counter() - t0
    ok = max(errs.values()) <= 0.02 and rabi <= 0.01 and dt < 10.0
    verdict("4 small-oscillation period vs 2 pi/sqrt(E_J E_C) within 2%; Rabi 2 pi within 1%, < 10 s",
            ok, "rel.err " + " ".join(f"xi={k:g}:{v:.1e}" for k, v in errs.items())
            + f" rabi={rabi:.1e} t={dt:.2f}s")
    assert ok


# ------------------------------------------------------------------ 5

def test_c5_formula_pins(verdict):
    p1 = ModelParams.from_reduced(1.0, 0.0, 400)
    r1 = predict(fixed_point_for(p1, "S"), p1, "paper_S")
    p2 = ModelParams.from_reduced(math.sqrt(2), 0.0, 400)
    r2 = predict(fixed_point_for(p2, "S_plus"), p2, "paper_Spm")
    p3 = ModelParams.from_reduced(1.001, 0.0, 400)
    r3 = predict(fixed_point_for(p3, "S_plus"), p3, "paper_Spm")
    ratio = r3.delta_n / critical_asymptote(400, 1.001)
    # dn * (1/dn) is 1 up to one rounding of the product
    products = [abs(r.delta_n * r.delta_phi - 1) for r in (r1, r2, r3)]
    ok = (abs(r1.delta_n - 11.8921) <= 1e-3 and abs(r2.delta_n - 11.8921) <= 1e-3
          and max(products) <= 2.3e-16 and abs(ratio - 1) <= 0.005)
    verdict("5 fluctuation pins 11.8921 +- 1e-3 (x2), dn*dphi = 1, asymptote ratio 1 +- 0.005", ok,
            f"{r1.delta_n:.6f} {r2.delta_n:.6f} max|prod-1|={max(products):.1e} ratio={ratio:.5f}")
    assert ok


# ------------------------------------------------------------------ 6

def test_c6_scaling_exponents(verdict):
    t0 = time.perf_counter()
    weak, _ = scaling_exponents(ModelParams(1000, 1.0, 2.0), "weak")
    strong, _ = scaling_exponents(ModelParams(1000, 1.0, 2e-8), "strong")
    crit, _ = scaling_exponents(ModelParams.from_reduced(1.5, 0.0, 400), "critical")
    dt = time.perf_counter() - t0
    ok = abs(weak - 0.25) <= 0.01 and abs(strong - 0.5) <= 0.01 and abs(crit + 0.25) <= 0.01 and dt < 5.0
    verdict("6 exponents 0.25 / 0.50 / -0.25 within 0.01, < 5 s", ok,
            f"weak={weak:.4f} strong={strong:.4f} critical={crit:.4f} t={dt:.2f}s")
    assert ok


# ------------------------------------------------------------------ 7

def test_c7_quantum_pins(verdict):
    t0 = time.perf_counter()
    g2 = ground_state(build(ModelParams(2, 1.0, 0.0)))
    worst = 0.0
    for n in (1, 2, 10, 101, 500, 1000, 2000):
        g = ground_state(build(ModelParams(n, 1.0, 0.0)))
        worst = max(worst, abs(g.delta_n - math.sqrt(n) / 2))
    dt = time.perf_counter() - t0
    ok = (abs(g2.energy + 2.0) <= 1e-12 and abs(g2.delta_n - math.sqrt(0.5)) <= 1e-12
          and worst <= 1e-6 and dt < 30.0)
    verdict("7 N=2: E0 = -2 gamma, dn = sqrt(1/2); N <= 2000 binomial dn to 1e-6, < 30 s", ok,
            f"E0={g2.energy:.12f} dn={g2.delta_n:.12f} max|dn-sqrt(N)/2|={worst:.1e} t={dt:.2f}s")
    assert ok


# ------------------------------------------------------------------ 8

def test_c8_quantum_vs_semiclassical(verdict):
    t0 = time.perf_counter()
    rep_err, s_ratio = 0.0, {}
    for n in (100, 400):
        for xi in (0.0, 0.5, 1.0, 2.0):
            p = ModelParams.from_reduced(xi, 0.0, n)
            fp = fixed_point_for(p, "S")
            exact = ground_state(build(p)).delta_n
            rep_err = max(rep_err, abs(predict(fp, p, "generic").delta_n / exact - 1))
            s_ratio[(n, xi)] = predict(fp, p, "paper_S").delta_n / exact
    att_err = 0.0
    for xi in (-1.5, -2.0):
        p = ModelParams.from_reduced(xi, 0.0, 100)
        loc = localized_doublet(build(p)).localized_delta_n
        for branch, exact in zip(("S_minus", "S_plus"), loc):
            pred = predict(fixed_point_for(p, branch), p, "generic").delta_n
            att_err = max(att_err, abs(pred / exact - 1))
    dt = time.perf_counter() - t0
    ok = rep_err <= 0.05 and att_err <= 0.10 and dt < 60.0
    verdict("8 repulsive exact vs generic within 5%; attractive doublet within 10%, < 60 s", ok,
            f"repulsive max={rep_err:.2%} attractive max={att_err:.2%} "
            f"paper_S/exact at xi=0: {s_ratio[(100, 0.0)]:.4f}, {s_ratio[(400, 0.0)]:.4f} "
            f"t={dt:.2f}s")
    assert ok


# ------------------------------------------------------------------ 9

def test_c9_contour_structure(verdict):
    grid = contour_grid(1.8, 0.0)
    dx = grid.x_axis[1] - grid.x_axis[0]
    dphi = grid.phi_axis[1] - grid.phi_axis[0]
    crit = grid_critical_points(grid)
    unmatched = 0
    for fp in grid.overlay:
        near = [c for c in crit if abs(grid.x_axis[c[1]] - fp.x0) <= dx * (1 + 1e-9)
                and abs(math.remainder(grid.phi_axis[c[0]] - fp.phi, 2 * math.pi)) <= dphi * (1 + 1e-9)]
        unmatched += not near
    mirror = float(np.max(np.abs(grid.values - grid.values[:, ::-1])))
    ok = unmatched == 0 and len(crit) == len(grid.overlay) and mirror == 0.0
    verdict("9 contour critical points within one cell of the fixed points; exact mirror symmetry", ok,
            f"{len(crit)} grid critical points, {len(grid.overlay)} fixed points, "
            f"max mirror diff={mirror:.1e}")
    assert ok
