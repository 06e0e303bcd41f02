import math

import numpy as np
import pytest
from scipy.special import gammaln

from twowell.errors import CapacityError, ConfigurationError
from twowell.model import ModelParams
from twowell.quantum import (QuantumGroundReport, build, classical_energy, coherent_state,
                             compare_with_semiclassical, ground_fixed_point, ground_state,
                             localized_doublet, low_spectrum, phase_distribution,
                             tilt_localized)


def binomial_amplitudes(n):
    k = np.arange(n + 1)
    return np.exp(0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) - 0.5 * n * math.log(2))


def same_up_to_sign(a, b, tol):
    return min(np.max(np.abs(a - b)), np.max(np.abs(a + b))) < tol


def test_build_examples():
    h = build(ModelParams(2, 1.0, 0.0))
    np.testing.assert_allclose(h.diag, [0, 0, 0])
    np.testing.assert_allclose(h.offdiag, [math.sqrt(2)] * 2)
    h = build(ModelParams(1, 0.0, 0.0, 2.0))
    np.testing.assert_allclose(h.diag, [-1, 1])
    np.testing.assert_allclose(h.offdiag, [0])
    np.testing.assert_allclose(build(ModelParams(2, 0.0, 1.0)).diag, [2, 1, 2])


def test_capacity():
    with pytest.raises(CapacityError):
        build(ModelParams(50, 1.0, 0.0), cap=10)


def test_two_atoms_exact():
    g = ground_state(build(ModelParams(2, 1.0, 0.0)))
    assert g.energy == pytest.approx(-2.0, abs=1e-12)
    assert same_up_to_sign(g.state, np.array([1, -math.sqrt(2), 1]) / 2, 1e-12)
    assert g.mean_n == pytest.approx(1.0, abs=1e-12)
    assert g.delta_n == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_single_atom():
    g = ground_state(build(ModelParams(1, 1.0, 0.0)))
    assert g.energy == pytest.approx(-1.0, abs=1e-12)
    assert g.delta_n == pytest.approx(0.5, abs=1e-12)


def test_low_spectrum_two_atoms():
    energies = [e for e, _ in low_spectrum(build(ModelParams(2, 1.0, 0.0)), 3)]
    np.testing.assert_allclose(energies, [-2, 0, 2], atol=1e-12)


def test_low_spectrum_consistent_with_ground_state():
    h = build(ModelParams.from_reduced(1.3, 0.2, 60))
    (e0, v0), = low_spectrum(h, 1)
    g = ground_state(h)
    assert e0 == g.energy
    np.testing.assert_array_equal(v0, g.state)


def test_low_spectrum_against_dense():
    h = build(ModelParams.from_reduced(-0.7, 0.3, 40))
    w = np.linalg.eigvalsh(h.dense())
    np.testing.assert_allclose([e for e, _ in low_spectrum(h, 5)], w[:5], atol=1e-10)


@pytest.mark.parametrize("n", [200, 2000])
def test_noninteracting_binomial(n):
    g = ground_state(build(ModelParams(n, 1.0, 0.0)))
    assert g.delta_n == pytest.approx(math.sqrt(n) / 2, abs=1e-6)
    assert np.allclose(np.abs(g.state), binomial_amplitudes(n), atol=1e-8)


def test_phase_distribution_against_direct_sum(rng):
    c = rng.normal(size=9)
    c /= np.linalg.norm(c)
    phis, P = phase_distribution(c, grid=64)
    n = np.arange(9)
    direct = np.abs(np.exp(-1j * np.outer(phis, n)) @ c) ** 2 / (2 * math.pi)
    np.testing.assert_allclose(P, direct, atol=1e-14)


@pytest.mark.parametrize("xi, delta, n", [(0.0, 0.0, 50), (2.0, 0.0, 400), (-1.5, 0.1, 100), (0.5, 0.0, 5000)])
def test_phase_distribution_normalized(xi, delta, n):
    g = ground_state(build(ModelParams.from_reduced(xi, delta, n)))
    step = 2 * math.pi / len(g.phase_grid)
    assert np.sum(g.phase_distribution) * step == pytest.approx(1.0, abs=1e-10)
    assert len(g.phase_grid) >= n + 1


def test_repulsive_ground_state_phase():
    g = ground_state(build(ModelParams.from_reduced(1.0, 0.0, 100)))
    assert abs(g.mean_phase) == pytest.approx(math.pi, abs=1e-9)


@pytest.mark.parametrize("xi", [0.0, 0.5, 1.0, 2.0, 5.0])
def test_number_phase_uncertainty(xi):
    g = ground_state(build(ModelParams.from_reduced(xi, 0.0, 200)))
    assert g.delta_n * g.delta_phi_circular >= 0.45


def test_number_fluctuation_decreases_with_repulsion():
    dn = [ground_state(build(ModelParams.from_reduced(xi, 0.0, 200))).delta_n
          for xi in (0.0, 0.5, 1.0, 2.0, 5.0)]
    assert all(a > b for a, b in zip(dn, dn[1:]))


def test_coherent_state_expectation_identity(rng):
    # <H> in an SU(2) coherent state = mean-field energy + g beta N x(1-x)
    p = ModelParams(30, 0.7, 0.05, 0.2)
    h = build(p)
    for _ in range(10):
        x, phi = rng.uniform(0.01, 0.99), rng.uniform(-math.pi, math.pi)
        v = coherent_state(p.n_total, x, phi)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        assert h.expectation(v) == pytest.approx(
            classical_energy(p, x, phi) + p.mean_field * p.n_total * x * (1 - x), abs=1e-10)


@pytest.mark.parametrize("xi", [-2.0, 0.0, 2.0])
def test_variational_bound(xi, rng):
    p = ModelParams.from_reduced(xi, 0.0, 100)
    h = build(p)
    e0 = ground_state(h).energy
    for _ in range(20):
        v = coherent_state(100, rng.uniform(0.01, 0.99), rng.uniform(-math.pi, math.pi))
        assert e0 <= h.expectation(v) + 1e-9


def test_attractive_doublet():
    p = ModelParams.from_reduced(-2.0, 0.0, 100)
    h = build(p)
    (e0, _), (e1, _), (e2, _) = low_spectrum(h, 3)
    assert e1 - e0 < 0.01 * (e2 - e1)
    d = localized_doublet(h)
    x_minus, x_plus = (1 - math.sqrt(0.75)) / 2, (1 + math.sqrt(0.75)) / 2
    assert d.localized[0].mean_n == pytest.approx(100 * x_minus, abs=2.0)
    assert d.localized[1].mean_n == pytest.approx(100 * x_plus, abs=2.0)
    a, b = d.localized_delta_n
    assert a == pytest.approx(b, abs=1e-8)
    assert d.gap >= 0


def test_doublet_widens_near_threshold():
    far = localized_doublet(build(ModelParams.from_reduced(-2.0, 0.0, 100))).localized_delta_n[0]
    near = localized_doublet(build(ModelParams.from_reduced(-1.1, 0.0, 100))).localized_delta_n[0]
    assert near > far


def test_doublet_preconditions():
    for xi, delta in [(2.0, 0.0), (-0.5, 0.0), (-2.0, 0.1)]:
        with pytest.raises(ConfigurationError):
            localized_doublet(build(ModelParams.from_reduced(xi, delta, 50)))


def test_tilt_localization_agrees_with_doublet():
    p = ModelParams.from_reduced(-2.0, 0.0, 100)
    lo, hi = tilt_localized(p, 1e-4)
    d = localized_doublet(build(p))
    assert lo.mean_n < 50 < hi.mean_n
    assert lo.delta_n == pytest.approx(d.localized_delta_n[0], rel=0.02)


def test_ground_fixed_point_selection():
    assert ground_fixed_point(ModelParams.from_reduced(1.0, 0.0, 100)).branch == "S"
    assert ground_fixed_point(ModelParams.from_reduced(-2.0, 0.0, 100)).branch in ("S_plus", "S_minus")


def test_compare_modes():
    rep = compare_with_semiclassical(ModelParams.from_reduced(1.0, 0.0, 400), "generic")
    assert rep["mode"] == "ground" and rep["ratio"] == pytest.approx(1.0, abs=0.05)
    rep = compare_with_semiclassical(ModelParams.from_reduced(-2.0, 0.0, 100), "generic")
    assert rep["mode"] == "doublet" and rep["ratio"] == pytest.approx(1.0, abs=0.1)
    rep = compare_with_semiclassical(ModelParams.from_reduced(-2.0, 0.0, 100), "generic", 1e-4)
    assert rep["mode"] == "tilt-localized"


def test_report_round_trip():
    g = ground_state(build(ModelParams.from_reduced(0.8, 0.1, 30)))
    back = QuantumGroundReport.from_dict(g.to_dict())
    assert back.energy == g.energy and back.delta_n == g.delta_n
    np.testing.assert_array_equal(back.phase_distribution, g.phase_distribution)
    with pytest.raises(ConfigurationError):
        QuantumGroundReport.from_dict(g.to_dict(with_arrays=False))


@pytest.mark.parametrize("xi", [0.0, 0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("n", [10, 100, 400])
def test_ground_energy_below_coherent_state_at_s(xi, n):
    # the coherent state centred on S sits g beta N/4 above the mean-field value there
    p = ModelParams.from_reduced(xi, 0.0, n)
    e0 = ground_state(build(p)).energy
    bound = classical_energy(p, 0.5, math.pi) + p.mean_field * n / 4
    assert e0 <= bound + 1e-9 * max(1.0, abs(bound))
    assert bound == pytest.approx(build(p).expectation(coherent_state(n, 0.5, math.pi)), abs=1e-9)


@pytest.mark.parametrize("xi, delta, n", [(0.0, 0.0, 1), (2.0, 0.3, 300), (-3.0, 0.0, 1500)])
def test_amplitudes_normalized(xi, delta, n):
    g = ground_state(build(ModelParams.from_reduced(xi, delta, n)))
    assert float(g.state @ g.state) == pytest.approx(1.0, abs=1e-12)
