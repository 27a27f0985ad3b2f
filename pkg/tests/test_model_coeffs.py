import math

import numpy as np
import numpy.testing as npt
import pytest

from phasechem.coeffs import (FloryHuggins, ModelParams, RegularizedPotential,
                              validate_hypotheses, young_pair)

# regression pin: rho_hat far outside the physical range sits on its plateau
RHO_HAT_AT_10 = 3.4500000000000002


def central_second(f, x, h=1e-4):
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / h ** 2


def central_first(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2.0 * h)


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

def test_rho_endpoints(params):
    assert params.rho(-1.0) == params.rho1
    assert params.rho(1.0) == params.rho2
    assert params.rho(0.0) == 0.5 * (params.rho1 + params.rho2)


def test_rho_matched_degeneracy():
    p = ModelParams(rho1=2.0, rho2=2.0)
    r = np.linspace(-3, 3, 101)
    npt.assert_allclose(p.rho(r), 2.0, rtol=1e-15)
    npt.assert_allclose(p.rho_hat(r), 2.0, rtol=1e-15)
    npt.assert_array_equal(p.rho_hat_prime(r), 0.0)


def test_rho_hat_matches_rho_inside(params):
    r = np.linspace(-1.0, 1.0, 2001)
    npt.assert_array_equal(params.rho_hat(r), params.rho(r))


def test_rho_hat_plateau_value(params):
    assert params.rho_hat(10.0) == pytest.approx(RHO_HAT_AT_10, rel=1e-12)
    assert params.rho_hat(10.0) == params.rho_hat(2.0)
    assert params.rho_hat(-10.0) == params.rho_hat(-2.0)


def test_rho_hat_global_bounds(params):
    r = np.linspace(-6.0, 6.0, 1_000_001)
    rh = params.rho_hat(r)
    assert rh.min() >= 0.5 * params.rho_min - 1e-12
    assert rh.max() <= 2.0 * params.rho_max + 1e-12
    assert np.abs(params.rho_hat_prime(r)).max() <= abs(params.rho_slope) + 1e-12
    assert np.isfinite(params.rho_hat_second(r)).all()


def test_rho_hat_c2_seam(params):
    # finite differences across the matching points agree with the analytic
    # first and second derivatives
    for x in (-1.2, -1.0, -0.999, 0.999, 1.0, 1.2, 1.5):
        fd1 = central_first(params.rho_hat, x)
        assert fd1 == pytest.approx(float(params.rho_hat_prime(x)), abs=2e-6)
        fd2 = central_second(params.rho_hat, x)
        assert fd2 == pytest.approx(float(params.rho_hat_second(x)), abs=2e-4)


def test_steep_density_ratio_keeps_positivity():
    p = ModelParams(rho1=1.0, rho2=50.0)
    r = np.linspace(-8, 8, 200001)
    rh = p.rho_hat(r)
    assert rh.min() >= 0.5 * p.rho_min - 1e-12
    assert rh.max() <= 2.0 * p.rho_max + 1e-12


# ---------------------------------------------------------------------------
# logarithmic potential and regularization
# ---------------------------------------------------------------------------

def test_potential_normalization():
    pot = FloryHuggins(theta=1.0, theta0=0.0)
    val = pot.eval(0.0)
    assert val.value == 0.0 and val.first == 0.0


def test_potential_prime_closed_form():
    pot = FloryHuggins(theta=1.0, theta0=0.0)
    assert float(pot.eval(0.5).first) == pytest.approx(0.5 * math.log(3.0), rel=1e-14)


def test_potential_convexity_identity():
    pot = FloryHuggins(theta=2.0, theta0=5.0)
    r = np.linspace(-0.999, 0.999, 4001)
    npt.assert_allclose(pot.convex_second(r), pot.theta / (1 - r * r), rtol=1e-14)
    assert (pot.convex_second(r) >= pot.theta).all()


def test_potential_domain_error():
    with pytest.raises(ValueError):
        FloryHuggins(1.0, 0.0).eval(1.0)


def test_regularized_matches_inside_window():
    eps = 0.1
    reg = RegularizedPotential(1.0, 2.0, eps)
    base = FloryHuggins(1.0, 2.0)
    r = np.linspace(-1 + eps, 1 - eps, 1001)
    inner = reg.eval(r)
    outer = base.eval(r)
    npt.assert_array_equal(inner.value, outer.value)
    npt.assert_array_equal(inner.first, outer.first)
    npt.assert_array_equal(inner.second, outer.second)


def test_regularized_taylor_value_outside():
    # quadratic continuation at r = 1, eps = 0.1: Taylor polynomial around 0.9
    eps, theta = 0.1, 1.0
    reg = RegularizedPotential(theta, 0.0, eps)
    base = FloryHuggins(theta, 0.0)
    r0, d = 1.0 - eps, 0.1
    expected = (float(base.convex_value(r0)) + float(base.convex_prime(r0)) * d
                + 0.5 * float(base.convex_second(r0)) * d * d)
    assert float(reg.convex_eval(1.0).value) == pytest.approx(expected, rel=1e-14)


def test_regularized_c2_seam():
    reg = RegularizedPotential(1.3, 2.0, 0.05)
    r0 = 1.0 - 0.05
    h = 1e-12
    left = reg.eval(r0 - h)
    right = reg.eval(r0 + h)
    assert float(left.value) == pytest.approx(float(right.value), abs=1e-10)
    assert float(left.first) == pytest.approx(float(right.first), abs=1e-8)
    assert float(left.second) == pytest.approx(float(right.second), rel=1e-6)


def test_regularized_curvature_floor():
    reg = RegularizedPotential(1.7, 3.0, 1e-3)
    r = np.linspace(-5.0, 5.0, 1_000_001)
    assert (reg.convex_eval(r).second >= reg.theta - 1e-12).all()


def test_potential_derivatives_match_finite_differences(params):
    pot = params.potential()
    for x in (-0.9, -0.3, 0.0, 0.4, 0.8, 1.2, -1.4):
        fd = central_first(lambda r: float(pot.eval(r).value), x)
        assert fd == pytest.approx(float(pot.eval(x).first), rel=1e-6, abs=1e-6)
        fd2 = central_first(lambda r: float(pot.eval(r).first), x)
        assert fd2 == pytest.approx(float(pot.eval(x).second), rel=1e-6, abs=1e-6)


def test_stabilization_covers_curvature(params):
    pot = params.potential()
    r = np.linspace(-5, 5, 100001)
    half_max = 0.5 * np.abs(pot.eval(r).second).max() / params.eps_int
    assert params.stabilization() >= half_max


# ---------------------------------------------------------------------------
# interaction function
# ---------------------------------------------------------------------------

def test_beta_vanishes_outside_support(params):
    r = np.array([-3.0, -2.0, 2.0, 2.5, 3.0, 100.0])
    npt.assert_array_equal(params.beta(r), 0.0)
    npt.assert_array_equal(params.beta_prime(r), 0.0)
    npt.assert_array_equal(params.beta_second(r), 0.0)


def test_beta_profile_inside(params):
    assert float(params.beta(0.0)) == params.chi
    r = np.linspace(-1, 1, 101)
    npt.assert_allclose(params.beta(r), params.chi * (1 - r), rtol=1e-14)
    npt.assert_allclose(params.beta_prime(r), -params.chi, rtol=1e-14)


def test_beta_derivatives_match_finite_differences(params):
    for x in (-1.7, -1.2, -0.5, 0.8, 1.3, 1.9):
        fd = central_first(lambda r: float(params.beta(r)), x)
        assert fd == pytest.approx(float(params.beta_prime(x)), rel=1e-6, abs=1e-6)
        fd2 = central_first(lambda r: float(params.beta_prime(r)), x)
        assert fd2 == pytest.approx(float(params.beta_second(x)), rel=1e-6, abs=1e-6)


def test_beta_seam_third_derivative_continuous(params):
    # C^3 matching: one-sided slopes of beta'' converge to the same limit at
    # each seam (the third derivative has no jump; only the fourth does)
    h = 1e-5
    bound = 1e-2 * max(1.0, abs(params.chi))   # ~ h * sup|beta''''|
    for seam in (-2.0, -1.0, 1.0, 2.0):
        b2 = lambda r: float(params.beta_second(r))
        right = (b2(seam + h) - b2(seam)) / h
        left = (b2(seam) - b2(seam - h)) / h
        assert right == pytest.approx(left, abs=bound)


def test_beta_bounded(params):
    assert params.beta_sup() <= 2.5 * abs(params.chi) + 1e-12


# ---------------------------------------------------------------------------
# viscosity and mobility
# ---------------------------------------------------------------------------

def test_nu_endpoints_and_matched(params):
    assert float(params.nu(-1.0)) == pytest.approx(params.nu1, rel=1e-15)
    assert float(params.nu(1.0)) == pytest.approx(params.nu2, rel=1e-15)
    p = ModelParams(nu1=0.2, nu2=0.2)
    npt.assert_allclose(p.nu(np.linspace(-4, 4, 41)), 0.2, rtol=1e-15)


def test_nu_mobility_clamped(params):
    lo, hi = params.nu_bounds
    vals = params.nu(np.array([-5.0, 5.0, -2.0, 2.0]))
    assert (vals >= lo - 1e-15).all() and (vals <= hi + 1e-15).all()
    assert lo > 0
    mlo, mhi = params.mobility_bounds
    mvals = params.mobility(np.linspace(-7, 7, 10001))
    assert (mvals >= mlo - 1e-15).all() and (mvals <= mhi + 1e-15).all()
    assert mlo > 0
    inside = params.mobility(np.linspace(-1, 1, 101))
    assert inside.min() == pytest.approx(params.m_star)
    assert inside.max() == pytest.approx(params.m_star_upper)


# ---------------------------------------------------------------------------
# product inequality utility
# ---------------------------------------------------------------------------

def test_young_trivial_case():
    f, g = young_pair(0.0, 7.0)
    assert f == 0.0 and g >= 0.0


def test_young_equality_case():
    a, b = math.log(2.0), 1.0
    f, g = young_pair(a, b)
    assert float(f) == pytest.approx(1.0 - math.log(2.0), rel=1e-12)
    assert float(g) == pytest.approx(2.0 * math.log(2.0) - 1.0, rel=1e-12)
    assert float(f + g) == pytest.approx(a * b, abs=1e-12)


def test_young_sweep(rng):
    a = rng.random(10_000) * 10.0
    b = rng.random(10_000) * 10.0
    f, g = young_pair(a, b)
    assert (a * b <= f + g + 1e-12).all()


def test_young_rejects_negative():
    with pytest.raises(ValueError):
        young_pair(-1.0, 2.0)


# ---------------------------------------------------------------------------
# hypothesis validation
# ---------------------------------------------------------------------------

def test_validate_default_passes(params):
    assert validate_hypotheses(params).ok


def test_validate_flags_nonpositive_theta():
    rep = validate_hypotheses(ModelParams(theta=-1.0))
    assert not rep.ok
    assert "potential_convexity" in rep.codes()


def test_validate_flags_mobility_order():
    rep = validate_hypotheses(ModelParams(m_star=2.0, m_star_upper=1.0))
    assert "mobility_bounds" in rep.codes()


def test_validate_flags_bad_regularization():
    rep = validate_hypotheses(ModelParams(eps_reg=0.9))
    assert "regularization" in rep.codes()
    rep2 = validate_hypotheses(ModelParams(), phi_mean=0.9999)
    assert "regularization" in rep2.codes()


def test_validate_notes_growth_condition(params):
    rep = validate_hypotheses(params)
    assert any("growth" in n for n in rep.notes)
