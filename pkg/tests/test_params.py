import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chemofv.params import (DegenerateExponent, GnExponents, ModelParams, check_gamma_condition,
                            compute_theta_cap, default_q, find_pbar, gn_exponents, mass_bound,
                            regime_report, verify_gn_inequalities)


def test_theta_cap_figure_values():
    assert compute_theta_cap(ModelParams(n=3, m2=1, alpha=1, tau=0)) == pytest.approx(1.5, abs=1e-12)
    assert compute_theta_cap(ModelParams(n=2, m2=1, alpha=1.5, tau=0)) == pytest.approx(5 / 3, abs=1e-12)


def test_theta_cap_tau_zero_ignores_repellent():
    base = ModelParams(n=3, m2=0, alpha=1, tau=0)
    assert compute_theta_cap(base.replace(m3=10, beta=10)) == compute_theta_cap(base)


def test_theta_cap_floor():
    assert compute_theta_cap(ModelParams(n=1, m2=0, alpha=1, tau=0)) == 1.0


@pytest.mark.parametrize("gamma,expected", [(1.75, True), (1.4, False), (2.0, True), (2.5, False),
                                            (1.5, False)])
def test_gamma_condition(gamma, expected):
    p = ModelParams(n=3, m2=1, alpha=1, tau=0)
    # gamma > 2 is rejected by nothing in ModelParams, only by the condition
    assert check_gamma_condition(p.replace(gamma=gamma)) is expected


def test_mass_bound_examples():
    p = ModelParams(lambda_=1, mu=1, k=1.5, rho=1)
    assert mass_bound(p, 2.0, 1.0) == 2.0
    assert mass_bound(ModelParams(lambda_=1, mu=1, k=1.1, rho=1), 0.0, math.pi) == pytest.approx(math.pi)
    assert mass_bound(ModelParams(lambda_=2, mu=1, k=2, rho=1), 0.0, 1.0) == pytest.approx(2.0)


def test_mass_bound_needs_k_above_rho():
    with pytest.raises(ValueError, match="k>rho"):
        mass_bound(ModelParams(k=1.0, rho=1.0), 1.0, 1.0)


@given(st.floats(1.0, 3.0), st.floats(0.01, 3.0))
def test_mass_bound_unit_domain_equal_rates(rho, dk):
    p = ModelParams(lambda_=0.7, mu=0.7, rho=rho, k=rho + dk)
    assert mass_bound(p, 0.0, 1.0) == pytest.approx(1.0)


@given(st.integers(1, 3), st.floats(-2, 3), st.floats(0.1, 3), st.floats(-2, 3), st.floats(0.1, 3),
       st.floats(0, 1))
def test_theta_cap_monotone(n, m2, alpha, m3, beta, bump):
    p = ModelParams(n=n, tau=1, m2=m2, alpha=alpha, m3=m3, beta=beta)
    cap = compute_theta_cap(p)
    for field in ("m2", "alpha", "m3", "beta"):
        assert compute_theta_cap(p.replace(**{field: getattr(p, field) + bump})) >= cap
    if n < 3:
        assert compute_theta_cap(p.replace(n=n + 1)) >= cap


def test_gn_exponents_hand_values():
    p = ModelParams(n=2, gamma=2, m2=1, m3=1, alpha=1, beta=1)
    e = gn_exponents(p, 2.0, 2.0)
    assert e.theta == pytest.approx(0.5)
    assert e.sigma == pytest.approx(4 / 3)
    assert e.sigma * e.theta / p.gamma == pytest.approx(1 / 3)
    flags = verify_gn_inequalities(e, p, beta_gt_one=False)
    assert len(flags) == 10 and flags[0] and flags[1]


@pytest.mark.parametrize("q", [2, 5, 10])
def test_gn_exponent_limits(q):
    p = ModelParams(n=3, gamma=1.8, m2=0.5, alpha=1, m3=0.2, beta=1.5)
    e = gn_exponents(p, 1e8, q)
    assert abs(e.theta - 1) < 1e-6
    assert abs(e.theta_under - (1 - 1 / q)) < 1e-6
    assert abs(e.theta_tilde - (1 - 1 / p.beta)) < 1e-6


def test_gn_degenerate():
    p = ModelParams(n=2, m2=-5, alpha=1)
    with pytest.raises(DegenerateExponent):
        gn_exponents(p, 2.0, 2.0)


def test_open_interval_boundary():
    e = GnExponents(*([1.0] + [0.5] * 8))
    assert verify_gn_inequalities(e, ModelParams(), True)[0] is False


def test_violated_condition_fails_sigma_bar_for_large_p():
    p = ModelParams(n=2, gamma=1.2, m2=1, alpha=1, tau=1)   # 2/3*2 = 1.33 > 1.2
    for p_ in 10.0 ** np.arange(1, 7):
        flags = verify_gn_inequalities(gn_exponents(p, p_, 2.0), p, False)
        assert flags[3] is False


def test_find_pbar_examples():
    p = ModelParams(n=2, gamma=2, m2=0, m3=0, alpha=1, beta=1, tau=1)
    pbar = find_pbar(p, q=2)
    assert pbar is not None
    for factor in (2, 10):
        flags = verify_gn_inequalities(gn_exponents(p, factor * pbar, 2), p, False)
        assert all(flags[:6]) and all(flags[8:])


def test_find_pbar_below_threshold():
    p = ModelParams(n=2, gamma=1.2, m2=1, alpha=1, tau=1)
    with pytest.raises(ValueError, match="precondition"):
        find_pbar(p, q=2)
    assert find_pbar(p, q=2, p_max=1e6, strict=False) is None


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.floats(-1, 1.5), st.floats(-1, 1.5), st.floats(0.1, 2),
       st.floats(1.01, 2), st.floats(0.01, 0.99))
def test_find_pbar_property(n, m2, m3, alpha, beta, frac):
    p = ModelParams(n=n, tau=1, m2=m2, m3=m3, alpha=alpha, beta=beta)
    cap = compute_theta_cap(p)
    if cap >= 2:
        return
    p = p.replace(gamma=cap + frac * (2 - cap))
    pbar = find_pbar(p)
    assert pbar is not None
    assert all(verify_gn_inequalities(gn_exponents(p, 2 * pbar, default_q(p)), p, True))


def test_regime_report_serialisation():
    p = ModelParams(n=3, m2=1, alpha=1, tau=0, gamma=1.75, c=1e-3, chi=5, xi=0)
    r = regime_report(p, 13.0, 4.0)
    assert r.gamma_ok and r.theta_cap == 1.5
    text = r.to_text()
    assert "theta_cap = 1.5" in text and "gamma_ok = true" in text
    assert len(r.csv_row(p).split(",")) == len(r.csv_header(p).split(","))


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(k=1.0, rho=1.5)
    with pytest.raises(ValueError):
        ModelParams(tau=2)
    with pytest.raises(ValueError):
        ModelParams(alpha=0)


def test_default_productions():
    u = np.array([0.0, 1.0, 4.0])
    p = ModelParams(alpha=0.5, beta=2)
    np.testing.assert_allclose(p.production_v(u), [0, 1, 2])
    np.testing.assert_allclose(p.production_w(u), [0, 1, 16])
    custom = ModelParams(f1=lambda s: 3 * s)
    np.testing.assert_allclose(custom.production_v(u), 3 * u)
