import io
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from scipy import integrate

from fdrelay import analytic as an
from fdrelay.core import SystemParams

import _properties as props

REF = SystemParams.from_db(10, 20, 20, 10, gamma_th_db=5)


def at_rate(rate):
    return SystemParams.from_db(10, 20, 20, 10, rate=rate)


def alpha_level_snr(p, n, seed, kind):
    """Monte Carlo of the additive-SNR model the closed forms describe."""
    rng = np.random.default_rng(seed)
    g_sd = rng.exponential(p.pi_sd, n)
    g_rd = rng.exponential(p.relay_power * p.pi_rd, n)
    g_sr = rng.exponential(p.pi_sr, n) / (p.relay_power * rng.exponential(p.pi_rr, n) + 1)
    coop = g_sr >= p.gamma_th
    if kind == "ISDF":
        coop &= g_sd < p.gamma_th
    return np.where(coop, g_sd + g_rd, g_sd)


params_strategy = st.builds(
    lambda g, r: SystemParams.from_db(*g, rate=r),
    st.tuples(*[st.floats(-10, 30)] * 4),
    st.floats(0.25, 8),
).filter(lambda p: not props.is_degenerate(p))


# ---- link outages ---------------------------------------------------------


def test_p_out_sr_no_rsi():
    p = SystemParams(1.0, 10.0, 1.0, 0.0, rate=1.0)
    assert an.p_out_sr(p) == pytest.approx(1 - math.exp(-1 / 10), rel=1e-14)


def test_p_out_sr_silent_relay():
    p = SystemParams(1.0, 10.0, 1.0, 10.0, relay_power=0.0, rate=1.0)
    assert an.p_out_sr(p) == pytest.approx(1 - math.exp(-1 / 10), rel=1e-14)


def test_p_out_sr_value_and_monte_carlo():
    p = SystemParams(1.0, 10.0, 1.0, 10.0, rate=1.0)
    assert an.p_out_sr(p) == pytest.approx(1 - 10 * math.exp(-0.1) / 20, rel=1e-14)
    assert an.p_out_sr(p) == pytest.approx(0.54758, abs=5e-6)
    rng = np.random.default_rng(10)
    n = 10**7
    emp = np.mean(rng.exponential(10.0, n) / (rng.exponential(10.0, n) + 1) < 1.0)
    q = an.p_out_sr(p)
    assert abs(emp - q) < 3 * math.sqrt(q * (1 - q) / n)


def test_p_out_sd():
    assert an.p_out_sd(SystemParams(5.0, 1, 1, 0, rate=1e-9)) == pytest.approx(0.0, abs=1e-9)
    p = SystemParams(3.0, 1, 1, 0, rate=2.0)
    assert an.p_out_sd(p) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert an.p_out_sd(REF) == pytest.approx(1 - math.exp(-(10**0.5) / 10), rel=1e-14)
    assert an.p_out_sd(REF) == pytest.approx(0.2711, abs=1e-4)
    rng = np.random.default_rng(1)
    n = 10**6
    emp = np.mean(rng.exponential(10.0, n) < REF.gamma_th)
    q = an.p_out_sd(REF)
    assert abs(emp - q) < 4 * math.sqrt(q * (1 - q) / n)


def test_link_outages_bundle():
    lk = an.link_outages(REF)
    assert lk.p_sd == an.p_out_sd(REF)
    assert lk.p_rd == pytest.approx(1 - math.exp(-REF.gamma_th / 100), rel=1e-14)


# ---- hypoexponential ------------------------------------------------------


def test_hypoexp_zero():
    assert an.cdf_hypoexp(0.0, REF) == 0.0


def test_hypoexp_value_and_monte_carlo():
    p = SystemParams(1.0, 1.0, 2.0, 0.0)
    expect = 1 - (2 * math.exp(-1) - math.exp(-2))
    assert an.cdf_hypoexp(2.0, p) == pytest.approx(expect, rel=1e-13)
    assert expect == pytest.approx(0.39958, abs=5e-6)
    rng = np.random.default_rng(3)
    n = 10**7
    emp = np.mean(rng.exponential(1.0, n) + rng.exponential(2.0, n) < 2.0)
    assert abs(emp - expect) < 3 * math.sqrt(expect * (1 - expect) / n)


def _erlang_oracle(g, s):
    # convolution of two exponentials of mean s
    val = integrate.quad(lambda x: math.exp(-x / s) / s * -math.expm1(-(g - x) / s), 0, g, epsabs=1e-14)[0]
    return val


@pytest.mark.parametrize("g", [0.01, 0.7, 3.0, 12.0, 60.0])
def test_hypoexp_equal_means(g):
    s = 2.5
    p = SystemParams(s, 1.0, s, 0.0)
    limit = 1 - math.exp(-g / s) * (1 + g / s)
    assert an.cdf_hypoexp(g, p) == pytest.approx(limit, rel=1e-12, abs=1e-15)
    assert an.cdf_hypoexp(g, p) == pytest.approx(_erlang_oracle(g, s), abs=1e-10)
    assert an.pdf_hypoexp(g, p) == pytest.approx(g / s**2 * math.exp(-g / s), rel=1e-12)


@pytest.mark.parametrize("eps", [1e-12, 1e-9, 1e-7, 1e-5, 1e-3])
def test_hypoexp_near_equal_means_is_continuous(eps):
    s, g = 2.5, 4.0
    p = SystemParams(s, 1.0, s * (1 + eps), 0.0)
    limit = 1 - math.exp(-g / s) * (1 + g / s)
    assert an.cdf_hypoexp(g, p) == pytest.approx(limit, abs=2 * eps + 1e-14)
    assert np.isfinite(an.cdf_isdf(g, p)) and np.isfinite(an.pdf_isdf(g, p))


def test_hypoexp_extreme_values_do_not_nan():
    p = SystemParams(1e-3, 1.0, 1e3, 0.0, rate=8.0)
    g = np.array([0.0, 1e-300, 1e-6, 1.0, 1e6, 1e300, np.inf])
    for fn in (an.cdf_hypoexp, an.pdf_hypoexp, an.cdf_sdf, an.pdf_sdf, an.cdf_isdf, an.pdf_isdf):
        assert np.all(np.isfinite(fn(g, p))), fn.__name__
    assert an.cdf_isdf(np.inf, p) == 1.0


# ---- protocol outage --------------------------------------------------------


def test_protocol_outage_relay_never_decodes():
    p = SystemParams(10.0, 1e-6, 100.0, 10.0, rate=2.0)
    assert an.p_out_sr(p) == 1.0
    assert an.p_out_protocol("SDF", p) == pytest.approx(an.p_out_sd(p), rel=1e-14)


def test_protocol_outage_vanishing_rate():
    assert an.p_out_protocol("ISDF", REF.with_rate(1e-12)) == pytest.approx(0.0, abs=1e-12)


def test_protocol_outage_reference():
    out = an.p_out_protocol("SDF", REF)
    assert out == an.p_out_protocol("ISDF", REF)
    assert out == pytest.approx(an.cdf_sdf(REF.gamma_th, REF), rel=1e-14)
    assert out == pytest.approx(an.cdf_isdf(REF.gamma_th, REF), rel=1e-14)
    n = 10**6
    emp = np.mean(alpha_level_snr(REF, n, 5, "SDF") < REF.gamma_th)
    assert abs(emp - out) < 3 * math.sqrt(out * (1 - out) / n)
    with pytest.raises(ValueError):
        an.p_out_protocol("DT", REF)


# ---- SDF / ISDF distributions -------------------------------------------------


def test_sdf_reduces_to_direct_when_relay_never_decodes():
    p = SystemParams(10.0, 1e-6, 100.0, 10.0, rate=2.0)
    g = np.geomspace(1e-3, 1e3, 50)
    np.testing.assert_allclose(an.cdf_sdf(g, p), an.cdf_sd(g, p), rtol=1e-14)
    np.testing.assert_allclose(an.cdf_isdf(g, p), an.cdf_sd(g, p), rtol=1e-14)


def test_sdf_reduces_to_hypoexp_when_relay_always_decodes():
    p = SystemParams(10.0, 1e12, 100.0, 0.0, rate=0.5)
    assert an.p_out_sr(p) < 1e-12
    g = np.geomspace(1e-3, 1e3, 50)
    np.testing.assert_allclose(an.cdf_sdf(g, p), an.cdf_hypoexp(g, p), rtol=1e-10, atol=1e-13)


def _ecdf_sup(x, F, grid):
    xs = np.sort(x)
    emp = np.searchsorted(xs, grid, side="left") / xs.size
    return np.max(np.abs(emp - F(grid)))


@pytest.mark.parametrize("kind, F", [("SDF", an.cdf_sdf), ("ISDF", an.cdf_isdf)])
def test_reference_cdf_against_additive_model_simulation(kind, F):
    grid = 10 ** (np.arange(-100, 301) / 100)
    x = alpha_level_snr(REF, 10**6, 8, kind)
    assert _ecdf_sup(x, lambda g: F(g, REF), grid) <= 0.005


def test_isdf_continuity_at_threshold():
    for p in (REF, SystemParams(100.0, 50.0, 1.0, 1.0, rate=3.0), SystemParams(4.0, 10.0, 4.0, 1.0, rate=1.0)):
        gth = p.gamma_th
        left = an.cdf_isdf(gth, p)
        right = an.cdf_isdf(np.nextafter(gth, np.inf), p)
        assert right == pytest.approx(left, abs=1e-14)


def test_isdf_uncorrected_form_is_not_a_cdf():
    g = np.geomspace(REF.gamma_th * 1.01, 1e4, 200)
    bad = an.cdf_isdf_uncorrected(g, REF)
    assert np.max(bad) > 1.0
    good = an.cdf_isdf(g, REF)
    assert np.all(good <= 1.0)
    buf = io.StringIO()
    rows = an.isdf_tail_audit(REF, [1.0, 5.0, 50.0], file=buf)
    assert rows.shape == (2, 3)
    assert buf.getvalue().startswith("gamma corrected uncorrected")


def test_conditional_cdf_against_convolution():
    props.check_convolution(REF)
    props.check_convolution(SystemParams(100.0, 50.0, 1.0, 1.0, rate=3.0))


def test_isdf_against_total_probability_oracle():
    g = np.geomspace(0.05, 500, 60)
    ref = np.array([props.isdf_cdf_oracle(x, REF) for x in g])
    np.testing.assert_allclose(an.cdf_isdf(g, REF), ref, atol=1e-10)


def test_silent_relay_distributions_collapse():
    p = SystemParams(10.0, 100.0, 100.0, 10.0, relay_power=0.0, rate=2.0)
    g = np.geomspace(0.01, 100, 30)
    for fn in (an.cdf_sdf, an.cdf_isdf, an.cdf_hypoexp):
        np.testing.assert_allclose(fn(g, p), an.cdf_sd(g, p), rtol=1e-14)


# ---- averages and cooperation ------------------------------------------------------


def test_avg_snr_limits():
    low = at_rate(1e-9)
    s, a = low.pi_sd, low.pi_rd
    assert an.avg_snr("SDF", low) == pytest.approx(s + a, rel=1e-6)
    assert an.avg_snr("ISDF", low) == pytest.approx(s, rel=1e-6)
    high = at_rate(30.0)
    assert an.avg_snr("SDF", high) == pytest.approx(s, rel=1e-12)
    assert an.avg_snr("ISDF", high) == pytest.approx(s, rel=1e-12)
    assert an.avg_snr("DT", REF) == REF.pi_sd


def test_avg_snr_at_rate_two():
    p = at_rate(2.0)
    assert an.avg_snr("ISDF", p) < an.avg_snr("SDF", p)
    n = 10**6
    for kind in ("SDF", "ISDF"):
        x = alpha_level_snr(p, n, 21, kind)
        assert abs(x.mean() - an.avg_snr(kind, p)) < 3 * x.std() / math.sqrt(n)


def test_cooperation_fraction():
    assert an.cooperation_fraction("DT", REF) == 0.0
    assert an.cooperation_fraction("NonSelectiveFDR", REF) == 1.0
    hi = at_rate(9.0)
    assert an.cooperation_fraction("ISDF", hi) == pytest.approx(an.cooperation_fraction("SDF", hi), rel=1e-5)
    lo = at_rate(2.0)
    assert an.cooperation_fraction("ISDF", lo) == pytest.approx(
        (1 - an.p_out_sr(lo)) * an.p_out_sd(lo), rel=1e-15
    )


def test_analytic_curve():
    c = an.analytic_curve("ISDF", REF, [0.1, 1.0, 10.0])
    assert c.kind == "CDF" and c.values.shape == (3,)
    with pytest.raises(ValueError):
        an.AnalyticCurve([1.0, 1.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        an.analytic_curve("NonSelectiveFDR", REF, [1.0])


# ---- properties -----------------------------------------------------------------


_settings = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])


@_settings
@given(params_strategy)
def test_cdf_shape(p):
    props.check_cdf_shape(p)


@_settings
@given(params_strategy)
def test_identity_below_threshold(p):
    props.check_identity_below_threshold(p)


@_settings
@given(params_strategy)
def test_ordering(p):
    props.check_ordering(p)


@_settings
@given(params_strategy)
def test_pdf_matches_numerical_derivative(p):
    props.check_pdf_matches_cdf(p)


@settings(max_examples=15, deadline=None)
@given(params_strategy)
def test_pdf_integrates_and_mean(p):
    props.check_pdf_normalized_and_mean(p)
