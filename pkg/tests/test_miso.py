import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdrelay.analytic import cdf_hypoexp
from fdrelay.core import ChannelBlock, ProtocolKind, RngStream, SystemParams, sample_blocks
from fdrelay.miso import (
    MisoBlockSpec,
    channel_matrix,
    effective_snr,
    eigenvalues_closed_form,
    gram_eigenvalues_oracle,
    gram_matrix,
    mutual_info_block,
)
from fdrelay.protocol import decide_cooperation

REF = SystemParams.from_db(10, 20, 20, 10, gamma_th_db=5, block_len=20, delay=2)


def logdet_bits(h_sd, h_rd, P, L, D):
    H = channel_matrix(h_sd, h_rd, P, L, D)
    sign, ld = np.linalg.slogdet(np.eye(L) + H.conj().T @ H)
    assert sign > 0
    return ld / math.log(2)


def test_zero_beta_gives_flat_spectrum():
    lam = eigenvalues_closed_form(MisoBlockSpec(2.5, 0.0, 12, 3))
    np.testing.assert_array_equal(lam, np.full(12, 2.5))


def test_two_by_two():
    lam = eigenvalues_closed_form(MisoBlockSpec(2.0, 1.0, 2, 1))
    np.testing.assert_allclose(np.sort(lam), [1.0, 3.0], rtol=1e-14)
    # direct eigendecomposition of [[a, b], [b*, a]]
    np.testing.assert_allclose(np.linalg.eigvalsh([[2, 1j], [-1j, 2]]), [1.0, 3.0])


def test_l20_d2_geometry_matches_oracle():
    rng = np.random.default_rng(0)
    h_sd, h_rd = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    spec = MisoBlockSpec.from_channels(h_sd, h_rd, 1.0, 20, 2)
    cf = eigenvalues_closed_form(spec)
    assert len(np.unique(np.round(cf, 12))) == 10
    assert np.all(np.unique(np.round(cf, 12), return_counts=True)[1] == 2)
    np.testing.assert_allclose(np.sort(cf), np.sort(gram_eigenvalues_oracle(h_sd, h_rd, 1.0, 20, 2)), rtol=1e-9)


def test_closed_form_rejects_non_multiple():
    with pytest.raises(ValueError):
        eigenvalues_closed_form(MisoBlockSpec(1.0, 0.1, 3, 2))


def test_spec_rejects_indefinite():
    with pytest.raises(ValueError):
        MisoBlockSpec(1.0, 0.6, 4, 2)


def test_gram_is_h_hermitian_h():
    h_sd, h_rd = 0.3 - 1.1j, 0.7 + 0.2j
    for L, D in [(4, 1), (20, 2), (7, 3)]:
        H = channel_matrix(h_sd, h_rd, 2.0, L, D)
        np.testing.assert_allclose(gram_matrix(h_sd, h_rd, 2.0, L, D), H.conj().T @ H, atol=1e-14)


def test_oracle_silent_relay():
    lam = gram_eigenvalues_oracle(1 + 1j, 3.0, 0.0, 9, 2)
    np.testing.assert_allclose(lam, np.full(9, 2.0))


def test_oracle_against_characteristic_polynomial():
    # L=3, D=2: det(x I - G) = (x - a) * ((x - a)^2 - |b|^2)
    h_sd, h_rd, P = 0.8 + 0.3j, -0.4 + 0.9j, 1.5
    a = abs(h_sd) ** 2 + P * abs(h_rd) ** 2
    b2 = P * abs(h_sd) ** 2 * abs(h_rd) ** 2
    coeffs = np.polymul([1, -a], [1, -2 * a, a * a - b2])
    roots = np.sort(np.roots(coeffs).real)[::-1]
    np.testing.assert_allclose(gram_eigenvalues_oracle(h_sd, h_rd, P, 3, 2), roots, rtol=1e-12)


def test_mutual_info_silent_relay():
    b = ChannelBlock(math.sqrt(3.0), 1.0, 1.0, 0.0)
    assert mutual_info_block(b, REF, False) == pytest.approx(40.0, rel=1e-14)


def test_mutual_info_zero_relay_channel():
    b = ChannelBlock(1.2 - 0.5j, 1.0, 0.0, 0.0)
    expect = 20 * math.log2(1 + abs(b.h_sd) ** 2)
    assert mutual_info_block(b, REF, True) == pytest.approx(expect, rel=1e-14)


def test_mutual_info_matches_explicit_logdet():
    blocks = sample_blocks(REF, RngStream(99), 20)
    info = mutual_info_block(blocks, REF, True)
    for i in range(20):
        ref = logdet_bits(blocks.h_sd[i], blocks.h_rd[i], 1.0, 20, 2)
        assert info[i] == pytest.approx(ref, rel=1e-9)


def test_mutual_info_non_multiple_uses_oracle():
    p = SystemParams(1.0, 1.0, 1.0, 0.0, block_len=7, delay=3)
    b = sample_blocks(p, RngStream(5), 4)
    info = mutual_info_block(b, p, np.array([True, False, True, True]))
    for i, act in enumerate([True, False, True, True]):
        ref = logdet_bits(b.h_sd[i], b.h_rd[i], 1.0 if act else 0.0, 7, 3)
        assert info[i] == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("info, L, out", [(0.0, 20, 0.0), (40.0, 20, 3.0)])
def test_effective_snr_examples(info, L, out):
    assert effective_snr(info, L) == pytest.approx(out, abs=1e-15)


@given(st.floats(0, 1e4))
def test_effective_snr_inverts_direct_link(g):
    assert effective_snr(20 * math.log2(1 + g), 20) == pytest.approx(g, rel=1e-12, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-3, 3),
    st.floats(-3, 3),
    st.floats(0, 2 * math.pi),
    st.integers(1, 8),
    st.integers(1, 16),
)
def test_closed_form_equals_oracle(log_sd, log_rd, phase, D, m):
    L = m * D
    if L > 64:
        return
    h_sd = 10**log_sd
    h_rd = 10**log_rd * np.exp(1j * phase)
    spec = MisoBlockSpec.from_channels(h_sd, h_rd, 1.0, L, D)
    cf = np.sort(eigenvalues_closed_form(spec))
    orc = np.sort(gram_eigenvalues_oracle(h_sd, h_rd, 1.0, L, D))
    assert np.all(cf >= 0) and np.all(orc >= 0)
    assert np.max(np.abs(cf - orc)) <= 1e-9 * spec.alpha


def test_alpha_dominates_direct_snr():
    b = sample_blocks(REF, RngStream(3), 10_000)
    assert np.all(b.gamma_sd + b.gamma_rd >= b.gamma_sd)


def test_cooperation_does_not_reduce_information():
    b = sample_blocks(REF, RngStream(31), 100_000)
    assert np.all(mutual_info_block(b, REF, True) >= mutual_info_block(b, REF, False))


def test_miso_outage_close_to_alpha_approximation():
    n = 10**6
    b = sample_blocks(REF, RngStream(2), n)
    active = decide_cooperation(ProtocolKind.SDF, b, REF)
    info = mutual_info_block(b[active], REF, True)
    L, D, R = REF.block_len, REF.delay, REF.rate
    emp = np.mean(info / (L + D) < L * R / (L + D))
    assert abs(emp - cdf_hypoexp(REF.gamma_th, REF)) <= 0.01
