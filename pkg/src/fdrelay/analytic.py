"""
Closed-form outage probabilities and end-to-end SNR distributions.

Notation used throughout: ``s = pi_sd`` is the mean direct-link SNR and
``a = P*pi_rd`` the mean relay-link SNR at the destination. Cooperative
blocks are scored with the approximation ``SNR ~ gamma_sd + gamma_rd``, a
sum of two independent exponentials (hypoexponential).

Differences of exponentials are evaluated through
``(1 - exp(-x))/x`` so that nearly equal means ``a ~ s`` neither cancel
catastrophically nor divide by zero; inside a relative band of ``1e-9`` the
Erlang-2 limit is used outright.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import ProtocolKind, SystemParams

__all__ = [
    "LinkOutageSet",
    "AnalyticCurve",
    "DEGENERATE_RTOL",
    "p_out_sr",
    "p_out_sd",
    "p_out_rd",
    "link_outages",
    "cdf_sd",
    "pdf_sd",
    "cdf_rd",
    "cdf_hypoexp",
    "pdf_hypoexp",
    "p_out_protocol",
    "cdf_sdf",
    "pdf_sdf",
    "cdf_given_direct_outage",
    "cdf_isdf",
    "pdf_isdf",
    "cdf_isdf_uncorrected",
    "isdf_tail_audit",
    "cdf",
    "pdf",
    "analytic_curve",
    "avg_snr",
    "cooperation_fraction",
]

DEGENERATE_RTOL = 1e-9


@dataclass(frozen=True)
class LinkOutageSet:
    p_sr: float
    p_sd: float
    p_rd: float


@dataclass(frozen=True)
class AnalyticCurve:
    """A closed-form CDF or PDF sampled on a linear SNR grid."""

    grid: np.ndarray
    values: np.ndarray
    kind: str = "CDF"

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.kind not in ("CDF", "PDF"):
            raise ValueError(f"kind must be 'CDF' or 'PDF', got {self.kind!r}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


def _ret(x):
    return x if np.ndim(x) else float(x)


def _means(params: SystemParams):
    s = params.pi_sd
    a = params.relay_power * params.pi_rd
    return s, a


def _degenerate(s: float, a: float) -> bool:
    return abs(a - s) < DEGENERATE_RTOL * max(a, s)


def _phi(x):
    """``(1 - exp(-x))/x`` for ``x >= 0``, equal to 1 at 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.expm1(-x) / x
    return np.where(x == 0.0, 1.0, out)


def _rate_gap(s: float, a: float) -> float:
    """``1/s - 1/a``, forced to zero in the degenerate band."""
    return 0.0 if _degenerate(s, a) else 1.0 / s - 1.0 / a


def _cross_term(g, s: float, a: float):
    """``a*(exp(-g/s) - exp(-g/a))/(s - a)``, the hypoexponential deficit.

    Equals ``F_sd(g) - F_hypo(g)``; tends to ``(g/s)*exp(-g/s)`` as ``a -> s``.
    """
    g = np.asarray(g, dtype=float)
    if a == 0.0:
        return np.zeros_like(g)
    c = abs(_rate_gap(s, a))
    big = max(s, a)
    with np.errstate(over="ignore", invalid="ignore"):
        out = (g / s) * np.exp(-g / big) * _phi(c * g)
    return np.where(np.isposinf(g), 0.0, out)


def _exp_cdf(g, mean: float):
    g = np.asarray(g, dtype=float)
    if mean == 0.0:
        return np.where(g > 0, 1.0, 0.0)
    return -np.expm1(-np.maximum(g, 0.0) / mean)


def _exp_pdf(g, mean: float):
    g = np.asarray(g, dtype=float)
    if mean == 0.0:
        return np.zeros_like(g)
    return np.where(g >= 0, np.exp(-np.maximum(g, 0.0) / mean) / mean, 0.0)


def p_out_sr(params: SystemParams) -> float:
    """Outage probability of the source-relay link under self-interference."""
    g = params.gamma_th
    rsi = g * params.relay_power * params.pi_rr
    return float(1.0 - params.pi_sr * np.exp(-g / params.pi_sr) / (rsi + params.pi_sr))


def p_out_sd(params: SystemParams) -> float:
    return float(_exp_cdf(params.gamma_th, params.pi_sd))


def p_out_rd(params: SystemParams) -> float:
    return float(_exp_cdf(params.gamma_th, params.relay_power * params.pi_rd))


def link_outages(params: SystemParams) -> LinkOutageSet:
    return LinkOutageSet(p_out_sr(params), p_out_sd(params), p_out_rd(params))


def cdf_sd(gamma, params: SystemParams):
    """CDF of the direct-link SNR, also the direct-transmission end-to-end CDF."""
    return _ret(_exp_cdf(gamma, params.pi_sd))


def pdf_sd(gamma, params: SystemParams):
    return _ret(_exp_pdf(gamma, params.pi_sd))


def cdf_rd(gamma, params: SystemParams):
    return _ret(_exp_cdf(gamma, params.relay_power * params.pi_rd))


def cdf_hypoexp(gamma, params: SystemParams):
    """CDF of ``gamma_sd + gamma_rd`` (sum of independent exponentials)."""
    s, a = _means(params)
    g = np.maximum(np.asarray(gamma, dtype=float), 0.0)
    return _ret(np.clip(_exp_cdf(g, s) - _cross_term(g, s, a), 0.0, 1.0))


def pdf_hypoexp(gamma, params: SystemParams):
    s, a = _means(params)
    g = np.asarray(gamma, dtype=float)
    if a == 0.0:
        return _ret(_exp_pdf(g, s))
    out = np.where(g >= 0, _cross_term(np.maximum(g, 0.0), s, a) / a, 0.0)
    return _ret(out)


def p_out_protocol(kind, params: SystemParams) -> float:
    """End-to-end outage probability of SDF or ISDF (identical by construction)."""
    kind = ProtocolKind.parse(kind)
    if kind not in (ProtocolKind.SDF, ProtocolKind.ISDF):
        raise ValueError(f"outage closed form defined for SDF and ISDF only, got {kind}")
    p_sr, p_sd = p_out_sr(params), p_out_sd(params)
    return float(p_sr * p_sd + (1.0 - p_sr) * cdf_hypoexp(params.gamma_th, params))


def cdf_sdf(gamma, params: SystemParams):
    """End-to-end SNR CDF under selective decode-and-forward."""
    s, a = _means(params)
    g = np.maximum(np.asarray(gamma, dtype=float), 0.0)
    coop = 1.0 - p_out_sr(params)
    return _ret(np.clip(_exp_cdf(g, s) - coop * _cross_term(g, s, a), 0.0, 1.0))


def pdf_sdf(gamma, params: SystemParams):
    p_sr = p_out_sr(params)
    return _ret(p_sr * np.asarray(pdf_sd(gamma, params)) + (1.0 - p_sr) * np.asarray(pdf_hypoexp(gamma, params)))


def _isdf_tail_weight(params: SystemParams):
    """Return ``(Q, shift)`` with the tail deficit ``Q*exp(-g/a + shift)``.

    ``Q*exp(shift - g/a)`` equals ``a*(P_rd - P_sd)*(1 - F_rd(g)) / ((s - a)*(1 - P_rd))``,
    the probability that cooperation pushed a below-threshold direct SNR
    above ``g``. Written so that no factor overflows for ``a < s``.
    """
    s, a = _means(params)
    gth = params.gamma_th
    x = _rate_gap(s, a) * gth
    return (gth / s) * float(_phi(abs(x))), max(0.0, -x)


def cdf_given_direct_outage(gamma, params: SystemParams):
    """CDF of ``gamma_sd + gamma_rd`` given that the direct link is in outage.

    This is the SNR law on blocks where ISDF cooperates. Below the threshold
    it is the hypoexponential CDF rescaled by ``1/P_sd``; above it the
    direct SNR is capped at the threshold, leaving an exponential tail.
    """
    s, a = _means(params)
    g = np.maximum(np.asarray(gamma, dtype=float), 0.0)
    p_sd = p_out_sd(params)
    low = (_exp_cdf(g, s) - _cross_term(g, s, a)) / p_sd
    if a == 0.0:
        high = np.ones_like(g)
    else:
        q, shift = _isdf_tail_weight(params)
        g_hi = np.maximum(g, params.gamma_th)
        high = 1.0 - q * np.exp(shift - g_hi / a) / p_sd
    return _ret(np.clip(np.where(g <= params.gamma_th, low, high), 0.0, 1.0))


def cdf_isdf(gamma, params: SystemParams):
    """End-to-end SNR CDF under incremental selective decode-and-forward.

    Equal to :func:`cdf_sdf` up to the threshold. Above it, the relay only
    helped on blocks whose direct SNR was below threshold, giving
    ``F_sd(g) - (1 - P_sr)*a*(P_sd - P_rd)*(1 - F_rd(g)) / ((a - s)*(1 - P_rd))``.
    This tail is continuous at the threshold and tends to 1; see
    :func:`cdf_isdf_uncorrected` for the variant with a ``(P_sd/P_rd - 1)``
    factor, which is not a distribution function.
    """
    s, a = _means(params)
    g = np.maximum(np.asarray(gamma, dtype=float), 0.0)
    coop = 1.0 - p_out_sr(params)
    low = _exp_cdf(g, s) - coop * _cross_term(g, s, a)
    if a == 0.0:
        high = _exp_cdf(g, s)
    else:
        q, shift = _isdf_tail_weight(params)
        g_hi = np.maximum(g, params.gamma_th)
        high = _exp_cdf(g, s) - coop * q * np.exp(shift - g_hi / a)
    out = np.where(g <= params.gamma_th, low, high)
    return _ret(np.clip(out, 0.0, 1.0))


def pdf_isdf(gamma, params: SystemParams):
    s, a = _means(params)
    g = np.asarray(gamma, dtype=float)
    p_sr = p_out_sr(params)
    low = np.asarray(pdf_sdf(g, params))
    if a == 0.0:
        high = _exp_pdf(g, s)
    else:
        q, shift = _isdf_tail_weight(params)
        g_hi = np.maximum(g, params.gamma_th)
        high = _exp_pdf(g, s) + (1.0 - p_sr) * q * np.exp(shift - g_hi / a) / a
    return _ret(np.where(g <= params.gamma_th, low, high))


def cdf_isdf_uncorrected(gamma, params: SystemParams):
    """ISDF tail with the ``(P_sd/P_rd - 1)`` factor, for auditing only.

    For ``a > s`` it exceeds 1 at large SNR. Below the threshold it agrees
    with :func:`cdf_isdf`.
    """
    s, a = _means(params)
    g = np.maximum(np.asarray(gamma, dtype=float), 0.0)
    lk = link_outages(params)
    if _degenerate(s, a):
        raise ValueError("uncorrected form has no degenerate-mean limit")
    high = _exp_cdf(g, s) + a * (1 - lk.p_sr) * (lk.p_sd / lk.p_rd - 1.0) * (1 - _exp_cdf(g, a)) / (a - s)
    return _ret(np.where(g <= params.gamma_th, cdf_isdf(g, params), high))


def isdf_tail_audit(params: SystemParams, gamma, file=None) -> np.ndarray:
    """Print and return ``(gamma, corrected, uncorrected)`` rows above threshold."""
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    g = g[g > params.gamma_th]
    rows = np.column_stack([g, np.atleast_1d(cdf_isdf(g, params)), np.atleast_1d(cdf_isdf_uncorrected(g, params))])
    print("gamma corrected uncorrected", file=file)
    for r in rows:
        print("%.10g %.10g %.10g" % tuple(r), file=file)
    return rows


def cdf(kind, gamma, params: SystemParams):
    """End-to-end SNR CDF of ``kind``; DT gives the direct-link CDF."""
    kind = ProtocolKind.parse(kind)
    if kind is ProtocolKind.DT:
        return cdf_sd(gamma, params)
    if kind is ProtocolKind.SDF:
        return cdf_sdf(gamma, params)
    if kind is ProtocolKind.ISDF:
        return cdf_isdf(gamma, params)
    raise ValueError(f"no closed-form CDF for {kind}")


def pdf(kind, gamma, params: SystemParams):
    kind = ProtocolKind.parse(kind)
    if kind is ProtocolKind.DT:
        return pdf_sd(gamma, params)
    if kind is ProtocolKind.SDF:
        return pdf_sdf(gamma, params)
    if kind is ProtocolKind.ISDF:
        return pdf_isdf(gamma, params)
    raise ValueError(f"no closed-form PDF for {kind}")


def analytic_curve(kind, params: SystemParams, grid, curve: str = "CDF") -> AnalyticCurve:
    grid = np.asarray(grid, dtype=float)
    fn = cdf if curve == "CDF" else pdf
    return AnalyticCurve(grid, np.atleast_1d(fn(kind, grid, params)), curve)


def avg_snr(kind: Union[str, ProtocolKind], params: SystemParams) -> float:
    """Mean end-to-end SNR of DT, SDF or ISDF."""
    kind = ProtocolKind.parse(kind)
    s, a = _means(params)
    if kind is ProtocolKind.DT:
        return float(s)
    coop = 1.0 - p_out_sr(params)
    if kind is ProtocolKind.SDF:
        return float(s + a * coop)
    if kind is ProtocolKind.ISDF:
        return float(s + a * coop * p_out_sd(params))
    raise ValueError(f"no closed-form average SNR for {kind}")


def cooperation_fraction(kind: Union[str, ProtocolKind], params: SystemParams) -> float:
    """Long-run fraction of blocks on which the relay transmits."""
    kind = ProtocolKind.parse(kind)
    if kind is ProtocolKind.DT:
        return 0.0
    if kind is ProtocolKind.NonSelectiveFDR:
        return 1.0
    coop = 1.0 - p_out_sr(params)
    if kind is ProtocolKind.SDF:
        return coop
    return coop * p_out_sd(params)
