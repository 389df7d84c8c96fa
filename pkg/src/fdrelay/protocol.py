"""
Cooperation policies and the Monte Carlo engine.

Every block is reduced to one number, the effective SNR of the equivalent
single-antenna link. Blocks where the relay stays silent are scored with the
direct-link SNR exactly; cooperative blocks go through the exact block-MISO
mutual information.

Blocks are generated in fixed-size shards, each drawing from its own
:class:`~fdrelay.core.RngStream`; shard results are merged in shard order.
The worker count therefore only changes wall-clock time, never the report.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import analytic
from .analytic import AnalyticCurve
from .core import ChannelBlock, ProtocolKind, RngStream, SystemParams, sample_blocks
from .miso import effective_snr, mutual_info_block

__all__ = [
    "ProtocolKind",
    "BlockOutcome",
    "EmpiricalDistribution",
    "SimulationReport",
    "SHARD_SIZE",
    "decide_cooperation",
    "run_block",
    "run_blocks",
    "simulate",
    "sweep_rate",
    "sup_distance",
]

log = logging.getLogger(__name__)

SHARD_SIZE = 1 << 16
_RATE_STREAM_STRIDE = 1 << 32
_ACC_MAX = np.iinfo(np.int64).max
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class BlockOutcome:
    """Per-block result; fields are scalars or arrays of equal length."""

    relay_active: object
    effective_snr: object
    in_outage: object
    info_bits: object


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Histogram of effective SNR on a uniform dB grid.

    ``counts[0]`` is the underflow bin (below the first edge, including zero
    SNR) and ``counts[-1]`` the overflow bin, so the empirical CDF is exact at
    every edge.
    """

    counts: np.ndarray
    lo_db: float = -40.0
    hi_db: float = 50.0
    step_db: float = 0.1

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.n_bins + 2,):
            raise ValueError(f"expected {self.n_bins + 2} counts, got {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("negative counts")
        object.__setattr__(self, "counts", counts)

    @property
    def n_bins(self) -> int:
        if not self.step_db > 0:
            raise ValueError("step_db must be positive")
        return int(round((self.hi_db - self.lo_db) / self.step_db))

    @property
    def n_total(self) -> int:
        return int(self.counts.sum())

    @property
    def edges_db(self) -> np.ndarray:
        return self.lo_db + self.step_db * np.arange(self.n_bins + 1)

    @property
    def edges(self) -> np.ndarray:
        """Bin edges on the linear SNR scale."""
        return 10.0 ** (self.edges_db / 10.0)

    @classmethod
    def empty(cls, lo_db=-40.0, hi_db=50.0, step_db=0.1) -> "EmpiricalDistribution":
        n_bins = int(round((hi_db - lo_db) / step_db))
        return cls(np.zeros(n_bins + 2, dtype=np.int64), lo_db, hi_db, step_db)

    @classmethod
    def from_samples(cls, snr, lo_db=-40.0, hi_db=50.0, step_db=0.1) -> "EmpiricalDistribution":
        dist = cls.empty(lo_db, hi_db, step_db)
        idx = np.searchsorted(dist.edges, np.asarray(snr, dtype=float).ravel(), side="right")
        return cls(np.bincount(idx, minlength=dist.n_bins + 2), lo_db, hi_db, step_db)

    def same_grid(self, other: "EmpiricalDistribution") -> bool:
        return (self.lo_db, self.hi_db, self.step_db) == (other.lo_db, other.hi_db, other.step_db)

    def merge(self, other: "EmpiricalDistribution") -> "EmpiricalDistribution":
        if not self.same_grid(other):
            raise ValueError("cannot merge histograms on different grids")
        return EmpiricalDistribution(self.counts + other.counts, self.lo_db, self.hi_db, self.step_db)

    def cdf(self) -> np.ndarray:
        """Fraction of samples strictly below each edge."""
        n = self.n_total
        if n == 0:
            raise ValueError("empty distribution")
        return np.cumsum(self.counts)[: self.n_bins + 1] / n


@dataclass
class SimulationReport:
    params: SystemParams
    protocol: ProtocolKind
    n_blocks: int
    seed: int
    distribution: EmpiricalDistribution
    mean_snr: float
    mean_snr_se: float
    outage_count: int
    outage_rate: float
    outage_rate_se: float
    relay_active_count: int
    relay_active_fraction: float
    sup_distance: Optional[float] = None

    def summary(self) -> dict:
        """Flat key/value record including the resolved parameters."""
        out = {f"param.{k}": v for k, v in self.params.as_dict().items()}
        out.update(
            protocol=str(self.protocol),
            n_blocks=self.n_blocks,
            seed=self.seed,
            mean_snr=self.mean_snr,
            mean_snr_se=self.mean_snr_se,
            outage_count=self.outage_count,
            outage_rate=self.outage_rate,
            outage_rate_se=self.outage_rate_se,
            relay_active_count=self.relay_active_count,
            relay_active_fraction=self.relay_active_fraction,
            sup_distance=self.sup_distance,
        )
        return out


def decide_cooperation(kind, block: ChannelBlock, params: SystemParams):
    """Whether the relay transmits on ``block`` under policy ``kind``.

    SDF requires the relay to decode; ISDF additionally needs the
    destination's outage feedback on the direct link. Works on batches.
    """
    kind = ProtocolKind.parse(kind)
    shape = np.shape(block.gamma_sd)
    if kind is ProtocolKind.DT:
        out = np.zeros(shape, dtype=bool)
    elif kind is ProtocolKind.NonSelectiveFDR:
        out = np.ones(shape, dtype=bool)
    else:
        out = np.asarray(block.gamma_sr) >= params.gamma_th
        if kind is ProtocolKind.ISDF:
            out = out & (np.asarray(block.gamma_sd) < params.gamma_th)
    return bool(out) if out.ndim == 0 else out


def run_blocks(kind, blocks: ChannelBlock, params: SystemParams) -> BlockOutcome:
    """Vectorized :func:`run_block` over a batch of blocks."""
    kind = ProtocolKind.parse(kind)
    L = params.block_len
    g_sd = np.atleast_1d(np.asarray(blocks.gamma_sd, dtype=float))
    active = np.atleast_1d(decide_cooperation(kind, blocks, params))

    snr = g_sd.copy()
    info = L * np.log1p(g_sd) / _LOG2
    if active.any():
        sub = blocks[active] if np.ndim(blocks.h_sd) else blocks
        coop_info = np.atleast_1d(mutual_info_block(sub, params, True))
        info[active] = coop_info
        snr[active] = effective_snr(coop_info, L)
    if kind is ProtocolKind.NonSelectiveFDR:
        # relay forwards without having decoded: scored as outage at zero SNR
        failed = np.atleast_1d(np.asarray(blocks.gamma_sr)) < params.gamma_th
        snr[failed] = 0.0
        info[failed] = 0.0
    return BlockOutcome(active, snr, snr < params.gamma_th, info)


def run_block(kind, block: ChannelBlock, params: SystemParams) -> BlockOutcome:
    """Apply policy ``kind`` to one block and score it."""
    res = run_blocks(kind, block, params)
    if np.ndim(block.h_sd):
        return res
    return BlockOutcome(
        bool(res.relay_active[0]), float(res.effective_snr[0]), bool(res.in_outage[0]), float(res.info_bits[0])
    )


@dataclass
class _ShardResult:
    n: int
    mean: float
    m2: float
    outages: int
    active: int
    hist: EmpiricalDistribution


def _run_shard(kind, params, seed, stream_id, n, grid) -> _ShardResult:
    blocks = sample_blocks(params, RngStream(seed, stream_id), n)
    res = run_blocks(kind, blocks, params)
    snr = res.effective_snr
    mean = float(snr.mean())
    return _ShardResult(
        n=n,
        mean=mean,
        m2=float(((snr - mean) ** 2).sum()),
        outages=int(res.in_outage.sum()),
        active=int(res.relay_active.sum()),
        hist=EmpiricalDistribution.from_samples(snr, *grid),
    )


def _merge_moments(parts: Sequence[_ShardResult]):
    n, mean, m2 = 0, 0.0, 0.0
    for p in parts:
        tot = n + p.n
        delta = p.mean - mean
        mean += delta * p.n / tot
        m2 += p.m2 + delta * delta * n * p.n / tot
        n = tot
    return n, mean, m2


def simulate(
    kind,
    params: SystemParams,
    n_blocks: int,
    seed: int = 0,
    n_workers: int = 1,
    *,
    grid=(-40.0, 50.0, 0.1),
    stream_base: int = 0,
) -> SimulationReport:
    """Monte Carlo estimate of the effective-SNR statistics of one policy.

    Parameters
    ----------
    kind : ProtocolKind or str
    params : SystemParams
    n_blocks : int
        Number of independent fading blocks.
    seed : int
        Master seed; shard ``k`` draws from ``RngStream(seed, stream_base + k)``.
    n_workers : int
        Thread count. Does not affect the result.
    grid : tuple
        ``(lo_db, hi_db, step_db)`` of the effective-SNR histogram.

    Returns
    -------
    SimulationReport
        ``sup_distance`` is filled for DT, SDF and ISDF, whose closed-form CDF
        is evaluated at the histogram edges.
    """
    kind = ProtocolKind.parse(kind)
    n_blocks = int(n_blocks)
    if n_blocks < 1:
        raise ValueError("n_blocks must be >= 1")
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    if n_blocks > _ACC_MAX // params.block_len:
        raise ValueError("n_blocks * block_len overflows the 64-bit accumulators")

    sizes = [SHARD_SIZE] * (n_blocks // SHARD_SIZE)
    if n_blocks % SHARD_SIZE:
        sizes.append(n_blocks % SHARD_SIZE)
    jobs = [(kind, params, seed, stream_base + k, n, tuple(grid)) for k, n in enumerate(sizes)]
    log.debug("simulate %s: %d blocks in %d shards, %d workers", kind, n_blocks, len(jobs), n_workers)
    if n_workers == 1 or len(jobs) == 1:
        parts = [_run_shard(*j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(lambda j: _run_shard(*j), jobs))

    n, mean, m2 = _merge_moments(parts)
    hist = parts[0].hist
    for p in parts[1:]:
        hist = hist.merge(p.hist)
    outages = sum(p.outages for p in parts)
    active = sum(p.active for p in parts)
    p_out = outages / n

    sup = None
    if kind is not ProtocolKind.NonSelectiveFDR:
        sup = sup_distance(hist, analytic.analytic_curve(kind, params, hist.edges))

    return SimulationReport(
        params=params,
        protocol=kind,
        n_blocks=n,
        seed=seed,
        distribution=hist,
        mean_snr=mean,
        mean_snr_se=math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0,
        outage_count=outages,
        outage_rate=p_out,
        outage_rate_se=math.sqrt(p_out * (1.0 - p_out) / n),
        relay_active_count=active,
        relay_active_fraction=active / n,
        sup_distance=sup,
    )


def sweep_rate(
    kind, params: SystemParams, rates, n_blocks: int, seed: int = 0, n_workers: int = 1, **kwargs
) -> List[SimulationReport]:
    """One :func:`simulate` report per rate, each on its own substreams.

    Rate ``k`` in the list uses stream ids starting at ``k * 2**32``, so the
    first rate reproduces a plain :func:`simulate` call.
    """
    rates = list(rates)
    if not rates:
        raise ValueError("rates must be non-empty")
    if any(not r > 0 for r in rates):
        raise ValueError("every rate must be positive")
    return [
        simulate(kind, params.with_rate(r), n_blocks, seed, n_workers, stream_base=k * _RATE_STREAM_STRIDE, **kwargs)
        for k, r in enumerate(rates)
    ]


def sup_distance(emp: EmpiricalDistribution, curve: AnalyticCurve) -> float:
    """Largest gap between the empirical CDF and ``curve`` over the histogram edges.

    ``curve`` must be a CDF whose grid contains every histogram edge.
    """
    if curve.kind != "CDF":
        raise ValueError("sup_distance needs a CDF curve")
    edges = emp.edges
    idx = np.searchsorted(curve.grid, edges)
    idx_lo = np.clip(idx - 1, 0, curve.grid.size - 1)
    idx_hi = np.clip(idx, 0, curve.grid.size - 1)
    hit_hi = np.isclose(curve.grid[idx_hi], edges, rtol=1e-12, atol=0.0)
    hit_lo = np.isclose(curve.grid[idx_lo], edges, rtol=1e-12, atol=0.0)
    if not np.all(hit_hi | hit_lo):
        raise ValueError("grid mismatch: analytic curve is not sampled at every histogram edge")
    values = np.where(hit_hi, curve.values[idx_hi], curve.values[idx_lo])
    return float(np.max(np.abs(emp.cdf() - values)))
