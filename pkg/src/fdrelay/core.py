"""
Scenario parameters, block-fading channel sampling and link SNRs.

All gains are stored on a linear scale; use :func:`db_to_linear` or
:meth:`SystemParams.from_db` when starting from dB figures. Noise variances
are normalized to one, so every SNR below is a pure function of the channel
coefficients and the relay power.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Union

import numpy as np

__all__ = [
    "ProtocolKind",
    "SystemParams",
    "ChannelBlock",
    "RngStream",
    "sample_block",
    "sample_blocks",
    "link_outage",
    "db_to_linear",
    "linear_to_db",
]

_UINT64_MAX = 2**64 - 1


class ProtocolKind(enum.Enum):
    """Relay cooperation policy."""

    DT = "DT"
    SDF = "SDF"
    ISDF = "ISDF"
    NonSelectiveFDR = "NonSelectiveFDR"

    @classmethod
    def parse(cls, value: Union[str, "ProtocolKind"]) -> "ProtocolKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        if key in ("nonselective", "fdr", "nsfdr"):
            return cls.NonSelectiveFDR
        raise ValueError(f"unknown protocol {value!r}")

    def __str__(self) -> str:
        return self.value


def db_to_linear(x_db):
    """Convert dB to a linear power ratio."""
    out = 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)
    return out if np.ndim(x_db) else float(out)


def linear_to_db(x):
    """Convert a positive linear power ratio to dB.

    Raises
    ------
    ValueError
        If any input is not strictly positive.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("linear_to_db requires strictly positive input")
    out = 10.0 * np.log10(arr)
    return out if np.ndim(x) else float(out)


@dataclass(frozen=True)
class SystemParams:
    """Constants of one full-duplex relay scenario (linear scale).

    Parameters
    ----------
    pi_sd, pi_sr, pi_rd : float
        Mean channel gains of the source-destination, source-relay and
        relay-destination links. Source power is absorbed in ``pi_sd`` and
        ``pi_sr``.
    pi_rr : float
        Mean gain of the residual self-interference channel at the relay.
    relay_power : float
        Relay transmit power used whenever the relay cooperates.
    rate : float
        Source rate in bits/s/Hz. The outage threshold is ``2**rate - 1``.
    block_len, delay : int
        Symbols per block ``L`` and relay processing delay ``D``.
    """

    pi_sd: float
    pi_sr: float
    pi_rd: float
    pi_rr: float
    relay_power: float = 1.0
    rate: float = 2.0
    block_len: int = 20
    delay: int = 2

    def __post_init__(self):
        for name in ("pi_sd", "pi_sr", "pi_rd"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if not (math.isfinite(self.pi_rr) and self.pi_rr >= 0):
            raise ValueError(f"pi_rr must be finite and >= 0, got {self.pi_rr!r}")
        if not (math.isfinite(self.relay_power) and self.relay_power >= 0):
            raise ValueError(f"relay_power must be finite and >= 0, got {self.relay_power!r}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be finite and > 0, got {self.rate!r}")
        for name in ("block_len", "delay"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if not self.gamma_th > 0:
            raise ValueError("rate too small: outage threshold underflows to zero")

    @classmethod
    def from_db(
        cls,
        pi_sd_db: float,
        pi_sr_db: float,
        pi_rd_db: float,
        pi_rr_db: float,
        *,
        relay_power: float = 1.0,
        rate: Optional[float] = None,
        gamma_th_db: Optional[float] = None,
        block_len: int = 20,
        delay: int = 2,
    ) -> "SystemParams":
        """Build parameters from dB-valued mean gains.

        Exactly one of ``rate`` and ``gamma_th_db`` must be given.
        """
        if (rate is None) == (gamma_th_db is None):
            raise ValueError("give exactly one of rate and gamma_th_db")
        if rate is None:
            rate = math.log2(1.0 + db_to_linear(gamma_th_db))
        return cls(
            pi_sd=db_to_linear(pi_sd_db),
            pi_sr=db_to_linear(pi_sr_db),
            pi_rd=db_to_linear(pi_rd_db),
            pi_rr=db_to_linear(pi_rr_db),
            relay_power=relay_power,
            rate=rate,
            block_len=block_len,
            delay=delay,
        )

    @property
    def gamma_th(self) -> float:
        return math.expm1(self.rate * math.log(2.0))

    @property
    def m(self) -> Optional[int]:
        """``L / D`` when the block length is a multiple of the delay, else None."""
        q, r = divmod(self.block_len, self.delay)
        return q if r == 0 else None

    def with_rate(self, rate: float) -> "SystemParams":
        return replace(self, rate=rate)

    def as_dict(self) -> dict:
        return {
            "pi_sd": self.pi_sd,
            "pi_sr": self.pi_sr,
            "pi_rd": self.pi_rd,
            "pi_rr": self.pi_rr,
            "relay_power": self.relay_power,
            "rate": self.rate,
            "gamma_th": self.gamma_th,
            "block_len": self.block_len,
            "delay": self.delay,
        }


@dataclass(frozen=True)
class RngStream:
    """Deterministic random substream identified by ``(seed, stream_id)``.

    Backed by numpy's counter-based Philox generator keyed through a
    ``SeedSequence`` spawn key, so distinct stream ids give independent
    sequences and the draws are reproducible across platforms.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v <= _UINT64_MAX:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of the stream."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ChannelBlock:
    """Channel coefficients of one or more fading blocks.

    Fields may be scalars (one block) or equal-length 1-D arrays (a batch).
    The SNR attributes are derived from the stored coefficients and
    ``relay_power``, so they are always mutually consistent.
    """

    h_sd: Union[complex, np.ndarray]
    h_sr: Union[complex, np.ndarray]
    h_rd: Union[complex, np.ndarray]
    h_rr: Union[complex, np.ndarray]
    relay_power: float = 1.0

    @cached_property
    def gamma_sd(self):
        return np.abs(self.h_sd) ** 2

    @cached_property
    def gamma_rd(self):
        return self.relay_power * np.abs(self.h_rd) ** 2

    @cached_property
    def gamma_sr(self):
        return np.abs(self.h_sr) ** 2 / (self.relay_power * np.abs(self.h_rr) ** 2 + 1.0)

    def __len__(self) -> int:
        return int(np.size(self.h_sd))

    def __getitem__(self, idx) -> "ChannelBlock":
        return ChannelBlock(
            np.asarray(self.h_sd)[idx],
            np.asarray(self.h_sr)[idx],
            np.asarray(self.h_rd)[idx],
            np.asarray(self.h_rr)[idx],
            self.relay_power,
        )


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def sample_blocks(params: SystemParams, rng, n: int) -> ChannelBlock:
    """Draw ``n`` independent Rayleigh block-fading realizations.

    Each coefficient is circularly symmetric complex Gaussian with variance
    equal to its mean gain, so ``|h|**2`` is exponential. Draws are laid out
    block by block: the first ``k`` blocks of ``sample_blocks(.., n)`` equal
    ``sample_blocks(.., k)`` from the same stream position.

    Parameters
    ----------
    params : SystemParams
    rng : RngStream or numpy.random.Generator
        A stream restarts from its beginning; a generator is advanced.
    n : int
        Number of blocks.
    """
    gen = _as_generator(rng)
    z = gen.standard_normal((int(n), 8))
    scale = np.sqrt(np.array([params.pi_sd, params.pi_sr, params.pi_rd, params.pi_rr]) / 2.0)
    h = (z[:, 0::2] + 1j * z[:, 1::2]) * scale
    return ChannelBlock(h[:, 0], h[:, 1], h[:, 2], h[:, 3], params.relay_power)


def sample_block(params: SystemParams, rng) -> ChannelBlock:
    """Draw a single block; see :func:`sample_blocks`."""
    return sample_blocks(params, rng, 1)[0]


def link_outage(gamma, params: SystemParams):
    """True where ``gamma`` is strictly below the outage threshold."""
    out = np.asarray(gamma) < params.gamma_th
    return bool(out) if np.ndim(out) == 0 else out
