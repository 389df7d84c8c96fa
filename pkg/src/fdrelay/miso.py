"""
Exact per-block mutual information of the delay-staggered virtual MISO link.

Source and relay send the same ``L``-symbol block, the relay ``D`` symbols
late. The destination sees a tall ``(L+D) x L`` channel whose Gram matrix is
``alpha*I + beta*B^D + conj(beta)*F^D`` (``B``/``F`` backward and forward
shift). When ``L = m*D`` its eigenvalues have a closed form; otherwise the
dense Hermitian eigensolver is used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ChannelBlock, SystemParams

__all__ = [
    "MisoBlockSpec",
    "eigenvalues_closed_form",
    "gram_matrix",
    "channel_matrix",
    "gram_eigenvalues_oracle",
    "mutual_info_block",
    "effective_snr",
]

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class MisoBlockSpec:
    """Gram-matrix summary of one block: diagonal ``alpha``, off-diagonal ``|beta|``."""

    alpha: float
    beta_mag: float
    L: int
    D: int

    def __post_init__(self):
        if self.L < 1 or self.D < 1:
            raise ValueError("L and D must be positive")
        if self.alpha < 0 or self.beta_mag < 0:
            raise ValueError("alpha and beta_mag must be non-negative")
        # 2|beta| <= alpha by AM-GM; allow rounding slack
        if 2.0 * self.beta_mag > self.alpha * (1.0 + 1e-12) + 1e-300:
            raise ValueError("need 2*beta_mag <= alpha for a positive semidefinite Gram matrix")

    @property
    def m(self) -> int:
        q, r = divmod(self.L, self.D)
        if r:
            raise ValueError(f"L={self.L} is not a multiple of D={self.D}")
        return q

    @classmethod
    def from_channels(cls, h_sd: complex, h_rd: complex, P: float, L: int, D: int) -> "MisoBlockSpec":
        alpha = abs(h_sd) ** 2 + P * abs(h_rd) ** 2
        return cls(alpha, float(np.sqrt(P) * abs(h_sd) * abs(h_rd)), L, D)


def _cosines(L: int, D: int) -> np.ndarray:
    m = L // D
    return np.cos(np.arange(1, m + 1) * D * np.pi / (L + D))


def eigenvalues_closed_form(spec: MisoBlockSpec) -> np.ndarray:
    """Eigenvalues of the Gram matrix for ``L = m*D``, sorted descending.

    ``alpha + 2|beta| cos(i*D*pi/(L+D))`` for ``i = 1..m``, each repeated
    ``D`` times.

    Raises
    ------
    ValueError
        If ``L`` is not a multiple of ``D``.
    """
    spec.m  # divisibility check
    lam = spec.alpha + 2.0 * spec.beta_mag * _cosines(spec.L, spec.D)
    return np.maximum(np.repeat(lam, spec.D), 0.0)


def channel_matrix(h_sd: complex, h_rd: complex, P: float, L: int, D: int) -> np.ndarray:
    """Explicit ``(L+D) x L`` block channel seen by the destination."""
    H = np.zeros((L + D, L), dtype=complex)
    idx = np.arange(L)
    H[idx, idx] += h_sd
    H[idx + D, idx] += np.sqrt(P) * h_rd
    return H


def gram_matrix(h_sd: complex, h_rd: complex, P: float, L: int, D: int) -> np.ndarray:
    """``alpha*I + beta*B^D + conj(beta)*F^D`` built from shift matrices."""
    alpha = abs(h_sd) ** 2 + P * abs(h_rd) ** 2
    beta = np.sqrt(P) * np.conj(h_sd) * h_rd
    B = np.eye(L, k=-1)
    BD = np.linalg.matrix_power(B, D)
    return alpha * np.eye(L) + beta * BD + np.conj(beta) * BD.T


def gram_eigenvalues_oracle(h_sd: complex, h_rd: complex, P: float, L: int, D: int) -> np.ndarray:
    """Gram eigenvalues by dense Hermitian eigendecomposition, sorted descending.

    Works for any positive ``L`` and ``D``.
    """
    lam = np.linalg.eigvalsh(gram_matrix(h_sd, h_rd, P, L, D))
    return np.maximum(lam[::-1], 0.0)


def mutual_info_block(block: ChannelBlock, params: SystemParams, relay_active) -> np.ndarray:
    """Mutual information per block, in bits, of the virtual MISO link.

    ``sum(log2(1 + lambda_i))`` over the ``L`` Gram eigenvalues, with the
    relay power set to zero where ``relay_active`` is false. Accepts single
    blocks or batches; ``relay_active`` broadcasts against the batch.
    """
    L, D = params.block_len, params.delay
    P = np.where(np.asarray(relay_active, dtype=bool), block.relay_power, 0.0)
    g_sd = np.abs(block.h_sd) ** 2
    g_rd = P * np.abs(block.h_rd) ** 2
    alpha = g_sd + g_rd
    beta_mag = np.sqrt(g_sd * g_rd)
    if L % D == 0:
        c = _cosines(L, D)
        lam = np.maximum(alpha[..., None] + 2.0 * beta_mag[..., None] * c, 0.0)
        info = D * np.log1p(lam).sum(axis=-1) / _LN2
    else:
        h_sd = np.broadcast_to(block.h_sd, np.shape(alpha))
        h_rd = np.broadcast_to(block.h_rd, np.shape(alpha))
        info = np.empty(np.shape(alpha))
        for i in np.ndindex(info.shape):
            lam = gram_eigenvalues_oracle(h_sd[i], h_rd[i], P[i], L, D)
            info[i] = np.log1p(lam).sum() / _LN2
    return info if np.ndim(info) else float(info)


def effective_snr(info_bits, L: int):
    """SNR of the single-antenna link carrying the same information per symbol.

    ``2**(info/L) - 1``.
    """
    out = np.expm1(np.asarray(info_bits, dtype=float) * (_LN2 / L))
    return out if np.ndim(out) else float(out)
