"""Monte-Carlo estimation of the discrete-input continuous-output
capacity of the SM-OTFS link.

Per-bin capacity with equiprobable inputs:

    C = (1/M_d) * { L_b - (1/2^L_b) * sum_i E[ log2 sum_j exp(Psi_ij) ] }
    Psi_ij = ( -||C (s_i - s_j) + n||^2 + ||n||^2 ) / sigma^2

The expectation runs over fresh channel realizations and noise draws;
the inner sums enumerate the full 2^L_b hypothesis set exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .channel import build_mimo_matrix, equivalent_matrix, sample_paths
from .config import FrameConfig, noise_variance
from .constellation import Constellation, make_constellation
from .errors import BudgetExceededError

__all__ = ["CapacityEstimate", "dcmc_capacity", "capacity_upper_bound"]

DEFAULT_PAYLOAD_CAP = 16
_BATCH = 64
_PAIR_CHUNK = 2048
_LN2 = np.log(2.0)


@dataclass(frozen=True)
class CapacityEstimate:
    snr_db: float
    c_hat: float
    std_err: float
    samples: int


def capacity_upper_bound(cfg: FrameConfig) -> float:
    """High-SNR ceiling log2(N_t*Q) bits/s/Hz."""
    return cfg.rate


def _default_channel(cfg: FrameConfig, rng) -> np.ndarray:
    return equivalent_matrix(build_mimo_matrix(sample_paths(cfg, rng), cfg), cfg)


def _hypothesis_map(cfg: FrameConfig, cons: Constellation):
    """Per-bin option tables for the full hypothesis set.

    Option o of a bin encodes antenna o // Q and label o % Q, matching
    the frame bit layout, so hypothesis index == payload bit value.
    Returns (columns, symbols): columns[b, o] is the channel column the
    option excites, symbols[o] its APM point.
    """
    opts = np.arange(cfg.n_t * cfg.q, dtype=np.int64)
    ant = opts // cfg.q
    cols = np.arange(cfg.m_d, dtype=np.int64)[:, None] * cfg.n_t + ant[None, :]
    return cols, cons.points[opts % cfg.q]


def _all_outputs(cfg: FrameConfig, c: np.ndarray, cols, syms) -> np.ndarray:
    """Noise-free received vectors of every hypothesis, shape (n_hyp, n_y)."""
    n_opt = cfg.n_t * cfg.q
    n_hyp = n_opt**cfg.m_d
    idx = np.arange(n_hyp, dtype=np.int64)
    v = np.zeros((n_hyp, cfg.n_y), dtype=np.complex128)
    for b in range(cfg.m_d):
        opt = (idx // n_opt ** (cfg.m_d - 1 - b)) % n_opt
        v += c[:, cols[b, opt]].T * syms[opt, None]
    return v


def _mean_log2_sum(v: np.ndarray, noise: np.ndarray, sigma2: float) -> float:
    """(1/n_hyp) * sum_i log2 sum_j exp(Psi_ij) for one noise draw."""
    n_hyp = v.shape[0]
    v_norm2 = (v.real**2 + v.imag**2).sum(axis=1)
    n2 = float(noise.real @ noise.real + noise.imag @ noise.imag)
    y = v + noise
    y_norm2 = v_norm2 + 2.0 * (v.real @ noise.real + v.imag @ noise.imag) + n2
    total = 0.0
    for i0 in range(0, n_hyp, _PAIR_CHUNK):
        i1 = min(i0 + _PAIR_CHUNK, n_hyp)
        cross = y[i0:i1] @ v.conj().T
        dist2 = y_norm2[i0:i1, None] + v_norm2[None, :] - 2.0 * cross.real
        psi = (n2 - dist2) / sigma2
        total += float(np.sum(logsumexp(psi, axis=1)))
    return total / (n_hyp * _LN2)


def dcmc_capacity(
    cfg: FrameConfig,
    cons: Constellation | None,
    snr_db: float,
    n_samples: int,
    seed,
    channel_factory=None,
    payload_cap: int = DEFAULT_PAYLOAD_CAP,
    pool=None,
) -> CapacityEstimate:
    """Monte-Carlo capacity estimate at one SNR point.

    Each sample draws a fresh channel (via channel_factory(rng), default
    the configured random path model) and a fresh noise vector; the inner
    hypothesis sums are exact and combined through max-shifted
    log-sum-exp.  Samples are processed in fixed-size seed batches so the
    result is byte-identical for any worker pool handed in.
    """
    if cfg.bits_per_frame > payload_cap:
        raise BudgetExceededError(
            f"2^{cfg.bits_per_frame} hypotheses exceed the 2^{payload_cap} cap"
        )
    if n_samples < 1:
        raise BudgetExceededError("need at least one sample")
    entropy = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)

    batches = [
        (b, min(_BATCH, n_samples - b * _BATCH))
        for b in range((n_samples + _BATCH - 1) // _BATCH)
    ]
    args = [
        (cfg, cons, snr_db, entropy, b, count, channel_factory)
        for b, count in batches
    ]
    mapper = pool.map if pool is not None else map
    partials = list(mapper(_capacity_batch, args))

    total = 0.0
    total_sq = 0.0
    for part_sum, part_sq in partials:        # fixed reduction order
        total += part_sum
        total_sq += part_sq
    mean = total / n_samples
    if n_samples > 1:
        var = max(0.0, (total_sq - n_samples * mean * mean) / (n_samples - 1))
        std_err = float(np.sqrt(var / n_samples))
    else:
        std_err = 0.0
    return CapacityEstimate(
        snr_db=float(snr_db), c_hat=float(mean), std_err=std_err, samples=n_samples
    )


def _capacity_batch(task) -> tuple:
    cfg, cons, snr_db, entropy, batch_idx, count, channel_factory = task
    if cons is None:
        cons = make_constellation(cfg.q)
    sigma2 = noise_variance(cfg, snr_db)
    rng = np.random.default_rng(np.random.SeedSequence(entropy + (batch_idx,)))
    cols, syms = _hypothesis_map(cfg, cons)
    factory = channel_factory if channel_factory is not None else _default_channel
    l_b = cfg.bits_per_frame

    part_sum = 0.0
    part_sq = 0.0
    scale = np.sqrt(sigma2 / 2.0)
    for _ in range(count):
        c = factory(cfg, rng)
        v = _all_outputs(cfg, c, cols, syms)
        noise = scale * (rng.standard_normal(cfg.n_y) + 1j * rng.standard_normal(cfg.n_y))
        g = _mean_log2_sum(v, noise, sigma2)
        c_k = (l_b - g) / cfg.m_d
        part_sum += c_k
        part_sq += c_k * c_k
    return part_sum, part_sq
