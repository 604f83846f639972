"""Frame dimensioning for the SM-OTFS link.

A frame places one SM symbol (active antenna + APM point) on each of the
M_d = N*M delay-Doppler bins.  All bit-budget quantities derive from the
grid size and the two alphabet orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError


def _is_pow2(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class FrameConfig:
    """Dimensioning parameters of one SM-OTFS frame.

    m            subcarriers (delay bins)
    n            time slots (Doppler bins)
    n_t          transmit antennas, power of two
    n_r          receive antennas
    q            APM constellation order, power of two
    p            channel path count
    delta_f_hz   subcarrier spacing; metadata only with on-grid shifts
    carrier_hz   carrier frequency; metadata only with on-grid shifts
    """

    m: int
    n: int
    n_t: int
    n_r: int
    q: int
    p: int
    delta_f_hz: float = 15e3
    carrier_hz: float = 4e9

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ConfigurationError(f"grid must be at least 1x1, got {self.n}x{self.m}")
        if not _is_pow2(self.n_t):
            raise ConfigurationError(f"n_t must be a power of two, got {self.n_t}")
        if not _is_pow2(self.q) or self.q < 2:
            raise ConfigurationError(f"q must be a power of two >= 2, got {self.q}")
        if self.n_r < 1:
            raise ConfigurationError(f"n_r must be positive, got {self.n_r}")
        if self.p < 1:
            raise ConfigurationError(f"p must be positive, got {self.p}")

    @property
    def m_d(self) -> int:
        """Delay-Doppler bins per frame (N*M)."""
        return self.n * self.m

    @property
    def bits_antenna(self) -> int:
        """Antenna-index bits per bin (log2 N_t)."""
        return self.n_t.bit_length() - 1

    @property
    def bits_apm(self) -> int:
        """APM bits per bin (log2 Q)."""
        return self.q.bit_length() - 1

    @property
    def bits_per_bin(self) -> int:
        return self.bits_antenna + self.bits_apm

    @property
    def bits_per_frame(self) -> int:
        return self.m_d * self.bits_per_bin

    @property
    def rate(self) -> float:
        """Spectral efficiency in bits/s/Hz, log2(N_t*Q)."""
        return float(math.log2(self.n_t * self.q))

    @property
    def n_s(self) -> int:
        """Length of the column-stacked sparse symbol vector s."""
        return self.m_d * self.n_t

    @property
    def n_y(self) -> int:
        """Length of the stacked received vector y."""
        return self.m_d * self.n_r

    @property
    def tap_count(self) -> int:
        """Number of transmit-antenna activation patterns, N_t**M_d."""
        return self.n_t ** self.m_d

    @property
    def candidate_count(self) -> int:
        """Number of full frame hypotheses, (N_t*Q)**M_d."""
        return (self.n_t * self.q) ** self.m_d

    @property
    def max_delay(self) -> int:
        return self.m - 1

    @property
    def max_doppler(self) -> int:
        return self.n - 1


def noise_variance(cfg: FrameConfig, snr_db: float) -> float:
    """Per-entry complex noise variance for a per-symbol SNR in dB.

    The per-symbol SNR is gamma_s = 1/(N_t*sigma^2) with unit-energy APM
    symbols, so sigma^2 = 1/(N_t*gamma_s).
    """
    gamma_s = 10.0 ** (snr_db / 10.0)
    return 1.0 / (cfg.n_t * gamma_s)


def symbol_snr(cfg: FrameConfig, sigma2: float) -> float:
    """Per-symbol SNR gamma_s = 1/(N_t*sigma^2)."""
    if sigma2 <= 0.0:
        raise ConfigurationError(f"noise variance must be positive, got {sigma2}")
    return 1.0 / (cfg.n_t * sigma2)
