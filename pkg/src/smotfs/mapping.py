"""Bit-to-frame SM mapping, the perfect-shuffle mapper, and the
discrete symplectic transform pair.

Index conventions used throughout the package:

* A delay-Doppler grid is an ``n x m`` array (Doppler index first).  Its
  vectorization is Doppler-fastest: grid entry ``(k, l)`` sits at linear
  index ``l*n + k``.
* ``s`` stacks the columns of the ``n_t x m_d`` frame matrix ``S``, so
  bin ``m_d`` owns the slot range ``[m_d*n_t, (m_d+1)*n_t)``.
* ``x`` stacks the rows of ``S`` (one block per transmit antenna).  The
  perfect shuffle maps between the two orderings: ``x = s[shuffle_perm]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import FrameConfig
from .constellation import Constellation
from .errors import DimensionError

__all__ = [
    "SmFrame",
    "TapCandidate",
    "map_bits",
    "demap_frame",
    "shuffle_index",
    "shuffle_perm",
    "tap_selector",
    "isfft",
    "sfft",
]


@dataclass(frozen=True)
class TapCandidate:
    """One transmit-antenna activation pattern.

    positions are 1-based indices into the sparse vector s, one per
    delay-Doppler bin; bin m_d may only select a slot from its own range
    [m_d*n_t + 1, (m_d+1)*n_t].
    """

    positions: tuple
    reliability: float = 0.0

    def validate(self, cfg: FrameConfig) -> None:
        if len(self.positions) != cfg.m_d:
            raise DimensionError(
                f"expected {cfg.m_d} positions, got {len(self.positions)}"
            )
        for m_d, pos in enumerate(self.positions):
            lo = m_d * cfg.n_t + 1
            if not lo <= pos <= lo + cfg.n_t - 1:
                raise DimensionError(
                    f"position {pos} of bin {m_d} outside its slot range "
                    f"[{lo}, {lo + cfg.n_t - 1}]"
                )

    @staticmethod
    def from_antennas(antennas: np.ndarray, cfg: FrameConfig, reliability: float = 0.0) -> "TapCandidate":
        ant = np.asarray(antennas, dtype=np.int64)
        if ant.shape != (cfg.m_d,):
            raise DimensionError(f"expected {cfg.m_d} antenna indices, got {ant.shape}")
        if ant.min(initial=0) < 0 or ant.max(initial=0) >= cfg.n_t:
            raise DimensionError("antenna index out of range")
        positions = tuple(int(m_d * cfg.n_t + a + 1) for m_d, a in enumerate(ant))
        return TapCandidate(positions=positions, reliability=reliability)

    def antenna_indices(self, cfg: FrameConfig) -> np.ndarray:
        """0-based active-antenna index per bin."""
        pos = np.asarray(self.positions, dtype=np.int64) - 1
        return pos - np.arange(cfg.m_d, dtype=np.int64) * cfg.n_t


@dataclass(frozen=True)
class SmFrame:
    """A mapped SM-OTFS frame in all of its equivalent layouts."""

    bits: np.ndarray        # payload, length bits_per_frame
    tap: np.ndarray         # active antenna per bin, length m_d
    apm: np.ndarray         # constellation point per bin, length m_d
    grid: np.ndarray        # S, shape (n_t, m_d); one nonzero per column
    s: np.ndarray           # vec(S), column stacked, length m_d*n_t
    x: np.ndarray           # antenna stacked, length m_d*n_t


def _bits_to_ints(bits: np.ndarray, width: int) -> np.ndarray:
    """Rows of `bits` (shape (k, width), MSB first) as integers."""
    if width == 0:
        return np.zeros(bits.shape[0], dtype=np.int64)
    weights = 1 << np.arange(width - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def _ints_to_bits(vals: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((vals[:, None] >> shifts[None, :]) & 1).astype(np.int64)


def map_bits(bits, cfg: FrameConfig, cons: Constellation) -> SmFrame:
    """Map a payload onto one SM-OTFS frame.

    Per bin the first log2(N_t) bits select the active antenna (natural
    binary) and the remaining log2(Q) bits select the APM point through
    the constellation labeling.
    """
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size != cfg.bits_per_frame:
        raise DimensionError(
            f"payload must have {cfg.bits_per_frame} bits, got {bits.size}"
        )
    if cons.order != cfg.q:
        raise DimensionError(
            f"constellation order {cons.order} does not match config q={cfg.q}"
        )
    per_bin = bits.reshape(cfg.m_d, cfg.bits_per_bin)
    tap = _bits_to_ints(per_bin[:, : cfg.bits_antenna], cfg.bits_antenna)
    labels = _bits_to_ints(per_bin[:, cfg.bits_antenna :], cfg.bits_apm)
    apm = cons.points[labels]

    grid = np.zeros((cfg.n_t, cfg.m_d), dtype=np.complex128)
    cols = np.arange(cfg.m_d)
    grid[tap, cols] = apm
    s = grid.reshape(-1, order="F")        # column stacking = vec(S)
    x = grid.reshape(-1, order="C")        # row stacking = antenna blocks
    return SmFrame(bits=bits, tap=tap, apm=apm, grid=grid, s=s, x=x)


def demap_frame(tap, apm, cfg: FrameConfig, cons: Constellation) -> np.ndarray:
    """Exact inverse of map_bits on its image."""
    tap = np.asarray(tap, dtype=np.int64).ravel()
    apm = np.asarray(apm, dtype=np.complex128).ravel()
    if tap.size != cfg.m_d or apm.size != cfg.m_d:
        raise DimensionError(
            f"tap/apm must each have {cfg.m_d} entries, got {tap.size}/{apm.size}"
        )
    if tap.min() < 0 or tap.max() >= cfg.n_t:
        raise DimensionError("antenna index out of range")
    labels = np.array([cons.label_of(a) for a in apm], dtype=np.int64)
    out = np.empty((cfg.m_d, cfg.bits_per_bin), dtype=np.int64)
    out[:, : cfg.bits_antenna] = _ints_to_bits(tap, cfg.bits_antenna)
    out[:, cfg.bits_antenna :] = _ints_to_bits(labels, cfg.bits_apm)
    return out.ravel()


def shuffle_index(n_t: int, m_d: int, cfg: FrameConfig) -> int:
    """Position in x of the symbol that bin m_d sends on antenna n_t.

    Equivalently: the perfect-shuffle matrix has a 1 at row
    ``n_t*m_d_total + m_d``, column ``m_d*n_t_total + n_t``.
    """
    if not 0 <= n_t < cfg.n_t:
        raise DimensionError(f"antenna index {n_t} out of range [0, {cfg.n_t})")
    if not 0 <= m_d < cfg.m_d:
        raise DimensionError(f"bin index {m_d} out of range [0, {cfg.m_d})")
    return n_t * cfg.m_d + m_d


def shuffle_perm(cfg: FrameConfig) -> np.ndarray:
    """Index map realizing the perfect shuffle: ``x = s[shuffle_perm(cfg)]``.

    Stored as an index vector, never a dense matrix; entry i is the
    s-position feeding x-position i.
    """
    i = np.arange(cfg.n_s, dtype=np.int64)
    return (i % cfg.m_d) * cfg.n_t + i // cfg.m_d


def tap_selector(tap: TapCandidate, cfg: FrameConfig) -> np.ndarray:
    """0-based columns of the equivalent channel gathered by a TAP.

    ``C[:, tap_selector(tap, cfg)]`` is the m_d-column subspace matrix of
    that activation pattern, in bin order.
    """
    tap.validate(cfg)
    return np.asarray(tap.positions, dtype=np.int64) - 1


def isfft(grid: np.ndarray) -> np.ndarray:
    """Delay-Doppler to time-frequency transform of an n x m grid.

    out(n, m) = (1/sqrt(nm)) * sum_k sum_l grid(k, l)
                * exp(j*2*pi*(n*k/N - m*l/M)); unitary.
    """
    grid = np.asarray(grid, dtype=np.complex128)
    if grid.ndim != 2:
        raise DimensionError(f"expected a 2-D grid, got shape {grid.shape}")
    n, m = grid.shape
    return np.fft.fft(np.fft.ifft(grid, axis=0), axis=1) * np.sqrt(n / m)


def sfft(grid: np.ndarray) -> np.ndarray:
    """Time-frequency to delay-Doppler transform; exact inverse of isfft."""
    grid = np.asarray(grid, dtype=np.complex128)
    if grid.ndim != 2:
        raise DimensionError(f"expected a 2-D grid, got shape {grid.shape}")
    n, m = grid.shape
    return np.fft.fft(np.fft.ifft(grid, axis=1), axis=0) * np.sqrt(m / n)
