"""Doubly-selective delay-Doppler channel generation and matrix assembly.

Each of the P propagation paths carries an integer delay shift, an
integer (possibly negative) Doppler shift, and an independent complex
gain per antenna pair.  The per-link channel matrix is a sum of
Kronecker products of cyclic shift matrices; an independent
index-arithmetic construction of the same matrix is kept alongside as a
cross-check oracle.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .config import FrameConfig, symbol_snr
from .errors import ConfigurationError, DimensionError

__all__ = [
    "PathSet",
    "ChannelRealization",
    "sample_paths",
    "build_link_matrix",
    "build_link_matrix_direct",
    "build_mimo_matrix",
    "equivalent_matrix",
    "apply_channel",
    "dump_channel",
    "load_path_set",
]


@dataclass(frozen=True)
class PathSet:
    """P paths: integer delay/Doppler indices plus per-link complex gains.

    delays[i] in [0, m-1], dopplers[i] in [-(n-1), n-1]; gains has shape
    (p, n_r, n_t).
    """

    delays: np.ndarray
    dopplers: np.ndarray
    gains: np.ndarray

    def __post_init__(self) -> None:
        for name in ("delays", "dopplers", "gains"):
            arr = getattr(self, name)
            arr.setflags(write=False)
        if not (len(self.delays) == len(self.dopplers) == self.gains.shape[0]):
            raise DimensionError("path arrays disagree on the path count")
        if not np.all(np.isfinite(self.gains)):
            raise ConfigurationError("path gains must be finite")

    @property
    def count(self) -> int:
        return int(self.delays.size)

    def validate(self, cfg: FrameConfig) -> None:
        if self.gains.shape != (self.count, cfg.n_r, cfg.n_t):
            raise DimensionError(
                f"gains shape {self.gains.shape} != {(self.count, cfg.n_r, cfg.n_t)}"
            )
        if np.any(self.delays < 0) or np.any(self.delays > cfg.max_delay):
            raise DimensionError("delay index out of range")
        if np.any(np.abs(self.dopplers) > cfg.max_doppler):
            raise DimensionError("Doppler index out of range")


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw materialized as matrices, plus the noise level."""

    paths: PathSet
    h: np.ndarray        # (m_d*n_r, m_d*n_t) DD-domain MIMO matrix
    c: np.ndarray        # h with perfectly shuffled columns
    sigma2: float
    gamma_s: float       # per-symbol SNR 1/(n_t*sigma2)

    @staticmethod
    def sample(cfg: FrameConfig, sigma2: float, rng) -> "ChannelRealization":
        paths = sample_paths(cfg, rng)
        h = build_mimo_matrix(paths, cfg)
        c = equivalent_matrix(h, cfg)
        gamma_s = np.inf if sigma2 == 0.0 else symbol_snr(cfg, sigma2)
        return ChannelRealization(paths=paths, h=h, c=c, sigma2=sigma2, gamma_s=gamma_s)


def sample_paths(cfg: FrameConfig, rng) -> PathSet:
    """Draw a fresh path set.

    Delays are uniform on {0..m-1}, Dopplers uniform on {-(n-1)..n-1},
    and every gain entry is CN(0, 1/p), independent across paths and
    antenna pairs.
    """
    rng = np.random.default_rng(rng)
    delays = rng.integers(0, cfg.max_delay, size=cfg.p, endpoint=True)
    dopplers = rng.integers(-cfg.max_doppler, cfg.max_doppler, size=cfg.p, endpoint=True)
    scale = np.sqrt(0.5 / cfg.p)
    shape = (cfg.p, cfg.n_r, cfg.n_t)
    gains = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return PathSet(delays=delays, dopplers=dopplers, gains=gains)


def _cyclic_shift(size: int, shift: int) -> np.ndarray:
    """size x size matrix with a 1 at (p, q) iff q = (p - shift) mod size."""
    return np.roll(np.eye(size), shift % size, axis=0)


def _path_phases(paths: PathSet, cfg: FrameConfig) -> np.ndarray:
    # signed Doppler index enters the phase; only the shift operator wraps
    return np.exp(-2j * np.pi * paths.delays * paths.dopplers / cfg.m_d)


def build_link_matrix(paths: PathSet, n_r: int, n_t: int, cfg: FrameConfig) -> np.ndarray:
    """m_d x m_d channel matrix of one antenna pair, Kronecker form.

    Sum over paths of  shift_M(l_i) kron [shift_N(k_i) * h_i * phase_i]
    with phase_i = exp(-j*2*pi*l_i*k_i/m_d).
    """
    paths.validate(cfg)
    if not (0 <= n_r < cfg.n_r and 0 <= n_t < cfg.n_t):
        raise DimensionError(f"antenna pair ({n_r}, {n_t}) out of range")
    phases = _path_phases(paths, cfg)
    out = np.zeros((cfg.m_d, cfg.m_d), dtype=np.complex128)
    for i in range(paths.count):
        inner = _cyclic_shift(cfg.n, int(paths.dopplers[i]))
        inner = inner * (paths.gains[i, n_r, n_t] * phases[i])
        out += np.kron(_cyclic_shift(cfg.m, int(paths.delays[i])), inner)
    return out


def build_link_matrix_direct(paths: PathSet, n_r: int, n_t: int, cfg: FrameConfig) -> np.ndarray:
    """Index-arithmetic construction of the same link matrix.

    Writes every nonzero entry straight from the shift and phase rules,
    without forming Kronecker products: row (l*n + k) connects to column
    (((l - l_i) mod m)*n + ((k - k_i) mod n)) with weight h_i * phase_i.
    Kept as an independent oracle for build_link_matrix.
    """
    paths.validate(cfg)
    if not (0 <= n_r < cfg.n_r and 0 <= n_t < cfg.n_t):
        raise DimensionError(f"antenna pair ({n_r}, {n_t}) out of range")
    phases = _path_phases(paths, cfg)
    out = np.zeros((cfg.m_d, cfg.m_d), dtype=np.complex128)
    for i in range(paths.count):
        w = paths.gains[i, n_r, n_t] * phases[i]
        l_i = int(paths.delays[i])
        k_i = int(paths.dopplers[i])
        for l in range(cfg.m):
            for k in range(cfg.n):
                row = l * cfg.n + k
                col = ((l - l_i) % cfg.m) * cfg.n + ((k - k_i) % cfg.n)
                out[row, col] += w
    return out


def _link_blocks(paths: PathSet, cfg: FrameConfig) -> np.ndarray:
    """All link matrices at once, shape (n_r, n_t, m_d, m_d)."""
    phases = _path_phases(paths, cfg)
    rows = np.arange(cfg.m_d, dtype=np.int64)
    l_of = rows // cfg.n
    k_of = rows % cfg.n
    blocks = np.zeros((cfg.n_r, cfg.n_t, cfg.m_d, cfg.m_d), dtype=np.complex128)
    for i in range(paths.count):
        cols = ((l_of - int(paths.delays[i])) % cfg.m) * cfg.n + (
            (k_of - int(paths.dopplers[i])) % cfg.n
        )
        blocks[:, :, rows, cols] += (paths.gains[i] * phases[i])[:, :, None]
    return blocks


def build_mimo_matrix(paths: PathSet, cfg: FrameConfig) -> np.ndarray:
    """Stacked (m_d*n_r) x (m_d*n_t) matrix with link blocks at (n_r, n_t)."""
    paths.validate(cfg)
    blocks = _link_blocks(paths, cfg)
    return blocks.transpose(0, 2, 1, 3).reshape(cfg.n_y, cfg.n_s)


def equivalent_matrix(h: np.ndarray, cfg: FrameConfig) -> np.ndarray:
    """Equivalent channel for the column-stacked symbol vector: c = h @ shuffle.

    Realized as a pure column permutation of h (no matrix product):
    column m_d*n_t + n_t of c is column n_t*m_d + m_d of h, i.e. the
    inverse of the x = s[shuffle_perm] index map.
    """
    if h.shape != (cfg.n_y, cfg.n_s):
        raise DimensionError(f"expected shape {(cfg.n_y, cfg.n_s)}, got {h.shape}")
    j = np.arange(cfg.n_s, dtype=np.int64)
    return h[:, (j % cfg.n_t) * cfg.m_d + j // cfg.n_t]


def apply_channel(c: np.ndarray, s: np.ndarray, sigma2: float, rng) -> np.ndarray:
    """y = c @ s + n with i.i.d. CN(0, sigma2) noise entries."""
    if sigma2 < 0.0:
        raise ConfigurationError(f"noise variance must be nonnegative, got {sigma2}")
    c = np.asarray(c)
    s = np.asarray(s)
    if c.shape[1] != s.shape[0]:
        raise DimensionError(f"shape mismatch: {c.shape} @ {s.shape}")
    y = c @ s
    if sigma2 > 0.0:
        rng = np.random.default_rng(rng)
        scale = np.sqrt(sigma2 / 2.0)
        y = y + scale * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
    return y


def dump_channel(paths: PathSet, cfg: FrameConfig, seed, fp) -> None:
    """Serialize one realization as plain text.

    Header line: M N N_t N_r P seed.  Then one line per path per link:
    i n_r n_t l_i k_i Re(h) Im(h), with i 1-based.
    """
    fp.write(f"{cfg.m} {cfg.n} {cfg.n_t} {cfg.n_r} {cfg.p} {seed}\n")
    for i in range(paths.count):
        for n_r in range(cfg.n_r):
            for n_t in range(cfg.n_t):
                g = paths.gains[i, n_r, n_t]
                fp.write(
                    f"{i + 1} {n_r} {n_t} {paths.delays[i]} {paths.dopplers[i]} "
                    f"{float(g.real)!r} {float(g.imag)!r}\n"
                )


def load_path_set(fp) -> tuple:
    """Inverse of dump_channel; returns (PathSet, header dict)."""
    if isinstance(fp, str):
        fp = io.StringIO(fp)
    head = fp.readline().split()
    if len(head) != 6:
        raise ConfigurationError("malformed channel dump header")
    m, n, n_t, n_r, p, seed = (int(v) for v in head)
    delays = np.zeros(p, dtype=np.int64)
    dopplers = np.zeros(p, dtype=np.int64)
    gains = np.zeros((p, n_r, n_t), dtype=np.complex128)
    for line in fp:
        parts = line.split()
        if not parts:
            continue
        i = int(parts[0]) - 1
        r, t = int(parts[1]), int(parts[2])
        delays[i] = int(parts[3])
        dopplers[i] = int(parts[4])
        gains[i, r, t] = float(parts[5]) + 1j * float(parts[6])
    header = {"m": m, "n": n, "n_t": n_t, "n_r": n_r, "p": p, "seed": seed}
    return PathSet(delays=delays, dopplers=dopplers, gains=gains), header
