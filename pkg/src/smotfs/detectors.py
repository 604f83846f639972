"""Frame detectors: exhaustive ML, LMMSE baseline, and the
distance-ordered subspace check detector.

All detectors are pure functions of (received vector, equivalent channel,
noise level); none consumes randomness, so paired-seed comparisons across
detectors see identical channels and noise.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import FrameConfig
from .constellation import Constellation
from .errors import BudgetExceededError, ConfigurationError, DimensionError
from .mapping import TapCandidate, demap_frame, tap_selector

__all__ = [
    "Counters",
    "DetectionResult",
    "LsEstimate",
    "DEFAULT_MLD_BUDGET",
    "RANK_TOL",
    "hard_round",
    "distance_vector",
    "tap_reliability",
    "enumerate_taps_best_first",
    "lmmse_estimate",
    "ls_estimate",
    "mld_detect",
    "doscd_detect",
    "lmmse_detect",
    "complexity_model",
    "depth_from_theta",
]

# hard cap on exhaustive enumeration; guards against paper-scale invocation
DEFAULT_MLD_BUDGET = 1 << 24

# smallest |R_jj| relative to the largest flags a rank-deficient subspace
RANK_TOL = 1e-10

_CHUNK = 4096
_TABLE_CACHE_ROWS = 1 << 16


@dataclass(frozen=True)
class Counters:
    """Work accounting for one detection."""

    candidates: int
    pseudoinverses: int
    macs: int


@dataclass(frozen=True)
class DetectionResult:
    tap: TapCandidate
    apm: np.ndarray
    bits: np.ndarray
    residual: float
    counters: Counters
    degraded: bool = False


@dataclass(frozen=True)
class LsEstimate:
    """Least-squares check of one activation pattern."""

    soft: np.ndarray         # unconstrained LS symbol estimate
    symbols: np.ndarray      # soft rounded onto the alphabet
    residual: float          # ||y - C_sub @ symbols||; +inf when rank-deficient
    rank_deficient: bool


def _digits(idx: np.ndarray, base: int, length: int) -> np.ndarray:
    """Base-`base` digit rows (MSB first = bin 0) of candidate indices."""
    powers = base ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % base


@lru_cache(maxsize=32)
def _digit_table(base: int, length: int) -> np.ndarray:
    table = _digits(np.arange(base**length, dtype=np.int64), base, length)
    table.setflags(write=False)
    return table


def hard_round(s_tilde: np.ndarray, cons: Constellation) -> np.ndarray:
    """Round each entry to the nearest alphabet point.

    The codomain is the alphabet only, never zero: an inactive slot whose
    soft estimate sits near zero must land a full constellation-distance
    away, which is what makes the per-slot distances discriminate
    activation patterns.  Ties go to the lowest-index point.
    """
    s_tilde = np.asarray(s_tilde, dtype=np.complex128)
    diff = s_tilde[..., None] - cons.points
    idx = (diff.real**2 + diff.imag**2).argmin(axis=-1)
    return cons.points[idx]


def distance_vector(s_tilde: np.ndarray, s_hat: np.ndarray) -> np.ndarray:
    """Entrywise squared rounding distances |s_tilde - s_hat|**2."""
    s_tilde = np.asarray(s_tilde)
    s_hat = np.asarray(s_hat)
    if s_tilde.shape != s_hat.shape:
        raise DimensionError(f"shape mismatch: {s_tilde.shape} vs {s_hat.shape}")
    diff = s_tilde - s_hat
    return diff.real**2 + diff.imag**2


def tap_reliability(d: np.ndarray, tap: TapCandidate) -> float:
    """Sum of the rounding distances at the pattern's active slots.

    Left-to-right accumulation in bin order; enumerate_taps_best_first
    computes its keys the same way, so the two agree bitwise.
    """
    d = np.asarray(d, dtype=np.float64).ravel()
    acc = 0.0
    for pos in tap.positions:
        acc += float(d[pos - 1])
    return acc


def enumerate_taps_best_first(d: np.ndarray, cfg: FrameConfig, t_d: int) -> list:
    """First t_d activation patterns in ascending reliability order.

    The reliability of a pattern is separable across bins, so the full
    ascending ordering can be streamed lazily: keep a frontier of index
    combos into the per-bin distance lists (each sorted ascending) in a
    priority queue and expand one coordinate at a time.  The N_t**M_d
    pattern set is never materialized.  Ties are broken by lexicographic
    slot order, making the ordering deterministic.
    """
    if not 1 <= t_d <= cfg.tap_count:
        raise ConfigurationError(f"t_d={t_d} outside [1, {cfg.tap_count}]")
    d = np.asarray(d, dtype=np.float64).ravel()
    if d.size != cfg.n_s:
        raise DimensionError(f"distance vector must have {cfg.n_s} entries, got {d.size}")

    bins = d.reshape(cfg.m_d, cfg.n_t)
    order = np.argsort(bins, axis=1, kind="stable")      # antennas by ascending distance
    vals = np.take_along_axis(bins, order, axis=1)

    m_d, n_t = cfg.m_d, cfg.n_t

    def key_of(combo):
        acc = 0.0
        for m in range(m_d):
            acc += float(vals[m, combo[m]])
        return acc, tuple(int(order[m, combo[m]]) for m in range(m_d))

    start = (0,) * m_d
    lam0, ants0 = key_of(start)
    heap = [(lam0, ants0, start)]
    seen = {start}
    out: list = []
    while heap and len(out) < t_d:
        lam, ants, combo = heapq.heappop(heap)
        # positions invariant holds by construction; skip re-validation
        positions = tuple(m * n_t + a + 1 for m, a in enumerate(ants))
        out.append(TapCandidate(positions=positions, reliability=lam))
        for j in range(m_d):
            if combo[j] + 1 < n_t:
                nxt = combo[:j] + (combo[j] + 1,) + combo[j + 1 :]
                if nxt not in seen:
                    seen.add(nxt)
                    lam_n, ants_n = key_of(nxt)
                    heapq.heappush(heap, (lam_n, ants_n, nxt))
    return out


def lmmse_estimate(y: np.ndarray, c: np.ndarray, gamma_s: float) -> np.ndarray:
    """Regularized linear estimate (C^H C + I/gamma_s)^-1 C^H y.

    Well-posed for any gamma_s > 0 since the regularized normal matrix is
    Hermitian positive definite.
    """
    if gamma_s <= 0:
        raise ConfigurationError(f"gamma_s must be positive, got {gamma_s}")
    c = np.asarray(c)
    y = np.asarray(y).ravel()
    if c.shape[0] != y.size:
        raise DimensionError(f"shape mismatch: {c.shape} vs y of length {y.size}")
    gram = c.conj().T @ c
    gram = gram + (1.0 / gamma_s) * np.eye(c.shape[1])
    return np.linalg.solve(gram, c.conj().T @ y)


def _ls_batch(y: np.ndarray, c_sub: np.ndarray, cons: Constellation):
    """Least-squares check of a stack of subspace matrices.

    c_sub has shape (t, n_y, m_d).  Returns (soft, symbols, residuals,
    rank_deficient); residual is +inf for rank-deficient entries so they
    are never selected, while their symbols come from the minimum-norm
    solution.  ls_estimate routes a single pattern through this same code
    path, so batched and one-at-a-time calls agree bitwise.
    """
    t, n_y, m_d = c_sub.shape
    q, r = np.linalg.qr(c_sub)
    w = np.matmul(q.conj().transpose(0, 2, 1), y[None, :, None])[..., 0]   # (t, m_d)

    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    deficient = diag.min(axis=1) <= RANK_TOL * diag.max(axis=1)

    denom = np.diagonal(r, axis1=1, axis2=2).copy()
    denom[deficient] = 1.0                     # placeholder; overwritten below
    soft = np.zeros((t, m_d), dtype=np.complex128)
    for j in range(m_d - 1, -1, -1):
        acc = w[:, j].copy()
        if j + 1 < m_d:
            acc -= np.einsum("tk,tk->t", r[:, j, j + 1 :], soft[:, j + 1 :])
        soft[:, j] = acc / denom[:, j]

    for i in np.nonzero(deficient)[0]:
        soft[i], *_ = np.linalg.lstsq(c_sub[i], y, rcond=None)

    symbols = hard_round(soft, cons)
    resid_vec = y[None, :] - np.matmul(c_sub, symbols[..., None])[..., 0]
    residuals = np.sqrt((resid_vec.real**2 + resid_vec.imag**2).sum(axis=1))
    residuals = np.where(deficient, np.inf, residuals)
    return soft, symbols, residuals, deficient


def ls_estimate(
    y: np.ndarray, c: np.ndarray, tap: TapCandidate, cfg: FrameConfig, cons: Constellation
) -> LsEstimate:
    """Least-squares symbol estimate restricted to one activation pattern.

    The subspace matrix is pseudo-inverted through an orthogonal
    factorization; its hard-rounded solution gives the Euclidean residual
    ||y - C_sub @ symbols||.  A subspace whose smallest R diagonal falls
    below RANK_TOL times the largest is flagged rank-deficient and
    assigned an infinite residual.
    """
    y = np.asarray(y, dtype=np.complex128).ravel()
    cols = tap_selector(tap, cfg)
    c_sub = np.ascontiguousarray(c[:, cols])[None, :, :]
    soft, symbols, residuals, deficient = _ls_batch(y, c_sub, cons)
    return LsEstimate(
        soft=soft[0],
        symbols=symbols[0],
        residual=float(residuals[0]),
        rank_deficient=bool(deficient[0]),
    )


def _euclidean_residual(y: np.ndarray, c: np.ndarray, cols: np.ndarray, symbols: np.ndarray) -> float:
    return float(np.linalg.norm(y - c[:, cols] @ symbols))


def doscd_detect(
    y: np.ndarray,
    c: np.ndarray,
    gamma_s: float,
    cfg: FrameConfig,
    cons: Constellation,
    t_d: int,
) -> DetectionResult:
    """Distance-ordered subspace check detection.

    Pipeline: LMMSE soft estimate, per-slot rounding distances, best-first
    reliability ordering of activation patterns, least-squares residual
    check of the first t_d patterns, and selection of the smallest
    residual (first index on ties).  If every checked subspace is
    rank-deficient the reliability-best pattern is returned with the
    degraded flag set.
    """
    y = np.asarray(y, dtype=np.complex128).ravel()
    s_tilde = lmmse_estimate(y, c, gamma_s)
    s_hat = hard_round(s_tilde, cons)
    d = distance_vector(s_tilde, s_hat)
    taps = enumerate_taps_best_first(d, cfg, t_d)

    cols = np.stack([np.asarray(tap.positions, dtype=np.int64) - 1 for tap in taps])
    c_sub = np.ascontiguousarray(c[:, cols].transpose(1, 0, 2))   # (t_d, n_y, m_d)
    _, symbols, residuals, deficient = _ls_batch(y, c_sub, cons)

    degraded = bool(deficient.all())
    t_hat = 0 if degraded else int(np.argmin(residuals))
    best_tap = taps[t_hat]
    best_symbols = symbols[t_hat]
    residual = _euclidean_residual(y, c, cols[t_hat], best_symbols)
    bits = demap_frame(best_tap.antenna_indices(cfg), best_symbols, cfg, cons)
    return DetectionResult(
        tap=best_tap,
        apm=best_symbols,
        bits=bits,
        residual=residual,
        counters=Counters(candidates=t_d, pseudoinverses=t_d, macs=t_d * cfg.m_d),
        degraded=degraded,
    )


def lmmse_detect(
    y: np.ndarray, c: np.ndarray, gamma_s: float, cfg: FrameConfig, cons: Constellation
) -> DetectionResult:
    """LMMSE-plus-rounding baseline without subspace re-estimation.

    Per bin the slot with the smallest rounding distance is declared
    active and its rounded estimate is the symbol decision.
    """
    y = np.asarray(y, dtype=np.complex128).ravel()
    s_tilde = lmmse_estimate(y, c, gamma_s)
    s_hat = hard_round(s_tilde, cons)
    d = distance_vector(s_tilde, s_hat)
    antennas = d.reshape(cfg.m_d, cfg.n_t).argmin(axis=1)
    tap = TapCandidate.from_antennas(antennas, cfg)
    cols = tap_selector(tap, cfg)
    symbols = s_hat[cols]
    tap = TapCandidate(positions=tap.positions, reliability=tap_reliability(d, tap))
    bits = demap_frame(antennas, symbols, cfg, cons)
    return DetectionResult(
        tap=tap,
        apm=symbols,
        bits=bits,
        residual=_euclidean_residual(y, c, cols, symbols),
        counters=Counters(candidates=1, pseudoinverses=0, macs=cfg.m_d),
    )


def mld_detect(
    y: np.ndarray,
    c: np.ndarray,
    cfg: FrameConfig,
    cons: Constellation,
    budget: int = DEFAULT_MLD_BUDGET,
) -> DetectionResult:
    """Exhaustive maximum-likelihood detection.

    Minimizes ||y - C s||^2 over every activation pattern and APM
    combination.  The scan runs blockwise over the pattern/symbol grid
    with the objective expanded as
    ||y||^2 - 2 Re(s^H C_t^H y) + s^H (C_t^H C_t) s,
    which keeps the per-candidate work to two small matrix products; the
    winning candidate's residual is then recomputed directly.  Raises
    BudgetExceededError when (N_t*Q)**M_d exceeds the budget.
    """
    total = cfg.candidate_count
    if total > budget:
        raise BudgetExceededError(
            f"{total} ML candidates exceed the budget of {budget}"
        )
    y = np.asarray(y, dtype=np.complex128).ravel()
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (cfg.n_y, cfg.n_s):
        raise DimensionError(f"expected channel shape {(cfg.n_y, cfg.n_s)}, got {c.shape}")

    m_d, n_t, q_ord = cfg.m_d, cfg.n_t, cfg.q
    n_taps = cfg.tap_count
    n_apm = q_ord**m_d

    v = c.conj().T @ y                     # (n_s,)
    gram = c.conj().T @ c                  # (n_s, n_s)
    y2 = float(y.real @ y.real + y.imag @ y.imag)

    best = (np.inf, -1, -1)                # (objective, apm index, tap index)
    for t0 in range(0, n_taps, _CHUNK):
        t1 = min(t0 + _CHUNK, n_taps)
        t_idx = np.arange(t0, t1, dtype=np.int64)
        if n_taps <= _TABLE_CACHE_ROWS:
            tap_digits = _digit_table(n_t, m_d)[t0:t1]
        else:
            tap_digits = _digits(t_idx, n_t, m_d)
        tap_cols = np.arange(m_d, dtype=np.int64)[None, :] * n_t + tap_digits
        w = v[tap_cols]                                            # (tb, m_d)
        gf = gram[tap_cols[:, :, None], tap_cols[:, None, :]]      # (tb, m_d, m_d)
        gf = gf.reshape(t1 - t0, m_d * m_d).T                      # (m_d^2, tb)

        for a0 in range(0, n_apm, _CHUNK):
            a1 = min(a0 + _CHUNK, n_apm)
            if n_apm <= _TABLE_CACHE_ROWS:
                apm_digits = _digit_table(q_ord, m_d)[a0:a1]
            else:
                apm_digits = _digits(np.arange(a0, a1, dtype=np.int64), q_ord, m_d)
            s_blk = cons.points[apm_digits]                        # (ab, m_d)
            ss = (s_blk.conj()[:, :, None] * s_blk[:, None, :]).reshape(a1 - a0, m_d * m_d)
            cross = (s_blk.conj() @ w.T).real                      # (ab, tb)
            quad = (ss @ gf).real
            obj = quad - 2.0 * cross
            flat = int(np.argmin(obj))
            val = float(obj.flat[flat]) + y2
            if val < best[0]:
                ab, tb = divmod(flat, t1 - t0)
                best = (val, a0 + ab, t0 + tb)

    _, a_best, t_best = best
    antennas = _digits(np.array([t_best], dtype=np.int64), n_t, m_d)[0]
    labels = _digits(np.array([a_best], dtype=np.int64), q_ord, m_d)[0]
    symbols = cons.points[labels]
    tap = TapCandidate.from_antennas(antennas, cfg)
    cols = tap_selector(tap, cfg)
    residual = _euclidean_residual(y, c, cols, symbols)
    bits = demap_frame(antennas, symbols, cfg, cons)
    return DetectionResult(
        tap=tap,
        apm=symbols,
        bits=bits,
        residual=residual,
        counters=Counters(candidates=total, pseudoinverses=0, macs=total),
    )


def depth_from_theta(theta: float, cfg: FrameConfig) -> int:
    """Subspace-check depth from a fraction of the full pattern count."""
    if not 0.0 < theta <= 1.0:
        raise ConfigurationError(f"theta must be in (0, 1], got {theta}")
    return max(1, round(theta * cfg.tap_count))


def complexity_model(kind: str, cfg: FrameConfig, t_d: int | None = None, t_mp: int | None = None) -> int:
    """Analytic operation-count model, evaluated exactly as an integer.

    mld:   (N_t*Q)**M_d candidate evaluations
    doscd: t_d*M_d subspace-check operations
    mpd:   M^3*N^3*(N_r^2*N_t + N_t^2*N_r)*N_t*Q*t_mp / N_t^2 (the
           message-passing detector itself is not implemented; only its
           count is reported for comparison)
    """
    if kind == "mld":
        return (cfg.n_t * cfg.q) ** cfg.m_d
    if kind == "doscd":
        if t_d is None:
            raise ConfigurationError("doscd complexity needs t_d")
        return int(t_d) * cfg.m_d
    if kind == "mpd":
        if t_mp is None:
            raise ConfigurationError("mpd complexity needs t_mp")
        num = (
            cfg.m**3
            * cfg.n**3
            * (cfg.n_r**2 * cfg.n_t + cfg.n_t**2 * cfg.n_r)
            * cfg.n_t
            * cfg.q
            * int(t_mp)
        )
        quot, rem = divmod(num, cfg.n_t**2)
        if rem:
            raise ConfigurationError("mpd operation count is not integral")
        return quot
    raise ConfigurationError(f"unknown detector kind {kind!r}")
