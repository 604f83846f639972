"""Experiment orchestration: seeded BER and capacity sweeps with CSV output.

Trial t of SNR point p is seeded from (master_seed, p, t), so any trial
is reproducible in isolation and sweeps with paired master seeds see
identical channels, payloads and noise.  Results are always folded in
trial-index order, which makes the output byte-identical for any worker
count.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from multiprocessing import Pool

import numpy as np
from threadpoolctl import threadpool_limits

from .capacity import dcmc_capacity
from .channel import apply_channel, build_mimo_matrix, equivalent_matrix, sample_paths
from .config import FrameConfig, noise_variance, symbol_snr
from .constellation import Constellation, make_constellation
from .detectors import (
    DEFAULT_MLD_BUDGET,
    Counters,
    DetectionResult,
    depth_from_theta,
    doscd_detect,
    lmmse_detect,
    mld_detect,
)
from .errors import BudgetExceededError, ConfigurationError
from .mapping import map_bits

__all__ = [
    "SweepConfig",
    "TrialRecord",
    "PointResult",
    "run_trial",
    "run_ber_sweep",
    "run_capacity_sweep",
    "simo_baseline",
    "write_ber_csv",
    "write_capacity_csv",
]

_DETECTORS = ("mld", "doscd", "lmmse")
_CHUNK = 256


@dataclass(frozen=True)
class SweepConfig:
    """Everything one BER or capacity sweep depends on."""

    frame: FrameConfig
    detector: str = "doscd"
    constellation: str = "qam"
    t_d: int | None = None
    theta: float | None = None
    snr_db: tuple = (10.0,)
    min_trials: int = 10_000
    target_errors: int = 200
    max_trials: int = 1_000_000
    samples: int = 2_000            # capacity sweeps only
    seed: int = 0
    workers: int = 1
    mld_budget: int = DEFAULT_MLD_BUDGET

    def __post_init__(self) -> None:
        if self.detector not in _DETECTORS:
            raise ConfigurationError(f"unknown detector {self.detector!r}")
        grid = tuple(float(v) for v in self.snr_db)
        if not grid:
            raise ConfigurationError("SNR grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("SNR grid must be strictly increasing")
        object.__setattr__(self, "snr_db", grid)
        if self.min_trials < 1 or self.max_trials < self.min_trials:
            raise ConfigurationError("need 1 <= min_trials <= max_trials")
        if self.target_errors < 1:
            raise ConfigurationError("target_errors must be positive")
        if self.samples < 1:
            raise ConfigurationError("samples must be positive")
        if self.workers < 1:
            raise ConfigurationError("workers must be positive")
        if self.theta is not None and not 0.0 < self.theta <= 1.0:
            raise ConfigurationError(f"theta must be in (0, 1], got {self.theta}")
        if self.t_d is not None and self.t_d < 1:
            raise ConfigurationError("t_d must be positive")

    def resolved_depth(self) -> int:
        """Subspace-check depth; BER sweeps with doscd require t_d or theta."""
        if self.detector != "doscd":
            return 0
        if self.t_d is None and self.theta is None:
            raise ConfigurationError("doscd needs t_d or theta")
        if self.t_d is not None:
            if self.t_d > self.frame.tap_count:
                raise ConfigurationError(
                    f"t_d={self.t_d} exceeds the {self.frame.tap_count} patterns"
                )
            return self.t_d
        return depth_from_theta(self.theta, self.frame)

    def make_constellation(self) -> Constellation:
        return make_constellation(self.frame.q, self.constellation)


@dataclass(frozen=True)
class TrialRecord:
    snr_db: float
    index: int
    bit_errors: int
    frame_error: bool
    residual: float
    counters: Counters


@dataclass(frozen=True)
class PointResult:
    snr_db: float
    trials: int
    bit_errors: int
    frame_errors: int
    mean_candidates: float
    mean_pseudoinverses: float

    def rates(self, bits_per_frame: int) -> tuple:
        """(ber, fer) given the payload size."""
        ber = self.bit_errors / (self.trials * bits_per_frame)
        fer = self.frame_errors / self.trials
        return ber, fer


def trial_seed(master: int, point: int, trial: int) -> np.random.SeedSequence:
    """Independent, reproducible substream for one (point, trial) pair."""
    return np.random.SeedSequence((master, point, trial))


def _detect(y, c, gamma_s, cfg, cons, detector, t_d, mld_budget) -> DetectionResult:
    if detector == "mld":
        return mld_detect(y, c, cfg, cons, budget=mld_budget)
    if detector == "doscd":
        return doscd_detect(y, c, gamma_s, cfg, cons, t_d)
    return lmmse_detect(y, c, gamma_s, cfg, cons)


def run_trial(
    cfg: FrameConfig,
    cons: Constellation,
    detector: str,
    t_d: int,
    snr_db: float,
    rng,
    index: int = 0,
    mld_budget: int = DEFAULT_MLD_BUDGET,
) -> TrialRecord:
    """One link transmission: fresh payload, channel and noise, then detect.

    Draw order (payload bits, path set, noise) is part of the
    reproducibility contract.
    """
    rng = np.random.default_rng(rng)
    sigma2 = noise_variance(cfg, snr_db)
    bits = rng.integers(0, 2, size=cfg.bits_per_frame)
    frame = map_bits(bits, cfg, cons)
    paths = sample_paths(cfg, rng)
    c = equivalent_matrix(build_mimo_matrix(paths, cfg), cfg)
    y = apply_channel(c, frame.s, sigma2, rng)
    gamma_s = symbol_snr(cfg, sigma2) if sigma2 > 0 else np.inf
    result = _detect(y, c, gamma_s, cfg, cons, detector, t_d, mld_budget)
    bit_errors = int(np.sum(result.bits != bits))
    return TrialRecord(
        snr_db=snr_db,
        index=index,
        bit_errors=bit_errors,
        frame_error=bit_errors > 0,
        residual=result.residual,
        counters=result.counters,
    )


_WORKER_STATE: dict = {}


def _ber_worker_init(sweep: SweepConfig) -> None:
    threadpool_limits(limits=1)
    _WORKER_STATE["sweep"] = sweep
    _WORKER_STATE["cons"] = sweep.make_constellation()
    _WORKER_STATE["t_d"] = sweep.resolved_depth()


def _ber_worker(task) -> tuple:
    point_idx, trial_idx = task
    sweep = _WORKER_STATE["sweep"]
    rec = run_trial(
        sweep.frame,
        _WORKER_STATE["cons"],
        sweep.detector,
        _WORKER_STATE["t_d"],
        sweep.snr_db[point_idx],
        trial_seed(sweep.seed, point_idx, trial_idx),
        index=trial_idx,
        mld_budget=sweep.mld_budget,
    )
    return (
        rec.bit_errors,
        rec.frame_error,
        rec.counters.candidates,
        rec.counters.pseudoinverses,
    )


def _stop(sweep: SweepConfig, trials: int, errors: int) -> bool:
    return trials >= sweep.min_trials and (
        errors >= sweep.target_errors or trials >= sweep.max_trials
    )


def _run_point(sweep: SweepConfig, point_idx: int, pool) -> PointResult:
    trials = errors = ferrs = 0
    cand_sum = pinv_sum = 0
    next_trial = 0
    while True:
        tasks = [(point_idx, t) for t in range(next_trial, next_trial + _CHUNK)]
        if pool is None:
            results = map(_ber_worker, tasks)
        else:
            results = pool.imap(_ber_worker, tasks, chunksize=32)
        stop = False
        for be, fe, cand, pinv in results:
            trials += 1
            errors += be
            ferrs += int(fe)
            cand_sum += cand
            pinv_sum += pinv
            if _stop(sweep, trials, errors):
                stop = True
                break
        if stop:
            break
        next_trial += _CHUNK
    return PointResult(
        snr_db=sweep.snr_db[point_idx],
        trials=trials,
        bit_errors=errors,
        frame_errors=ferrs,
        mean_candidates=cand_sum / trials,
        mean_pseudoinverses=pinv_sum / trials,
    )


def run_ber_sweep(sweep: SweepConfig, out=None, progress=False) -> list:
    """BER/FER over the SNR grid; optionally writes the CSV to `out`.

    Every SNR point runs trials in index order until the stopping rule
    (min_trials reached AND (target_errors collected OR max_trials
    reached)) first fires; the fold order makes results independent of
    the worker count.
    """
    sweep.resolved_depth()          # fail fast on bad depth configs
    _ber_worker_init(sweep)         # also serves as the serial-path state
    points = []
    try:
        with threadpool_limits(limits=1):
            if sweep.workers > 1:
                with Pool(sweep.workers, initializer=_ber_worker_init, initargs=(sweep,)) as pool:
                    for p in range(len(sweep.snr_db)):
                        points.append(_run_point(sweep, p, pool))
                        if progress:
                            _print_point(sweep, points[-1])
            else:
                for p in range(len(sweep.snr_db)):
                    points.append(_run_point(sweep, p, None))
                    if progress:
                        _print_point(sweep, points[-1])
    except BudgetExceededError as exc:
        raise BudgetExceededError(f"{exc} [sweep config: {sweep}]") from exc
    if out is not None:
        write_ber_csv(sweep, points, out)
    return points


def _print_point(sweep: SweepConfig, pt: PointResult) -> None:
    ber, fer = pt.rates(sweep.frame.bits_per_frame)
    print(
        f"snr {pt.snr_db:6.2f} dB  trials {pt.trials:7d}  ber {ber:.3e}  fer {fer:.3e}",
        file=sys.stderr,
    )


def simo_baseline(sweep: SweepConfig, sm_rate: float) -> SweepConfig:
    """Validate a rate-matched single-transmit-antenna baseline config.

    The baseline must use one transmit antenna and carry the same
    bits/s/Hz as the SM system it benchmarks; detection is exhaustive ML.
    """
    if sweep.frame.n_t != 1:
        raise ConfigurationError("baseline must use a single transmit antenna")
    if not math.isclose(sweep.frame.rate, sm_rate, abs_tol=1e-12):
        raise ConfigurationError(
            f"baseline rate {sweep.frame.rate} does not match {sm_rate} bits/s/Hz"
        )
    return replace(sweep, detector="mld")


def run_capacity_sweep(sweep: SweepConfig, out=None, progress=False) -> list:
    """DCMC capacity over the SNR grid with per-point seed substreams."""
    cons = sweep.make_constellation()
    estimates = []
    with threadpool_limits(limits=1):
        pool = Pool(sweep.workers, initializer=_capacity_worker_init) if sweep.workers > 1 else None
        try:
            for p, snr in enumerate(sweep.snr_db):
                est = dcmc_capacity(
                    sweep.frame,
                    cons,
                    snr,
                    sweep.samples,
                    seed=(sweep.seed, p),
                    pool=pool,
                )
                estimates.append(est)
                if progress:
                    print(
                        f"snr {snr:6.2f} dB  c_hat {est.c_hat:.4f} +- {est.std_err:.4f}",
                        file=sys.stderr,
                    )
        finally:
            if pool is not None:
                pool.terminate()
    if out is not None:
        write_capacity_csv(sweep, estimates, out)
    return estimates


def _capacity_worker_init() -> None:
    threadpool_limits(limits=1)


def _open_out(out):
    if hasattr(out, "write"):
        return out, False
    return open(out, "w", newline=""), True


def write_ber_csv(sweep: SweepConfig, points: list, out) -> None:
    """Mandated columns, newline-terminated, plain decimal formatting."""
    fp, owned = _open_out(out)
    try:
        fp.write("snr_db,trials,bit_errors,ber,frame_errors,fer,detector,td,seed\n")
        t_d = sweep.resolved_depth()
        for pt in points:
            ber, fer = pt.rates(sweep.frame.bits_per_frame)
            fp.write(
                f"{pt.snr_db!r},{pt.trials},{pt.bit_errors},{ber!r},"
                f"{pt.frame_errors},{fer!r},{sweep.detector},{t_d},{sweep.seed}\n"
            )
    finally:
        if owned:
            fp.close()


def write_capacity_csv(sweep: SweepConfig, estimates: list, out) -> None:
    fp, owned = _open_out(out)
    try:
        fp.write("snr_db,c_hat,std_err,samples,seed\n")
        for est in estimates:
            fp.write(
                f"{est.snr_db!r},{est.c_hat!r},{est.std_err!r},{est.samples},{sweep.seed}\n"
            )
    finally:
        if owned:
            fp.close()
