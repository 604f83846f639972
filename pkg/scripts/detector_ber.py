#!/usr/bin/env python3
"""Desk-scale BER comparison: MLD, DOSCD at several check depths, the
LMMSE baseline, and the rate-matched single-antenna benchmark.

Writes one CSV per curve into --out-dir; columns match `smotfs ber`.
"""

import argparse
from pathlib import Path

from smotfs import FrameConfig, SweepConfig, run_ber_sweep, simo_baseline


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results", type=Path)
    ap.add_argument("--seed", default=2024, type=int)
    ap.add_argument("--workers", default=2, type=int)
    ap.add_argument("--snr-start", default=4.0, type=float)
    ap.add_argument("--snr-stop", default=16.0, type=float)
    ap.add_argument("--snr-step", default=2.0, type=float)
    ap.add_argument("--min-trials", default=2000, type=int)
    ap.add_argument("--target-errors", default=200, type=int)
    ap.add_argument("--max-trials", default=100_000, type=int)
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    grid = []
    v = args.snr_start
    while v <= args.snr_stop + 1e-9:
        grid.append(v)
        v += args.snr_step

    sm_frame = FrameConfig(m=2, n=2, n_t=2, n_r=2, q=4, p=2)
    common = dict(
        snr_db=tuple(grid),
        min_trials=args.min_trials,
        target_errors=args.target_errors,
        max_trials=args.max_trials,
        seed=args.seed,
        workers=args.workers,
    )

    runs = [
        ("sm_mld", SweepConfig(frame=sm_frame, detector="mld", **common)),
        ("sm_doscd_t16", SweepConfig(frame=sm_frame, detector="doscd", theta=1.0, **common)),
        ("sm_doscd_t8", SweepConfig(frame=sm_frame, detector="doscd", theta=0.5, **common)),
        ("sm_doscd_t4", SweepConfig(frame=sm_frame, detector="doscd", theta=0.25, **common)),
        ("sm_lmmse", SweepConfig(frame=sm_frame, detector="lmmse", **common)),
    ]
    # same 3 bits/s/Hz carried by a single antenna and an 8-ary alphabet
    simo_frame = FrameConfig(m=2, n=2, n_t=1, n_r=2, q=8, p=2)
    simo = simo_baseline(
        SweepConfig(frame=simo_frame, **common), sm_rate=sm_frame.rate
    )
    runs.append(("simo_mld", simo))

    for name, sweep in runs:
        out = args.out_dir / f"{name}.csv"
        print(f"== {name} -> {out}")
        run_ber_sweep(sweep, out=str(out), progress=True)


if __name__ == "__main__":
    main()
