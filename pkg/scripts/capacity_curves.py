#!/usr/bin/env python3
"""DCMC capacity curves for (n_t, n_r, 4) antenna settings at desk scale.

One CSV per (n_t, n_r) pair; the high-SNR asymptote is log2(4*n_t)
regardless of n_r, while extra receive antennas help at low SNR.
"""

import argparse
from pathlib import Path

from smotfs import FrameConfig, SweepConfig, capacity_upper_bound, run_capacity_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results", type=Path)
    ap.add_argument("--seed", default=2024, type=int)
    ap.add_argument("--workers", default=2, type=int)
    ap.add_argument("--samples", default=600, type=int)
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    grid = tuple(float(v) for v in range(-20, 32, 4))
    for n_t in (2, 4):
        for n_r in (2, 4):
            frame = FrameConfig(m=2, n=1, n_t=n_t, n_r=n_r, q=4, p=2)
            sweep = SweepConfig(
                frame=frame,
                detector="mld",
                snr_db=grid,
                samples=args.samples,
                seed=args.seed,
                workers=args.workers,
            )
            out = args.out_dir / f"capacity_nt{n_t}_nr{n_r}.csv"
            print(f"== ({n_t},{n_r},4) bound {capacity_upper_bound(frame)} -> {out}")
            run_capacity_sweep(sweep, out=str(out), progress=True)


if __name__ == "__main__":
    main()
