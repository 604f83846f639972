#!/usr/bin/env python3
"""Analytic detection-complexity table at the full frame dimensions
(M=8, N=4), where exhaustive search is far beyond reach and the numbers
are exact big integers."""

import argparse

from smotfs import FrameConfig, complexity_model, depth_from_theta


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", default=8, type=int)
    ap.add_argument("--n", default=4, type=int)
    ap.add_argument("--nt", default=2, type=int)
    ap.add_argument("--nr", default=2, type=int)
    ap.add_argument("--q", default=4, type=int)
    ap.add_argument("--tmp", default=10, type=int)
    args = ap.parse_args()

    cfg = FrameConfig(m=args.m, n=args.n, n_t=args.nt, n_r=args.nr, q=args.q, p=4)
    rows = [("mld", complexity_model("mld", cfg))]
    for theta in (2 / 8, 3 / 8, 5 / 8, 1.0):
        t_d = depth_from_theta(theta, cfg)
        rows.append((f"doscd theta={theta:g}", complexity_model("doscd", cfg, t_d=t_d)))
    rows.append((f"mpd t_mp={args.tmp}", complexity_model("mpd", cfg, t_mp=args.tmp)))

    width = max(len(name) for name, _ in rows)
    for name, ops in rows:
        print(f"{name:<{width}}  {ops:>32d}  (~1e{len(str(ops)) - 1})")


if __name__ == "__main__":
    main()
