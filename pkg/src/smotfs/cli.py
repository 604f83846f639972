"""Command-line front end.

Subcommands: ber, capacity, channel-dump, complexity.  Every flag can
also be given in a flat key = value config file (--config); explicit
flags win over file entries.  Exit codes: 0 success, 2 configuration
error, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .channel import dump_channel, sample_paths
from .config import FrameConfig
from .detectors import complexity_model, depth_from_theta
from .errors import BudgetExceededError, SmOtfsError
from .sweep import SweepConfig, run_ber_sweep, run_capacity_sweep

_TYPES = {
    "m": int, "n": int, "nt": int, "nr": int, "q": int, "p": int,
    "constellation": str, "detector": str, "td": int, "theta": float,
    "snr_start": float, "snr_stop": float, "snr_step": float,
    "seed": int, "out": str, "min_trials": int, "target_errors": int,
    "max_trials": int, "workers": int, "samples": int, "tmp": int,
}

_DEFAULTS = {
    "m": 2, "n": 2, "nt": 2, "nr": 2, "q": 4, "p": 2,
    "constellation": "qam", "detector": "doscd", "td": None, "theta": None,
    "snr_start": 10.0, "snr_stop": 10.0, "snr_step": 2.0,
    "seed": 0, "out": "-", "min_trials": 10_000, "target_errors": 200,
    "max_trials": 1_000_000, "workers": 1, "samples": 2_000, "tmp": 10,
}


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path) as fp:
        for lineno, raw in enumerate(fp, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SmOtfsError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _TYPES:
                raise SmOtfsError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _TYPES[key](val.strip())
            except ValueError as exc:
                raise SmOtfsError(f"{path}:{lineno}: {exc}") from None
    return values


def _resolve(args: argparse.Namespace, keys: list) -> dict:
    """Merge precedence: explicit flag > config file > built-in default."""
    file_values = _load_config_file(args.config) if getattr(args, "config", None) else {}
    out = {}
    for key in keys:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            out[key] = cli_val
        elif key in file_values:
            out[key] = file_values[key]
        else:
            out[key] = _DEFAULTS[key]
    return out


def _add_frame_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--m", type=int, help="subcarriers (delay bins)")
    p.add_argument("--n", type=int, help="time slots (Doppler bins)")
    p.add_argument("--nt", type=int, help="transmit antennas (power of two)")
    p.add_argument("--nr", type=int, help="receive antennas")
    p.add_argument("--q", type=int, help="constellation order (power of two)")
    p.add_argument("--p", type=int, help="channel path count")
    p.add_argument("--constellation", choices=("qam", "psk"))


def _add_snr_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--snr-start", dest="snr_start", type=float, help="grid start, dB")
    p.add_argument("--snr-stop", dest="snr_stop", type=float, help="grid stop, dB")
    p.add_argument("--snr-step", dest="snr_step", type=float, help="grid step, dB")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="output path, '-' for stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smotfs",
        description="SM-OTFS link simulation over doubly-selective delay-Doppler channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ber = sub.add_parser("ber", help="bit-error-rate sweep")
    _add_frame_flags(ber)
    _add_snr_flags(ber)
    ber.add_argument("--detector", choices=("mld", "doscd", "lmmse"))
    ber.add_argument("--theta", type=float, help="check depth as a fraction of all patterns")
    ber.add_argument("--td", type=int, help="check depth as a pattern count")
    ber.add_argument("--min-trials", dest="min_trials", type=int)
    ber.add_argument("--target-errors", dest="target_errors", type=int)
    ber.add_argument("--max-trials", dest="max_trials", type=int)
    ber.add_argument("--workers", type=int)
    ber.add_argument("--progress", action="store_true")

    cap = sub.add_parser("capacity", help="DCMC capacity sweep")
    _add_frame_flags(cap)
    _add_snr_flags(cap)
    cap.add_argument("--samples", type=int, help="Monte-Carlo draws per SNR point")
    cap.add_argument("--workers", type=int)
    cap.add_argument("--progress", action="store_true")

    dump = sub.add_parser("channel-dump", help="serialize one channel realization")
    _add_frame_flags(dump)
    dump.add_argument("--seed", type=int)
    dump.add_argument("--out", help="output path, '-' for stdout")

    comp = sub.add_parser("complexity", help="analytic operation counts")
    _add_frame_flags(comp)
    comp.add_argument("--detector", choices=("mld", "doscd", "mpd"))
    comp.add_argument("--theta", type=float)
    comp.add_argument("--td", type=int)
    comp.add_argument("--tmp", type=int, help="message-passing iteration count")
    return parser


def _frame_from(vals: dict) -> FrameConfig:
    return FrameConfig(
        m=vals["m"], n=vals["n"], n_t=vals["nt"], n_r=vals["nr"],
        q=vals["q"], p=vals["p"],
    )


def _snr_grid(vals: dict) -> tuple:
    start, stop, step = vals["snr_start"], vals["snr_stop"], vals["snr_step"]
    if stop < start:
        raise SmOtfsError(f"snr-stop {stop} below snr-start {start}")
    if step <= 0:
        raise SmOtfsError(f"snr-step must be positive, got {step}")
    grid = []
    i = 0
    while start + i * step <= stop + 1e-9:
        grid.append(start + i * step)
        i += 1
    return tuple(grid)


def _out_stream(spec: str):
    return sys.stdout if spec == "-" else open(spec, "w", newline="")


def _cmd_ber(args) -> int:
    vals = _resolve(args, [
        "m", "n", "nt", "nr", "q", "p", "constellation", "detector",
        "theta", "td", "snr_start", "snr_stop", "snr_step", "seed", "out",
        "min_trials", "target_errors", "max_trials", "workers",
    ])
    if args.theta is not None and args.td is not None:
        raise SmOtfsError("give either --theta or --td, not both")
    sweep = SweepConfig(
        frame=_frame_from(vals),
        detector=vals["detector"],
        constellation=vals["constellation"],
        t_d=vals["td"],
        theta=vals["theta"],
        snr_db=_snr_grid(vals),
        min_trials=vals["min_trials"],
        target_errors=vals["target_errors"],
        max_trials=vals["max_trials"],
        seed=vals["seed"],
        workers=vals["workers"],
    )
    fp = _out_stream(vals["out"])
    try:
        run_ber_sweep(sweep, out=fp, progress=args.progress)
    finally:
        if fp is not sys.stdout:
            fp.close()
    return 0


def _cmd_capacity(args) -> int:
    vals = _resolve(args, [
        "m", "n", "nt", "nr", "q", "p", "constellation",
        "snr_start", "snr_stop", "snr_step", "seed", "out", "samples", "workers",
    ])
    sweep = SweepConfig(
        frame=_frame_from(vals),
        detector="mld",
        constellation=vals["constellation"],
        snr_db=_snr_grid(vals),
        samples=vals["samples"],
        seed=vals["seed"],
        workers=vals["workers"],
    )
    fp = _out_stream(vals["out"])
    try:
        run_capacity_sweep(sweep, out=fp, progress=args.progress)
    finally:
        if fp is not sys.stdout:
            fp.close()
    return 0


def _cmd_channel_dump(args) -> int:
    vals = _resolve(args, ["m", "n", "nt", "nr", "q", "p", "seed", "out"])
    cfg = _frame_from(vals)
    rng = np.random.default_rng(vals["seed"])
    paths = sample_paths(cfg, rng)
    fp = _out_stream(vals["out"])
    try:
        dump_channel(paths, cfg, vals["seed"], fp)
    finally:
        if fp is not sys.stdout:
            fp.close()
    return 0


def _cmd_complexity(args) -> int:
    vals = _resolve(args, ["m", "n", "nt", "nr", "q", "p", "detector", "theta", "td", "tmp"])
    cfg = _frame_from(vals)
    kind = vals["detector"]
    t_d = None
    if kind == "doscd":
        if vals["td"] is not None:
            t_d = vals["td"]
        elif vals["theta"] is not None:
            t_d = depth_from_theta(vals["theta"], cfg)
        else:
            raise SmOtfsError("doscd complexity needs --td or --theta")
    print(complexity_model(kind, cfg, t_d=t_d, t_mp=vals["tmp"]))
    return 0


_COMMANDS = {
    "ber": _cmd_ber,
    "capacity": _cmd_capacity,
    "channel-dump": _cmd_channel_dump,
    "complexity": _cmd_complexity,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SmOtfsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
