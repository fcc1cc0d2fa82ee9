"""Command-line entry point: ``colordecoder {info,decode,sweep,threshold}``.

Bitstrings list qubits square by square (``y`` outer, ``x`` inner, lower
triangle before upper) and checks row by row (``y`` outer, ``x`` inner).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .decoder import DecoderConfig, decode
from .lattice import build_hierarchy
from .montecarlo import estimate_threshold, sample_error, sweep

CSV_HEADER = ["m", "L", "n", "p", "trials", "failures", "rate", "ci_lo", "ci_hi", "mode", "bp_iters", "split_rounds", "seed"]


class CLIError(Exception):
    pass


def parse_bits(text: str, length: int, what: str) -> np.ndarray:
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise CLIError(f"{what} must be a string of 0s and 1s")
    if len(text) != length:
        raise CLIError(f"{what} has length {len(text)}, expected {length}")
    return np.frombuffer(text.encode(), dtype=np.uint8) - ord("0")


def format_bits(bits) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CLIError(f"bad integer list {text!r}") from None


def parse_grid(text: str) -> list[float]:
    """``LO:HI:STEP`` inclusive of HI (up to rounding)."""
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise CLIError(f"bad p-grid {text!r}, expected LO:HI:STEP") from None
    if step <= 0 or hi < lo:
        raise CLIError(f"bad p-grid {text!r}: need STEP > 0 and HI >= LO")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    ps = [round(lo + i * step, 10) for i in range(count)]
    for p in ps:
        if not 0.0 <= p <= 0.5:
            raise CLIError(f"p={p} outside [0, 0.5]")
    return ps


def _fmt(x: float) -> str:
    return format(x, ".10g")


def _config(args) -> DecoderConfig:
    return DecoderConfig(
        mode=args.mode,
        bp_iters=args.bp_iters,
        split_rounds=args.split_rounds,
        split_rule=args.split_rule,
        corner_lookahead=not args.no_corner_lookahead,
    )


def cmd_info(args, out) -> int:
    if args.m < 0:
        raise CLIError("m must be nonnegative")
    json.dump(build_hierarchy(args.m).info(), out)
    out.write("\n")
    return 0


def cmd_decode(args, out) -> int:
    if args.m < 0:
        raise CLIError("m must be nonnegative")
    if not 0.0 < args.p <= 0.5:
        raise CLIError(f"p must lie in (0, 0.5], got {args.p}")
    if args.error is not None and args.syndrome is not None:
        raise CLIError("give at most one of --error and --syndrome")
    top = build_hierarchy(args.m).top
    rng = np.random.default_rng(args.seed)
    truth = None
    if args.syndrome is not None:
        s = parse_bits(args.syndrome, top.num_checks, "syndrome")
    else:
        if args.error is not None:
            truth = parse_bits(args.error, top.n, "error")
        else:
            truth = sample_error(top.n, args.p, rng)
        s = top.syndrome_of(truth)
    config = _config(args)
    try:
        result = decode(args.m, s, args.p, config, rng)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    record = {
        "m": args.m,
        "mode": config.mode,
        "syndrome": format_bits(s),
        "estimate": format_bits(result.estimate),
        "split_counts": result.split_counts(),
    }
    if truth is not None:
        residual = truth ^ result.estimate
        record["error"] = format_bits(truth)
        record["success"] = bool(not top.logical_class(residual).any())
    json.dump(record, out)
    out.write("\n")
    return 0


def cmd_sweep(args, out) -> int:
    ms = parse_int_list(args.m)
    if not ms or min(ms) < 0:
        raise CLIError("--m needs nonnegative integers")
    ps = parse_grid(args.p_grid)
    if args.trials < 1:
        raise CLIError("--trials must be at least 1")
    stats = sweep(ms, ps, args.trials, args.seed, args.workers, _config(args))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for st in stats:
            lo, hi = st.interval
            w.writerow(
                [st.m, st.L, st.n, _fmt(st.p), st.trials, st.failures, _fmt(st.rate), _fmt(lo), _fmt(hi),
                 st.mode, st.bp_iters, st.split_rounds, st.seed]
            )
    return 0


def read_curves(path: str) -> dict:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise CLIError(f"{path} does not have the sweep CSV header")
        curves: dict[int, list[tuple[float, float]]] = {}
        for row in reader:
            curves.setdefault(int(row["m"]), []).append((float(row["p"]), float(row["rate"])))
    return {m: sorted(v) for m, v in curves.items()}


def cmd_threshold(args, out) -> int:
    curves = read_curves(args.input)
    try:
        p_th, spread, pairs = estimate_threshold(curves)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    json.dump({"p_th": p_th, "spread": spread, "pairs": pairs}, out)
    out.write("\n")
    return 0


def _add_decoder_flags(sp):
    sp.add_argument("--mode", choices=["soft", "hard"], default="soft")
    sp.add_argument("--bp-iters", type=int, default=2)
    sp.add_argument("--split-rounds", type=int, default=3)
    sp.add_argument("--split-rule", choices=["ml", "sampled"], default="ml")
    sp.add_argument("--no-corner-lookahead", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="colordecoder", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("info", help="print the lattice hierarchy as JSON")
    sp.add_argument("--m", type=int, required=True)
    sp.set_defaults(func=cmd_info)

    sp = sub.add_parser("decode", help="decode one error or syndrome")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--error")
    sp.add_argument("--syndrome")
    sp.add_argument("--seed", type=int, default=0)
    _add_decoder_flags(sp)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("sweep", help="Monte Carlo failure rates to CSV")
    sp.add_argument("--m", required=True, help="comma-separated sizes, e.g. 1,2,3")
    sp.add_argument("--p-grid", required=True, help="LO:HI:STEP, inclusive")
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", required=True)
    _add_decoder_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("threshold", help="estimate the crossing point from a sweep CSV")
    sp.add_argument("--in", dest="input", required=True)
    sp.set_defaults(func=cmd_threshold)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CLIError as exc:
        print(f"colordecoder {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
