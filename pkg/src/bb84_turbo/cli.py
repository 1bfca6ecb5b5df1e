"""``bb84-turbo``: sweep the eavesdropping probability and write a CSV."""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import yaml

from .harness import ExperimentConfig, emit_csv, run_sweep
from .turbo import TurboConfig

log = logging.getLogger("bb84_turbo")

# flag dest -> default; config-file keys use the same names (dashes or underscores)
DEFAULTS = {
    "s_min": 0.0,
    "s_max": 1.0,
    "s_steps": 11,
    "photons": ExperimentConfig.photon_count,
    "disclose_fraction": 0.1,
    "block_size": 1000,
    "iterations": 20,
    "rows": None,
    "cols": None,
    "llr_clamp": 25.0,
    "seed": 0,
    "output": "sweep.csv",
    "clamp_plots": False,
    "workers": 1,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bb84-turbo",
        description="BB84 intercept-resend sweep with turbo-code reconciliation; writes one CSV row per s value.",
    )
    p.add_argument("--config", type=Path, help="YAML file of key: value pairs named like the flags")
    p.add_argument("--s-min", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("--s-steps", type=int)
    p.add_argument("--photons", type=int, help="photons sent per sweep point (default 23000)")
    p.add_argument("--disclose-fraction", type=float, help="fraction of the sifted key sacrificed for QBER estimation")
    p.add_argument("--block-size", type=int, help="turbo block length N")
    p.add_argument("--iterations", type=int, help="decoder iterations")
    p.add_argument("--rows", type=int, help="interleaver rows (default 25 when N=1000)")
    p.add_argument("--cols", type=int, help="interleaver columns (default N/rows)")
    p.add_argument("--llr-clamp", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", "-o", help="CSV output path")
    p.add_argument("--clamp-plots", action="store_true", default=None, help="floor the i_s column at 0")
    p.add_argument("--workers", type=int, help="processes for sweep points (output is identical)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _load_config_file(path: Path) -> dict:
    with path.open() as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping of option names to values")
    out = {}
    for key, value in data.items():
        name = str(key).replace("-", "_")
        if name not in DEFAULTS:
            raise ValueError(f"{path}: unknown option {key!r}")
        out[name] = value
    return out


def _interleaver_shape(n: int, rows, cols) -> tuple[int, int]:
    if rows is None and cols is None:
        if n == 1000:
            return 25, 40
        # most square factorisation
        rows = max(r for r in range(1, int(n**0.5) + 1) if n % r == 0)
        return rows, n // rows
    if rows is None:
        rows = n // cols
    if cols is None:
        cols = n // rows
    return int(rows), int(cols)


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    opts = dict(DEFAULTS)
    if args.config is not None:
        opts.update(_load_config_file(args.config))
    for name in DEFAULTS:
        value = getattr(args, name, None)
        if value is not None:
            opts[name] = value

    n = int(opts["block_size"])
    rows, cols = _interleaver_shape(n, opts["rows"], opts["cols"])
    turbo = TurboConfig(
        block_length=n,
        interleaver_rows=rows,
        interleaver_cols=cols,
        iterations=int(opts["iterations"]),
        llr_clamp=float(opts["llr_clamp"]),
    )
    return ExperimentConfig(
        s_min=float(opts["s_min"]),
        s_max=float(opts["s_max"]),
        s_steps=int(opts["s_steps"]),
        photon_count=int(opts["photons"]),
        disclose_fraction=float(opts["disclose_fraction"]),
        turbo=turbo,
        seed=int(opts["seed"]),
        output_path=str(opts["output"]),
        clamp_plots=bool(opts["clamp_plots"]),
        workers=int(opts["workers"]),
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = config_from_args(args)
    except (ValueError, TypeError, OSError, yaml.YAMLError) as exc:
        parser.print_usage(sys.stderr)
        print(f"bb84-turbo: error: {exc}", file=sys.stderr)
        return 2

    try:
        start = time.perf_counter()
        records = run_sweep(config)
        emit_csv(records, config.output_path)
    except (ValueError, OSError) as exc:
        print(f"bb84-turbo: error: {exc}", file=sys.stderr)
        return 1
    log.info("wrote %d rows to %s in %.1fs", len(records), config.output_path, time.perf_counter() - start)
    return 0


if __name__ == "__main__":
    sys.exit(main())
