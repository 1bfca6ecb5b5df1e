"""Sweep driver: full protocol plus reconciliation at each eavesdropping level."""
from __future__ import annotations

import csv
import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import metrics
from .bb84 import ChannelParams, estimate_qber, protocol_streams, run_protocol, sift
from .reconciliation import reconcile_key, reconciliation_efficiency
from .turbo import TurboConfig

CSV_COLUMNS = (
    "s",
    "qber_empirical",
    "qber_theoretical",
    "i_ab",
    "i_ae",
    "i_s",
    "sifted_length",
    "residual_ber",
    "disclosed_bits",
    "efficiency",
)


@dataclass(frozen=True)
class ExperimentConfig:
    s_min: float = 0.0
    s_max: float = 1.0
    s_steps: int = 11
    # ~11500 sifted bits, ~10350 after a 10% disclosure: ten N=1000 blocks
    photon_count: int = 23_000
    disclose_fraction: float = 0.1
    turbo: TurboConfig = field(default_factory=TurboConfig)
    seed: int = 0
    output_path: str = "sweep.csv"
    clamp_plots: bool = False
    workers: int = 1

    def __post_init__(self):
        if not (0.0 <= self.s_min <= self.s_max <= 1.0):
            raise ValueError(f"need 0 <= s_min <= s_max <= 1, got [{self.s_min}, {self.s_max}]")
        if self.s_steps < 1:
            raise ValueError("s_steps must be >= 1")
        if self.photon_count < 1:
            raise ValueError("photon_count must be >= 1")
        if not 0.0 < self.disclose_fraction < 1.0:
            raise ValueError("disclose_fraction must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def s_values(self) -> np.ndarray:
        return np.linspace(self.s_min, self.s_max, self.s_steps)


@dataclass(frozen=True)
class SweepRecord:
    s: float
    qber_empirical: float
    qber_theoretical: float
    i_ab: float
    i_ae: float
    i_s: float
    sifted_length: int
    residual_ber: Optional[float]
    disclosed_bits: int
    efficiency: Optional[float]


def run_point(s: float, config: ExperimentConfig, index: int = 0) -> SweepRecord:
    """One protocol run at eavesdropping probability ``s``.

    The random streams depend only on ``(config.seed, index)``. The
    ``qber_empirical`` column is the disagreement rate over the whole sifted
    key; the decoder is fed the sampled public estimate instead.
    """
    s = float(s)
    streams = protocol_streams(config.seed, index)
    record = run_protocol(ChannelParams(s, config.photon_count, config.seed), streams)
    pair = sift(record)
    qber_estimate, remaining = estimate_qber(pair, config.disclose_fraction, streams["sampling"])

    point = metrics.security_point(s)
    i_s = max(point.i_s, 0.0) if config.clamp_plots else point.i_s

    residual_ber = efficiency = None
    disclosed = 0
    if len(remaining) >= config.turbo.block_length:
        result = reconcile_key(remaining, qber_estimate, config.turbo)
        residual_ber = result.residual_ber
        disclosed = result.disclosed_bits
        efficiency = reconciliation_efficiency(disclosed, len(result.corrected_key), result.qber_used)

    return SweepRecord(
        s=s,
        qber_empirical=pair.error_rate,
        qber_theoretical=point.pe,
        i_ab=point.i_ab,
        i_ae=point.i_ae,
        i_s=i_s,
        sifted_length=len(pair),
        residual_ber=residual_ber,
        disclosed_bits=disclosed,
        efficiency=efficiency,
    )


def _run_indexed(args: tuple[int, float, ExperimentConfig]) -> SweepRecord:
    index, s, config = args
    return run_point(s, config, index)


def run_sweep(config: ExperimentConfig) -> list[SweepRecord]:
    jobs = [(i, float(s), config) for i, s in enumerate(config.s_values())]
    if config.workers == 1:
        return [_run_indexed(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(_run_indexed, jobs))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.6f}"


def format_row(record: SweepRecord) -> list[str]:
    return [_fmt(getattr(record, name)) for name in CSV_COLUMNS]


def emit_csv(records: Sequence[SweepRecord], path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for rec in records:
                writer.writerow(format_row(rec))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc


assert CSV_COLUMNS == tuple(f.name for f in dataclasses.fields(SweepRecord))
