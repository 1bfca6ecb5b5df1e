"""BB84 quantum phase: preparation, intercept-resend attack, measurement, sifting.

Photon sequences are held column-wise in :class:`PhotonBatch` (two uint8 arrays)
so a run of 10^5 photons is a handful of numpy operations. The channel is
noiseless; every sifted-key error comes from the eavesdropper.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

import numpy as np

# Order in which a run's sub-streams are handed out by `protocol_streams`.
STREAM_ORDER = ("alice", "eve", "bob", "sampling")


class Basis(enum.IntEnum):
    RECTILINEAR = 0  # 0 deg -> 0, 90 deg -> 1
    DIAGONAL = 1  # 45 deg -> 0, 135 deg -> 1


_POLARIZATION = {
    (Basis.RECTILINEAR, 0): 0,
    (Basis.RECTILINEAR, 1): 90,
    (Basis.DIAGONAL, 0): 45,
    (Basis.DIAGONAL, 1): 135,
}


@dataclass(frozen=True)
class PhotonState:
    basis: Basis
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {self.bit!r}")
        object.__setattr__(self, "basis", Basis(self.basis))

    @property
    def polarization(self) -> int:
        """Polarization angle in degrees."""
        return _POLARIZATION[(self.basis, self.bit)]


@dataclass(frozen=True)
class PhotonBatch:
    """A sequence of photons stored as parallel ``bases`` / ``bits`` arrays."""

    bases: np.ndarray
    bits: np.ndarray

    def __post_init__(self):
        bases = np.asarray(self.bases, dtype=np.uint8)
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bases.shape != bits.shape or bases.ndim != 1:
            raise ValueError("bases and bits must be 1-D arrays of equal length")
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_states(cls, states) -> "PhotonBatch":
        states = list(states)
        return cls(
            np.array([int(p.basis) for p in states], dtype=np.uint8),
            np.array([p.bit for p in states], dtype=np.uint8),
        )

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i: int) -> PhotonState:
        return PhotonState(Basis(int(self.bases[i])), int(self.bits[i]))

    def __iter__(self) -> Iterator[PhotonState]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PhotonBatch):
            return NotImplemented
        return np.array_equal(self.bases, other.bases) and np.array_equal(self.bits, other.bits)


@dataclass(frozen=True)
class TransmissionRecord:
    alice_bits: np.ndarray
    alice_bases: np.ndarray
    bob_bits: np.ndarray
    bob_bases: np.ndarray
    eavesdropped_flags: np.ndarray

    def __len__(self) -> int:
        return len(self.alice_bits)


@dataclass(frozen=True)
class SiftedKeyPair:
    alice_key: np.ndarray
    bob_key: np.ndarray

    def __post_init__(self):
        if len(self.alice_key) != len(self.bob_key):
            raise ValueError("sifted keys must have equal length")

    def __len__(self) -> int:
        return len(self.alice_key)

    @property
    def error_rate(self) -> float:
        if len(self) == 0:
            return 0.0
        return float(np.mean(self.alice_key != self.bob_key))


@dataclass(frozen=True)
class ChannelParams:
    s: float
    photon_count: int
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"s must lie in [0, 1], got {self.s}")
        if self.photon_count < 1:
            raise ValueError(f"photon_count must be >= 1, got {self.photon_count}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def protocol_streams(seed: int, *key: int) -> dict[str, np.random.Generator]:
    """Independent generators for one protocol run, spawned in fixed order.

    Extra ``key`` integers (e.g. a sweep point index) select a distinct run
    under the same master seed.
    """
    ss = np.random.SeedSequence([seed, *key])
    return {name: np.random.default_rng(child) for name, child in zip(STREAM_ORDER, ss.spawn(len(STREAM_ORDER)))}


def random_bases(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def alice_prepare(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, PhotonBatch]:
    """Draw ``n`` random bits and bases and encode them as photons."""
    if n < 1:
        raise ValueError(f"photon count must be >= 1, got {n}")
    bits = rng.integers(0, 2, size=n, dtype=np.uint8)
    bases = random_bases(n, rng)
    return bits, bases, PhotonBatch(bases.copy(), bits.copy())


def measure_photon(photon: PhotonState, basis: Basis, rng: np.random.Generator) -> int:
    if Basis(basis) == photon.basis:
        return photon.bit
    return int(rng.integers(0, 2))


def _measure_batch(photons: PhotonBatch, bases: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # vectorized measure_photon; a coin is drawn for every photon so stream use is data-independent
    coins = rng.integers(0, 2, size=len(photons), dtype=np.uint8)
    return np.where(bases == photons.bases, photons.bits, coins).astype(np.uint8)


def eve_intercept_resend(
    photons: PhotonBatch, s: float, rng: np.random.Generator
) -> tuple[PhotonBatch, np.ndarray]:
    """Intercept each photon independently with probability ``s``.

    An intercepted photon is measured in a random basis and re-sent as
    ``(eve_basis, eve_outcome)``. Returns the forwarded photons and the
    interception flags.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    n = len(photons)
    flags = rng.random(n) < s
    eve_bases = random_bases(n, rng)
    eve_bits = _measure_batch(photons, eve_bases, rng)
    forwarded = PhotonBatch(
        np.where(flags, eve_bases, photons.bases),
        np.where(flags, eve_bits, photons.bits),
    )
    return forwarded, flags


def bob_measure(photons: PhotonBatch, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    bases = random_bases(len(photons), rng)
    return _measure_batch(photons, bases, rng), bases


def sift(record: TransmissionRecord) -> SiftedKeyPair:
    n = len(record.alice_bits)
    lengths = {len(record.alice_bases), len(record.bob_bits), len(record.bob_bases), len(record.eavesdropped_flags)}
    if lengths != {n}:
        raise ValueError("transmission record sequences have inconsistent lengths")
    keep = np.asarray(record.alice_bases) == np.asarray(record.bob_bases)
    return SiftedKeyPair(
        np.asarray(record.alice_bits, dtype=np.uint8)[keep],
        np.asarray(record.bob_bits, dtype=np.uint8)[keep],
    )


def estimate_qber(
    pair: SiftedKeyPair, disclose_fraction: float, rng: np.random.Generator
) -> tuple[float, SiftedKeyPair]:
    """Publicly compare a random sample of the sifted key.

    The sampled positions are removed from the returned pair since they are
    now known to everyone.
    """
    if not 0.0 < disclose_fraction < 1.0:
        raise ValueError(f"disclose_fraction must lie in (0, 1), got {disclose_fraction}")
    length = len(pair)
    if length < 10:
        raise ValueError(f"sifted key too short for QBER estimation: {length} < 10")
    k = max(1, int(round(disclose_fraction * length)))
    sample = rng.choice(length, size=k, replace=False)
    qber = float(np.mean(pair.alice_key[sample] != pair.bob_key[sample]))
    keep = np.ones(length, dtype=bool)
    keep[sample] = False
    return qber, SiftedKeyPair(pair.alice_key[keep], pair.bob_key[keep])


def run_protocol(params: ChannelParams, streams: dict[str, np.random.Generator] | None = None) -> TransmissionRecord:
    """Quantum phase of one run: prepare, (maybe) intercept, measure."""
    if streams is None:
        streams = protocol_streams(params.seed)
    bits, bases, photons = alice_prepare(params.photon_count, streams["alice"])
    forwarded, flags = eve_intercept_resend(photons, params.s, streams["eve"])
    bob_bits, bob_bases = bob_measure(forwarded, streams["bob"])
    return TransmissionRecord(bits, bases, bob_bits, bob_bases, flags)
