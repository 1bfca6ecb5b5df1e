"""Turbo-code reconciliation of sifted keys.

Alice encodes each N-bit block of her key and publishes both parity streams
over the authenticated public channel. Bob treats his own block as a noisy
copy of Alice's systematic bits and decodes. Every disclosed parity bit is
counted as leaked to Eve.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bb84 import SiftedKeyPair
from .metrics import binary_entropy
from .turbo import LlrBlock, TurboConfig, bsc_llr, turbo_decode, turbo_encode

QBER_FLOOR = 1e-3


@dataclass(frozen=True)
class ReconciliationResult:
    corrected_key: np.ndarray
    residual_errors: int
    disclosed_bits: int
    blocks_processed: int
    qber_used: float

    @property
    def residual_ber(self) -> float:
        n = len(self.corrected_key)
        return self.residual_errors / n if n else 0.0


def _check_qber(qber: float) -> float:
    if not 0.0 <= qber < 0.5:
        raise ValueError(f"qber must lie in [0, 0.5), got {qber}")
    return max(qber, QBER_FLOOR)


def _decode_blocks(alice: np.ndarray, bob: np.ndarray, crossover: float, config: TurboConfig,
                   parity_clamp: float | None) -> np.ndarray:
    cw = turbo_encode(alice, config)
    # the public channel is noiseless: parity LLRs sit at full confidence
    conf = config.llr_clamp if parity_clamp is None else parity_clamp
    llrs = LlrBlock(
        systematic_llr=bsc_llr(bob, crossover, config.llr_clamp),
        parity1_llr=np.where(cw.parity1 == 0, conf, -conf),
        parity2_llr=np.where(cw.parity2 == 0, conf, -conf),
    )
    decoded, _ = turbo_decode(llrs, config)
    return decoded


def reconcile_block(alice_block, bob_block, qber: float, config: TurboConfig,
                    parity_clamp: float | None = None) -> tuple[np.ndarray, int]:
    """Correct Bob's block toward Alice's; returns (corrected block, disclosed bit count).

    ``parity_clamp`` overrides the confidence given to disclosed parity bits
    (defaults to ``config.llr_clamp``).
    """
    alice = np.asarray(alice_block, dtype=np.uint8)
    bob = np.asarray(bob_block, dtype=np.uint8)
    n = config.block_length
    if alice.shape != (n,) or bob.shape != (n,):
        raise ValueError(f"blocks must both have length {n}, got {alice.shape} and {bob.shape}")
    crossover = _check_qber(qber)
    return _decode_blocks(alice, bob, crossover, config, parity_clamp), 2 * n


def reconcile_key(pair: SiftedKeyPair, qber: float, config: TurboConfig,
                  parity_clamp: float | None = None) -> ReconciliationResult:
    """Reconcile whole N-bit blocks of a sifted key; a trailing partial block is dropped.

    All blocks go through the decoder as one batch.
    """
    n = config.block_length
    n_blocks = len(pair) // n
    if n_blocks == 0:
        raise ValueError(f"sifted key of length {len(pair)} is shorter than one block ({n})")
    crossover = _check_qber(qber)
    alice = np.asarray(pair.alice_key[: n_blocks * n], dtype=np.uint8).reshape(n_blocks, n)
    bob = np.asarray(pair.bob_key[: n_blocks * n], dtype=np.uint8).reshape(n_blocks, n)
    corrected = _decode_blocks(alice, bob, crossover, config, parity_clamp)
    return ReconciliationResult(
        corrected_key=corrected.reshape(-1),
        residual_errors=int(np.count_nonzero(corrected != alice)),
        disclosed_bits=2 * n * n_blocks,
        blocks_processed=n_blocks,
        qber_used=crossover,
    )


def reconciliation_efficiency(disclosed_bits: int, key_bits: int, qber: float) -> float:
    """Leakage relative to the Shannon minimum ``key_bits * h(qber)``; 1.0 is optimal."""
    if key_bits <= 0:
        raise ValueError("key_bits must be positive")
    if not 0.0 < qber < 0.5:
        raise ValueError(f"efficiency is undefined for qber={qber}; need 0 < qber < 0.5")
    return disclosed_bits / (key_bits * binary_entropy(qber))
