"""Rate-1/3 turbo code: two 4-state RSC encoders, row-column interleaver,
iterative MAX-Log-MAP decoding.

Generator convention: each polynomial is three taps read MSB-first from its
octal form over (D^0, D, D^2). With a[k] the bit shifted into the register,
the feedback taps give a[k] = u[k] ^ fb1*a[k-1] ^ fb2*a[k-2] and the parity is
a[k] ^ fw1*a[k-1] ^ fw2*a[k-2]: the feedback bit is always the forward
polynomial's lowest-order term. Octal (5, 3) therefore yields feedback 1 + D^2
and parity a[k] ^ a[k-1] ^ a[k-2].

Every array function accepts a single block of shape (N,) or a batch (B, N).
LLR sign convention: positive favours bit 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np

N_STATES = 4
# Effectively -inf for unreachable start states, kept finite so sums never give nan.
_NEG = -1e9


def octal_taps(octal: int) -> tuple[int, int, int]:
    """Three-tap vector of an octal generator, MSB first: 5 -> (1, 0, 1)."""
    if not 0 <= octal <= 7:
        raise ValueError(f"memory-2 generator must be a single octal digit, got {octal:o}")
    return ((octal >> 2) & 1, (octal >> 1) & 1, octal & 1)


@dataclass(frozen=True)
class TurboConfig:
    feedback_poly: tuple[int, int, int] = (1, 0, 1)
    forward_poly: tuple[int, int, int] = (0, 1, 1)
    block_length: int = 1000
    interleaver_rows: int = 25
    interleaver_cols: int = 40
    iterations: int = 20
    llr_clamp: float = 25.0

    def __post_init__(self):
        for name in ("feedback_poly", "forward_poly"):
            taps = tuple(int(t) for t in getattr(self, name))
            if len(taps) != 3 or any(t not in (0, 1) for t in taps):
                raise ValueError(f"{name} must be three 0/1 taps, got {taps}")
            object.__setattr__(self, name, taps)
        if not self.feedback_poly[0]:
            raise ValueError("feedback_poly must have its lowest-order tap set")
        if self.block_length < 1:
            raise ValueError("block_length must be positive")
        if self.interleaver_rows < 1 or self.interleaver_cols < 1:
            raise ValueError("interleaver dimensions must be positive")
        if self.interleaver_rows * self.interleaver_cols != self.block_length:
            raise ValueError(
                f"interleaver {self.interleaver_rows}x{self.interleaver_cols} "
                f"does not cover block_length {self.block_length}"
            )
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if not self.llr_clamp > 0:
            raise ValueError("llr_clamp must be positive")

    @classmethod
    def from_octal(cls, feedback: int = 0o5, forward: int = 0o3, **kw) -> "TurboConfig":
        return cls(feedback_poly=octal_taps(feedback), forward_poly=octal_taps(forward), **kw)

    @cached_property
    def trellis(self) -> "Trellis":
        return Trellis.build(self.feedback_poly, self.forward_poly)


@dataclass(frozen=True)
class Trellis:
    """State tables; a state packs the register as (a[k-1] << 1) | a[k-2]."""

    next_state: np.ndarray  # (4, 2)
    parity: np.ndarray  # (4, 2)

    @classmethod
    def build(cls, fb, fw) -> "Trellis":
        nxt = np.zeros((N_STATES, 2), dtype=np.intp)
        par = np.zeros((N_STATES, 2), dtype=np.uint8)
        for state in range(N_STATES):
            s1, s2 = state >> 1, state & 1
            for u in (0, 1):
                a = u ^ (fb[1] & s1) ^ (fb[2] & s2)
                nxt[state, u] = (a << 1) | s1
                par[state, u] = a ^ (fw[1] & s1) ^ (fw[2] & s2)
        return cls(nxt, par)

    def step(self, state: int, u: int) -> tuple[int, int]:
        return int(self.next_state[state, u]), int(self.parity[state, u])


@dataclass(frozen=True)
class Codeword:
    systematic: np.ndarray
    parity1: np.ndarray
    parity2: np.ndarray

    def __post_init__(self):
        if not self.systematic.shape == self.parity1.shape == self.parity2.shape:
            raise ValueError("codeword streams must have equal shape")


@dataclass(frozen=True)
class LlrBlock:
    systematic_llr: np.ndarray
    parity1_llr: np.ndarray
    parity2_llr: np.ndarray

    def __post_init__(self):
        shapes = {np.shape(self.systematic_llr), np.shape(self.parity1_llr), np.shape(self.parity2_llr)}
        if len(shapes) != 1:
            raise ValueError(f"LLR streams have mismatched shapes: {shapes}")


def _check_length(x: np.ndarray, n: int, what: str = "input") -> None:
    if x.ndim not in (1, 2) or x.shape[-1] != n:
        raise ValueError(f"{what} must have length {n} along its last axis, got shape {x.shape}")


def rsc_encode(bits, config: TurboConfig) -> np.ndarray:
    """Parity stream of one RSC encoder started in state 0, unterminated."""
    u = np.asarray(bits, dtype=np.uint8)
    _check_length(u, config.block_length)
    t = config.trellis
    u2 = np.atleast_2d(u)
    state = np.zeros(u2.shape[0], dtype=np.intp)
    parity = np.empty_like(u2)
    for k in range(u2.shape[1]):
        uk = u2[:, k]
        parity[:, k] = t.parity[state, uk]
        state = t.next_state[state, uk]
    return parity.reshape(u.shape)


def interleave(x, rows: int, cols: int) -> np.ndarray:
    """Write row-wise into a rows x cols array, read column-wise."""
    x = np.asarray(x)
    if x.shape[-1] != rows * cols:
        raise ValueError(f"length {x.shape[-1]} != {rows}x{cols}")
    lead = x.shape[:-1]
    return np.swapaxes(x.reshape(*lead, rows, cols), -1, -2).reshape(x.shape)


def deinterleave(x, rows: int, cols: int) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] != rows * cols:
        raise ValueError(f"length {x.shape[-1]} != {rows}x{cols}")
    lead = x.shape[:-1]
    return np.swapaxes(x.reshape(*lead, cols, rows), -1, -2).reshape(x.shape)


def turbo_encode(bits, config: TurboConfig) -> Codeword:
    u = np.asarray(bits, dtype=np.uint8)
    _check_length(u, config.block_length)
    rows, cols = config.interleaver_rows, config.interleaver_cols
    return Codeword(
        systematic=u.copy(),
        parity1=rsc_encode(u, config),
        parity2=rsc_encode(interleave(u, rows, cols), config),
    )


def bsc_llr(bits, crossover: float, clamp: float):
    """Channel LLR of bits received over a binary symmetric channel."""
    if not 0.0 < crossover < 0.5:
        raise ValueError(f"crossover must lie in (0, 0.5), got {crossover}")
    mag = min(np.log((1.0 - crossover) / crossover), clamp)
    b = np.asarray(bits)
    llr = np.where(b == 0, mag, -mag).astype(float)
    return float(llr) if llr.ndim == 0 else llr


@numba.njit(cache=True)
def _max_log_map_app(sys_llr, par_llr, apriori, next_state, parity):
    """A-posteriori LLRs for a batch of blocks, all inputs shaped (B, N)."""
    batch, n = sys_llr.shape
    app = np.empty((batch, n))
    alpha = np.empty((n + 1, N_STATES))
    beta = np.empty((n + 1, N_STATES))
    gamma = np.empty((n, N_STATES, 2))
    for b in range(batch):
        for t in range(n):
            hu = 0.5 * (sys_llr[b, t] + apriori[b, t])
            hp = 0.5 * par_llr[b, t]
            for s in range(N_STATES):
                for u in range(2):
                    us = hu if u == 0 else -hu
                    vs = hp if parity[s, u] == 0 else -hp
                    gamma[t, s, u] = us + vs

        for s in range(N_STATES):
            alpha[0, s] = _NEG
            beta[n, s] = 0.0
        alpha[0, 0] = 0.0
        for t in range(n):
            for s in range(N_STATES):
                alpha[t + 1, s] = _NEG
            for s in range(N_STATES):
                for u in range(2):
                    m = alpha[t, s] + gamma[t, s, u]
                    ns = next_state[s, u]
                    if m > alpha[t + 1, ns]:
                        alpha[t + 1, ns] = m
            top = alpha[t + 1].max()
            for s in range(N_STATES):
                alpha[t + 1, s] -= top

        for t in range(n - 1, -1, -1):
            for s in range(N_STATES):
                best = _NEG
                for u in range(2):
                    m = gamma[t, s, u] + beta[t + 1, next_state[s, u]]
                    if m > best:
                        best = m
                beta[t, s] = best
            top = beta[t].max()
            for s in range(N_STATES):
                beta[t, s] -= top

        for t in range(n):
            best0 = _NEG
            best1 = _NEG
            for s in range(N_STATES):
                m0 = alpha[t, s] + gamma[t, s, 0] + beta[t + 1, next_state[s, 0]]
                m1 = alpha[t, s] + gamma[t, s, 1] + beta[t + 1, next_state[s, 1]]
                if m0 > best0:
                    best0 = m0
                if m1 > best1:
                    best1 = m1
            app[b, t] = best0 - best1
    return app


def max_log_map_component(sys_llr, par_llr, apriori_llr, config: TurboConfig) -> np.ndarray:
    """Extrinsic LLRs from one SISO pass over a component trellis, clamped to ±llr_clamp."""
    sys_llr = np.asarray(sys_llr, dtype=float)
    par_llr = np.asarray(par_llr, dtype=float)
    apriori_llr = np.asarray(apriori_llr, dtype=float)
    if not sys_llr.shape == par_llr.shape == apriori_llr.shape:
        raise ValueError("component decoder inputs must have equal shapes")
    _check_length(sys_llr, config.block_length, "LLR input")
    shape = sys_llr.shape
    s2, p2, a2 = (np.ascontiguousarray(np.atleast_2d(x)) for x in (sys_llr, par_llr, apriori_llr))
    t = config.trellis
    app = _max_log_map_app(s2, p2, a2, t.next_state, t.parity)
    ext = np.clip(app - s2 - a2, -config.llr_clamp, config.llr_clamp)
    return ext.reshape(shape)


def turbo_decode(llrs: LlrBlock, config: TurboConfig) -> tuple[np.ndarray, int]:
    """Run exactly ``config.iterations`` rounds; return hard decisions and the round count."""
    rows, cols = config.interleaver_rows, config.interleaver_cols
    sys_llr = np.asarray(llrs.systematic_llr, dtype=float)
    _check_length(sys_llr, config.block_length, "LLR block")
    sys_int = interleave(sys_llr, rows, cols)
    ext2 = np.zeros_like(sys_llr)  # decoder-2 extrinsic, natural order
    ext1 = ext2
    for _ in range(config.iterations):
        ext1 = max_log_map_component(sys_llr, llrs.parity1_llr, ext2, config)
        e2 = max_log_map_component(sys_int, llrs.parity2_llr, interleave(ext1, rows, cols), config)
        ext2 = deinterleave(e2, rows, cols)
    total = sys_llr + ext1 + ext2
    return (total < 0).astype(np.uint8), config.iterations
