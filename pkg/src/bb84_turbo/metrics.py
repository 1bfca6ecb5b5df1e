"""Closed-form security quantities for BB84 under intercept-resend.

All logarithms are base 2. Functions accept scalars or numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _check_unit_interval(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return arr


def _xlog2x(x: np.ndarray) -> np.ndarray:
    # x*log2(x) with the continuous extension 0 at x=0
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


def _scalar_or_array(result: np.ndarray, like):
    return float(result) if np.ndim(like) == 0 else result


def binary_entropy(p):
    """h(p) = -p log2 p - (1-p) log2 (1-p), with h(0) = h(1) = 0."""
    arr = _check_unit_interval(p, "p")
    h = -_xlog2x(arr) - _xlog2x(1.0 - arr)
    return _scalar_or_array(h, p)


def mutual_info_ab(s):
    """Alice-Bob mutual information per sifted bit at eavesdropping probability `s`.

    Evaluates ``log2(2 - s/2) - (s/4) log2(4/s - 1)``; the term with ``4/s`` has a
    removable singularity at s=0 where the limit is 1.
    """
    arr = np.atleast_1d(_check_unit_interval(s, "s"))
    out = np.ones_like(arr)
    nz = arr > 0
    sn = arr[nz]
    out[nz] = np.log2(2.0 - sn / 2.0) - (sn / 4.0) * np.log2(4.0 / sn - 1.0)
    return _scalar_or_array(out.reshape(np.shape(s)), s)


def mutual_info_ae(s):
    """Alice-Eve mutual information: ``(1/2) log2(2 - s^2/4) + (s/4) log2((2+s)/(2-s))``.

    Taken verbatim; note it is 0.5 at s=0, not 0.
    """
    arr = _check_unit_interval(s, "s")
    out = 0.5 * np.log2(2.0 - arr**2 / 4.0) + (arr / 4.0) * np.log2((2.0 + arr) / (2.0 - arr))
    return _scalar_or_array(out, s)


def secure_info(s, clamp: bool = False):
    """Secure information I_AB - I_AE.

    Unclamped by default; the formulas go negative above s ~ 0.39. ``clamp=True``
    floors the result at zero for presentation only.
    """
    val = np.asarray(mutual_info_ab(s)) - np.asarray(mutual_info_ae(s))
    if clamp:
        val = np.maximum(val, 0.0)
    return _scalar_or_array(val, s)


def theoretical_qber(s):
    """Sifted-key error probability s/4 (Eve guesses wrong basis half the time, Bob then errs half the time)."""
    arr = _check_unit_interval(s, "s")
    return _scalar_or_array(arr / 4.0, s)


@dataclass(frozen=True)
class SecurityPoint:
    s: float
    i_ab: float
    i_ae: float
    i_s: float
    pe: float


def security_point(s: float) -> SecurityPoint:
    i_ab = mutual_info_ab(s)
    i_ae = mutual_info_ae(s)
    return SecurityPoint(s=float(s), i_ab=i_ab, i_ae=i_ae, i_s=i_ab - i_ae, pe=theoretical_qber(s))
