"""BB84 key distribution under intercept-resend attack, with turbo-code reconciliation."""

from .bb84 import (
    Basis,
    ChannelParams,
    PhotonBatch,
    PhotonState,
    SiftedKeyPair,
    TransmissionRecord,
    alice_prepare,
    bob_measure,
    eve_intercept_resend,
    estimate_qber,
    measure_photon,
    run_protocol,
    sift,
)
from .metrics import (
    SecurityPoint,
    binary_entropy,
    mutual_info_ab,
    mutual_info_ae,
    secure_info,
    security_point,
    theoretical_qber,
)
from .reconciliation import (
    ReconciliationResult,
    reconcile_block,
    reconcile_key,
    reconciliation_efficiency,
)
from .turbo import (
    Codeword,
    LlrBlock,
    TurboConfig,
    bsc_llr,
    deinterleave,
    interleave,
    max_log_map_component,
    rsc_encode,
    turbo_decode,
    turbo_encode,
)

__version__ = "0.1.0"
