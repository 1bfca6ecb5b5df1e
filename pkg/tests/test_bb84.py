import numpy as np
import pytest

from bb84_turbo.bb84 import (
    Basis,
    ChannelParams,
    PhotonBatch,
    PhotonState,
    SiftedKeyPair,
    TransmissionRecord,
    alice_prepare,
    bob_measure,
    estimate_qber,
    eve_intercept_resend,
    measure_photon,
    protocol_streams,
    run_protocol,
    sift,
)

N_BIG = 100_000


def _sifted(s, n=N_BIG, seed=0):
    return sift(run_protocol(ChannelParams(s, n, seed)))


def test_polarizations_are_distinct():
    angles = {PhotonState(b, bit).polarization for b in Basis for bit in (0, 1)}
    assert angles == {0, 45, 90, 135}


def test_photon_state_rejects_bad_bit():
    with pytest.raises(ValueError):
        PhotonState(Basis.RECTILINEAR, 2)


def test_alice_prepare_consistency():
    bits, bases, photons = alice_prepare(4, np.random.default_rng(7))
    assert len(photons) == 4
    for i, ph in enumerate(photons):
        assert ph.bit == bits[i]
        assert ph.basis == bases[i]


def test_alice_prepare_balanced():
    bits, bases, _ = alice_prepare(N_BIG, protocol_streams(0)["alice"])
    assert 0.49 <= np.mean(bases == Basis.RECTILINEAR) <= 0.51
    assert 0.49 <= np.mean(bits) <= 0.51


def test_alice_prepare_deterministic():
    a = alice_prepare(50, np.random.default_rng(3))
    b = alice_prepare(50, np.random.default_rng(3))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]) and a[2] == b[2]


def test_alice_prepare_rejects_zero():
    with pytest.raises(ValueError):
        alice_prepare(0, np.random.default_rng())


def test_measure_photon_matching_basis(rng):
    assert measure_photon(PhotonState(Basis.RECTILINEAR, 1), Basis.RECTILINEAR, rng) == 1
    assert measure_photon(PhotonState(Basis.DIAGONAL, 0), Basis.DIAGONAL, rng) == 0


def test_measure_photon_wrong_basis_is_fair(rng):
    ph = PhotonState(Basis.RECTILINEAR, 1)
    outcomes = [measure_photon(ph, Basis.DIAGONAL, rng) for _ in range(N_BIG)]
    assert 0.49 <= np.mean(outcomes) <= 0.51


def test_eve_s0_is_identity(rng):
    _, _, photons = alice_prepare(1000, rng)
    fwd, flags = eve_intercept_resend(photons, 0.0, rng)
    assert fwd == photons
    assert not flags.any()


def test_eve_s1_intercepts_all():
    eve = np.random.default_rng(5)
    _, _, photons = alice_prepare(2000, np.random.default_rng(4))
    fwd, flags = eve_intercept_resend(photons, 1.0, eve)
    assert flags.all()
    # replay Eve's stream: flags draw, then her bases
    replay = np.random.default_rng(5)
    replay.random(len(photons))
    eve_bases = replay.integers(0, 2, size=len(photons), dtype=np.uint8)
    assert np.array_equal(fwd.bases, eve_bases)
    same = eve_bases == photons.bases
    assert np.array_equal(fwd.bits[same], photons.bits[same])


def test_eve_half_interception_rate(rng):
    _, _, photons = alice_prepare(N_BIG, rng)
    _, flags = eve_intercept_resend(photons, 0.5, rng)
    assert 0.49 <= flags.mean() <= 0.51


@pytest.mark.parametrize("s", [-0.01, 1.5])
def test_eve_rejects_bad_s(s, rng):
    _, _, photons = alice_prepare(10, rng)
    with pytest.raises(ValueError):
        eve_intercept_resend(photons, s, rng)


def test_bob_matching_basis_recovers_bit(rng):
    photons = PhotonBatch(np.zeros(1000), np.zeros(1000))
    bits, bases = bob_measure(photons, rng)
    assert np.all(bits[bases == Basis.RECTILINEAR] == 0)


def test_bob_bases_balanced(rng):
    _, bases = bob_measure(PhotonBatch(np.zeros(N_BIG), np.zeros(N_BIG)), rng)
    assert 0.49 <= np.mean(bases == Basis.RECTILINEAR) <= 0.51


def test_bob_empty(rng):
    bits, bases = bob_measure(PhotonBatch(np.array([]), np.array([])), rng)
    assert len(bits) == 0 and len(bases) == 0


def test_sift_full_agreement():
    bits = np.array([0, 1, 1, 0, 1], dtype=np.uint8)
    bases = np.array([0, 1, 0, 1, 1], dtype=np.uint8)
    rec = TransmissionRecord(bits, bases, bits, bases, np.zeros(5, bool))
    pair = sift(rec)
    assert len(pair) == 5 and np.array_equal(pair.alice_key, bits)


def test_sift_keeps_exactly_matching_positions():
    a_bits = np.array([1, 0, 1, 1], dtype=np.uint8)
    b_bits = np.array([1, 1, 0, 1], dtype=np.uint8)
    a_bases = np.array([0, 0, 1, 1], dtype=np.uint8)
    b_bases = np.array([0, 1, 1, 0], dtype=np.uint8)
    pair = sift(TransmissionRecord(a_bits, a_bases, b_bits, b_bases, np.zeros(4, bool)))
    assert pair.alice_key.tolist() == [1, 1]
    assert pair.bob_key.tolist() == [1, 0]


def test_sift_rejects_inconsistent_lengths():
    z = np.zeros(3, dtype=np.uint8)
    with pytest.raises(ValueError):
        sift(TransmissionRecord(z, z, z, np.zeros(2, np.uint8), np.zeros(3, bool)))


@pytest.mark.parametrize("seed", [0, 1, 2, 12345])
def test_no_attack_sifted_keys_identical(seed):
    pair = _sifted(0.0, seed=seed)
    assert 0.49 <= len(pair) / N_BIG <= 0.51
    assert np.array_equal(pair.alice_key, pair.bob_key)


def test_full_attack_qber_quarter():
    assert 0.24 <= _sifted(1.0).error_rate <= 0.26


def test_qber_slope_through_origin():
    s_vals = np.linspace(0, 1, 11)
    q = np.array([_sifted(s, seed=i).error_rate for i, s in enumerate(s_vals)])
    slope = np.dot(s_vals, q) / np.dot(s_vals, s_vals)
    assert slope == pytest.approx(0.25, abs=0.01)


def test_estimate_qber_identical_keys(rng):
    key = rng.integers(0, 2, 200, dtype=np.uint8)
    est, rest = estimate_qber(SiftedKeyPair(key, key.copy()), 0.1, rng)
    assert est == 0.0
    assert len(rest) == 180


def test_estimate_qber_opposite_keys(rng):
    key = rng.integers(0, 2, 200, dtype=np.uint8)
    est, _ = estimate_qber(SiftedKeyPair(key, 1 - key), 0.3, rng)
    assert est == 1.0


def test_estimate_qber_sampling_error():
    streams = protocol_streams(0)
    rec = run_protocol(ChannelParams(1.0, 200_000, 0), streams)
    pair = sift(rec)
    est, rest = estimate_qber(pair, 0.1, streams["sampling"])
    assert abs(est - pair.error_rate) <= 0.02
    assert len(rest) == len(pair) - round(0.1 * len(pair))


def test_estimate_qber_removes_sampled_positions():
    # distinct symbols let us identify which positions survived
    a = np.arange(100) % 2
    pair = SiftedKeyPair(a.astype(np.uint8), a.astype(np.uint8))
    rng = np.random.default_rng(9)
    _, rest = estimate_qber(pair, 0.25, rng)
    sample = np.random.default_rng(9).choice(100, size=25, replace=False)
    keep = np.setdiff1d(np.arange(100), sample)
    assert np.array_equal(rest.alice_key, a[keep])


@pytest.mark.parametrize("frac", [0.0, 1.0, -0.2])
def test_estimate_qber_rejects_degenerate_fraction(frac, rng):
    key = np.zeros(50, dtype=np.uint8)
    with pytest.raises(ValueError):
        estimate_qber(SiftedKeyPair(key, key), frac, rng)


def test_estimate_qber_rejects_short_key(rng):
    key = np.zeros(9, dtype=np.uint8)
    with pytest.raises(ValueError):
        estimate_qber(SiftedKeyPair(key, key), 0.5, rng)


def test_channel_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(1.2, 10)
    with pytest.raises(ValueError):
        ChannelParams(0.5, 0)


def test_run_is_deterministic():
    a = run_protocol(ChannelParams(0.4, 5000, 77))
    b = run_protocol(ChannelParams(0.4, 5000, 77))
    for field in ("alice_bits", "alice_bases", "bob_bits", "bob_bases", "eavesdropped_flags"):
        assert np.array_equal(getattr(a, field), getattr(b, field))
