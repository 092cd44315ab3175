"""Protocol sessions: bit pipeline, runners, transcripts, information flow."""

import itertools
import json
import math

import numpy as np
import pytest

from ghzkd.adversary import EveKind, EveStrategy, NoiseModel, Verdict
from ghzkd.core import Mode, MeasurementSetting, joint_outcome_distribution
from ghzkd.ghz import GhzSpec, compatible_outcomes, ghz_state, super_classical_triples
from ghzkd.protocol import (
    ConfigError,
    KeyExhausted,
    Method,
    ProtocolConfig,
    _play_round_physics,
    bit_of,
    encode_bit,
    recover_alice_bit,
    recover_key_bit,
    run_method1,
    run_method2,
    run_three_party,
    session_result_to_dict,
)
from ghzkd.transcript import PUBLIC_KINDS, transcript_to_csv, transcript_to_json

MENU = (0.0, math.pi / 2, math.pi)


def _m1(**kw):
    kw.setdefault("menu", MENU)
    return ProtocolConfig(method=Method.METHOD1, **kw)


def _m2(**kw):
    return ProtocolConfig(method=Method.METHOD2, **kw)


# --------------------------------------------------------------------------
# bit pipeline


def test_bit_convention():
    assert bit_of(1) == 0
    assert bit_of(-1) == 1
    assert {bit_of(1), bit_of(-1)} == {0, 1}
    with pytest.raises(ValueError):
        bit_of(0)


def test_encode_recover_worked_columns():
    # 4-bit walkthrough, parity +1 throughout:
    # K=1011, A=0110, D=1101, C=0010, E=1111, B=0100
    key = [1, 0, 1, 1]
    a = [0, 1, 1, 0]
    c = [0, 0, 1, 0]
    b = [0, 1, 0, 0]
    d = [encode_bit(ai, ki) for ai, ki in zip(a, key)]
    assert d == [1, 1, 0, 1]
    e = [di ^ ci for di, ci in zip(d, c)]
    assert e == [1, 1, 1, 1]
    recovered = [recover_key_bit(di, ci, bi, 1) for di, ci, bi in zip(d, c, b)]
    assert recovered == key
    assert [recover_alice_bit(ki, di) for ki, di in zip(recovered, d)] == a


def test_recover_key_bit_xnor_branch():
    assert recover_key_bit(1, 0, 0, 1) == 1
    assert recover_key_bit(0, 1, 0, 1) == 1
    assert recover_key_bit(1, 0, 0, -1) == 0
    with pytest.raises(ValueError):
        recover_key_bit(1, 0, 0, 0)


def test_recovery_identity_exhaustive():
    # Whenever A ^ B ^ C equals the parity bit, the pipeline returns K exactly.
    for a, k, c, parity in itertools.product((0, 1), (0, 1), (0, 1), (1, -1)):
        parity_bit = 0 if parity == 1 else 1
        b = parity_bit ^ a ^ c
        assert recover_key_bit(encode_bit(a, k), c, b, parity) == k


def test_reconstruction_reproduces_parity_bit():
    for d, c, b, parity in itertools.product((0, 1), (0, 1), (0, 1), (1, -1)):
        a_rec = recover_alice_bit(recover_key_bit(d, c, b, parity), d)
        assert a_rec ^ c ^ b == (0 if parity == 1 else 1)


# --------------------------------------------------------------------------
# configuration


def test_config_validation():
    with pytest.raises(ConfigError):
        ProtocolConfig(method=Method.METHOD1, menu=None)
    with pytest.raises(ConfigError):
        _m1(menu=(0.0, 0.0, math.pi))
    with pytest.raises(ConfigError):
        _m1(key_length=0)
    with pytest.raises(ConfigError):
        _m1(seed=-1)
    with pytest.raises(ConfigError):
        _m1(max_rounds=4, key_length=8)
    with pytest.raises(ConfigError):
        _m2(bob_parity_preference=0)
    cfg = _m1(key_length=16)
    assert cfg.max_rounds == 16 * 8
    assert _m2(key_length=16).max_rounds == 16


def test_match_alice_rejected_at_run_time():
    from ghzkd.adversary import AnglePolicy

    eve = EveStrategy(EveKind.INTERCEPT_RESEND_A, AnglePolicy.MATCH_ALICE)
    cfg = _m1(key_length=4, eve=eve)
    with pytest.raises(ConfigError, match="analysis"):
        run_method1(cfg)


def test_method_mismatch_rejected():
    with pytest.raises(ConfigError):
        run_method1(_m2(key_length=4))
    with pytest.raises(ConfigError):
        run_method2(_m1(key_length=4))


# --------------------------------------------------------------------------
# method 1


def test_method1_honest_session_recovers_key():
    for seed in (1, 7, 123):
        result, transcript = run_method1(_m1(key_length=64, seed=seed))
        assert result.key_recovered == result.key_sent
        assert result.alice_bits_inferred == tuple(
            bit_of(r.outcome_a) for r in transcript.rounds if r.retained
        )
        assert result.detection.violations == 0
        assert result.detection.verdict is Verdict.CLEAN
        assert all(not r.violation for r in transcript.rounds)


def test_method1_retained_fraction():
    # Session stops on the key_length-th retained round: rounds_used is a
    # sum of geometrics with mean k/q and variance k(1-q)/q^2, q = 14/27.
    k = 256
    result, _ = run_method1(_m1(key_length=k, seed=5))
    q = 14 / 27
    mean = k / q
    sigma = math.sqrt(k * (1 - q)) / q
    assert abs(result.rounds_used - mean) <= 4 * sigma


def test_method1_key_exhausted_on_hopeless_menu():
    cfg = _m1(menu=(0.1, 0.2, 0.3), key_length=4)
    with pytest.raises(KeyExhausted):
        run_method1(cfg)


def test_method1_retained_rounds_never_violate_exactly():
    # Stronger than sampling: the joint distribution puts zero mass outside
    # the compatible set for every retained menu triple...
    spec = GhzSpec("+++", -1)
    psi = ghz_state(spec)
    rng = np.random.default_rng(77)
    for triple, parity in super_classical_triples(MENU, spec):
        settings = tuple(MeasurementSetting(Mode.SPIN, p) for p in triple)
        dist = joint_outcome_distribution(psi, settings)
        off_support = sum(p for t, p in dist.items() if t not in compatible_outcomes(parity))
        assert off_support <= 1e-14
        # ... and 10^5 draws per triple from that distribution confirm it.
        probs = np.array([dist[t] for t in sorted(dist)])
        allowed = {i for i, t in enumerate(sorted(dist)) if t in compatible_outcomes(parity)}
        draws = rng.choice(8, size=100_000, p=probs / probs.sum())
        assert set(np.unique(draws)) <= allowed


def test_method1_no_violations_over_many_rounds():
    result, transcript = run_method1(_m1(key_length=2048, seed=11))
    assert result.key_recovered == result.key_sent
    assert sum(r.violation for r in transcript.rounds) == 0


# --------------------------------------------------------------------------
# method 2


def test_method2_uses_exactly_key_length_rounds():
    for preference in (1, -1):
        cfg = _m2(key_length=48, seed=3, bob_parity_preference=preference)
        result, transcript = run_method2(cfg)
        assert result.rounds_used == 48
        assert result.key_recovered == result.key_sent
        assert all(r.retained and r.parity == preference for r in transcript.rounds)
        assert result.detection.parity_class == preference
        assert result.detection.rounds_checked == 48
        assert result.detection.violations == 0


def test_method2_menu_is_ignored():
    cfg = ProtocolConfig(method=Method.METHOD2, menu=MENU, key_length=8, seed=2)
    result, transcript = run_method2(cfg)
    assert result.key_recovered == result.key_sent
    assert transcript.menu is None  # not part of a solved-angle transcript


def test_method2_optional_menu_angle_source():
    cfg = _m2(menu=MENU, method2_menu_angles=True, key_length=24, seed=8)
    result, transcript = run_method2(cfg)
    assert result.key_recovered == result.key_sent
    assert transcript.menu == MENU
    assert all(r.phi_a in MENU and r.phi_c in MENU for r in transcript.rounds)
    assert any(m.kind == "menu" for m in transcript.public_log)
    with pytest.raises(ConfigError):
        _m2(method2_menu_angles=True, key_length=4)
    with pytest.raises(ConfigError):
        _m1(method2_menu_angles=True, key_length=4)


# --------------------------------------------------------------------------
# determinism and round independence


def test_sessions_are_deterministic():
    a = run_method1(_m1(key_length=32, seed=9))
    b = run_method1(_m1(key_length=32, seed=9))
    assert a[0] == b[0]
    assert a[1] == b[1]
    assert transcript_to_json(a[1], True) == transcript_to_json(b[1], True)
    c = run_method1(_m1(key_length=32, seed=10))
    assert c[0].key_sent != a[0].key_sent or c[1].rounds != a[1].rounds


def test_round_physics_independent_of_execution_order():
    cfg = _m1(
        key_length=24,
        seed=13,
        eve=EveStrategy.intercept_resend_a(),
        noise=NoiseModel.depolarizing(0.2),
        threshold=1.0,  # keep the verdict out of the way
    )
    _, transcript = run_method1(cfg)
    base = (cfg.seed, 1)
    for record in reversed(transcript.rounds):
        ph = _play_round_physics(cfg, base, record.index)
        assert (ph.phi_a, ph.phi_b, ph.phi_c) == (record.phi_a, record.phi_b, record.phi_c)
        assert ph.outcomes == (record.outcome_a, record.outcome_b, record.outcome_c)
        assert ph.retained == record.retained


# --------------------------------------------------------------------------
# three-party extension


def test_three_party_shares_one_key():
    cfg = _m2(key_length=32, seed=21)
    (r1, t1), (r2, t2) = run_three_party(cfg)
    assert r1.key_recovered == r1.key_sent
    assert r2.key_sent == r1.key_recovered
    assert r2.key_recovered == r1.key_sent
    # both runs publish their own pad bits
    assert any(m.kind == "d_bit" for m in t1.public_log)
    assert any(m.kind == "d_bit" for m in t2.public_log)


def test_three_party_eve_in_second_run_only():
    cfg = _m2(key_length=96, seed=33)
    attacked = _m2(key_length=96, seed=33, eve=EveStrategy.intercept_resend_a(math.pi / 2))
    (r1, _), (r2, _) = run_three_party(cfg, second_config=attacked)
    assert r1.detection.verdict is Verdict.CLEAN
    assert r2.detection.verdict is Verdict.EVE_DETECTED
    assert r1.detection.violations == 0
    assert r2.detection.violations > 0


def test_three_party_key_length_must_match():
    with pytest.raises(ConfigError):
        run_three_party(_m2(key_length=8), second_config=_m2(key_length=16))


# --------------------------------------------------------------------------
# transcripts and information flow


def test_public_log_contains_only_public_kinds():
    _, transcript = run_method1(_m1(key_length=16, seed=4))
    assert {m.kind for m in transcript.public_log} <= set(PUBLIC_KINDS)
    assert {m.sender for m in transcript.public_log} <= {"alice", "bob", "charlie"}
    # the receiver's per-round angle never hits the channel
    assert not any(m.sender == "bob" and m.kind == "angle" for m in transcript.public_log)
    by_kind = {}
    for m in transcript.public_log:
        by_kind.setdefault(m.kind, []).append(m)
    retained = sum(1 for r in transcript.rounds if r.retained)
    discarded = sum(1 for r in transcript.rounds if not r.retained)
    assert len(by_kind["d_bit"]) == retained
    assert len(by_kind["c_bit"]) == retained
    assert len(by_kind["discard"]) == discarded
    assert len(by_kind["menu"]) == 1


def test_public_transcript_masks_private_fields():
    result, transcript = run_method1(_m1(key_length=16, seed=4))
    masked = json.loads(transcript_to_json(transcript, reveal_secret=False))
    assert masked["header"]["spec"] is None
    assert masked["header"]["spec_redacted"] is True
    for row in masked["rounds"]:
        assert row["phi_b"] is None
        assert row["outcome_a"] is None
        assert row["outcome_b"] is None
        assert row["parity"] is None
        assert row["b_bit"] is None
        assert row["violation"] is None
    revealed = json.loads(transcript_to_json(transcript, reveal_secret=True))
    assert revealed["header"]["spec"] == "+++,-"
    assert all(row["parity"] in (1, -1) for row in revealed["rounds"] if row["retained"])
    # the public dump never contains the key or the senders' bit strings
    blob = transcript_to_json(transcript, reveal_secret=False)
    from ghzkd.protocol import bits_to_str

    assert bits_to_str(result.key_sent) not in blob.replace('"', "")


def test_session_result_serialization_masks_keys():
    result, _ = run_method2(_m2(key_length=8, seed=6))
    masked = session_result_to_dict(result, reveal_secret=False)
    assert masked["key_sent"] is None
    assert masked["key_recovered"] is None
    assert masked["alice_bits_inferred"] is None
    assert masked["key_match"] is True
    revealed = session_result_to_dict(result, reveal_secret=True)
    assert len(revealed["key_sent"]) == 8
    assert revealed["key_recovered"] == revealed["key_sent"]


def test_csv_round_trip_and_angle_precision():
    _, transcript = run_method1(_m1(key_length=8, seed=15))
    text = transcript_to_csv(transcript, reveal_secret=True)
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    assert header[:4] == ["index", "phi_a", "phi_b", "phi_c"]
    assert len(lines) - 1 == len(transcript.rounds)
    first = lines[1].split(",")
    assert float(first[1]) == transcript.rounds[0].phi_a  # 17 significant digits round-trip
    masked = transcript_to_csv(transcript, reveal_secret=False)
    masked_first = [ln for ln in masked.splitlines() if not ln.startswith("#")][1].split(",")
    assert masked_first[2] == ""  # receiver's angle blanked
