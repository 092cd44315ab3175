"""Eavesdropper strategies, channel noise, violation detection, and exact oracles.

The oracles enumerate every branch (noise operator choices, the
eavesdropper's projective outcomes, and the parties' joint outcomes)
through the state-vector engine, so they are exact up to float rounding.
Monte-Carlo estimators with the same channel pipeline sit alongside them;
tests and sweeps compare the two rather than trusting either alone.

Channel pipeline for a round, matching the protocol runner: the prepared
state passes noise on particles a and c (the two in transit), then an
intercept-resend eavesdropper measures particle a, then the parties measure.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Mode,
    MeasurementSetting,
    PRODUCT_BY_INDEX,
    TWO_PI,
    _joint_probs,
    _qubit_axis,
    measure_single,
    normalize_angle,
    project_single,
    sample_joint,
)
from .ghz import GhzSpec, ghz_state, is_super_classical, solve_bob_phase, super_classical_triples
from .transcript import Transcript


class EveKind(enum.Enum):
    NONE = "none"
    INTERCEPT_RESEND_A = "intercept-a"
    IMPERSONATE_CHARLIE = "impersonate-charlie"


class AnglePolicy(enum.Enum):
    GUESS_FROM_MENU = "guess-from-menu"
    FIXED_ANGLE = "fixed-angle"
    MATCH_ALICE = "match-alice"


@dataclass(frozen=True)
class EveStrategy:
    """What the eavesdropper does, and how she picks her measurement angle.

    MATCH_ALICE exists for analysis only: in a causal run Eve touches the
    particle before the angle announcement, so the protocol runners reject
    it.  The exact oracles accept any angle, which covers the matched case.
    """

    kind: EveKind = EveKind.NONE
    angle_policy: AnglePolicy = AnglePolicy.GUESS_FROM_MENU
    fixed_angle: float | None = None

    def __post_init__(self):
        if self.angle_policy is AnglePolicy.FIXED_ANGLE:
            if self.fixed_angle is None or not math.isfinite(self.fixed_angle):
                raise ValueError("FIXED_ANGLE policy requires a finite fixed_angle")
            object.__setattr__(self, "fixed_angle", normalize_angle(self.fixed_angle))

    @classmethod
    def none(cls) -> "EveStrategy":
        return cls(EveKind.NONE)

    @classmethod
    def intercept_resend_a(cls, fixed_angle: float | None = None) -> "EveStrategy":
        if fixed_angle is None:
            return cls(EveKind.INTERCEPT_RESEND_A, AnglePolicy.GUESS_FROM_MENU)
        return cls(EveKind.INTERCEPT_RESEND_A, AnglePolicy.FIXED_ANGLE, fixed_angle)

    @classmethod
    def impersonate_charlie(cls) -> "EveStrategy":
        return cls(EveKind.IMPERSONATE_CHARLIE)


class NoiseKind(enum.Enum):
    NONE = "none"
    DEPOLARIZING = "depolarizing"


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit transit noise.

    Depolarizing(p): with probability p the transiting qubit is replaced by
    the maximally mixed state, realized by applying one of I, X, Y, Z chosen
    uniformly (branch sampled, so the engine stays on pure states).  At p=1
    the parity expectation of a deterministic round is exactly 0, giving a
    violation rate of 1/2.
    """

    kind: NoiseKind = NoiseKind.NONE
    p: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise probability must be in [0, 1], got {self.p!r}")
        if self.kind is NoiseKind.NONE and self.p != 0.0:
            raise ValueError("NoiseKind.NONE requires p == 0")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls(NoiseKind.NONE, 0.0)

    @classmethod
    def depolarizing(cls, p: float) -> "NoiseModel":
        return cls(NoiseKind.DEPOLARIZING, float(p))


class Verdict(enum.Enum):
    CLEAN = "clean"
    EVE_DETECTED = "eve-detected"


class NoRetainedRounds(RuntimeError):
    """Raised when detection has no retained rounds in the designated class."""


@dataclass
class DetectionReport:
    """Violation statistics for one parity class, plus both classes' counts."""

    rounds_checked: int
    violations: int
    rate: float
    threshold: float
    verdict: Verdict
    parity_class: int
    class_counts: dict = field(default_factory=dict)  # {+1: (checked, violations), -1: ...}


def detection_report_to_dict(report: DetectionReport) -> dict:
    return {
        "rounds_checked": report.rounds_checked,
        "violations": report.violations,
        "rate": report.rate,
        "threshold": report.threshold,
        "verdict": report.verdict.value,
        "parity_class": report.parity_class,
        "class_counts": {str(k): list(v) for k, v in sorted(report.class_counts.items())},
    }


# --------------------------------------------------------------------------
# Channel actions


_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _apply_1q(state: np.ndarray, op: np.ndarray, qubit: int) -> np.ndarray:
    ax = _qubit_axis(qubit)
    t = state.reshape(2, 2, 2)
    return np.moveaxis(np.tensordot(op, t, axes=([1], [ax])), 0, ax).reshape(8)


def apply_noise(state: np.ndarray, qubit: int, model: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """Pass one transiting qubit through the noise channel (branch sampled).

    With p == 0 the input array is returned untouched, bit for bit.
    """
    if model.kind is NoiseKind.NONE or model.p == 0.0:
        return state
    if rng.random() >= model.p:
        return state
    k = int(rng.integers(4))
    if k == 0:
        return state
    return _apply_1q(state, _PAULIS[k], qubit)


@dataclass(frozen=True)
class EveInterceptRecord:
    """What the eavesdropper learned from one intercepted particle."""

    angle: float
    outcome: int


def eve_intercept_resend(
    state: np.ndarray, eve_angle: float, rng: np.random.Generator, mode: Mode = Mode.SPIN
) -> tuple[np.ndarray, EveInterceptRecord]:
    """Measure particle a in transit and forward its collapsed eigenstate.

    The post-measurement state of the projective measurement is already the
    product of Eve's eigenstate on particle a with the collapsed b,c pair,
    so it doubles as the resent state.
    """
    setting = MeasurementSetting(mode, eve_angle)
    outcome, post = measure_single(state, 1, setting, rng)
    return post, EveInterceptRecord(setting.phase, outcome)


def eve_impersonate_charlie(transcript: Transcript) -> list[dict]:
    """The view an eavesdropper playing Charlie's role ends up with.

    Per retained round that is exactly {phi_a, phi_c, D, C}: her own angle
    and outcome plus the two announced bits.  Nothing else reaches her.
    """
    views = []
    for r in transcript.rounds:
        if r.d_bit is None:
            continue
        views.append(
            {"phi_a": r.phi_a, "phi_c": r.phi_c, "d_bit": r.d_bit, "c_bit": r.c_bit}
        )
    return views


# --------------------------------------------------------------------------
# Detection


def detect(transcript: Transcript, threshold: float, parity_class: int = 1) -> DetectionReport:
    """Count parity violations among retained rounds of one parity class.

    The statistic reconstructs the sender's measurement from the published
    bit and the sender's key (equivalently, it uses the actual outcome
    product) and compares the three-outcome product with the deterministic
    parity.  The verdict uses only the designated class; counts for both
    classes are reported.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    if parity_class not in (1, -1):
        raise ValueError(f"parity_class must be +1 or -1, got {parity_class!r}")
    counts = {1: [0, 0], -1: [0, 0]}
    for r in transcript.rounds:
        if not r.retained or r.parity is None or r.d_bit is None:
            continue
        counts[r.parity][0] += 1
        counts[r.parity][1] += int(r.violation)
    checked, violations = counts[parity_class]
    if checked == 0:
        raise NoRetainedRounds(f"no retained rounds with parity {parity_class:+d}")
    rate = violations / checked
    verdict = Verdict.EVE_DETECTED if rate > threshold else Verdict.CLEAN
    return DetectionReport(
        rounds_checked=checked,
        violations=violations,
        rate=rate,
        threshold=threshold,
        verdict=verdict,
        parity_class=parity_class,
        class_counts={k: tuple(v) for k, v in counts.items()},
    )


# --------------------------------------------------------------------------
# Exact oracles


def _settings(mode: Mode, phases) -> tuple[MeasurementSetting, ...]:
    return tuple(MeasurementSetting(mode, p) for p in phases)


def _violation_mass(state: np.ndarray, settings, parity: int) -> float:
    probs = _joint_probs(state, settings)
    return float(probs[PRODUCT_BY_INDEX != parity].sum())


def _noise_branches(p: float):
    # "Replace with probability p" means I, X, Y, Z each carry weight p/4,
    # on top of the 1-p pass-through.
    if p == 0.0:
        return ((1.0, None),)
    branches = [(1.0 - 0.75 * p, None)]
    branches += [(0.25 * p, op) for op in _PAULIS[1:]]
    return tuple(branches)


def exact_violation_rate(
    spec: GhzSpec,
    phases,
    mode: Mode = Mode.SPIN,
    *,
    eve_angle: float | None = None,
    noise_p: float = 0.0,
    noise_qubits: tuple[int, ...] = (1, 3),
) -> float:
    """Exact probability that the outcome product breaks the round parity.

    Enumerates noise branches on the transiting qubits, then (optionally)
    the eavesdropper's two projective outcomes on particle a, then the full
    joint outcome distribution.  The phase triple must pin a deterministic
    parity, otherwise there is no prediction to violate.
    """
    parity = is_super_classical(spec, phases)
    if parity is None:
        raise ValueError(f"phases {tuple(phases)} are not super-classical for {spec}")
    settings = _settings(mode, phases)
    base = ghz_state(spec)
    eve_setting = MeasurementSetting(mode, eve_angle) if eve_angle is not None else None

    total = 0.0
    per_qubit = [_noise_branches(noise_p) for _ in noise_qubits]
    for combo in itertools.product(*per_qubit) if noise_qubits else ((),):
        weight = 1.0
        state = base
        for (w, op), qubit in zip(combo, noise_qubits):
            weight *= w
            if op is not None:
                state = _apply_1q(state, op, qubit)
        if eve_setting is None:
            total += weight * _violation_mass(state, settings, parity)
            continue
        for eve_outcome in (1, -1):
            p_branch, post = project_single(state, 1, eve_setting, eve_outcome)
            if post is None:
                continue
            total += weight * p_branch * _violation_mass(post, settings, parity)
    return total


def exact_violation_probability(
    spec: GhzSpec, phi_a: float, phi_b: float, phi_c: float, eve_angle: float, mode: Mode = Mode.SPIN
) -> float:
    """Branch-enumeration oracle for a noiseless intercept-resend on particle a.

    Sixteen branches in total: Eve's two outcomes times the eight joint
    outcomes of the parties' measurements on the resent state.
    """
    return exact_violation_rate(spec, (phi_a, phi_b, phi_c), mode, eve_angle=eve_angle)


@dataclass(frozen=True)
class SameAngleReport:
    """Oracle value for an interceptor who hits the sender's exact angle.

    ``matches_half_rate`` flags agreement with the 1/2 violation rate a
    mismatched-basis intercept produces; the oracle decides, nothing is
    assumed.
    """

    probability: float
    half_rate: float
    matches_half_rate: bool


def same_angle_violation(
    spec: GhzSpec, phi_a: float, phi_b: float, phi_c: float, mode: Mode = Mode.SPIN, tol: float = 1e-9
) -> SameAngleReport:
    p = exact_violation_probability(spec, phi_a, phi_b, phi_c, eve_angle=phi_a, mode=mode)
    return SameAngleReport(probability=p, half_rate=0.5, matches_half_rate=abs(p - 0.5) <= tol)


@dataclass
class MenuRates:
    """Exact menu-averaged violation rates, split by parity class."""

    retention: float
    by_class: dict  # {+1: rate or None, -1: rate or None}
    overall: float | None


def menu_attack_rates(
    spec: GhzSpec,
    menu,
    mode: Mode = Mode.SPIN,
    *,
    eve_angle: float | None = None,
    guess_from_menu: bool = False,
    noise_p: float = 0.0,
) -> MenuRates:
    """Average the exact oracle over retained menu draws (and Eve's guesses).

    All 27 ordered angle triples are enumerated; retained ones weigh equally.
    With ``guess_from_menu`` the rate per triple is additionally averaged
    over Eve guessing uniformly among the three menu angles.
    """
    retained = super_classical_triples(menu, spec)
    menu_angles = tuple(normalize_angle(a) for a in menu)
    sums = {1: [0.0, 0], -1: [0.0, 0]}
    for triple, parity in retained:
        if guess_from_menu:
            rate = sum(
                exact_violation_rate(spec, triple, mode, eve_angle=a, noise_p=noise_p)
                for a in menu_angles
            ) / 3.0
        else:
            rate = exact_violation_rate(spec, triple, mode, eve_angle=eve_angle, noise_p=noise_p)
        sums[parity][0] += rate
        sums[parity][1] += 1
    by_class = {k: (s / n if n else None) for k, (s, n) in sums.items()}
    total_n = sums[1][1] + sums[-1][1]
    overall = (sums[1][0] + sums[-1][0]) / total_n if total_n else None
    return MenuRates(retention=total_n / 27.0, by_class=by_class, overall=overall)


def continuous_attack_rate(
    spec: GhzSpec,
    preference: int,
    mode: Mode = Mode.SPIN,
    *,
    eve_angle: float | None = None,
    noise_p: float = 0.0,
    n_grid: int = 64,
) -> float:
    """Exact rate averaged over a uniformly announced sender angle.

    Used for sessions where the announced angles are drawn from the
    continuum; the receiver pins the parity at ``preference`` each round.
    The integrand is a low-degree trigonometric polynomial of the announced
    angle, so a uniform 64-point grid average is exact.
    """
    total = 0.0
    for k in range(n_grid):
        phi_a = TWO_PI * k / n_grid
        phi_c = 0.0
        phi_b = solve_bob_phase(spec, phi_a, phi_c, preference)
        total += exact_violation_rate(
            spec, (phi_a, phi_b, phi_c), mode, eve_angle=eve_angle, noise_p=noise_p
        )
    return total / n_grid


def menu_attack_summary(spec: GhzSpec, menu, mode: Mode = Mode.SPIN, noise_p: float = 0.0) -> dict:
    """The three natural averagings of the intercept-resend violation rate.

    Returns the rate averaged jointly over retained menu draws and Eve's
    guesses, the menu-averaged rate per fixed Eve angle, and the
    guess-averaged rate per retained triple.
    """
    menu_angles = tuple(normalize_angle(a) for a in menu)
    joint = menu_attack_rates(spec, menu, mode, guess_from_menu=True, noise_p=noise_p).overall
    by_eve = {
        a: menu_attack_rates(spec, menu, mode, eve_angle=a, noise_p=noise_p).overall
        for a in menu_angles
    }
    by_triple = {
        triple: sum(
            exact_violation_rate(spec, triple, mode, eve_angle=a, noise_p=noise_p)
            for a in menu_angles
        )
        / 3.0
        for triple, _ in super_classical_triples(menu, spec)
    }
    return {"joint_average": joint, "by_eve_angle": by_eve, "by_triple": by_triple}


# --------------------------------------------------------------------------
# Monte-Carlo estimators (same channel pipeline as the oracles)


def _play_attacked_round(state, settings, mode, eve_angle, noise, rng):
    if noise.p > 0.0:
        state = apply_noise(state, 1, noise, rng)
        state = apply_noise(state, 3, noise, rng)
    if eve_angle is not None:
        state, _ = eve_intercept_resend(state, eve_angle, rng, mode)
    return sample_joint(state, settings, rng)


def monte_carlo_violation_rate(
    spec: GhzSpec,
    phases,
    mode: Mode = Mode.SPIN,
    *,
    eve_angle: float | None = None,
    noise: NoiseModel = NoiseModel.none(),
    n_rounds: int = 2000,
    seed: int = 0,
) -> tuple[int, int]:
    """(violations, rounds) sampled at a fixed super-classical phase triple."""
    parity = is_super_classical(spec, phases)
    if parity is None:
        raise ValueError(f"phases {tuple(phases)} are not super-classical for {spec}")
    settings = _settings(mode, phases)
    base = ghz_state(spec)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    violations = 0
    for _ in range(n_rounds):
        r1, r2, r3 = _play_attacked_round(base, settings, mode, eve_angle, noise, rng)
        violations += int(r1 * r2 * r3 != parity)
    return violations, n_rounds


def monte_carlo_menu_rate(
    spec: GhzSpec,
    menu,
    mode: Mode = Mode.SPIN,
    *,
    parity_class: int = 1,
    eve_angle: float | None = None,
    guess_from_menu: bool = False,
    noise: NoiseModel = NoiseModel.none(),
    n_rounds: int = 4000,
    seed: int = 0,
) -> tuple[int, int]:
    """(violations, checked) over menu-drawn rounds retained in one parity class."""
    menu_angles = tuple(normalize_angle(a) for a in menu)
    base = ghz_state(spec)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    violations = checked = 0
    for _ in range(n_rounds):
        triple = tuple(menu_angles[rng.integers(3)] for _ in range(3))
        parity = is_super_classical(spec, triple)
        angle = menu_angles[rng.integers(3)] if guess_from_menu else eve_angle
        if parity != parity_class:
            continue
        outcome = _play_attacked_round(base, _settings(mode, triple), mode, angle, noise, rng)
        checked += 1
        violations += int(outcome[0] * outcome[1] * outcome[2] != parity)
    return violations, checked


def _monte_carlo_continuous_rate(
    spec, preference, mode, *, eve_angle, noise, n_rounds, seed
) -> tuple[int, int]:
    base = ghz_state(spec)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    violations = 0
    for _ in range(n_rounds):
        phi_a = rng.uniform(0.0, TWO_PI)
        phi_c = rng.uniform(0.0, TWO_PI)
        phi_b = solve_bob_phase(spec, phi_a, phi_c, preference)
        settings = _settings(mode, (phi_a, phi_b, phi_c))
        r1, r2, r3 = _play_attacked_round(base, settings, mode, eve_angle, noise, rng)
        violations += int(r1 * r2 * r3 != preference)
    return violations, n_rounds


def calibrate_threshold(config, n_cal: int = 2000, seed: int | None = None) -> float:
    """Midpoint threshold between the noise-only and noise-plus-Eve rates.

    The noise-only rate is estimated from ``n_cal`` Monte-Carlo rounds with
    the eavesdropper switched off; the attacked rate comes from the exact
    oracle under the configured strategy (an intercept-resend guessing from
    the menu, or averaged over announced angles, when none is configured).
    ``config`` is a protocol configuration; only its plain fields are read.
    """
    method = int(config.method)
    noise = config.noise
    noise_p = noise.p if noise.kind is NoiseKind.DEPOLARIZING else 0.0
    cal_seed = (config.seed + 0x5EED) if seed is None else seed

    eve_angle = None
    guess = False
    if config.eve.kind is EveKind.INTERCEPT_RESEND_A and config.eve.angle_policy is AnglePolicy.FIXED_ANGLE:
        eve_angle = config.eve.fixed_angle
    else:
        guess = True  # default attack assumption for calibration

    if method == 1:
        rates = menu_attack_rates(
            config.spec,
            config.menu,
            config.mode,
            eve_angle=eve_angle,
            guess_from_menu=guess and eve_angle is None,
            noise_p=noise_p,
        )
        parity_class = config.detection_parity
        if parity_class is None:
            parity_class = 1 if rates.by_class[1] is not None else -1
        r1 = rates.by_class[parity_class]
        if r1 is None:
            raise NoRetainedRounds(f"menu retains no rounds with parity {parity_class:+d}")
        v0, n0 = monte_carlo_menu_rate(
            config.spec,
            config.menu,
            config.mode,
            parity_class=parity_class,
            noise=noise,
            n_rounds=n_cal,
            seed=cal_seed,
        )
        if n0 == 0:
            raise NoRetainedRounds("calibration run retained no rounds in the designated class")
        r0 = v0 / n0
    else:
        preference = config.bob_parity_preference
        # Averaged over the announced angle, a fixed Eve angle and a random
        # one give the same exact rate; 0.0 stands in when none is set.
        r1 = continuous_attack_rate(
            config.spec,
            preference,
            config.mode,
            eve_angle=eve_angle if eve_angle is not None else 0.0,
            noise_p=noise_p,
        )
        v0, n0 = _monte_carlo_continuous_rate(
            config.spec,
            preference,
            config.mode,
            eve_angle=None,
            noise=noise,
            n_rounds=n_cal,
            seed=cal_seed,
        )
        r0 = v0 / n0
    return 0.5 * (r0 + r1)


# --------------------------------------------------------------------------
# Information-theoretic checks


def mutual_information(joint: dict) -> float:
    """I(V; K) in bits for a joint distribution keyed by (view, key) pairs."""
    pv: dict = {}
    pk: dict = {}
    for (v, k), p in joint.items():
        if p < 0:
            raise ValueError("joint probabilities must be non-negative")
        pv[v] = pv.get(v, 0.0) + p
        pk[k] = pk.get(k, 0.0) + p
    total = sum(pv.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"joint distribution sums to {total!r}, expected 1")
    info = 0.0
    for (v, k), p in joint.items():
        if p > 0.0:
            info += p * math.log2(p / (pv[v] * pk[k]))
    return info


def impersonation_view_joint(
    config, phi_a: float | None = None, phi_c: float | None = None, leak_alice_bit: bool = False, n_grid: int = 8
) -> dict:
    """Exact joint distribution of (Eve-as-Charlie's view, key bit) for one round.

    The view is (phi_a, phi_c, D, C).  For menu-driven sessions the angles
    enumerate the retained menu draws; for continuous sessions they are
    either the given pair or a uniform grid (the angles are chosen
    independently of the key, so the grid cannot manufacture information).
    ``leak_alice_bit`` appends the sender's measured bit to the view, a
    sanity knob that must drive the information to one full bit.
    """
    spec, mode = config.spec, config.mode
    if int(config.method) == 1:
        retained = super_classical_triples(config.menu, spec)
        weighted = [(t, 1.0 / len(retained)) for t, _ in retained]
    elif phi_a is not None and phi_c is not None:
        phi_b = solve_bob_phase(spec, phi_a, phi_c, config.bob_parity_preference)
        weighted = [((phi_a, phi_b, phi_c), 1.0)]
    else:
        weighted = []
        for i, j in itertools.product(range(n_grid), repeat=2):
            fa, fc = TWO_PI * i / n_grid, TWO_PI * j / n_grid
            fb = solve_bob_phase(spec, fa, fc, config.bob_parity_preference)
            weighted.append(((fa, fb, fc), 1.0 / n_grid**2))

    base = ghz_state(spec)
    joint: dict = {}
    for (fa, fb, fc), weight in weighted:
        probs = _joint_probs(base, _settings(mode, (fa, fb, fc)))
        for idx in range(8):
            p = float(probs[idx])
            if p == 0.0:
                continue
            a_bit = (idx >> 2) & 1
            c_bit = idx & 1
            for key_bit in (0, 1):
                d_bit = a_bit ^ key_bit
                view = (fa, fc, d_bit, c_bit)
                if leak_alice_bit:
                    view = view + (a_bit,)
                joint[(view, key_bit)] = joint.get((view, key_bit), 0.0) + 0.5 * weight * p
    return joint


def eve_key_information(config, phi_a: float | None = None, phi_c: float | None = None) -> float:
    """Bits of key information in the impersonating eavesdropper's exact view.

    Enumerated exactly for a single key bit; rounds are independent and key
    bits i.i.d., so for key lengths up to the enumeration cap the total is
    the per-round information times the length.
    """
    if config.eve.kind is not EveKind.IMPERSONATE_CHARLIE:
        raise ValueError("eve_key_information applies to the impersonation strategy")
    if config.key_length > 4:
        raise ValueError("exact enumeration is capped at 4 key bits")
    per_round = mutual_information(impersonation_view_joint(config, phi_a, phi_c))
    return config.key_length * per_round


def pad_reuse_information(
    spec_first: GhzSpec, settings_first, spec_second: GhzSpec, settings_second
) -> float:
    """I((D1, D2); K) when one key pads two different measured bits.

    D1 and D2 are the two published XOR bits of back-to-back sessions that
    reuse the key K; the senders' bits come from the exact outcome
    distributions of two independent rounds.
    """
    probs1 = _joint_probs(ghz_state(spec_first), settings_first)
    probs2 = _joint_probs(ghz_state(spec_second), settings_second)
    p_a1 = [float(probs1[[0, 1, 2, 3]].sum()), float(probs1[[4, 5, 6, 7]].sum())]
    p_a2 = [float(probs2[[0, 1, 2, 3]].sum()), float(probs2[[4, 5, 6, 7]].sum())]
    joint: dict = {}
    for key_bit in (0, 1):
        for a1 in (0, 1):
            for a2 in (0, 1):
                view = (a1 ^ key_bit, a2 ^ key_bit)
                p = 0.5 * p_a1[a1] * p_a2[a2]
                joint[(view, key_bit)] = joint.get((view, key_bit), 0.0) + p
    return mutual_information(joint)
