"""Command-line front end.

Subcommands: ``simulate`` runs sessions and writes results plus transcripts,
``expectation`` compares the closed-form and numeric expectation values,
``menu-eval`` scores an angle menu, and ``sweep`` tabulates violation rates
against the eavesdropper angle offset or the noise level.

Exit codes are a stable scripting contract: 0 clean, 1 usage or
configuration error, 2 eavesdropper detected.  Every output echoes the seed
(auto-generated when absent), and identical flags plus seed reproduce
identical bytes.  Secret material (keys, private bits, the prepared state,
the parity preference) is blanked unless --reveal-secret is given.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import re
import secrets
import sys

from .adversary import (
    EveStrategy,
    NoiseModel,
    Verdict,
    calibrate_threshold,
    exact_violation_rate,
    menu_attack_summary,
    monte_carlo_violation_rate,
)
from .core import Mode, MeasurementSetting, expectation
from .ghz import GhzSpec, analytic_expectation, ghz_state, is_super_classical, solve_bob_phase, super_classical_triples
from .protocol import (
    ConfigError,
    KeyExhausted,
    Method,
    ProtocolConfig,
    run_method1,
    run_method2,
    run_three_party,
    session_result_to_dict,
)
from .transcript import transcript_to_csv, transcript_to_dict

EXIT_CLEAN = 0
EXIT_ERROR = 1
EXIT_EVE_DETECTED = 2

SEED_ENV_VAR = "GHZQKD_SEED"

_MODES = {"spin": Mode.SPIN, "pol": Mode.POLARIZATION}

_PI_FORM = re.compile(r"(-?)(\d*\.?\d*)\*?pi(?:/(\d+\.?\d*))?")


def parse_angle(text: str) -> float:
    """Decimal radians, or simple pi fractions: 'pi', 'pi/2', '2pi/3', '-pi/4'."""
    s = text.strip().lower().replace(" ", "")
    try:
        return float(s)
    except ValueError:
        pass
    m = _PI_FORM.fullmatch(s)
    if not m:
        raise ValueError(f"cannot parse angle {text!r}")
    sign = -1.0 if m.group(1) else 1.0
    coefficient = float(m.group(2)) if m.group(2) else 1.0
    divisor = float(m.group(3)) if m.group(3) else 1.0
    return sign * coefficient * math.pi / divisor


def _parse_angle_list(text: str, expected: int | None = None) -> tuple[float, ...]:
    values = tuple(parse_angle(part) for part in text.split(","))
    if expected is not None and len(values) != expected:
        raise ValueError(f"expected {expected} comma-separated angles, got {len(values)}")
    return values


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors by default; 2 is reserved for
    # eavesdropper detection here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}")
        if seed < 0:
            raise ConfigError(f"{SEED_ENV_VAR} must be non-negative")
        return seed
    return secrets.randbits(64)


def _write_output(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# simulate


def _build_config(args, seed: int) -> ProtocolConfig:
    mode = _MODES[args.mode]
    spec = GhzSpec.parse(args.spec)
    menu = _parse_angle_list(args.menu, 3) if args.menu else None
    key_length = args.key_length if args.key_length is not None else (4 if args.demo else 128)

    if args.eve == "none":
        eve = EveStrategy.none()
    elif args.eve == "intercept-a":
        eve = EveStrategy.intercept_resend_a(args.eve_angle)
    else:
        eve = EveStrategy.impersonate_charlie()
    noise = NoiseModel.depolarizing(args.noise_p) if args.noise_p > 0 else NoiseModel.none()

    method = Method.METHOD1 if args.method == "1" else Method.METHOD2
    if args.method == "3party":
        method = Method.METHOD1 if menu is not None else Method.METHOD2
    return ProtocolConfig(
        method=method,
        spec=spec,
        mode=mode,
        menu=menu,
        bob_parity_preference=args.parity_preference,
        key_length=key_length,
        max_rounds=args.rounds,
        seed=seed,
        eve=eve,
        noise=noise,
        threshold=args.threshold,
    )


def _run_to_dict(result, transcript, reveal: bool) -> dict:
    return {
        "result": session_result_to_dict(result, reveal),
        "transcript": transcript_to_dict(transcript, reveal),
    }


def _run_to_csv(result, transcript, reveal: bool) -> str:
    report = result.detection
    head = (
        f"# rounds_used={result.rounds_used}\n"
        f"# key_match={result.key_recovered == result.key_sent}\n"
        f"# detection_rate={_fmt(report.rate)}\n"
        f"# detection_threshold={_fmt(report.threshold)}\n"
        f"# verdict={report.verdict.value}\n"
    )
    return head + transcript_to_csv(transcript, reveal)


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    config = _build_config(args, seed)
    if args.threshold is None and config.noise.p > 0:
        config = dataclasses.replace(config, threshold=calibrate_threshold(config))

    if args.method == "3party":
        (r1, t1), (r2, t2) = run_three_party(config)
        runs = [(r1, t1), (r2, t2)]
    elif config.method is Method.METHOD1:
        runs = [run_method1(config)]
    else:
        runs = [run_method2(config)]

    if args.format == "json":
        payload = {"seed": seed, "runs": [_run_to_dict(r, t, args.reveal_secret) for r, t in runs]}
        _write_output(args, json.dumps(payload, indent=2) + "\n")
    else:
        chunks = [f"# seed={seed}\n"]
        for i, (r, t) in enumerate(runs, start=1):
            chunks.append(f"# run={i}\n" + _run_to_csv(r, t, args.reveal_secret))
        _write_output(args, "".join(chunks))

    detected = any(r.detection.verdict is Verdict.EVE_DETECTED for r, _ in runs)
    return EXIT_EVE_DETECTED if detected else EXIT_CLEAN


# --------------------------------------------------------------------------
# expectation


def cmd_expectation(args) -> int:
    spec = GhzSpec.parse(args.spec)
    mode = _MODES[args.mode]
    phases = _parse_angle_list(args.phases, 3)
    analytic = analytic_expectation(spec, phases)
    settings = tuple(MeasurementSetting(mode, p) for p in phases)
    numeric = expectation(ghz_state(spec), settings)
    parity = is_super_classical(spec, phases)
    lines = [
        f"analytic = {_fmt(analytic)}",
        f"numeric = {_fmt(numeric)}",
        f"difference = {_fmt(analytic - numeric)}",
        f"parity = {'none' if parity is None else f'{parity:+d}'}",
    ]
    _write_output(args, "\n".join(lines) + "\n")
    return EXIT_CLEAN


# --------------------------------------------------------------------------
# menu-eval


def cmd_menu_eval(args) -> int:
    spec = GhzSpec.parse(args.spec)
    menu = _parse_angle_list(args.menu, 3)
    triples = super_classical_triples(menu, spec)  # validates distinctness
    lines = [
        "menu = " + ",".join(_fmt(a) for a in menu),
        f"quality = {len(triples)}/27 = {_fmt(len(triples) / 27.0)}",
        "super-classical triples (phi_a,phi_b,phi_c -> parity):",
    ]
    for triple, parity in triples:
        lines.append("  " + ",".join(_fmt(a) for a in triple) + f" -> {parity:+d}")
    _write_output(args, "\n".join(lines) + "\n")
    return EXIT_CLEAN


# --------------------------------------------------------------------------
# sweep


_SWEEP_DEFAULTS = {
    "eve-angle": "0,pi/8,pi/4,3pi/8,pi/2",
    "noise-p": "0,0.25,0.5,0.75,1",
}


def cmd_sweep(args) -> int:
    spec = GhzSpec.parse(args.spec)
    mode = _MODES[args.mode]
    if args.phases:
        phases = _parse_angle_list(args.phases, 3)
        if is_super_classical(spec, phases) is None:
            raise ConfigError(f"phases {args.phases} are not super-classical for {args.spec}")
    else:
        phases = (0.0, solve_bob_phase(spec, 0.0, 0.0, 1), 0.0)
    values = _parse_angle_list(args.values or _SWEEP_DEFAULTS[args.variable])
    seed = _resolve_seed(args)

    lines = [f"# seed={seed}", f"# phases={','.join(_fmt(p) for p in phases)}"]
    if args.menu:
        menu = _parse_angle_list(args.menu, 3)
        summary = menu_attack_summary(spec, menu, mode, noise_p=args.noise_p)
        lines.append(f"# menu_joint_average={_fmt(summary['joint_average'])}")
        for angle, rate in summary["by_eve_angle"].items():
            lines.append(f"# menu_average_at_eve_angle_{_fmt(angle)}={_fmt(rate)}")
        for triple, rate in summary["by_triple"].items():
            label = ",".join(_fmt(a) for a in triple)
            lines.append(f"# guess_average_at_triple_{label}={_fmt(rate)}")
    lines.append("parameter,oracle_rate,monte_carlo_rate,std_error")

    for value in values:
        if args.variable == "eve-angle":
            eve_angle = phases[0] + value
            oracle = exact_violation_rate(spec, phases, mode, eve_angle=eve_angle, noise_p=args.noise_p)
            noise = NoiseModel.depolarizing(args.noise_p) if args.noise_p > 0 else NoiseModel.none()
            v, n = monte_carlo_violation_rate(
                spec, phases, mode, eve_angle=eve_angle, noise=noise, n_rounds=args.mc_rounds, seed=seed
            )
        else:
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"noise probability {value} outside [0, 1]")
            oracle = exact_violation_rate(spec, phases, mode, noise_p=value)
            noise = NoiseModel.depolarizing(value) if value > 0 else NoiseModel.none()
            v, n = monte_carlo_violation_rate(
                spec, phases, mode, noise=noise, n_rounds=args.mc_rounds, seed=seed
            )
        mc = v / n
        stderr = math.sqrt(mc * (1.0 - mc) / n)
        lines.append(f"{_fmt(value)},{_fmt(oracle)},{_fmt(mc)},{_fmt(stderr)}")
    _write_output(args, "\n".join(lines) + "\n")
    return EXIT_CLEAN


# --------------------------------------------------------------------------
# parser


def _add_common(p: _Parser) -> None:
    p.add_argument("--spec", default="+++,-", help="GHZ state as '<signs>,<sign>', e.g. '++-,-'")
    p.add_argument("--mode", choices=sorted(_MODES), default="spin")
    p.add_argument("--seed", type=int, default=None, help=f"falls back to ${SEED_ENV_VAR}, then random")
    p.add_argument("--output", default=None, help="write to this path instead of stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="ghzkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run key-distribution sessions")
    _add_common(p)
    p.add_argument("--method", choices=("1", "2", "3party"), default="1")
    p.add_argument("--menu", default=None, help="three angles, e.g. '0,pi/2,pi'")
    p.add_argument("--key-length", type=int, default=None, dest="key_length")
    p.add_argument("--rounds", type=int, default=None, help="round budget (method 1)")
    p.add_argument("--parity-preference", type=int, choices=(1, -1), default=1, dest="parity_preference")
    p.add_argument("--eve", choices=("none", "intercept-a", "impersonate-charlie"), default="none")
    p.add_argument("--eve-angle", type=parse_angle, default=None, dest="eve_angle")
    p.add_argument("--noise-p", type=float, default=0.0, dest="noise_p")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--reveal-secret", action="store_true", dest="reveal_secret")
    p.add_argument("--demo", action="store_true", help="4-bit walkthrough-scale defaults")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("expectation", help="closed-form vs numeric expectation value")
    _add_common(p)
    p.add_argument("--phases", required=True, help="three angles, e.g. '0,0,0'")
    p.set_defaults(func=cmd_expectation)

    p = sub.add_parser("menu-eval", help="score an angle menu")
    _add_common(p)
    p.add_argument("--menu", required=True)
    p.set_defaults(func=cmd_menu_eval)

    p = sub.add_parser("sweep", help="violation rate vs eavesdropper angle or noise")
    _add_common(p)
    p.add_argument("--variable", choices=("eve-angle", "noise-p"), required=True)
    p.add_argument("--values", default=None, help="comma-separated sweep values")
    p.add_argument("--phases", default=None, help="super-classical base triple")
    p.add_argument("--menu", default=None, help="also print menu-averaged attack rates")
    p.add_argument("--noise-p", type=float, default=0.0, dest="noise_p")
    p.add_argument("--mc-rounds", type=int, default=2000, dest="mc_rounds")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, KeyExhausted, ValueError) as exc:
        print(f"ghzkd: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
