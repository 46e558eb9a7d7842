"""Command-line front end.

Exit codes: 0 certified or success, 1 refuted or invalid, 2 inconclusive,
64 usage error, 65 malformed input data.  Every rational in a report is a
reduced ``"p/q"`` string and key order is fixed, so identical invocations
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import systems
from .conjugacy import ConjugacyError, ConjugacyMap, conjugate, transport_verdict
from .homogeneity import equal_arc_cover, genericity_probe
from .ifs import (
    DescriptorError,
    IFSystem,
    MapSpec,
    PseudoOrbit,
    SymbolWord,
    make_pseudo_orbit_from_generator,
    orbit,
    ratios,
    validate_pseudo_orbit,
    witness_valid,
)
from .shadowing import (
    EXACT,
    ROTATION_DP,
    SHADOWING,
    WEAK,
    Verdict,
    VerificationOutcome,
    check_shadowing,
    check_weak_shadowing,
    rotation_dp_shadowing,
)
from .space import Point, as_fraction, frac_str

EXIT_OK, EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65

BUILTIN: dict[str, Callable[[], IFSystem]] = {
    "cantor": systems.cantor,
    "doubling": systems.doubling,
    "doubling-pair": systems.doubling_pair,
    "two-rotations": systems.two_rotations,
    "golden": systems.golden_rotation,
    "identity": systems.identity,
}

# the counterexample's pseudo-orbit comes from a rational rotation near the
# golden mean; 13/21 misses it by about 1.0136e-3, so the default tolerance
# is the first round value above that gap
COUNTEREXAMPLE_ALPHA = Fraction(13, 21)
COUNTEREXAMPLE_DELTA = Fraction(11, 10000)


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from exc


def _read_json(path: str, what: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: malformed JSON at line {exc.lineno} column {exc.colno}") from exc


def load_system(spec: str) -> IFSystem:
    """A descriptor path, or the name of a packaged system."""
    if spec in BUILTIN and not Path(spec).exists():
        return BUILTIN[spec]()
    data = _read_json(spec, "system")
    try:
        return IFSystem.from_json(data)
    except DescriptorError as exc:
        lead = "system descriptor, field" if exc.field_name else "system descriptor:"
        raise InputError(f"{lead} {exc}") from exc


def load_pseudo(system: IFSystem, path: str, delta: Fraction | None) -> PseudoOrbit:
    data = _read_json(path, "pseudo-orbit")
    if not isinstance(data, dict) or not isinstance(data.get("points"), list) or not data["points"]:
        raise InputError("pseudo-orbit descriptor (field points): expected a non-empty list")
    try:
        coords = [as_fraction(p) for p in data["points"]]
        radii = [as_fraction(r) for r in data.get("radii", ["0"] * len(coords))]
        pts = tuple(Point(c, system.kind, r) for c, r in zip(coords, radii))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"pseudo-orbit descriptor (field points): {exc}") from exc
    if delta is None:
        if "delta" not in data:
            raise InputError("pseudo-orbit descriptor (field delta): missing; pass --delta")
        try:
            delta = as_fraction(data["delta"])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"pseudo-orbit descriptor (field delta): {exc}") from exc
    if "witness" in data:
        word = SymbolWord.of(data["witness"])
        if len(word) != len(pts) - 1 or not witness_valid(system, pts, word, delta):
            raise InputError("pseudo-orbit descriptor (field witness): not valid at the given delta")
    else:
        word = validate_pseudo_orbit(system, pts, delta)
        if word is None:
            raise InputError(f"pseudo-orbit descriptor (field points): not a {frac_str(delta)}-pseudo-orbit")
    return PseudoOrbit(pts, delta, word, int(data.get("index_offset", 0)))


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror}") from exc


def _verdict_code(outcome: VerificationOutcome) -> int:
    return {Verdict.CERTIFIED: EXIT_OK, Verdict.REFUTED: EXIT_REFUTED}.get(outcome.verdict, EXIT_INCONCLUSIVE)


def emit_report(outcome: VerificationOutcome, fmt: str = "json") -> str:
    """Serialized verdict; ``method`` and ``horizon`` are always present."""
    data = outcome.to_json()
    if fmt == "json":
        return _dump(data)
    buf = io.StringIO()
    cols = ["verdict", "property", "method", "horizon", "epsilon", "nodes", "refuted_at"]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    writer.writerow(["" if data.get(c) is None else data.get(c) for c in cols])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    system = load_system(args.system)
    if args.horizon is None:
        raise UsageError("simulate needs --horizon")
    if args.word:
        word = SymbolWord.of(args.word.split(","))
    else:
        if args.seed is None:
            raise UsageError("random words need --seed")
        rng = random.Random(args.seed)
        word = SymbolWord.of([rng.choice(system.symbols) for _ in range(args.horizon)])
    try:
        word.check_alphabet(system)
    except KeyError as exc:
        raise InputError(f"word: unknown symbol {exc}") from exc
    seg = orbit(system, word, args.x0 if args.x0 is not None else Fraction(0), args.horizon)
    _emit(_dump(seg.to_json()), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    system = load_system(args.system)
    data = _read_json(_need(args.pseudo, "--pseudo"), "pseudo-orbit")
    delta = args.delta
    if delta is None:
        try:
            delta = as_fraction(data["delta"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("pseudo-orbit descriptor (field delta): missing; pass --delta") from exc
    try:
        pts = [Point(as_fraction(p), system.kind) for p in data["points"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"pseudo-orbit descriptor (field points): {exc}") from exc
    word = validate_pseudo_orbit(system, pts, delta)
    report = {"valid": word is not None, "delta": frac_str(delta), "witness": None if word is None else list(word.head)}
    _emit(_dump(report), args.out)
    return EXIT_OK if word is not None else EXIT_REFUTED


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"missing required flag {flag}")
    return value


def _check(args, prop: str) -> int:
    system = load_system(args.system)
    pseudo = load_pseudo(system, _need(args.pseudo, "--pseudo"), args.delta)
    eps = _need(args.eps, "--eps")
    if prop == WEAK:
        outcome = check_weak_shadowing(system, pseudo, eps, budget=args.budget, horizon=args.horizon)
    elif args.method == ROTATION_DP:
        try:
            outcome = rotation_dp_shadowing(system, pseudo, eps, horizon=args.horizon, budget=args.budget)
        except ValueError as exc:
            raise InputError(f"system: {exc}") from exc
    else:
        outcome = check_shadowing(system, pseudo, eps, budget=args.budget, horizon=args.horizon)
    _emit(emit_report(outcome, args.format), args.out)
    return _verdict_code(outcome)


def run_counterexample(
    eps=Fraction(1, 5),
    delta=COUNTEREXAMPLE_DELTA,
    alpha=COUNTEREXAMPLE_ALPHA,
    length: int = 1000,
    weak_horizon: int = 100,
    bits: int = 64,
    budget: int = 10**6,
) -> tuple[PseudoOrbit, VerificationOutcome, VerificationOutcome]:
    """Two golden rotations differing by 1/2 against a rational rotation's orbit.

    Returns the pseudo-orbit, the commuting-rotation refutation of shadowing
    over ``length`` steps, and the weak-shadowing certificate at ``weak_horizon``.
    """
    system = systems.two_rotations(bits)
    pseudo = make_pseudo_orbit_from_generator(system, MapSpec.rotation(alpha), Fraction(0), length, delta)
    strong = rotation_dp_shadowing(system, pseudo, eps, budget=budget)
    weak = check_weak_shadowing(system, pseudo, eps, budget=budget, horizon=weak_horizon)
    return pseudo, strong, weak


def cmd_counterexample(args) -> int:
    delta = args.delta if args.delta is not None else COUNTEREXAMPLE_DELTA
    eps = args.eps if args.eps is not None else Fraction(1, 5)
    length = args.horizon if args.horizon is not None else 1000
    try:
        pseudo, strong, weak = run_counterexample(eps, delta, args.alpha, length, args.weak_horizon, budget=args.budget)
    except ValueError as exc:
        raise InputError(f"counterexample: {exc}") from exc
    report = {
        "system": "two-rotations",
        "alpha": frac_str(args.alpha),
        "delta": frac_str(delta),
        "epsilon": frac_str(eps),
        "pseudo_orbit_length": pseudo.length,
        "shadowing": strong.to_json(),
        "weak_shadowing": weak.to_json(),
    }
    _emit(_dump(report), args.out)
    return EXIT_OK if strong.refuted and weak.certified else EXIT_INCONCLUSIVE


def cmd_ratios(args) -> int:
    rows = []
    for spec in args.system or []:
        system = load_system(spec)
        r = ratios(system)
        rows.append(
            {
                "system": system.name or spec,
                "beta": frac_str(r.beta),
                "alpha": frac_str(r.alpha),
                "contracting": r.contracting,
                "expanding": r.expanding,
            }
        )
    if not rows:
        raise UsageError("ratios needs at least one --system")
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["system", "beta", "alpha", "contracting", "expanding"])
        for row in rows:
            writer.writerow([row["system"], row["beta"], row["alpha"], str(row["contracting"]).lower(), str(row["expanding"]).lower()])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_dump(rows), args.out)
    return EXIT_OK


def cmd_probe(args) -> int:
    system = load_system(args.system)
    if args.seed is None:
        raise UsageError("probe-genericity needs --seed")
    if not system.all_invertible:
        raise InputError("system: the probe needs invertible maps")
    cover = equal_arc_cover(system.kind, args.arcs, args.overlap)
    horizon = args.horizon if args.horizon is not None else 8
    report = genericity_probe(system, cover, args.gamma, args.trials, horizon, seed=args.seed, budget=args.budget)
    _emit(_dump(report.to_json()), args.out)
    return EXIT_OK if not report.violations else EXIT_REFUTED


def cmd_transport(args) -> int:
    F = load_system(args.system)
    try:
        c = ConjugacyMap.from_json(_read_json(_need(args.conjugacy, "--conjugacy"), "conjugacy"))
        G = conjugate(F, c)
    except ConjugacyError as exc:
        raise InputError(str(exc)) from exc
    pseudo = load_pseudo(G, _need(args.pseudo, "--pseudo"), args.delta)
    prop = SHADOWING if args.property == "shadowing" else WEAK
    try:
        outcome = transport_verdict(F, G, c, pseudo, _need(args.eps, "--eps"), prop, args.budget, args.horizon)
    except ConjugacyError as exc:
        raise InputError(str(exc)) from exc
    _emit(emit_report(outcome, args.format), args.out)
    return _verdict_code(outcome)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shadowlab", description="Exact shadowing verification for iterated function systems.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, system=True):
        if system:
            p.add_argument("--system", help="descriptor path or packaged system name")
        p.add_argument("--eps", type=_rational)
        p.add_argument("--delta", type=_rational)
        p.add_argument("--horizon", type=int)
        p.add_argument("--budget", type=int, default=10**6)
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out")
        return p

    p = common(sub.add_parser("simulate", help="print an orbit segment"))
    p.add_argument("--x0", type=_rational)
    p.add_argument("--word", help="comma-separated symbols; random with --seed otherwise")
    p.set_defaults(run=cmd_simulate)

    p = common(sub.add_parser("validate", help="check a pseudo-orbit and find its least witness"))
    p.add_argument("--pseudo")
    p.set_defaults(run=cmd_validate)

    for name, prop in (("check-shadowing", SHADOWING), ("check-weak-shadowing", WEAK)):
        p = common(sub.add_parser(name, help=f"decide {prop} up to a finite horizon"))
        p.add_argument("--pseudo")
        if prop == SHADOWING:
            p.add_argument("--method", choices=(EXACT, ROTATION_DP), default=EXACT)
        p.set_defaults(run=lambda a, prop=prop: _check(a, prop))

    p = common(sub.add_parser("counterexample", help="golden two-rotation system: shadowing fails, weak holds"), system=False)
    p.add_argument("--alpha", type=_rational, default=COUNTEREXAMPLE_ALPHA)
    p.add_argument("--weak-horizon", type=int, default=100)
    p.set_defaults(run=cmd_counterexample)

    p = sub.add_parser("ratios", help="contraction and expansion ratios")
    p.add_argument("--system", action="append")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(run=cmd_ratios)

    p = common(sub.add_parser("probe-genericity", help="compare cover traces of F and nearby systems"))
    p.add_argument("--gamma", type=_rational, default=Fraction(1, 1000))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--arcs", type=int, default=4)
    p.add_argument("--overlap", type=_rational, default=Fraction(1, 200))
    p.set_defaults(run=cmd_probe)

    p = common(sub.add_parser("transport", help="verify a conjugate system through the conjugacy"))
    p.add_argument("--conjugacy")
    p.add_argument("--pseudo", help="pseudo-orbit of the conjugated system")
    p.add_argument("--property", choices=("weak-shadowing", "shadowing"), default="weak-shadowing")
    p.set_defaults(run=cmd_transport)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("missing command")
        if getattr(args, "system", None) is None and args.command not in ("counterexample",):
            raise UsageError("missing required flag --system")
        return args.run(args)
    except UsageError as exc:
        sys.stderr.write(f"shadowlab: usage error: {exc}\n")
        return EXIT_USAGE
    except InputError as exc:
        sys.stderr.write(f"shadowlab: input error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
