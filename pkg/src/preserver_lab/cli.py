"""``preserver-lab`` command line: lemma suites, oracle reconstruction, corruption fuzzing.

Exit codes: 0 pass, 1 property failure, 2 usage error, 3 oracle-contract
violation. Every command prints one RunReport JSON document on stdout and
optionally writes it to ``--json PATH``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field

from .matrix import Rng, random_invertible
from .reconstruct import (
    CORRUPTION_MODES,
    OracleContractError,
    StepViolation,
    make_canonical,
    make_corrupted,
    oracle_from_spec,
    reconstruct,
    verify_preserving,
)
from .scalar import as_scalar
from .structure import DEFAULT_LAMBDAS
from .suites import SUITES, SuiteError, check_suite, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONTRACT = 0, 1, 2, 3

FUZZ_MODES = CORRUPTION_MODES + ("none",)


@dataclass
class RunReport:
    command: str
    seed: int
    n_values: list
    trials: int
    passes: int = 0
    failures: list = field(default_factory=list)
    wall_time_ms: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self._start = time.perf_counter()

    def finish(self) -> "RunReport":
        self.wall_time_ms = int((time.perf_counter() - self._start) * 1000)
        if self.passes + len(self.failures) != self.trials:
            raise AssertionError("report bookkeeping: passes + failures != trials")
        return self

    def to_json(self) -> dict:
        out = asdict(self)
        extra = out.pop("extra")
        out.update(extra)
        return out


class UsageError(ValueError):
    pass


def parse_lambda_set(text: str):
    try:
        values = [as_scalar(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError("bad --lambda-set: %s" % exc) from None
    if not values:
        raise UsageError("--lambda-set is empty")
    if any(not v for v in values):
        raise UsageError("--lambda-set must not contain 0")
    return values


def _n_values(args) -> list[int]:
    values = args.n or [3]
    if any(n < 1 for n in values):
        raise UsageError("--n must be positive")
    return values


def cmd_verify_lemma(args) -> tuple[RunReport, int]:
    ns = _n_values(args)
    if args.trials < 0:
        raise UsageError("--trials must be nonnegative")
    lambdas = parse_lambda_set(args.lambda_set)
    try:
        for n in ns:
            check_suite(args.name, n)
    except SuiteError as exc:
        raise UsageError(str(exc)) from None
    report = RunReport("verify-lemma " + args.name, args.seed, ns, args.trials * len(ns))
    for n in ns:
        passes, failures = run_suite(args.name, n, args.trials, args.seed, lambdas)
        report.passes += passes
        report.failures.extend(failures)
    report.finish()
    return report, EXIT_OK if not report.failures else EXIT_FAIL


def cmd_reconstruct(args) -> tuple[RunReport, int]:
    try:
        with open(args.spec) as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("cannot read oracle spec: %s" % exc) from None
    rng = Rng(args.seed)
    try:
        oracle = oracle_from_spec(spec)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError("invalid oracle spec: %s" % exc) from None
    report = RunReport("reconstruct", args.seed, [oracle.n], 1)
    try:
        result = reconstruct(oracle, args.residual, rng)
    except StepViolation as exc:
        report.failures.append({"seed": args.seed, "spec": spec, "violation": exc.to_json()})
        report.extra["queries"] = oracle.query_log
        return report.finish(), EXIT_FAIL
    report.extra["map"] = result.map.to_json()
    report.extra["agreement"] = result.agreement
    report.extra["queries"] = result.queries
    if result.agreement:
        report.passes = 1
    else:
        report.failures.append({"seed": args.seed, "spec": spec, "result": result.to_json()})
    report.finish()
    return report, EXIT_OK if result.agreement else EXIT_FAIL


def _random_canonical(n: int, rng: Rng):
    return make_canonical(
        rng.choice([1, -1]),
        random_invertible(n, rng),
        rng.choice(["id", "transpose"]),
        rng.choice(["id", "conj"]),
    )


def cmd_fuzz(args) -> tuple[RunReport, int]:
    ns = _n_values(args)
    if any(n < 2 for n in ns):
        raise UsageError("fuzz needs n >= 2")
    if args.budget < 1 or args.trials < 0:
        raise UsageError("--budget must be positive and --trials nonnegative")
    report = RunReport("fuzz " + args.mode, args.seed, ns, args.trials * len(ns))
    for n in ns:
        for trial in range(args.trials):
            trial_seed = args.seed ^ trial
            rng = Rng(trial_seed)
            base = _random_canonical(n, rng)
            oracle = base if args.mode == "none" else make_corrupted(base, args.mode, rng)
            pair = verify_preserving(oracle, args.budget, rng)
            # corruption must be caught; an honest canonical map must survive
            ok = (pair is None) if args.mode == "none" else (pair is not None)
            if ok:
                report.passes += 1
                continue
            dump = {
                "n": n,
                "trial": trial,
                "seed": args.seed,
                "trial_seed": trial_seed,
                "base": base.canonical.to_json(),
                "corruption": getattr(oracle, "corruption", None),
            }
            if pair is not None:
                dump["counterexample"] = [m.to_json() for m in pair]
            report.failures.append(dump)
    report.finish()
    return report, EXIT_OK if not report.failures else EXIT_FAIL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="preserver-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, trials_default):
        p.add_argument("--n", type=int, action="append", help="dimension (repeatable)")
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", metavar="PATH", help="also write the report here")

    p = sub.add_parser("verify-lemma", help="run a randomized lemma suite")
    p.add_argument("name", choices=sorted(SUITES), metavar="NAME", help=", ".join(SUITES))
    common(p, 100)
    p.add_argument("--lambda-set", default=",".join(str(v) for v in DEFAULT_LAMBDAS))
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("reconstruct", help="recover a canonical map from an oracle spec file")
    p.add_argument("spec", help="oracle spec JSON")
    p.add_argument("--residual", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("fuzz", help="search a corrupted canonical map for a counterexample pair")
    p.add_argument("mode", choices=FUZZ_MODES)
    common(p, 1)
    p.add_argument("--budget", type=int, default=10_000)
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report, code = args.func(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except OracleContractError as exc:
        print("oracle contract violation: %s" % exc, file=sys.stderr)
        return EXIT_CONTRACT
    text = json.dumps(report.to_json(), indent=2)
    print(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
