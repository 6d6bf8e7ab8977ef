"""Command-line interface: ``robustkern {test,experiment,verify}``.

Exit codes: 0 ran (whatever the decision), 1 verification failed,
2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
import warnings

from robustkern import __name__ as _pkg
from robustkern.config import load_experiment
from robustkern.errors import ConfigError, DataError, PermutationCountWarning, PowerlessTestWarning
from robustkern.harness import run_experiment
from robustkern.io import load_csv
from robustkern.kernels import KernelSpec
from robustkern.statistics import HSIC, MMD, PairedData, TwoSampleData
from robustkern.testing import TestConfig, run_test
from robustkern.verify import run_checks

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3

CSV_HEADER = ["c", "test_name", "rejection_rate", "wilson_lo", "wilson_hi", "repetitions", "seed"]


def _bandwidth(value: str):
    if value == "median":
        return None
    try:
        bw = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bandwidth must be a number or 'median', got {value!r}") from None
    if not bw > 0:
        raise argparse.ArgumentTypeError(f"bandwidth must be positive, got {value!r}")
    return bw


def _seed(value: str) -> int:
    s = int(value)
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return s


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robustkern", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run one test on CSV data")
    t.add_argument("--kind", choices=["mmd", "hsic"], required=True)
    t.add_argument("--procedure", choices=["classical", "dc", "dp"], required=True)
    t.add_argument("--y", help="first sample CSV (mmd)")
    t.add_argument("--z", help="second sample CSV (mmd)")
    t.add_argument("--pairs", help="paired CSV (hsic); the first --dy columns are y")
    t.add_argument("--dy", type=int, help="number of y columns in --pairs")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--r", type=int, default=0)
    t.add_argument("--permutations", type=int, default=500)
    t.add_argument("--epsilon", type=float)
    t.add_argument("--beta", type=float)
    t.add_argument("--kernel", choices=["gaussian", "laplace"], default="gaussian")
    t.add_argument("--bandwidth", type=_bandwidth, default=None, help="number or 'median' (default)")
    t.add_argument("--seed", type=_seed, help="defaults to fresh system entropy (recorded in the report)")
    t.add_argument("--out", help="write the JSON report here")

    e = sub.add_parser("experiment", help="run a rejection-rate sweep from a JSON config")
    e.add_argument("config")
    e.add_argument("--out", help="CSV output path (default: stdout)")

    v = sub.add_parser("verify", help="run the oracle cross-checks")
    v.add_argument("--seed", type=_seed)
    v.add_argument("--trials", type=int, default=40)
    v.add_argument("--sabotage", action="store_true", help=argparse.SUPPRESS)
    return parser


def _load_test_data(args):
    if args.kind == "mmd":
        if not args.y or not args.z:
            raise ConfigError("--kind mmd needs --y and --z")
        return TwoSampleData(load_csv(args.y), load_csv(args.z))
    if not args.pairs or args.dy is None:
        raise ConfigError("--kind hsic needs --pairs and --dy")
    arr = load_csv(args.pairs)
    if not 1 <= args.dy < arr.shape[1]:
        raise ConfigError(f"--dy must lie in [1, {arr.shape[1] - 1}] for {arr.shape[1]} columns")
    return PairedData(arr[:, : args.dy], arr[:, args.dy :])


def cmd_test(args) -> int:
    seed = args.seed if args.seed is not None else secrets.randbits(64)
    kernel = KernelSpec(args.kernel, args.bandwidth)
    config = TestConfig(
        alpha=args.alpha,
        r=args.r,
        num_permutations=args.permutations,
        seed=seed,
        epsilon=args.epsilon,
        beta=args.beta,
    )
    if args.procedure == "dp":
        config.resolved_epsilon()
    data = _load_test_data(args)
    kind = MMD(kernel) if args.kind == "mmd" else HSIC(kernel, kernel)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PowerlessTestWarning)
        warnings.simplefilter("always", PermutationCountWarning)
        report = run_test(args.procedure, data, kind, config)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    decision = "reject H0" if report.reject else "accept H0"
    print(
        f"{args.procedure}{args.kind}: {decision} "
        f"(statistic {report.statistic_observed:.6g}, threshold {report.threshold:.6g}, "
        f"alpha {report.adjusted_level:.4g}, r {report.r}, seed {report.seed})"
    )
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def curves_to_csv(spec, points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        for test in spec.tests:
            lo, hi = p.wilson_interval[test.name]
            w.writerow([p.c, test.name, repr(p.rejection_rate[test.name]), repr(lo), repr(hi),
                        p.repetitions, spec.base_seed])
    return buf.getvalue()


def cmd_experiment(args) -> int:
    spec = load_experiment(args.config)
    points = run_experiment(spec)
    text = curves_to_csv(spec, points)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise ConfigError(f"--trials must be >= 1, got {args.trials}")
    seed = args.seed if args.seed is not None else secrets.randbits(64)
    print(f"verify: seed {seed}, trials {args.trials}")
    results = run_checks(seed, args.trials, sabotage=args.sabotage)
    for res in results:
        print(f"[{'PASS' if res.passed else 'FAIL'}] {res.name}: {res.detail}")
    failed = [r for r in results if not r.passed]
    if failed:
        print(json.dumps({"check": failed[0].name, "counterexample": failed[0].counterexample}))
        return EXIT_FAILED
    return EXIT_OK


COMMANDS = {"test": cmd_test, "experiment": cmd_experiment, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DataError as exc:
        print(f"{_pkg}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigError as exc:
        print(f"{_pkg}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
