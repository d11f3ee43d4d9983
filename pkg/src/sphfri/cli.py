"""Command-line front end.

    sphfri synthesize --K 5 --seed 1 --output inst.json
    sphfri shc --input inst.json --output flm.json
    sphfri recover --input flm.json --K 5
    sphfri bandlimit --K 6
    sphfri experiment --K 2 4 6 --trials 100 --seed 7 --output errors.csv
    sphfri render --input inst.json --L 8 --output grid.csv

Exit status: 0 success, 1 usage or input error, 2 numerical failure.
"""
import argparse
import json
import logging
import math
import sys

import numpy as np

from .config import Tolerances
from .errors import DomainError, SphFriError
from .experiment import ExperimentConfig, records_to_csv, run_experiment
from .fri_model import DiracEnsemble, InstanceGenConfig, eval_bandlimited, forward_sh_coefficients, generate_instance
from .recovery import recover, required_bandlimit
from .sh_core import ShCoefficients

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write_text(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _write_json(obj, path):
    _write_text(json.dumps(obj, indent=2) + "\n", path)


def _tolerances(overrides):
    tol = Tolerances.from_env()
    changes = {}
    for item in overrides or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            changes[name.strip()] = float(value)
        except ValueError as exc:
            raise UsageError(f"bad tolerance value {value!r}") from exc
    try:
        return tol.replace(**changes)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc


def bandlimit_line(K):
    plan = required_bandlimit(K)
    return f"L={plan.L_required} (proposed), {plan.L_two_k} (2K), {plan.L_k_sqrt_k} (K+√K)"


def cmd_synthesize(args):
    cfg = InstanceGenConfig(K=args.K, rng_seed=args.seed, min_separation=args.min_separation,
                            location_distribution=args.distribution)
    _write_json(generate_instance(cfg).to_dict(), args.output)


def cmd_shc(args):
    sig = DiracEnsemble.from_dict(_read_json(args.input))
    L = args.L or required_bandlimit(sig.K).L_required
    _write_json(forward_sh_coefficients(sig, L).to_dict(), args.output)


def cmd_recover(args):
    flm = ShCoefficients.from_dict(_read_json(args.input))
    result = recover(flm, args.K, tol=_tolerances(args.tol), polish=args.polish)
    _write_json(result.to_dict(), args.output)


def cmd_bandlimit(args):
    if args.K:
        _write_text(bandlimit_line(args.K) + "\n", None)
    else:
        _write_text("".join(f"K={K}: {bandlimit_line(K)}\n" for K in range(1, 21)), None)


def cmd_experiment(args):
    L_policy = "minimal"
    if args.L:
        if len(args.L) != len(args.K):
            raise UsageError("--L needs one value per --K value")
        L_policy = dict(zip(args.K, args.L))
    cfg = ExperimentConfig(
        K_values=tuple(args.K),
        trials=args.trials,
        seed=args.seed,
        L_policy=L_policy,
        workers=args.workers,
        tol=_tolerances(args.tol),
    )
    records = run_experiment(cfg)
    _write_text(records_to_csv(records), args.output)
    failed = sum(r.trials_failed for r in records)
    if failed:
        logging.getLogger(__name__).warning("%d trial(s) failed and were excluded", failed)


def cmd_render(args):
    sig = DiracEnsemble.from_dict(_read_json(args.input), validate=False)
    L = args.L or required_bandlimit(max(sig.K, 1)).L_required
    theta = (np.arange(args.ntheta) + 0.5) * math.pi / args.ntheta
    phi = np.arange(args.nphi) * 2 * math.pi / args.nphi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    vals = eval_bandlimited(sig, L, tt, pp)
    rows = ["theta,phi,re,im\n"]
    for t, p, v in zip(tt.ravel(), pp.ravel(), np.ravel(vals)):
        rows.append(f"{t:.16e},{p:.16e},{v.real:.16e},{v.imag:.16e}\n")
    _write_text("".join(rows), args.output)


def build_parser():
    parser = _Parser(prog="sphfri", description="Recover Diracs on the sphere from spherical-harmonic coefficients.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synthesize", help="random Dirac ensemble as JSON")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-separation", type=float, default=None, help="radians, default pi/(3K)")
    p.add_argument("--distribution", choices=["sphere", "theta"], default="sphere")
    p.add_argument("--output")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("shc", help="instance JSON -> coefficient JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--L", type=int, help="bandlimit, default the smallest admissible for K")
    p.add_argument("--output")
    p.set_defaults(func=cmd_shc)

    p = sub.add_parser("recover", help="coefficient JSON -> recovered Diracs JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--tol", action="append", metavar="NAME=VALUE")
    p.add_argument("--polish", action="store_true", help="one Newton step on the roots")
    p.add_argument("--output")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("bandlimit", help="required bandlimit vs the 2K and K+sqrt(K) rules")
    p.add_argument("--K", type=int)
    p.set_defaults(func=cmd_bandlimit)

    p = sub.add_parser("experiment", help="error-vs-K sweep as CSV")
    p.add_argument("--K", type=int, nargs="+", default=list(range(2, 21, 2)))
    p.add_argument("--L", type=int, nargs="+")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--tol", action="append", metavar="NAME=VALUE")
    p.add_argument("--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("render", help="bandlimited signal on a theta/phi grid as CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--L", type=int)
    p.add_argument("--ntheta", type=int, default=64)
    p.add_argument("--nphi", type=int, default=128)
    p.add_argument("--output")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SphFriError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
