"""Command-line front end: ``sweep``, ``validate`` and ``oracle`` subcommands."""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, ValidityHorizonError
from .sweep import parse_config, run_sweep, run_validation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HORIZON = 3
EXIT_INVARIANT = 4


def _load(args) -> "SweepConfig":
    text = ""
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc.strerror}") from None
    return parse_config(text, out=getattr(args, "out", None), relation=args.relation,
                        harmonic=args.harmonic, order=args.order)


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    result = run_sweep(cfg, write=True)
    sys.stdout.write(result.summary_text())
    return EXIT_HORIZON if result.flagged_fraction > 0.5 else EXIT_OK


def _cmd_validate(args) -> int:
    cfg = _load(args)
    report = run_validation(cfg, seed=args.seed)
    sys.stdout.write(report.text())
    if not report.passed:
        sys.stdout.write(f"first_failure = {report.first_failure}\n")
        return EXIT_INVARIANT
    return EXIT_OK


def _cmd_oracle(args) -> int:
    from .oracle import run_reference_comparison

    rows = run_reference_comparison(n_modes=args.n_modes, T_R=args.T_R, T_L=args.T_L,
                                    trajectory_path=args.trajectory)
    text = "quantity,fitted,predicted,rel_dev\n" + "".join(
        "%s,%.12g,%.12g,%.6g\n" % (r["quantity"], r["fitted"], r["predicted"], r["rel_dev"])
        for r in rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK if max(r["rel_dev"] for r in rows) <= 0.15 else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="envcorr",
                                     description="Band correlations of a driven open oscillator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--relation", choices=("nonresonant", "resonant"))
        p.add_argument("--harmonic", type=int)
        p.add_argument("--order", type=int, help="perturbative order of the Green function")

    p = sub.add_parser("sweep", help="frequency sweep to CSV")
    common(p)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="invariant checks with pass/fail report")
    common(p)
    p.add_argument("--seed", type=int, default=0, help="seed for the identity fuzz")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("oracle", help="discrete-bath reference comparison (minutes)")
    common(p)
    p.add_argument("--out", help="write the comparison table here as CSV")
    p.add_argument("--trajectory", help="dump the tracked covariance trajectory here")
    p.add_argument("--n-modes", type=int, default=400)
    p.add_argument("--T-R", type=float, default=20.0)
    p.add_argument("--T-L", type=float, default=0.0)
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidityHorizonError as exc:
        print(f"validity horizon: {exc}", file=sys.stderr)
        return EXIT_HORIZON


if __name__ == "__main__":
    sys.exit(main())
