"""Command-line interface.

Exit codes: 0 success, 1 output file could not be written, 2 unstable
working point (single-point runs), 3 invalid configuration, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import harness
from .dynamics import is_stable
from .errors import BosonicApproximationError, ConfigError, InvalidParameterError, NumericalError, UnstableSystemError
from .model import build_drift

EXIT_OK = 0
EXIT_IO = 1
EXIT_UNSTABLE = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return harness.parse_config(text)


def cmd_point(args):
    spec = _load(args.config)
    base, wp = harness.resolve(spec)
    row = harness.evaluate_point(base)
    if row.error is not None:
        print(row.error, file=sys.stderr)
        return EXIT_NUMERICAL
    if not row.stable:
        print(f"unstable: max Re(lambda) = {row.max_real_part:.6g} rad/s", file=sys.stderr)
        return EXIT_UNSTABLE
    rep = row.report
    if args.json:
        out = {"report": rep.as_dict(), "effective_params": harness._effective_dict(base),
               "working_point": harness._working_point_dict(wp)}
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        for name in ("E_mf", "E_ma", "E_af", "n_eff"):
            print(f"{name:>14s}  {getattr(rep, name):.12g}")
        print(f"{'class':>14s}  {rep.tripartite}")
        print(f"{'max_real_part':>14s}  {rep.max_real_part:.6g}")
    return EXIT_OK


def cmd_sweep(args):
    spec = _load(args.config)
    if spec.axis is None:
        raise ConfigError("sweep requires axis, start and stop in the config")
    result = harness.run_sweep(spec, workers=args.workers)
    harness.write(result, args.out, args.format)
    return EXIT_OK


def cmd_preset(args):
    result = harness.run_sweep(harness.load_preset(args.name), workers=args.workers)
    harness.write(result, args.out, args.format)
    return EXIT_OK


def cmd_validate(args):
    spec = _load(args.config)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        base, wp = harness.resolve(spec)
        info = is_stable(build_drift(base))
    for w in caught:
        print(f"warning: {w.message}")
    if wp is not None:
        for note in wp.warnings:
            print(f"warning: {note}")
    if not info.stable:
        print(f"unstable: max Re(lambda) = {info.max_real_part:.6g} rad/s", file=sys.stderr)
        return EXIT_UNSTABLE
    print(f"ok: stable (max Re(lambda) = {info.max_real_part:.6g} rad/s)")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="tricav", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="entanglement report at the configured base point")
    p.add_argument("--config", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="run the sweep described in a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="run a shipped preset sweep")
    p.add_argument("--name", required=True, choices=harness.PRESETS)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("validate", help="schema, stability and bosonic-validity check")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidParameterError, BosonicApproximationError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnstableSystemError as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
