"""Command-line front end: ``jchom sweep|figure|check|oracle``."""

from __future__ import annotations

import argparse
import json
import sys

from . import checks
from .sweep import PRESETS, apply_overrides, emit, preset_config, run_sweep, spec_from_config


def _add_sweep_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="override a parameter (delta, kappa, xi, e0, ...), an option "
                        "(observable, linear, ...) or an axis field such as e0.num=21")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--threads", type=int, default=None, help="worker processes")
    p.add_argument("--method", choices=("residue", "quadrature"), default=None,
                   help="evaluation of the correlated-pair integral")
    p.add_argument("--units", choices=("g", "absolute"), default=None,
                   help="'g' (default): all rates in units of g; 'absolute': raw frequencies")
    p.add_argument("--slow-oracles", action="store_true",
                   help="cross-check every point against brute-force quadrature")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jchom",
        description="Two-photon scattering off a Jaynes-Cummings system between two waveguides.")
    sub = parser.add_subparsers(dest="verb", required=True)

    sw = sub.add_parser("sweep", help="run a sweep described by a JSON config and/or a preset")
    sw.add_argument("--config", help="JSON sweep configuration")
    sw.add_argument("--preset", choices=sorted(PRESETS), help="start from a named preset")
    _add_sweep_options(sw)

    fig = sub.add_parser("figure", help="emit the data set of a figure preset")
    fig.add_argument("preset", choices=sorted(PRESETS))
    _add_sweep_options(fig)

    sub.add_parser("check", help="run the quick invariant suite")

    orc = sub.add_parser("oracle", help="compare against brute-force quadrature")
    orc.add_argument("--slow-oracles", action="store_true",
                     help="run the full randomized comparison set")
    return parser


def _config_from_args(args) -> dict:
    config: dict = {}
    if getattr(args, "preset", None):
        config = preset_config(args.preset)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValueError(f"config {args.config} is not valid JSON: {exc}") from exc
        params = {**config.get("params", {}), **loaded.pop("params", {})}
        config.update(loaded)
        config["params"] = params
    config = apply_overrides(config, args.param)
    if args.threads is not None:
        config["threads"] = args.threads
    if args.method is not None:
        config["method"] = args.method
    if args.units is not None:
        config["units"] = args.units
    if args.slow_oracles:
        config["oracle"] = True
    return config


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "check":
        return 0 if checks.run_checks(checks.INVARIANT_CHECKS) else 1
    if args.verb == "oracle":
        return 0 if checks.run_checks(checks.oracle_checks(args.slow_oracles)) else 1
    if args.verb == "sweep" and not (args.config or args.preset):
        print("jchom sweep: give --config and/or --preset", file=sys.stderr)
        return 2
    try:
        spec = spec_from_config(_config_from_args(args))
        rows = run_sweep(spec)
        emit(rows, args.format, args.out)
    except (ValueError, OSError) as exc:
        print(f"jchom: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # jsonschema.ValidationError and friends
        print(f"jchom: invalid configuration: {getattr(exc, 'message', exc)}", file=sys.stderr)
        return 2
    failed = sum(r.status != "ok" for r in rows)
    if failed:
        print(f"jchom: {failed} of {len(rows)} points did not finish cleanly; "
              "see the status column", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
