"""Command line entry point.

    pmgksl run <config.json> [--check] [--out-dir DIR] [--tolerance k=v ...]
    pmgksl compare <a.csv> <b.csv> [--columns c1,c2] [--max X]
    pmgksl fmo-report <config.json> [--out-dir DIR]

Exit codes: 0 ok, 1 usage, 2 validation failure, 3 numerical-invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import ConfigError, load_config
from .io import GridMismatch, compare, write_json
from .scenarios import FMOParams, fmo_derive

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger("pseudomode_gksl")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tolerance(s: str) -> tuple[str, float]:
    k, sep, v = s.partition("=")
    if not sep or k not in ("herm", "tr", "psd"):
        raise argparse.ArgumentTypeError(f"expected herm=, tr= or psd=, got {s!r}")
    try:
        val = float(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value {v!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError("tolerances must be positive")
    return k, val


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pmgksl", description="Pseudomode / GKSL dynamics runner")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("config")
    r.add_argument("--check", action="store_true", help="exit 3 if any invariant check fails")
    r.add_argument("--out-dir", default=None)
    r.add_argument("--tolerance", type=_tolerance, action="append", default=[], metavar="K=V")

    c = sub.add_parser("compare", help="sup/L2 distance between two trajectory CSVs")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--columns", default=None, help="comma-separated column names (default: all shared)")
    c.add_argument("--max", type=float, default=None, help="exit 3 if the sup distance exceeds this")

    f = sub.add_parser("fmo-report", help="derived FMO dimer parameters as JSON")
    f.add_argument("config")
    f.add_argument("--out-dir", default=None)
    return ap


def _cmd_run(args) -> int:
    from .runner import run

    cfg = load_config(args.config)
    if args.tolerance:
        cfg.tolerances = cfg.tolerances.replace(**dict(args.tolerance))
    outcomes = run(cfg, args.out_dir)
    failed = [o.name for o in outcomes if not o.checks_passed]
    for o in outcomes:
        for name, chk in o.summary["checks"].items():
            print(f"{'PASS' if chk['pass'] else 'FAIL'}  {o.name}: {name}  ({chk['value']:.3e} vs {chk['limit']:.1e})")
        print(f"wrote {', '.join(o.files)}")
    if args.check and failed:
        print(f"invariant checks failed for: {', '.join(failed)}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_compare(args) -> int:
    cols = args.columns.split(",") if args.columns else None
    rep = compare(args.a, args.b, cols)
    print(json.dumps(rep, indent=2))
    if args.max is not None and rep["sup"] > args.max:
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_fmo(args) -> int:
    cfg = load_config(args.config)
    if cfg.scenario != "fmo":
        raise ConfigError(f"fmo-report needs an 'fmo' config, got {cfg.scenario!r}")
    p = cfg.params
    rep = fmo_derive(FMOParams(p["omega0"], p["beta_inv"], p["S"], p["gamma0_half"]))
    print(json.dumps(rep, indent=2, sort_keys=True))
    out_dir = args.out_dir or cfg.out_dir
    if out_dir:
        write_json(f"{out_dir}/{cfg.name}_report.json", rep)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "compare": _cmd_compare, "fmo-report": _cmd_fmo}[args.cmd]
    try:
        return handler(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, GridMismatch, KeyError, ValueError) as exc:
        # ValueError covers module-level rejections (NotDissipative, InvalidStateError, ...)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
