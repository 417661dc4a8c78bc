"""``convhelm`` command line: quotients, a1-table, fem-errors, validate.

Exit codes: 0 success, 1 validation failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import sys

from convhelm import experiments, validation
from convhelm.config import ConfigError, load_config

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2

# flag destination -> config-file key
_FLAG_KEYS = {
    "scheme": "scheme",
    "formulation": "formulation",
    "mach": "mach",
    "theta": "theta",
    "omega": "omega",
    "out": "out",
    "h_max": "h_max",
    "samples": "samples",
    "grid": "grid",
    "workers": "workers",
    "memory_cap_gb": "memory_cap_gb",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _add_sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file; flags override its entries")
    p.add_argument("--scheme", help="comma list of P1C, RT1NC, RT2NC")
    p.add_argument("--formulation", help="convected, helmholtz or all")
    p.add_argument("--mach", help="comma list of Mach numbers in [0, 1)")
    p.add_argument("--theta", help="comma list of angles in [0, pi]; 'pi/4' style accepted")
    p.add_argument("--omega", help="comma list of frequencies (fem-errors)")
    p.add_argument("--out", help="output directory (default: results)")
    p.add_argument("--svg", action="store_true", default=None, help="also write SVG charts")
    p.add_argument("--allow-large", action="store_true", default=None, help="permit omega > 40")
    p.add_argument("--h-max", dest="h_max", help="upper end of the H range (quotients)")
    p.add_argument("--samples", help="kappa samples per curve (quotients)")
    p.add_argument("--grid", help="'kappa' (uniform kappa) or 'H' (bisection to a uniform H grid)")
    p.add_argument("--workers", help="process-pool size")
    p.add_argument("--memory-cap-gb", dest="memory_cap_gb", help="refuse FEM sweeps above this estimate")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="convhelm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("quotients", "phase/group dispersion quotients against H"),
        ("a1-table", "closed-form and extrapolated leading error coefficients"),
        ("fem-errors", "energy-norm errors of plane-wave solves at omega^3 h^2 = 1"),
    ):
        _add_sweep_flags(sub.add_parser(name, help=help_text))
    v = sub.add_parser("validate", help="run all self-check suites")
    v.add_argument("--skip-fem", action="store_true", help="omit the FEM refinement suite")
    return parser


def _overrides(args) -> dict[str, str]:
    out = {key: str(getattr(args, dest)) for dest, key in _FLAG_KEYS.items() if getattr(args, dest) is not None}
    if args.svg:
        out["svg"] = "true"
    if args.allow_large:
        out["allow_large"] = "true"
    return out


_COMMANDS = {
    "quotients": experiments.cmd_quotients,
    "a1-table": experiments.cmd_a1_table,
    "fem-errors": experiments.cmd_fem_errors,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        results = validation.run_all(fem=not args.skip_fem)
        print(validation.report(results))
        ok = all(r.passed for r in results)
        print("validation passed" if ok else "validation FAILED")
        return EXIT_OK if ok else EXIT_VALIDATION
    try:
        config = load_config(args.config, _overrides(args))
        written = _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except experiments.MemoryCapError as exc:
        print("refusing FEM sweep: estimated memory exceeds the cap", file=sys.stderr)
        print(exc.report, file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
