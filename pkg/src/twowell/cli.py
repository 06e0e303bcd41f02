"""Command-line entry point: ``twowell <command> [flags]``.

Exit codes: 0 success, 2 bad parameters or unmet preconditions,
3 numerical failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import sys

from . import commands
from .config import read_config_file, resolve
from .errors import (ConfigurationError, DomainError, NumericalError, OutputError,
                     ParameterError, TwoWellError)

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

COMMANDS = {
    "contour": commands.cmd_contour,
    "evolve": commands.cmd_evolve,
    "fixed-points": commands.cmd_fixed_points,
    "critical": commands.cmd_critical,
    "fluct": commands.cmd_fluct,
    "quantum": commands.cmd_quantum,
    "sweep": commands.cmd_sweep,
}


def _shared() -> argparse.ArgumentParser:
    sp = argparse.ArgumentParser(add_help=False)
    g = sp.add_argument_group("parameters (reduced or physical, not both)")
    g.add_argument("--xi", type=float, help="reduced interaction g beta N / (2 gamma)")
    g.add_argument("--delta", type=float, help="reduced tilt Delta / (2 gamma)")
    g.add_argument("--n-atoms", type=int, help="total atom number N")
    g.add_argument("--gamma", type=float, help="tunneling amplitude")
    g.add_argument("--gbeta", type=float, help="mean-field coupling g beta")
    g.add_argument("--tilt", type=float, help="physical tilt Delta")
    sp.add_argument("--variant", help="fluctuation variant: paper-s, paper-spm, javanainen, generic")
    sp.add_argument("--out", help="output file ('-' or omitted for stdout)")
    sp.add_argument("--config", help="key = value file; flags override it")
    sp.add_argument("--grid", help="contour grid NXxNPHI (default 401x400)")
    sp.add_argument("--tau-end", type=float, help="integration end in reduced time")
    sp.add_argument("--eq9-as-printed", action="store_true", default=None,
                    help="use the alternative stationarity residual")
    sp.add_argument("--tilt-localize", type=float, metavar="DELTA",
                    help="localize the attractive doublet with a reduced tilt of this size")
    return sp


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twowell",
                                     description="Two-mode condensate in a double well.")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = _shared()
    mk = lambda name, text: sub.add_parser(name, parents=[shared], help=text, description=text)

    p = mk("contour", "energy surface on an (x, phi) grid")
    p.add_argument("--overlay", help="fixed-point overlay JSON path")

    p = mk("evolve", "integrate one trajectory")
    p.add_argument("--x0", type=float)
    p.add_argument("--phi0", type=float)
    p.add_argument("--dtau-max", type=float)
    p.add_argument("--rtol", type=float)
    p.add_argument("--energy-drift-tol", type=float)
    p.add_argument("--summary", help="write step statistics, trapping and period as JSON")

    p = mk("fixed-points", "fixed points with branch labels and stability")
    p.add_argument("--classify-tol", type=float)

    p = mk("critical", "critical interaction for the onset of multistability")
    p.add_argument("--deltas", help="comma separated list of delta values")

    p = mk("fluct", "semiclassical number and phase fluctuations")
    p.add_argument("--branch", choices=["P", "S", "S_plus", "S_minus"])

    p = mk("quantum", "exact ground state in the fixed-N Fock space")
    p.add_argument("--compare", metavar="VARIANT", help="compare with a semiclassical variant")
    p.add_argument("--amplitudes-out", help="CSV of n, amplitude")
    p.add_argument("--phase-out", help="CSV of phi, P(phi)")

    p = mk("sweep", "one-parameter sweep of another command")
    p.add_argument("--target", choices=sorted(commands.SWEEP_TARGETS))
    p.add_argument("--axis", choices=commands.SWEEP_AXES)
    p.add_argument("--values", help="comma separated axis values")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--num", type=int)
    p.add_argument("--log", action="store_true", default=None, help="geometric spacing")
    p.add_argument("--hold", choices=["xi", "ratio"], help="what stays fixed on an N sweep")
    p.add_argument("--workers", type=int)
    p.add_argument("--fit", action="store_true", default=None,
                   help="print the log-log slope of the first output column to stderr")
    p.add_argument("--branch", choices=["P", "S", "S_plus", "S_minus"])
    p.add_argument("--compare", metavar="VARIANT")
    p.add_argument("--deltas", help=argparse.SUPPRESS)
    return parser


def run(argv: list[str] | None = None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    try:
        file_values = read_config_file(config_path) if config_path else {}
        cfg = resolve(file_values, args)
        COMMANDS[command](cfg)
    except (ParameterError, DomainError, ConfigurationError) as exc:
        print(f"twowell {command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"twowell {command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OutputError, OSError) as exc:
        print(f"twowell {command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except TwoWellError as exc:
        print(f"twowell {command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
