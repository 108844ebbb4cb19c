"""``syzmirror`` command-line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .lattice import StructureError
from .mirror import DEFAULT_TOL
from .reports import COMMANDS, EXIT_INPUT, CommandRequest, InputError, parse_q, parse_z, run


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--preset", metavar="NAME", help="shipped polytope (CP1, CP2, CP3, CP1xCP1, CP1xCP2, Bl1CP2)")
    src.add_argument("--file", metavar="PATH", help="polytope JSON file")
    common.add_argument("--cutoff", type=int, default=4, metavar="K", help="convolution degree cutoff (default 4)")
    common.add_argument("--q", metavar="q1=VALUE,...", help="numeric Kähler parameters, rationals or decimals (default 1)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, metavar="T", help="residual tolerance (default 1e-10)")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="syzmirror",
                                     description="Toric mirror symmetry computations with exact arithmetic.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "validate": "check smoothness, completeness and the Fano condition",
        "mirror": "print the superpotential",
        "jacobian": "Gröbner presentation of the Jacobian ring",
        "qh": "quantum cohomology presentation from disc counting functions",
        "verify-iso": "check that Fourier series identifies QH with Jac(W)",
        "syz-check": "truncated check of the toric SYZ transform of exp(i omega + Psi)",
        "semiflat-check": "semi-flat transform identities for the polytope's dimension",
        "critical": "numerical critical points of W",
        "clifford": "Floer data and Clifford form at critical points (or at --z)",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "clifford":
            p.add_argument("--z", metavar="Z1,Z2,...", help="evaluate at this point instead of the critical points")
        if name == "semiflat-check":
            p.add_argument("--phi", metavar="PATH", help="JSON matrix of rational strings (default: Guillemin Hessian)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        req = CommandRequest(
            command=args.command,
            preset=args.preset,
            file=args.file,
            cutoff=args.cutoff,
            q=parse_q(args.q),
            tol=args.tol,
            z=parse_z(getattr(args, "z", None)),
            phi=getattr(args, "phi", None),
        )
        report = run(req)
    except (InputError, StructureError) as exc:
        print(f"syzmirror {args.command}: error: {exc}", file=sys.stderr)
        if args.format == "json":
            print(json.dumps({"command": args.command, "status": "error", "error": str(exc)}, sort_keys=True))
        return EXIT_INPUT
    text = report.to_json() if args.format == "json" else report.to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
