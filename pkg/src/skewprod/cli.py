"""Command-line front end.

Exit codes: 0 when every requested check passes, 1 when a check fails (the
report is still written), 2 for malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InputError, SchemaError, SkewprodError
from .manifest import load_manifest
from .report import EXIT_INPUT, Report, dumps, render, run

SUBCOMMAND_CHECKS = {
    "classify": ["classify"],
    "verify": None,  # whatever the manifest asks for
    "inequality": ["classify", "inequality"],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewprod", description="Verify submanifolds of product spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("classify", "classify the tangent bundle of the immersion"),
                        ("verify", "run every check requested in the manifest"),
                        ("inequality", "evaluate the squared-norm curvature inequality")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--manifest", required=True, help="manifest JSON file")
        p.add_argument("--samples", type=int, default=None, help="number of random sample points")
        p.add_argument("--seed", type=int, default=None, help="sampling seed")
        p.add_argument("--tol", type=float, default=1.0, help="multiplier on every pass/fail tolerance")
        p.add_argument("--json-out", default=None, help="write the JSON report here")
        p.add_argument("--quiet", action="store_true", help="suppress the text table")
    p = sub.add_parser("report", help="render a saved JSON report as a table")
    p.add_argument("path", help="report JSON file")
    p.add_argument("--quiet", action="store_true", help="only set the exit code")
    return parser


def _input_error(exc: SkewprodError, quiet: bool) -> int:
    if not quiet:
        print(json.dumps({"error": exc.to_dict()}, indent=2), file=sys.stderr)
    return EXIT_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "report":
        try:
            rep = Report.from_dict(json.loads(Path(args.path).read_text()))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            return _input_error(InputError(f"cannot read report: {exc}"), args.quiet)
        if not args.quiet:
            sys.stdout.write(render(rep))
        return rep.exit_code

    if args.samples is not None and args.samples < 0:
        return _input_error(InputError("--samples must be non-negative"), args.quiet)
    if not args.tol > 0:
        return _input_error(InputError("--tol must be positive"), args.quiet)
    try:
        manifest = load_manifest(args.manifest)
    except SkewprodError as exc:
        return _input_error(exc, args.quiet)
    if args.command == "inequality" and manifest.warped is None:
        return _input_error(SchemaError("the inequality needs a 'warped' section", "/warped"), args.quiet)

    rep = run(manifest, samples=args.samples, seed=args.seed, tol_factor=args.tol,
              checks=SUBCOMMAND_CHECKS[args.command])
    if args.json_out:
        Path(args.json_out).write_text(dumps(rep))
    if not args.quiet:
        sys.stdout.write(render(rep))
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
