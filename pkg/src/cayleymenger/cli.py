"""Command-line interface.

Exit status: 0 on success, 1 when ``verify`` finds a failing identity, 2 on
usage or input errors.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import cmcore, geometry, identities
from .errors import CayleyMengerError
from .polyring import iter_canonical_terms

GEOMETRY_COMMANDS = {
    "volume": "squared volume of the simplex",
    "realizable": "whether the distances are edge lengths of a nondegenerate simplex",
    "degenerate": "whether the points lie in a proper affine subspace",
    "circumradius": "squared circumradius",
    "cospherical": "whether n+2 points lie on a common sphere or hyperplane",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("text", "record"), default="text",
                   help="plain text or a JSON record (default: text)")
    p.add_argument("--cap", type=int, metavar="N",
                   help=f"override the symbolic dimension cap (default {cmcore.DEFAULT_CAP})")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="cayleymenger", description="Exact Cayley-Menger determinants and predicates.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND", parser_class=_Parser)
    parser.subcommands = sub.choices

    for name, what in (("gamma", "Cayley-Menger determinant"), ("delta", "(1,1)-minor of the CM matrix")):
        p = sub.add_parser(name, parents=[common], help=f"print the {what} on points 0..N")
        p.add_argument("-n", type=int, required=True, metavar="N")

    p = sub.add_parser("lambda", parents=[common], help="print gamma(N) with d_i_l -> t_l for l > P")
    p.add_argument("-n", type=int, required=True, metavar="N")
    p.add_argument("-p", type=int, required=True, metavar="P")

    p = sub.add_parser("verify", parents=[common], help="run the identity verification suite")
    p.add_argument("--max-n", type=int, default=cmcore.DEFAULT_CAP, metavar="N")
    p.add_argument("--suite", metavar="LIST",
                   help="comma-separated subset of " + ",".join(identities.SUITES))
    p.add_argument("--json", metavar="FILE", help="also write the report document to FILE")
    p.add_argument("--jsonl", metavar="FILE", help="also write one record per line to FILE")

    for name, what in GEOMETRY_COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=what)
        p.add_argument("file", metavar="FILE", help="distance-matrix JSON document")

    p = sub.add_parser("isosceles", parents=[common], help="squared volume of an isosceles tower")
    p.add_argument("file", metavar="BASEFILE")
    p.add_argument("--tau", required=True, metavar="T1,T2,...")
    return parser


def _emit(record: dict) -> None:
    sys.stdout.write(json.dumps(record, sort_keys=True) + "\n")


def _emit_polynomial(args, poly, **fields) -> None:
    if args.format == "record":
        _emit({"command": args.command, **fields, "polynomial": "".join(iter_canonical_terms(poly))})
        return
    out = sys.stdout
    for chunk in iter_canonical_terms(poly):
        out.write(chunk)
    out.write("\n")


def _verify(args, parser) -> int:
    suites = None
    if args.suite is not None:
        suites = [s.strip() for s in args.suite.split(",") if s.strip()]
        unknown = sorted(set(suites) - set(identities.SUITES))
        if unknown or not suites:
            parser.error(f"--suite: unknown suite(s) {','.join(unknown) or '(empty)'}; "
                         f"choose from {','.join(identities.SUITES)}")
    if not 1 <= args.max_n <= cmcore.symbolic_cap():
        parser.error(f"--max-n must lie in 1..{cmcore.symbolic_cap()} (raise --cap to go further)")
    report = identities.run_suite(args.max_n, suites)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.dumps())
    if args.jsonl:
        with open(args.jsonl, "w", encoding="utf-8") as fh:
            fh.write(report.dumps_lines())
    if args.format == "record":
        sys.stdout.write(report.dumps())
    else:
        for c in report:
            params = ",".join(map(str, c.parameters)) or "-"
            sys.stdout.write(f"{c.status.value.upper():4}  {c.check_id:22} {params:6} {c.witness}\n")
        verdict = "PASS" if report.passed else "FAIL"
        sys.stdout.write(f"{verdict}: {len(report)} checks, {len(report.failures)} failed\n")
    return 0 if report.passed else 1


def _geometry(args, parser) -> int:
    dm = geometry.load_distance_matrix(args.file)
    taus = ()
    if args.command == "isosceles":
        try:
            taus = [geometry.parse_rational(t) for t in args.tau.split(",")]
        except CayleyMengerError as exc:
            parser.error(f"--tau: {exc}")
    result = geometry.explain(args.command, dm, taus)
    if args.format == "record":
        _emit({"command": args.command, **result.to_json()})
    else:
        sys.stdout.write(str(result.to_json()["value"]).lower() + "\n")
    return 0


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # Report errors against the subcommand so its synopsis is shown.
        parser = parser.subcommands[args.command]
        if extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as exc:
        return int(exc.code or 0)

    previous_cap = cmcore.symbolic_cap()
    try:
        if args.cap is not None:
            if args.cap < 1:
                parser.error("--cap must be >= 1")
            print(f"warning: symbolic cap set to {args.cap}; runtime and memory grow "
                  "combinatorially with the dimension", file=sys.stderr)
            cmcore.set_symbolic_cap(args.cap)

        if args.command in ("gamma", "delta"):
            if args.n < 1:
                parser.error("-n must be >= 1")
            f = cmcore.gamma if args.command == "gamma" else cmcore.delta
            _emit_polynomial(args, f(args.n), n=args.n)
            return 0
        if args.command == "lambda":
            if not 1 <= args.p <= args.n:
                parser.error(f"-p {args.p} out of range: Lambda_(n,p) is defined for 1 <= p <= n (n = {args.n})")
            _emit_polynomial(args, cmcore.lambda_(args.n, args.p), n=args.n, p=args.p)
            return 0
        if args.command == "verify":
            return _verify(args, parser)
        return _geometry(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (CayleyMengerError, OSError) as exc:
        print(f"cayleymenger {args.command}: error: {exc}", file=sys.stderr)
        return 2
    finally:
        cmcore.set_symbolic_cap(previous_cap)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
