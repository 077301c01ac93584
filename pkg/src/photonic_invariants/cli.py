"""Batch command-line front end.

Exit status: 0 on success (including an undecided comparison), 2 when a
comparison proves the target impossible, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import catalog
from .bounds import DEFAULT_TOL, CompareConfig, compare, heralded_bound, validate_family
from .errors import ComplexityError
from .invariants import DEFAULT_MAX_DIM, DEFAULT_MAX_TERMS, equivariant_eigenspaces
from .lie import evolve_state, unitary_from_spec
from .reports import DEFAULT_SET, decomposition_dict, dumps, invariant_reports, to_text

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_IMPOSSIBLE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with "impossible"
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _load_json(path: str) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(
            f"malformed JSON in {path}: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from None


def _load_state(path: str):
    return catalog.from_spec(_load_json(path))


def _families(csv: str) -> list[str]:
    names = [s.strip() for s in csv.split(",") if s.strip()]
    if not names:
        raise UsageError("--set needs at least one invariant name")
    return [validate_family(n) for n in names]


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-terms", type=_positive_int, default=DEFAULT_MAX_TERMS)
    common.add_argument("--max-dim", type=_positive_int, default=DEFAULT_MAX_DIM)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = _Parser(prog="photonic-invariants", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", parents=[common], help="invariants of one state")
    p.add_argument("--state", required=True)
    p.add_argument("--set", default=",".join(DEFAULT_SET))

    p = sub.add_parser("compare", parents=[common], help="feasibility verdict for a -> b")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--set", default=None)
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)

    p = sub.add_parser("bound", parents=[common], help="heralded success bound")
    p.add_argument("--input", required=True)
    p.add_argument("--target", required=True)

    p = sub.add_parser("evolve", parents=[common], help="apply a passive unitary to a state")
    p.add_argument("--state", required=True)
    p.add_argument("--unitary", required=True)

    p = sub.add_parser("decompose", parents=[common], help="equivariant eigenspaces of a sector")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", default="P")
    p.add_argument("--order", type=_positive_int, default=1)
    p.add_argument("--bases", action="store_true", help="include cluster basis matrices")
    return parser


def _run(args: argparse.Namespace) -> tuple[Any, int]:
    if args.command == "invariants":
        families = _families(args.set)
        state = _load_state(args.state)
        config = CompareConfig(max_terms=args.max_terms, max_dim=args.max_dim)
        reports = [r.to_dict() for r in invariant_reports(state, families, config)]
        return {"reports": reports}, EXIT_OK

    if args.command == "compare":
        families = _families(args.set) if args.set else None
        config = CompareConfig(
            families=tuple(families) if families else CompareConfig().families,
            tol=args.tol, max_terms=args.max_terms, max_dim=args.max_dim,
        )
        report = compare(_load_state(args.a), _load_state(args.b), config)
        return report.to_dict(), EXIT_IMPOSSIBLE if report.impossible else EXIT_OK

    if args.command == "bound":
        report = heralded_bound(_load_state(args.input), _load_state(args.target))
        return report.to_dict(), EXIT_OK

    if args.command == "evolve":
        state = _load_state(args.state)
        spec = _load_json(args.unitary)
        S = unitary_from_spec(spec, seed=args.seed)
        return catalog.to_spec(evolve_state(state, S)), EXIT_OK

    dec = equivariant_eigenspaces(
        args.m, args.n, args.kind, args.order, max_dim=args.max_dim, max_terms=args.max_terms
    )
    return decomposition_dict(dec, with_bases=args.bases), EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        payload, code = _run(args)
    except ComplexityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (UsageError, ValueError, OverflowError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = to_text(payload) if args.format == "text" else dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
