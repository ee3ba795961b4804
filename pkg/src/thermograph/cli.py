"""Command-line front end: classify, series, equilibrium, sequence.

Input specs are JSON files holding either a family description or an
explicit edge list, in the library formats:

    {"family": "chain", "rho": 0.5, "s": 3.0, "c": "1/zeta(3)"}
    {"family": "jumpy", "gamma": 1.0, "s": 3.0, "target": "UPLG"}
    {"family": "petal", "q": {"1": 0.5, "3": 0.25}}
    {"edges": [{"from": 1, "to": 1, "w": 1.0}, {"from": 1, "to": 2, "w": 1.0}]}

Every command is deterministic for a fixed config; output files are
written atomically and floats carry 17 significant digits, so a rerun is
byte-identical.  Exit codes: 0 success, 2 input error, 3 analysis
refused, 4 resource cap hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Union

from ._util import atomic_write_text, fmt
from .cycle_series import (
    classification_to_json,
    classify_family,
    classify_finite,
    return_series,
)
from .equilibrium import measure_to_json, parry_measure
from .errors import (
    CapExceeded,
    Inconclusive,
    NoConvergence,
    NotConnected,
    NotUPLG,
    ThermographError,
)
from .families import FamilyDescriptor, family_from_json
from .graph_core import LoadedGraph, graph_from_json
from .sequences import (
    SubgraphSpec,
    evaluate_specs,
    irregular_search,
    mix_sequences,
    regular_scan,
    report_to_csv,
    report_to_json,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_REFUSED = 3
EXIT_CAP = 4


class InputError(Exception):
    """Anything wrong with files or arguments, as opposed to the math."""


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_spec(path: str) -> Union[FamilyDescriptor, LoadedGraph]:
    """Family descriptor or loaded graph from a JSON spec file."""
    obj = _load_json(path)
    if isinstance(obj, dict) and "family" in obj:
        return family_from_json(obj)
    if isinstance(obj, dict) and "edges" in obj:
        return graph_from_json(obj)
    raise InputError(f"{path} holds neither a 'family' nor an 'edges' entry")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _cmd_classify(args: argparse.Namespace) -> int:
    subject = load_spec(args.spec)
    if isinstance(subject, LoadedGraph):
        cls = classify_finite(subject, args.v)
    else:
        cls = classify_family(subject)
    _emit(classification_to_json(cls), args.out)
    return EXIT_OK


def _cmd_series(args: argparse.Namespace) -> int:
    subject = load_spec(args.spec)
    n_max = args.n_max if args.n_max is not None else 32
    if isinstance(subject, LoadedGraph):
        series = return_series(subject, args.v, n_max)
        coeffs = list(series.coeffs[1:n_max + 1])
        coeffs += [0.0] * (n_max - len(coeffs))
    else:
        coeffs = [subject.q(i) for i in range(1, n_max + 1)]
    if args.format == "json":
        payload = {"v": args.v, "q": {str(i): c for i, c in enumerate(coeffs, 1)}}
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        lines = ["n,q"] + [f"{i},{fmt(c)}" for i, c in enumerate(coeffs, 1)]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_equilibrium(args: argparse.Namespace) -> int:
    subject = load_spec(args.spec)
    if not isinstance(subject, LoadedGraph):
        raise InputError("equilibrium needs an explicit finite graph spec")
    measure = parry_measure(subject)
    _emit(measure_to_json(measure), args.out)
    return EXIT_OK


def _sequence_report(args: argparse.Namespace, family: FamilyDescriptor):
    if args.mode == "regular":
        n_max = args.n_max if args.n_max is not None else 50
        return regular_scan(family, n_max)
    if args.mode == "irregular":
        k_max = args.k_max if args.k_max is not None else 3
        _, report = irregular_search(family, k_max, cap=args.cap)
        return report
    if args.mode == "mixed":
        k_max = args.k_max if args.k_max is not None else 3
        indices, _ = irregular_search(family, k_max, cap=args.cap)
        hulls = [SubgraphSpec.hull(n) for n in indices]
        joins = [
            SubgraphSpec.join(a, b) for a, b in zip(indices, indices[1:])
        ]
        mixed = mix_sequences(family, hulls, joins)
        return evaluate_specs(family, mixed)
    raise InputError(f"unknown sequence mode {args.mode!r}")


def _cmd_sequence(args: argparse.Namespace) -> int:
    subject = load_spec(args.spec)
    if isinstance(subject, LoadedGraph):
        raise InputError("sequence commands operate on family specs")
    report = _sequence_report(args, subject)
    if args.format == "json":
        _emit(report_to_json(report), args.out)
    else:
        _emit(report_to_csv(report), args.out)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermograph",
        description=(
            "Recurrence classification, first-return series, equilibrium "
            "measures, and subgraph-sequence reports for weighted digraphs."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("classify", _cmd_classify),
        ("series", _cmd_series),
        ("equilibrium", _cmd_equilibrium),
        ("sequence", _cmd_sequence),
    ):
        p = sub.add_parser(name)
        p.add_argument("--spec", required=True, help="JSON family/graph file")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--n-max", dest="n_max", type=int, default=None)
        p.add_argument("--k-max", dest="k_max", type=int, default=None)
        p.add_argument("--v", type=int, default=1, help="base vertex")
        p.add_argument("--cap", type=int, default=None)
        if name == "sequence":
            p.add_argument(
                "--mode",
                choices=("regular", "irregular", "mixed"),
                default="regular",
            )
        p.set_defaults(fn=fn)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the input-error code
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (Inconclusive, NotUPLG, NotConnected) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except CapExceeded as exc:
        print(f"cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NoConvergence as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except ThermographError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
