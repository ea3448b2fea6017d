"""Command-line surface: group-spec parsing, analysis, table reproduction.

Exit codes are a stable contract: 0 success/agree, 2 cross-check
disagreement, 3 budget exceeded, 4 input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .groups import (
    FiniteGroup,
    GroupValidationError,
    MAX_PIPELINE_ORDER,
    direct_product,
    from_cayley_file,
    make_alternating4,
    make_cyclic,
    make_dihedral,
    make_generalized_quaternion,
)
from .setfam import BudgetExceeded, enumerate_mls, write_mls_stream
from .semigroups import validate_associativity
from . import engine

EXIT_OK = 0
EXIT_DISAGREE = 2
EXIT_BUDGET = 3
EXIT_INPUT = 4

_GRAMMAR = "C<n>, D<2n>, Q<8|16|32>, A4, products joined with 'x', or file:<path>"


class SpecError(ValueError):
    def __init__(self, message: str, position: int = 0):
        super().__init__(message)
        self.position = position


_ATOM_RE = re.compile(r"([CDQ])(\d+)$")
_parse_cache: dict[str, FiniteGroup] = {}


def _make_atom(token: str, position: int) -> FiniteGroup:
    if token == "A4":
        return make_alternating4()
    m = _ATOM_RE.match(token)
    if not m:
        raise SpecError(f"bad token {token!r} at position {position}; expected {_GRAMMAR}", position)
    letter, num = m.group(1), int(m.group(2))
    try:
        if letter == "C":
            return make_cyclic(num)
        if letter == "D":
            return make_dihedral(num)
        if num not in (8, 16, 32):
            raise SpecError(f"Q{num} not supported at position {position}; use Q8, Q16 or Q32", position)
        return make_generalized_quaternion(num)
    except ValueError as exc:
        raise SpecError(f"{exc} (token {token!r} at position {position})", position) from exc


def parse_spec(text: str) -> FiniteGroup:
    """Build the group named by a spec string, left-to-right for products."""
    cached = _parse_cache.get(text)
    if cached is not None:
        return cached
    if text.startswith("file:"):
        group = from_cayley_file(text[5:])
    else:
        tokens = text.split("x")
        position = 0
        group = None
        for tok in tokens:
            if not tok:
                raise SpecError(f"empty token at position {position}", position)
            atom = _make_atom(tok, position)
            try:
                group = atom if group is None else direct_product(group, atom)
            except ValueError as exc:
                raise SpecError(f"{exc} while building {text!r}", position) from exc
            position += len(tok) + 1
    _parse_cache[text] = group
    return group


def spec_order(text: str) -> int:
    return parse_spec(text).order


# -- output helpers -------------------------------------------------------------------


_ROW = "{:<12} {:>11}  {:<22} {:<24} {}"


def _print_report_row(name: str, report: engine.StructureReport) -> None:
    print(
        _ROW.format(
            name,
            report.idempotents_per_min_left_ideal,
            report.max_subgroup_type,
            report.min_left_ideal_type,
            report.provenance,
        ).rstrip()
    )
    for note in report.notes:
        print(f"  ! {note}")


def _print_header() -> None:
    print(_ROW.format("group", "idempotents", "max subgroup", "minimal left ideal", "provenance"))


# -- commands -------------------------------------------------------------------------


def cmd_analyze(spec: str, brute: bool, as_json: bool, budget, seed: int) -> int:
    group = parse_spec(spec)
    if group.order > MAX_PIPELINE_ORDER:
        print(f"error: order {group.order} exceeds the pipeline cap {MAX_PIPELINE_ORDER}", file=sys.stderr)
        return EXIT_INPUT
    structural = engine.analyze_structural(group, spec)
    if not brute:
        if as_json:
            print(json.dumps(structural.to_json(), indent=2, sort_keys=True))
        else:
            _print_header()
            _print_report_row(spec, structural)
        return EXIT_OK

    check = engine.cross_check(group, spec, budget=budget)
    sem, _, _ = engine._brute_parts(group, budget)
    validate_associativity(sem, samples=1000, seed=seed)
    if as_json:
        doc = {
            "verdict": check.verdict,
            "structural": check.structural.to_json(),
            "brute": check.brute.to_json(),
            "merged": check.merged.to_json(),
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        _print_header()
        _print_report_row(spec + " [struct]", check.structural)
        _print_report_row(spec + " [brute]", check.brute)
        print(f"verdict: {check.verdict} (isomorphism certified: {check.isomorphism_certified})")
    return EXIT_OK if check.verdict == "agree" else EXIT_DISAGREE


def cmd_table(as_json: bool) -> int:
    rows = engine.reference_reports(with_brute=True)
    if as_json:
        print(json.dumps([r.to_json() for _, r, _ in rows], indent=2, sort_keys=True))
    else:
        _print_header()
        for spec, report, _ in rows:
            _print_report_row(spec, report)
    return EXIT_OK


def cmd_mls_count(spec: str, out_path, budget) -> int:
    group = parse_spec(spec)
    try:
        systems = enumerate_mls(group, budget=budget)
    except BudgetExceeded as exc:
        print(f"count>={exc.count_so_far} partial=true")
        return EXIT_BUDGET
    print(f"count={len(systems)} partial=false")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            write_mls_stream(fh, group, systems)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superext",
        description="Structure of minimal left ideals of superextensions of finite groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="structural (and optionally brute-force) analysis")
    p_an.add_argument("spec", help=_GRAMMAR)
    p_an.add_argument("--brute", action="store_true", help="also run the brute-force route and cross-check")
    p_an.add_argument("--json", action="store_true")
    p_an.add_argument("--budget", type=int, default=None, help="enumeration budget (systems)")
    p_an.add_argument("--seed", type=int, default=0, help="seed for sampled invariant checks")

    p_tab = sub.add_parser("table", help="reproduce the reference table of small groups")
    p_tab.add_argument("--json", action="store_true")

    p_mls = sub.add_parser("mls-count", help="count maximal linked systems")
    p_mls.add_argument("spec", help=_GRAMMAR)
    p_mls.add_argument("--out", default=None, help="write the signature stream to this file")
    p_mls.add_argument("--budget", type=int, default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return cmd_analyze(args.spec, args.brute, args.json, args.budget, args.seed)
        if args.command == "table":
            return cmd_table(args.json)
        if args.command == "mls-count":
            return cmd_mls_count(args.spec, args.out, args.budget)
        raise AssertionError("unreachable")
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SpecError, GroupValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AssertionError, RuntimeError) as exc:
        # an internal invariant failed: same class as a cross-check disagreement
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_DISAGREE


if __name__ == "__main__":
    sys.exit(main())
