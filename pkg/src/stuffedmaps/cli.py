"""Command-line entry point: ``stuffedmaps {enumerate,series,bijection,demo}``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .bijection import PINNED, phi, psi, verify_bijection
from .cells import CellSet, CellShape
from .enumerate import enumerate_bms, enumerate_ordinary, mark_points
from .errors import BudgetExceeded, InvalidCellSpec, NoStabilization, StuffedMapError
from .hypermobile import Hypermobile, validate_hypermobile
from .maps import StuffedMap, canonical_form, validate_stuffed_map
from .report import bridged_quadrangulation_report
from .series import TSeries
from .solver import (pointed_stuffed, solve_stuffed_functional, solve_stuffed_tutte, solve_tree_gamma,
                     solve_tutte_ordinary)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_NO_FIXED_POINT = 4
EXIT_ROUNDTRIP = 5
EXIT_IDENTITY = 6


class _Invalid(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _Invalid(f"cannot read {path}: {exc}") from exc


def _load_cells(path: Optional[str]) -> Optional[CellSet]:
    if path is None:
        return None
    return CellSet.from_json(_read_json(path))


def _emit(text: str, out: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1)


# ---------------------------------------------------------------------------
# enumerate


def cmd_enumerate(args) -> int:
    cells = _load_cells(args.cells) or CellSet(())
    ell = args.boundary
    if args.pointed:
        e = enumerate_bms(cells if args.bms else cells.restricted_to_polygons(), ell, args.max_vertices)
        table, _ = mark_points(e.maps, cells, ell, args.max_vertices)
    elif args.bms:
        table = enumerate_bms(cells, ell, args.max_vertices).table
    else:
        table = enumerate_ordinary(cells, ell, args.max_vertices).table
    text = table.to_csv() if args.format == "csv" else _dump(table.to_json())
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# series


def cmd_series(args) -> int:
    cells = _load_cells(args.cells) or CellSet(())
    N, which = args.order, args.which
    ell = args.boundary
    if which == "tutte":
        payload = solve_tutte_ordinary(cells, 16 if ell is None else ell, N).to_json()
    elif which == "tree":
        payload = solve_tree_gamma(cells, N).to_json()
    elif which == "functional":
        ell = 2 if ell is None else ell
        payload = solve_stuffed_functional(cells, range(0, ell + 1, 2), N).to_json()
    elif which == "stuffed-tutte":
        payload = solve_stuffed_tutte(cells, 16 if ell is None else ell, N).to_json()
    else:
        payload = pointed_stuffed(cells, 2 if ell is None else ell, N).to_json()
    if args.format == "csv":
        if which in ("tree", "pointed"):
            text = TSeries.from_json(payload).to_csv()
        else:
            rows = []
            for k, s in payload["moments"].items():
                body = TSeries.from_json(s).to_csv().splitlines()
                if not rows:
                    rows.append("boundary," + body[0])
                rows.extend(f"{k},{line}" for line in body[1:])
            text = "\n".join(rows)
    else:
        text = _dump(payload)
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bijection


def _cells_of_map(m: StuffedMap) -> CellSet:
    shapes, on_branch = set(), set()
    for b, br in enumerate(m.branches):
        shapes.add(m.branch_shape(b))
        on_branch.update((a.component, a.face) for a in br)
    for ci, c in enumerate(m.components):
        for f in range(len(c.faces)):
            if (ci, f) not in on_branch and (ci, f) != m.boundary:
                shapes.add(CellShape((c.face_degree(f),)))
    return CellSet(tuple(sorted(shapes, key=lambda s: s.boundaries)))


def _cells_of_hypermobile(h: Hypermobile) -> CellSet:
    shapes, used = set(), set()
    for he in h.hyperedges:
        shapes.add(CellShape(tuple(2 * len(h.mobiles[mi].rot[b]) for mi, _, b in he)))
        used.update((mi, b) for mi, _, b in he)
    for mi, mob in enumerate(h.mobiles):
        for b in mob.blacks():
            if (mi, b) not in used:
                shapes.add(CellShape((2 * len(mob.rot[b]),)))
    return CellSet(tuple(sorted(shapes, key=lambda s: s.boundaries)))


def cmd_bijection(args) -> int:
    if args.action == "check":
        cells = _load_cells(args.cells)
        if cells is None:
            raise _Invalid("check needs --cells")
        report = verify_bijection(cells, args.max_vertices, PINNED)
        _emit(_dump(report), args.out)
        return EXIT_OK if report["ok"] else EXIT_ROUNDTRIP
    if not args.input:
        raise _Invalid("apply needs --input")
    data = _read_json(args.input)
    given = _load_cells(args.cells)
    if args.inverse:
        h = Hypermobile.from_json(data)
        problems = validate_hypermobile(h, given or _cells_of_hypermobile(h))
        if problems:
            raise _Invalid("invalid hypermobile: " + "; ".join(problems))
        result = canonical_form(psi(h)).to_json()
    else:
        m = StuffedMap.from_json(data)
        problems = validate_stuffed_map(m, given or _cells_of_map(m))
        if problems:
            raise _Invalid("invalid stuffed map: " + "; ".join(problems))
        result = phi(canonical_form(m)).to_json()
    _emit(_dump(result), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# demo


def cmd_demo(args) -> int:
    report = bridged_quadrangulation_report(args.order, args.max_vertices)
    _emit(_dump(report), args.out)
    return EXIT_OK if report["ok"] else EXIT_IDENTITY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stuffedmaps", description="Stuffed map enumeration, series and bijection tools.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="count rooted maps by exhaustive gluing")
    e.add_argument("--cells", help="cell-set JSON file (default: no cells)")
    e.add_argument("--boundary", type=int, default=2)
    e.add_argument("--max-vertices", type=int, default=5)
    e.add_argument("--bms", action="store_true", help="allow multi-boundary cells (BMS maps)")
    e.add_argument("--pointed", action="store_true", help="also choose a marked vertex")
    e.add_argument("--format", choices=("json", "csv"), default="json")
    e.add_argument("--out")
    e.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("series", help="solve for generating functions")
    s.add_argument("--cells")
    s.add_argument("--order", type=int, default=10)
    s.add_argument("--which", choices=("tutte", "tree", "functional", "stuffed-tutte", "pointed"), default="tutte")
    s.add_argument("--boundary", type=int)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_series)

    b = sub.add_parser("bijection", help="check or apply the hypermobile bijection")
    b.add_argument("action", choices=("check", "apply"))
    b.add_argument("--cells")
    b.add_argument("--max-vertices", type=int, default=5)
    b.add_argument("--input")
    b.add_argument("--inverse", action="store_true")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bijection)

    d = sub.add_parser("demo", help="bridged quadrangulation cross-checks")
    d.add_argument("--order", type=int, default=10)
    d.add_argument("--max-vertices", type=int, default=6)
    d.add_argument("--out")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "order", 0) is not None and getattr(args, "order", 0) < 0:
            raise _Invalid("--order must be non-negative")
        if getattr(args, "max_vertices", 0) < 0:
            raise _Invalid("--max-vertices must be non-negative")
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NoStabilization as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_FIXED_POINT
    except (_Invalid, InvalidCellSpec, StuffedMapError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
