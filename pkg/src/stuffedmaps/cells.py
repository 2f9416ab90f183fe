"""Cell shapes, cell sets and count tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import InvalidCellSpec


@dataclass(frozen=True, order=True)
class CellShape:
    """A 2-cell given by the multiset of its boundary lengths (in half-edges)."""

    boundaries: Tuple[int, ...]

    def __post_init__(self):
        b = tuple(sorted(int(x) for x in self.boundaries))
        object.__setattr__(self, "boundaries", b)
        if not b:
            raise InvalidCellSpec("a cell needs at least one boundary")
        for x in b:
            if x < 2 or x % 2:
                raise InvalidCellSpec(f"boundary length {x} must be even and >= 2")
        if sum(b) < 4:
            raise InvalidCellSpec(f"cell {b}: total boundary length must be at least 4")

    @property
    def arity(self) -> int:
        return len(self.boundaries)

    @property
    def is_polygon(self) -> bool:
        return len(self.boundaries) == 1

    @property
    def default_symbol(self) -> str:
        return "t_" + "_".join(str(x) for x in self.boundaries)

    @property
    def added_vertices(self) -> int:
        """Vertices a planar gluing gains from one copy of this cell.

        Each boundary of length 2m adds m - 1 vertices to its component and
        every extra boundary opens a new component (worth 2).
        """
        return sum(x // 2 - 1 for x in self.boundaries) + 2 * (self.arity - 1)


@dataclass(frozen=True)
class CellSet:
    """A finite gluing alphabet with one Boltzmann weight symbol per shape."""

    shapes: Tuple[CellShape, ...] = ()
    names: Tuple[str, ...] = ()
    vertex_symbol: str = "t"

    def __post_init__(self):
        shapes = tuple(CellShape(s.boundaries) if isinstance(s, CellShape) else CellShape(tuple(s))
                       for s in self.shapes)
        if len(set(shapes)) != len(shapes):
            raise InvalidCellSpec("duplicate cell shapes")
        names = tuple(self.names) if self.names else tuple(s.default_symbol for s in shapes)
        if len(names) != len(shapes) or len(set(names)) != len(names):
            raise InvalidCellSpec("weight names must be distinct, one per shape")
        if self.vertex_symbol in names:
            raise InvalidCellSpec("weight names must differ from the vertex symbol")
        order = sorted(range(len(shapes)), key=lambda i: shapes[i])
        object.__setattr__(self, "shapes", tuple(shapes[i] for i in order))
        object.__setattr__(self, "names", tuple(names[i] for i in order))

    @classmethod
    def of(cls, *boundary_lists: Sequence[int]) -> "CellSet":
        return cls(tuple(CellShape(tuple(b)) for b in boundary_lists))

    @classmethod
    def from_json(cls, data) -> "CellSet":
        try:
            if isinstance(data, (str, bytes)):
                data = json.loads(data)
            cells = data["cells"]
            shapes, names = [], []
            for c in cells:
                shapes.append(CellShape(tuple(c["boundaries"])))
                names.append(c.get("weight") or shapes[-1].default_symbol)
            return cls(tuple(shapes), tuple(names))
        except InvalidCellSpec:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidCellSpec(f"malformed cell spec: {exc}") from exc

    def to_json(self) -> dict:
        return {"cells": [{"boundaries": list(s.boundaries), "weight": n}
                          for s, n in zip(self.shapes, self.names)]}

    def symbol(self, shape: CellShape | Sequence[int]) -> str:
        if not isinstance(shape, CellShape):
            shape = CellShape(tuple(shape))
        return self.names[self.shapes.index(shape)]

    def shape_of(self, name: str) -> CellShape:
        return self.shapes[self.names.index(name)]

    @property
    def symbols(self) -> Tuple[str, ...]:
        return tuple(sorted(self.names))

    @property
    def polygons(self) -> Tuple[CellShape, ...]:
        return tuple(s for s in self.shapes if s.is_polygon)

    @property
    def multis(self) -> Tuple[CellShape, ...]:
        return tuple(s for s in self.shapes if not s.is_polygon)

    @property
    def polygon_lengths(self) -> Tuple[int, ...]:
        return tuple(s.boundaries[0] for s in self.polygons)

    @property
    def max_length(self) -> int:
        return max((max(s.boundaries) for s in self.shapes), default=0)

    def s_prime(self) -> List[Tuple[Tuple[int, ...], int]]:
        """Black valencies and hyperedge arity per shape (arity 1 = plain black vertex)."""
        return [(tuple(x // 2 for x in s.boundaries), s.arity) for s in self.shapes]

    def multi_by_lengths(self, lengths: Iterable[int]) -> Optional[CellShape]:
        key = CellShape(tuple(lengths))
        return key if key in self.multis else None

    def restricted_to_polygons(self) -> "CellSet":
        idx = [i for i, s in enumerate(self.shapes) if s.is_polygon]
        return CellSet(tuple(self.shapes[i] for i in idx), tuple(self.names[i] for i in idx))


def cellset(*boundary_lists: Sequence[int]) -> CellSet:
    return CellSet.of(*boundary_lists)


QUADRANGLE = (4,)
BRIDGE = (2, 2)


@dataclass
class CountTable:
    """Exact counts keyed by ``(boundary length, vertex count, cell multiplicities)``.

    The multiplicity vector is aligned with ``symbols`` (sorted weight names).
    """

    symbols: Tuple[str, ...]
    entries: Dict[Tuple[int, int, Tuple[int, ...]], Fraction] = field(default_factory=dict)
    complete_through: Optional[int] = None

    def add(self, ell: int, v: int, cells: Sequence[int], amount=1) -> None:
        key = (ell, v, tuple(cells))
        val = self.entries.get(key, Fraction(0)) + Fraction(amount)
        if val:
            self.entries[key] = val
        else:
            self.entries.pop(key, None)

    def get(self, ell: int, v: int, cells: Sequence[int]) -> Fraction:
        return self.entries.get((ell, v, tuple(cells)), Fraction(0))

    def total(self, ell: int | None = None, v: int | None = None) -> Fraction:
        return sum((c for (l, w, _), c in self.entries.items()
                    if (ell is None or l == ell) and (v is None or w == v)), Fraction(0))

    def by_vertices(self, ell: int | None = None) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for (l, w, _), c in self.entries.items():
            if ell is None or l == ell:
                out[w] = out.get(w, Fraction(0)) + c
        return dict(sorted(out.items()))

    def merge(self, other: "CountTable") -> "CountTable":
        if other.symbols != self.symbols:
            raise ValueError("symbol mismatch")
        out = CountTable(self.symbols, dict(self.entries), self.complete_through)
        for k, c in other.entries.items():
            out.add(k[0], k[1], k[2], c)
        return out

    def map_values(self, fn) -> "CountTable":
        out = CountTable(self.symbols, complete_through=self.complete_through)
        for k, c in self.entries.items():
            out.add(*fn(k, c))
        return out

    def __eq__(self, other):
        if not isinstance(other, CountTable):
            return NotImplemented
        return self.symbols == other.symbols and self.entries == other.entries

    def sorted_items(self):
        return sorted(self.entries.items())

    def to_json(self) -> dict:
        return {
            "symbols": list(self.symbols),
            "complete_through": self.complete_through,
            "entries": [
                {"boundary": l, "vertices": v, "cells": dict(zip(self.symbols, n)),
                 "num": c.numerator, "den": c.denominator}
                for (l, v, n), c in self.sorted_items()
            ],
        }

    @classmethod
    def from_json(cls, data) -> "CountTable":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        syms = tuple(data["symbols"])
        t = cls(syms, complete_through=data.get("complete_through"))
        for e in data["entries"]:
            t.add(e["boundary"], e["vertices"], [e["cells"].get(s, 0) for s in syms],
                  Fraction(e["num"], e["den"]))
        return t

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["boundary", "vertices", *self.symbols, "count"])
        for (l, v, n), c in self.sorted_items():
            w.writerow([l, v, *n, str(c)])
        return buf.getvalue()
