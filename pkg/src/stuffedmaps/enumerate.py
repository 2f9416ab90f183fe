"""Exhaustive enumeration of small stuffed maps by polygon gluing.

The search keeps every component as a fixed face permutation ``phi`` (the
polygons) plus a partial side pairing ``alpha``.  It repeatedly takes the
smallest unpaired side of the first unfinished component and either pairs it
with another side on the same open boundary cycle, glues a fresh polygon to
it, or glues one boundary of a fresh multi-boundary cell to it (each other
boundary of that cell starts a new component).  Pairing only within a cycle
keeps every component planar; the vertex count of a finished map depends only
on its cells, which gives an exact budget for pruning.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .cells import CellSet, CellShape, CountTable
from .errors import BudgetExceeded, IncompleteTable
from .hypermobile import Hypermobile, Mobile, canonical_code_hm
from .maps import Attachment, Component, StuffedMap, canonical_code
from .series import TSeries

ROOT_POLY = "root"


class _Budget:
    def __init__(self, ms: Optional[float]):
        if ms is None:
            env = os.environ.get("STUFFEDMAP_BUDGET_MS")
            ms = float(env) if env else None
        self.deadline = None if ms is None else time.monotonic() + ms / 1000.0
        self.ticks = 0

    def tick(self):
        self.ticks += 1
        if self.deadline is not None and self.ticks % 512 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded("search exceeded the configured time budget")


class _Comp:
    __slots__ = ("phi", "alpha", "faces", "open")

    def __init__(self):
        self.phi: List[int] = []
        self.alpha: List[int] = []
        self.faces: List[Tuple[int, object]] = []   # (first dart, tag)
        self.open = 0

    def add_polygon(self, length: int, tag) -> int:
        n = len(self.phi)
        self.phi.extend(n + (i + 1) % length for i in range(length))
        self.alpha.extend([-1] * length)
        self.faces.append((n, tag))
        self.open += length
        return n

    def pop_polygon(self, length: int):
        del self.phi[-length:]
        del self.alpha[-length:]
        self.faces.pop()
        self.open -= length

    def glue(self, a: int, b: int):
        self.alpha[a] = b
        self.alpha[b] = a
        self.open -= 2

    def unglue(self, a: int, b: int):
        self.alpha[a] = -1
        self.alpha[b] = -1
        self.open += 2

    def succ(self, h: int) -> int:
        x = self.phi[h]
        while self.alpha[x] != -1:
            x = self.phi[self.alpha[x]]
        return x

    def first_open(self) -> int:
        return self.alpha.index(-1)


@dataclass
class Enumeration:
    """Distinct maps found by a search together with their count table."""

    table: CountTable
    maps: List[StuffedMap]
    cells: CellSet
    boundary: int


class _Search:
    def __init__(self, cells: CellSet, v_max: int, budget_ms: Optional[float] = None):
        self.cells = cells
        self.v_max = v_max
        self.comps: List[_Comp] = []
        self.branches: List[List[Tuple[int, int, int]]] = []   # (comp, face start, spurious dart)
        self.budget = _Budget(budget_ms)
        self.seen: Dict[bytes, StuffedMap] = {}
        self.boundary_mode = False

    # -- driving ---------------------------------------------------------

    def run(self, vused: int):
        self.budget.tick()
        for ci, c in enumerate(self.comps):
            if c.open:
                break
        else:
            self.emit()
            return
        c = self.comps[ci]
        h = c.first_open()
        # (a) pair with a side on the same open cycle
        x = c.succ(h)
        d = 1
        while x != h:
            if d % 2 == 1:
                c.glue(h, x)
                self.run(vused)
                c.unglue(h, x)
            x = c.succ(x)
            d += 1
        # (b) a fresh polygon
        for shape in self.cells.polygons:
            p = shape.boundaries[0]
            extra = p // 2 - 1
            if vused + extra > self.v_max:
                continue
            n = c.add_polygon(p, shape)
            c.glue(h, n)
            self.run(vused + extra)
            c.unglue(h, n)
            c.pop_polygon(p)
        # (c) a fresh multi-boundary cell
        for shape in self.cells.multis:
            if vused + shape.added_vertices > self.v_max:
                continue
            for l1 in sorted(set(shape.boundaries)):
                n = c.add_polygon(l1, None)
                c.glue(h, n)
                for j in range(l1):
                    self._open_branch(shape, l1, ci, n, n + j)
                    self.run(vused + shape.added_vertices)
                    self._close_branch(shape, l1)
                c.unglue(h, n)
                c.pop_polygon(l1)

    def _open_branch(self, shape: CellShape, l1: int, ci: int, start: int, spurious: int):
        rest = list(shape.boundaries)
        rest.remove(l1)
        bi = len(self.branches)
        c = self.comps[ci]
        c.faces[-1] = (start, ("C", bi))
        branch = [(ci, start, spurious)]
        for l in rest:
            nc = _Comp()
            nc.add_polygon(l, ("C", bi))
            self.comps.append(nc)
            branch.append((len(self.comps) - 1, 0, 0))
        self.branches.append(branch)

    def _close_branch(self, shape: CellShape, l1: int):
        self.branches.pop()
        del self.comps[len(self.comps) - (shape.arity - 1):]

    def build(self) -> StuffedMap:
        comps = []
        for c in self.comps:
            sigma = [c.phi[c.alpha[h]] for h in range(len(c.phi))]
            comps.append(Component(sigma, c.alpha))
        branches = tuple(
            tuple(Attachment(ci, comps[ci].face_of[start], sp) for ci, start, sp in br)
            for br in self.branches
        )
        boundary = (0, comps[0].face_of[0]) if self.boundary_mode else None
        return StuffedMap(tuple(comps), branches, (0, 0), boundary, None)

    def emit(self):
        m = self.build()
        code = canonical_code(m)
        if code not in self.seen:
            self.seen[code] = m


def _table_for(maps: List[StuffedMap], cells: CellSet, ell: int, v_max: int) -> CountTable:
    tbl = CountTable(cells.symbols, complete_through=v_max)
    for m in maps:
        tbl.add(ell, m.V, m.cell_counts(cells))
    return tbl


def enumerate_bms(cells: CellSet, ell: int, v_max: int, budget_ms: Optional[float] = None) -> Enumeration:
    """Rooted maps with one boundary face of length ``ell`` and a spurious corner on every branch boundary.

    ``ell = 0`` means no boundary: the root is then any dart of the gasket.
    """
    if ell % 2 or ell < 0:
        return Enumeration(CountTable(cells.symbols, complete_through=v_max), [], cells, ell)
    s = _Search(cells, v_max, budget_ms)
    if ell > 0:
        s.boundary_mode = True
        base = ell // 2 + 1
        if base <= v_max:
            c = _Comp()
            c.add_polygon(ell, ("B",))
            s.comps.append(c)
            s.run(base)
    else:
        for shape in cells.polygons:
            p = shape.boundaries[0]
            if 2 + p // 2 - 1 <= v_max:
                c = _Comp()
                c.add_polygon(p, shape)
                s.comps = [c]
                s.run(2 + p // 2 - 1)
        for shape in cells.multis:
            if 2 + shape.added_vertices > v_max:
                continue
            for l1 in sorted(set(shape.boundaries)):
                for j in range(l1):
                    c = _Comp()
                    c.add_polygon(l1, None)
                    s.comps = [c]
                    s.branches = []
                    s._open_branch(shape, l1, 0, 0, j)
                    s.run(2 + shape.added_vertices)
                    s.branches = []
        s.comps = []
    maps = sorted(s.seen.values(), key=lambda m: (m.V, canonical_code(m)))
    return Enumeration(_table_for(maps, cells, ell, v_max), maps, cells, ell)


def enumerate_ordinary(cells: CellSet, ell: int, v_max: int, budget_ms: Optional[float] = None) -> Enumeration:
    """Rooted planar bipartite maps with boundary ``ell`` built from polygons only."""
    return enumerate_bms(cells.restricted_to_polygons(), ell, v_max, budget_ms)


def mark_points(maps: List[StuffedMap], cells: CellSet, ell: int = 0,
                v_max: Optional[int] = None) -> Tuple[CountTable, List[StuffedMap]]:
    """Place a source on every allowed vertex of every map (never on a spurious point)."""
    tbl = CountTable(cells.symbols, complete_through=v_max)
    out = []
    for m in maps:
        banned = set(m.spurious_points())
        n = m.cell_counts(cells)
        for ci, c in enumerate(m.components):
            for v in range(c.V):
                if (ci, v) in banned:
                    continue
                out.append(m.with_source((ci, v)))
                tbl.add(ell, m.V, n)
    return tbl, out


def enumerate_pointed_bms(cells: CellSet, v_max: int, budget_ms: Optional[float] = None):
    """Pointed rooted BMS maps without boundary (the left side of the bijection)."""
    e = enumerate_bms(cells, 0, v_max, budget_ms)
    return mark_points(e.maps, cells, 0, v_max)


# ---------------------------------------------------------------------------
# automorphism-weighted counts


def _branch_product(m: StuffedMap) -> int:
    p = 1
    for b in range(len(m.branches)):
        for x in m.branch_shape(b).boundaries:
            p *= x
    return p


def rescale_bms_to_stuffed(tbl: CountTable, cells: CellSet) -> CountTable:
    """Divide every entry by the product of boundary lengths over its multi-boundary cells."""
    factors = []
    for name in tbl.symbols:
        shape = cells.shape_of(name)
        f = 1
        if not shape.is_polygon:
            for x in shape.boundaries:
                f *= x
        factors.append(f)

    def fn(key, val):
        ell, v, n = key
        d = 1
        for f, k in zip(factors, n):
            d *= f ** k
        return ell, v, n, Fraction(val) / d

    return tbl.map_values(fn)


def _decorations(m: StuffedMap) -> Iterator[StuffedMap]:
    slots = [(bi, j) for bi, br in enumerate(m.branches) for j in range(len(br))]
    choices = [m.components[m.branches[bi][j].component].faces[m.branches[bi][j].face] for bi, j in slots]

    def rec(i, acc):
        if i == len(slots):
            br = [list(b) for b in m.branches]
            for (bi, j), d in zip(slots, acc):
                a = br[bi][j]
                br[bi][j] = Attachment(a.component, a.face, d)
            yield StuffedMap(m.components, tuple(tuple(b) for b in br), m.root, m.boundary, m.source)
            return
        for d in choices[i]:
            yield from rec(i + 1, acc + [d])

    yield from rec(0, [])


def automorphism_count(m: StuffedMap) -> int:
    """Size of the automorphism group of the undecorated map underlying ``m``.

    Counts decorations whose decorated code equals that of a reference one;
    these are exactly the images of the reference under automorphisms.
    """
    ref = canonical_code(next(_decorations(m)))
    return sum(1 for d in _decorations(m) if canonical_code(d) == ref)


def weighted_counts_direct(maps: List[StuffedMap], cells: CellSet, ell: int,
                           v_max: Optional[int] = None) -> CountTable:
    """Sum of 1/|Aut| over isomorphism classes of undecorated maps."""
    tbl = CountTable(cells.symbols, complete_through=v_max)
    seen = set()
    for m in maps:
        u = m.undecorated()
        code = canonical_code(u)
        if code in seen:
            continue
        seen.add(code)
        tbl.add(ell, m.V, m.cell_counts(cells), Fraction(1, automorphism_count(m)))
    return tbl


def series_from_counts(tbl: CountTable, N: int, ell: Optional[int] = None,
                       vertex_symbol: str = "t") -> TSeries:
    """Generating series ``sum count * t^v * prod w^n`` through ``t^N``."""
    if tbl.complete_through is None or tbl.complete_through < N:
        raise IncompleteTable(f"table complete through {tbl.complete_through}, need {N}")
    terms = [(v, dict(zip(tbl.symbols, n)), c) for (l, v, n), c in tbl.entries.items()
             if ell is None or l == ell]
    return TSeries.from_terms(terms, N, tbl.symbols)


# ---------------------------------------------------------------------------
# hypermobiles, generated directly from the labelling rules


class _MobileGen:
    """Grows hypermobiles from an anchor edge of the origin mobile.

    White nodes are ``("W", label, blacks)``; black nodes are
    ``("B", role, whites)`` where ``role`` is ``("poly",)``, ``("entry",)`` or
    ``("par", gate_index, s, child_mobiles)``.  The rotation of a black node
    is its parent followed by its children; the label of every neighbour is at
    most one more than the label of the neighbour before it.
    """

    def __init__(self, cells: CellSet):
        self.cells = cells
        self.poly_deg = {x // 2 for x in cells.polygon_lengths}
        self.multi = [s.boundaries for s in cells.multis]
        self.degs = sorted(self.poly_deg | {x // 2 for s in self.multi for x in s})
        self.memo: Dict[tuple, list] = {}

    def _cached(self, key, fn):
        if key not in self.memo:
            self.memo[key] = fn()
        return self.memo[key]

    @staticmethod
    def _seq(makers, budget):
        """All ways to run ``makers`` in order sharing ``budget`` whites."""
        out = [((), 0)]
        for mk in makers:
            nxt = []
            for nodes, used in out:
                for node, u in mk(budget - used):
                    nxt.append((nodes + (node,), used + u))
            out = nxt
        return out

    def white(self, label: int, floor: Optional[int], budget: int, first: Optional[tuple] = None):
        """White subtrees; ``first`` = (degree, entry flag) forces the first black."""
        key = ("W", label, floor, budget, first)
        return self._cached(key, lambda: self._white(label, floor, budget, first))

    def _white(self, label, floor, budget, first):
        if budget < 1:
            return []
        out = []
        starts = [((), 0)]
        if first is not None:
            d, entry = first
            starts = [((b,), u) for b, u in self.black(label, floor, budget - 1, d, entry)]
        for head, used in starts:
            for tail, u2 in self.blacks_seq(label, floor, budget - 1 - used):
                out.append((("W", label, head + tail), 1 + used + u2))
        return out

    def blacks_seq(self, label, floor, budget):
        key = ("S", label, floor, budget)
        return self._cached(key, lambda: self._blacks_seq(label, floor, budget))

    def _blacks_seq(self, label, floor, budget):
        out = [((), 0)]
        for d in self.degs:
            for b, u in self.black(label, floor, budget, d, False):
                if u == 0:
                    continue
                for rest, u2 in self.blacks_seq(label, floor, budget - u):
                    out.append(((b,) + rest, u + u2))
        return out

    def _label_seqs(self, lp: int, d: int, floor: Optional[int]):
        """Labels of the ``d - 1`` children of a black whose parent is labelled ``lp``."""
        res = []

        def rec(i, prev, acc):
            if i == d:
                if lp <= prev + 1:
                    res.append(tuple(acc))
                return
            lo = lp - (d - i)
            if floor is not None:
                lo = max(lo, floor)
            for x in range(lo, prev + 2):
                rec(i + 1, x, acc + [x])

        rec(1, lp, [])
        return res

    def child(self, s: int, budget: int, d: int):
        # a child mobile costs one extra unit: its erased minimum vertex
        return [(n, u + 1) for n, u in self.white(s + 1, s + 1, budget - 1, (d, True))]

    def black(self, lp, floor, budget, d, entry):
        key = ("B", lp, floor, budget, d, entry)
        return self._cached(key, lambda: self._black(lp, floor, budget, d, entry))

    def _black(self, lp, floor, budget, d, entry):
        out = []
        roles_possible = entry or 2 * d in {2 * x for x in self.poly_deg} or any(
            2 * d in s for s in self.multi)
        if not roles_possible:
            return out
        for labels in self._label_seqs(lp, d, floor):
            makers = [lambda b, x=x: self.white(x, floor, b) for x in labels]
            for kids, used in self._seq(makers, budget):
                if entry:
                    out.append((("B", ("entry",), kids), used))
                    continue
                if d in self.poly_deg:
                    out.append((("B", ("poly",), kids), used))
                rot_labels = (lp,) + labels
                for shape in self.multi:
                    if 2 * d not in shape:
                        continue
                    rest = list(shape)
                    rest.remove(2 * d)
                    for gi in range(d):
                        lg = rot_labels[gi]
                        ln = rot_labels[(gi + 1) % d]
                        for s in range(ln - 1, lg + 1):
                            cm = [lambda b, l=l, s=s: self.child(s, b, l // 2) for l in rest]
                            for mobs, u in self._seq(cm, budget - used):
                                out.append((("B", ("par", gi, s, tuple(sorted(mobs))), kids), used + u))
        return out


def _build_hypermobile(origin_node) -> Optional[Hypermobile]:
    mobiles: List[dict] = []
    hyper: List[list] = []

    def new_mobile():
        mobiles.append({"color": [], "label": [], "rot": []})
        return len(mobiles) - 1

    def add_vertex(mi, color, label):
        m = mobiles[mi]
        m["color"].append(color)
        m["label"].append(label)
        m["rot"].append([])
        return len(m["color"]) - 1

    def build_white(mi, node, parent):
        _, label, blacks = node
        w = add_vertex(mi, "w", label)
        if parent is not None:
            mobiles[mi]["rot"][w].append(parent)
        for bnode in blacks:
            b = build_black(mi, bnode, w)
            mobiles[mi]["rot"][w].append(b)
        return w

    def build_black(mi, node, parent):
        _, role, whites = node
        b = add_vertex(mi, "b", None)
        rot = mobiles[mi]["rot"][b]
        rot.append(parent)
        for wnode in whites:
            rot.append(build_white(mi, wnode, b))
        if role[0] == "par":
            _, gi, s, kids = role
            ends = [(mi, rot[gi], b)]
            for k in kids:
                cm = new_mobile()
                g = build_white(cm, k, None)
                ends.append((cm, g, mobiles[cm]["rot"][g][0]))
            hyper.append(ends)
        return b

    om = new_mobile()
    w0 = build_white(om, origin_node, None)
    mobs = tuple(Mobile(tuple(m["color"]), tuple(m["label"]), tuple(tuple(r) for r in m["rot"]))
                 for m in mobiles)
    return Hypermobile(mobs, tuple(tuple(e) for e in hyper), (om, w0, mobs[om].rot[w0][0], True))


def _origin_ok(h: Hypermobile) -> bool:
    low = h.mobiles[0].min_label()
    mins = [m.min_label() for m in h.mobiles]
    return all(x > low for x in mins[1:])


def _rerooted(h: Hypermobile, mi: int, w: int, b: int, up: bool) -> Hypermobile:
    shift = -h.mobiles[mi].label[w]
    return Hypermobile(tuple(m.shifted(shift) for m in h.mobiles), h.hyperedges, (mi, w, b, up))


def enumerate_hypermobiles(cells: CellSet, v_max: int) -> Tuple[CountTable, List[Hypermobile]]:
    """All rooted hypermobiles whose white count plus mobile count is at most ``v_max``.

    That sum is the vertex count of the corresponding pointed map; the count
    table is keyed by it (with boundary 0).
    """
    gen = _MobileGen(cells)
    found: Dict[bytes, Hypermobile] = {}
    for d in gen.degs:
        for node, used in gen.white(0, None, v_max - 1, (d, False)):
            h = _build_hypermobile(node)
            if not _origin_ok(h):
                continue
            for mi, m in enumerate(h.mobiles):
                for w, b in m.edges():
                    for up in (True, False):
                        r = _rerooted(h, mi, w, b, up)
                        code = canonical_code_hm(r)
                        if code not in found:
                            found[code] = r
    items = sorted(found.values(), key=lambda x: (x.n_whites, canonical_code_hm(x)))
    tbl = CountTable(cells.symbols, complete_through=v_max)
    for h in items:
        tbl.add(0, h.n_whites + len(h.mobiles), hypermobile_cell_counts(h, cells))
    return tbl, items


def hypermobile_cell_counts(h: Hypermobile, cells: CellSet) -> Tuple[int, ...]:
    counts = {n: 0 for n in cells.symbols}
    used = {(e[0], e[2]) for he in h.hyperedges for e in he}
    for mi, m in enumerate(h.mobiles):
        for b in m.blacks():
            if (mi, b) not in used:
                counts[cells.symbol((2 * len(m.rot[b]),))] += 1
    for he in h.hyperedges:
        counts[cells.symbol(tuple(2 * len(h.mobiles[mi].rot[b]) for mi, _, b in he))] += 1
    return tuple(counts[n] for n in cells.symbols)
