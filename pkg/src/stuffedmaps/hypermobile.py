"""Labelled mobiles joined by hyperedges.

A mobile is a plane tree whose vertices are black or white; white vertices
carry integer labels.  ``rot[v]`` lists the neighbours of ``v`` in
counterclockwise order.  A hyperedge joins mobile edges ``(mobile, white,
black)`` lying in distinct mobiles; the endpoint nearest the origin mobile is
its *parent endpoint* (white = gate), the others are entry edges of their
mobiles.  The root is a mobile edge plus an orientation bit.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .cells import CellSet, CellShape
from .errors import InvalidCellSpec, MalformedContour
from .maps import is_hypertree

WHITE, BLACK = "w", "b"
Endpoint = Tuple[int, int, int]            # (mobile, white, black)
Root = Tuple[int, int, int, bool]          # (mobile, white, black, up)


@dataclass(frozen=True)
class Mobile:
    color: Tuple[str, ...]
    label: Tuple[Optional[int], ...]
    rot: Tuple[Tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.color)

    def whites(self) -> List[int]:
        return [v for v in range(self.n) if self.color[v] == WHITE]

    def blacks(self) -> List[int]:
        return [v for v in range(self.n) if self.color[v] == BLACK]

    def edges(self) -> List[Tuple[int, int]]:
        return [(w, b) for w in self.whites() for b in self.rot[w]]

    def has_edge(self, w: int, b: int) -> bool:
        return 0 <= w < self.n and 0 <= b < self.n and b in self.rot[w]

    def min_label(self) -> Optional[int]:
        ls = [self.label[w] for w in self.whites()]
        return min(ls) if ls else None

    def next_around(self, v: int, u: int) -> int:
        r = self.rot[v]
        return r[(r.index(u) + 1) % len(r)]

    def shifted(self, k: int) -> "Mobile":
        return Mobile(self.color, tuple(None if x is None else x + k for x in self.label), self.rot)

    def problems(self) -> List[str]:
        out = []
        n = self.n
        if n == 0:
            return ["empty mobile"]
        if len(self.label) != n or len(self.rot) != n:
            return ["array lengths differ"]
        for v in range(n):
            if self.color[v] not in (WHITE, BLACK):
                out.append(f"vertex {v}: bad colour")
            if (self.label[v] is None) != (self.color[v] == BLACK):
                out.append(f"vertex {v}: whites carry labels, blacks do not")
            for u in self.rot[v]:
                if not 0 <= u < n or v not in self.rot[u]:
                    out.append(f"vertex {v}: asymmetric adjacency")
                elif self.color[u] == self.color[v]:
                    out.append(f"edge {v}-{u} joins equal colours")
            if len(set(self.rot[v])) != len(self.rot[v]):
                out.append(f"vertex {v}: repeated neighbour")
        if out:
            return out
        m = sum(len(r) for r in self.rot) // 2
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in self.rot[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != n or m != n - 1:
            out.append("not a tree")
        for b in self.blacks():
            r = self.rot[b]
            for i in range(len(r)):
                if self.label[r[(i + 1) % len(r)]] > self.label[r[i]] + 1:
                    out.append(f"black {b}: label rule violated")
                    break
        return out


@dataclass(frozen=True)
class Hypermobile:
    mobiles: Tuple[Mobile, ...]
    hyperedges: Tuple[Tuple[Endpoint, ...], ...]
    root: Root

    @property
    def n_whites(self) -> int:
        return sum(len(m.whites()) for m in self.mobiles)

    @property
    def n_blacks(self) -> int:
        return sum(len(m.blacks()) for m in self.mobiles)

    @property
    def n_edges(self) -> int:
        return sum(m.n - 1 for m in self.mobiles)

    def origin(self) -> int:
        mins = [m.min_label() for m in self.mobiles]
        low = min(x for x in mins if x is not None)
        return mins.index(low)

    def tree_order(self) -> Tuple[List[int], Dict[int, Tuple[int, Endpoint]]]:
        """Breadth-first order of mobiles from the origin; each non-origin mobile
        maps to (hyperedge index, its own entry endpoint)."""
        o = self.origin()
        order = [o]
        parent: Dict[int, Tuple[int, Endpoint]] = {}
        seen = {o}
        queue = deque([o])
        while queue:
            m = queue.popleft()
            for hi, he in enumerate(self.hyperedges):
                if not any(e[0] == m for e in he):
                    continue
                for e in he:
                    if e[0] not in seen:
                        seen.add(e[0])
                        parent[e[0]] = (hi, e)
                        order.append(e[0])
                        queue.append(e[0])
        return order, parent

    def parent_endpoint(self, hi: int, parent: Dict[int, Tuple[int, Endpoint]]) -> Endpoint:
        for e in self.hyperedges[hi]:
            if parent.get(e[0], (None,))[0] != hi:
                return e
        raise MalformedContour(f"hyperedge {hi} has no parent endpoint")

    # -- JSON "hypermobile/v1" ----------------------------------------------

    def to_json(self) -> dict:
        mobs = []
        for m in self.mobiles:
            par, order = _preorder(m, 0, m.rot[0][0] if m.rot[0] else None)
            idx = {v: i for i, v in enumerate(order)}
            mobs.append({
                "parent": [-1 if par[v] is None else idx[par[v]] for v in order],
                "color": [m.color[v] for v in order],
                "label": [m.label[v] for v in order],
            })
        perms = [_preorder(m, 0, m.rot[0][0] if m.rot[0] else None)[1] for m in self.mobiles]
        idxs = [{v: i for i, v in enumerate(p)} for p in perms]
        return {
            "schema": "hypermobile/v1",
            "mobiles": mobs,
            "hyperedges": [[[e[0], idxs[e[0]][e[1]], idxs[e[0]][e[2]]] for e in he] for he in self.hyperedges],
            "root": {"mobile": self.root[0], "white": idxs[self.root[0]][self.root[1]],
                     "black": idxs[self.root[0]][self.root[2]], "up": self.root[3]},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data) -> "Hypermobile":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        if data.get("schema", "hypermobile/v1") != "hypermobile/v1":
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        mobs = []
        for md in data["mobiles"]:
            par = md["parent"]
            n = len(par)
            if len(md["color"]) != n or len(md["label"]) != n:
                raise ValueError("mobile arrays differ in length")
            rot: List[List[int]] = [[] for _ in range(n)]
            for v in range(n):
                p = par[v]
                if v == 0:
                    if p != -1:
                        raise ValueError("vertex 0 must be the tree root")
                    continue
                if not 0 <= p < v:
                    raise ValueError("parent array is not in preorder")
                rot[v].append(p)
                rot[p].append(v)
            mobs.append(Mobile(tuple(md["color"]), tuple(md["label"]), tuple(tuple(r) for r in rot)))
        he = tuple(tuple((e[0], e[1], e[2]) for e in h) for h in data.get("hyperedges", []))
        r = data["root"]
        return cls(tuple(mobs), he, (r["mobile"], r["white"], r["black"], bool(r["up"])))


def _preorder(m: Mobile, start: int, first: Optional[int]):
    """Preorder from ``start`` with children in rotation order beginning at ``first``."""
    par: Dict[int, Optional[int]] = {start: None}
    order = []
    stack = [(start, None, first)]
    while stack:
        v, p, f = stack.pop()
        order.append(v)
        r = m.rot[v]
        if not r:
            continue
        k = r.index(f) if f is not None else (r.index(p) + 1) % len(r)
        kids = [r[(k + i) % len(r)] for i in range(len(r))]
        kids = [u for u in kids if u != p]
        for u in reversed(kids):
            par[u] = v
            stack.append((u, v, None))
    return par, order


# ---------------------------------------------------------------------------


def gate_label_range(m: Mobile, gate: int, black: int) -> Tuple[int, int]:
    """Admissible range ``[lo, hi]`` of the spurious label below a gate edge."""
    nxt = m.next_around(black, gate)
    return m.label[nxt] - 1, m.label[gate]


def validate_hypermobile(h: Hypermobile, s: CellSet) -> List[str]:
    """List every violated invariant; empty means valid."""
    out: List[str] = []
    if not h.mobiles:
        return ["no mobiles"]
    for i, m in enumerate(h.mobiles):
        out.extend(f"mobile {i}: {p}" for p in m.problems())
        if not m.whites():
            out.append(f"mobile {i}: no white vertex")
    if out:
        return out
    used: Dict[Tuple[int, int], int] = {}
    for hi, he in enumerate(h.hyperedges):
        if len(he) < 2:
            out.append(f"hyperedge {hi}: arity below 2")
        if len({e[0] for e in he}) != len(he):
            out.append(f"hyperedge {hi}: two endpoints in one mobile")
        for mi, w, b in he:
            if not 0 <= mi < len(h.mobiles) or not h.mobiles[mi].has_edge(w, b) \
                    or h.mobiles[mi].color[w] != WHITE:
                out.append(f"hyperedge {hi}: endpoint {(mi, w, b)} is not a mobile edge")
                continue
            if (mi, b) in used:
                out.append(f"black {(mi, b)} lies on two hyperedges")
            used[(mi, b)] = hi
    if out:
        return out
    # S' conformance
    for hi, he in enumerate(h.hyperedges):
        lengths = [2 * len(h.mobiles[mi].rot[b]) for mi, _, b in he]
        if s.multi_by_lengths(lengths) is None:
            out.append(f"hyperedge {hi}: black valencies {sorted(x // 2 for x in lengths)} not in S'")
    for mi, m in enumerate(h.mobiles):
        for b in m.blacks():
            if (mi, b) not in used and 2 * len(m.rot[b]) not in s.polygon_lengths:
                out.append(f"black {(mi, b)}: valency {len(m.rot[b])} not in S'")
    if not is_hypertree(len(h.mobiles), [tuple(e[0] for e in he) for he in h.hyperedges]):
        out.append("mobiles and hyperedges do not form a hypertree")
        return out
    mins = [m.min_label() for m in h.mobiles]
    o = h.origin()
    if mins.count(mins[o]) != 1:
        out.append("minimum label not attained on a single mobile")
    order, parent = h.tree_order()
    for mi in order[1:]:
        hi, entry = parent[mi]
        pm, gate, pb = h.parent_endpoint(hi, parent)
        m = h.mobiles[mi]
        if m.label[entry[1]] != mins[mi]:
            out.append(f"mobile {mi}: entry gate not at minimum label")
        spur = mins[mi] - 1
        lo, hi_ = gate_label_range(h.mobiles[pm], gate, pb)
        if not lo <= spur <= hi_ or (pm == o and spur == mins[o] - 1):
            out.append(f"mobile {mi}: entry gate label rule")
    rm, rw, rb, _ = h.root
    if not 0 <= rm < len(h.mobiles) or not h.mobiles[rm].has_edge(rw, rb) \
            or h.mobiles[rm].color[rw] != WHITE:
        out.append("root is not a mobile edge")
    elif h.mobiles[rm].label[rw] != 0:
        out.append("root white is not labelled 0")
    return out


# ---------------------------------------------------------------------------
# canonical code


def _mobile_code(h: Hypermobile, mi: int, w: int, b: int, base: int, entry_hyper: Optional[int],
                 by_black: Dict[Tuple[int, int], int]):
    m = h.mobiles[mi]
    _, order = _preorder(m, w, b)
    num = {v: i for i, v in enumerate(order)}
    verts = []
    for v in order:
        r = m.rot[v]
        lab = None if m.label[v] is None else m.label[v] - base
        verts.append((m.color[v], lab, tuple(num[u] for u in r[r.index(_first(m, v, w, b, order, num)):]
                                             + r[:r.index(_first(m, v, w, b, order, num))])))
    hyper = []
    for v in order:
        if m.color[v] != BLACK or (mi, v) not in by_black:
            continue
        hi = by_black[(mi, v)]
        if hi == entry_hyper:
            continue
        he = h.hyperedges[hi]
        mine = next(e for e in he if e[0] == mi)
        kids = sorted(_mobile_code(h, e[0], e[1], e[2], base, hi, by_black) for e in he if e[0] != mi)
        hyper.append((num[v], num[mine[1]], tuple(kids)))
    return (tuple(verts), tuple(hyper))


def _first(m: Mobile, v: int, w: int, b: int, order, num) -> int:
    if v == w:
        return b
    # the neighbour with the smallest number is the tree parent in preorder
    return min(m.rot[v], key=lambda u: num[u])


def canonical_code_hm(h: Hypermobile) -> bytes:
    rm, rw, rb, up = h.root
    by_black = {(e[0], e[2]): hi for hi, he in enumerate(h.hyperedges) for e in he}
    base = h.mobiles[rm].label[rw]
    code = (bool(up), _mobile_code(h, rm, rw, rb, base, None, by_black))
    return json.dumps(code, separators=(",", ":")).encode()


def hypermobile_counts(items: Sequence[Hypermobile]) -> Dict[int, int]:
    return dict(sorted(Counter(h.n_whites for h in items).items()))
