"""Planar components, stuffed maps and their decorations.

A component is a rotation system on darts ``0..n-1``: ``sigma`` rotates darts
around the vertex they leave, ``alpha`` swaps the two darts of an edge.  Faces
are the cycles of ``phi = sigma o alpha`` (apply ``alpha`` first); a dart
belongs to the face it borders, and ``phi`` walks along that face.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cells import CellSet, CellShape
from .errors import MalformedPermutation, NonPlanar, NotBipartite, NotHypertree


def _orbits(perm: Sequence[int]) -> List[List[int]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = perm[x]
        out.append(cyc)
    return out


def _is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


class Component:
    """One planar, path-connected piece of a stuffed map."""

    __slots__ = ("sigma", "alpha", "phi", "vertex_of", "vertices", "face_of", "faces")

    def __init__(self, sigma: Sequence[int], alpha: Sequence[int]):
        self.sigma = tuple(sigma)
        self.alpha = tuple(alpha)
        if len(self.sigma) != len(self.alpha):
            raise MalformedPermutation("sigma and alpha act on different sets")
        if not _is_permutation(self.sigma) or not _is_permutation(self.alpha):
            raise MalformedPermutation("sigma and alpha must be permutations of 0..n-1")
        if any(self.alpha[h] == h or self.alpha[self.alpha[h]] != h for h in range(len(self.alpha))):
            raise MalformedPermutation("alpha must be a fixed-point-free involution")
        self.phi = tuple(self.sigma[self.alpha[h]] for h in range(len(self.alpha)))
        self.vertices = _orbits(self.sigma)
        self.faces = _orbits(self.phi)
        self.vertex_of = [0] * len(self.sigma)
        for i, orb in enumerate(self.vertices):
            for h in orb:
                self.vertex_of[h] = i
        self.face_of = [0] * len(self.sigma)
        for i, orb in enumerate(self.faces):
            for h in orb:
                self.face_of[h] = i

    @classmethod
    def from_phi(cls, phi: Sequence[int], alpha: Sequence[int]) -> "Component":
        return cls([phi[alpha[h]] for h in range(len(alpha))], alpha)

    @property
    def n_darts(self) -> int:
        return len(self.sigma)

    @property
    def V(self) -> int:
        return len(self.vertices) if self.sigma else 1

    @property
    def E(self) -> int:
        return len(self.alpha) // 2

    @property
    def F(self) -> int:
        return len(self.faces) if self.sigma else 1

    @property
    def chi(self) -> int:
        return self.V - self.E + self.F

    @property
    def genus(self) -> int:
        return (2 - self.chi) // 2

    def tail(self, h: int) -> int:
        return self.vertex_of[h]

    def head(self, h: int) -> int:
        return self.vertex_of[self.alpha[h]]

    def face_degree(self, f: int) -> int:
        return len(self.faces[f])

    def phi_inv(self, h: int) -> int:
        # sigma o alpha inverted: alpha o sigma^-1
        x = h
        while self.phi[x] != h:
            x = self.phi[x]
        return x

    def is_connected(self) -> bool:
        if not self.sigma:
            return True
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in (self.sigma[x], self.alpha[x]):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n_darts

    def two_coloring(self) -> Optional[List[int]]:
        color = [-1] * self.V
        adj: List[List[int]] = [[] for _ in range(self.V)]
        for h in range(self.n_darts):
            adj[self.tail(h)].append(self.head(h))
        for s in range(self.V):
            if color[s] >= 0:
                continue
            color[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if color[w] < 0:
                        color[w] = 1 - color[u]
                        stack.append(w)
                    elif color[w] == color[u]:
                        return None
        return color

    def is_bipartite(self) -> bool:
        return self.two_coloring() is not None

    def distances_from(self, v: int) -> List[Optional[int]]:
        adj: List[List[int]] = [[] for _ in range(self.V)]
        for h in range(self.n_darts):
            adj[self.tail(h)].append(self.head(h))
        dist: List[Optional[int]] = [None] * self.V
        dist[v] = 0
        queue = [v]
        for u in queue:
            for w in adj[u]:
                if dist[w] is None:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def problems(self) -> List[str]:
        out = []
        if not self.is_connected():
            out.append("component is not connected")
        if self.chi != 2:
            out.append(f"component is not planar (chi={self.chi})")
        if not self.is_bipartite():
            out.append("component is not bipartite")
        return out

    def __eq__(self, other):
        return isinstance(other, Component) and self.sigma == other.sigma and self.alpha == other.alpha

    def __hash__(self):
        return hash((self.sigma, self.alpha))

    def __repr__(self):
        return f"Component(V={self.V}, E={self.E}, F={self.F})"


def assemble_component(sigma, alpha) -> Component:
    """Build and validate a planar bipartite component.

    ``sigma`` and ``alpha`` may be sequences over ``0..n-1`` or dicts over an
    arbitrary finite id set, which is then relabelled in sorted order.
    """
    if isinstance(sigma, dict) or isinstance(alpha, dict):
        if not isinstance(sigma, dict) or not isinstance(alpha, dict) or set(sigma) != set(alpha):
            raise MalformedPermutation("sigma and alpha must act on the same id set")
        ids = sorted(sigma)
        pos = {x: i for i, x in enumerate(ids)}
        try:
            sigma = [pos[sigma[x]] for x in ids]
            alpha = [pos[alpha[x]] for x in ids]
        except KeyError as exc:
            raise MalformedPermutation(f"image {exc} outside the id set") from None
    c = Component(sigma, alpha)
    if not c.is_connected():
        raise NonPlanar("component is not connected")
    if c.chi != 2:
        raise NonPlanar(f"Euler characteristic {c.chi} != 2")
    if not c.is_bipartite():
        raise NotBipartite("vertex set is not 2-colourable")
    return c


@dataclass(frozen=True)
class Attachment:
    """One boundary of a multi-boundary cell, glued into a face of a component."""

    component: int
    face: int
    spurious: Optional[int] = None  # dart of that face leaving the spurious point


@dataclass(frozen=True)
class StuffedMap:
    components: Tuple[Component, ...]
    branches: Tuple[Tuple[Attachment, ...], ...] = ()
    root: Optional[Tuple[int, int]] = None          # (component, dart)
    boundary: Optional[Tuple[int, int]] = None      # (component, face)
    source: Optional[Tuple[int, int]] = None        # (component, vertex)

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def V(self) -> int:
        return sum(c.V for c in self.components)

    @property
    def E(self) -> int:
        return sum(c.E for c in self.components)

    @property
    def F(self) -> int:
        return sum(c.F for c in self.components)

    @property
    def is_decorated(self) -> bool:
        return bool(self.branches) and all(a.spurious is not None for b in self.branches for a in b)

    def branch_shape(self, b: int) -> CellShape:
        return CellShape(tuple(self.components[a.component].face_degree(a.face) for a in self.branches[b]))

    def attachment_at(self) -> Dict[Tuple[int, int], Tuple[int, int]]:
        """``(component, face) -> (branch index, position in branch)``."""
        out = {}
        for i, br in enumerate(self.branches):
            for j, a in enumerate(br):
                out[(a.component, a.face)] = (i, j)
        return out

    def spurious_points(self) -> List[Tuple[int, int]]:
        out = []
        for br in self.branches:
            for a in br:
                if a.spurious is not None:
                    out.append((a.component, self.components[a.component].tail(a.spurious)))
        return out

    def cell_counts(self, cells: CellSet) -> Tuple[int, ...]:
        counts = {n: 0 for n in cells.symbols}
        special = set(self.attachment_at())
        if self.boundary is not None:
            special.add(self.boundary)
        for ci, c in enumerate(self.components):
            for f in range(len(c.faces)):
                if (ci, f) not in special:
                    counts[cells.symbol((c.face_degree(f),))] += 1
        for b in range(len(self.branches)):
            counts[cells.symbol(self.branch_shape(b))] += 1
        return tuple(counts[n] for n in cells.symbols)

    def with_source(self, source: Optional[Tuple[int, int]]) -> "StuffedMap":
        return StuffedMap(self.components, self.branches, self.root, self.boundary, source)

    def undecorated(self) -> "StuffedMap":
        br = tuple(tuple(Attachment(a.component, a.face) for a in b) for b in self.branches)
        return StuffedMap(self.components, br, self.root, self.boundary, self.source)

    # -- JSON "stuffed-map/v1" ---------------------------------------------

    def to_json(self) -> dict:
        d = {
            "schema": "stuffed-map/v1",
            "components": [{"half_edges": c.n_darts, "sigma": list(c.sigma), "alpha": list(c.alpha)}
                           for c in self.components],
            "branches": [[[a.component, a.face] + ([a.spurious] if a.spurious is not None else [])
                          for a in b] for b in self.branches],
            "root": None if self.root is None else {"component": self.root[0], "half_edge": self.root[1]},
        }
        if self.boundary is not None:
            d["boundary"] = {"component": self.boundary[0], "face": self.boundary[1]}
        if self.source is not None:
            d["source"] = {"component": self.source[0], "vertex": self.source[1]}
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data) -> "StuffedMap":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        if data.get("schema", "stuffed-map/v1") != "stuffed-map/v1":
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        comps = []
        for c in data["components"]:
            if len(c["sigma"]) != c.get("half_edges", len(c["sigma"])):
                raise MalformedPermutation("half_edges does not match sigma")
            comps.append(Component(c["sigma"], c["alpha"]))
        branches = tuple(tuple(Attachment(a[0], a[1], a[2] if len(a) > 2 else None) for a in b)
                         for b in data.get("branches", []))
        root = data.get("root")
        root = None if root is None else (root["component"], root["half_edge"])
        bd = data.get("boundary")
        bd = None if bd is None else (bd["component"], bd["face"])
        src = data.get("source")
        src = None if src is None else (src["component"], src["vertex"])
        return cls(tuple(comps), branches, root, bd, src)


# ---------------------------------------------------------------------------


def euler_genus(m: StuffedMap) -> Tuple[int, int, int]:
    """``(chi, genus, K)`` with ``chi = V - E + F`` summed over components."""
    chi = m.V - m.E + m.F
    return chi, m.K - chi // 2, m.K


@dataclass
class Hypergraph:
    nodes: int
    hyperedges: List[Tuple[int, ...]] = field(default_factory=list)
    is_hypertree: bool = True

    def host_edges(self) -> List[Tuple[int, int]]:
        """Path expansion: each hyperedge becomes a chain through its members."""
        return [(e[i], e[i + 1]) for e in self.hyperedges for i in range(len(e) - 1)]


def is_hypertree(nodes: int, hyperedges: Sequence[Sequence[int]]) -> bool:
    parent = list(range(nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    n_edges = 0
    for e in hyperedges:
        if len(set(e)) != len(e):
            return False
        for a, b in zip(e, e[1:]):
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
            n_edges += 1
    return n_edges == nodes - 1


def associated_hypertree(m: StuffedMap, strict: bool = True) -> Hypergraph:
    edges = [tuple(a.component for a in b) for b in m.branches]
    hg = Hypergraph(m.K, edges, is_hypertree(m.K, edges))
    if strict and not hg.is_hypertree:
        raise NotHypertree("component/branch incidence is not a hypertree")
    return hg


def validate_stuffed_map(m: StuffedMap, s: CellSet) -> List[str]:
    """List every violated invariant; an empty list means the map is valid."""
    out: List[str] = []
    if not m.components:
        return ["no components"]
    for i, c in enumerate(m.components):
        out.extend(f"component {i}: {p}" for p in c.problems())
    seen_faces: Dict[Tuple[int, int], int] = {}
    decorated = [a.spurious is not None for b in m.branches for a in b]
    if any(decorated) and not all(decorated):
        out.append("spurious points must decorate every branch boundary or none")
    for bi, br in enumerate(m.branches):
        if len(br) < 2:
            out.append(f"branch {bi} has fewer than two boundaries")
        for a in br:
            if not 0 <= a.component < m.K or not 0 <= a.face < len(m.components[a.component].faces):
                out.append(f"branch {bi}: attachment {a} does not name a face")
                continue
            key = (a.component, a.face)
            if key in seen_faces or key == m.boundary:
                out.append(f"face {key} hosts more than one branch attachment")
            seen_faces[key] = bi
            if a.spurious is not None:
                c = m.components[a.component]
                if not 0 <= a.spurious < c.n_darts or c.face_of[a.spurious] != a.face:
                    out.append(f"branch {bi}: spurious corner not on its face")
        comps = [a.component for a in br]
        if len(set(comps)) != len(comps):
            out.append(f"branch {bi} touches one component twice")
        try:
            lengths = [m.components[a.component].face_degree(a.face) for a in br]
        except (IndexError, ValueError):
            continue
        if len(br) >= 2 and s.multi_by_lengths(lengths) is None:
            out.append(f"branch {bi}: face degree mismatch, boundary lengths {sorted(lengths)} not in cell set")
    for ci, c in enumerate(m.components):
        for f in range(len(c.faces)):
            if (ci, f) in seen_faces or (ci, f) == m.boundary:
                continue
            if c.face_degree(f) not in s.polygon_lengths:
                out.append(f"face {(ci, f)} of degree {c.face_degree(f)} is not a polygon of the cell set")
    if not associated_hypertree(m, strict=False).is_hypertree:
        out.append("associated hypergraph is not a hypertree")
    chi, g, K = euler_genus(m)
    if chi != 2 * K or g != 0:
        out.append(f"Euler identity fails: chi={chi}, K={K}")
    if m.root is not None:
        rc, rd = m.root
        if not 0 <= rc < m.K or not 0 <= rd < m.components[rc].n_darts:
            out.append("root is not a dart of the map")
        elif m.boundary is not None and (m.boundary[0] != rc or m.components[rc].face_of[rd] != m.boundary[1]):
            out.append("root is not on the boundary face")
    if m.boundary is not None:
        bc, bf = m.boundary
        if not 0 <= bc < m.K or not 0 <= bf < len(m.components[bc].faces):
            out.append("boundary does not name a face")
    if m.source is not None:
        sc, sv = m.source
        if not 0 <= sc < m.K or not 0 <= sv < m.components[sc].V:
            out.append("source is not a vertex")
        elif m.source in m.spurious_points():
            out.append("source coincides with spurious point")
    return out


# ---------------------------------------------------------------------------
# canonical codes


def _bfs_order(c: Component, anchor: int) -> List[int]:
    order = [anchor]
    num = {anchor}
    for x in order:
        for y in (c.sigma[x], c.alpha[x]):
            if y not in num:
                num.add(y)
                order.append(y)
    return order


class _Coder:
    def __init__(self, m: StuffedMap):
        self.m = m
        self.att = m.attachment_at()

    def component(self, ci: int, anchor: int, entry_face: Optional[int]):
        c = self.m.components[ci]
        order = _bfs_order(c, anchor)
        num = {h: i for i, h in enumerate(order)}
        struct = tuple((num[c.sigma[h]], num[c.alpha[h]]) for h in order)
        faces = {}
        for f, orb in enumerate(c.faces):
            faces[f] = min(num[h] for h in orb)
        special = []
        if self.m.boundary is not None and self.m.boundary[0] == ci:
            special.append(("B", faces[self.m.boundary[1]]))
        if self.m.source is not None and self.m.source[0] == ci:
            special.append(("S", min(num[h] for h in c.vertices[self.m.source[1]])))
        cells = []
        for f in range(len(c.faces)):
            key = (ci, f)
            if key not in self.att:
                continue
            bi, pos = self.att[key]
            a = self.m.branches[bi][pos]
            sp = None if a.spurious is None else num[a.spurious]
            if f == entry_face:
                special.append(("E", faces[f], sp))
                continue
            kids = sorted(self.child(b) for j, b in enumerate(self.m.branches[bi]) if j != pos)
            cells.append((faces[f], sp, tuple(kids)))
        cells.sort()
        return (struct, tuple(special), tuple(cells))

    def child(self, a: Attachment):
        c = self.m.components[a.component]
        if a.spurious is not None:
            return self.component(a.component, a.spurious, a.face)
        return min(self.component(a.component, h, a.face) for h in c.faces[a.face])


def _to_jsonable(x):
    if isinstance(x, tuple):
        return [_to_jsonable(y) for y in x]
    return x


def canonical_code(m: StuffedMap) -> bytes:
    """Isomorphism-invariant code of a rooted (and possibly decorated) stuffed map.

    Two maps get equal codes iff an orientation-preserving relabelling of
    darts and components carries one onto the other with all decorations.
    Undecorated non-root components are anchored by the minimum code over
    the darts of their attaching face.
    """
    if m.root is None:
        raise ValueError("canonical_code needs a rooted map")
    code = _Coder(m).component(m.root[0], m.root[1], None)
    return json.dumps(_to_jsonable(code), separators=(",", ":")).encode()


def relabel(m: StuffedMap, perms: Sequence[Sequence[int]], comp_order: Sequence[int]) -> StuffedMap:
    """Rename darts (``perms[ci][old] = new``) and reorder components (new list of old indices)."""
    new_index = {old: new for new, old in enumerate(comp_order)}
    comps = []
    face_maps = []
    vert_maps = []
    for old in comp_order:
        c = m.components[old]
        p = perms[old]
        n = c.n_darts
        sigma = [0] * n
        alpha = [0] * n
        for h in range(n):
            sigma[p[h]] = p[c.sigma[h]]
            alpha[p[h]] = p[c.alpha[h]]
        nc = Component(sigma, alpha)
        comps.append(nc)
        face_maps.append({f: nc.face_of[p[orb[0]]] for f, orb in enumerate(c.faces)})
        vert_maps.append({v: nc.vertex_of[p[orb[0]]] for v, orb in enumerate(c.vertices)})
    inv = {old: i for i, old in enumerate(comp_order)}

    def att(a: Attachment) -> Attachment:
        i = inv[a.component]
        return Attachment(i, face_maps[i][a.face], None if a.spurious is None else perms[a.component][a.spurious])

    branches = tuple(tuple(att(a) for a in b) for b in m.branches)
    root = None if m.root is None else (new_index[m.root[0]], perms[m.root[0]][m.root[1]])
    bd = None if m.boundary is None else (inv[m.boundary[0]], face_maps[inv[m.boundary[0]]][m.boundary[1]])
    src = None if m.source is None else (inv[m.source[0]], vert_maps[inv[m.source[0]]][m.source[1]])
    return StuffedMap(tuple(comps), branches, root, bd, src)


def canonical_form(m: StuffedMap) -> StuffedMap:
    """Relabel ``m`` so that darts follow the canonical traversal order."""
    coder = _Coder(m)
    perms: Dict[int, List[int]] = {}
    comp_order: List[int] = []

    def visit(ci: int, anchor: int, entry_face: Optional[int]):
        c = m.components[ci]
        order = _bfs_order(c, anchor)
        p = [0] * c.n_darts
        for i, h in enumerate(order):
            p[h] = i
        perms[ci] = p
        comp_order.append(ci)
        num = p
        kids_all = []
        for f in range(len(c.faces)):
            if (ci, f) not in coder.att or f == entry_face:
                continue
            bi, pos = coder.att[(ci, f)]
            kids = []
            for j, a in enumerate(m.branches[bi]):
                if j == pos:
                    continue
                cc = m.components[a.component]
                if a.spurious is not None:
                    anchor_a = a.spurious
                else:
                    anchor_a = min(cc.faces[a.face], key=lambda h: coder.component(a.component, h, a.face))
                kids.append((coder.child(a), a.component, anchor_a, a.face))
            kids.sort(key=lambda k: k[0])
            kids_all.append((min(num[h] for h in c.faces[f]), kids))
        kids_all.sort(key=lambda k: k[0])
        for _, kids in kids_all:
            for _, kc, ka, kf in kids:
                visit(kc, ka, kf)

    visit(m.root[0], m.root[1], None)
    out = relabel(m, [perms[i] for i in range(m.K)], comp_order)
    # branches in a deterministic order
    branches = sorted((tuple(sorted(b, key=lambda a: (a.component, a.face))) for b in out.branches),
                      key=lambda b: (b[0].component, b[0].face))
    return StuffedMap(out.components, tuple(branches), out.root, out.boundary, out.source)


def gluing_component(polygons: Sequence[int], pairing: Sequence[Tuple[int, int]]) -> Component:
    """Glue oriented polygons (given by degrees) along the listed side pairs."""
    phi = []
    start = 0
    for d in polygons:
        phi.extend(start + (i + 1) % d for i in range(d))
        start += d
    alpha = [None] * start
    for a, b in pairing:
        alpha[a] = b
        alpha[b] = a
    if any(x is None for x in alpha):
        raise MalformedPermutation("pairing does not cover every side")
    return Component.from_phi(phi, alpha)
