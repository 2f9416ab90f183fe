"""Bijection between pointed rooted BMS maps and hypermobiles.

``phi`` turns every component into a labelled mobile (one black vertex per
face, one edge per map edge joining the face to the larger endpoint of an
edge whose labels rise along the face) and every branch into a hyperedge.
``psi`` rebuilds each component from its mobile by chording every white
corner to the next corner with a smaller label, and reads the spurious
points off the label of each entry gate.

A few embedding choices are parameterized by :class:`Convention`;
:func:`pin_convention` tries all of them against exhaustive roundtrips.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .cells import CellSet
from .errors import ConventionFailure, MalformedContour, UnreachableVertex
from .hypermobile import BLACK, WHITE, Hypermobile, Mobile, canonical_code_hm
from .maps import Attachment, Component, StuffedMap, canonical_code


@dataclass(frozen=True)
class Convention:
    forward: bool = True       # chords follow the contour forwards
    far_first: bool = True     # inside a corner, ccw order starts with the farthest target
    star_low: bool = True      # the extra vertex counts as a near target
    star_rev: bool = False     # reverse the rotation at the extra vertex
    corner_after: bool = True  # an edge (w, b) owns the corner of w just after b

    def as_dict(self) -> dict:
        return asdict(self)


ALL_CONVENTIONS = [Convention(*bits) for bits in itertools.product((True, False), repeat=5)]

# the vector that the exhaustive roundtrip search selects
PINNED = Convention(forward=True, far_first=True, star_low=True, star_rev=True, corner_after=False)


# ---------------------------------------------------------------------------
# labels


def _hypertree_from(m: StuffedMap, start: int):
    """Components in breadth-first order from ``start``; each child maps to
    (branch index, parent attachment, its own attachment)."""
    order = [start]
    link: Dict[int, Tuple[int, Attachment, Attachment]] = {}
    seen = {start}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for bi, br in enumerate(m.branches):
            mine = [a for a in br if a.component == c]
            if not mine:
                continue
            for a in br:
                if a.component not in seen:
                    seen.add(a.component)
                    link[a.component] = (bi, mine[0], a)
                    order.append(a.component)
                    queue.append(a.component)
    if len(order) != m.K:
        raise UnreachableVertex("components not linked through branches")
    return order, link


def label_bps(m: StuffedMap) -> List[List[int]]:
    """Vertex labels per component.

    The pointed component is labelled by distance from the source.  Any other
    component is labelled by distance from the spurious point of its entry
    boundary, offset by the label of the spurious point on the parent side.
    """
    if m.source is None:
        raise ValueError("map is not pointed")
    sc, sv = m.source
    order, link = _hypertree_from(m, sc)
    labels: List[Optional[List[int]]] = [None] * m.K
    for c in order:
        comp = m.components[c]
        if c == sc:
            base, start = 0, sv
        else:
            _, pa, me = link[c]
            pc = m.components[pa.component]
            base = labels[pa.component][pc.tail(pa.spurious)]
            start = comp.tail(me.spurious)
        dist = comp.distances_from(start)
        if any(d is None for d in dist):
            raise UnreachableVertex(f"component {c} is disconnected")
        labels[c] = [base + d for d in dist]
    return labels


# ---------------------------------------------------------------------------
# phi


def _up(comp: Component, lab: List[int], h: int) -> bool:
    return lab[comp.head(h)] > lab[comp.tail(h)]


def _component_mobile(comp: Component, lab: List[int]):
    """Mobile of one labelled component.

    Returns the mobile, the white index of each map vertex (None for the
    erased minimum) and the black index of each face.
    """
    low = min(lab)
    keep = [v for v in range(comp.V) if lab[v] != low]
    if len(keep) != comp.V - 1:
        raise ConventionFailure("minimum label attained twice on a component")
    wid = {v: i for i, v in enumerate(keep)}
    nb = len(comp.faces)
    bid = {f: len(keep) + f for f in range(nb)}
    n = len(keep) + nb
    rot: List[List[int]] = [[] for _ in range(n)]
    for f, orb in enumerate(comp.faces):
        for h in orb:
            if _up(comp, lab, h):
                rot[bid[f]].append(wid[comp.head(h)])
    for v in keep:
        orb = comp.vertices[v]
        for d in orb:
            if _up(comp, lab, comp.phi_inv(d)):
                rot[wid[v]].append(bid[comp.face_of[d]])
    color = tuple([WHITE] * len(keep) + [BLACK] * nb)
    label = tuple([lab[v] for v in keep] + [None] * nb)
    return Mobile(color, label, tuple(tuple(r) for r in rot)), wid, bid


def phi(m: StuffedMap) -> Hypermobile:
    labels = label_bps(m)
    mobs = []
    wids = []
    bids = []
    for ci, comp in enumerate(m.components):
        mob, wid, bid = _component_mobile(comp, labels[ci])
        mobs.append(mob)
        wids.append(wid)
        bids.append(bid)
    order, link = _hypertree_from(m, m.source[0])
    hyper = []
    for bi, br in enumerate(m.branches):
        ends = []
        for a in br:
            comp = m.components[a.component]
            lab = labels[a.component]
            link_c = link.get(a.component)
            is_entry = link_c is not None and link_c[0] == bi
            if is_entry:
                d = a.spurious
                w = comp.head(d)
            else:
                x = a.spurious
                while not _up(comp, lab, comp.phi_inv(x)):
                    x = comp.phi_inv(x)
                w = comp.tail(x)
            if w not in wids[a.component]:
                raise ConventionFailure(f"branch {bi}: endpoint on an erased vertex")
            ends.append((a.component, wids[a.component][w], bids[a.component][a.face]))
        hyper.append(tuple(ends))
    rc, rd = m.root
    comp = m.components[rc]
    lab = labels[rc]
    up = _up(comp, lab, rd)
    h = rd if up else comp.alpha[rd]
    rw = wids[rc][comp.head(h)]
    rb = bids[rc][comp.face_of[h]]
    shift = -mobs[rc].label[rw]
    mobs = [mb.shifted(shift) for mb in mobs]
    return Hypermobile(tuple(mobs), tuple(hyper), (rc, rw, rb, up))


# ---------------------------------------------------------------------------
# psi


def _contour(mob: Mobile, forward: bool) -> List[Tuple[int, int]]:
    """Tree darts ``(u, v)`` in face order; each stands for the corner at ``v``
    that follows it."""
    if mob.n == 1:
        return []
    start = (0, mob.rot[0][0])
    seq = [start]
    u, v = start
    while True:
        nxt = (v, mob.next_around(v, u))
        if nxt == start:
            break
        seq.append(nxt)
        u, v = nxt
    if not forward:
        seq.reverse()
    return seq


def _mobile_component(mob: Mobile, conv: Convention):
    """Rebuild the component of one mobile.

    Returns the component, the map vertex of each white, the index of the extra
    vertex, and for every mobile edge ``(w, b)`` the up-dart into ``w`` lying in
    the face of ``b``.
    """
    contour = _contour(mob, conv.forward)
    L = len(contour)
    low = mob.min_label()
    # corner index of every white corner; corner i sits at contour[i][1]
    wc = [i for i, (u, v) in enumerate(contour) if mob.color[v] == WHITE]
    target: Dict[int, Optional[int]] = {}
    for i in wc:
        lab = mob.label[contour[i][1]]
        if lab == low:
            target[i] = None
            continue
        for k in range(1, L + 1):
            j = (i + k) % L
            v = contour[j][1]
            if mob.color[v] == WHITE and mob.label[v] == lab - 1:
                target[i] = j
                break
        else:
            raise MalformedContour(f"no successor for corner {i}")
    # darts: for chord of corner i, dart 2k leaves the corner, 2k+1 leaves the target
    chords = {i: k for k, i in enumerate(wc)}
    n = 2 * len(wc)
    alpha = [0] * n
    for k in range(len(wc)):
        alpha[2 * k], alpha[2 * k + 1] = 2 * k + 1, 2 * k
    # attachments per corner: (sort key, dart)
    at_corner: Dict[int, List[Tuple[float, int]]] = {i: [] for i in wc}
    star: List[Tuple[int, int]] = []
    for i in wc:
        k = chords[i]
        j = target[i]
        if j is None:
            key = 0.5 if conv.star_low else L - 0.5
            at_corner[i].append((key, 2 * k))
            star.append((i, 2 * k + 1))
        else:
            at_corner[i].append(((j - i) % L, 2 * k))
            at_corner[j].append(((i - j) % L, 2 * k + 1))
    # rotation around each white: corners in rotation order, then chords inside each corner
    white_corners: Dict[int, Dict[int, int]] = {}
    for i in wc:
        u, v = contour[i]
        white_corners.setdefault(v, {})[u] = i
    sigma = [0] * n
    vertex_of_white: Dict[int, int] = {}
    for w in mob.whites():
        seq = []
        for u in mob.rot[w]:
            i = white_corners[w][u]
            items = sorted(at_corner[i], reverse=conv.far_first)
            if not conv.forward:
                items.reverse()
            seq.extend(d for _, d in items)
        for a, b in zip(seq, seq[1:] + seq[:1]):
            sigma[a] = b
    star.sort(reverse=conv.star_rev)
    sd = [d for _, d in star]
    for a, b in zip(sd, sd[1:] + sd[:1]):
        sigma[a] = b
    comp = Component(sigma, alpha)
    for w in mob.whites():
        any_dart = 2 * chords[white_corners[w][mob.rot[w][0]]]
        vertex_of_white[w] = comp.vertex_of[any_dart]
    star_vertex = comp.vertex_of[sd[0]] if sd else None
    # up-dart for every mobile edge: the chord reversing the corner after (b -> w)
    updart: Dict[Tuple[int, int], int] = {}
    for w in mob.whites():
        for b in mob.rot[w]:
            u = b if conv.corner_after else mob.rot[w][mob.rot[w].index(b) - 1]
            updart[(w, b)] = 2 * chords[white_corners[w][u]] + 1
    return comp, vertex_of_white, star_vertex, updart


def psi(h: Hypermobile, conv: Convention = PINNED) -> StuffedMap:
    built = [_mobile_component(mob, conv) for mob in h.mobiles]
    comps = tuple(b[0] for b in built)
    order, parent = h.tree_order()
    branches = []
    for hi, he in enumerate(h.hyperedges):
        atts = []
        for e in he:
            mi, w, b = e
            comp, _, star_v, updart = built[mi]
            u = updart[(w, b)]
            face = comp.face_of[u]
            if parent.get(mi, (None,))[0] == hi:
                d = u
                if comp.tail(d) != star_v:
                    raise MalformedContour(f"entry of mobile {mi} does not start at the extra vertex")
            else:
                s = min(h.mobiles[x[0]].min_label() for x in he if x is not e) - 1
                j = h.mobiles[mi].label[w] - s
                d = u
                for _ in range(j + 1):
                    d = comp.phi[d]
            atts.append(Attachment(mi, face, d))
        branches.append(tuple(atts))
    rm, rw, rb, up = h.root
    comp = comps[rm]
    u = built[rm][3][(rw, rb)]
    root_dart = u if up else comp.alpha[u]
    o = h.origin()
    return StuffedMap(comps, tuple(branches), (rm, root_dart), None, (o, built[o][2]))


# ---------------------------------------------------------------------------
# verification


def _map_key(m: StuffedMap) -> bytes:
    return canonical_code(m)


def roundtrip_failures(maps: Sequence[StuffedMap], conv: Convention, limit: Optional[int] = None
                       ) -> List[dict]:
    out = []
    for m in maps:
        try:
            back = psi(phi(m), conv)
            ok = _map_key(back) == _map_key(m)
        except Exception as exc:  # noqa: BLE001 - witnesses are reported, not raised
            ok, back = False, exc
        if not ok:
            out.append({"map": m.to_json(), "error": repr(back) if isinstance(back, Exception) else "mismatch"})
            if limit is not None and len(out) >= limit:
                break
    return out


def pin_convention(maps: Sequence[StuffedMap], sample: int = 200) -> Convention:
    """First convention for which ``psi . phi`` is the identity on every given map."""
    probe = list(maps)[:sample]
    for conv in ALL_CONVENTIONS:
        if not roundtrip_failures(probe, conv, limit=1) and not roundtrip_failures(maps, conv, limit=1):
            return conv
    raise ConventionFailure("no convention inverts phi on the given maps")


def phi_invariants(m: StuffedMap, h: Hypermobile) -> List[str]:
    """Bookkeeping that every image of ``phi`` must satisfy."""
    out = []
    if len(h.mobiles) != m.K:
        out.append("mobile count differs from component count")
    if h.n_whites != m.V - m.K:
        out.append("white count differs from V - K")
    if h.n_blacks != m.F:
        out.append("black count differs from face count")
    if h.n_edges != m.E:
        out.append("tree edge count differs from edge count")
    if sorted(len(he) for he in h.hyperedges) != sorted(len(b) for b in m.branches):
        out.append("hyperedge arities differ from branch arities")
    faces = sorted(c.face_degree(f) for c in m.components for f in range(len(c.faces)))
    blacks = sorted(2 * len(mb.rot[b]) for mb in h.mobiles for b in mb.blacks())
    if faces != blacks:
        out.append("black valencies differ from face degrees")
    # host graph of the hypertree: one node per mobile, a path per hyperedge
    host_edges = sum(len(he) - 1 for he in h.hyperedges)
    if len(h.mobiles) - host_edges != 1:
        out.append("host graph is not a tree")
    return out


def verify_bijection(cells: CellSet, v_max: int, convention: Optional[Convention] = None,
                     max_failures: int = 20) -> dict:
    """Exhaustive check of both roundtrips and of the size-by-size counts."""
    from .enumerate import enumerate_hypermobiles, enumerate_pointed_bms

    left_tbl, left = enumerate_pointed_bms(cells, v_max)
    right_tbl, right = enumerate_hypermobiles(cells, v_max)
    conv = convention or (pin_convention(left) if left else PINNED)
    failures: List[dict] = []
    statistic_ok = True
    for m in left:
        try:
            h = phi(m)
            problems = phi_invariants(m, h)
            if h.n_whites + len(h.mobiles) != m.V:
                statistic_ok = False
            back = psi(h, conv)
            if canonical_code(back) != canonical_code(m):
                problems.append("psi(phi(m)) != m")
        except Exception as exc:  # noqa: BLE001
            problems = [repr(exc)]
        if problems and len(failures) < max_failures:
            failures.append({"side": "map", "input": m.to_json(), "problems": problems})
        elif problems:
            failures.append({"side": "map", "problems": problems})
    for h in right:
        try:
            ok = canonical_code_hm(phi(psi(h, conv))) == canonical_code_hm(h)
            problems = [] if ok else ["phi(psi(h)) != h"]
        except Exception as exc:  # noqa: BLE001
            problems = [repr(exc)]
        if problems:
            entry = {"side": "hypermobile", "problems": problems}
            if len(failures) < max_failures:
                entry["input"] = h.to_json()
            failures.append(entry)
    left_by = {str(k): int(v) for k, v in left_tbl.by_vertices().items()}
    right_by = {str(k): int(v) for k, v in right_tbl.by_vertices().items()}
    return {
        "cells": cells.to_json(),
        "max_vertices": v_max,
        "convention": conv.as_dict(),
        "matching_statistic": "vertices = whites + mobiles" if statistic_ok else "whites + mobiles != vertices",
        "sizes": sorted(int(k) for k in set(left_by) | set(right_by)),
        "counts_left": left_by,
        "counts_right": right_by,
        "tables_equal": left_tbl == right_tbl,
        "failures": failures,
        "n_failures": len(failures),
        "ok": not failures and left_tbl == right_tbl and statistic_ok,
    }
