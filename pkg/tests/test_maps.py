import random

import pytest

from stuffedmaps.cells import CellSet, CellShape, cellset
from stuffedmaps.enumerate import enumerate_bms, enumerate_pointed_bms
from stuffedmaps.errors import InvalidCellSpec, MalformedPermutation, NotHypertree
from stuffedmaps.maps import (Attachment, Component, StuffedMap, associated_hypertree, assemble_component,
                              canonical_code, canonical_form, euler_genus, is_hypertree, relabel,
                              validate_stuffed_map)

QB = cellset([4], [2, 2])


@pytest.fixture(scope="module")
def bridged_maps():
    return enumerate_bms(QB, 2, 5).maps


@pytest.fixture(scope="module")
def pointed_maps():
    return enumerate_pointed_bms(QB, 5)[1]


def test_single_edge():
    c = assemble_component([0, 1], [1, 0])
    assert (c.V, c.E, c.F, c.genus) == (2, 1, 1, 0)
    assert c.face_degree(0) == 2
    assert c.tail(0) != c.head(0)


def test_malformed_involution_rejected():
    with pytest.raises(MalformedPermutation):
        assemble_component([0, 1], [0, 1])
    with pytest.raises(MalformedPermutation):
        assemble_component([0, 0], [1, 0])


def test_torus_detected():
    # one vertex, two loops interleaved: genus one
    c = Component([1, 2, 3, 0], [2, 3, 0, 1])
    assert c.genus == 1
    assert any("genus" in p or "planar" in p for p in c.problems())


def test_cell_shape_rules():
    assert [CellShape(b).added_vertices for b in [(4,), (6,), (2, 2), (2, 4), (2, 2, 2)]] == [1, 2, 2, 3, 4]
    assert CellShape((4, 2)).boundaries == (2, 4)
    for bad in [(3,), (2,), (0, 4), ()]:
        with pytest.raises(InvalidCellSpec):
            CellShape(bad)
    assert CellSet.from_json({"cells": [{"boundaries": [2, 2]}, {"boundaries": [4]}]}).symbols == ("t_2_2", "t_4")
    with pytest.raises(InvalidCellSpec):
        CellSet.from_json({"cell": []})


def test_euler_and_hypertree_invariants(bridged_maps):
    for m in bridged_maps:
        chi, genus, K = euler_genus(m)
        assert genus == 0 and chi == 2 * K
        hg = associated_hypertree(m)
        assert sum(len(e) - 1 for e in hg.hyperedges) == K - 1
        assert validate_stuffed_map(m, QB) == []


def test_hypertree_checks():
    assert is_hypertree(3, [(0, 1), (1, 2)])
    assert is_hypertree(4, [(0, 1, 2), (2, 3)])
    assert not is_hypertree(3, [(0, 1), (1, 2), (0, 2)])
    assert not is_hypertree(3, [(0, 1)])


def test_cycle_of_components_rejected(bridged_maps):
    m = next(x for x in bridged_maps if x.K == 2)
    cyc = StuffedMap(m.components, m.branches + m.branches, m.root, m.boundary)
    with pytest.raises(NotHypertree):
        associated_hypertree(cyc)
    assert validate_stuffed_map(cyc, QB)


def test_wrong_cell_set_detected(bridged_maps):
    m = next(x for x in bridged_maps if x.branches)
    msgs = validate_stuffed_map(m, cellset([4], [2, 4]))
    assert any("face degree mismatch" in s for s in msgs)


def test_source_on_spurious_point_rejected(pointed_maps):
    m = next(x for x in pointed_maps if x.branches)
    ci, spur = m.spurious_points()[0]
    bad = m.with_source((ci, spur))
    assert any("source coincides with spurious point" in s for s in validate_stuffed_map(bad, QB))


def test_canonical_code_invariant_under_relabelling(pointed_maps):
    rng = random.Random(7)
    for m in pointed_maps[:: max(1, len(pointed_maps) // 60)]:
        perms = []
        for c in m.components:
            p = list(range(c.n_darts))
            rng.shuffle(p)
            perms.append(p)
        order = [0] + rng.sample(range(1, m.K), m.K - 1)
        assert canonical_code(relabel(m, perms, order)) == canonical_code(m)


def test_distinct_maps_have_distinct_codes(bridged_maps):
    codes = {canonical_code(m) for m in bridged_maps}
    assert len(codes) == len(bridged_maps)


def test_json_roundtrip(pointed_maps):
    for m in pointed_maps[:50]:
        back = StuffedMap.from_json(m.to_json())
        assert canonical_code(back) == canonical_code(m)
        assert canonical_form(back).dumps() == canonical_form(m).dumps()


def test_undecorated_drops_spurious_points(bridged_maps):
    m = next(x for x in bridged_maps if x.branches)
    u = m.undecorated()
    assert all(a.spurious is None for b in u.branches for a in b)
    assert isinstance(u.branches[0][0], Attachment)
