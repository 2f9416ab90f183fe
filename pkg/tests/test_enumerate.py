import math
from fractions import Fraction

import pytest

from stuffedmaps.cells import cellset
from stuffedmaps.enumerate import (automorphism_count, enumerate_bms, enumerate_hypermobiles, enumerate_ordinary,
                                   enumerate_pointed_bms, rescale_bms_to_stuffed, series_from_counts,
                                   weighted_counts_direct)
from stuffedmaps.errors import BudgetExceeded, IncompleteTable
from stuffedmaps.solver import solve_stuffed_functional, solve_tutte_ordinary

QUAD = cellset([4])
QB = cellset([4], [2, 2])


def catalan(m):
    return math.comb(2 * m, m) // (m + 1)


def rooted_quadrangulations(n):
    # n faces, boundary-2 rooting equals rooted quadrangulations with n faces
    return 2 * 3 ** n * math.factorial(2 * n) // (math.factorial(n) * math.factorial(n + 2))


@pytest.mark.parametrize("ell", [2, 4, 6, 8])
def test_plane_trees_are_catalan(ell):
    tbl = enumerate_ordinary(cellset(), ell, 6).table
    assert tbl.by_vertices() == {ell // 2 + 1: catalan(ell // 2)}


def test_quadrangulations_match_closed_formula():
    got = enumerate_ordinary(QUAD, 2, 7).table.by_vertices()
    assert got == {v: rooted_quadrangulations(v - 2) for v in range(2, 8)}


def test_odd_boundary_is_empty():
    assert enumerate_bms(QB, 3, 6).table.entries == {}
    assert enumerate_bms(QB, 5, 6).table.total() == 0


def test_closed_maps_shift_boundary_two():
    closed = enumerate_bms(QB, 0, 6).table.by_vertices()
    open2 = enumerate_bms(QB, 2, 6).table.by_vertices()
    assert closed == {v: c for v, c in open2.items() if v >= 3}


def test_bridge_only_bms_counts():
    # one bridge between two rooted edge-components: the two spurious choices are distinct
    assert enumerate_bms(cellset([2, 2]), 2, 6).table.by_vertices() == {2: 1, 4: 2, 6: 8}


def test_bridged_quadrangulation_bms_counts():
    assert enumerate_bms(QB, 2, 6).table.by_vertices() == {2: 1, 3: 2, 4: 11, 5: 70, 6: 518}


@pytest.mark.parametrize("cells", [cellset([6]), cellset([4], [6])])
def test_polygon_enumeration_matches_tutte_solver(cells):
    tbl = enumerate_ordinary(cells, 2, 6).table
    assert series_from_counts(tbl, 6, 2) == solve_tutte_ordinary(cells, 2, 6)[2]


@pytest.mark.parametrize("cells,v", [(QB, 6), (cellset([4], [2, 4]), 5), (cellset([2, 2]), 6)])
def test_rescaling_equals_automorphism_weighting(cells, v):
    e = enumerate_bms(cells, 2, v)
    assert rescale_bms_to_stuffed(e.table, cells) == weighted_counts_direct(e.maps, cells, 2, v)


def test_rescaled_series_matches_functional_equation():
    e = enumerate_bms(QB, 2, 6)
    got = series_from_counts(rescale_bms_to_stuffed(e.table, QB), 6, 2)
    assert got == solve_stuffed_functional(QB, [2], 6)[2]


def test_symmetric_bridge_map_has_two_automorphisms():
    e = enumerate_bms(cellset([2, 2]), 2, 4)
    auts = sorted(automorphism_count(m) for m in e.maps if m.V == 4)
    assert auts == [2, 2]
    assert rescale_bms_to_stuffed(e.table, cellset([2, 2])).by_vertices()[4] == Fraction(1, 2)


def test_pointed_counts_are_vertex_weighted():
    tbl, maps = enumerate_pointed_bms(QUAD, 6)
    assert tbl.by_vertices() == {v: v * rooted_quadrangulations(v - 2) for v in range(3, 7)}
    assert all(m.source is not None for m in maps)


def test_hypermobile_counts_match_pointed_maps():
    left, _ = enumerate_pointed_bms(QB, 6)
    right, items = enumerate_hypermobiles(QB, 6)
    assert left == right
    assert right.by_vertices() == {3: 6, 4: 40, 5: 318, 6: 2816}


def test_incomplete_table_refused():
    tbl = enumerate_ordinary(QUAD, 2, 4).table
    with pytest.raises(IncompleteTable):
        series_from_counts(tbl, 6)


def test_budget_is_enforced(monkeypatch):
    monkeypatch.setenv("STUFFEDMAP_BUDGET_MS", "1")
    with pytest.raises(BudgetExceeded):
        enumerate_bms(QB, 2, 8)


def test_enumeration_is_deterministic():
    a = enumerate_bms(QB, 2, 5)
    b = enumerate_bms(QB, 2, 5)
    assert a.table.to_json() == b.table.to_json()
    assert [m.dumps() for m in a.maps] == [m.dumps() for m in b.maps]
