"""Acceptance criteria 1-8. Each test records and prints one PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; the
pytest terminal summary repeats the lines.
"""

import json
import math
import time

import pytest

from stuffedmaps.bijection import PINNED, verify_bijection
from stuffedmaps.cells import cellset
from stuffedmaps.cli import main
from stuffedmaps.enumerate import (enumerate_bms, enumerate_pointed_bms, mark_points, rescale_bms_to_stuffed,
                                   series_from_counts, weighted_counts_direct)
from stuffedmaps.maps import associated_hypertree, euler_genus, validate_stuffed_map
from stuffedmaps.report import UNRESOLVED, _quartic_small_root, _eval, discrepancy_ledger
from stuffedmaps.series import TSeries, ts_derivative_t
from stuffedmaps.solver import (closed_form_gamma_quadrangle, pointed_ordinary, solve_stuffed_functional,
                                solve_stuffed_tree_gamma, solve_stuffed_tutte, solve_tree_gamma,
                                solve_tutte_ordinary, w_residual)

QUAD = cellset([4])
QB = cellset([4], [2, 2])

RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_criterion_1_catalan_baseline(capsys):
    start = time.perf_counter()
    code = main(["series", "--which", "tutte", "--order", "10", "--boundary", "16"])
    data = json.loads(capsys.readouterr().out)
    elapsed = time.perf_counter() - start
    ok = code == 0
    for m in range(9):
        s = TSeries.from_json(data["moments"][str(2 * m)])
        want = TSeries.from_terms([(m + 1, {}, math.comb(2 * m, m) // (m + 1))], 10, ())
        ok = ok and s == want
    record(1, ok and elapsed < 1.0, f"T_2m = Cat(m) t^(m+1) for m <= 8 in {elapsed:.2f}s")


def test_criterion_2_quadrangulations():
    start = time.perf_counter()
    g = solve_tree_gamma(QUAD, 10)
    closed = closed_form_gamma_quadrangle(10)
    try:
        closed_form_gamma_quadrangle(10, sign=1)
        plus_note = "plus root expands"
    except ValueError:
        plus_note = "plus root has no power-series expansion, minus root used"
    e = enumerate_bms(QUAD, 2, 8)
    pointed, _ = mark_points(e.maps, QUAD, 2, 8)
    counts = pointed.by_vertices()
    two_g = 2 * g
    series_ok = all(counts.get(v, 0) == two_g.coefficient(v - 1).get((v - 2,), 0) for v in range(2, 9))
    elapsed = time.perf_counter() - start
    ok = g == closed and series_ok and elapsed < 60
    record(2, ok, f"closed form through t^10 ({plus_note}); 2 gamma^2 vs pointed counts v <= 8 "
                  f"{[int(counts[v]) for v in sorted(counts)]}; {elapsed:.1f}s")


def test_criterion_3_bijection():
    start = time.perf_counter()
    runs = [verify_bijection(QUAD, 6), verify_bijection(QB, 7)]
    elapsed = time.perf_counter() - start
    ok = all(r["ok"] and r["n_failures"] == 0 and r["counts_left"] == r["counts_right"] for r in runs)
    ok = ok and all(r["convention"] == PINNED.as_dict() for r in runs) and elapsed < 600
    detail = "; ".join(f"{len(r['cells']['cells'])} cell types: {r['counts_left']} failures={r['n_failures']}"
                       for r in runs)
    record(3, ok, f"{detail}; convention {PINNED.as_dict()}; {elapsed:.0f}s")


def test_criterion_4_three_way_agreement():
    start = time.perf_counter()
    functional = solve_stuffed_functional(QB, [2], 6)[2]
    tutte = solve_stuffed_tutte(QB, 2, 6)[2]
    e = enumerate_bms(QB, 2, 6)
    enum = series_from_counts(rescale_bms_to_stuffed(e.table, QB), 6, 2)
    elapsed = time.perf_counter() - start
    record(4, functional == tutte == enum and elapsed < 300,
           f"functional, stuffed Tutte and rescaled enumeration agree through t^6; {elapsed:.1f}s")


def test_criterion_5_bridged_tree_equation():
    g = solve_stuffed_tree_gamma(QB, 10)
    t = TSeries.t(10, QB.symbols)
    t4 = TSeries.weight("t_4", 10, QB.symbols)
    b = TSeries.weight("t_2_2", 10, QB.symbols)
    base = t * b / 2 * g ** 2 + 3 * t4 * g ** 2
    exact_plus = g - t == base + b * t4 / 2 * g ** 4
    exact_flipped = g - t == base - b * t4 / 2 * g ** 4
    deep = solve_stuffed_functional(QB, [2], 20).gamma2
    tv, t4v, bv = 0.01, 0.1, 0.1
    x = _eval(deep, {"t_4": t4v, "t_2_2": bv}, tv)
    residual = x - tv - (tv * bv / 2 + 3 * t4v) * x ** 2 - (bv * t4v / 2) * x ** 4
    numeric = abs(residual) < 1e-9
    gap = abs(_quartic_small_root(tv, t4v, bv, 1) - _quartic_small_root(tv, t4v, bv, -1))
    record(5, exact_plus and numeric,
           f"exact identity with +t22 t4 gamma^8 holds: {exact_plus}; "
           f"with the quartic term negated: {exact_flipped}; "
           f"numeric residual {residual:.2e} (gap between the two quartics' roots {gap:.1e})")


def test_criterion_6_pointed_identities():
    mv = solve_stuffed_functional(QB, [2], 9)
    d = ts_derivative_t(mv[2])
    g = mv.gamma2.truncate(8)
    b = TSeries.weight("t_2_2", 8, QB.symbols)
    one = TSeries.constant(1, 8, QB.symbols)
    linear = d == 2 * g * (one - b * g / 2).inverse()
    squared = d == 2 * g * (one - b * g * g / 2).inverse()
    gq = solve_tree_gamma(QUAD, 8)
    ordinary = all(
        ts_derivative_t(solve_tutte_ordinary(QUAD, 2 * ell, 8)[2 * ell]) == pointed_ordinary(gq, ell).truncate(7)
        and pointed_ordinary(gq, ell) == math.comb(2 * ell, ell) * gq ** ell
        for ell in (1, 2, 3))
    record(6, linear and ordinary,
           f"d/dt T_2 = 2g/(1 - t22 g/2): {linear}; with g^2 in the denominator: {squared}; "
           f"dT_2l/dt = C(2l,l) gamma^(2l) for l <= 3: {ordinary}")


def test_criterion_7_ledger_complete():
    ledger = {e["identity"]: e for e in discrepancy_ledger(6, 6)}
    required = ["tutte_recursion_index", "cement_weight_sign", "quadrangulation_T2", "stuffed_T2_prefactor",
                "pointed_relation_exponent"]
    missing = [r for r in required if r not in ledger]
    unresolved = [k for k, e in ledger.items() if e["verdict"] == UNRESOLVED]
    record(7, not missing and not unresolved,
           f"{len(ledger)} entries, missing {missing}, unresolved {unresolved}")


def test_criterion_8_property_suites():
    checks = {}
    e = enumerate_bms(QB, 2, 6)
    checks["euler_hypertree"] = all(
        euler_genus(m)[1] == 0 and associated_hypertree(m, strict=False).is_hypertree
        and validate_stuffed_map(m, QB) == [] for m in e.maps)
    _, pointed = enumerate_pointed_bms(QB, 5)
    checks["euler_hypertree"] &= all(euler_genus(m)[1] == 0 for m in pointed)
    mv = solve_stuffed_functional(cellset([4], [2, 2], [2, 4], [6]), [1, 3, 5, 7], 6)
    checks["parity"] = all(mv[ell].is_zero() for ell in (1, 3, 5, 7)) and enumerate_bms(QB, 3, 6).table.total() == 0
    checks["rescaling"] = rescale_bms_to_stuffed(e.table, QB) == weighted_counts_direct(e.maps, QB, 2, 6)
    fm = solve_stuffed_functional(QB, [2], 6)
    res = w_residual(solve_stuffed_tutte(QB, 14, 6).moments, fm.cement)
    checks["w_residual"] = bool(res) and all(s.is_zero() for s in res.values())
    record(8, all(checks.values()), ", ".join(f"{k}={v}" for k, v in checks.items()))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
