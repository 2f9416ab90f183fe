"""Oracle adjudication of formula variants and the bridged-quadrangulation report."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Dict, List, Optional

from .cells import CellSet, cellset
from .enumerate import (enumerate_bms, enumerate_hypermobiles, enumerate_pointed_bms, rescale_bms_to_stuffed,
                        series_from_counts)
from .errors import OddGammaPower, StuffedMapError
from .series import TSeries, fixed_point_solve, ts_derivative_t, ts_derivative_weight, ts_substitute_weights
from .solver import (closed_form_gamma_quadrangle, moments_from_gamma, pointed_stuffed, polygon_weights,
                     solve_stuffed_functional, solve_stuffed_tree_gamma, solve_stuffed_tutte, solve_tree_gamma,
                     solve_tutte_ordinary, tree_gamma_from_weights, tutte_from_weights, w_residual,
                     weight_derivative_coeff)

BRIDGED = cellset([4], [2, 2])
QUAD = cellset([4])
EMPTY = cellset()

REFUTED = "printed variant refuted, adopted variant confirmed"
UNRESOLVED = "unresolved"


def _entry(identity: str, printed: str, adopted: str, oracle: str, printed_ok: bool, adopted_ok: bool) -> dict:
    if adopted_ok and not printed_ok:
        verdict = REFUTED
    elif adopted_ok and printed_ok:
        verdict = "both variants agree with the oracle"
    elif not adopted_ok and printed_ok:
        verdict = "printed variant confirmed, adopted variant refuted"
    else:
        verdict = UNRESOLVED
    return {"identity": identity, "printed_variant": printed, "adopted_variant": adopted,
            "oracle": oracle, "verdict": verdict}


def _shifted_index_tutte(N: int, ell_max: int) -> Dict[int, TSeries]:
    """Empty cell set, first sum read literally as ``sum_i T_{l-2+i} T_i``."""
    S = ()
    t = TSeries.t(N, S)
    evens = list(range(0, ell_max + 1, 2))

    def F(xs):
        T = dict(zip(evens, xs))
        out = [t]
        for ell in evens[1:]:
            acc = TSeries.zero(N, S)
            for i in range(0, ell - 1, 2):
                if ell - 2 + i in T:
                    acc = acc + T[ell - 2 + i] * T[i]
            out.append(acc)
        return out

    return dict(zip(evens, fixed_point_solve(F, [TSeries.zero(N, S)] * len(evens), N, 4 * N + 10)))


def _catalan_series(N: int, ell: int) -> TSeries:
    m = ell // 2
    return TSeries.from_terms([(m + 1, {}, math.comb(2 * m, m) // (m + 1))], N, ())


def _enumerated_T2(cells: CellSet, N: int) -> TSeries:
    e = enumerate_bms(cells, 2, N)
    return series_from_counts(rescale_bms_to_stuffed(e.table, cells), N)


def _scaled_two_gon_derivative(ell: int, N: int) -> TSeries:
    """``dT_{2l}/dt_2`` at ``t_2 = 0`` for quadrangulations, via a 2-gon weight ``s t`` linear in ``s``."""
    S = ("s", "t_4")
    t = TSeries.t(N + 1, S)
    w = {2: t * TSeries.weight("s", N + 1, S), 4: TSeries.weight("t_4", N + 1, S)}
    T = tutte_from_weights(w, N + 1, 2 * ell, S)[2 * ell]
    lin = ts_substitute_weights(ts_derivative_weight(T, "s"), {"s": 0})
    # divide by t: the 2-gon weight carried one extra factor of t
    return TSeries(N, lin.symbols, lin.coeffs[1:])


def discrepancy_ledger(N: int = 6, v_max: int = 6) -> List[dict]:
    """Oracle verdicts for every candidate formula that differs from the adopted one."""
    out = []
    N = max(N, 4)

    # Tutte recursion index
    printed = _shifted_index_tutte(N, 8)
    conv = solve_tutte_ordinary(EMPTY, 8, N)
    cat = {e: _catalan_series(N, e) for e in (2, 4, 6, 8)}
    out.append(_entry(
        "tutte_recursion_index", "T_l = sum_i T_{l-2+i} T_i + ...", "T_l = sum_i T_i T_{l-2-i} + ...",
        "Catalan numbers from exhaustive enumeration of plane trees",
        all(printed[e] == cat[e] for e in cat), all(conv[e] == cat[e] for e in cat)))

    # cement weight sign
    M = max(4, min(N, v_max))
    enum = _enumerated_T2(BRIDGED, M)

    def agrees(x: TSeries) -> bool:
        return x.truncate(M) == enum

    plus = solve_stuffed_functional(BRIDGED, [2], N, sign=1)[2]
    minus = solve_stuffed_functional(BRIDGED, [2], N, sign=-1)[2]
    out.append(_entry(
        "cement_weight_sign", "C_i = t_i - sum t_{i,...} prod T/i", "C_i = t_i + sum t_{i,...} prod T/i",
        "rescaled BMS enumeration of bridged quadrangulations", agrees(minus), agrees(plus)))

    # T_2 of quadrangulations and the stuffed T_2
    S = BRIDGED.symbols
    g4 = solve_tree_gamma(QUAD, N)
    t = TSeries.t(N, QUAD.symbols)
    t4 = TSeries.weight("t_4", N, QUAD.symbols)
    T2 = solve_tutte_ordinary(QUAD, 2, N)[2]
    out.append(_entry(
        "quadrangulation_T2", "T_2 = t g + t_4 g^3", "T_2 = t g - t_4 g^3",
        "Tutte recursion (itself checked against enumeration)",
        T2 == t * g4 + t4 * g4 ** 3, T2 == t * g4 - t4 * g4 ** 3))
    mv = solve_stuffed_functional(BRIDGED, [2], N)
    g = mv.gamma2
    tb = TSeries.t(N, S)
    t4b = TSeries.weight("t_4", N, S)
    out.append(_entry(
        "stuffed_T2_prefactor", "T_2 = 2 t g - t_4 g^3", "T_2 = t g - t_4 g^3",
        "rescaled BMS enumeration of bridged quadrangulations",
        agrees(2 * tb * g - t4b * g ** 3), agrees(tb * g - t4b * g ** 3)))

    # exponent in the pointed relation: dT_{2l}/dt_{2k} = D(l,k) gamma^{?}
    ok = {"2k-l": True, "4k-2l": True, "2k+2l": True}
    for ell in (1, 2, 3):
        for k in (1, 2, 3):
            if k == 1:
                lhs = _scaled_two_gon_derivative(ell, N)
                gq = solve_tree_gamma(QUAD, N).with_symbols(lhs.symbols)
            else:
                cs = cellset([4], [2 * k]) if k != 2 else QUAD
                Tl = solve_tutte_ordinary(cs, 2 * ell, N)[2 * ell]
                lhs = ts_derivative_weight(Tl, f"t_{2 * k}")
                lhs = ts_substitute_weights(lhs, {f"t_{2 * k}": 0}) if k != 2 else lhs
                gq = solve_tree_gamma(cs, N)
                gq = ts_substitute_weights(gq, {f"t_{2 * k}": 0}) if k != 2 else gq
                lhs = lhs.with_symbols(gq.symbols) if lhs.symbols != gq.symbols else lhs
            D = weight_derivative_coeff(ell, k)
            for name, e in (("2k-l", 2 * k - ell), ("4k-2l", 4 * k - 2 * ell), ("2k+2l", 2 * k + 2 * ell)):
                if e % 2 or e < 0:
                    ok[name] = False
                    continue
                if (gq ** (e // 2)) * D != lhs.truncate(gq.order):
                    ok[name] = False
    entry = _entry(
        "pointed_relation_exponent", "gamma^(2k-l) (statement) / gamma^(4k-2l) (proof)", "gamma^(2k+2l)",
        "weight derivative of solved moments for l, k <= 3",
        ok["2k-l"] or ok["4k-2l"], ok["2k+2l"])
    entry["detail"] = ok
    out.append(entry)

    # extras
    fact = moments_from_gamma(g4, polygon_weights(QUAD, N), 4, factorial=True)
    plain = moments_from_gamma(g4, polygon_weights(QUAD, N), 4)
    T = solve_tutte_ordinary(QUAD, 4, N)
    out.append(_entry(
        "moment_formula_factor", "(2l)!(2j-1)!/((l+j)!(l-j+1)!)", "(2l)!(2j-1)/((l+j)!(l-j+1)!)",
        "Tutte recursion", fact[2] == T[2] and fact[4] == T[4], plain[2] == T[2] and plain[4] == T[4]))

    literal = solve_stuffed_tutte(BRIDGED, 2, N, ordered_k=True)[2]
    adopted = solve_stuffed_tutte(BRIDGED, 2, N)[2]
    out.append(_entry(
        "stuffed_tutte_multiplicity", "k sum over ordered tuples", "1/(k-1)! sum over ordered tuples",
        "rescaled BMS enumeration", agrees(literal), agrees(adopted)))

    try:
        closed_form_gamma_quadrangle(N, sign=1)
        plus_ok = closed_form_gamma_quadrangle(N, sign=1) == g4
    except ValueError:
        plus_ok = False
    out.append(_entry(
        "quadrangle_closed_form_sign", "(1 - t_2 + sqrt(...)) / (6 t_4)", "(1 - t_2 - sqrt(...)) / (6 t_4)",
        "tree-equation series", plus_ok, closed_form_gamma_quadrangle(N) == g4))

    lhs = g - tb
    rest = tb * BW(N) * g ** 2 / 2 + 3 * t4b * g ** 2
    out.append(_entry(
        "bridged_tree_equation_sign", "... + (t_22 t_4 / 2) gamma^8", "... - (t_22 t_4 / 2) gamma^8",
        "joint functional fixed point (checked against enumeration)",
        lhs == rest + BW(N) * t4b * g ** 4 / 2, lhs == rest - BW(N) * t4b * g ** 4 / 2))

    d = ts_derivative_t(mv[2])
    gg = g.truncate(N - 1)
    one = TSeries.constant(1, N - 1, S)
    bb = BW(N - 1)
    out.append(_entry(
        "bridged_pointed_T2", "2 g / (1 - t_22 g / 2)", "2 g / (1 - t_22 g^2 / 2)",
        "t-derivative of the enumerated T_2",
        d == 2 * gg * (one - bb * gg / 2).inverse(), d == 2 * gg * (one - bb * gg ** 2 / 2).inverse()))

    res0 = w_residual(solve_stuffed_tutte(BRIDGED, 2 * N, N).moments, mv.cement, start=0)
    res1 = w_residual(solve_stuffed_tutte(BRIDGED, 2 * N, N).moments, mv.cement, start=1)
    out.append(_entry(
        "resolvent_lower_index", "W = sum_{l>=1} T_l x^{-l-1}", "W = sum_{l>=0} T_l x^{-l-1}",
        "vanishing of W^2 - V W + R", all(s.is_zero() for s in res1.values()),
        all(s.is_zero() for s in res0.values())))
    no2 = {i: w for i, w in mv.cement.items() if i >= 3}
    res3 = w_residual(solve_stuffed_tutte(BRIDGED, 2 * N, N).moments, no2, start=0)
    out.append(_entry(
        "potential_lower_index", "V = x - sum_{i>=3} w_i x^{i-1}", "V = x - sum_{i>=2} w_i x^{i-1}",
        "vanishing of W^2 - V W + R with cement 2-gon weight", all(s.is_zero() for s in res3.values()),
        all(s.is_zero() for s in res0.values())))

    e = enumerate_bms(BRIDGED, 2, v_max)
    direct = series_from_counts(rescale_bms_to_stuffed(e.table, BRIDGED), v_max)
    shifted = TSeries(v_max, BRIDGED.symbols, [{}] * 0)
    for n, mono, c in direct.terms():
        k = mono.get("t_2_2", 0)
        if n + 2 * k <= v_max:
            shifted = shifted + TSeries.from_terms([(n + 2 * k, mono, c)], v_max, BRIDGED.symbols)
    truth = solve_stuffed_functional(BRIDGED, [2], v_max)[2]
    out.append(_entry(
        "bms_rescaling_vertex_shift", "divide by l_1...l_k and shift t by k per cell",
        "divide by l_1...l_k, no shift", "functional-equation T_2", shifted == truth, direct == truth))
    return out


def BW(N: int) -> TSeries:
    return TSeries.weight("t_2_2", N, BRIDGED.symbols)


# ---------------------------------------------------------------------------
# numerics


def _eval(s: TSeries, values: Dict[str, float], t: float) -> float:
    total = 0.0
    for n, mono, c in s.terms():
        v = float(c) * t ** n
        for name, e in mono.items():
            v *= values[name] ** e
        total += v
    return total


def _quartic_small_root(t: float, t4: float, b: float, sign: int) -> float:
    """Root near ``t`` of ``g - t = (t b / 2 + 3 t4) g^2 + sign (b t4 / 2) g^4`` by Newton."""
    g = t
    for _ in range(100):
        f = (t * b / 2 + 3 * t4) * g * g + sign * (b * t4 / 2) * g ** 4 - g + t
        df = 2 * (t * b / 2 + 3 * t4) * g + 4 * sign * (b * t4 / 2) * g ** 3 - 1
        step = f / df
        g -= step
        if abs(step) < 1e-18:
            break
    return g


def nested_radical_gamma2(t: float, t4: float, b: float) -> complex:
    """A nested-radical candidate for gamma^2, evaluated in complex arithmetic."""
    a = -t * b - 6 * t4
    r0 = 2 * a ** 3 - 144 * t * b * t4 * a - 108 * b * t4
    R = r0 + cmath.sqrt(r0 ** 2 - 4 * (a ** 2 + 24 * t * b * t4) ** 3)
    c2 = 2 ** (1 / 3)
    Q = (-c2 * (t * t * b * b + 36 * t * b * t4 + 36 * t4 * t4) / (3 * R * b * t4)
         - a / (3 * b * t4) - (t * b + 6 * t4) / (b * t4))
    inner = cmath.sqrt(Q - R / (3 * c2 * b * t4))
    return 0.5 * inner - 0.5 * cmath.sqrt(4 / (b * t4 * inner) + Q + R / (3 * c2 * b * t4))


def bridged_quadrangulation_report(N: int = 8, v_max: int = 7, point=(0.01, 0.1, 0.1),
                                   hypermobiles: bool = True) -> dict:
    """Every check of the bridged-quadrangulation example, with pass/fail per row."""
    S = BRIDGED.symbols
    rows: List[dict] = []

    def row(name, passed, **detail):
        rows.append({"check": name, "passed": bool(passed), **detail})

    mv = solve_stuffed_functional(BRIDGED, [2, 4], N)
    g = mv.gamma2
    t = TSeries.t(N, S)
    t4 = TSeries.weight("t_4", N, S)
    b = BW(N)
    try:
        gt = solve_stuffed_tree_gamma(BRIDGED, N)
        row("tree_equation_matches_functional", gt == g)
    except StuffedMapError as exc:
        row("tree_equation_matches_functional", False, error=str(exc))
    row("bridged_tree_equation_adopted", g - t == t * b * g ** 2 / 2 + 3 * t4 * g ** 2 - b * t4 * g ** 4 / 2)
    row("bridged_tree_equation_plus_quartic", g - t == t * b * g ** 2 / 2 + 3 * t4 * g ** 2 + b * t4 * g ** 4 / 2,
        expected_to_fail=True)
    tv, t4v, bv = point
    vals = {"t_4": t4v, "t_2_2": bv}
    # numerics use a deep truncation so they do not depend on the requested order
    gnum = _eval(solve_stuffed_functional(BRIDGED, [2], 20).gamma2, vals, tv)
    resid = gnum - tv - (tv * bv / 2 + 3 * t4v) * gnum ** 2 - (bv * t4v / 2) * gnum ** 4
    root = _quartic_small_root(tv, t4v, bv, +1)
    row("plus_quartic_numeric", abs(resid) < 1e-9 and abs(root - gnum) < 1e-9,
        residual=resid, series_value=gnum, newton_root=root)
    root_m = _quartic_small_root(tv, t4v, bv, -1)
    row("adopted_quartic_numeric", abs(root_m - gnum) < 1e-12, series_value=gnum, newton_root=root_m,
        gap_to_plus_quartic_root=abs(root - root_m))
    nr = nested_radical_gamma2(tv, t4v, bv)
    row("nested_radical_value", abs(nr - gnum) < 1e-9, value=[nr.real, nr.imag], informational=True)

    st = solve_stuffed_tutte(BRIDGED, 4, N)
    row("functional_equals_stuffed_tutte", st[2] == mv[2] and st[4] == mv[4])
    row("T2_adopted", mv[2] == t * g - t4 * g ** 3)
    row("T2_doubled_t_term", mv[2] == 2 * t * g - t4 * g ** 3, expected_to_fail=True)
    d = ts_derivative_t(mv[2])
    pb = pointed_stuffed(BRIDGED, 2, N, mv).truncate(N - 1)
    row("pointed_routes_agree", d == pb)
    gg, bb = g.truncate(N - 1), BW(N - 1)
    one = TSeries.constant(1, N - 1, S)
    row("pointed_T2_adopted", d == 2 * gg * (one - bb * gg ** 2 / 2).inverse())
    row("pointed_T2_linear_denominator", d == 2 * gg * (one - bb * gg / 2).inverse(), expected_to_fail=True)
    row("odd_boundaries_vanish", mv[3].is_zero() and mv[5].is_zero())
    res = w_residual(st.moments, mv.cement)
    row("loop_equation_residual", all(s.is_zero() for s in res.values()))
    sub = ts_substitute_weights(g, {"t_2_2": 0})
    row("no_bridge_reduces_to_quadrangulations", sub == solve_tree_gamma(QUAD, N))

    if v_max >= 2:
        M = min(N, v_max)
        e = enumerate_bms(BRIDGED, 2, M)
        en = series_from_counts(rescale_bms_to_stuffed(e.table, BRIDGED), M)
        row("enumeration_matches_T2", en == mv[2].truncate(M), through=M)
        if hypermobiles:
            left, _ = enumerate_pointed_bms(BRIDGED, v_max)
            right, _ = enumerate_hypermobiles(BRIDGED, v_max)
            row("hypermobiles_match_pointed_maps", left == right,
                counts={str(k): int(v) for k, v in right.by_vertices().items()})
    ledger = discrepancy_ledger(max(N, 4), min(v_max, 6) if v_max >= 2 else 4)
    required = [r for r in rows if not r.get("expected_to_fail") and not r.get("informational")]
    return {
        "order": N,
        "max_vertices": v_max,
        "rows": rows,
        "ledger": ledger,
        "ok": all(r["passed"] for r in required) and all(x["verdict"] != UNRESOLVED for x in ledger),
    }
