"""Generating functions of planar bipartite (stuffed) maps as exact series.

Conventions: ``T[l]`` counts rooted maps with a boundary of length ``l``
weighted ``t`` per vertex and one weight per inner cell; ``g`` stands for
``gamma**2``.  Polygon weights are passed around as ``{length: TSeries}``
so that cement-face weights can replace them.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .cells import CellSet, CellShape
from .errors import Inconsistent, MissingMoment, OddGammaPower
from .series import TSeries, fixed_point_solve, ts_derivative_t, ts_derivative_weight, ts_sqrt_unit

Weights = Dict[int, TSeries]


@dataclass
class MomentVector:
    order: int
    symbols: Tuple[str, ...]
    moments: Dict[int, TSeries] = field(default_factory=dict)
    gamma2: Optional[TSeries] = None
    cement: Dict[int, TSeries] = field(default_factory=dict)

    def __getitem__(self, ell: int) -> TSeries:
        if ell % 2:
            return TSeries.zero(self.order, self.symbols)
        return self.moments[ell]

    def to_json(self) -> dict:
        out = {"order": self.order, "symbols": list(self.symbols),
               "moments": {str(k): v.to_json() for k, v in sorted(self.moments.items())}}
        if self.gamma2 is not None:
            out["gamma2"] = self.gamma2.to_json()
        if self.cement:
            out["cement"] = {str(k): v.to_json() for k, v in sorted(self.cement.items())}
        return out


# ---------------------------------------------------------------------------
# helpers


def _t(N: int, symbols) -> TSeries:
    return TSeries.t(N, symbols)


def _one(N: int, symbols) -> TSeries:
    return TSeries.constant(1, N, symbols)


def polygon_weights(cells: CellSet, N: int, extra: Optional[Mapping[int, object]] = None) -> Weights:
    """Bare weights ``t_i`` of the polygons of ``cells`` (plus optional numeric extras)."""
    out: Weights = {}
    for shape in cells.polygons:
        out[shape.boundaries[0]] = TSeries.weight(cells.symbol(shape), N, cells.symbols)
    for length, val in (extra or {}).items():
        v = val if isinstance(val, TSeries) else TSeries.constant(val, N, cells.symbols)
        out[length] = out[length] + v if length in out else v
    return out


def _iterations(N: int, L: int) -> int:
    return 2 * N + L + 6


def _moment_range(N: int, ell_max: int, weights: Mapping[int, TSeries]) -> int:
    d = max(list(weights) + [2])
    return max(ell_max, 2 * N) + d


def tutte_from_weights(weights: Mapping[int, TSeries], N: int, ell_max: int,
                       symbols: Sequence[str]) -> Dict[int, TSeries]:
    """Solve ``T_l = sum T_i T_{l-2-i} + sum_j w_j T_{l-2+j}`` with ``T_0 = t``."""
    L = _moment_range(N, ell_max, weights)
    L += L % 2
    zero = TSeries.zero(N, symbols)
    t = _t(N, symbols)
    evens = list(range(0, L + 1, 2))

    def F(xs):
        T = dict(zip(evens, xs))
        out = []
        for ell in evens:
            if ell == 0:
                out.append(t)
                continue
            acc = zero
            for i in range(0, ell - 1, 2):
                acc = acc + T[i] * T[ell - 2 - i]
            for j, w in weights.items():
                k = ell - 2 + j
                if k in T:
                    acc = acc + w * T[k]
            out.append(acc)
        return out

    sol = fixed_point_solve(F, [zero] * len(evens), N, _iterations(N, L))
    T = dict(zip(evens, sol))
    return {ell: T[ell] for ell in evens if ell <= ell_max}


def tree_gamma_from_weights(weights: Mapping[int, TSeries], N: int, symbols) -> TSeries:
    """``g = t + sum_n binom(2n-1, n) w_{2n} g^n``."""
    t = _t(N, symbols)

    def F(xs):
        g = xs[0]
        acc = t
        for j, w in weights.items():
            n = j // 2
            acc = acc + w * g ** n * math.comb(2 * n - 1, n)
        return [acc]

    return fixed_point_solve(F, [TSeries.zero(N, symbols)], N, _iterations(N, 0))[0]


def _moment_coeff(ell: int, j: int, factorial: bool = False) -> Fraction:
    m = math.factorial(2 * j - 1) if factorial else 2 * j - 1
    return Fraction(math.factorial(2 * ell) * m, math.factorial(ell + j) * math.factorial(ell - j + 1))


def moments_in_gamma(ell: int, weights: Mapping[int, TSeries], t: TSeries,
                     factorial: bool = False) -> Dict[int, TSeries]:
    """``T_{2l}`` as a polynomial in gamma: ``{exponent: coefficient}``.

    ``T_{2l} = gamma^{2l+1} sum_j K(l, j) u_{2j-1}`` with ``u_1 = t/gamma`` and
    ``u_{2j-1} = -sum_n binom(2n-1, n+j-1) w_{2n} gamma^{2n-1}``.
    """
    poly: Dict[int, TSeries] = {}

    def add(e, s):
        poly[e] = poly[e] + s if e in poly else s

    add(2 * ell, t * _moment_coeff(ell, 1, factorial))
    for j in range(2, ell + 2):
        K = _moment_coeff(ell, j, factorial)
        for length, w in weights.items():
            n = length // 2
            c = math.comb(2 * n - 1, n + j - 1) if n + j - 1 <= 2 * n - 1 else 0
            if c:
                add(2 * ell + 1 + 2 * n - 1, w * (-K * c))
    return poly


def eval_gamma_poly(poly: Mapping[int, TSeries], g: TSeries) -> TSeries:
    acc = TSeries.zero(g.order, g.symbols)
    for e, c in poly.items():
        if e % 2:
            raise OddGammaPower(f"odd power gamma^{e} survives")
        acc = acc + c * g ** (e // 2)
    return acc


def moments_from_gamma(g: TSeries, weights: Mapping[int, TSeries], ell_max: int,
                       factorial: bool = False) -> Dict[int, TSeries]:
    t = _t(g.order, g.symbols)
    out = {0: t}
    for ell in range(1, ell_max // 2 + 1):
        out[2 * ell] = eval_gamma_poly(moments_in_gamma(ell, weights, t, factorial), g)
    return out


def closed_form_gamma_quadrangle(N: int, t2=0, sign: int = -1, symbols=("t_4",)) -> TSeries:
    """Root of ``g - t = t2 g + 3 t4 g^2`` as ``(1 - t2 + sign*sqrt((1-t2)^2 - 12 t t4)) / (6 t4)``.

    ``t2`` is a rational number.  Raises ``ValueError`` when the chosen root
    is not a power series (its numerator is not divisible by ``t4``).
    """
    t2 = Fraction(t2)
    a = 1 - t2
    t = _t(N + 1, symbols)
    t4 = TSeries.weight("t_4", N + 1, symbols)
    root = ts_sqrt_unit(_one(N + 1, symbols) - t * t4 * Fraction(12) / (a * a)) * a
    num = _one(N + 1, symbols) * a + root * sign
    k = symbols.index("t_4")
    coeffs = []
    for p in num.coeffs:
        q = {}
        for mono, c in p.items():
            if mono[k] == 0:
                raise ValueError("chosen root is not a power series in t (numerator not divisible by t_4)")
            mm = list(mono)
            mm[k] -= 1
            q[tuple(mm)] = c / 6
        coeffs.append(q)
    return TSeries(N, symbols, coeffs)


# ---------------------------------------------------------------------------
# ordinary maps


def solve_tutte_ordinary(cells: CellSet, ell_max: int, N: int, extra=None) -> MomentVector:
    if cells.multis:
        raise ValueError("solve_tutte_ordinary takes polygons only")
    w = polygon_weights(cells, N, extra)
    return MomentVector(N, cells.symbols, tutte_from_weights(w, N, ell_max, cells.symbols))


def solve_tree_gamma(cells: CellSet, N: int, extra=None) -> TSeries:
    if cells.multis:
        raise ValueError("solve_tree_gamma takes polygons only")
    return tree_gamma_from_weights(polygon_weights(cells, N, extra), N, cells.symbols)


def pointed_ordinary(g: TSeries, ell: int) -> TSeries:
    """``T°_{2l} = binom(2l, l) g^l``."""
    return g ** ell * math.comb(2 * ell, ell)


def weight_derivative_coeff(ell: int, k: int) -> Fraction:
    """``D(l, k)`` in ``dT_{2l}/dt_{2k} = D(l, k) g^{k+l}``."""
    return Fraction(sum(p * math.comb(2 * k, k + p) * math.comb(2 * ell, ell - p)
                        for p in range(1, min(k, ell) + 1)), k)


# ---------------------------------------------------------------------------
# stuffed maps


def _remaining(shape: CellShape, length: int) -> Optional[Tuple[int, ...]]:
    rest = list(shape.boundaries)
    if length not in rest:
        return None
    rest.remove(length)
    return tuple(rest)


def cement_weights(cells: CellSet, moments: Mapping[int, TSeries], N: int, sign: int = 1,
                   extra=None) -> Weights:
    """``C_i = t_i + sign * sum_B t_B prod_{j in B - i} T_j / j / mult!``."""
    C = polygon_weights(cells, N, extra)
    for shape in cells.multis:
        tB = TSeries.weight(cells.symbol(shape), N, cells.symbols)
        for i in sorted(set(shape.boundaries)):
            rest = _remaining(shape, i)
            term = tB
            for j in rest:
                if j not in moments:
                    raise MissingMoment(f"cement weight C_{i} needs T_{j}")
                term = term * moments[j] * Fraction(1, j)
            for m in Counter(rest).values():
                term = term * Fraction(1, math.factorial(m))
            term = term * sign
            C[i] = C[i] + term if i in C else term
    return C


def _cement_lengths(cells: CellSet) -> List[int]:
    return sorted({x for s in cells.multis for x in s.boundaries})


def solve_stuffed_functional(cells: CellSet, ell_set: Iterable[int], N: int, sign: int = 1,
                             extra=None) -> MomentVector:
    """Joint fixed point of the tree equation, moment formula and cement substitution."""
    ells = sorted(set(int(x) for x in ell_set if x % 2 == 0) | set(_cement_lengths(cells)))
    top = max(ells + [0])
    S = cells.symbols
    zero = TSeries.zero(N, S)
    evens = list(range(2, top + 1, 2))

    def F(xs):
        g = xs[0]
        T = dict(zip(evens, xs[1:]))
        C = cement_weights(cells, T, N, sign, extra)
        acc = _t(N, S)
        for j, w in C.items():
            n = j // 2
            acc = acc + w * g ** n * math.comb(2 * n - 1, n)
        M = moments_from_gamma(g, C, top)
        return [acc] + [M[e] for e in evens]

    sol = fixed_point_solve(F, [zero] * (1 + len(evens)), N, _iterations(N, top))
    g = sol[0]
    T = {0: _t(N, S), **dict(zip(evens, sol[1:]))}
    return MomentVector(N, S, T, g, cement_weights(cells, T, N, sign, extra))


def solve_stuffed_tutte(cells: CellSet, ell_max: int, N: int, ordered_k: bool = False) -> MomentVector:
    """Stuffed Tutte recursion.

    The default uses the cement weights; ``ordered_k=True`` uses a factor ``k``
    over ordered boundary tuples instead of ``1/(k-1)!`` (kept for comparison).
    """
    S = cells.symbols
    polys = polygon_weights(cells, N)
    L = _moment_range(N, ell_max, {x: None for x in [cells.max_length]})
    L += L % 2
    zero = TSeries.zero(N, S)
    t = _t(N, S)
    evens = list(range(0, L + 1, 2))

    def multi_terms(T) -> Weights:
        if not ordered_k:
            C = cement_weights(cells, T, N)
            return {i: C[i] - polys[i] if i in polys else C[i] for i in C}
        out: Weights = {}
        for shape in cells.multis:
            k = shape.arity
            tB = TSeries.weight(cells.symbol(shape), N, S)
            for tup in set(itertools.permutations(shape.boundaries)):
                term = tB * k
                for r in tup[1:]:
                    term = term * T[r] * Fraction(1, r)
                out[tup[0]] = out[tup[0]] + term if tup[0] in out else term
        return out

    def F(xs):
        T = dict(zip(evens, xs))
        W = dict(polys)
        for i, v in multi_terms(T).items():
            W[i] = W[i] + v if i in W else v
        out = []
        for ell in evens:
            if ell == 0:
                out.append(t)
                continue
            acc = zero
            for i in range(0, ell - 1, 2):
                acc = acc + T[i] * T[ell - 2 - i]
            for j, w in W.items():
                if ell - 2 + j in T:
                    acc = acc + w * T[ell - 2 + j]
            out.append(acc)
        return out

    sol = fixed_point_solve(F, [zero] * len(evens), N, _iterations(N, L))
    T = dict(zip(evens, sol))
    return MomentVector(N, S, {e: T[e] for e in evens if e <= ell_max})


def solve_stuffed_tree_gamma(cells: CellSet, N: int, check: bool = True) -> TSeries:
    """Closed tree equation for ``g``: cement moments are expanded with bare polygon weights.

    With ``check`` the result is compared against the joint functional solution
    and ``Inconsistent`` is raised on disagreement.
    """
    S = cells.symbols
    polys = polygon_weights(cells, N)
    lengths = _cement_lengths(cells)
    t = _t(N, S)
    gpolys = {j: moments_in_gamma(j // 2, polys, t) for j in lengths}

    def F(xs):
        g = xs[0]
        T = {j: eval_gamma_poly(gpolys[j], g) for j in lengths}
        C = cement_weights(cells, T, N)
        acc = t
        for j, w in C.items():
            n = j // 2
            acc = acc + w * g ** n * math.comb(2 * n - 1, n)
        return [acc]

    g = fixed_point_solve(F, [TSeries.zero(N, S)], N, _iterations(N, 0))[0]
    if check:
        ref = solve_stuffed_functional(cells, [], N).gamma2
        if ref != g:
            diff = g - ref
            raise Inconsistent(f"tree-equation gamma^2 differs from functional solution by {diff!r}")
    return g


def pointed_stuffed(cells: CellSet, ell: int, N: int, mv: Optional[MomentVector] = None,
                    exponent: Callable[[int, int], int] = lambda l, k: 2 * k + 2 * l) -> TSeries:
    """``T°_{2l}`` from the pointed functional relation.

    ``T°_{2l} = binom(2l,l) g^l + sum_k D(l,k) gamma^{exponent(l,k)} dC_{2k}/dt``
    where ``dC/dt`` involves the pointed series ``T°_j`` of the cement lengths;
    the system is solved as a joint fixed point.
    """
    if ell % 2:
        raise ValueError("ell must be even")
    if mv is None:
        mv = solve_stuffed_functional(cells, [ell], N)
    S = cells.symbols
    g = mv.gamma2
    lengths = sorted(set(_cement_lengths(cells)) | {ell})
    zero = TSeries.zero(N, S)

    def gpow(e: int) -> TSeries:
        if e % 2:
            raise OddGammaPower(f"gamma^{e}")
        return g ** (e // 2)

    def F(xs):
        P = dict(zip(lengths, xs))
        dC: Weights = {}
        for shape in cells.multis:
            tB = TSeries.weight(cells.symbol(shape), N, S)
            for i in sorted(set(shape.boundaries)):
                rest = _remaining(shape, i)
                # Leibniz rule over the product of moments
                total = zero
                for r in range(len(rest)):
                    term = tB
                    for q, j in enumerate(rest):
                        term = term * (P[j] if q == r else mv.moments[j]) * Fraction(1, j)
                    total = total + term
                for m in Counter(rest).values():
                    total = total * Fraction(1, math.factorial(m))
                dC[i] = dC[i] + total if i in dC else total
        out = []
        for L2 in lengths:
            l = L2 // 2
            acc = pointed_ordinary(g, l)
            for i, d in dC.items():
                k = i // 2
                acc = acc + gpow(exponent(l, k)) * d * weight_derivative_coeff(l, k)
            out.append(acc)
        return out

    sol = fixed_point_solve(F, [zero] * len(lengths), N, _iterations(N, 0))
    return dict(zip(lengths, sol))[ell]


# ---------------------------------------------------------------------------
# loop equation residual


def w_residual(moments: Mapping[int, TSeries], weights: Mapping[int, TSeries], start: int = 0
               ) -> Dict[int, TSeries]:
    """Coefficients (by power of x) of ``W^2 - V W + R``.

    ``W = sum_{l>=start} T_l x^{-l-1}``, ``V = x - sum_i w_i x^{i-1}`` and
    ``R = t - sum_q x^q sum_{i>=q+2} w_i T_{i-q-2}``.
    """
    any_s = next(iter(moments.values()))
    N, S = any_s.order, any_s.symbols
    zero = TSeries.zero(N, S)
    t = _t(N, S)
    W = {-(l + 1): T for l, T in moments.items() if l >= start}
    V = {1: _one(N, S)}
    for i, w in weights.items():
        V[i - 1] = V.get(i - 1, zero) - w
    R = {0: t}
    for i, w in weights.items():
        for q in range(0, i - 1):
            if i - q - 2 in moments:
                R[q] = R.get(q, zero) - w * moments[i - q - 2]
    out: Dict[int, TSeries] = {}

    def add(e, s):
        out[e] = out.get(e, zero) + s

    for a, x in W.items():
        for b, y in W.items():
            add(a + b, x * y)
    for a, x in V.items():
        for b, y in W.items():
            add(a + b, -(x * y))
    for e, r in R.items():
        add(e, r)
    # powers below this are affected by the truncation of W
    top = max(moments)
    d = max(list(weights) + [2])
    cutoff = -(top - d + 2)
    return {e: s for e, s in sorted(out.items()) if e >= cutoff}
