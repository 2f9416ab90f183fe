"""Truncated power series in the vertex weight ``t``.

Coefficients are sparse multivariate polynomials over :class:`fractions.Fraction`
in a fixed, ordered tuple of weight symbols (``t_4``, ``t_2_2``, ...).  A series
of order ``N`` is exact modulo ``t**(N+1)``; no operation ever extends ``N``.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple

from .errors import NonUnitConstantTerm, NoStabilization, SymbolUniverseMismatch

Monomial = Tuple[int, ...]
Poly = Dict[Monomial, Fraction]


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return {}
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            v = out.get(m, 0) + ca * cb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _pscale(a: Poly, c) -> Poly:
    c = Fraction(c)
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


class TSeries:
    """Element of ``Q[weights][[t]] / (t**(order+1))``."""

    __slots__ = ("order", "symbols", "coeffs")

    def __init__(self, order: int, symbols: Sequence[str] = (), coeffs: Iterable[Mapping] = ()):
        if order < 0:
            raise ValueError("order must be nonnegative")
        self.order = order
        self.symbols = tuple(symbols)
        cs: List[Poly] = []
        for p in list(coeffs)[: order + 1]:
            cs.append({tuple(m): Fraction(v) for m, v in p.items() if v})
        while len(cs) < order + 1:
            cs.append({})
        self.coeffs = cs

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, order: int, symbols: Sequence[str] = ()) -> "TSeries":
        return cls(order, symbols)

    @classmethod
    def constant(cls, c, order: int, symbols: Sequence[str] = ()) -> "TSeries":
        s = cls(order, symbols)
        if Fraction(c):
            s.coeffs[0] = {(0,) * len(s.symbols): Fraction(c)}
        return s

    @classmethod
    def t(cls, order: int, symbols: Sequence[str] = ()) -> "TSeries":
        """The series variable itself."""
        s = cls(order, symbols)
        if order >= 1:
            s.coeffs[1] = {(0,) * len(s.symbols): Fraction(1)}
        return s

    @classmethod
    def weight(cls, name: str, order: int, symbols: Sequence[str]) -> "TSeries":
        symbols = tuple(symbols)
        if name not in symbols:
            raise SymbolUniverseMismatch(f"{name!r} not in {symbols}")
        s = cls(order, symbols)
        mono = tuple(1 if x == name else 0 for x in symbols)
        s.coeffs[0] = {mono: Fraction(1)}
        return s

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, Mapping[str, int], object]], order: int,
                   symbols: Sequence[str]) -> "TSeries":
        """Build from ``(t_power, {symbol: exp}, coefficient)`` triples."""
        s = cls(order, symbols)
        for n, mono, c in terms:
            if n > order:
                continue
            for name in mono:
                if name not in s.symbols:
                    raise SymbolUniverseMismatch(f"{name!r} not in {s.symbols}")
            key = tuple(mono.get(x, 0) for x in s.symbols)
            s.coeffs[n] = _padd(s.coeffs[n], {key: Fraction(c)})
        return s

    # -- helpers ------------------------------------------------------------

    def _check(self, other: "TSeries") -> None:
        if self.symbols != other.symbols:
            raise SymbolUniverseMismatch(f"{self.symbols} vs {other.symbols}")

    def _coerce(self, other) -> "TSeries":
        if isinstance(other, TSeries):
            self._check(other)
            return other
        return TSeries.constant(other, self.order, self.symbols)

    def truncate(self, order: int) -> "TSeries":
        return TSeries(min(order, self.order), self.symbols, self.coeffs)

    def with_symbols(self, symbols: Sequence[str]) -> "TSeries":
        """Re-express over a larger symbol universe."""
        symbols = tuple(symbols)
        missing = set(self.symbols) - set(symbols)
        if missing:
            raise SymbolUniverseMismatch(f"cannot drop symbols {sorted(missing)}")
        idx = [self.symbols.index(x) if x in self.symbols else None for x in symbols]
        out = TSeries(self.order, symbols)
        for n, p in enumerate(self.coeffs):
            out.coeffs[n] = {tuple(m[i] if i is not None else 0 for i in idx): c for m, c in p.items()}
        return out

    def copy(self) -> "TSeries":
        return TSeries(self.order, self.symbols, self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int:
        for n, p in enumerate(self.coeffs):
            if p:
                return n
        return self.order + 1

    def coefficient(self, n: int, mono: Mapping[str, int] | None = None):
        """Coefficient of ``t**n`` (a polynomial dict) or of ``t**n * mono``."""
        if n > self.order:
            raise ValueError(f"t^{n} is beyond the truncation order {self.order}")
        p = self.coeffs[n]
        if mono is None:
            return dict(p)
        key = tuple(mono.get(x, 0) for x in self.symbols)
        return p.get(key, Fraction(0))

    def terms(self):
        """Yield ``(n, {symbol: exp}, coefficient)`` sorted deterministically."""
        for n, p in enumerate(self.coeffs):
            for m in sorted(p):
                yield n, {x: e for x, e in zip(self.symbols, m) if e}, p[m]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        return TSeries(n, self.symbols, [_padd(self.coeffs[i], other.coeffs[i]) for i in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return TSeries(self.order, self.symbols, [_pscale(p, -1) for p in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        return TSeries(n, self.symbols, [_padd(self.coeffs[i], other.coeffs[i], -1) for i in range(n + 1)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TSeries):
            return TSeries(self.order, self.symbols, [_pscale(p, other) for p in self.coeffs])
        return ts_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TSeries):
            return self * other.inverse()
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = TSeries.constant(1, self.order, self.symbols)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TSeries):
            return NotImplemented
        return self.order == other.order and self.symbols == other.symbols and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.symbols, tuple(tuple(sorted(p.items())) for p in self.coeffs)))

    def agrees_with(self, other: "TSeries", order: int | None = None) -> bool:
        """Equality modulo ``t**(order+1)`` (default: the common order)."""
        self._check(other)
        n = min(self.order, other.order) if order is None else order
        return all(self.coeffs[i] == other.coeffs[i] for i in range(n + 1))

    def inverse(self) -> "TSeries":
        """Multiplicative inverse; the constant term must be a nonzero rational."""
        c0 = self.coeffs[0]
        zero = (0,) * len(self.symbols)
        if set(c0) != {zero}:
            raise NonUnitConstantTerm("constant term must be a nonzero rational")
        inv0 = 1 / c0[zero]
        u = self * inv0
        # 1/u = sum (1-u)^k, nilpotent in t
        d = TSeries.constant(1, self.order, self.symbols) - u
        out = TSeries.constant(1, self.order, self.symbols)
        term = out
        for _ in range(self.order):
            term = term * d
            out = out + term
        return out * inv0

    def __repr__(self):
        parts = []
        for n, mono, c in self.terms():
            w = "*".join(f"{x}^{e}" if e > 1 else x for x, e in mono.items())
            tt = "" if n == 0 else ("t" if n == 1 else f"t^{n}")
            body = "*".join(x for x in (w, tt) if x) or "1"
            parts.append(f"{c}*{body}")
        return f"TSeries({' + '.join(parts) or '0'} + O(t^{self.order + 1}))"

    # -- serialisation ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "symbols": list(self.symbols),
            "coeffs": [
                [{"monomial": {x: e for x, e in zip(self.symbols, m) if e},
                  "num": p[m].numerator, "den": p[m].denominator} for m in sorted(p)]
                for p in self.coeffs
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TSeries":
        symbols = tuple(data.get("symbols", ()))
        terms = []
        for n, row in enumerate(data["coeffs"]):
            for entry in row:
                terms.append((n, entry["monomial"], Fraction(entry["num"], entry["den"])))
        return cls.from_terms(terms, data["order"], symbols)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_power", *self.symbols, "coefficient"])
        for n, p in enumerate(self.coeffs):
            for m in sorted(p):
                w.writerow([n, *m, str(p[m])])
        return buf.getvalue()


def ts_mul(a: TSeries, b: TSeries) -> TSeries:
    """Cauchy product truncated at ``min(a.order, b.order)``."""
    a._check(b)
    n = min(a.order, b.order)
    out: List[Poly] = [{} for _ in range(n + 1)]
    for i in range(n + 1):
        pa = a.coeffs[i]
        if not pa:
            continue
        for j in range(n + 1 - i):
            pb = b.coeffs[j]
            if pb:
                out[i + j] = _padd(out[i + j], _pmul(pa, pb))
    return TSeries(n, a.symbols, out)


def ts_derivative_t(a: TSeries) -> TSeries:
    if a.order < 1:
        raise ValueError("derivative needs order >= 1")
    return TSeries(a.order - 1, a.symbols, [_pscale(a.coeffs[n + 1], n + 1) for n in range(a.order)])


def ts_derivative_weight(a: TSeries, name: str) -> TSeries:
    """Partial derivative with respect to a weight symbol."""
    if name not in a.symbols:
        raise SymbolUniverseMismatch(f"{name!r} not in {a.symbols}")
    k = a.symbols.index(name)
    out = []
    for p in a.coeffs:
        q: Poly = {}
        for m, c in p.items():
            if m[k]:
                mm = list(m)
                mm[k] -= 1
                q[tuple(mm)] = c * m[k]
        out.append(q)
    return TSeries(a.order, a.symbols, out)


def ts_substitute_weights(a: TSeries, subst: Mapping[str, object]) -> TSeries:
    """Replace weight symbols by series (or rationals).

    The result lives over the remaining symbols of ``a`` together with every
    symbol of the substituted series, sorted.
    """
    for name in subst:
        if name not in a.symbols:
            raise SymbolUniverseMismatch(f"{name!r} not in {a.symbols}")
    keep = [x for x in a.symbols if x not in subst]
    universe = set(keep)
    for v in subst.values():
        if isinstance(v, TSeries):
            universe |= set(v.symbols)
    symbols = tuple(sorted(universe))
    order = a.order
    for v in subst.values():
        if isinstance(v, TSeries):
            order = min(order, v.order)

    def lift(v) -> TSeries:
        if isinstance(v, TSeries):
            return v.with_symbols(symbols).truncate(order)
        return TSeries.constant(v, order, symbols)

    names = list(a.symbols)
    images = [lift(subst[x]) if x in subst else TSeries.weight(x, order, symbols) for x in names]
    powers: Dict[Tuple[int, int], TSeries] = {}

    def power(i: int, e: int) -> TSeries:
        key = (i, e)
        if key not in powers:
            powers[key] = TSeries.constant(1, order, symbols) if e == 0 else power(i, e - 1) * images[i]
        return powers[key]

    result = TSeries.zero(order, symbols)
    tpow = TSeries.constant(1, order, symbols)
    tvar = TSeries.t(order, symbols)
    for n in range(order + 1):
        for m, c in a.coeffs[n].items():
            term = tpow * c
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            result = result + term
        tpow = tpow * tvar
    return result


def ts_sqrt_unit(a: TSeries) -> TSeries:
    """Square root of a series with constant term exactly 1 (binomial series)."""
    zero = (0,) * len(a.symbols)
    if a.coeffs[0] != {zero: Fraction(1)}:
        raise NonUnitConstantTerm("sqrt needs constant term 1")
    d = a - 1
    out = TSeries.constant(1, a.order, a.symbols)
    term = TSeries.constant(1, a.order, a.symbols)
    coef = Fraction(1)
    for k in range(1, a.order + 1):
        coef = coef * (Fraction(1, 2) - (k - 1)) / k
        term = term * d
        if term.is_zero():
            break
        out = out + term * coef
    return out


def fixed_point_solve(F: Callable[[Sequence[TSeries]], Sequence[TSeries]], seed: Sequence[TSeries],
                      N: int | None = None, max_iter: int | None = None) -> List[TSeries]:
    """Iterate ``x <- F(x)`` until it stops changing.

    ``F`` must be a t-adic contraction: each application fixes at least one
    more coefficient.  Stabilization is required within ``N + 1`` rounds.
    """
    x = [s.truncate(N) if N is not None else s for s in seed]
    order = N if N is not None else min(s.order for s in x)
    limit = max_iter if max_iter is not None else order + 2
    for _ in range(limit):
        y = [s.truncate(order) for s in F(x)]
        if all(u == v for u, v in zip(x, y)):
            return y
        x = y
    raise NoStabilization(f"no fixed point after {limit} iterations at order {order}")


def series_to_text(s: TSeries) -> str:
    return json.dumps(s.to_json(), sort_keys=True)
