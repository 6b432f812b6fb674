"""Exact real-root isolation and counting for univariate polynomials.

Two independent routes are provided on purpose: Descartes-rule bisection
drives isolation, Sturm sequences drive counting and the segment test.
Sample points are dyadic rationals so bit sizes stay bounded when these
feed the plane decomposition.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .ratpoly import MPoly, UPoly

NEG_INF = -math.inf
POS_INF = math.inf


class RealRootError(Exception):
    pass


# ---------------------------------------------------------------------------
# integer kernels


def _sign_variations(seq) -> int:
    signs = [1 if s > 0 else -1 for s in seq if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sign_at(ints: list[int], x: Fraction) -> int:
    """Sign of p(x) for integer coefficients, exact (denominator-cleared Horner)."""
    if not ints:
        return 0
    a, b = x.numerator, x.denominator
    n = len(ints) - 1
    acc = 0
    bp = 1
    for i in range(n, -1, -1):
        acc = acc * a + ints[i] * bp
        bp *= b
    return (acc > 0) - (acc < 0)


def _taylor_shift_1(cs: list[int]) -> list[int]:
    """p(x) -> p(x+1), integer coefficients, in place style."""
    out = list(cs)
    n = len(out)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += out[j + 1]
    return out


def _descartes_01(cs: list[int]) -> int:
    """Descartes bound for the number of roots of p in the open (0, 1)."""
    rev = list(reversed(cs))
    return _sign_variations(_taylor_shift_1(rev))


def _scale_shift(cs: list[int], a: Fraction, w: Fraction) -> list[int]:
    """Integer-cleared coefficients of p(a + w*x), up to a positive constant.

    Horner over a common denominator: with a = A/den, w = W/den the loop
    maintains den^k * (partial Horner value), so everything stays integer.
    """
    den = a.denominator * w.denominator // math.gcd(a.denominator, w.denominator)
    A = a.numerator * (den // a.denominator)
    W = w.numerator * (den // w.denominator)
    acc: list[int] = []
    scale = 1  # den^(number of Horner steps applied)
    for c in reversed(cs):
        new = [0] * (len(acc) + 1)
        for i, k in enumerate(acc):
            if k:
                new[i] += k * A
                new[i + 1] += k * W
        scale *= den
        new[0] += c * scale
        acc = new
    while acc and acc[-1] == 0:
        acc.pop()
    g = 0
    for k in acc:
        g = math.gcd(g, abs(k))
    return [k // g for k in acc] if g > 1 else acc


# ---------------------------------------------------------------------------
# isolating intervals


@dataclass(frozen=True)
class IsolatingInterval:
    """Rational interval containing exactly one real root of `polynomial`.

    low == high encodes an exact rational root.  `polynomial` is the
    squarefree part used for isolation (multiplicity_free records that).
    """

    low: Fraction
    high: Fraction
    polynomial: UPoly
    multiplicity_free: bool = True

    def is_exact(self) -> bool:
        return self.low == self.high

    def width(self) -> Fraction:
        return self.high - self.low

    def midpoint(self) -> Fraction:
        return (self.low + self.high) / 2

    def refine(self, width: Fraction) -> "IsolatingInterval":
        """Narrow below `width` by sign-preserving bisection."""
        lo, hi = self.low, self.high
        if lo == hi:
            return self
        p = self.polynomial
        ints = p.int_cleared()
        slo = _sign_at(ints, lo)
        if slo == 0:
            return IsolatingInterval(lo, lo, p)
        while hi - lo >= width:
            m = (lo + hi) / 2
            sm = _sign_at(ints, m)
            if sm == 0:
                return IsolatingInterval(m, m, p)
            if sm == slo:
                lo = m
            else:
                hi = m
        return IsolatingInterval(lo, hi, p)

    def float(self) -> float:
        iv = self.refine(Fraction(1, 1 << 60))
        return float(iv.midpoint())

    def contains(self, x: Fraction) -> bool:
        return self.low <= x <= self.high


@dataclass(frozen=True)
class IndexedRoot:
    """Root(p, l): the l-th real root, with infinite sentinels out of range."""

    polynomial: UPoly
    index: int
    value: "IsolatingInterval | float"

    def is_neg_inf(self) -> bool:
        return self.value == NEG_INF

    def is_pos_inf(self) -> bool:
        return self.value == POS_INF


# ---------------------------------------------------------------------------
# Sturm route


def sturm_sequence(p: UPoly) -> list[UPoly]:
    """Signed remainder sequence of the squarefree part of p.

    Computed fraction-free: each remainder is the negated pseudo-remainder,
    sign-corrected for the pseudo-division multiplier and stripped to
    primitive integers (positive rescaling preserves sign variations).
    """
    if p.is_zero():
        raise RealRootError("zero polynomial")
    f = p.squarefree()
    if f.degree == 0:
        return [f]
    seq_i = [_seq_ints(f)]
    d = f.derivative()
    seq_i.append(_seq_ints(d))
    from .ratpoly import _int_prem, _int_primitive
    while len(seq_i[-1]) > 1:
        a, b = seq_i[-2], seq_i[-1]
        delta = len(a) - len(b)  # = deg a - deg b
        r = _int_prem(a, b)
        if not r:
            break
        # prem scales by lc(b)^(delta+1); restore the true remainder's sign
        if b[-1] < 0 and (delta + 1) % 2 == 1:
            r = [c for c in r]
        else:
            r = [-c for c in r]
        _int_primitive(r)
        seq_i.append(r)
    return [UPoly([Fraction(c) for c in s], p.var) for s in seq_i]


def _seq_ints(u: UPoly) -> list[int]:
    return u.int_cleared()


def _variations_at(seq: list[UPoly], x) -> int:
    if x == NEG_INF:
        vals = [s.coeffs[-1] * (-1) ** s.degree if not s.is_zero() else 0 for s in seq]
    elif x == POS_INF:
        vals = [s.coeffs[-1] if not s.is_zero() else 0 for s in seq]
    else:
        vals = [_sign_at(s.int_cleared(), Fraction(x)) for s in seq]
    return _sign_variations(vals)


@functools.lru_cache(maxsize=512)
def _sturm_cached(p: UPoly) -> tuple[UPoly, ...]:
    return tuple(sturm_sequence(p))


def count_roots(p: UPoly, low=NEG_INF, high=POS_INF) -> int:
    """Number of distinct real roots in (low, high]."""
    if p.is_zero():
        raise RealRootError("zero polynomial")
    if p.degree <= 0:
        return 0
    if not (low == NEG_INF or high == POS_INF):
        if not low < high:
            raise RealRootError("empty interval")
    seq = _sturm_cached(p)
    return _variations_at(seq, low) - _variations_at(seq, high)


# ---------------------------------------------------------------------------
# Descartes route


def _root_bound(ints: list[int]) -> Fraction:
    """Cauchy bound, rounded up to a power of two."""
    lc = abs(ints[-1])
    m = max((abs(c) for c in ints[:-1]), default=0)
    bound = 1 + m / lc
    b = Fraction(1)
    while b < bound:
        b *= 2
    return b


def isolate(p: UPoly) -> list[IsolatingInterval]:
    """Disjoint dyadic isolating intervals, one per distinct real root."""
    if p.is_zero():
        raise RealRootError("zero polynomial")
    f = p.squarefree()
    if f.degree <= 0:
        return []
    ints = f.int_cleared()
    out: list[IsolatingInterval] = []
    B = _root_bound(ints)
    # peel an exact zero root; remaining roots are isolated against the
    # peeled polynomial and never span 0, so endpoint signs stay reliable
    if ints[0] == 0:
        out.append(IsolatingInterval(Fraction(0), Fraction(0), f))
        k = 0
        while ints[k] == 0:
            k += 1
        ints_nz = ints[k:]
        fiso = UPoly([Fraction(c) for c in ints_nz], f.var)
        stack = [(-B, Fraction(0)), (Fraction(0), B)]
    else:
        ints_nz = ints
        fiso = f
        stack = [(-B, B)]
    if len(ints_nz) <= 1:
        return out

    def count_on(a: Fraction, b: Fraction) -> int:
        return _sign_variations(_taylor_shift_1(list(reversed(_scale_shift(ints_nz, a, b - a)))))
    while stack:
        a, b = stack.pop()
        v = count_on(a, b)
        if v == 0:
            continue
        if v == 1:
            sa = _sign_at(ints_nz, a)
            sb = _sign_at(ints_nz, b)
            if sa != 0 and sb != 0 and sa != sb:
                out.append(IsolatingInterval(a, b, fiso))
                continue
            # an endpoint sits exactly on some other root: keep bisecting
        m = (a + b) / 2
        if _sign_at(ints_nz, m) == 0:
            out.append(IsolatingInterval(m, m, fiso))
        stack.append((a, m))
        stack.append((m, b))
    out.sort(key=lambda iv: (iv.low, iv.high))
    # make neighbours strictly disjoint
    for i in range(len(out) - 1):
        a, b = out[i], out[i + 1]
        while not a.high < b.low:
            if not a.is_exact():
                a = a.refine(a.width() / 2)
            if not b.is_exact():
                b = b.refine(b.width() / 2)
            if a.is_exact() and b.is_exact():
                if a.low == b.low:
                    raise RealRootError("duplicate root after squarefree")
                break
        out[i], out[i + 1] = a, b
    return out


def root_at_index(p: UPoly, l: int) -> IndexedRoot:
    """Root(p, l) with -inf for l <= 0 and +inf for l beyond the last root."""
    if l <= 0:
        return IndexedRoot(p, l, NEG_INF)
    roots = isolate(p)
    if l > len(roots):
        return IndexedRoot(p, l, POS_INF)
    return IndexedRoot(p, l, roots[l - 1])


def sample_between(p: UPoly, l: int, roots: list[IsolatingInterval] | None = None) -> Fraction:
    """Deterministic dyadic rational strictly between Root(p, l) and Root(p, l+1)."""
    if roots is None:
        roots = isolate(p)
    n = len(roots)
    if n == 0:
        return Fraction(0)
    if l <= 0:
        lo = roots[0].low
        return Fraction(math.floor(lo) - 1)
    if l >= n:
        hi = roots[-1].high
        return Fraction(math.floor(hi) + 1)
    a, b = roots[l - 1], roots[l]
    while True:
        if a.high < b.low:
            return (a.high + b.low) / 2
        if a.high == b.low and a.is_exact() and b.is_exact():
            raise RealRootError("adjacent equal roots")  # impossible after squarefree
        if a.high == b.low:
            # shared dyadic endpoint which is not a root of either side
            ints = a.polynomial.int_cleared()
            if _sign_at(ints, a.high) != 0:
                return a.high
        a = a.refine(a.width() / 2) if not a.is_exact() else a
        b = b.refine(b.width() / 2) if not b.is_exact() else b


# ---------------------------------------------------------------------------
# segment crossing


def restrict_to_segment(poly: MPoly, p1, p2, tvar: str = "t") -> UPoly:
    """Restriction of a plane polynomial to the segment p1 + t (p2 - p1).

    The polynomial's first declared variable pairs with the x coordinate,
    the second with y.
    """
    if not 1 <= len(poly.vars) <= 2:
        raise RealRootError(f"not a plane polynomial: vars {poly.vars}")
    x1, y1 = Fraction(p1[0]), Fraction(p1[1])
    x2, y2 = Fraction(p2[0]), Fraction(p2[1])
    t = MPoly.var(tvar)
    sub = {poly.vars[0]: MPoly.const(x1, (tvar,)) + (x2 - x1) * t}
    if len(poly.vars) > 1:
        sub[poly.vars[1]] = MPoly.const(y1, (tvar,)) + (y2 - y1) * t
    r = poly.eval(sub)
    if isinstance(r, Fraction):
        return UPoly([r], tvar)
    return UPoly.from_mpoly(r.with_vars((tvar,)), tvar)


def segment_crosses(polys: list[MPoly], p1, p2, with_flag: bool = False):
    """True iff some polynomial vanishes on the closed segment [p1, p2].

    A polynomial identically zero along the segment counts as a crossing;
    with_flag=True also returns whether that degenerate case occurred.
    """
    if tuple(p1) == tuple(p2):
        raise RealRootError("degenerate segment")
    crossed = False
    degenerate = False
    for poly in polys:
        u = restrict_to_segment(poly, p1, p2)
        if u.is_zero():
            crossed = True
            degenerate = True
            continue
        if u.degree <= 0:
            continue
        if u(0) == 0 or u(1) == 0:
            crossed = True
            continue
        if count_roots(u, Fraction(0), Fraction(1)) > 0:
            crossed = True
    if with_flag:
        return crossed, degenerate
    return crossed
