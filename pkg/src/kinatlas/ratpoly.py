"""Exact rational polynomial arithmetic.

Sparse multivariate polynomials (MPoly) and dense univariate polynomials
(UPoly) over arbitrary-precision rationals, with subresultant-PRS
resultants, discriminants, multivariate gcd and squarefree parts.  All
values are immutable and every operation is a pure function.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

Rational = Fraction


class RatPolyError(Exception):
    pass


def _merge_vars(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
    """Union of two variable tuples, keeping first-seen order."""
    out = list(a)
    seen = set(a)
    for v in b:
        if v not in seen:
            out.append(v)
            seen.add(v)
    return tuple(out)


def _grlex_key(exp: tuple[int, ...]):
    return (sum(exp), exp)


class MPoly:
    """Sparse multivariate polynomial with Fraction coefficients.

    Terms map exponent tuples (one entry per variable in `vars`) to
    nonzero coefficients.  Zero coefficients are never stored.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, variables: tuple[str, ...], terms: dict[tuple[int, ...], Fraction]):
        self.vars = tuple(variables)
        self.terms = {e: c for e, c in terms.items() if c != 0}

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(c, variables: tuple[str, ...] = ()) -> "MPoly":
        c = Fraction(c)
        z = (0,) * len(variables)
        return MPoly(variables, {z: c} if c else {})

    @staticmethod
    def var(name: str, variables: tuple[str, ...] | None = None) -> "MPoly":
        if variables is None:
            variables = (name,)
        if name not in variables:
            raise RatPolyError(f"variable {name!r} not in {variables}")
        e = tuple(1 if v == name else 0 for v in variables)
        return MPoly(variables, {e: Fraction(1)})

    def with_vars(self, variables: tuple[str, ...]) -> "MPoly":
        """Re-embed into a larger (or reordered) variable tuple."""
        if variables == self.vars:
            return self
        idx = []
        for v in self.vars:
            if v not in variables:
                if any(e[self.vars.index(v)] for e in self.terms):
                    raise RatPolyError(f"cannot drop live variable {v!r}")
                idx.append(None)
            else:
                idx.append(variables.index(v))
        terms: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, p in enumerate(e):
                if p:
                    ne[idx[i]] = p
            terms[tuple(ne)] = c
        return MPoly(variables, terms)

    # -- predicates / accessors ---------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise RatPolyError("not a constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var: str) -> int:
        """Degree in one variable (-1 for the zero polynomial)."""
        if var not in self.vars:
            return 0 if self.terms else -1
        i = self.vars.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def live_vars(self) -> tuple[str, ...]:
        live = set()
        for e in self.terms:
            for i, p in enumerate(e):
                if p:
                    live.add(self.vars[i])
        return tuple(v for v in self.vars if v in live)

    # -- arithmetic ----------------------------------------------------

    def _aligned(self, other: "MPoly") -> tuple["MPoly", "MPoly"]:
        if self.vars == other.vars:
            return self, other
        u = _merge_vars(self.vars, other.vars)
        return self.with_vars(u), other.with_vars(u)

    def __add__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            other = MPoly.const(other, self.vars)
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return MPoly(a.vars, terms)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self) -> "MPoly":
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            other = MPoly.const(other, self.vars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            c = Fraction(other)
            if not c:
                return MPoly(self.vars, {})
            return MPoly(self.vars, {e: k * c for e, k in self.terms.items()})
        a, b = self._aligned(other)
        if len(a.terms) < len(b.terms):
            a, b = b, a
        terms: dict[tuple[int, ...], Fraction] = {}
        for eb, cb in b.terms.items():
            for ea, ca in a.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = terms.get(e)
                if s is None:
                    terms[e] = ca * cb
                else:
                    s = s + ca * cb
                    if s:
                        terms[e] = s
                    else:
                        del terms[e]
        return MPoly(a.vars, terms)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise RatPolyError("negative power")
        result = MPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MPoly):
            return self.is_constant() and self.constant_value() == Fraction(other)
        a, b = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- calculus / evaluation -----------------------------------------

    def diff(self, var: str) -> "MPoly":
        """Exact partial derivative."""
        if var not in self.vars:
            raise RatPolyError(f"unknown variable {var!r}")
        i = self.vars.index(var)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms[ne] = terms.get(ne, Fraction(0)) + c * e[i]
        return MPoly(self.vars, terms)

    def eval(self, point: dict) -> "MPoly | Fraction":
        """Bind a subset of variables to rationals (or polynomials).

        Full binding returns a Fraction; partial binding returns the
        specialized polynomial in the remaining variables.
        """
        remaining = tuple(v for v in self.vars if v not in point)
        values = {}
        for v in self.vars:
            if v in point:
                w = point[v]
                values[v] = w if isinstance(w, MPoly) else Fraction(w)
        if all(isinstance(w, Fraction) for w in values.values()) and remaining == ():
            tot = Fraction(0)
            for e, c in self.terms.items():
                m = c
                for i, p in enumerate(e):
                    if p:
                        m *= values[self.vars[i]] ** p
                tot += m
            return tot
        if all(isinstance(w, Fraction) for w in values.values()):
            terms: dict[tuple[int, ...], Fraction] = {}
            ridx = [self.vars.index(v) for v in remaining]
            for e, c in self.terms.items():
                m = c
                for i, p in enumerate(e):
                    if p and self.vars[i] in values:
                        m *= values[self.vars[i]] ** p
                if not m:
                    continue
                ne = tuple(e[i] for i in ridx)
                s = terms.get(ne, Fraction(0)) + m
                if s:
                    terms[ne] = s
                else:
                    terms.pop(ne, None)
            return MPoly(remaining, terms)
        # polynomial substitution
        out_vars = remaining
        for w in values.values():
            if isinstance(w, MPoly):
                out_vars = _merge_vars(out_vars, w.vars)
        acc = MPoly.const(0, out_vars)
        for e, c in self.terms.items():
            term = MPoly.const(c, out_vars)
            for i, p in enumerate(e):
                if not p:
                    continue
                v = self.vars[i]
                if v in values:
                    w = values[v]
                    if isinstance(w, Fraction):
                        term = term * (w ** p)
                    else:
                        term = term * (w ** p)
                else:
                    term = term * (MPoly.var(v, out_vars) ** p)
            acc = acc + term
        return acc

    def eval_float(self, point: dict[str, float]) -> float:
        tot = 0.0
        for e, c in self.terms.items():
            m = float(c)
            for i, p in enumerate(e):
                if p:
                    m *= point[self.vars[i]] ** p
            tot += m
        return tot

    # -- structure in one variable -------------------------------------

    def coeffs_in(self, var: str) -> list["MPoly"]:
        """Dense coefficient list in `var` (constant term first),
        as polynomials in the remaining variables."""
        if var not in self.vars:
            return [self]
        i = self.vars.index(var)
        rest = tuple(v for j, v in enumerate(self.vars) if j != i)
        d = self.degree(var)
        if d < 0:
            return []
        buckets: list[dict] = [dict() for _ in range(d + 1)]
        for e, c in self.terms.items():
            ne = e[:i] + e[i + 1:]
            buckets[e[i]][ne] = c
        return [MPoly(rest, b) for b in buckets]

    @staticmethod
    def from_coeffs(coeffs: list["MPoly"], var: str) -> "MPoly":
        """Inverse of coeffs_in."""
        out_vars: tuple[str, ...] = (var,)
        for c in coeffs:
            out_vars = _merge_vars(out_vars, c.vars)
        acc = MPoly.const(0, out_vars)
        xv = MPoly.var(var, out_vars)
        xp = MPoly.const(1, out_vars)
        for k, c in enumerate(coeffs):
            if not c.is_zero():
                acc = acc + c.with_vars(out_vars) * xp
            xp = xp * xv
        return acc

    def leading_coefficient(self, var: str) -> "MPoly":
        cs = self.coeffs_in(var)
        if not cs:
            rest = tuple(v for v in self.vars if v != var)
            return MPoly.const(0, rest)
        return cs[-1]

    # -- normalization ---------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = _int_gcd(num, abs(c.numerator))
            den = den * c.denominator // _int_gcd(den, c.denominator)
        return Fraction(num, den)

    def canonical(self) -> "MPoly":
        """Content-free integer form with positive graded-lex leading coeff."""
        if not self.terms:
            return self
        c = self.content()
        lead = max(self.terms, key=_grlex_key)
        if self.terms[lead] < 0:
            c = -c
        return MPoly(self.vars, {e: k / c for e, k in self.terms.items()})

    def primitive_and_content_in(self, var: str) -> tuple["MPoly", "MPoly"]:
        """Split off gcd of the coefficients wrt `var` (multivariate content)."""
        cs = self.coeffs_in(var)
        nz = [c for c in cs if not c.is_zero()]
        if not nz:
            rest = tuple(v for v in self.vars if v != var)
            return self, MPoly.const(0, rest)
        g = nz[0]
        for c in nz[1:]:
            g = mgcd(g, c)
            if g.is_constant():
                break
        g = g.canonical()
        if g.is_constant():
            return self.canonical(), g
        prim = MPoly.from_coeffs([exact_div(c, g) for c in cs], var)
        return prim.canonical(), g

    # -- printing / parsing ----------------------------------------------

    def __repr__(self):
        return f"MPoly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


# ---------------------------------------------------------------------------
# exact division and gcd


def exact_div(num: MPoly, den: MPoly) -> MPoly:
    """Exact multivariate division; raises if den does not divide num."""
    if den.is_zero():
        raise RatPolyError("division by zero polynomial")
    if den.is_constant():
        c = den.constant_value()
        return MPoly(num.vars, {e: k / c for e, k in num.terms.items()})
    num, den = num._aligned(den)
    dl = max(den.terms, key=_grlex_key)
    dc = den.terms[dl]
    rem = dict(num.terms)
    q: dict[tuple[int, ...], Fraction] = {}
    while rem:
        nl = max(rem, key=_grlex_key)
        e = tuple(a - b for a, b in zip(nl, dl))
        if any(x < 0 for x in e):
            raise RatPolyError("inexact polynomial division")
        c = rem[nl] / dc
        q[e] = c
        for de, dk in den.terms.items():
            ne = tuple(a + b for a, b in zip(e, de))
            s = rem.get(ne, Fraction(0)) - c * dk
            if s:
                rem[ne] = s
            else:
                rem.pop(ne, None)
    return MPoly(num.vars, q)


def divides(den: MPoly, num: MPoly) -> bool:
    try:
        exact_div(num, den)
        return True
    except RatPolyError:
        return False


def _upoly_gcd_frac(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd of dense rational coefficient lists (low degree first)."""
    def strip(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    a, b = strip(list(a)), strip(list(b))
    while b:
        # remainder of a by b
        d = len(b) - 1
        lc = b[-1]
        r = list(a)
        while len(r) - 1 >= d and strip(r):
            k = len(r) - 1 - d
            c = r[-1] / lc
            for i, bc in enumerate(b):
                r[k + i] -= c * bc
            r = strip(r)
        a, b = b, r
    if not a:
        return []
    lc = a[-1]
    return [c / lc for c in a]


def mgcd(p: MPoly, q: MPoly) -> MPoly:
    """Multivariate gcd by primitive PRS recursion, canonical output."""
    if p.is_zero():
        return q.canonical()
    if q.is_zero():
        return p.canonical()
    if p.is_constant() or q.is_constant():
        return MPoly.const(1, p.vars)
    pv = set(p.live_vars())
    qv = set(q.live_vars())
    common = [v for v in p.vars if v in pv and v in qv]
    if not common:
        return MPoly.const(1, p.vars)
    var = common[0]
    p, q = p._aligned(q)
    if len(p.live_vars()) == 1 and len(q.live_vars()) == 1:
        # pure univariate: fast Euclid over Q
        ca = [c.constant_value() for c in p.coeffs_in(var)]
        cb = [c.constant_value() for c in q.coeffs_in(var)]
        g = _upoly_gcd_frac(ca, cb)
        rest = tuple(v for v in p.vars if v != var)
        out = MPoly.from_coeffs([MPoly.const(c, rest) for c in g], var)
        return out.with_vars(p.vars).canonical()
    pp, pc = p.primitive_and_content_in(var)
    qp, qc = q.primitive_and_content_in(var)
    cont = mgcd(pc, qc)
    a, b = pp, qp
    if a.degree(var) < b.degree(var):
        a, b = b, a
    while not b.is_zero() and b.degree(var) > 0:
        r = _pseudo_rem(a, b, var)
        if r.is_zero():
            a, b = b, r
            break
        rp, _ = r.primitive_and_content_in(var)
        a, b = b, rp
    if b.is_zero():
        g, _ = a.primitive_and_content_in(var)
    else:
        g = MPoly.const(1, p.vars)
    return (g * cont.with_vars(g.vars)).canonical()


def _coeffs_wrt(p: MPoly, var: str, rest: tuple[str, ...]) -> list[MPoly]:
    return [c.with_vars(rest) for c in p.coeffs_in(var)]


def _strip(cs: list[MPoly]) -> list[MPoly]:
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


def _pseudo_rem_coeffs(ac: list[MPoly], bc: list[MPoly]) -> list[MPoly]:
    """prem(a, b) = lc(b)^(da-db+1) * a mod b, on dense coefficient lists."""
    da, db = len(ac) - 1, len(bc) - 1
    if db < 0:
        raise RatPolyError("pseudo-division by zero")
    if da < db:
        return list(ac)
    lb = bc[-1]
    r = list(ac)
    e = da - db + 1
    while len(r) - 1 >= db and r:
        top = r[-1]
        k = len(r) - 1 - db
        r = [c * lb for c in r[:-1]]
        for i in range(db):
            r[k + i] = r[k + i] - top * bc[i]
        _strip(r)
        e -= 1
    if e > 0:
        f = lb ** e
        r = [c * f for c in r]
    return r


def _pseudo_rem(a: MPoly, b: MPoly, var: str) -> MPoly:
    rest = tuple(v for v in a.vars if v != var)
    r = _pseudo_rem_coeffs(_coeffs_wrt(a, var, rest), _coeffs_wrt(b, var, rest))
    if not r:
        return MPoly.const(0, a.vars)
    return MPoly.from_coeffs(r, var).with_vars(_merge_vars(a.vars, (var,)))


def resultant(p: MPoly, q: MPoly, var: str) -> MPoly:
    """Resultant wrt `var` by the subresultant PRS (Collins divisors); exact.

    Intermediate divisions are coefficient-wise and always exact, so the
    bit growth stays polynomial even over multivariate coefficient rings.
    """
    p, q = p._aligned(q)
    dp, dq = p.degree(var), q.degree(var)
    if dp <= 0 or dq <= 0:
        raise RatPolyError("resultant needs positive degree in the variable")
    rest = tuple(v for v in p.vars if v != var)

    swapped = dp < dq
    a, b = (q, p) if swapped else (p, q)
    sign = -1 if (swapped and (dp * dq) % 2 == 1) else 1

    one = MPoly.const(1, rest)
    ac = _coeffs_wrt(a, var, rest)
    bc = _coeffs_wrt(b, var, rest)
    g, h = one, one
    s = 1
    while True:
        da, db = len(ac) - 1, len(bc) - 1
        d = da - db
        if (da % 2 == 1) and (db % 2 == 1):
            s = -s
        rc = _pseudo_rem_coeffs(ac, bc)
        if not rc:
            return MPoly.const(0, rest)
        denom = g * (h ** d)
        rc = [exact_div(c, denom) for c in rc]
        ac = bc
        g = ac[-1]
        if d == 1:
            h = g
        elif d > 1:
            h = exact_div(g ** d, h ** (d - 1))
        bc = rc
        if len(bc) - 1 == 0:
            da = len(ac) - 1
            res = bc[0] ** da
            if da > 1:
                res = exact_div(res, h ** (da - 1))
            if s < 0:
                res = -res
            if sign < 0:
                res = -res
            return res


def sylvester_resultant(p: MPoly, q: MPoly, var: str) -> MPoly:
    """Resultant via Sylvester-matrix cofactor expansion (small degrees only).

    Independent of the PRS path; used as a cross-check oracle.
    """
    p, q = p._aligned(q)
    m, n = p.degree(var), q.degree(var)
    if m <= 0 or n <= 0:
        raise RatPolyError("resultant needs positive degree in the variable")
    rest = tuple(v for v in p.vars if v != var)
    pc = [c.with_vars(rest) for c in p.coeffs_in(var)]
    qc = [c.with_vars(rest) for c in q.coeffs_in(var)]
    size = m + n
    zero = MPoly.const(0, rest)
    rows: list[list[MPoly]] = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(reversed(pc)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(reversed(qc)):
            row[i + j] = c
        rows.append(row)
    return _det_expand(rows)


def _det_expand(rows: list[list[MPoly]]) -> MPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    # expansion along first column
    acc = None
    for i in range(n):
        c = rows[i][0]
        if c.is_zero():
            continue
        minor = [r[1:] for j, r in enumerate(rows) if j != i]
        term = c * _det_expand(minor)
        if i % 2 == 1:
            term = -term
        acc = term if acc is None else acc + term
    if acc is None:
        vs = rows[0][0].vars
        return MPoly.const(0, vs)
    return acc


def discriminant(p: MPoly, var: str) -> MPoly:
    """(-1)^(d(d-1)/2) resultant(p, p', var) / lc(p, var), exact."""
    d = p.degree(var)
    if d < 2:
        raise RatPolyError("discriminant needs degree >= 2")
    r = resultant(p, p.diff(var), var)
    lc = p.leading_coefficient(var)
    r = exact_div(r, lc.with_vars(r.vars))
    if (d * (d - 1) // 2) % 2 == 1:
        r = -r
    return r


def squarefree_part(p: MPoly, var: str) -> MPoly:
    """p / gcd(p, dp/dvar), canonicalized."""
    if p.is_zero():
        raise RatPolyError("zero polynomial")
    if p.degree(var) <= 0:
        return p.canonical()
    g = mgcd(p, p.diff(var))
    if g.is_constant():
        return p.canonical()
    return exact_div(p, g.with_vars(p.vars)).canonical()


def squarefree_total(p: MPoly) -> MPoly:
    """Squarefree part across every live variable."""
    out = p.canonical()
    for v in out.live_vars():
        out = squarefree_part(out, v)
    return out


# ---------------------------------------------------------------------------
# dense univariate layer


class UPoly:
    """Dense univariate polynomial over Fraction, lowest degree first."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs, var: str = "x"):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var

    @staticmethod
    def from_mpoly(p: MPoly, var: str | None = None) -> "UPoly":
        live = p.live_vars()
        if var is None:
            var = live[0] if live else (p.vars[0] if p.vars else "x")
        if any(v != var for v in live):
            raise RatPolyError(f"not univariate in {var!r}: {live}")
        cs = p.coeffs_in(var)
        return UPoly([c.constant_value() for c in cs], var)

    def to_mpoly(self) -> MPoly:
        return MPoly((self.var,), {(i,): c for i, c in enumerate(self.coeffs) if c})

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def __add__(self, other):
        o = other.coeffs if isinstance(other, UPoly) else (Fraction(other),)
        n = max(len(self.coeffs), len(o))
        return UPoly([ (self.coeffs[i] if i < len(self.coeffs) else 0)
                     + (o[i] if i < len(o) else 0) for i in range(n)], self.var)

    def __neg__(self):
        return UPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        o = other if isinstance(other, UPoly) else UPoly([Fraction(other)], self.var)
        return self + (-o)

    def __mul__(self, other):
        if not isinstance(other, UPoly):
            c = Fraction(other)
            return UPoly([k * c for k in self.coeffs], self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1) if self.coeffs and other.coeffs else []
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return UPoly(out, self.var)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, UPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def derivative(self) -> "UPoly":
        return UPoly([c * i for i, c in enumerate(self.coeffs)][1:], self.var)

    def divmod(self, other: "UPoly") -> tuple["UPoly", "UPoly"]:
        if other.is_zero():
            raise RatPolyError("division by zero")
        q = [Fraction(0)] * max(0, len(self.coeffs) - len(other.coeffs) + 1)
        r = list(self.coeffs)
        d = other.degree
        lc = other.coeffs[-1]
        while len(r) - 1 >= d and any(r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) - 1 < d:
                break
            k = len(r) - 1 - d
            c = r[-1] / lc
            q[k] = c
            for i, bc in enumerate(other.coeffs):
                r[k + i] -= c * bc
            while r and r[-1] == 0:
                r.pop()
        return UPoly(q, self.var), UPoly(r, self.var)

    def rem(self, other: "UPoly") -> "UPoly":
        return self.divmod(other)[1]

    def gcd(self, other: "UPoly") -> "UPoly":
        """Monic gcd via integer primitive PRS (no fraction blowup)."""
        if self.is_zero():
            return other.monic()
        if other.is_zero():
            return self.monic()
        a = self.int_cleared()
        b = other.int_cleared()
        if len(a) < len(b):
            a, b = b, a
        while b and len(b) > 1:
            r = _int_prem(a, b)
            if not r:
                a, b = b, r
                break
            _int_primitive(r)
            a, b = b, r
        if b:  # nonzero constant remainder: coprime
            return UPoly([Fraction(1)], self.var)
        g = UPoly([Fraction(c) for c in a], self.var)
        return g.monic()

    def squarefree(self) -> "UPoly":
        if self.degree <= 1:
            return self.monic()
        g = self.gcd(self.derivative())
        if g.degree <= 0:
            return self.monic()
        return self.divmod(g)[0].monic()

    def monic(self) -> "UPoly":
        if self.is_zero():
            return self
        lc = self.coeffs[-1]
        return UPoly([c / lc for c in self.coeffs], self.var)

    def int_cleared(self) -> list[int]:
        """Coefficients scaled to coprime integers (for fast isolation)."""
        if not self.coeffs:
            return []
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // _int_gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for k in ints:
            g = _int_gcd(g, abs(k))
        return [k // g for k in ints] if g else ints

    def __repr__(self):
        return f"UPoly({format_poly(self.to_mpoly())!r})"


def _int_prem(a: list[int], b: list[int]) -> list[int]:
    """Integer pseudo-remainder lc(b)^(da-db+1) * a mod b on dense lists."""
    da, db = len(a) - 1, len(b) - 1
    if da < db:
        return list(a)
    lb = b[-1]
    r = list(a)
    e = da - db + 1
    while len(r) - 1 >= db and r:
        top = r[-1]
        k = len(r) - 1 - db
        r = [c * lb for c in r[:-1]]
        for i in range(db):
            r[k + i] -= top * b[i]
        while r and r[-1] == 0:
            r.pop()
        e -= 1
    if e > 0 and r:
        f = lb ** e
        r = [c * f for c in r]
    return r


def _int_primitive(r: list[int]) -> list[int]:
    """Strip integer content in place (sign preserved)."""
    g = 0
    for c in r:
        g = _int_gcd(g, abs(c))
    if g > 1:
        for i in range(len(r)):
            r[i] //= g
    return r


# ---------------------------------------------------------------------------
# textual format


def format_poly(p: MPoly) -> str:
    """Canonical text: graded-lex descending, `^` powers, `*` products."""
    if p.is_zero():
        return "0"
    items = sorted(p.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)
    parts = []
    for e, c in items:
        factors = []
        for i, pw in enumerate(e):
            if pw == 1:
                factors.append(p.vars[i])
            elif pw > 1:
                factors.append(f"{p.vars[i]}^{pw}")
        mag = abs(c)
        if not factors:
            body = _fmt_frac(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _fmt_frac(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append((" + " if c > 0 else " - ") + body)
    return "".join(parts)


def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...] | None):
        self.text = text
        self.pos = 0
        self.vars = variables

    def error(self, msg):
        raise RatPolyError(f"parse error at {self.pos}: {msg} in {self.text!r}")

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> MPoly:
        p = self.expr()
        if self.peek():
            self.error("trailing input")
        return p

    def expr(self) -> MPoly:
        ch = self.peek()
        neg = False
        if ch in "+-":
            neg = ch == "-"
            self.pos += 1
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                acc = acc + self.term()
            elif ch == "-":
                self.pos += 1
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> MPoly:
        acc = self.power()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                acc = acc * self.power()
            elif ch == "(" or ch.isalpha() or ch == "_":
                acc = acc * self.power()
            else:
                return acc

    def power(self) -> MPoly:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            n = self.integer()
            return base ** n
        return base

    def atom(self) -> MPoly:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            p = self.expr()
            if self.peek() != ")":
                self.error("expected )")
            self.pos += 1
            return p
        if ch.isdigit():
            n = self.integer()
            if self.peek() == "/":
                save = self.pos
                self.pos += 1
                if self.peek().isdigit():
                    d = self.integer()
                    return MPoly.const(Fraction(n, d), self.vars or ())
                self.pos = save
            return MPoly.const(n, self.vars or ())
        if ch.isalpha() or ch == "_":
            name = self.ident()
            if self.vars is not None:
                if name not in self.vars:
                    self.error(f"unknown variable {name!r}")
                return MPoly.var(name, self.vars)
            return MPoly.var(name)
        self.error("unexpected character")

    def integer(self) -> int:
        start = self.pos
        if not self.peek().isdigit():
            self.error("expected integer")
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start:self.pos])

    def ident(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]


def parse_poly(text: str, variables: tuple[str, ...] | None = None) -> MPoly:
    """Parse the textual polynomial format (e.g. 'rho1^8 - 52*rho1^6')."""
    p = _Parser(text, variables).parse()
    if variables is not None:
        return p.with_vars(variables)
    return p
