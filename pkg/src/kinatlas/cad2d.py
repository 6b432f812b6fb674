"""Open cylindrical algebraic decomposition of the plane.

Given a set of curves, the base line is cut at the roots of the projection
polynomials (discriminants, leading coefficients, pairwise resultants,
vertical-line contents) and each resulting open interval is lifted through
the real roots of the specialized curve product.  Only full-dimensional
cells are produced; their boundaries are carried as indexed-root data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ratpoly import (
    MPoly, UPoly,
    discriminant, resultant, squarefree_total, mgcd, exact_div,
)
from .groebner import PolySystem, eliminate
from .realroots import (
    NEG_INF, POS_INF, IsolatingInterval, IndexedRoot,
    isolate, count_roots, sample_between,
)


class CadError(Exception):
    pass


@dataclass(frozen=True)
class ProjectionSet:
    """Level-2 polynomials and their level-1 projections."""

    p2: tuple[MPoly, ...]
    p1: tuple[UPoly, ...]


@dataclass(frozen=True)
class Cell2D:
    """Open cylindrical cell: base interval k1 lifted to fiber interval k2.

    Base bounds are indexed roots of the base product polynomial; fiber
    bounds are indexed roots of the curve product specialized at the base
    sample.  Index l means the region between Root(p, l) and Root(p, l+1).
    """

    id: int
    base_index: int
    fiber_index: int
    base_lo: IndexedRoot
    base_hi: IndexedRoot
    fiber_lo: IndexedRoot
    fiber_hi: IndexedRoot
    sample: tuple[Fraction, Fraction]

    def to_json(self, base_var: str, fiber_var: str) -> dict:
        def frac(q: Fraction) -> str:
            return f"{q.numerator}/{q.denominator}"

        def poly_str(ir: IndexedRoot) -> str:
            from .ratpoly import format_poly
            return format_poly(ir.polynomial.to_mpoly())

        return {
            "id": self.id,
            "base": {"poly": poly_str(self.base_lo), "left_index": self.base_index,
                     "right_index": self.base_index + 1},
            "fiber": {"poly": poly_str(self.fiber_lo), "left_index": self.fiber_index,
                      "right_index": self.fiber_index + 1},
            "sample": [frac(self.sample[0]), frac(self.sample[1])],
        }


@dataclass
class Decomposition:
    base_var: str
    fiber_var: str
    polys: list[MPoly]
    proj: ProjectionSet
    base_poly: UPoly
    base_roots: list[IsolatingInterval]
    base_samples: list[Fraction]
    fiber_products: list[UPoly]            # per base region, specialized product
    fiber_roots: list[list[IsolatingInterval]]
    cells: list[Cell2D]
    columns: list[list[Cell2D]]

    def cell(self, cid: int) -> Cell2D:
        return self.cells[cid]

    def locate(self, px: Fraction, py: Fraction) -> int | None:
        """Cell id containing the rational point; None on the variety or a
        projection boundary."""
        px, py = Fraction(px), Fraction(py)
        if not self.base_poly.is_zero() and self.base_poly.degree > 0:
            if self.base_poly(px) == 0:
                return None
            k1 = count_roots(self.base_poly, NEG_INF, px)
        else:
            k1 = 0
        f = _specialize_product(self.polys, self.base_var, self.fiber_var, px)
        if f.degree > 0 and f(py) == 0:
            return None
        k2 = count_roots(f, NEG_INF, py) if f.degree > 0 else 0
        for c in self.columns[k1]:
            if c.fiber_index == k2:
                return c.id
        return None

    def sign_at_sample(self, poly: MPoly, cid: int) -> int:
        c = self.cells[cid]
        v = poly.eval({self.base_var: c.sample[0], self.fiber_var: c.sample[1]})
        return (v > 0) - (v < 0)


def _normalize_input(polys, base_var: str, fiber_var: str) -> list[MPoly]:
    vs = (base_var, fiber_var)
    out: list[MPoly] = []
    seen = set()
    for p in polys:
        q = p.with_vars(vs) if set(p.live_vars()) <= set(vs) else None
        if q is None:
            raise CadError(f"polynomial not over ({base_var},{fiber_var}): {p.live_vars()}")
        if q.is_zero() or q.is_constant():
            continue
        q = squarefree_total(q).canonical()
        key = frozenset(q.terms.items())
        if key not in seen:
            seen.add(key)
            out.append(q)
    return out


def projection_set(p2, base_var: str, fiber_var: str) -> ProjectionSet:
    """Discriminants, leading coefficients, contents, and pairwise
    resultants with respect to the fiber variable; squarefree, deduplicated
    up to constants."""
    polys = _normalize_input(p2, base_var, fiber_var)
    if not polys:
        return ProjectionSet(tuple(), tuple())
    p1_m: list[MPoly] = []

    def push(q: MPoly):
        if q.is_zero() or q.is_constant():
            return
        q = squarefree_total(q.with_vars((base_var,))).canonical()
        if all(q != r for r in p1_m):
            p1_m.append(q)

    fiber_polys = []
    for p in polys:
        if p.degree(fiber_var) == 0:
            push(p)  # vertical lines project to themselves
            continue
        fiber_polys.append(p)
        prim, cont = p.primitive_and_content_in(fiber_var)
        if not cont.is_constant():
            push(cont)
        lc = prim.leading_coefficient(fiber_var)
        if not lc.is_constant():
            push(lc)
        if prim.degree(fiber_var) >= 2:
            push(discriminant_bivar(prim, fiber_var, base_var))
    for i in range(len(fiber_polys)):
        for j in range(i + 1, len(fiber_polys)):
            push(resultant_bivar(fiber_polys[i], fiber_polys[j], fiber_var, base_var))
    p1 = tuple(UPoly.from_mpoly(q, base_var) for q in p1_m)
    return ProjectionSet(tuple(polys), p1)


def resultant_bivar(p: MPoly, q: MPoly, elim: str, keep: str) -> MPoly:
    """Bivariate resultant by evaluation-interpolation.

    Specializes `keep` at rational points where neither leading coefficient
    vanishes, computes univariate resultants, and Lagrange-interpolates;
    agrees with the subresultant-PRS route (pinned by tests), but runs in
    many small exact steps instead of one large one.
    """
    dpe, dqe = p.degree(elim), q.degree(elim)
    if dpe <= 0 or dqe <= 0:
        raise CadError("resultant needs positive degree in the eliminated variable")
    dpk, dqk = p.degree(keep), q.degree(keep)
    if dpk == 0 and dqk == 0:
        return resultant(p, q, elim)
    bound = dpk * dqe + dqk * dpe
    lcp = p.leading_coefficient(elim)
    lcq = q.leading_coefficient(elim)
    xs: list[Fraction] = []
    ys: list[Fraction] = []
    k = 0
    while len(xs) <= bound:
        x0 = Fraction(k if k % 2 == 0 else -(k + 1) // 2, 1)
        k += 1
        if lcp.eval({keep: x0}) == 0 or lcq.eval({keep: x0}) == 0:
            continue
        pu = UPoly.from_mpoly(_as_univar(p, elim, keep, x0), elim)
        qu = UPoly.from_mpoly(_as_univar(q, elim, keep, x0), elim)
        r = resultant(pu.to_mpoly(), qu.to_mpoly(), elim) if pu.degree > 0 and qu.degree > 0 \
            else MPoly.const(0, ())
        ys.append(r.constant_value() if r.is_constant() else Fraction(0))
        xs.append(x0)
    return _lagrange(xs, ys, keep)


def discriminant_bivar(p: MPoly, var: str, keep: str) -> MPoly:
    """Discriminant via the interpolated resultant route."""
    d = p.degree(var)
    if d < 2:
        raise CadError("discriminant needs degree >= 2")
    if p.degree(keep) == 0:
        return discriminant(p, var)
    r = resultant_bivar(p, p.diff(var), var, keep)
    lc = p.leading_coefficient(var)
    r = exact_div(r.with_vars((keep,)), lc.with_vars((keep,)))
    if (d * (d - 1) // 2) % 2 == 1:
        r = -r
    return r


def _as_univar(p: MPoly, elim: str, keep: str, x0: Fraction) -> MPoly:
    s = p.eval({keep: x0})
    if isinstance(s, Fraction):
        return MPoly.const(s, (elim,))
    return s.with_vars((elim,))


def _lagrange(xs: list[Fraction], ys: list[Fraction], var: str) -> MPoly:
    """Exact Lagrange interpolation, Newton form."""
    n = len(xs)
    coeffs = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (xs[i] - xs[i - j])
    poly = UPoly([coeffs[-1]], var)
    for i in range(n - 2, -1, -1):
        poly = poly * UPoly([-xs[i], Fraction(1)], var) + UPoly([coeffs[i]], var)
    return poly.to_mpoly()


def _specialize_product(polys, base_var: str, fiber_var: str, x0: Fraction) -> UPoly:
    acc = UPoly([Fraction(1)], fiber_var)
    for p in polys:
        if p.degree(fiber_var) == 0:
            continue
        s = p.eval({base_var: x0})
        if isinstance(s, Fraction):
            continue
        u = UPoly.from_mpoly(s.with_vars((fiber_var,)), fiber_var)
        if u.degree >= 1:
            acc = acc * u.squarefree()
    return acc.squarefree() if acc.degree >= 1 else acc


def decompose(p2, base_var: str = "u", fiber_var: str = "v") -> Decomposition:
    """Full-dimensional cells of the open CAD adapted to the curve set."""
    proj = projection_set(p2, base_var, fiber_var)
    polys = list(proj.p2)
    base = UPoly([Fraction(1)], base_var)
    for q in proj.p1:
        g = base.gcd(q)
        extra = q.divmod(g)[0] if g.degree >= 1 else q
        if extra.degree >= 1:
            base = base * extra
    base = base.squarefree() if base.degree >= 1 else base
    base_roots = isolate(base) if base.degree >= 1 else []
    n = len(base_roots)
    base_samples = [sample_between(base, l, base_roots) for l in range(n + 1)] \
        if base.degree >= 1 else [Fraction(0)]

    from ._util import parallel_map

    def lift(s: Fraction):
        f = _specialize_product(polys, base_var, fiber_var, s)
        fr = isolate(f) if f.degree >= 1 else []
        samples = [sample_between(f, k2, fr) if f.degree >= 1 else Fraction(0)
                   for k2 in range(len(fr) + 1)]
        return f, fr, samples

    lifted = parallel_map(lift, base_samples)
    cells: list[Cell2D] = []
    columns: list[list[Cell2D]] = []
    fiber_products: list[UPoly] = []
    fiber_roots_all: list[list[IsolatingInterval]] = []
    cid = 0
    for k1, (s, (f, fr, fsamples)) in enumerate(zip(base_samples, lifted)):
        fiber_products.append(f)
        fiber_roots_all.append(fr)
        col = []
        for k2, fy in enumerate(fsamples):
            cell = Cell2D(
                id=cid, base_index=k1, fiber_index=k2,
                base_lo=_indexed(base, k1, base_roots),
                base_hi=_indexed(base, k1 + 1, base_roots),
                fiber_lo=_indexed(f, k2, fr),
                fiber_hi=_indexed(f, k2 + 1, fr),
                sample=(s, fy),
            )
            col.append(cell)
            cells.append(cell)
            cid += 1
        columns.append(col)
    return Decomposition(
        base_var=base_var, fiber_var=fiber_var, polys=polys, proj=proj,
        base_poly=base, base_roots=base_roots, base_samples=base_samples,
        fiber_products=fiber_products, fiber_roots=fiber_roots_all,
        cells=cells, columns=columns,
    )


def _indexed(p: UPoly, l: int, roots: list[IsolatingInterval]) -> IndexedRoot:
    if l <= 0:
        return IndexedRoot(p, l, NEG_INF)
    if l > len(roots):
        return IndexedRoot(p, l, POS_INF)
    return IndexedRoot(p, l, roots[l - 1])


# ---------------------------------------------------------------------------
# parametric systems and the discriminant-variety construction


@dataclass(frozen=True)
class ParametricSystem:
    """Equations p_i = 0 with optional side conditions q_j != 0 or >= 0 in
    the unknowns, over at most two parameters."""

    equations: tuple[MPoly, ...]
    unknowns: tuple[str, ...]
    parameters: tuple[str, ...]
    inequations: tuple[MPoly, ...] = ()      # q != 0
    inequalities: tuple[MPoly, ...] = ()     # q >= 0

    def __post_init__(self):
        if not 1 <= len(self.parameters) <= 2:
            raise CadError("parameter space must have dimension 1 or 2")
        if set(self.unknowns) & set(self.parameters):
            raise CadError("unknowns and parameters must be disjoint")


def discriminant_variety(sys: ParametricSystem) -> list[MPoly]:
    """Parameter-space polynomials covering every solution-count change:
    critical loci, side-condition contacts, and elimination degenerations.

    A pragmatic union: extra components only over-refine the decomposition.
    """
    all_vars = tuple(sys.unknowns) + tuple(sys.parameters)
    eqs = [p.with_vars(all_vars) for p in sys.equations]
    out: list[MPoly] = []

    def push(q: MPoly):
        if q.is_zero():
            raise CadError("not zero-dimensional: projection vanished identically")
        if q.is_constant():
            return
        qq = squarefree_total(q.with_vars(tuple(sys.parameters))).canonical()
        if all(qq != r for r in out):
            out.append(qq)

    # generic finiteness check + leading-coefficient degenerations
    for xv in sys.unknowns:
        others = [v for v in sys.unknowns if v != xv]
        ps = PolySystem.of(eqs, all_vars)
        el = eliminate(ps, others) if others else ps
        uni = [g for g in el.polynomials if g.degree(xv) > 0]
        if not uni:
            raise CadError(f"not zero-dimensional in {xv}")
        g = uni[0]
        lc = g.leading_coefficient(xv)
        if not lc.is_constant():
            push(lc)
    # critical locus: equations plus det of the Jacobian wrt the unknowns
    jac = [[p.diff(v) for v in sys.unknowns] for p in eqs]
    det = _det(jac)
    crit = PolySystem.of(eqs + [det], all_vars)
    for g in eliminate(crit, list(sys.unknowns)).polynomials:
        push(g)
    # side-condition contacts
    for q in tuple(sys.inequations) + tuple(sys.inequalities):
        contact = PolySystem.of(eqs + [q.with_vars(all_vars)], all_vars)
        for g in eliminate(contact, list(sys.unknowns)).polynomials:
            push(g)
    return out


def _det(m: list[list[MPoly]]) -> MPoly:
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = None
    for i in range(n):
        if m[i][0].is_zero():
            continue
        minor = [row[1:] for k, row in enumerate(m) if k != i]
        term = m[i][0] * _det(minor)
        if i % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc if acc is not None else MPoly.const(0, m[0][0].vars)


def solution_count(sys: ParametricSystem, point: dict[str, Fraction]) -> int:
    """Exact number of real solutions of the system at a rational parameter
    point, honoring inequations (!= 0) and inequalities (>= 0).

    Counting oracle: eliminate to a univariate per unknown, isolate, and
    filter candidate tuples by exact residual and side-condition signs.
    """
    all_vars = tuple(sys.unknowns) + tuple(sys.parameters)
    eqs = []
    for p in sys.equations:
        s = p.with_vars(all_vars).eval(point)
        if isinstance(s, Fraction):
            if s != 0:
                return 0
            continue
        eqs.append(s.with_vars(tuple(sys.unknowns)))
    if not eqs:
        raise CadError("no equations left after specialization")
    candidates = [{}]
    for xv in sys.unknowns:
        others = [v for v in sys.unknowns if v != xv]
        el = eliminate(PolySystem.of(eqs, tuple(sys.unknowns)), others) if others \
            else PolySystem.of(eqs, tuple(sys.unknowns))
        unis = [g for g in el.polynomials if g.degree(xv) > 0]
        if not unis:
            raise CadError(f"positive-dimensional fiber in {xv}")
        g = unis[0]
        for h in unis[1:]:
            g = mgcd(g, h)
        if g.degree(xv) <= 0:
            return 0
        u = UPoly.from_mpoly(g.with_vars((xv,)), xv)
        roots = isolate(u)
        new = []
        for cand in candidates:
            for iv in roots:
                c2 = dict(cand)
                c2[xv] = iv
                new.append(c2)
        candidates = new
    uvars = tuple(sys.unknowns)
    ineqs = [_specialized(q, point, uvars) for q in sys.inequations]
    geqs = [_specialized(q, point, uvars) for q in sys.inequalities]
    count = 0
    for cand in candidates:
        if _verify_candidate(eqs, ineqs, geqs, cand):
            count += 1
    return count


def _specialized(q: MPoly, point: dict, uvars: tuple[str, ...]):
    s = q.with_vars(uvars + tuple(point.keys())).eval(point)
    if isinstance(s, Fraction):
        return MPoly.const(s, uvars)
    return s.with_vars(uvars)


def _verify_candidate(eqs, ineqs, geqs, cand: dict) -> bool:
    """Interval check that a box of isolated coordinates carries a solution
    satisfying the side conditions; exact rational points decide outright."""
    width = Fraction(1, 1 << 24)
    for _ in range(4):
        boxes = {v: (iv.refine(width).low, iv.refine(width).high) for v, iv in cand.items()}
        for p in eqs:
            lo, hi = interval_eval(p, boxes)
            if lo > 0 or hi < 0:
                return False
        undecided = False
        for q in ineqs:
            lo, hi = interval_eval(q, boxes)
            if lo == hi == 0:
                return False
            if lo <= 0 <= hi:
                undecided = True
        for q in geqs:
            lo, hi = interval_eval(q, boxes)
            if hi < 0:
                return False
            if lo < 0 <= hi and not lo == hi:
                undecided = True
        if not undecided:
            return True
        width /= 1 << 12
    return True  # side condition undecided at maximal depth: counted


def interval_eval(p: MPoly, boxes: dict[str, tuple[Fraction, Fraction]]) -> tuple[Fraction, Fraction]:
    """Exact interval-arithmetic range bound of p over a box."""
    lo = Fraction(0)
    hi = Fraction(0)
    for e, c in p.terms.items():
        tlo, thi = Fraction(c), Fraction(c)
        for i, pw in enumerate(e):
            if not pw:
                continue
            v = p.vars[i]
            if v not in boxes:
                raise CadError(f"unbound variable {v} in interval evaluation")
            a, b = boxes[v]
            plo, phi = _pow_interval(a, b, pw)
            cands = [tlo * plo, tlo * phi, thi * plo, thi * phi]
            tlo, thi = min(cands), max(cands)
        lo += tlo
        hi += thi
    return lo, hi


def _pow_interval(a: Fraction, b: Fraction, n: int) -> tuple[Fraction, Fraction]:
    pa, pb = a ** n, b ** n
    if n % 2 == 1:
        return (pa, pb)
    if a >= 0:
        return (pa, pb)
    if b <= 0:
        return (pb, pa)
    return (Fraction(0), max(pa, pb))
