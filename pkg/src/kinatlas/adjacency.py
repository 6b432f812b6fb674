"""Connectivity of open CAD cells in the complement of a curve set.

Horizontally adjacent cells are joined when their fiber intervals overlap
near the shared base root and the witness segment misses every variety
polynomial; vertically stacked cells are joined when the separating fiber
root belongs only to spurious projection factors.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .ratpoly import MPoly, UPoly
from .realroots import (
    NEG_INF, POS_INF, IsolatingInterval, isolate, count_roots, segment_crosses,
    _sign_at,
)
from .cad2d import Decomposition, _specialize_product


class AdjacencyError(Exception):
    pass


@dataclass(frozen=True)
class AdjacencyGraph:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def neighbors(self, i: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [list(e) for e in self.edges],
            "components": [sorted(c) for c in components(self)],
        }


def components(g: AdjacencyGraph) -> list[set[int]]:
    """Connected components, sorted by smallest member id."""
    parent = {n: n for n in g.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in g.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, set[int]] = {}
    for n in g.nodes:
        groups.setdefault(find(n), set()).add(n)
    return sorted(groups.values(), key=min)


# ---------------------------------------------------------------------------
# algebraic fiber bounds: IsolatingInterval values or +-inf sentinels


@functools.lru_cache(maxsize=256)
def _gcd_cached(p: UPoly, q: UPoly) -> UPoly:
    return p.gcd(q)


def _cmp_bounds(a, b, max_iter: int = 200) -> int:
    if a == NEG_INF:
        return 0 if b == NEG_INF else -1
    if b == NEG_INF:
        return 1
    if a == POS_INF:
        return 0 if b == POS_INF else 1
    if b == POS_INF:
        return -1
    x, y = a, b
    for it in range(max_iter):
        if x.high < y.low:
            return -1
        if y.high < x.low:
            return 1
        if x.is_exact() and y.is_exact():
            return 0 if x.low == y.low else (-1 if x.low < y.low else 1)
        # refine a few rounds before paying for the shared-root check
        if it >= 6:
            g = _gcd_cached(x.polynomial, y.polynomial)
            if g.degree >= 1:
                lo = max(x.low, y.low)
                hi = min(x.high, y.high)
                if lo <= hi:
                    n = (count_roots(g, lo, hi) if lo < hi else 0) + (1 if g(lo) == 0 else 0)
                    if n >= 1:
                        # a common root inside both isolating intervals is
                        # the isolated root of each side
                        return 0
        if not x.is_exact():
            x = x.refine(x.width() / 2)
        if not y.is_exact():
            y = y.refine(y.width() / 2)
    raise AdjacencyError("could not order algebraic bounds")


def _rational_between(lo, hi) -> Fraction:
    """A rational strictly between two bounds (intervals or sentinels)."""
    if lo == NEG_INF and hi == POS_INF:
        return Fraction(0)
    if lo == NEG_INF:
        return Fraction(math.floor(hi.low) - 1)
    if hi == POS_INF:
        return Fraction(math.floor(lo.high) + 1)
    a, b = lo, hi
    for _ in range(200):
        if a.high < b.low:
            return (a.high + b.low) / 2
        if not a.is_exact():
            a = a.refine(a.width() / 2)
        if not b.is_exact():
            b = b.refine(b.width() / 2)
        if a.is_exact() and b.is_exact():
            if a.low < b.low:
                return (a.low + b.low) / 2
            raise AdjacencyError("empty gap between bounds")
    raise AdjacencyError("could not separate bounds")


def _overlaps(lo, hi) -> bool:
    if lo == NEG_INF or hi == POS_INF:
        return True
    if lo == POS_INF or hi == NEG_INF:
        return False
    return _cmp_bounds(lo, hi) < 0


def _roots_at(dec: Decomposition, w: Fraction, expect: int) -> list[IsolatingInterval]:
    f = _specialize_product(dec.polys, dec.base_var, dec.fiber_var, w)
    roots = isolate(f) if f.degree >= 1 else []
    if len(roots) != expect:
        raise AdjacencyError(
            f"delineability violated at witness {w}: {len(roots)} roots vs {expect}")
    return roots


def _bound_pair(roots: list[IsolatingInterval], k: int):
    lo = roots[k - 1] if k >= 1 else NEG_INF
    hi = roots[k] if k < len(roots) else POS_INF
    return lo, hi


def _witnesses(dec: Decomposition, j: int, shrink: int = 1 << 10) -> tuple[Fraction, Fraction]:
    """Rational abscissae hugging base root j from both sides.

    The fiber-overlap criterion is valid only for witnesses close enough to
    the boundary, so the isolating interval is refined well below the gap
    to its neighbours; `shrink` controls how far below.
    """
    roots = dec.base_roots
    r = roots[j]
    left_gap = (r.low - roots[j - 1].high) if j > 0 else Fraction(1)
    right_gap = (roots[j + 1].low - r.high) if j + 1 < len(roots) else Fraction(1)
    gap = min(left_gap, right_gap, Fraction(1))
    if not r.is_exact():
        r = r.refine(gap / shrink)
        if not r.is_exact():
            return r.low, r.high
    v = r.low
    ints = dec.base_poly.int_cleared()
    d = gap / shrink
    while True:
        if _sign_at(ints, v - d) != 0 and _sign_at(ints, v + d) != 0:
            return v - d, v + d
        d /= 2


def build_graph(dec: Decomposition, variety: list[MPoly]) -> AdjacencyGraph:
    """Undirected graph joining cells in one connected component of the
    complement of the variety."""
    vs = (dec.base_var, dec.fiber_var)
    vpolys = [p.with_vars(vs) for p in variety]
    edges: set[tuple[int, int]] = set()

    def add(a: int, b: int):
        edges.add((min(a, b), max(a, b)))

    # vertical: stacked cells in one column, blocked only by a variety root
    for k1, col in enumerate(dec.columns):
        s = dec.base_samples[k1]
        for low_cell, high_cell in zip(col, col[1:]):
            a = low_cell.sample[1]
            b = high_cell.sample[1]
            blocked = False
            for v in vpolys:
                sv = v.eval({dec.base_var: s})
                if isinstance(sv, Fraction):
                    continue
                u = UPoly.from_mpoly(sv.with_vars((dec.fiber_var,)), dec.fiber_var)
                if u.degree < 1:
                    continue
                if count_roots(u, a, b) > 0:
                    blocked = True
                    break
            if not blocked:
                add(low_cell.id, high_cell.id)

    # horizontal: cells across each base root; witnesses escalate toward the
    # boundary because fiber overlap is a limit criterion in e
    for j in range(len(dec.base_roots)):
        left, right = dec.columns[j], dec.columns[j + 1]
        pending = {(c1.id, c2.id) for c1 in left for c2 in right}
        for shrink in (1 << 10, 1 << 22, 1 << 40):
            if not pending:
                break
            w1, w2 = _witnesses(dec, j, shrink)
            roots1 = _roots_at(dec, w1, len(dec.fiber_roots[j]))
            roots2 = _roots_at(dec, w2, len(dec.fiber_roots[j + 1]))
            for c1 in left:
                lo1, hi1 = _bound_pair(roots1, c1.fiber_index)
                for c2 in right:
                    if (c1.id, c2.id) not in pending:
                        continue
                    lo2, hi2 = _bound_pair(roots2, c2.fiber_index)
                    lo = lo1 if _cmp_bounds(lo1, lo2) >= 0 else lo2
                    hi = hi1 if _cmp_bounds(hi1, hi2) <= 0 else hi2
                    if not _overlaps(lo, hi):
                        continue
                    pending.discard((c1.id, c2.id))
                    c = _rational_between(lo, hi)
                    if not segment_crosses(vpolys, (w1, c), (w2, c)):
                        add(c1.id, c2.id)

    nodes = tuple(c.id for c in dec.cells)
    return AdjacencyGraph(nodes, tuple(sorted(edges)))
