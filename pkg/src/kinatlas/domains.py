"""Aspects, characteristic surfaces, basic regions, uniqueness domains,
and solution-count atlases on 2D slices.

The workspace slice (x, tphi) is decomposed against the serial reach
boundaries and the parallel-singularity curve; refining by the
characteristic surface yields basic regions, whose joint-chart images
drive the uniqueness-domain grouping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ratpoly import MPoly, UPoly, divides, exact_div, squarefree_total, mgcd
from .realroots import isolate
from .cad2d import Decomposition, decompose, interval_eval, resultant_bivar
from .adjacency import AdjacencyGraph, build_graph, components
from .mechanism import (
    MechanismParams, WorkingMode, WorkspaceSlice, JointSlice,
    slice_workspace, slice_jointspace, project_parallel_to_joint,
    dk_count_chart,
)


class DomainError(Exception):
    pass


@dataclass(frozen=True)
class RegionSet:
    """Labeled union of cells from one decomposition."""

    kind: str                      # W-aspect | Q-aspect | basic-region | ...
    label: str
    mode: WorkingMode | None
    cells: frozenset[int]
    ik_count: int | None = None
    dk_count: int | None = None
    sample: tuple[Fraction, Fraction] | None = None
    sign: int | None = None        # sign of the parallel polynomial

    def to_json(self) -> dict:
        d = {
            "label": self.label,
            "kind": self.kind,
            "mode": [self.mode.s2, self.mode.s3] if self.mode else None,
            "cells": sorted(self.cells),
        }
        if self.ik_count is not None:
            d["ik_count"] = self.ik_count
        if self.dk_count is not None:
            d["dk_count"] = self.dk_count
        if self.sample is not None:
            d["sample"] = [f"{q.numerator}/{q.denominator}" for q in self.sample]
        return d


@dataclass(frozen=True)
class CharSurface:
    polynomials: tuple[MPoly, ...]
    excluded: tuple[str, ...]


# ---------------------------------------------------------------------------
# workspace-side analysis


@dataclass
class WorkspaceAnalysis:
    """Decompositions and adjacency of one workspace slice, cached."""

    ws: WorkspaceSlice
    sc: CharSurface
    dec_sing: Decomposition        # serial + parallel only
    graph_sing: AdjacencyGraph
    dec_fine: Decomposition        # + characteristic surface
    graph_fine: AdjacencyGraph
    graph_fine_sing: AdjacencyGraph  # fine cells, singularity-only variety

    def reachable(self, dec: Decomposition, cid: int) -> bool:
        c = dec.cells[cid]
        return self.ws.ik_count(c.sample[0], c.sample[1]) > 0


def characteristic_surface(ws: WorkspaceSlice, prc: MPoly | None = None) -> CharSurface:
    """Pseudo-singularity curve: the preimage of the projected parallel
    curve under the slice joint map, with the parallel (diagonal) factor
    and chart denominators divided out."""
    if prc is None:
        prc = project_parallel_to_joint(ws)
    vs = ("x", "tphi")
    NR = ws.rho1sq_num.with_vars(vs)
    NC = ws.c3_num.with_vars(vs)
    t = MPoly.var("tphi", vs)
    op = MPoly.const(1, vs) + t * t
    l3 = ws.params.l3
    dr, dc = prc.degree("r"), prc.degree("c3")
    ir = prc.vars.index("r")
    ic = prc.vars.index("c3")
    acc = MPoly.const(0, vs)
    for e, coef in prc.terms.items():
        i, j = e[ir], e[ic]
        term = MPoly.const(coef * l3 ** (dc - j), vs)
        acc = acc + term * (NR ** i) * (NC ** j) * (op ** (dc + 2 * dr - 2 * i - j))
    if acc.is_zero():
        raise DomainError("degenerate doubling: preimage vanished identically")
    sc = acc.canonical()
    pw = ws.parallel.with_vars(vs)
    while divides(pw, sc):
        sc = exact_div(sc, pw).canonical()
    while divides(op, sc):
        sc = exact_div(sc, op).canonical()
    sc = squarefree_total(sc).canonical()
    return CharSurface((sc,), ws.excluded)


def analyze_workspace(ws: WorkspaceSlice, prc: MPoly | None = None) -> WorkspaceAnalysis:
    if prc is None:
        prc = project_parallel_to_joint(ws)
    sc = characteristic_surface(ws, prc)
    sing = [ws.serial[0], ws.serial[1], ws.parallel]
    dec_s = decompose(sing, "x", "tphi")
    g_s = build_graph(dec_s, sing)
    fine = sing + list(sc.polynomials)
    dec_f = decompose(fine, "x", "tphi")
    g_f = build_graph(dec_f, fine)
    g_fs = build_graph(dec_f, sing)
    # the half-tangent chart cuts the workspace cylinder at phi = pi; glue
    # columns back together where the cut line is off the variety
    bl_sing = _cut_blockers(ws, None)
    bl_fine = _cut_blockers(ws, sc)
    g_s = _with_wrap_edges(g_s, dec_s, bl_sing)
    g_f = _with_wrap_edges(g_f, dec_f, bl_fine)
    g_fs = _with_wrap_edges(g_fs, dec_f, bl_sing)
    return WorkspaceAnalysis(ws=ws, sc=sc, dec_sing=dec_s, graph_sing=g_s,
                             dec_fine=dec_f, graph_fine=g_f, graph_fine_sing=g_fs)


def _cut_blockers(ws: WorkspaceSlice, sc: CharSurface | None):
    """Restrictions of the variety to the cut line phi = pi, as polynomials
    in x; None means the whole cut lies on the variety closure."""
    if ws.y0 == 0:
        return None  # parallel polynomial vanishes identically on the cut
    b, l3 = ws.params.b, ws.params.l3
    x = MPoly.var("x", ("x",))
    out = [x - (b + l3), x - (b - l3)]
    if sc is not None:
        for p in sc.polynomials:
            d = p.degree("tphi")
            if d % 2 != 0:
                return None  # cut on the closure of this curve
            lc = p.leading_coefficient("tphi").with_vars(("x",))
            if lc.is_zero():
                return None
            if not lc.is_constant():
                out.append(lc)
    return out


def _with_wrap_edges(g: AdjacencyGraph, dec: Decomposition, blockers) -> AdjacencyGraph:
    if blockers is None:
        return g
    edges = set(g.edges)
    for j, col in enumerate(dec.columns):
        bot, top = col[0], col[-1]
        if bot.id == top.id:
            continue
        s = dec.base_samples[j]
        if all(q.eval({"x": s}) != 0 for q in blockers):
            edges.add((min(bot.id, top.id), max(bot.id, top.id)))
    return AdjacencyGraph(g.nodes, tuple(sorted(edges)))


def w_aspects(wa: WorkspaceAnalysis, mode: WorkingMode) -> list[RegionSet]:
    """Maximal singularity-free workspace regions for one working mode,
    grouped by the sign of the parallel polynomial."""
    dec, graph = wa.dec_sing, wa.graph_sing
    comps = components(graph)
    out = []
    idx = 1
    for comp in comps:
        rep = min(comp)
        if not wa.reachable(dec, rep):
            continue
        sgn = dec.sign_at_sample(wa.ws.parallel, rep)
        cell = dec.cells[rep]
        out.append(RegionSet(
            kind="W-aspect", label=f"WA_{mode.label}_{idx}", mode=mode,
            cells=frozenset(comp), sample=cell.sample, sign=sgn))
        idx += 1
    # group same-sign components only if they are the same connected region;
    # aspects stay per-component (maximal connected)
    return out


# ---------------------------------------------------------------------------
# joint-side analysis


@dataclass
class JointAnalysis:
    js: JointSlice
    dec: Decomposition             # (r, c3) chart arrangement
    graph: AdjacencyGraph

    def dk_at(self, ws: WorkspaceSlice, cid: int) -> int:
        c = self.dec.cells[cid]
        return dk_count_chart(c.sample[0], c.sample[1], ws)


def analyze_jointspace(js: JointSlice) -> JointAnalysis:
    polys = [js.parallel_rc] + list(js.serial_rc)
    dec = decompose(polys, "r", "c3")
    g = build_graph(dec, polys)
    return JointAnalysis(js=js, dec=dec, graph=g)


def q_aspects(ja: JointAnalysis, ws: WorkspaceSlice, mode: WorkingMode) -> list[RegionSet]:
    """Maximal singularity-free joint-chart regions: components of the
    complement carrying direct-kinematics solutions, grouped by the sign of
    the projected parallel polynomial."""
    comps = components(ja.graph)
    out = []
    idx = 1
    for comp in comps:
        rep = min(comp)
        cell = ja.dec.cells[rep]
        r, c3 = cell.sample
        if r <= 0 or abs(c3) >= 1:
            continue
        if dk_count_chart(r, c3, ws) == 0:
            continue
        sgn = ja.dec.sign_at_sample(ja.js.parallel_rc, rep)
        out.append(RegionSet(
            kind="Q-aspect", label=f"QA_{mode.label}_{idx}", mode=mode,
            cells=frozenset(comp), sample=cell.sample, sign=sgn,
            dk_count=dk_count_chart(r, c3, ws)))
        idx += 1
    return out


# ---------------------------------------------------------------------------
# basic regions, components, uniqueness domains


@dataclass(frozen=True)
class BasicRegion:
    region: RegionSet              # cells in the fine workspace decomposition
    aspect_label: str
    component_cells: frozenset[int]   # joint-chart cells its image touches
    samples: tuple[tuple[Fraction, Fraction], ...]


def basic_regions(wa: WorkspaceAnalysis, ja: JointAnalysis,
                  aspects: list[RegionSet], mode: WorkingMode,
                  samples_per_region: int = 20) -> list[BasicRegion]:
    """Connected pieces of each aspect after refining by the characteristic
    surface, with their joint-chart image components."""
    dec, graph = wa.dec_fine, wa.graph_fine
    comps = components(graph)
    # map fine components into aspects by the parallel sign + reachability
    out: list[BasicRegion] = []
    counters: dict[str, int] = {}
    for comp in comps:
        rep = min(comp)
        if not wa.reachable(dec, rep):
            continue
        sgn = dec.sign_at_sample(wa.ws.parallel, rep)
        owner = None
        for a in aspects:
            if a.sign == sgn and _fine_inside_aspect(wa, dec.cells[rep].sample, a):
                owner = a
                break
        if owner is None:
            continue
        k = counters.get(owner.label, 0) + 1
        counters[owner.label] = k
        cells = sorted(comp)
        samples = []
        step = max(1, len(cells) // samples_per_region)
        for cid in cells[::step]:
            samples.append(dec.cells[cid].sample)
        image_cells = set()
        for s in samples:
            r, c3 = wa.ws.chart_image(s[0], s[1])
            loc = ja.dec.locate(r, c3)
            if loc is not None:
                image_cells.add(loc)
        label = f"WAb_{mode.label}_{owner.label.rsplit('_', 1)[1]}_{k}"
        rs = RegionSet(kind="basic-region", label=label, mode=mode,
                       cells=frozenset(comp), sample=dec.cells[rep].sample, sign=sgn)
        out.append(BasicRegion(region=rs, aspect_label=owner.label,
                               component_cells=frozenset(image_cells),
                               samples=tuple(samples)))
    return out


def _fine_inside_aspect(wa: WorkspaceAnalysis, sample, aspect: RegionSet) -> bool:
    """Locate a fine-decomposition sample inside the singularity-only
    decomposition and test aspect membership."""
    loc = wa.dec_sing.locate(sample[0], sample[1])
    return loc is not None and loc in aspect.cells


def basic_components(basics: list[BasicRegion], mode: WorkingMode) -> list[RegionSet]:
    out = []
    for i, b in enumerate(basics, 1):
        out.append(RegionSet(
            kind="basic-component", label=f"QAb_{mode.label}_{i}", mode=mode,
            cells=b.component_cells, sample=None, sign=None))
    return out


def uniqueness_domains(wa: WorkspaceAnalysis, basics: list[BasicRegion],
                       mode: WorkingMode) -> list[RegionSet]:
    """Maximal unions of adjacent basic regions whose joint images are
    pairwise disjoint (decided by joint-chart cell components)."""
    n = len(basics)
    # adjacency between basic regions: cells adjacent once the characteristic
    # surface is ignored (variety = singularities only on the fine cells)
    edge = [[False] * n for _ in range(n)]
    cell_owner: dict[int, int] = {}
    for i, b in enumerate(basics):
        for cid in b.region.cells:
            cell_owner[cid] = i
    for a, bz in wa.graph_fine_sing.edges:
        ia, ib = cell_owner.get(a), cell_owner.get(bz)
        if ia is None or ib is None or ia == ib:
            continue
        edge[ia][ib] = edge[ib][ia] = True

    disjoint = [[basics[i].component_cells.isdisjoint(basics[j].component_cells)
                 for j in range(n)] for i in range(n)]
    # greedy maximal unions: grow from each region, largest-first determinism
    domains: list[set[int]] = []
    for seed in range(n):
        group = {seed}
        changed = True
        while changed:
            changed = False
            for j in range(n):
                if j in group:
                    continue
                if not any(edge[i][j] for i in group):
                    continue
                if all(disjoint[i][j] for i in group):
                    group.add(j)
                    changed = True
        if group not in domains:
            domains.append(group)
    # keep maximal groups only
    maximal = [g for g in domains if not any(g < h for h in domains)]
    out = []
    seen = set()
    for k, g in enumerate(sorted(maximal, key=lambda s: sorted(s)), 1):
        key = frozenset(g)
        if key in seen:
            continue
        seen.add(key)
        cells = frozenset().union(*(basics[i].region.cells for i in g))
        out.append(RegionSet(
            kind="uniqueness-domain", label=f"Wu_{mode.label}_{k}", mode=mode,
            cells=cells, sample=basics[min(g)].region.sample))
    return out


# ---------------------------------------------------------------------------
# count atlas and cusps


def count_atlas(wa: WorkspaceAnalysis, ja: JointAnalysis | None = None) -> list[RegionSet]:
    """Connected regions of the refined slice with IK and DK counts;
    unreachable regions carry zero counts."""
    dec, graph = wa.dec_fine, wa.graph_fine
    comps = components(graph)
    out = []
    idx = 1
    for comp in comps:
        rep = min(comp)
        cell = dec.cells[rep]
        x, t = cell.sample
        ik = wa.ws.ik_count(x, t)
        if ik > 0:
            r, c3 = wa.ws.chart_image(x, t)
            dk = dk_count_chart(r, c3, wa.ws)
        else:
            dk = 0
        out.append(RegionSet(
            kind="count-region", label=f"R_{idx}", mode=None,
            cells=frozenset(comp), ik_count=ik, dk_count=dk, sample=cell.sample,
            sign=dec.sign_at_sample(wa.ws.parallel, rep)))
        idx += 1
    return out


@dataclass(frozen=True)
class CuspPoint:
    r_box: tuple[Fraction, Fraction]
    u_box: tuple[Fraction, Fraction]
    kind: str = "cusp"             # cusp | node | isolated

    def center(self) -> tuple[float, float]:
        return (float((self.r_box[0] + self.r_box[1]) / 2),
                float((self.u_box[0] + self.u_box[1]) / 2))

    def to_json(self) -> dict:
        f = lambda q: f"{q.numerator}/{q.denominator}"
        return {"r": [f(self.r_box[0]), f(self.r_box[1])],
                "u": [f(self.u_box[0]), f(self.u_box[1])],
                "kind": self.kind,
                "rho1": (float(self.r_box[0]) ** 0.5 + float(self.r_box[1]) ** 0.5) / 2}


def cusp_points(js: JointSlice, width: Fraction = Fraction(1, 1 << 40)) -> list[CuspPoint]:
    """Singular points of the projected parallel curve in the (r, u) chart,
    by bivariate elimination, isolation, and interval-verified pairing."""
    P = js.parallel_ru.with_vars(("r", "u"))
    Pr = P.diff("r")
    Pu = P.diff("u")
    if Pr.is_zero() or Pu.is_zero():
        raise DomainError("non-isolated singular locus")
    R1 = _pair_eliminant(P, Pr, "u", "r")
    R2 = _pair_eliminant(P, Pu, "u", "r")
    gr = mgcd(R1, R2)
    S1 = _pair_eliminant(P, Pr, "r", "u")
    S2 = _pair_eliminant(P, Pu, "r", "u")
    gu = mgcd(S1, S2)
    if gr.is_zero() or gu.is_zero():
        raise DomainError("non-isolated singular locus")
    if gr.is_constant() or gu.is_constant():
        return []
    rroots = isolate(UPoly.from_mpoly(gr.with_vars(("r",)), "r"))
    uroots = isolate(UPoly.from_mpoly(gu.with_vars(("u",)), "u"))
    hess = P.diff("r").diff("r") * P.diff("u").diff("u") - P.diff("r").diff("u") ** 2
    out = []
    for ri in rroots:
        for ui in uroots:
            a = ri.refine(width)
            b = ui.refine(width)
            box = {"r": (a.low - width, a.high + width),
                   "u": (b.low - width, b.high + width)}
            ok = True
            for q in (P, Pr, Pu):
                lo, hi = interval_eval(q, box)
                if lo > 0 or hi < 0:
                    ok = False
                    break
            if not ok:
                continue
            # classify: transversal crossings (nodes) and isolated points have
            # a Hessian determinant of decided sign; cusps are degenerate
            lo, hi = interval_eval(hess, box)
            if hi < 0:
                kind = "node"
            elif lo > 0:
                kind = "isolated"
            else:
                kind = "cusp"
            out.append(CuspPoint((a.low, a.high), (b.low, b.high), kind))
    return out


def _pair_eliminant(f: MPoly, g: MPoly, elim: str, keep: str) -> MPoly:
    """Polynomial in `keep` whose zero set contains the projection of the
    common roots of {f, g}; degenerate elim-degrees handled directly."""
    df, dg = f.degree(elim), g.degree(elim)
    if df > 0 and dg > 0:
        return resultant_bivar(f, g, elim, keep)
    side = g if dg == 0 else f
    if side.is_constant():
        return MPoly.const(1, (keep,)) if not side.is_zero() else MPoly.const(0, (keep,))
    return side.with_vars((keep,))


def cusps_only(points: list[CuspPoint]) -> list[CuspPoint]:
    return [p for p in points if p.kind == "cusp"]


# ---------------------------------------------------------------------------
# full-slice orchestration


@dataclass
class SliceAtlas:
    """Everything the CLI and trajectory verdicts need for one slice.

    The cell geometry is working-mode independent for this mechanism (the
    parallel curve and the joint chart do not depend on the branch signs);
    per-mode data differs only in labels and in the IK map itself.
    """

    params: MechanismParams
    y0: Fraction
    mode: WorkingMode
    ws: WorkspaceSlice
    prc: MPoly
    wa: WorkspaceAnalysis
    js: "JointSlice"
    ja: JointAnalysis
    aspects: list[RegionSet]
    qaspects: list[RegionSet]
    basics: list[BasicRegion]
    domains: list[RegionSet]
    atlas: list[RegionSet]
    singular_points: list[CuspPoint]

    @staticmethod
    def build(params: MechanismParams, y0: Fraction,
              mode: WorkingMode) -> "SliceAtlas":
        ws = slice_workspace(y0, mode.s2, params)
        prc = project_parallel_to_joint(ws)
        wa = analyze_workspace(ws, prc)
        js = slice_jointspace(mode.s2, params, y0 / params.l2)
        ja = analyze_jointspace(js)
        aspects = w_aspects(wa, mode)
        qaspects = q_aspects(ja, ws, mode)
        basics = basic_regions(wa, ja, aspects, mode)
        uds = uniqueness_domains(wa, basics, mode)
        atlas = count_atlas(wa, ja)
        sing = cusp_points(js)
        return SliceAtlas(params=params, y0=y0, mode=mode, ws=ws, prc=prc,
                          wa=wa, js=js, ja=ja, aspects=aspects, qaspects=qaspects,
                          basics=basics, domains=uds, atlas=atlas,
                          singular_points=sing)

    @property
    def cusps(self) -> list[CuspPoint]:
        return cusps_only(self.singular_points)

    def locate_basic(self, x: Fraction, t: Fraction) -> BasicRegion | None:
        cid = self.wa.dec_fine.locate(Fraction(x), Fraction(t))
        if cid is None:
            return None
        for b in self.basics:
            if cid in b.region.cells:
                return b
        return None

    def domains_containing(self, basic: BasicRegion) -> list[str]:
        out = []
        for d in self.domains:
            if basic.region.cells <= d.cells:
                out.append(d.label)
        return out

    def classify_endpoints(self, p0: tuple[Fraction, Fraction],
                           p1: tuple[Fraction, Fraction]):
        """(start basic, end basic, same_domain, assembly_mode_changed,
        start label, end label) for two slice points given as (x, tphi)."""
        b0 = self.locate_basic(*p0)
        b1 = self.locate_basic(*p1)
        if b0 is None or b1 is None:
            raise DomainError("trajectory endpoint on a boundary or outside the atlas")
        d0 = self.domains_containing(b0)
        d1 = self.domains_containing(b1)
        same = b0 is b1 or any(lab in d1 for lab in d0)
        if same:
            changed = False
        else:
            changed = not b0.component_cells.isdisjoint(b1.component_cells)
        lab0 = d0[0] if d0 else b0.region.label
        lab1 = d1[0] if d1 else b1.region.label
        return b0, b1, same, changed, lab0, lab1
