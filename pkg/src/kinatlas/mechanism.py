"""RPR-2PRR mechanism model.

Constraint equations over cosine/sine symbols, reduced Jacobians,
singularity polynomials, closed-form inverse kinematics, exact direct
kinematics, and the 2D workspace / joint-space slices with half-tangent
rationalization.

Symbol conventions: pose (x, y, phi) with phi carried as (cphi, sphi) or
as the half-tangent tphi; passive angles as (c2, s2) and (c3, s3); joints
(rho1, rho2, rho3).  The slice planes are (x, tphi) on the workspace side
and (r, c3) / (r, u) on the joint side, where r = rho1^2 and
u = tan(alpha3/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .ratpoly import (
    MPoly, UPoly,
    exact_div, resultant, squarefree_total,
)
from .groebner import PolySystem
from . import realroots


class KinematicsError(Exception):
    """Serial singularity or unreachable pose; names the failing leg."""

    def __init__(self, msg: str, leg: int | None = None):
        super().__init__(msg)
        self.leg = leg


@dataclass(frozen=True)
class MechanismParams:
    l2: Fraction = Fraction(3)
    l3: Fraction = Fraction(3)
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("l2", "l3", "a", "b"):
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @staticmethod
    def from_json(d: dict) -> "MechanismParams":
        if d.get("type", "RPR-2PRR") != "RPR-2PRR":
            raise ValueError(f"unsupported mechanism type {d.get('type')!r}")
        kw = {k: Fraction(d[k]) for k in ("l2", "l3", "a", "b") if k in d}
        return MechanismParams(**kw)

    def to_json(self) -> dict:
        return {"type": "RPR-2PRR", "l2": str(self.l2), "l3": str(self.l3),
                "a": str(self.a), "b": str(self.b)}


@dataclass(frozen=True)
class WorkingMode:
    """Sign vector (s2, s3) = (sign cos alpha2, sign sin alpha3)."""

    s2: int
    s3: int

    def __post_init__(self):
        if self.s2 not in (-1, 1) or self.s3 not in (-1, 1):
            raise ValueError("mode signs must be +1 or -1")

    @property
    def label(self) -> str:
        return ("p" if self.s2 > 0 else "m") + ("p" if self.s3 > 0 else "m")

    @staticmethod
    def all_modes() -> list["WorkingMode"]:
        return [WorkingMode(s2, s3) for s2 in (1, -1) for s3 in (1, -1)]

    @staticmethod
    def from_label(lab: str) -> "WorkingMode":
        signs = {"p": 1, "m": -1}
        return WorkingMode(signs[lab[0]], signs[lab[1]])


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    phi: float


@dataclass(frozen=True)
class JointValues:
    rho1: float
    rho2: float
    rho3: float


@dataclass(frozen=True)
class PassiveAngles:
    alpha2: float
    alpha3: float


# symbol space for the trigonometric form
CS_VARS = ("x", "y", "cphi", "sphi", "c2", "s2", "c3", "s3", "rho1", "rho2", "rho3")


def _v(name: str) -> MPoly:
    return MPoly.var(name, CS_VARS)


def _c(val) -> MPoly:
    return MPoly.const(val, CS_VARS)


def constraints_trig(params: MechanismParams) -> list[MPoly]:
    """The five constraint polynomials over cosine/sine symbols."""
    x, y = _v("x"), _v("y")
    cph, sph = _v("cphi"), _v("sphi")
    c2, s2, c3, s3 = _v("c2"), _v("s2"), _v("c3"), _v("s3")
    r1, r2, r3 = _v("rho1"), _v("rho2"), _v("rho3")
    l2, l3, a, b = params.l2, params.l3, params.a, params.b
    return [
        r2 + l2 * c2 - x,
        l2 * s2 - y,
        (x - a * cph) ** 2 + (y - a * sph) ** 2 - r1 * r1,
        l3 * c3 - b * cph - x,
        r3 + l3 * s3 - b * sph - y,
    ]


def rationalize(p: MPoly, angles: dict[str, tuple[str, str, str]]) -> tuple[MPoly, list[str]]:
    """Weierstrass substitution per angle.

    `angles` maps an angle name to its (cos symbol, sin symbol, half-tangent
    symbol); returns the denominator-cleared polynomial and the list of
    excluded angle values (theta = pi per substituted angle).
    """
    out = p
    excluded = []
    for name, (cs, ss, ts) in angles.items():
        if cs not in out.vars and ss not in out.vars:
            continue
        d = max((e[out.vars.index(cs)] if cs in out.vars else 0)
                + (e[out.vars.index(ss)] if ss in out.vars else 0)
                for e in out.terms) if out.terms else 0
        if d == 0:
            out = out.with_vars(tuple(v for v in out.vars if v not in (cs, ss)))
            continue
        new_vars = tuple(v for v in out.vars if v not in (cs, ss)) + (ts,)
        acc = MPoly.const(0, new_vars)
        t = MPoly.var(ts, new_vars)
        one_p = MPoly.const(1, new_vars) + t * t      # 1 + t^2
        one_m = MPoly.const(1, new_vars) - t * t      # 1 - t^2
        two_t = 2 * t
        ic = out.vars.index(cs) if cs in out.vars else None
        isn = out.vars.index(ss) if ss in out.vars else None
        for e, coef in out.terms.items():
            i = e[ic] if ic is not None else 0
            j = e[isn] if isn is not None else 0
            rest = {tuple((0 if k in (ic, isn) else ee) for k, ee in enumerate(e)): coef}
            base = MPoly(out.vars, rest).with_vars(new_vars)
            term = base * (one_m ** i) * (two_t ** j) * (one_p ** (d - i - j))
            acc = acc + term
        out = acc
        excluded.append(f"{name}=pi")
    return out, excluded


PHI_ANGLE = {"phi": ("cphi", "sphi", "tphi")}
ALL_ANGLES = {"phi": ("cphi", "sphi", "tphi"),
              "alpha2": ("c2", "s2", "t2"),
              "alpha3": ("c3", "s3", "t3")}


def constraints(params: MechanismParams) -> PolySystem:
    """Eq-system with every angle rationalized to its half-tangent."""
    polys = []
    for p in constraints_trig(params):
        q, _ = rationalize(p, ALL_ANGLES)
        polys.append(q)
    vs = ("x", "y", "tphi", "t2", "t3", "rho1", "rho2", "rho3")
    return PolySystem.of(polys, vs)


def custom_constraints(config: dict) -> PolySystem:
    """Raw constraint polynomials from a config record.

    Expects `constraints` in the textual polynomial format plus declared
    `pose`, `joints`, and `passive` symbol lists.
    """
    from .ratpoly import parse_poly
    pose = tuple(config.get("pose", ()))
    joints = tuple(config.get("joints", ()))
    passive = tuple(config.get("passive", ()))
    vs = pose + passive + joints
    if not vs:
        raise ValueError("custom mechanism needs declared symbol lists")
    polys = [parse_poly(s, vs) for s in config["constraints"]]
    return PolySystem.of(polys, vs)


def residuals(pose: Pose, joints: JointValues, passives: PassiveAngles,
              params: MechanismParams) -> list[float]:
    point = {
        "x": pose.x, "y": pose.y,
        "cphi": math.cos(pose.phi), "sphi": math.sin(pose.phi),
        "c2": math.cos(passives.alpha2), "s2": math.sin(passives.alpha2),
        "c3": math.cos(passives.alpha3), "s3": math.sin(passives.alpha3),
        "rho1": joints.rho1, "rho2": joints.rho2, "rho3": joints.rho3,
    }
    return [p.eval_float(point) for p in constraints_trig(params)]


# ---------------------------------------------------------------------------
# Jacobians and singularity polynomials


def jacobians(params: MechanismParams) -> tuple[list[list[MPoly]], list[list[MPoly]]]:
    """Reduced 3x3 (A, B): A wrt the pose, B wrt the actuated joints.

    Rows: leg 1 distance equation, leg 2 and leg 3 chains with the passive
    angle rates eliminated and rows scaled by l2, l3 to clear denominators.
    """
    x, y = _v("x"), _v("y")
    cph, sph = _v("cphi"), _v("sphi")
    c2, s2, c3, s3 = _v("c2"), _v("s2"), _v("c3"), _v("s3")
    r1 = _v("rho1")
    l2, l3, a, b = params.l2, params.l3, params.a, params.b
    zero = _c(0)
    A = [
        [x - a * cph, y - a * sph, a * (x * sph - y * cph)],
        [-l2 * c2, -l2 * s2, zero],
        [-l3 * c3, -l3 * s3, b * l3 * (sph * c3 - cph * s3)],
    ]
    B = [
        [-r1, zero, zero],
        [zero, l2 * c2, zero],
        [zero, zero, l3 * s3],
    ]
    return A, B


def det3(m: list[list[MPoly]]) -> MPoly:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def serial_singularity(params: MechanismParams) -> MPoly:
    """det B: the product rho1 * l2 cos(a2) * l3 sin(a3) up to sign."""
    _, B = jacobians(params)
    return det3(B)


def parallel_singularity(params: MechanismParams) -> MPoly:
    """Parallel-singularity polynomial in (x, y, cphi, sphi).

    det A depends on the inverse-kinematic branch through (c2, s3); the
    branch-sign-invariant part (summed over the four branches) factors as
    y * (x + b cphi) times a pose-only polynomial, which is the polynomial
    whose zero set the downstream atlas uses.  The spurious cofactor is
    divided out exactly.
    """
    A, _ = jacobians(params)
    d = det3(A)
    ic2 = d.vars.index("c2")
    is3 = d.vars.index("s3")
    even = MPoly(d.vars, {e: c for e, c in d.terms.items() if e[ic2] == 0 and e[is3] == 0})
    x, y = _v("x"), _v("y")
    cph = _v("cphi")
    sub = even.eval({
        "s2": (Fraction(1) / params.l2) * y,
        "c3": (Fraction(1) / params.l3) * (x + params.b * cph),
    })
    if isinstance(sub, Fraction):
        raise KinematicsError("degenerate jacobian structure")
    cof = y * (x + params.b * cph)
    sp = exact_div(sub.with_vars(cof.vars), cof)
    return sp.canonical()


# ---------------------------------------------------------------------------
# closed-form kinematics


def _mode_of(passives: PassiveAngles) -> WorkingMode:
    s2 = 1 if math.cos(passives.alpha2) >= 0 else -1
    s3 = 1 if math.sin(passives.alpha3) >= 0 else -1
    return WorkingMode(s2, s3)


def inverse_kinematics(pose: Pose, mode: WorkingMode,
                       params: MechanismParams) -> tuple[JointValues, PassiveAngles]:
    l2, l3, a, b = (float(params.l2), float(params.l3), float(params.a), float(params.b))
    x, y, phi = pose.x, pose.y, pose.phi
    if abs(y) >= l2:
        raise KinematicsError(f"leg 2 serial singularity / out of reach: |y|={abs(y)} >= l2", leg=2)
    c3 = (b * math.cos(phi) + x) / l3
    if abs(c3) >= 1.0:
        raise KinematicsError(f"leg 3 serial singularity / out of reach: |cos(alpha3)|={abs(c3)} >= 1", leg=3)
    dx = x - a * math.cos(phi)
    dy = y - a * math.sin(phi)
    if dx == 0.0 and dy == 0.0:
        raise KinematicsError("leg 1 serial singularity: rho1 = 0", leg=1)
    alpha2 = math.asin(y / l2)
    if mode.s2 < 0:
        alpha2 = math.pi - alpha2
    rho2 = x - l2 * math.cos(alpha2)
    rho1 = math.hypot(dx, dy)
    alpha3 = mode.s3 * math.acos(c3)
    rho3 = b * math.sin(phi) + y - l3 * math.sin(alpha3)
    return JointValues(rho1, rho2, rho3), PassiveAngles(alpha2, alpha3)


def direct_kinematics(q: JointValues, params: MechanismParams,
                      tol: float = 1e-9) -> list[tuple[Pose, PassiveAngles]]:
    """All real solutions of the constraint system for fixed joints.

    Eliminates (x, y) linearly between the three distance equations,
    isolates the half-tangent roots exactly, and back-substitutes.
    Poses with phi = pi are outside the half-tangent chart.
    """
    r1, r2, r3 = Fraction(q.rho1), Fraction(q.rho2), Fraction(q.rho3)
    P = _dk_univariate(r1, r2, r3, params)
    if P is None:
        raise KinematicsError("degenerate input: direct kinematics eliminant vanishes")
    poly, xnum, ynum, den = P
    if poly.degree < 1:
        return []
    sols = []
    for iv in realroots.isolate(poly):
        t = iv.refine(Fraction(1, 1 << 80)).midpoint()
        tf = float(t)
        d = den.eval_float({"t": tf})
        if abs(d) < 1e-14:
            continue
        xf = xnum.eval_float({"t": tf}) / d
        yf = ynum.eval_float({"t": tf}) / d
        phi = 2.0 * math.atan(tf)
        l2, l3 = float(params.l2), float(params.l3)
        b = float(params.b)
        s2v = yf / l2
        c2v = (xf - float(r2)) / l2
        c3v = (xf + b * math.cos(phi)) / l3
        s3v = (yf + b * math.sin(phi) - float(r3)) / l3
        alpha2 = math.atan2(s2v, c2v)
        alpha3 = math.atan2(s3v, c3v)
        pose = Pose(xf, yf, phi)
        pa = PassiveAngles(alpha2, alpha3)
        res = residuals(pose, JointValues(float(r1), float(r2), float(r3)), pa, params)
        if max(abs(v) for v in res) < tol:
            sols.append((pose, pa))
    # merge near-duplicates, sort canonically
    merged: list[tuple[Pose, PassiveAngles]] = []
    for s in sols:
        dup = False
        for m in merged:
            if (abs(s[0].x - m[0].x) < 1e-7 and abs(s[0].y - m[0].y) < 1e-7
                    and abs(s[0].phi - m[0].phi) < 1e-7):
                dup = True
                break
        if not dup:
            merged.append(s)
    merged.sort(key=lambda s: (s[0].x, s[0].y, s[0].phi))
    return merged


def _dk_univariate(r1: Fraction, r2: Fraction, r3: Fraction, params: MechanismParams):
    """Half-tangent eliminant for the direct kinematics.

    Returns (P(t), xnum, ynum, den) with x = xnum/den, y = ynum/den on
    solutions, or None when the eliminant vanishes identically.
    """
    vs = ("x", "y", "t")
    x = MPoly.var("x", vs)
    y = MPoly.var("y", vs)
    t = MPoly.var("t", vs)
    one = MPoly.const(1, vs)
    l2, l3, a, b = params.l2, params.l3, params.a, params.b
    op = one + t * t
    om = one - t * t
    tt = 2 * t
    # distance equations cleared by (1+t^2)^2 where needed
    g1 = (x * op - a * om) ** 2 + (y * op - a * tt) ** 2 - (r1 * r1) * op * op
    g2 = (x - r2) ** 2 + y * y - l2 * l2
    g3 = (x * op + b * om) ** 2 + (y * op + b * tt - r3 * op) ** 2 - l3 * l3 * op * op
    lin1 = g1 - g2 * op * op
    lin2 = g3 - g2 * op * op
    # both linear in x and y
    a11 = lin1.diff("x"); a12 = lin1.diff("y")
    a21 = lin2.diff("x"); a22 = lin2.diff("y")
    b1 = -lin1.eval({"x": 0, "y": 0})
    b2 = -lin2.eval({"x": 0, "y": 0})
    den = (a11 * a22 - a12 * a21)
    xnum = (b1 * a22 - b2 * a12)
    ynum = (a11 * b2 - a21 * b1)
    # substitute into g2 and clear den^2
    expr = (xnum - r2 * den) ** 2 + ynum * ynum - l2 * l2 * den * den
    for vname in ("x", "y"):
        if expr.degree(vname) > 0:
            raise KinematicsError("internal: elimination left pose variables")
    u = expr.with_vars(("t",))
    if u.is_zero():
        return None
    poly = UPoly.from_mpoly(u, "t").squarefree()
    dent = den.with_vars(("t",)) if den.degree("x") <= 0 and den.degree("y") <= 0 else None
    return (poly,
            xnum.with_vars(("t",)) if not xnum.is_zero() else MPoly.const(0, ("t",)),
            ynum.with_vars(("t",)) if not ynum.is_zero() else MPoly.const(0, ("t",)),
            dent)


# ---------------------------------------------------------------------------
# slices


@dataclass(frozen=True)
class WorkspaceSlice:
    """Workspace section y = y0 in coordinates (x, tphi)."""

    y0: Fraction
    s2sign: int
    params: MechanismParams
    c2_sq: Fraction
    system: PolySystem            # Eq system with c2 symbolic, c2^2 pinned
    serial: tuple[MPoly, MPoly]   # leg-3 reach boundaries in (x, tphi)
    parallel: MPoly               # parallel-singularity curve in (x, tphi)
    rho1sq_num: MPoly             # (x,tphi)-numerator of rho1^2 (denominator (1+t^2)^2)
    c3_num: MPoly                 # numerator of cos(alpha3) (denominator l3 (1+t^2))
    excluded: tuple[str, ...]

    def chart_image(self, x: Fraction, t: Fraction) -> tuple[Fraction, Fraction]:
        """Exact (r, c3) joint-chart image of a rational slice point."""
        op = 1 + t * t
        r = self.rho1sq_num.eval({"x": x, "tphi": t}) / op ** 2
        c3 = self.c3_num.eval({"x": x, "tphi": t}) / (self.params.l3 * op)
        return r, c3

    def ik_count(self, x: Fraction, t: Fraction) -> int:
        r, c3 = self.chart_image(x, t)
        if r == 0 or abs(c3) >= 1:
            return 0
        return 4


def slice_workspace(y0: Fraction, s2sign: int, params: MechanismParams) -> WorkspaceSlice:
    y0 = Fraction(y0)
    if abs(y0) >= params.l2:
        raise KinematicsError(f"slice on leg 2 serial singularity: |y0| >= l2", leg=2)
    if s2sign not in (1, -1):
        raise ValueError("s2sign must be +1 or -1")
    c2sq = 1 - (y0 / params.l2) ** 2
    l3, a, b = params.l3, params.a, params.b
    vs = ("x", "tphi")
    x = MPoly.var("x", vs)
    t = MPoly.var("tphi", vs)
    one = MPoly.const(1, vs)
    op = one + t * t
    om = one - t * t
    tt = 2 * t
    ser_out = (x - l3) * op + b * om
    ser_in = (x + l3) * op + b * om
    sp = parallel_singularity(params).eval({"y": y0})
    if isinstance(sp, Fraction):
        sp = MPoly.const(sp, ("x", "cphi", "sphi"))
    spr, _ = rationalize(sp, PHI_ANGLE)
    par = spr.with_vars(vs).canonical()
    rho1sq = (x * op - a * om) ** 2 + (y0 * op - a * tt) ** 2
    c3num = x * op + b * om
    # constraint system at the slice, alpha2 branch kept symbolic via c2
    sys_vs = ("x", "tphi", "t3", "c2", "rho1", "rho2", "rho3")
    X = MPoly.var("x", sys_vs); T = MPoly.var("tphi", sys_vs)
    T3 = MPoly.var("t3", sys_vs); C2 = MPoly.var("c2", sys_vs)
    R1 = MPoly.var("rho1", sys_vs); R2 = MPoly.var("rho2", sys_vs); R3 = MPoly.var("rho3", sys_vs)
    ONE = MPoly.const(1, sys_vs)
    OPT = ONE + T * T; OMT = ONE - T * T
    OP3 = ONE + T3 * T3; OM3 = ONE - T3 * T3
    eqs = [
        R2 + params.l2 * C2 - X,
        (X * OPT - a * OMT) ** 2 + (y0 * OPT - a * 2 * T) ** 2 - R1 * R1 * OPT * OPT,
        l3 * OM3 * OPT - b * OMT * OP3 - X * OPT * OP3,
        (R3 * OP3 + l3 * 2 * T3) * OPT - (b * 2 * T + y0 * OPT) * OP3,
        C2 * C2 - c2sq,
    ]
    system = PolySystem.of(eqs, sys_vs)
    return WorkspaceSlice(
        y0=y0, s2sign=s2sign, params=params, c2_sq=c2sq, system=system,
        serial=(ser_out.canonical(), ser_in.canonical()), parallel=par,
        rho1sq_num=rho1sq,
        c3_num=c3num, excluded=("phi=pi",),
    )


@dataclass(frozen=True)
class JointSlice:
    """Joint-space section for a fixed alpha2 branch.

    Charts: (r, c3) with r = rho1^2 (rational-friendly, one working mode's
    alpha3 branch) and (r, u) with u = tan(alpha3/2) (faithful to the
    (rho1, alpha3) picture, both branches).
    """

    y0: Fraction
    s2sign: int
    params: MechanismParams
    c2_sq: Fraction
    parallel_rc: MPoly     # curve in (r, c3)
    parallel_ru: MPoly     # curve in (r, u)
    serial_rc: tuple[MPoly, ...]
    serial_ru: tuple[MPoly, ...]
    excluded: tuple[str, ...]

    @property
    def system(self) -> PolySystem:
        return PolySystem.of([self.parallel_ru] + list(self.serial_ru), ("r", "u"))


def slice_jointspace(s2sign: int, params: MechanismParams,
                     sin_alpha2: Fraction = Fraction(1, 6)) -> JointSlice:
    y0 = Fraction(sin_alpha2) * params.l2
    ws = slice_workspace(y0, s2sign, params)
    prc = project_parallel_to_joint(ws)
    vs = ("r", "u")
    r = MPoly.var("r", vs)
    u = MPoly.var("u", vs)
    one = MPoly.const(1, vs)
    opu = one + u * u
    omu = one - u * u
    d3 = prc.degree("c3")
    pru = MPoly.const(0, vs)
    for k, coef in enumerate(prc.coeffs_in("c3")):
        if coef.is_zero():
            continue
        pru = pru + coef.with_vars(vs) * (omu ** k) * (opu ** (d3 - k))
    pru = squarefree_total(pru.canonical())
    c3v = MPoly.var("c3", ("r", "c3"))
    rv = MPoly.var("r", ("r", "c3"))
    one_rc = MPoly.const(1, ("r", "c3"))
    return JointSlice(
        y0=y0, s2sign=s2sign, params=params, c2_sq=ws.c2_sq,
        parallel_rc=prc, parallel_ru=pru,
        serial_rc=(rv, one_rc - c3v, one_rc + c3v),
        serial_ru=(r, u),
        excluded=("alpha3=pi", "phi=pi"),
    )


def project_parallel_to_joint(ws: WorkspaceSlice) -> MPoly:
    """Eliminate the pose from {leg-1 distance, leg-3 cosine, parallel
    singularity} on the slice: the projected curve in (r, c3), r = rho1^2.

    x is removed by the linear leg-3 relation, tphi by a resultant; known
    spurious factors (chart denominators, leading-coefficient artifacts)
    are stripped afterwards.
    """
    params = ws.params
    y0 = ws.y0
    l3, a, b = params.l3, params.a, params.b
    vs = ("tphi", "r", "c3")
    t = MPoly.var("tphi", vs)
    r = MPoly.var("r", vs)
    c3 = MPoly.var("c3", vs)
    one = MPoly.const(1, vs)
    op = one + t * t
    om = one - t * t
    xn = l3 * c3 * op - b * om           # x = xn / op
    e1 = (xn - a * om) ** 2 + (y0 * op - a * 2 * t) ** 2 - r * op * op
    sp = ws.parallel.with_vars(("x",) + vs)
    # substitute x -> xn/op and clear op^deg_x
    dx = sp.degree("x")
    acc = MPoly.const(0, vs)
    for k, coef in enumerate(sp.coeffs_in("x")):
        if coef.is_zero():
            continue
        acc = acc + coef.with_vars(vs) * (xn ** k) * (op ** (dx - k))
    e2 = acc
    res = resultant(e1.with_vars(("x",) + vs), e2, "tphi")
    res = res.with_vars(("r", "c3"))
    res = _strip_known_factors(res, ["r", "c3"])
    return squarefree_total(res).with_vars(("r", "c3")).canonical()


def _strip_known_factors(p: MPoly, keep_vars: list[str]) -> MPoly:
    """Remove content and spurious univariate factors introduced by
    projection (powers of chart denominators and constants)."""
    out = p.canonical()
    for v in keep_vars:
        prim, _cont = out.primitive_and_content_in(v)
        out = prim
    return out.canonical()


def dk_count_chart(r: Fraction, c3: Fraction, ws: WorkspaceSlice) -> int:
    """Exact number of slice poses with the given (rho1^2, cos alpha3)."""
    params = ws.params
    l3, a, b = params.l3, params.a, params.b
    y0 = ws.y0
    t = MPoly.var("t")
    one = MPoly.const(1, ("t",))
    op = one + t * t
    om = one - t * t
    xn = l3 * c3 * op - b * om
    e = (xn - a * om) ** 2 + (y0 * op - a * 2 * t) ** 2 - r * op * op
    if e.is_zero():
        return 0
    u = UPoly.from_mpoly(e.with_vars(("t",)), "t")
    if u.degree < 1:
        return 0
    return len(realroots.isolate(u))
