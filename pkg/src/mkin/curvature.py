"""Busemann sine and curvature, the inflection geometry of a rolling motion, and
numerical checks of the Euler–Savary relations.

Every limit is taken on symmetric stencils at h, h/2, h/4 and extrapolated
with Richardson's scheme; the observed convergence order of the raw
estimates is reported next to each value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, least_squares

from .curves import ParamCurve, cross
from .errors import (DomainViolation, NoRoot, NonSmoothBall, OnInflectionCurve,
                     PoleCoincidence, TranslativeMotion, ZeroVector)
from .kinematics import RollingMotion, circle_on_circle, motion_transform
from .numerics import observed_order, richardson

H_DEFAULT = 1e-2


def busemann_sine(ctx, a_dir, b_dir) -> float:
    """sm(a, b) = sigma(T) * Euclidean area of the parallelogram on Minkowski-unit segments."""
    a = np.asarray(a_dir, dtype=float)
    b = np.asarray(b_dir, dtype=float)
    na, nb = float(ctx.norm(a)), float(ctx.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("sine of a zero direction")
    return ctx.sigma_plane() * abs(float(cross(a, b))) / (na * nb)


@dataclass
class LimitEstimate:
    value: float
    estimates: list
    order: float
    h: float


def _chord_curvature(point, ctx, s: float, h: float, signed: bool) -> float:
    x0, x1, x2 = point(s - h), point(s), point(s + h)
    a, b = x1 - x0, x2 - x1
    sm = busemann_sine(ctx, a, b)
    if signed and cross(a, b) < 0:
        sm = -sm
    return 2.0 * sm / float(ctx.norm(x2 - x0))


def curvature_limit(point, ctx, s: float, h: float = H_DEFAULT, signed: bool = False,
                    levels: int = 3) -> LimitEstimate:
    """Busemann chord-sine curvature of the curve ``point`` at s with extrapolation."""
    hs = [h / 2 ** k for k in range(levels)]
    ests = [_chord_curvature(point, ctx, s, hk, signed) for hk in hs]
    order = observed_order(ests) if levels >= 3 else math.nan
    return LimitEstimate(richardson(ests, order=2), ests, order, h)


def busemann_curvature_limit(c: ParamCurve, ctx, s: float, h: float = H_DEFAULT,
                             signed: bool = False) -> float:
    lo, hi = c.domain
    if not c.closed and (s - h < lo or s + h > hi):
        raise DomainViolation("stencil leaves the curve domain")
    return curvature_limit(c, ctx, s, h, signed).value


@dataclass
class CurvatureSample:
    point: np.ndarray
    chi_limit: float
    chi_formula: float
    chi_euclidean: float
    sigma_t: float
    sigma_T: float


def busemann_curvature_formula(c: ParamCurve, ctx, s: float, h: float = H_DEFAULT) -> CurvatureSample:
    """chi = sigma(T) / sigma(t)^3 * Euclidean curvature, cross-filled with the limit route."""
    kE = float(c.euclidean_curvature(s))
    st = float(ctx.sigma_line(c.derivative(s)))
    sT = ctx.sigma_plane()
    chi = sT / st ** 3 * kE
    lim = busemann_curvature_limit(c, ctx, s, h, signed=True)
    return CurvatureSample(np.asarray(c(s)), lim, chi, kE, st, sT)


def q_derivative_check(c: ParamCurve, ctx, s: float, h: float) -> float:
    """Residual of the difference quotient of Q along c against Q(Q(c)) / sigma(t_c)."""
    if not ctx.smooth:
        raise NonSmoothBall("the Q derivative needs a smooth ball")
    xp, xm, x = c(s + h), c(s - h), c(s)
    dq = (ctx.q_normal(xp) - ctx.q_normal(xm)) / float(ctx.norm(xp - xm))
    q2 = ctx.q_normal(ctx.q_normal(x))
    target = q2 / float(ctx.sigma_line(c.derivative(s)))
    return float(ctx.norm(dq - target) / ctx.norm(q2))


# --------------------------------------------------------------------------
# inflection geometry

@dataclass
class PoleData:
    K: np.ndarray
    v_K: np.ndarray
    phi_dot: float
    sigma_tK: float
    c: np.ndarray  # (1/sigma(t_K)) Q(v_K / phi_dot)

    @property
    def L(self) -> np.ndarray:
        return self.K - self.c


def pole_data(m: RollingMotion, ctx) -> PoleData:
    K = m.fixed(0.0)
    v = m.fixed.derivative(0.0)
    w = m.phi_dot(0.0)
    if abs(w) <= 1e-10:
        raise TranslativeMotion("phi'(0) vanishes")
    st = float(ctx.sigma_line(v))
    return PoleData(K, v, w, st, ctx.q_normal(v / w) / st)


def _LP(ctx, pd: PoleData, P):
    KP = np.asarray(P, dtype=float) - pd.K
    q1 = ctx.q_normal(KP)
    return -(ctx.q_normal(q1) / float(ctx.sigma_line(q1)) - pd.c)


def inflection_pole_field(m: RollingMotion, ctx, P) -> np.ndarray:
    """L(P) = P - LP; equals the inflection pole K - c in the Euclidean plane for every P."""
    pd = pole_data(m, ctx)
    P = np.asarray(P, dtype=float)
    if float(ctx.norm(P - pd.K)) == 0.0:
        return pd.L
    return P - _LP(ctx, pd, P)


def inflection_pole(m: RollingMotion, ctx) -> np.ndarray:
    return pole_data(m, ctx).L


def _membership(ctx, pd: PoleData, P) -> float:
    """[LP, KP]: zero when KP is Birkhoff orthogonal to LP."""
    return ctx.semi_inner(_LP(ctx, pd, P), np.asarray(P) - pd.K)


def inflection_root(ctx, pd: PoleData, u, t_max: float = 1e3) -> float:
    """Signed t with K + t u on the inflection curve (u normalized to Minkowski length 1)."""
    u = np.asarray(u, dtype=float)
    u = u / float(ctx.norm(u))
    # along the line LP(K + t u) is affine in t, so g(t) = grad N(u) . LP is too
    gN = ctx.norm_grad(u)
    def g(t):
        # LP tends to c as P -> K
        return float(gN @ (pd.c if t == 0.0 else _LP(ctx, pd, pd.K + t * u)))

    g0, g1 = g(0.0), g(1.0)
    slope = g1 - g0
    if slope == 0.0:
        raise NoRoot("membership function is constant along this line")
    guess = -g0 / slope
    span = max(1.0, 2.0 * abs(guess))
    if span > t_max:
        raise NoRoot("inflection root beyond the search range")
    return brentq(g, guess - span, guess + span, xtol=1e-15, rtol=4 * np.finfo(float).eps)


@dataclass
class InflectionCurve:
    K: np.ndarray
    L: np.ndarray
    directions: np.ndarray
    points: np.ndarray  # nan rows mark gaps
    gaps: list
    return_points: np.ndarray

    @property
    def locus(self) -> np.ndarray:
        return self.points[~np.isnan(self.points[:, 0])]

    def membership_residuals(self, ctx, m: RollingMotion) -> np.ndarray:
        pd = pole_data(m, ctx)
        out = []
        for P in self.locus:
            LP, KP = _LP(ctx, pd, P), P - pd.K
            out.append(abs(ctx.semi_inner(LP, KP)) / (ctx.norm(LP) * ctx.norm(KP)))
        return np.array(out)


def inflection_curve(m: RollingMotion, ctx, fan_size: int = 256) -> InflectionCurve:
    """Positive roots along a fan of rays from K; rays without one are recorded as gaps."""
    if not (ctx.smooth and ctx.strictly_convex):
        raise NonSmoothBall("the inflection curve needs a smooth strictly convex ball")
    pd = pole_data(m, ctx)
    ang = (np.arange(fan_size) + 0.5) * 2.0 * math.pi / fan_size
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    pts = np.full((fan_size, 2), np.nan)
    gaps = []
    for i, d in enumerate(dirs):
        try:
            u = d / float(ctx.norm(d))
            t = inflection_root(ctx, pd, u)
        except NoRoot:
            gaps.append(i)
            continue
        if t > 1e-12:
            pts[i] = pd.K + t * u
        else:
            gaps.append(i)
    ret = 2.0 * pd.K - pts
    return InflectionCurve(pd.K, pd.L, dirs, pts, gaps, ret)


def starlike_fan_test(curve: InflectionCurve, n_rays: int = 720) -> bool:
    """Every ray from K crosses the closed locus polygon at most once."""
    ok = ~np.isnan(curve.points[:, 0])
    n = len(ok)
    # walk the fan cyclically starting just after a gap so the roots stay in order
    start = next((i for i in range(n) if ok[i] and not ok[i - 1]), 0)
    order = [(start + k) % n for k in range(n) if ok[(start + k) % n]]
    P = curve.points[order] - curve.K
    # the locus closes through K itself
    ring = np.vstack([np.zeros(2), P, np.zeros(2)])
    a, b = ring[:-1], ring[1:]
    ang = (np.arange(n_rays) + 0.37) * 2.0 * math.pi / n_rays
    for th in ang:
        d = np.array([math.cos(th), math.sin(th)])
        ca, cb = cross(d, a), cross(d, b)
        hit = (ca < 0) & (cb > 0) | (ca > 0) & (cb < 0)
        w = ca / np.where(ca - cb == 0, 1.0, ca - cb)
        pt = a + (b - a) * w[:, None]
        if np.sum(hit & (pt @ d > 1e-12)) > 1:
            return False
    return True


def minkowski_circle_spread(ctx, pts) -> tuple[float, np.ndarray, float]:
    """Best-fit Minkowski circle: (relative radial spread, center, radius)."""
    pts = np.asarray(pts, dtype=float)
    z0 = pts.mean(axis=0)

    def res(v):
        r = ctx.norm(pts - v[:2]) - v[2]
        return r

    r0 = float(np.mean(ctx.norm(pts - z0)))
    sol = least_squares(res, np.r_[z0, r0], xtol=1e-14, ftol=1e-14)
    d = ctx.norm(pts - sol.x[:2])
    return float((d.max() - d.min()) / sol.x[2]), sol.x[:2], float(sol.x[2])


# --------------------------------------------------------------------------
# Euler–Savary checks

@dataclass
class FirstESResult:
    P: np.ndarray
    KP: float
    KI: float
    KO: float
    chi: float
    O: np.ndarray
    I: np.ndarray
    residual_first: float
    residual_directed: float
    order: float
    estimates: list


def _line_coord(ctx, K, u, X) -> float:
    """Signed Minkowski coordinate of X on the line K + t u (u of norm 1)."""
    d = np.asarray(X) - K
    t = float(ctx.norm(d))
    return t if d @ u >= 0 else -t


def es_first(m: RollingMotion, ctx, P, h: float = H_DEFAULT) -> FirstESResult:
    """Check ||O_P P|| = KP^2 / ||I_P P|| and 1/KP - 1/KO_P = 1/KI_P at s = 0."""
    pd = pole_data(m, ctx)
    P = np.asarray(P, dtype=float)
    KPv = P - pd.K
    KP = float(ctx.norm(KPv))
    if KP <= 1e-12:
        raise PoleCoincidence("P coincides with the instantaneous pole")
    u = KPv / KP
    KI = inflection_root(ctx, pd, u)
    if abs(KI - KP) <= 1e-9 * KP:
        raise OnInflectionCurve("P lies on the inflection curve")
    roul = lambda s: motion_transform(m, s, P)
    est = curvature_limit(roul, ctx, 0.0, h)
    chi = est.value
    if abs(chi) <= 1e-12:
        raise OnInflectionCurve("roulette curvature vanishes at P")
    # side of the curvature center from the second-order deviation of the path
    hh = h / 4
    dev = 0.5 * (roul(hh) + roul(-hh)) - roul(0.0)
    tang = roul(hh) - roul(-hh)
    basis = np.column_stack([u, tang])
    a, _ = np.linalg.solve(basis, dev)
    O = P + (1.0 / chi) * (u if a > 0 else -u)
    KO = _line_coord(ctx, pd.K, u, O)
    I = pd.K + KI * u
    IP = float(ctx.norm(P - I))
    OP = float(ctx.norm(P - O))
    rhs = KP ** 2 / IP
    r1 = abs(OP - rhs) / rhs
    r2 = abs(1.0 / KP - 1.0 / KO - 1.0 / KI) / abs(1.0 / KI)
    return FirstESResult(P, KP, KI, KO, chi, O, I, r1, r2, est.order, est.estimates)


@dataclass
class SecondESResult:
    chi_fixed: float
    chi_moving: float
    lhs: float
    rhs: float
    alpha_K: float
    sigma_tK: float
    sigma_TK: float
    residual: float
    order: float


def _turn_rate(m: RollingMotion, h: float) -> float:
    """d psi / ds, psi the Euclidean angle carrying the moving tangent to the fixed one."""
    def psi(s):
        a, b = m.moving.derivative(s), m.fixed.derivative(s)
        return math.atan2(float(cross(a, b)), float(a @ b))

    ests = [(psi(k) - psi(-k)) / (2 * k) for k in (h, h / 2, h / 4)]
    return richardson(ests, order=2)


def es_second(m: RollingMotion, ctx, h: float = H_DEFAULT) -> SecondESResult:
    """chi_fixed - chi_moving against sigma(T_K) / sigma(t_K)^2 / alpha_K at K."""
    if not ctx.smooth:
        raise NonSmoothBall("Euler–Savary checks need a smooth ball")
    w = m.phi_dot(0.0)
    if abs(w) <= 1e-10:
        raise TranslativeMotion("phi'(0) vanishes")
    ef = curvature_limit(m.fixed, ctx, 0.0, h, signed=True)
    em = curvature_limit(m.moving, ctx, 0.0, h, signed=True)
    rate = _turn_rate(m, h)
    alpha = 1.0 / abs(rate)
    st = float(ctx.sigma_line(m.fixed.derivative(0.0)))
    sT = ctx.sigma_plane()
    lhs = ef.value - em.value
    rhs = math.copysign(sT / st ** 2 / alpha, rate)
    res = abs(lhs - rhs) / abs(rhs)
    diffs = [a - b for a, b in zip(ef.estimates, em.estimates)]
    return SecondESResult(ef.value, em.value, lhs, rhs, alpha, st, sT, res, observed_order(diffs))


@dataclass
class CombinedRow:
    P: np.ndarray
    lhs: float
    middle: float
    rhs: float
    residual: float


@dataclass
class CombinedResult:
    scale: float
    rows: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(r.residual for r in self.rows)


def combined_rows(m: RollingMotion, ctx, points, h: float = H_DEFAULT) -> list:
    """Both sides of the combined relation for each tracked point P.

    Absolute values are compared because the two sides carry different sign
    conventions for phi'.  Points on the inflection curve are skipped.
    """
    pd = pole_data(m, ctx)
    sec = es_second(m, ctx, h)
    st = pd.sigma_tK
    gKL = pd.L - pd.K
    middle = abs(pd.phi_dot * sec.lhs)
    rhs = abs(pd.phi_dot) / (st ** 2 * sec.alpha_K)
    rows = []
    for P in points:
        P = np.asarray(P, dtype=float)
        try:
            r = es_first(m, ctx, P, h)
        except OnInflectionCurve:
            continue
        gKP = P - pd.K
        lhs = abs((1.0 / r.KP - 1.0 / r.KO) * busemann_sine(ctx, gKP, pd.v_K)
                  * ctx.sigma_line(gKP) ** 2 / (st ** 2 * ctx.sigma_line(gKL)))
        res = max(abs(lhs - middle), abs(lhs - rhs)) / rhs
        rows.append(CombinedRow(P, float(lhs), float(middle), float(rhs), float(res)))
    return rows


def fan_points(ctx, K, n: int = 16, dist: float = 0.3) -> np.ndarray:
    """n points at Minkowski distance ``dist`` from K on an offset fan of directions."""
    ang = (np.arange(n) + 0.5) * 2.0 * math.pi / n
    d = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    return np.asarray(K) + dist * d / ctx.norm(d)[:, None]


def unit_area_scale(ctx) -> float:
    """Factor lam with sigma(T) = 1 for the ball lam * B."""
    return math.sqrt(math.pi / ctx.area)


def es_combined(ctx, radius: float = 1.0, ratio: float = 0.5, angle: float = 0.4,
                fan: int = 16, dist: float = 0.3, h: float = H_DEFAULT) -> CombinedResult:
    """Combined relation for circle-on-circle rolling after rescaling the ball to sigma(T) = 1."""
    lam = unit_area_scale(ctx)
    sctx = ctx.scaled(lam)
    m = circle_on_circle(sctx, radius, ratio, angle)
    out = CombinedResult(lam)
    out.rows = combined_rows(m, sctx, fan_points(sctx, m.fixed(0.0), fan, dist), h)
    return out


__all__ = ["CurvatureSample", "CombinedResult", "FirstESResult", "InflectionCurve", "LimitEstimate",
           "PoleData", "SecondESResult", "combined_rows", "fan_points", "unit_area_scale", "busemann_curvature_formula", "busemann_curvature_limit",
           "busemann_sine", "curvature_limit", "es_combined", "es_first", "es_second",
           "inflection_curve", "inflection_pole", "inflection_pole_field", "inflection_root",
           "minkowski_circle_spread", "pole_data", "q_derivative_check", "starlike_fan_test"]
