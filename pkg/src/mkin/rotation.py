"""Angle measures on starlike carriers and the general rotations they induce.

A measure is a cumulative integral of a nonnegative density along the
carrier's parameter, normalized so that the full carrier has measure 2*pi.
A rotation by theta moves the radial point of a ray forward by measure
theta and keeps the homothety factor of the original point, so it fixes the
center, maps rays to rays and every homothet of the carrier into itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curves import StarlikeCurve, cross, polyline
from .errors import CenterPoint, DegenerateDensity, MeasureMismatch, ZeroVector
from .numerics import CumulativeIntegral

TWO_PI = 2.0 * math.pi


class AngleMeasure:
    """Normalized angle measure on a starlike carrier.

    ``kind`` is ``"arclen"`` (Minkowski speed of the carrier, needs ``ctx``),
    ``"area"`` (sector area swept from the center) or ``"density"`` with a
    callable weight on the carrier parameter.
    """

    def __init__(self, carrier: StarlikeCurve, kind: str = "arclen", ctx=None,
                 density=None, m: int = 4096):
        self.carrier = carrier
        self.kind = kind
        self.ctx = ctx
        base = carrier.base
        p = carrier.center
        if kind == "arclen":
            if ctx is None:
                raise ValueError("arc-length measure needs a plane context")
            rho = lambda t: ctx.norm(base.derivative(t))
        elif kind == "area":
            rho = lambda t: 0.5 * cross(base(t) - p, base.derivative(t))
        elif kind == "density":
            if density is None:
                raise ValueError("density measure needs a weight function")
            rho = density
        else:
            raise ValueError(f"unknown measure kind {kind!r}")
        self.density = rho
        knots = base.knots(m)
        if len(base.breaks) == len(knots):
            # polygonal carriers: the breaks are the vertices already
            knots = np.asarray(base.breaks, dtype=float)
        self.cdf_raw = CumulativeIntegral(rho, knots, periodic=True)
        self.total_raw = self.cdf_raw.total
        if not self.total_raw > 0:
            raise DegenerateDensity("measure has zero total mass")
        self.t_start = base.domain[0]

    @property
    def center(self):
        return self.carrier.center

    def cdf(self, t):
        """Normalized measure of the carrier arc from its start to parameter t."""
        return TWO_PI * (self.cdf_raw(t) - self.cdf_raw(self.t_start)) / self.total_raw

    def param_at(self, value):
        """Carrier parameter where the normalized cdf reaches ``value``."""
        raw = np.asarray(value, dtype=float) * self.total_raw / TWO_PI + self.cdf_raw(self.t_start)
        return self.cdf_raw.inverse(raw)

    def to_raw(self, theta):
        return np.asarray(theta, dtype=float) * self.total_raw / TWO_PI

    def same_as(self, other: "AngleMeasure") -> bool:
        return self is other or (self.carrier is other.carrier and self.kind == other.kind
                                 and self.ctx is other.ctx and self.density is other.density)


def make_measure(carrier: StarlikeCurve, kind: str = "arclen", ctx=None, density=None) -> AngleMeasure:
    return AngleMeasure(carrier, kind, ctx, density)


def unit_circle_measure(ctx) -> AngleMeasure:
    """Normalized Minkowski arc-length measure on the unit circle about the origin."""
    cached = getattr(ctx, "_unit_measure", None)
    if cached is None:
        cached = AngleMeasure(StarlikeCurve(ctx.unit_circle, (0.0, 0.0)), "arclen", ctx)
        ctx._unit_measure = cached
    return cached


def load_density(path, carrier: StarlikeCurve):
    """Piecewise-linear weight from ``t w`` pairs, extended periodically."""
    rows = []
    for raw in Path(path).read_text().splitlines():
        s = raw.split("#", 1)[0].strip()
        if s:
            rows.append([float(v) for v in s.replace(",", " ").split()])
    arr = np.asarray(rows, dtype=float)
    lo, hi = carrier.base.domain
    ts, ws = arr[:, 0], arr[:, 1]

    def w(t):
        return np.interp(np.mod(np.asarray(t) - lo, hi - lo) + lo, ts, ws, period=hi - lo)

    return w


@dataclass
class BrassReport:
    total_ok: bool
    symmetric: bool
    atomless: bool
    total: float
    max_asymmetry: float
    max_cell: float

    def all_ok(self) -> bool:
        return self.total_ok and self.symmetric and self.atomless


def brass_check(m: AngleMeasure, n: int = 1024, tol: float = 1e-8) -> BrassReport:
    """Total 2*pi, antipodal symmetry and absence of atoms on an n-ray fan."""
    lo, hi = m.carrier.base.domain
    total = float(m.cdf(hi) - m.cdf(lo))
    total_ok = abs(total - TWO_PI) <= 1e-9
    ang = np.linspace(0.0, TWO_PI, n + 1)[:-1]
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    nxt = np.roll(dirs, -1, axis=0)
    inc = angle_between(m, dirs, nxt)
    inc_opp = angle_between(m, -dirs, -nxt)
    asym = float(np.max(np.abs(inc - inc_opp)))
    max_cell = float(np.max(inc))
    # an atom would show as a cell holding a fixed positive fraction of the mass
    atomless = max_cell <= 64.0 * TWO_PI / n
    return BrassReport(total_ok, asym <= tol, atomless, total, asym, max_cell)


def angle_between(m: AngleMeasure, r1, r2):
    """Measure of the counterclockwise carrier arc from ray r1 to ray r2, in [0, 2 pi)."""
    t1 = m.carrier.param_of_direction(r1)
    t2 = m.carrier.param_of_direction(r2)
    a = m.cdf(t2) - m.cdf(t1)
    out = np.mod(a, TWO_PI)
    out = np.where(np.abs(out - TWO_PI) < 1e-12, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class GeneralRotation:
    measure: AngleMeasure
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(np.mod(self.theta, TWO_PI)))

    @property
    def center(self):
        return self.measure.center

    def __call__(self, q):
        return rotate(self, q)

    def inverse(self) -> "GeneralRotation":
        return GeneralRotation(self.measure, -self.theta)


def rotate(rot: GeneralRotation, q):
    """Apply rot to one point (shape (2,)) or a stack of points (shape (n, 2))."""
    m = rot.measure
    p = m.center
    q = np.asarray(q, dtype=float)
    single = q.ndim == 1
    qq = np.atleast_2d(q)
    d = qq - p
    at_center = np.hypot(d[:, 0], d[:, 1]) == 0
    d_safe = np.where(at_center[:, None], np.array([1.0, 0.0]), d)
    base = m.carrier.base
    t = np.atleast_1d(m.carrier.param_of_direction(d_safe))
    rp = base(t)
    alpha = np.hypot(*d_safe.T) / np.hypot(*(rp - p).T)
    raw = m.cdf_raw(t) + m.to_raw(rot.theta)
    t2 = np.atleast_1d(m.cdf_raw.inverse(raw))
    out = p + alpha[:, None] * (base(t2) - p)
    out = np.where(at_center[:, None], p, out)
    return out[0] if single else out


def compose(r1: GeneralRotation, r2: GeneralRotation) -> GeneralRotation:
    if not r1.measure.same_as(r2.measure):
        raise MeasureMismatch("rotations belong to different classes")
    return GeneralRotation(r1.measure, r1.theta + r2.theta)


def to_polar(m: AngleMeasure, ctx, q0, q) -> tuple[float, float]:
    """(||q - p||, measure from the ray through q0 to the ray through q)."""
    p = m.center
    d = np.asarray(q, dtype=float) - p
    if not np.any(d):
        raise CenterPoint("the center has no polar angle")
    d0 = np.asarray(q0, dtype=float) - p
    if not np.any(d0):
        raise ZeroVector("reference point coincides with the center")
    return float(ctx.norm(d)), float(angle_between(m, d0, d))


def from_polar(m: AngleMeasure, ctx, q0, radius: float, angle: float) -> np.ndarray:
    p = m.center
    d0 = np.asarray(q0, dtype=float) - p
    t0 = m.carrier.param_of_direction(d0)
    t = m.param_at(m.cdf(t0) + angle)
    b = m.carrier.base(t) - p
    return p + radius * b / float(ctx.norm(b))


def motion_apply(rot: GeneralRotation, anchor, x):
    """t_{p,anchor} o rot o t_{anchor,p}: the rotation transported to ``anchor``."""
    p = rot.center
    a = np.asarray(anchor, dtype=float)
    x = np.asarray(x, dtype=float)
    return rotate(rot, x - a + p) - p + a


__all__ = ["AngleMeasure", "GeneralRotation", "BrassReport", "angle_between", "brass_check",
           "compose", "from_polar", "load_density", "make_measure", "motion_apply", "rotate",
           "to_polar", "unit_circle_measure", "polyline"]
