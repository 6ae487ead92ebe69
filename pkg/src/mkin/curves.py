"""Planar parametric curves, Minkowski arc length and starlike carriers.

Curves are vectorized: evaluating at an array of parameters of shape ``(n,)``
returns points of shape ``(n, 2)``.  Anything that needs a norm takes the
plane context as an explicit argument, so this module does not depend on
:mod:`mkin.plane`.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import (BadParams, DomainViolation, IrregularCurve, NoIntersection,
                     NotStarlike, ZeroVector)
from .numerics import CumulativeIntegral, bisect_sign

TWO_PI = 2.0 * math.pi


def vec(x, y) -> np.ndarray:
    return np.array([x, y], dtype=float)


def cross(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def perp(a):
    """Counterclockwise quarter turn."""
    a = np.asarray(a, dtype=float)
    return np.stack([-a[..., 1], a[..., 0]], axis=-1)


class ParamCurve:
    """A parametric planar curve t -> (x, y) on a closed interval.

    ``deriv`` and ``deriv2`` are optional analytic derivatives; central
    differences with step ``fd_step`` (relative to the parameter span) are
    used otherwise.  ``breaks`` lists parameters where the derivative may be
    discontinuous.  ``polar`` optionally carries ``(center, fn)`` where
    ``fn`` maps ray directions from ``center`` straight to parameters.
    """

    def __init__(self, func: Callable, deriv: Callable | None = None,
                 domain: tuple[float, float] = (0.0, 1.0), closed: bool = False,
                 breaks: Sequence[float] = (), deriv2: Callable | None = None,
                 polar=None, name: str = "curve", fd_step: float = 1e-6):
        self._func = func
        self._deriv = deriv
        self._deriv2 = deriv2
        self.domain = (float(domain[0]), float(domain[1]))
        if not self.domain[1] > self.domain[0]:
            raise BadParams("empty curve domain")
        self.closed = closed
        lo, hi = self.domain
        self.breaks = tuple(sorted({float(b) for b in breaks if lo <= b <= hi}))
        self.polar = polar
        self.name = name
        self.h_fd = fd_step * (hi - lo)
        self._tables: dict = {}

    @property
    def period(self) -> float:
        return self.domain[1] - self.domain[0]

    def _wrap(self, t):
        t = np.asarray(t, dtype=float)
        if self.closed:
            lo = self.domain[0]
            return lo + np.mod(t - lo, self.period)
        return t

    def __call__(self, t):
        return np.asarray(self._func(self._wrap(t)), dtype=float)

    point = __call__

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self._deriv is not None:
            return np.asarray(self._deriv(self._wrap(t)), dtype=float)
        h = self.h_fd
        return (self(t + h) - self(t - h)) / (2.0 * h)

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self._deriv2 is not None:
            return np.asarray(self._deriv2(self._wrap(t)), dtype=float)
        h = max(self.h_fd, 1e-4 * self.period)
        d = lambda k: (self.derivative(t + k) - self.derivative(t - k)) / (2.0 * k)
        # one Richardson step lifts the central difference to fourth order
        return (4.0 * d(h / 2) - d(h)) / 3.0

    def euclidean_curvature(self, t):
        d1 = self.derivative(t)
        d2 = self.second_derivative(t)
        sp = np.hypot(d1[..., 0], d1[..., 1])
        return cross(d1, d2) / sp ** 3

    def knots(self, m: int = 2048) -> np.ndarray:
        lo, hi = self.domain
        grid = np.linspace(lo, hi, m + 1)
        k = np.union1d(grid, np.asarray(self.breaks, dtype=float))
        # drop near-duplicates created by breaks sitting next to grid points
        keep = np.concatenate([[True], np.diff(k) > 1e-12 * (hi - lo)])
        k = k[keep]
        k[-1] = hi
        return k

    def arclen_table(self, ctx, m: int = 2048) -> CumulativeIntegral:
        """Cumulative Minkowski arc length over the parameter domain."""
        key = (id(ctx), m)
        tab = self._tables.get(key)
        if tab is None:
            tab = CumulativeIntegral(lambda t: ctx.norm(self.derivative(t)),
                                     self.knots(m), periodic=self.closed)
            self._tables[key] = (ctx, tab)
            return tab
        return tab[1]

    def check_domain(self, t):
        if self.closed:
            return
        t = np.asarray(t, dtype=float)
        lo, hi = self.domain
        slack = 1e-12 * (hi - lo)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise DomainViolation(f"parameter outside [{lo}, {hi}] on {self.name}")

    def sample(self, n: int = 512) -> np.ndarray:
        lo, hi = self.domain
        return self(np.linspace(lo, hi, n))


class ArcLengthCurve(ParamCurve):
    """Reparameterization of ``base`` by Minkowski arc length.

    The parameter s is measured from the base parameter ``t0``; for closed
    curves any real s is admissible and wraps around.
    """

    def __init__(self, base: ParamCurve, ctx, t0: float | None = None, m: int = 2048):
        self.base = base
        self.ctx = ctx
        self.table = base.arclen_table(ctx, m)
        self.t0 = base.domain[0] if t0 is None else float(t0)
        self.offset = float(self.table(self.t0))
        self.length = self.table.total
        if base.closed:
            dom = (0.0, self.length)
        else:
            dom = (-self.offset, self.length - self.offset)
        polar = None
        if base.polar is not None:
            center, fn = base.polar
            polar = (center, lambda d: self.s_of_t(fn(d)))
        super().__init__(self._point, self._tangent, dom, closed=base.closed,
                         breaks=(), polar=polar, name=f"arclen({base.name})")

    def t_of_s(self, s):
        s = np.asarray(s, dtype=float)
        if not self.base.closed:
            self.check_domain(s)
        return self.table.inverse(s + self.offset)

    def s_of_t(self, t):
        s = self.table(t) - self.offset
        if self.base.closed:
            s = np.mod(s, self.length)
        return s

    def _wrap(self, s):
        return np.asarray(s, dtype=float)

    def _point(self, s):
        return self.base(self.t_of_s(s))

    def _tangent(self, s):
        d = self.base.derivative(self.t_of_s(s))
        n = self.ctx.norm(d)
        if np.any(n == 0):
            raise IrregularCurve(f"vanishing derivative on {self.base.name}")
        return d / n[..., None]

    def second_derivative(self, s):
        t = self.t_of_s(s)
        d1 = self.base.derivative(t)
        d2 = self.base.second_derivative(t)
        if getattr(self.ctx, "smooth", False):
            n = self.ctx.norm(d1)
            g = self.ctx.norm_grad(d1)
            dn = np.sum(g * d2, axis=-1)
            dT = d2 / n[..., None] - d1 * (dn / n ** 2)[..., None]
            return dT / n[..., None]
        h = 1e-5 * self.length
        return (self.derivative(s + h) - self.derivative(s - h)) / (2.0 * h)

    def euclidean_curvature(self, s):
        return self.base.euclidean_curvature(self.t_of_s(s))


# --------------------------------------------------------------------------
# operations

def arc_length(c: ParamCurve, ctx, t1: float, t2: float) -> float:
    """Minkowski length of c between parameters t1 <= t2."""
    if t1 > t2:
        raise DomainViolation("arc_length needs t1 <= t2")
    c.check_domain([t1, t2])
    tab = c.arclen_table(ctx)
    return float(tab(t2) - tab(t1))


def polygonal_length(c: ParamCurve, ctx, t1: float, t2: float, n: int = 4096) -> float:
    """Length of the inscribed polygon with n uniform parameter steps (a lower bound)."""
    ts = np.linspace(t1, t2, n + 1)
    if c.breaks:
        ts = np.union1d(ts, [b for b in c.breaks if t1 < b < t2])
    pts = c(ts)
    return float(np.sum(ctx.norm(np.diff(pts, axis=0))))


def reparam_by_arclength(c: ParamCurve, ctx, t0: float | None = None,
                         sweep: int = 1024) -> ArcLengthCurve:
    lo, hi = c.domain
    ts = np.linspace(lo, hi, sweep + 1)
    sp = ctx.norm(c.derivative(ts))
    if np.any(sp <= 1e-12 * max(1.0, float(np.max(sp)))):
        raise IrregularCurve(f"derivative vanishes on {c.name}")
    return ArcLengthCurve(c, ctx, t0)


def tangent_direction(c: ParamCurve, ctx, s: float) -> np.ndarray:
    d = c.derivative(s)
    n = float(ctx.norm(d))
    if n == 0.0:
        raise IrregularCurve("zero tangent")
    return d / n


# --------------------------------------------------------------------------
# starlike carriers

class StarlikeCurve:
    """A closed curve certified starlike about ``center``.

    The certificate samples the curve densely and requires the polar angle
    about the center to be nondecreasing with total turn 2*pi, which means
    every ray from the center meets the curve once.
    """

    def __init__(self, base: ParamCurve, center=(0.0, 0.0), fan: int = 4096):
        if not base.closed:
            raise NotStarlike(f"{base.name} is not closed")
        self.base = base
        self.center = np.asarray(center, dtype=float)
        n = max(8 * fan, 1024)
        ts = np.union1d(np.linspace(base.domain[0], base.domain[1], n + 1),
                        np.asarray(base.breaks, dtype=float))
        rel = base(ts) - self.center
        if np.any(np.hypot(rel[:, 0], rel[:, 1]) == 0):
            raise NotStarlike("curve passes through the center")
        psi = np.unwrap(np.arctan2(rel[:, 1], rel[:, 0]))
        turn = psi[-1] - psi[0]
        if abs(turn - TWO_PI) > 1e-6:
            raise NotStarlike(f"winding about center is {turn / TWO_PI:.6f} turns, expected +1")
        if np.min(np.diff(psi)) < -1e-12:
            raise NotStarlike("polar angle about the center is not monotone")
        self._ts = ts
        self._psi = psi
        self._direct = None
        if base.polar is not None and np.allclose(base.polar[0], self.center, atol=1e-14):
            self._direct = base.polar[1]

    def ray_crossings(self, directions) -> np.ndarray:
        """Number of crossings of each ray with the sampled polygon (oracle)."""
        d = np.atleast_2d(np.asarray(directions, dtype=float))
        rel = self.base(self._ts) - self.center
        a, b = rel[:-1], rel[1:]
        counts = np.zeros(len(d), dtype=int)
        for i, di in enumerate(d):
            ca, cb = cross(di, a), cross(di, b)
            hit = (ca < 0) & (cb >= 0) | (ca >= 0) & (cb < 0)
            w = ca / np.where(ca - cb == 0, 1.0, ca - cb)
            pt = a + (b - a) * w[:, None]
            counts[i] = int(np.sum(hit & (pt @ di > 0)))
        return counts

    def param_of_direction(self, d):
        d = np.asarray(d, dtype=float)
        nrm = np.hypot(d[..., 0], d[..., 1])
        if np.any(nrm == 0):
            raise ZeroVector("ray direction is zero")
        if self._direct is not None:
            return self._direct(d)
        alpha = np.arctan2(d[..., 1], d[..., 0])
        psi0 = self._psi[0]
        a = psi0 + np.mod(alpha - psi0, TWO_PI)
        k = np.clip(np.searchsorted(self._psi, a, side="right") - 1, 0, len(self._psi) - 2)
        dd = np.atleast_2d(d)
        flat_k = np.atleast_1d(k)
        lo, hi = self._ts[flat_k], self._ts[flat_k + 1]

        def f(t):
            return cross(dd, self.base(t) - self.center)

        t = bisect_sign(f, lo, hi)
        return t.reshape(np.shape(k)) if np.ndim(k) else float(t[0])

    def radial_point(self, d) -> np.ndarray:
        t = self.param_of_direction(d)
        p = self.base(t)
        d = np.asarray(d, dtype=float)
        rel = p - self.center
        if np.any(np.sum(rel * d, axis=-1) <= 0):
            raise NoIntersection("ray misses the carrier")
        return p


def radial_point(sc: StarlikeCurve, ray_direction) -> np.ndarray:
    return sc.radial_point(ray_direction)


# --------------------------------------------------------------------------
# builders

def circle(center=(0.0, 0.0), radius: float = 1.0, start: float = 0.0,
           clockwise: bool = False) -> ParamCurve:
    """Euclidean circle, counterclockwise unless ``clockwise``."""
    if radius <= 0:
        raise BadParams("radius must be positive")
    cx, cy = (float(v) for v in center)
    o = -1.0 if clockwise else 1.0

    def f(t):
        a = start + o * t
        return np.stack([cx + radius * np.cos(a), cy + radius * np.sin(a)], axis=-1)

    def d(t):
        a = start + o * t
        return o * radius * np.stack([-np.sin(a), np.cos(a)], axis=-1)

    def dd(t):
        a = start + o * t
        return -radius * np.stack([np.cos(a), np.sin(a)], axis=-1)

    polar = None
    if not clockwise:
        polar = (np.array([cx, cy]),
                 lambda v: np.mod(np.arctan2(v[..., 1], v[..., 0]) - start, TWO_PI))
    return ParamCurve(f, d, (0.0, TWO_PI), closed=True, deriv2=dd, polar=polar,
                      name=f"circle({cx},{cy},{radius})")


def line(point=(0.0, 0.0), direction=(1.0, 0.0), extent: float = 100.0) -> ParamCurve:
    p = np.asarray(point, dtype=float)
    u = np.asarray(direction, dtype=float)
    if not np.any(u):
        raise ZeroVector("line direction is zero")

    def f(t):
        t = np.asarray(t, dtype=float)
        return p + t[..., None] * u

    def d(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(u, t.shape + (2,)).copy()

    def dd(t):
        t = np.asarray(t, dtype=float)
        return np.zeros(t.shape + (2,))

    return ParamCurve(f, d, (-extent, extent), deriv2=dd, name="line")


def heliocentric_ellipse(p: float = 1.0, eps: float = 0.0) -> ParamCurve:
    """Ellipse with a focus at the origin, r(phi) = p / (1 + eps cos phi)."""
    if p <= 0 or not 0.0 <= eps < 1.0:
        raise BadParams("need p > 0 and 0 <= eps < 1")

    def r(phi):
        return p / (1.0 + eps * np.cos(phi))

    def f(phi):
        rr = r(phi)
        return np.stack([rr * np.cos(phi), rr * np.sin(phi)], axis=-1)

    def d(phi):
        rr = r(phi)
        dr = p * eps * np.sin(phi) / (1.0 + eps * np.cos(phi)) ** 2
        return np.stack([dr * np.cos(phi) - rr * np.sin(phi),
                         dr * np.sin(phi) + rr * np.cos(phi)], axis=-1)

    polar = (np.zeros(2), lambda v: np.mod(np.arctan2(v[..., 1], v[..., 0]), TWO_PI))
    return ParamCurve(f, d, (0.0, TWO_PI), closed=True, polar=polar,
                      name=f"ellipse(p={p},eps={eps})")


def nephroid() -> ParamCurve:
    """r(t) = ((-3 cos t + cos 3t) / 2, (-3 sin t + sin 3t) / 2); cusps at t = 0, pi."""

    def f(t):
        return 0.5 * np.stack([-3 * np.cos(t) + np.cos(3 * t),
                               -3 * np.sin(t) + np.sin(3 * t)], axis=-1)

    def d(t):
        return 1.5 * np.stack([np.sin(t) - np.sin(3 * t),
                               -np.cos(t) + np.cos(3 * t)], axis=-1)

    def dd(t):
        return 1.5 * np.stack([np.cos(t) - 3 * np.cos(3 * t),
                               np.sin(t) - 3 * np.sin(3 * t)], axis=-1)

    return ParamCurve(f, d, (0.0, TWO_PI), closed=True, breaks=(0.0, math.pi, TWO_PI),
                      deriv2=dd, name="nephroid")


def homothet(c: ParamCurve, center, ratio: float) -> ParamCurve:
    """center + ratio * (c - center) for ratio > 0."""
    if ratio <= 0:
        raise BadParams("homothety ratio must be positive")
    z = np.asarray(center, dtype=float)
    polar = None
    if c.polar is not None:
        polar = (z + ratio * (np.asarray(c.polar[0]) - z), c.polar[1])
    d2 = None
    if c._deriv2 is not None:
        d2 = lambda t: ratio * c.second_derivative(t)
    return ParamCurve(lambda t: z + ratio * (c(t) - z), lambda t: ratio * c.derivative(t),
                      c.domain, closed=c.closed, breaks=c.breaks, deriv2=d2, polar=polar,
                      name=f"homothet({c.name};{ratio})")


def translated(c: ParamCurve, v) -> ParamCurve:
    v = np.asarray(v, dtype=float)
    polar = None
    if c.polar is not None:
        polar = (np.asarray(c.polar[0]) + v, c.polar[1])
    d2 = (lambda t: c.second_derivative(t)) if c._deriv2 is not None else None
    return ParamCurve(lambda t: c(t) + v, c.derivative, c.domain, closed=c.closed,
                      breaks=c.breaks, deriv2=d2, polar=polar, name=f"translated({c.name})")


def reversed_curve(c: ParamCurve) -> ParamCurve:
    lo, hi = c.domain
    d2 = (lambda t: c.second_derivative(lo + hi - t)) if c._deriv2 is not None else None
    return ParamCurve(lambda t: c(lo + hi - np.asarray(t)),
                      lambda t: -c.derivative(lo + hi - np.asarray(t)),
                      c.domain, closed=c.closed, breaks=[lo + hi - b for b in c.breaks],
                      deriv2=d2, name=f"reversed({c.name})")


def polyline(points, closed: bool = False, params=None) -> ParamCurve:
    """Piecewise-linear curve through ``points``.

    Without ``params`` vertex i sits at parameter i.  A closed polyline
    returns to its first vertex at the end of the domain.
    """
    pts = np.asarray(points, dtype=float)
    if closed and not np.allclose(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[:1]])
    if params is None:
        params = np.arange(len(pts), dtype=float)
    ts = np.asarray(params, dtype=float)
    if len(ts) != len(pts) or len(ts) < 2 or np.any(np.diff(ts) <= 0):
        raise BadParams("polyline needs at least two points with increasing parameters")
    seg = np.diff(pts, axis=0) / np.diff(ts)[:, None]

    def idx(t):
        return np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2)

    def f(t):
        t = np.asarray(t, dtype=float)
        k = idx(t)
        return pts[k] + (t - ts[k])[..., None] * seg[k]

    def d(t):
        return seg[idx(np.asarray(t, dtype=float))]

    def dd(t):
        t = np.asarray(t, dtype=float)
        return np.zeros(t.shape + (2,))

    return ParamCurve(f, d, (ts[0], ts[-1]), closed=closed, breaks=ts, deriv2=dd,
                      name="polyline")


def load_samples(path) -> ParamCurve:
    """Polyline from a text file with one ``t x y`` triple per line."""
    rows = []
    for raw in Path(path).read_text().splitlines():
        s = raw.split("#", 1)[0].strip()
        if s:
            rows.append([float(v) for v in s.replace(",", " ").split()])
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise BadParams(f"{path}: expected 't x y' rows")
    closed = bool(np.allclose(arr[0, 1:], arr[-1, 1:]))
    return polyline(arr[:, 1:], closed=closed, params=arr[:, 0])


def minkowski_circle(ctx, center=(0.0, 0.0), radius: float = 1.0) -> ParamCurve:
    """center + radius * (unit circle of ctx), with the unit circle's parameter."""
    if radius <= 0:
        raise BadParams("radius must be positive")
    return translated(homothet(ctx.unit_circle, (0.0, 0.0), radius), center)


def make_builtin_curve(kind: str, *args, **kw) -> ParamCurve:
    kind = kind.lower()
    if kind in ("heliocentric_ellipse", "ellipse"):
        return heliocentric_ellipse(*args, **kw)
    if kind == "nephroid":
        return nephroid()
    if kind == "circle":
        return circle(*args, **kw)
    if kind in ("unit_circle", "unitcircle"):
        return args[0].unit_circle if args else kw["ctx"].unit_circle
    if kind == "homothet":
        return homothet(*args, **kw)
    if kind == "line":
        return line(*args, **kw)
    raise BadParams(f"unknown curve kind {kind!r}")
