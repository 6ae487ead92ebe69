"""Rolling motions in a Minkowski plane, their roulettes, and Euclidean pose kinematics.

A rolling motion carries the moving polode g' along the fixed polode g so
that both are traversed at unit Minkowski speed and touch at the common
parameter s.  The plane position of a point p attached to the moving plane is

    Phi_s(p) = g(s) + R(phi(s)) (p - g'(s)),

with R the arc-length rotation about the origin and phi(s) the raw arc angle
that carries the tangent of g' onto the tangent of g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curves import ArcLengthCurve, ParamCurve, cross, homothet, minkowski_circle, perp
from .errors import (DomainViolation, IrregularCurve, NoCommonContact, NonSmoothBall,
                     PoleCoincidence, TangentMismatch, TranslativeMotion)
from .numerics import golden_section_min, richardson

CONTACT_TOL = 1e-6


def as_arclength(c: ParamCurve, ctx) -> ArcLengthCurve:
    """Arc-length version of c with s = 0 at parameter 0 (or the domain start)."""
    if isinstance(c, ArcLengthCurve) and c.ctx is ctx:
        return c
    lo, hi = c.domain
    t0 = 0.0 if lo <= 0.0 <= hi else lo
    return ArcLengthCurve(c, ctx, t0)


class RollingMotion:
    """Flexible motion of a moving polode rolling without slipping on a fixed one."""

    def __init__(self, fixed: ParamCurve, moving: ParamCurve, ctx, steps: int = 512,
                 s_max: float | None = None):
        if not ctx.smooth:
            raise NonSmoothBall(f"rolling needs a smooth unit circle, got {ctx.label}")
        self.ctx = ctx
        self.fixed = as_arclength(fixed, ctx)
        self.moving = as_arclength(moving, ctx)
        g0, m0 = self.fixed(0.0), self.moving(0.0)
        if np.hypot(*(g0 - m0)) > CONTACT_TOL:
            raise NoCommonContact(f"start points differ: {g0} vs {m0}")
        t0, u0 = self.fixed.derivative(0.0), self.moving.derivative(0.0)
        if np.hypot(*(t0 - u0)) > CONTACT_TOL:
            raise TangentMismatch(f"start tangents differ: {t0} vs {u0}")
        self.L = ctx.circumference
        if s_max is None:
            closed = [c.length for c in (self.fixed, self.moving) if c.closed]
            s_max = max(closed) if closed else 10.0
        if not s_max > 0:
            raise DomainViolation("s_max must be positive")
        self.s_max = float(s_max)
        # the admissible range reaches a little past [0, s_max] on both sides so
        # symmetric stencils fit at the ends
        pad = 0.05 * self.s_max
        self.s_lo, self.s_hi = -self.s_max - pad, self.s_max + pad
        for c in (self.fixed, self.moving):
            if not c.closed:
                self.s_lo = max(self.s_lo, c.domain[0])
                self.s_hi = min(self.s_hi, c.domain[1])
        self.s_max = min(self.s_max, self.s_hi)
        self.s_min = self.s_lo
        self.steps = int(steps)
        self.s_grid = np.linspace(0.0, self.s_max, self.steps + 1)
        # dense internal table for branch tracking, covering negative s too
        n_dense = max(4 * self.steps, 2048)
        self._dense = np.linspace(self.s_lo, self.s_hi, n_dense + 1)
        raw = self._raw_phi(self._dense)
        tab = np.unwrap(raw, period=self.L)
        k0 = np.interp(0.0, self._dense, tab)
        self._table = tab - self.L * np.round(k0 / self.L)
        self.phi_raw = self.phi(self.s_grid)

    def _raw_phi(self, s):
        S = self.ctx.arc_coordinate
        return S(self.fixed.derivative(s)) - S(self.moving.derivative(s))

    def check_s(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < self.s_lo - 1e-12) or np.any(s > self.s_hi + 1e-12):
            raise DomainViolation(f"s outside [{self.s_lo}, {self.s_hi}]")
        return s

    def phi(self, s):
        """Raw rotation angle phi(s) on the branch with phi(0) = 0."""
        s = self.check_s(s)
        raw = self._raw_phi(s)
        ref = np.interp(s, self._dense, self._table)
        out = raw + self.L * np.round((ref - raw) / self.L)
        return float(out) if np.ndim(out) == 0 else out

    def phi_dot(self, s: float = 0.0, h: float = 1e-3) -> float:
        """d phi / ds by central differences, Richardson over h, h/2, h/4."""
        ests = [(self.phi(s + k) - self.phi(s - k)) / (2.0 * k) for k in (h, h / 2, h / 4)]
        return richardson(ests, order=2)

    def transform(self, s, p):
        return motion_transform(self, s, p)

    def pole(self, s):
        return self.fixed(s)


def make_rolling_motion(fixed: ParamCurve, moving: ParamCurve, ctx, steps: int = 512,
                        s_max: float | None = None) -> RollingMotion:
    return RollingMotion(fixed, moving, ctx, steps, s_max)


def motion_transform(m: RollingMotion, s, p):
    """Phi_s(p); s may be an array, then the result has shape (len(s), 2)."""
    s = m.check_s(s)
    p = np.asarray(p, dtype=float)
    rel = p - m.moving(s)
    return m.fixed(s) + m.ctx.rotate_raw(rel, m.phi(s))


@dataclass
class RouletteTrace:
    tracked_point: np.ndarray
    s: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    pole: np.ndarray
    h: float

    def speed(self) -> np.ndarray:
        return np.hypot(self.velocity[:, 0], self.velocity[:, 1])


def roulette_trace(m: RollingMotion, p, h: float = 1e-4, s=None) -> RouletteTrace:
    """Sample Phi_s(p) with central-difference velocity and acceleration in s."""
    if not h > 0:
        raise DomainViolation("step h must be positive")
    s = m.s_grid if s is None else m.check_s(s)
    x0 = motion_transform(m, s, p)
    xm = motion_transform(m, s - h, p)
    xp = motion_transform(m, s + h, p)
    vel = (xp - xm) / (2.0 * h)
    acc = (xp - 2.0 * x0 + xm) / h ** 2
    return RouletteTrace(np.asarray(p, dtype=float), np.asarray(s), x0, vel, acc, m.fixed(s), h)


def velocity(m: RollingMotion, s: float, p, h: float) -> np.ndarray:
    return (motion_transform(m, s + h, p) - motion_transform(m, s - h, p)) / (2.0 * h)


def instantaneous_pole_check(trace: RouletteTrace | None, m: RollingMotion, ctx, s: float,
                             p=None, h: float | None = None) -> float:
    """Normalized semi-inner product [v, X] / (||v|| ||X||) with X = Phi_s(p) - g(s).

    The velocity v of the tracked point must be Birkhoff normal to X.
    """
    if p is None:
        p = trace.tracked_point
    if h is None:
        h = trace.h
    x = motion_transform(m, s, p)
    X = x - m.fixed(s)
    if ctx.norm(X) <= 1e-12 * max(1.0, float(ctx.norm(x))):
        raise PoleCoincidence("tracked point sits at the instantaneous pole")
    v = velocity(m, s, p, h)
    nv = float(ctx.norm(v))
    if nv == 0.0:
        raise PoleCoincidence("tracked point is at rest")
    return abs(ctx.semi_inner(v, X)) / (nv * float(ctx.norm(X)))


# --------------------------------------------------------------------------
# standard rolling pairs

def circle_on_circle(ctx, radius: float = 1.0, ratio: float = 0.5, angle: float = 0.4,
                     steps: int = 512) -> RollingMotion:
    """Minkowski circle of radius ``ratio * radius`` rolling inside one of ``radius``.

    Contact starts at the boundary point in Euclidean direction ``angle``.
    """
    fixed0 = minkowski_circle(ctx, (0.0, 0.0), radius)
    t0 = ctx.unit_circle.polar[1](np.array([math.cos(angle), math.sin(angle)]))
    fixed = ArcLengthCurve(fixed0, ctx, float(t0))
    contact = fixed(0.0)
    moving = ArcLengthCurve(homothet(fixed0, contact, ratio), ctx, float(t0))
    return RollingMotion(fixed, moving, ctx, steps, s_max=fixed.length)


def hypocycloid(ctx, n: int, steps: int | None = None) -> RollingMotion:
    """Unit circle with its 1/n homothet rolling inside; s runs over one full turn."""
    if n < 2:
        raise DomainViolation("hypocycloid needs n >= 2")
    steps = steps or 256 * n
    return circle_on_circle(ctx, 1.0, 1.0 / n, 0.0, steps)


def count_cusps(m: RollingMotion, p, h: float = 1e-6, threshold: float = 1e-3,
                s_range=None) -> list[float]:
    """Parameters in [s0, s1) where the roulette speed has a local minimum below threshold."""
    s0, s1 = s_range if s_range is not None else (0.0, m.s_max)
    grid = np.linspace(s0, s1, m.steps + 1)
    margin = 2.0 * (grid[1] - grid[0])

    def speed(s):
        v = velocity(m, s, p, h)
        return float(np.hypot(v[0], v[1]))

    # the sampled speed on a closed ring so minima at the seam are seen once
    sp = np.array([speed(s) for s in grid[:-1]])
    n = len(sp)
    found = []
    for i in range(n):
        if sp[i] <= sp[i - 1] and sp[i] <= sp[(i + 1) % n]:
            a, b = grid[i] - margin, grid[i] + margin
            x, fx = golden_section_min(speed, max(a, m.s_lo + h), min(b, m.s_hi - h), tol=1e-10)
            if fx < threshold:
                x = s0 + math.fmod(x - s0 + (s1 - s0), s1 - s0)
                if s1 - s0 - (x - s0) < 1e-9:
                    x = s0
                if not any(abs(x - y) < margin or abs(abs(x - y) - (s1 - s0)) < margin for y in found):
                    found.append(x)
    return sorted(found)


# --------------------------------------------------------------------------
# Euclidean pose kinematics

def _rot(phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


class EuclideanMotion:
    """Planar Euclidean motion x = p(t) + R(phi(t)) u from a pose path.

    ``pose(t)`` returns ``(p, phi)``.  Derivatives are central differences.
    """

    def __init__(self, pose: Callable, domain=(0.0, 1.0), h: float = 1e-5):
        self.pose = pose
        self.domain = (float(domain[0]), float(domain[1]))
        self.h = h

    @classmethod
    def from_angle(cls, p_of_phi: Callable, domain=(0.0, 1.0)) -> "EuclideanMotion":
        """Pose path parameterized by the rotation angle itself."""
        return cls(lambda t: (np.asarray(p_of_phi(t), dtype=float), float(t)), domain)

    def rotation(self, t) -> np.ndarray:
        return _rot(self.pose(t)[1])

    def apply(self, t, u):
        p, phi = self.pose(t)
        return np.asarray(p) + _rot(phi) @ np.asarray(u, dtype=float)

    def rates(self, t):
        h = self.h
        p1, a1 = self.pose(t + h)
        p0, a0 = self.pose(t - h)
        return (np.asarray(p1) - np.asarray(p0)) / (2 * h), (a1 - a0) / (2 * h)

    def pole_pair(self, t):
        """(x0, u0): instantaneous pole in the fixed plane and in the moving plane."""
        p, phi = self.pose(t)
        pd, wd = self.rates(t)
        if abs(wd) <= 1e-12:
            raise TranslativeMotion(f"rotation rate vanishes at t = {t}")
        dp = pd / wd  # derivative with respect to the angle
        x0 = np.asarray(p) + perp(dp)
        u0 = perp(_rot(-phi) @ dp)
        return x0, u0


@dataclass
class Polodes:
    t: np.ndarray
    fixed: np.ndarray
    moving: np.ndarray
    fixed_length: np.ndarray
    moving_length: np.ndarray


def euclidean_polodes(motion: EuclideanMotion, n: int = 2001) -> Polodes:
    """Sample both polodes; their cumulative lengths must agree (rolling without slip).

    Lengths are chord sums on a grid and its refinement, combined by one
    Richardson step so the O(dt^2) chord deficit cancels.
    """
    fine = np.linspace(motion.domain[0], motion.domain[1], 2 * n - 1)
    pairs = [motion.pole_pair(t) for t in fine]
    xs = np.array([q[0] for q in pairs])
    us = np.array([q[1] for q in pairs])

    def cum(pts):
        c = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])[::2]
        coarse = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts[::2], axis=0).T))])
        return (4.0 * c - coarse) / 3.0

    return Polodes(fine[::2], xs[::2], us[::2], cum(xs), cum(us))


__all__ = ["RollingMotion", "RouletteTrace", "EuclideanMotion", "Polodes", "as_arclength",
           "circle_on_circle", "count_cusps", "euclidean_polodes", "hypocycloid",
           "instantaneous_pole_check", "make_rolling_motion", "motion_transform",
           "roulette_trace", "velocity", "cross", "IrregularCurve"]
