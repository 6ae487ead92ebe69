"""Quadrature, root-finding and extrapolation helpers."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def gauss_legendre(f: Callable[[np.ndarray], np.ndarray], a, b) -> np.ndarray:
    """Fixed 10-point Gauss-Legendre rule on [a, b], vectorized over a and b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[..., None] + half[..., None] * _GL_X
    vals = f(nodes.reshape(-1)).reshape(nodes.shape)
    return half * (vals @ _GL_W)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 40) -> float:
    """Adaptive Simpson quadrature with a hard recursion cap."""
    if a == b:
        return 0.0

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (rec(a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(m, b, fm, frm, fb, right, tol / 2.0, depth - 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


class CumulativeIntegral:
    """Running integral F(t) = int_{t0}^{t} rho of a nonnegative density.

    The integral is tabulated on ``knots``; in between it is completed by a
    10-point Gauss-Legendre rule, so F is smooth to rounding level inside
    each cell and its derivative is the density itself.  Put breakpoints of
    the density (kinks, cusps) into ``knots``.  With ``periodic=True`` the
    argument is reduced modulo the knot span and whole periods are added.
    """

    def __init__(self, density: Callable[[np.ndarray], np.ndarray],
                 knots: Sequence[float], periodic: bool = False):
        self.density = density
        self.knots = np.asarray(knots, dtype=float)
        if self.knots.ndim != 1 or len(self.knots) < 2 or np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must be strictly increasing with at least two entries")
        cells = gauss_legendre(density, self.knots[:-1], self.knots[1:])
        self.table = np.concatenate([[0.0], np.cumsum(cells)])
        self.periodic = periodic
        self.t0 = float(self.knots[0])
        self.t1 = float(self.knots[-1])
        self.span = self.t1 - self.t0
        self.total = float(self.table[-1])

    def _reduce(self, t):
        t = np.asarray(t, dtype=float)
        if not self.periodic:
            return t, np.zeros_like(t)
        turns = np.floor((t - self.t0) / self.span)
        r = t - turns * self.span
        # floor can land r exactly on t1 through rounding
        wrap = r >= self.t1
        r = np.where(wrap, r - self.span, r)
        turns = turns + wrap
        return r, turns

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        r, turns = self._reduce(t)
        k = np.clip(np.searchsorted(self.knots, r, side="right") - 1, 0, len(self.knots) - 2)
        base = self.table[k]
        part = gauss_legendre(self.density, self.knots[k], r)
        return base + part + turns * self.total

    def inverse(self, v, tol: float = 4e-16, max_iter: int = 60):
        """Solve F(t) = v by Newton steps kept inside a bisection bracket."""
        v = np.asarray(v, dtype=float)
        scalar = v.ndim == 0
        v = np.atleast_1d(v)
        if self.periodic:
            turns = np.floor(v / self.total)
            vr = v - turns * self.total
            wrap = vr >= self.total
            vr = np.where(wrap, vr - self.total, vr)
            turns = turns + wrap
        else:
            turns = np.zeros_like(v)
            vr = v
            if np.any(vr < -1e-12 * max(1.0, self.total)) or np.any(vr > self.total * (1 + 1e-12) + 1e-12):
                raise ValueError("value outside the range of the cumulative integral")
            vr = np.clip(vr, 0.0, self.total)
        k = np.clip(np.searchsorted(self.table, vr, side="right") - 1, 0, len(self.knots) - 2)
        lo = self.knots[k].copy()
        hi = self.knots[k + 1].copy()
        target = vr - self.table[k]
        # linear guess within the cell
        cell = self.table[k + 1] - self.table[k]
        frac = np.where(cell > 0, target / np.where(cell > 0, cell, 1.0), 0.0)
        t = lo + frac * (hi - lo)
        scale = max(1.0, abs(self.total))
        for _ in range(max_iter):
            g = gauss_legendre(self.density, self.knots[k], t) - target
            lo = np.where(g < 0, t, lo)
            hi = np.where(g > 0, t, hi)
            d = self.density(t)
            step = np.where(d > 0, g / np.where(d > 0, d, 1.0), 0.0)
            tn = t - step
            bad = (tn <= lo) | (tn >= hi) | (d <= 0)
            tn = np.where(bad, 0.5 * (lo + hi), tn)
            done = (np.abs(g) <= tol * scale) | (hi - lo <= 4e-16 * np.maximum(1.0, np.abs(t)))
            t = np.where(done, t, tn)
            if np.all(done):
                break
        out = t + turns * self.span
        return out[0] if scalar else out


def golden_section_min(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-12, max_iter: int = 200) -> tuple[float, float]:
    """Minimize a unimodal function on [a, b]; returns (argmin, min)."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    best = min((fx, x), (fc, c), (fd, d))
    return best[1], best[0]


def bisect_sign(f: Callable[[np.ndarray], np.ndarray], lo, hi, iters: int = 80) -> np.ndarray:
    """Vectorized bisection for sign changes of f between lo and hi."""
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
        if np.all(hi - lo <= 2e-16 * np.maximum(1.0, np.abs(lo))):
            break
    return 0.5 * (lo + hi)


def richardson(values: Sequence[float], order: int = 2, ratio: float = 2.0) -> float:
    """Richardson extrapolation for estimates at h, h/ratio, h/ratio**2, ...

    ``order`` is the leading error exponent; successive columns remove
    order, order + 2, ... which suits symmetric stencils.
    """
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise ValueError("need at least two estimates")
    p = order
    while len(vals) > 1:
        f = ratio ** p
        vals = [(f * vals[i + 1] - vals[i]) / (f - 1.0) for i in range(len(vals) - 1)]
        p += 2
    return vals[0]


def observed_order(values: Sequence[float], ratio: float = 2.0, floor: float = 1e-9) -> float:
    """Convergence order from three estimates at h, h/ratio, h/ratio**2.

    When both differences sit below ``floor`` relative to the estimates the
    sequence is already exact to rounding and the order is reported as inf.
    """
    a, b, c = (float(v) for v in values[:3])
    d1, d2 = abs(a - b), abs(b - c)
    scale = max(abs(a), abs(b), abs(c), 1e-300)
    if max(d1, d2) <= floor * scale:
        return math.inf
    if d2 == 0.0:
        return math.inf
    if d1 == 0.0:
        return math.nan
    return math.log(d1 / d2) / math.log(ratio)


def unwrap_angle(a):
    return np.unwrap(np.asarray(a, dtype=float))
