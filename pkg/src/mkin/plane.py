"""Normed planes: norm, semi-inner product, Birkhoff orthogonality, Q, sigma.

A :class:`PlaneContext` wraps one centrally symmetric convex unit ball.  The
unit circle is exposed as a closed :class:`~mkin.curves.ParamCurve` together
with its cumulative Minkowski arc length, which is what the arc-length
rotations about the origin run on.

Smooth balls (euclidean, l_p with 1 < p < inf, radial) are parameterized by
the Euclidean polar angle; polygonal balls (including l_1 and l_inf) by the
vertex index, which makes their arc length exactly piecewise linear.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import ConvexHull

from .curves import ParamCurve, cross, perp
from .errors import BadBall, NonSmoothBall, NonSmoothBoundary, ZeroVector
from .numerics import CumulativeIntegral, gauss_legendre, golden_section_min

TWO_PI = 2.0 * math.pi
DEFAULT_SAMPLES = 4096
DEFAULT_TOL = 1e-9


def _as_vecs(v):
    return np.asarray(v, dtype=float)


class PlaneContext:
    """A normed plane given by its unit ball.

    Build with :meth:`euclidean`, :meth:`lp`, :meth:`polygon`, :meth:`radial`
    or :meth:`from_spec`.  Instances are treated as immutable.
    """

    def __init__(self, kind: str, *, p: float | None = None, vertices=None,
                 radial_fn=None, scale: float = 1.0, samples: int = DEFAULT_SAMPLES,
                 label: str | None = None):
        self.kind = kind
        self.p = p
        self.scale = float(scale)
        self.samples = int(samples)
        self.label = label or kind
        self._vertices = None
        self._radial = radial_fn
        if kind == "polygon":
            self._setup_polygon(vertices)
            self.smooth = False
            self.strictly_convex = False
        elif kind in ("euclidean", "lp", "radial"):
            self.smooth = True
            self.strictly_convex = True
            self._setup_smooth()
        else:
            raise BadBall(f"unknown ball kind {kind!r}")
        self.circumference = float(self.arc.total)
        lo, hi = 6.0 - 1e-6, 8.0 + 1e-6
        if not lo <= self.circumference <= hi:
            raise BadBall(f"unit circle length {self.circumference} outside [6, 8]")

    # ---- constructors -------------------------------------------------

    @classmethod
    def euclidean(cls, scale: float = 1.0, samples: int = DEFAULT_SAMPLES):
        return cls("euclidean", scale=scale, samples=samples, label="euclidean")

    @classmethod
    def lp(cls, p: float, scale: float = 1.0, samples: int = DEFAULT_SAMPLES):
        p = float(p)
        if not p >= 1.0:
            raise BadBall("l_p needs p >= 1")
        label = f"lp:{'inf' if math.isinf(p) else f'{p:g}'}"
        if math.isinf(p):
            sq = [(1, -1), (1, 1), (-1, 1), (-1, -1)]
            return cls("polygon", vertices=np.array(sq, float) * scale, samples=samples, label=label)
        if p == 1.0:
            dm = [(1, 0), (0, 1), (-1, 0), (0, -1)]
            return cls("polygon", vertices=np.array(dm, float) * scale, samples=samples, label=label)
        if p == 2.0:
            return cls("euclidean", scale=scale, samples=samples, label=label)
        return cls("lp", p=p, scale=scale, samples=samples, label=label)

    @classmethod
    def polygon(cls, vertices, samples: int = DEFAULT_SAMPLES, label: str = "polygon"):
        return cls("polygon", vertices=vertices, samples=samples, label=label)

    @classmethod
    def radial(cls, angles, radii, samples: int = DEFAULT_SAMPLES, label: str = "radial"):
        """Ball whose boundary is r(theta) * (cos theta, sin theta), interpolated by a
        periodic cubic spline.  Samples covering only [0, pi) are mirrored."""
        a = np.asarray(angles, dtype=float)
        r = np.asarray(radii, dtype=float)
        order = np.argsort(np.mod(a, TWO_PI))
        a, r = np.mod(a, TWO_PI)[order], r[order]
        if a[-1] < math.pi - 1e-12:
            a = np.concatenate([a, a + math.pi])
            r = np.concatenate([r, r])
        if np.any(r <= 0):
            raise BadBall("radial samples must be positive")
        # symmetry check on the samples themselves
        sp = CubicSpline(np.concatenate([a, [a[0] + TWO_PI]]), np.concatenate([r, [r[0]]]),
                         bc_type="periodic")
        opp = sp(np.mod(a + math.pi - a[0], TWO_PI) + a[0])
        if np.max(np.abs(opp - r)) > 1e-6 * np.max(r):
            raise BadBall("radial samples are not centrally symmetric")
        return cls("radial", radial_fn=(sp, float(a[0])), samples=samples, label=label)

    @classmethod
    def from_spec(cls, spec: str, base_dir: str | Path | None = None):
        """Parse ``euclidean``, ``lp:<p>``, ``polygon:<file>`` or ``radial:<file>``."""
        spec = spec.strip()
        kind, _, arg = spec.partition(":")
        kind = kind.strip().lower()
        if kind == "euclidean" and not arg:
            return cls.euclidean()
        if kind == "lp":
            try:
                p = math.inf if arg.strip().lower() in ("inf", "infinity") else float(arg)
            except ValueError:
                raise BadBall(f"bad exponent in {spec!r}") from None
            return cls.lp(p)
        if kind in ("polygon", "radial") and arg:
            path = Path(arg.strip())
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            rows = _read_pairs(path)
            if kind == "polygon":
                return cls.polygon(rows, label=spec)
            return cls.radial(rows[:, 0], rows[:, 1], label=spec)
        raise BadBall(f"unknown ball specification {spec!r}")

    def scaled(self, lam: float) -> "PlaneContext":
        """The plane whose unit ball is lam * B (norms divide by lam)."""
        if self.kind == "polygon":
            return PlaneContext("polygon", vertices=self._vertices * lam, samples=self.samples,
                                label=f"{self.label}*{lam:g}")
        if self.kind == "radial":
            sp, a0 = self._radial
            x = sp.x
            sp2 = CubicSpline(x, sp(x) * lam, bc_type="periodic")
            return PlaneContext("radial", radial_fn=(sp2, a0), samples=self.samples,
                                label=f"{self.label}*{lam:g}")
        return PlaneContext(self.kind, p=self.p, scale=self.scale * lam, samples=self.samples,
                            label=f"{self.label}*{lam:g}")

    # ---- setup ------------------------------------------------------

    def _setup_polygon(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise BadBall("polygon needs a list of (x, y) vertices")
        if not _is_symmetric_set(v):
            v = np.vstack([v, -v])
        try:
            hull = ConvexHull(v)
        except Exception as exc:  # qhull raises its own error type
            raise BadBall(f"degenerate polygon: {exc}") from None
        hv = v[hull.vertices]  # counterclockwise for 2-D hulls
        # the hull may drop given vertices; they must have been on or inside it
        if not _is_symmetric_set(hv):
            raise BadBall("polygon is not centrally symmetric")
        if abs(_shoelace(hv)) <= 0:
            raise BadBall("polygon has zero area")
        # start at the vertex with smallest polar angle for reproducibility
        ang = np.mod(np.arctan2(hv[:, 1], hv[:, 0]), TWO_PI)
        hv = np.roll(hv, -int(np.argmin(ang)), axis=0)
        self._vertices = hv
        n = len(hv)
        nxt = np.roll(hv, -1, axis=0)
        self._edges = nxt - hv
        c = cross(hv, nxt)
        if np.any(c <= 0):
            raise BadBall("origin is not interior to the polygon")
        self._normals = np.stack([self._edges[:, 1], -self._edges[:, 0]], axis=-1) / c[:, None]
        self._edge_norms = self.norm(self._edges)
        ts = np.arange(n + 1, dtype=float)
        ext = np.vstack([hv, hv[:1]])

        def f(t):
            t = np.asarray(t, dtype=float)
            k = np.clip(np.floor(t).astype(int), 0, n - 1)
            return ext[k] + (t - k)[..., None] * self._edges[k]

        def d(t):
            t = np.asarray(t, dtype=float)
            k = np.clip(np.floor(t).astype(int), 0, n - 1)
            return self._edges[k]

        self.unit_circle = ParamCurve(f, d, (0.0, float(n)), closed=True, breaks=ts,
                                      polar=(np.zeros(2), self._poly_param),
                                      name=f"unit_circle({self.label})")
        self.arc = CumulativeIntegral(lambda t: self._edge_norms[np.clip(np.floor(t).astype(int), 0, n - 1)],
                                      ts, periodic=True)
        self.area = abs(_shoelace(hv))

    def _poly_param(self, d):
        d = _as_vecs(d)
        k = np.argmax(d @ self._normals.T, axis=-1)
        q = d / self.norm(d)[..., None]
        e = self._edges[k]
        frac = np.sum((q - self._vertices[k]) * e, axis=-1) / np.sum(e * e, axis=-1)
        return k + np.clip(frac, 0.0, 1.0)

    def _setup_smooth(self):
        n = self.samples
        knots = np.linspace(0.0, TWO_PI, n + 1)

        def b(th):
            th = np.asarray(th, dtype=float)
            u = np.stack([np.cos(th), np.sin(th)], axis=-1)
            return self._rho(th)[..., None] * u

        def db(th):
            th = np.asarray(th, dtype=float)
            u = np.stack([np.cos(th), np.sin(th)], axis=-1)
            return self._drho(th)[..., None] * u + self._rho(th)[..., None] * perp(u)

        polar = (np.zeros(2), lambda v: np.mod(np.arctan2(v[..., 1], v[..., 0]), TWO_PI))
        self.unit_circle = ParamCurve(b, db, (0.0, TWO_PI), closed=True, polar=polar,
                                      name=f"unit_circle({self.label})")
        self.arc = CumulativeIntegral(lambda th: self.norm(db(th)), knots, periodic=True)
        cells = gauss_legendre(lambda th: 0.5 * self._rho(th) ** 2, knots[:-1], knots[1:])
        self.area = float(np.sum(cells))

    def _rho(self, th):
        """Euclidean radius of the unit circle in direction th."""
        th = np.asarray(th, dtype=float)
        if self.kind == "euclidean":
            return np.full(th.shape, self.scale)
        if self.kind == "radial":
            sp, a0 = self._radial
            return sp(np.mod(th - a0, TWO_PI) + a0)
        u = np.stack([np.cos(th), np.sin(th)], axis=-1)
        return 1.0 / self.norm(u)

    def _drho(self, th):
        th = np.asarray(th, dtype=float)
        if self.kind == "euclidean":
            return np.zeros(th.shape)
        if self.kind == "radial":
            sp, a0 = self._radial
            return sp(np.mod(th - a0, TWO_PI) + a0, 1)
        u = np.stack([np.cos(th), np.sin(th)], axis=-1)
        n = self.norm(u)
        g = self.norm_grad(u)
        return -np.sum(g * perp(u), axis=-1) / n ** 2

    # ---- norm ---------------------------------------------------------

    def norm(self, v):
        """Minkowski norm of one vector (shape (2,)) or a stack (shape (..., 2))."""
        v = _as_vecs(v)
        x, y = np.abs(v[..., 0]), np.abs(v[..., 1])
        if self.kind == "euclidean":
            return np.hypot(x, y) / self.scale
        if self.kind == "lp":
            p = self.p
            m = np.maximum(x, y)
            safe = np.where(m > 0, m, 1.0)
            return np.where(m > 0, m * ((x / safe) ** p + (y / safe) ** p) ** (1.0 / p), 0.0) / self.scale
        if self.kind == "polygon":
            return np.max(v @ self._normals.T, axis=-1)
        r = np.hypot(v[..., 0], v[..., 1])
        th = np.arctan2(v[..., 1], v[..., 0])
        return r / self._rho(th)

    def norm_grad(self, v):
        """Gradient of the norm at v != 0 (smooth balls only)."""
        if not self.smooth:
            raise NonSmoothBall("norm gradient needs a smooth ball")
        v = _as_vecs(v)
        if self.kind == "euclidean":
            r = np.hypot(v[..., 0], v[..., 1])
            return v / (r * self.scale)[..., None]
        if self.kind == "lp":
            n = self.norm(v) * self.scale
            w = v / n[..., None]
            return np.sign(w) * np.abs(w) ** (self.p - 1.0) / self.scale
        th = np.arctan2(v[..., 1], v[..., 0])
        u = np.stack([np.cos(th), np.sin(th)], axis=-1)
        r = self._rho(th)
        dr = self._drho(th)
        return u / r[..., None] - (dr / r ** 2)[..., None] * perp(u)

    def _active(self, y, tol=1e-12):
        vals = y @ self._normals.T
        return vals >= np.max(vals) - tol * max(1.0, abs(float(np.max(vals))))

    def semi_inner(self, x, y) -> float:
        """[x, y] = ||y|| * d/dt ||y + t x|| at t = 0+, so [y, y] = ||y||^2 and
        [x, y] = 0 exactly when y is Birkhoff orthogonal to x."""
        x = _as_vecs(x)
        y = _as_vecs(y)
        ny = self.norm(y)
        if self.smooth:
            if np.ndim(y) == 1:
                return 0.0 if ny == 0 else float(ny * (self.norm_grad(y) @ x))
            safe = np.where(ny[..., None] > 0, y, 1.0)
            return np.where(ny > 0, ny * np.sum(self.norm_grad(safe) * x, axis=-1), 0.0)
        if np.ndim(y) != 1:
            return np.array([self.semi_inner(a, b) for a, b in zip(np.broadcast_to(x, y.shape), y)])
        if ny == 0:
            return 0.0
        act = self._active(y)
        return float(ny * np.max(self._normals[act] @ x))

    def is_birkhoff_orthogonal(self, x, y, tol: float = DEFAULT_TOL) -> bool:
        """True iff ||x + t y|| >= ||x|| (1 - tol) for all t."""
        x = _as_vecs(x)
        y = _as_vecs(y)
        nx = float(self.norm(x))
        if nx == 0:
            raise ZeroVector("x must be nonzero")
        ny = float(self.norm(y))
        if ny == 0:
            return True
        span = 10.0 * nx / ny
        _, fmin = golden_section_min(lambda t: float(self.norm(x + t * y)), -span, span)
        return fmin >= nx - tol * nx

    # ---- Q operator ---------------------------------------------------

    def q_normal(self, x):
        """Counterclockwise tangent of ||x|| * (unit circle) at x, with norm ||x||."""
        x = _as_vecs(x)
        nx = self.norm(x)
        if np.any(nx == 0):
            raise ZeroVector("Q(0) is undefined")
        if self.smooth:
            tau = perp(self.norm_grad(x))
            return tau * (nx / self.norm(tau))[..., None]
        if np.ndim(x) != 1:
            return np.array([self.q_normal(v) for v in x])
        act = np.flatnonzero(self._active(x, tol=1e-12))
        if len(act) != 1:
            raise NonSmoothBoundary(f"{x} points at a vertex of the unit ball")
        e = self._edges[act[0]]
        return e * (nx / self.norm(e))

    def q_inverse(self, x):
        """The vector y with ||y|| = ||x|| and Q(y) a positive multiple of x."""
        x = _as_vecs(x)
        if np.ndim(x) != 1:
            return np.array([self.q_inverse(v) for v in x])
        nx = float(self.norm(x))
        if nx == 0:
            raise ZeroVector("Q^-1(0) is undefined")
        if not self.smooth:
            raise NonSmoothBoundary("Q^-1 is multivalued on polygonal balls")
        target = math.atan2(x[1], x[0])

        def f(th):
            u = np.array([math.cos(th), math.sin(th)])
            q = self.q_normal(u)
            a = math.atan2(q[1], q[0]) - target
            return (a + math.pi) % TWO_PI - math.pi

        from scipy.optimize import brentq

        lo, hi = target - math.pi + 1e-12, target - 1e-12
        th = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
        u = np.array([math.cos(th), math.sin(th)])
        return u * (nx / float(self.norm(u)))

    # ---- sigma functions ----------------------------------------------

    def sigma_line(self, direction):
        """Minkowski norm of the Euclidean unit vector along ``direction``."""
        d = _as_vecs(direction)
        r = np.hypot(d[..., 0], d[..., 1])
        if np.any(r == 0):
            raise ZeroVector("line direction is zero")
        return self.norm(d / r[..., None])

    def sigma_plane(self) -> float:
        """pi over the Euclidean area of the unit ball."""
        return math.pi / self.area

    # ---- arc-length rotations about the origin -----------------------

    def arc_coordinate(self, x):
        """Raw Minkowski arc coordinate of the boundary point in direction x."""
        x = _as_vecs(x)
        return self.arc(self.unit_circle.polar[1](x))

    def boundary_at(self, S):
        """Unit-circle point at raw arc coordinate S."""
        return self.unit_circle(self.arc.inverse(S))

    def rotate_raw(self, x, phi):
        """Arc-length rotation of x about the origin by raw arc angle phi.

        The boundary point x/||x|| moves by Minkowski arc length phi
        counterclockwise along the unit circle and the norm is kept.
        """
        x = _as_vecs(x)
        phi = np.asarray(phi, dtype=float)
        x, phi = np.broadcast_arrays(x, phi[..., None])
        phi = phi[..., 0]
        nx = self.norm(x)
        zero = nx == 0
        xs = np.where(zero[..., None], np.array([1.0, 0.0]), x)
        S = self.arc(self.unit_circle.polar[1](xs))
        t2 = self.arc.inverse(np.atleast_1d(S + phi)).reshape(np.shape(S))
        out = nx[..., None] * self.unit_circle(t2)
        return np.where(zero[..., None], 0.0, out)

    def raw_angle(self, theta: float) -> float:
        """Normalized angle (full turn 2 pi) to raw arc-length angle."""
        return theta * self.circumference / TWO_PI

    def normalized_angle(self, phi: float) -> float:
        return phi * TWO_PI / self.circumference

    def __repr__(self):
        return f"PlaneContext({self.label})"


# --------------------------------------------------------------------------
# module-level operations mirroring the methods

def norm(ctx: PlaneContext, v):
    return ctx.norm(v)


def semi_inner(ctx: PlaneContext, x, y):
    return ctx.semi_inner(x, y)


def is_birkhoff_orthogonal(ctx: PlaneContext, x, y, tol: float = DEFAULT_TOL) -> bool:
    return ctx.is_birkhoff_orthogonal(x, y, tol)


def q_normal(ctx: PlaneContext, x):
    return ctx.q_normal(x)


def q_inverse(ctx: PlaneContext, x):
    return ctx.q_inverse(x)


def sigma_line(ctx: PlaneContext, direction):
    return ctx.sigma_line(direction)


def sigma_plane(ctx: PlaneContext) -> float:
    return ctx.sigma_plane()


def circumference(ctx: PlaneContext) -> float:
    return ctx.circumference


def random_symmetric_polygon(rng: np.random.Generator, n_vertices: int = 12,
                             rmin: float = 0.5, rmax: float = 1.5) -> np.ndarray:
    """Vertices of a random centrally symmetric convex polygon (counterclockwise)."""
    if n_vertices % 2 or n_vertices < 4:
        raise ValueError("need an even vertex count >= 4")
    half = n_vertices // 2
    for _ in range(10000):
        ang = np.sort(rng.uniform(0.0, math.pi, half))
        rad = rng.uniform(rmin, rmax, half)
        pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=-1)
        allp = np.vstack([pts, -pts])
        hull = ConvexHull(allp)
        if len(hull.vertices) == n_vertices:
            return allp[hull.vertices]
    raise RuntimeError("could not sample a polygon with the requested vertex count")


def _is_symmetric_set(v, tol=1e-9) -> bool:
    v = np.asarray(v, dtype=float)
    scale = max(1.0, float(np.max(np.abs(v))))
    for p in v:
        if np.min(np.hypot(*(v + p).T)) > tol * scale:
            return False
    return True


def _shoelace(v) -> float:
    v = np.asarray(v, dtype=float)
    return 0.5 * float(np.sum(cross(v, np.roll(v, -1, axis=0))))


def _read_pairs(path: Path) -> np.ndarray:
    rows = []
    for raw in Path(path).read_text().splitlines():
        s = raw.split("#", 1)[0].strip()
        if s:
            rows.append([float(x) for x in s.replace(",", " ").split()])
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise BadBall(f"{path}: expected one 'x y' pair per line")
    return arr
