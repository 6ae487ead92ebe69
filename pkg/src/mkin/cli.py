"""Command-line front end: ``mkin <subcommand> ...``.

Exit codes: 0 when every enabled check passes, 1 when a check fails or
errors, 2 for usage and parse errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import curvature as cv
from . import kinematics as kin
from .curves import (ArcLengthCurve, StarlikeCurve, circle, heliocentric_ellipse, homothet,
                     line, load_samples, minkowski_circle, nephroid)
from .errors import MkinError, ParseError, PoleCoincidence
from .plane import PlaneContext
from .rotation import (AngleMeasure, GeneralRotation, brass_check, compose, rotate,
                       unit_circle_measure)
from .scenario import Scenario, load_scenario, parse_scenario
from .svg import Polyline, emit_svg

G12 = "{:.12g}"


def g12(v) -> str:
    v = float(v)
    return "nan" if math.isnan(v) else G12.format(v)


@dataclass
class CheckRow:
    name: str
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    passed: bool
    h: float = math.nan
    orders: tuple = ()
    note: str = ""


@dataclass
class RunReport:
    rows: list = field(default_factory=list)
    files: list = field(default_factory=list)

    @property
    def exit_status(self) -> int:
        return 0 if all(r.passed for r in self.rows) else 1

    def text(self) -> str:
        out = []
        for r in self.rows:
            flag = "PASS" if r.passed else "FAIL"
            orders = ",".join(g12(o) for o in r.orders)
            line_ = (f"{flag} {r.name}: lhs={g12(r.lhs)} rhs={g12(r.rhs)} residual={g12(r.residual)} "
                     f"tol={g12(r.tolerance)}")
            if r.orders:
                line_ += f" orders={orders}"
            if r.note:
                line_ += f" ({r.note})"
            out.append(line_)
        out.append(f"exit status {self.exit_status}")
        return "\n".join(out) + "\n"

    def csv(self) -> str:
        out = ["quantity,lhs,rhs,residual,h,observed_order"]
        for r in self.rows:
            order = g12(r.orders[0]) if r.orders else "nan"
            out.append(f"{r.name},{g12(r.lhs)},{g12(r.rhs)},{g12(r.residual)},{g12(r.h)},{order}")
        return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# building objects from a scenario

def build_context(sc: Scenario, base_dir=None) -> PlaneContext:
    return PlaneContext.from_spec(sc.ball_spec(), base_dir)


def build_curve(sc: Scenario, name: str, ctx, base_dir=None, _seen=()):
    c = sc.curves[name]
    kind = c["kind"]
    if kind == "circle":
        return circle(c.get("center", (0.0, 0.0)), float(c.get("radius", 1.0)),
                      float(c.get("start", 0.0)), bool(c.get("clockwise", False)))
    if kind == "line":
        return line(c.get("point", (0.0, 0.0)), c.get("direction", (1.0, 0.0)),
                    float(c.get("extent", 100.0)))
    if kind == "mcircle":
        return minkowski_circle(ctx, c.get("center", (0.0, 0.0)), float(c.get("radius", 1.0)))
    if kind == "ellipse":
        return heliocentric_ellipse(float(c.get("p", 1.0)), float(c.get("eps", 0.0)))
    if kind == "nephroid":
        return nephroid()
    if kind == "samples":
        path = Path(c["file"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return load_samples(path)
    base = build_curve(sc, c["of"], ctx, base_dir)
    lo, hi = base.domain
    center = c.get("center", tuple(base(0.0 if lo <= 0.0 <= hi else lo)))
    return homothet(base, center, float(c.get("ratio", 1.0)))


def build_motion(sc: Scenario, ctx, base_dir=None) -> kin.RollingMotion:
    m = sc.motion
    steps = int(m.get("steps", 512))
    preset = m.get("preset")
    if preset == "circle_on_circle":
        return kin.circle_on_circle(ctx, float(m.get("radius", 1.0)), float(m.get("ratio", 0.5)),
                                    float(m.get("angle", 0.4)), steps)
    if preset == "hypocycloid":
        return kin.hypocycloid(ctx, int(m.get("n", 3)), steps)
    fixed = build_curve(sc, m["fixed"], ctx, base_dir)
    moving = build_curve(sc, m["moving"], ctx, base_dir)
    return kin.RollingMotion(fixed, moving, ctx, steps, m.get("s_max"))


def tracked_points(sc: Scenario, m: kin.RollingMotion, ctx) -> np.ndarray:
    if sc.points:
        return np.asarray(sc.points, dtype=float)
    if sc.motion.get("preset") == "hypocycloid":
        return np.asarray([m.moving(0.0)])
    return cv.fan_points(ctx, m.fixed(0.0), 8, 0.3)


def build_measure(sc: Scenario, ctx) -> AngleMeasure:
    if sc.measure == "arclen":
        return unit_circle_measure(ctx)
    return AngleMeasure(StarlikeCurve(ctx.unit_circle, (0.0, 0.0)), "area")


# --------------------------------------------------------------------------
# checks

def _guard(name, tol, fn):
    try:
        return fn()
    except MkinError as exc:
        return [CheckRow(name, math.nan, math.nan, math.inf, tol, False, note=f"{type(exc).__name__}: {exc}")]


def check_statement1(sc, ctx, m, pts):
    tol = sc.tol("statement1")
    rng = np.random.default_rng(sc.seed)
    states = [(float(rng.uniform(0.05, 0.95) * m.s_max), pts[i % len(pts)]) for i in range(20)]

    def worst(cases, h):
        vals = []
        for s, p in cases:
            try:
                vals.append(kin.instantaneous_pole_check(None, m, ctx, s, p=p, h=h))
            except PoleCoincidence:
                pass
        return max(vals) if vals else math.nan

    maxima = [worst(states, h) for h in (1e-4, 1e-5, 1e-6)]
    at0 = worst([(0.0, p) for p in pts], 1e-5)
    monotone = maxima[0] > maxima[1] > maxima[2]
    # the monotone sweep is reported; the gate is the bound at h = 1e-5
    ok = maxima[1] <= tol
    note = "h=1e-4,1e-5,1e-6: " + ", ".join(g12(v) for v in maxima) + ("" if monotone else "; not monotone")
    return [CheckRow("statement1", maxima[1], 0.0, maxima[1], tol, ok, 1e-5, note=note),
            CheckRow("statement1_s0", at0, 0.0, at0, tol, at0 <= tol, 1e-5)]


def check_es1(sc, ctx, m, pts):
    tol = sc.tol("es1")
    h = float(sc.motion.get("h", cv.H_DEFAULT))
    rows = []
    for i, P in enumerate(pts):
        try:
            r = cv.es_first(m, ctx, P, h)
        except MkinError as exc:
            rows.append(CheckRow(f"es1[{i}]", math.nan, math.nan, math.inf, tol, False, h,
                                 note=type(exc).__name__))
            continue
        OP = float(ctx.norm(r.P - r.O))
        rhs = r.KP ** 2 / float(ctx.norm(r.P - r.I))
        ok = r.residual_first <= tol and r.order >= 1.0
        rows.append(CheckRow(f"es1[{i}]", OP, rhs, r.residual_first, tol, ok, h, (r.order,),
                             note=f"directed residual {g12(r.residual_directed)}"))
    return rows


def check_es2(sc, ctx, m, pts):
    tol = sc.tol("es2")
    h = float(sc.motion.get("h", cv.H_DEFAULT))
    r = cv.es_second(m, ctx, h)
    return [CheckRow("es2", r.lhs, r.rhs, r.residual, tol, r.residual <= tol and r.order >= 1.0,
                     h, (r.order,), note=f"alpha_K {g12(r.alpha_K)}")]


def check_combined(sc, ctx, m, pts, base_dir=None):
    tol = sc.tol("combined")
    h = float(sc.motion.get("h", cv.H_DEFAULT))
    lam = cv.unit_area_scale(ctx)
    sctx = ctx.scaled(lam)
    ms = build_motion(sc, sctx, base_dir)
    fan = cv.fan_points(sctx, ms.fixed(0.0), 16, 0.3)
    rows = cv.combined_rows(ms, sctx, fan, h)
    worst = max(rows, key=lambda r: r.residual)
    return [CheckRow("combined", worst.lhs, worst.rhs, worst.residual, tol, worst.residual <= tol, h,
                     note=f"scale {g12(lam)}, {len(rows)} points")]


def check_brass(sc, ctx, meas):
    tol = sc.tol("brass")
    r = brass_check(meas, tol=tol)
    return [CheckRow("brass", r.total, 2 * math.pi, max(abs(r.total - 2 * math.pi), r.max_asymmetry),
                     tol, r.all_ok(), note=f"max cell {g12(r.max_cell)}")]


def check_group_laws(sc, ctx, meas):
    tol = sc.tol("group_laws")
    rng = np.random.default_rng(sc.seed)
    q = rng.uniform(-2, 2, (50, 2))
    worst = 0.0
    for _ in range(40):
        a, b = rng.uniform(-2 * math.pi, 2 * math.pi, 2)
        r1, r2 = GeneralRotation(meas, a), GeneralRotation(meas, b)
        worst = max(worst, float(np.abs(rotate(r1, rotate(r2, q)) - rotate(compose(r1, r2), q)).max()))
        worst = max(worst, float(np.abs(rotate(r1.inverse(), rotate(r1, q)) - q).max()))
        for alpha in (0.5, 2.0, 3.0):
            c = meas.center
            worst = max(worst, float(np.abs(rotate(r1, c + alpha * (q - c))
                                            - (c + alpha * (rotate(r1, q) - c))).max()))
    return [CheckRow("group_laws", worst, 0.0, worst, tol, worst <= tol)]


def check_inflection(sc, ctx, m, ic):
    tol = sc.tol("inflection")
    mem = float(ic.membership_residuals(ctx, m).max())
    star = cv.starlike_fan_test(ic)
    return [CheckRow("inflection", mem, 0.0, mem, tol, mem <= tol and star,
                     note="starlike" if star else "not starlike")]


def check_cusps(sc, ctx, m, pts):
    n = int(sc.motion.get("n", 3))
    found = kin.count_cusps(m, pts[0], threshold=sc.tol("cusps"))
    return [CheckRow("cusps", len(found), n, abs(len(found) - n), 0.5, len(found) == n)]


# --------------------------------------------------------------------------
# running a scenario

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MKIN_THREADS", "1")))
    except ValueError:
        return 1


def write_csv(path: Path, header: str, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for r in rows:
            fh.write(",".join(g12(v) for v in r) + "\n")
    return path


def run(sc: Scenario, out_dir=None, base_dir=None, only=None, with_checks: bool = True,
        inflection_only: bool = False) -> RunReport:
    """Execute a scenario: traces, inflection curve, plot and enabled checks."""
    report = RunReport()
    out = Path(out_dir if out_dir is not None else sc.output.get("dir", "out"))
    prefix = sc.output.get("prefix", sc.name)
    ctx = build_context(sc, base_dir)
    meas = build_measure(sc, ctx)
    checks = sc.enabled() if with_checks else []
    if only is not None:
        checks = ["group_laws" if only == "laws" else only]
    geometry, marks = [], []
    m = ic = None
    pts = np.empty((0, 2))
    if sc.motion:
        try:
            m = build_motion(sc, ctx, base_dir)
        except MkinError as exc:
            report.rows.append(CheckRow("motion", math.nan, math.nan, math.inf, 0.0, False,
                                        note=f"{type(exc).__name__}: {exc}"))
    if m is not None:
        pts = tracked_points(sc, m, ctx)
        fixed = m.fixed(np.linspace(m.fixed.domain[0], m.fixed.domain[1], 721)) if m.fixed.closed \
            else m.fixed(np.linspace(0.0, m.s_max, 721))
        geometry.append(Polyline("fixed_polode", fixed, m.fixed.closed))
        span = np.linspace(m.moving.domain[0], m.moving.domain[1], 721) if m.moving.closed \
            else np.linspace(0.0, m.s_max, 721)
        geometry.append(Polyline("moving_polode", m.moving(span), m.moving.closed))
        if not inflection_only:
            for i, p in enumerate(pts):
                tr = kin.roulette_trace(m, p, h=1e-4)
                rows = np.column_stack([tr.s, tr.position, tr.velocity, tr.acceleration])
                report.files.append(write_csv(out / f"{prefix}_roulette_{i}.csv",
                                              "s,x,y,vx,vy,ax,ay", rows))
                geometry.append(Polyline(f"roulette_{i}", tr.position))
        if ctx.smooth and ctx.strictly_convex:
            try:
                ic = cv.inflection_curve(m, ctx, 256)
            except MkinError:
                ic = None
        if ic is not None:
            rows = np.column_stack([ic.directions, ic.points])
            report.files.append(write_csv(out / f"{prefix}_inflection.csv", "dir_x,dir_y,px,py", rows))
            geometry.append(Polyline("inflection_curve", ic.points, False, "#000000"))
            geometry.append(Polyline("return_curve", ic.return_points, False, "#7f7f7f", dashed=True))
            marks += [("K", tuple(ic.K)), ("L", tuple(ic.L))]
    if not geometry:
        geometry.append(Polyline("unit_circle", ctx.unit_circle.sample(720), True))
    report.files.append(emit_svg(geometry, marks, out / f"{prefix}.svg"))

    tasks = []
    for name in checks:
        tol = sc.tol(name)
        if name in ("brass", "group_laws"):
            fn = {"brass": check_brass, "group_laws": check_group_laws}[name]
            tasks.append((name, tol, lambda fn=fn: fn(sc, ctx, meas)))
        elif m is None:
            tasks.append((name, tol, lambda name=name: [CheckRow(name, math.nan, math.nan, math.inf,
                                                                  sc.tol(name), False, note="no motion")]))
        elif name == "inflection":
            tasks.append((name, tol, lambda: check_inflection(sc, ctx, m, ic) if ic is not None
                          else [CheckRow("inflection", math.nan, 0.0, math.inf, tol, False, note="no curve")]))
        elif name == "combined":
            tasks.append((name, tol, lambda: check_combined(sc, ctx, m, pts, base_dir)))
        else:
            fn = {"statement1": check_statement1, "es1": check_es1, "es2": check_es2,
                  "cusps": check_cusps}[name]
            tasks.append((name, tol, lambda fn=fn: fn(sc, ctx, m, pts)))
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        futures = [pool.submit(_guard, n, t, f) for n, t, f in tasks]
        for fut in futures:
            report.rows.extend(fut.result())
    if checks:
        rp = out / f"{prefix}_report.txt"
        rp.write_text(report.text(), encoding="utf-8")
        rc = out / f"{prefix}_report.csv"
        rc.write_text(report.csv(), encoding="utf-8")
        report.files += [rp, rc]
    return report


# --------------------------------------------------------------------------
# argument handling

def _point(text: str) -> np.ndarray:
    try:
        x, y = (float(v) for v in text.strip("() ").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}") from None
    return np.array([x, y])


def _ball(text: str) -> PlaneContext:
    sc = Scenario(ball=text)
    return PlaneContext.from_spec(sc.ball_spec())


def hypocycloid_scenario(n: int) -> Scenario:
    return parse_scenario(
        f"name = hypocycloid{n}\nball = euclidean\n"
        f"motion {{\n  preset = hypocycloid\n  n = {n}\n  steps = {128 * n}\n}}\n"
        "verify {\n  cusps = true\n}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mkin", description="Rotations, roulettes and Euler–Savary checks in normed planes")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("norm-info", help="circumference, area and sigma of a unit ball")
    p.add_argument("ball")
    p = sub.add_parser("rotate", help="apply a general rotation about the origin")
    p.add_argument("ball")
    p.add_argument("measure", choices=["arclen", "area"])
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--point", type=_point, required=True)
    for name, hlp in (("roll", "write roulette traces and the plot"),
                      ("inflection", "write the inflection curve and the plot")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("scenario")
        p.add_argument("--out")
    p = sub.add_parser("verify", help="run the enabled checks of a scenario")
    p.add_argument("scenario")
    p.add_argument("--only", choices=["es1", "es2", "combined", "statement1", "laws", "brass",
                                      "inflection", "cusps"])
    p.add_argument("--out")
    p = sub.add_parser("demo", help="built-in demonstrations")
    p.add_argument("which", choices=["hypocycloid"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--out", default="out")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.cmd == "norm-info":
            ctx = _ball(args.ball)
            print(f"ball {ctx.label}")
            print(f"circumference {g12(ctx.circumference)}")
            print(f"area {g12(ctx.area)}")
            print(f"sigma_plane {g12(ctx.sigma_plane())}")
            print(f"smooth {str(ctx.smooth).lower()}")
            print(f"strictly_convex {str(ctx.strictly_convex).lower()}")
            return 0
        if args.cmd == "rotate":
            ctx = _ball(args.ball)
            sc = Scenario(ball=args.ball, measure=args.measure)
            q = rotate(GeneralRotation(build_measure(sc, ctx), args.theta), args.point)
            print(f"{g12(q[0])},{g12(q[1])}")
            return 0
        if args.cmd == "demo":
            if args.n < 2:
                print("error: --n must be at least 2", file=sys.stderr)
                return 2
            report = run(hypocycloid_scenario(args.n), args.out)
            sys.stdout.write(report.text())
            return report.exit_status
        path = Path(args.scenario)
        sc = load_scenario(path)
        base = path.parent
        if args.cmd == "roll":
            report = run(sc, args.out, base, with_checks=False)
        elif args.cmd == "inflection":
            report = run(sc, args.out, base, with_checks=False, inflection_only=True)
        else:
            report = run(sc, args.out, base, only=args.only)
            sys.stdout.write(report.text())
            return report.exit_status
        for f in report.files:
            print(f)
        return report.exit_status
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MkinError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, OSError) else 1


if __name__ == "__main__":
    sys.exit(main())
