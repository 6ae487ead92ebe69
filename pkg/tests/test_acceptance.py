"""Acceptance suite: one test (or a few sub-tests) per criterion, each at its stated tolerance.

Every criterion also records a one-line verdict that is printed in the
pytest terminal summary under "acceptance criteria".
"""

import filecmp
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import record
from mkin import curvature as cv
from mkin import kinematics as kin
from mkin.cli import main
from mkin.curves import ArcLengthCurve, arc_length, circle, line, nephroid
from mkin.plane import PlaneContext, random_symmetric_polygon
from mkin.rotation import GeneralRotation, rotate, unit_circle_measure

ROOT = Path(__file__).resolve().parents[1]
L4 = PlaneContext.lp(4.0)
EUC = PlaneContext.euclidean()


def _quarter(q):
    return np.stack([-q[:, 1], q[:, 0]], axis=-1)


def test_c01_linf_quarter_rotation():
    rng = np.random.default_rng(1)
    ctx = PlaneContext.lp(math.inf)
    d = rng.normal(size=(1000, 2))
    boundary = d / ctx.norm(d)[:, None]
    interior = boundary * rng.uniform(0.01, 0.99, (1000, 1))
    rot = GeneralRotation(unit_circle_measure(ctx), math.pi / 2)
    t0 = time.perf_counter()
    err = max(np.abs(rotate(rot, q) - _quarter(q)).max() for q in (boundary, interior))
    dt = time.perf_counter() - t0
    ok = err <= 1e-9 and dt < 1.0
    record(1, "l∞ quarter rotation", ok, f"max error {err:.2e}, {dt:.2f} s")
    assert err <= 1e-9
    assert dt < 1.0


def test_c02_group_laws_and_homothety():
    rng = np.random.default_rng(2)
    balls = [PlaneContext.lp(math.inf), L4, PlaneContext.polygon(random_symmetric_polygon(rng, 12))]
    t0 = time.perf_counter()
    worst = 0.0
    for ctx in balls:
        meas = unit_circle_measure(ctx)
        q = rng.uniform(-2, 2, (20, 2))
        for a, b in rng.uniform(-2 * math.pi, 2 * math.pi, (200, 2)):
            r1, r2 = GeneralRotation(meas, a), GeneralRotation(meas, b)
            lhs = rotate(r1, rotate(r2, q))
            worst = max(worst, np.abs(lhs - rotate(GeneralRotation(meas, a + b), q)).max())
            worst = max(worst, np.abs(rotate(r1.inverse(), rotate(r1, q)) - q).max())
            rq = rotate(r1, q)
            for alpha in (0.5, 2.0, 3.0):
                worst = max(worst, np.abs(rotate(r1, alpha * q) - alpha * rq).max())
    dt = time.perf_counter() - t0
    record(2, "rotation group laws and homothety invariance", worst <= 1e-8 and dt < 5.0,
           f"max residual {worst:.2e}, {dt:.2f} s")
    assert worst <= 1e-8
    assert dt < 5.0


def test_c03_golab_bound():
    rng = np.random.default_rng(3)
    lengths = [PlaneContext.polygon(random_symmetric_polygon(rng, 2 * int(rng.integers(2, 7)))).circumference
               for _ in range(50)]
    lp = {p: PlaneContext.lp(p).circumference for p in (1.0, 1.5, 2.0, 4.0, math.inf)}
    in_range = all(6 - 1e-9 <= v <= 8 + 1e-9 for v in lengths + list(lp.values()))
    ends = abs(lp[1.0] - 8) <= 1e-6 and abs(lp[math.inf] - 8) <= 1e-6 and abs(lp[2.0] - 2 * math.pi) <= 1e-6
    record(3, "Gołąb bound", in_range and ends,
           f"polygons in [{min(lengths):.4f}, {max(lengths):.4f}], l1 {lp[1.0]:.9f}, l∞ {lp[math.inf]:.9f}, l2 {lp[2.0]:.9f}")
    assert in_range and ends


def test_c04_nephroid_arc_length():
    c = nephroid()
    quarter = arc_length(c, EUC, 0.0, math.pi / 2)
    oracle = [(t1, t2, 3 * (math.cos(t1) - math.cos(t2))) for t1, t2 in ((0.3, 1.1), (0.7, 2.2), (1.4, 2.9))]
    errs = [abs(arc_length(c, EUC, t1, t2) - v) for t1, t2, v in oracle]
    ok = abs(quarter - 3.0) <= 1e-6 and max(errs) <= 1e-6
    record(4, "nephroid arc length", ok, f"[0, pi/2] = {quarter:.12f}, cosine-form errors {max(errs):.1e}")
    assert ok


def test_c05_euclidean_reduction():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(200, 2))
    q_err = np.abs(EUC.q_normal(x) - _quarter(x)).max()
    sm_err = 0.0
    for a, b in rng.normal(size=(200, 2, 2)):
        sin = abs(a[0] * b[1] - a[1] * b[0]) / (np.hypot(*a) * np.hypot(*b))
        sm_err = max(sm_err, abs(cv.busemann_sine(EUC, a, b) - sin))
    k_err = max(abs(cv.busemann_curvature_limit(ArcLengthCurve(circle(radius=r), EUC), EUC, 0.8) - 1 / r)
                for r in (0.5, 2.0, 3.0))
    r = 1.5
    motion = kin.EuclideanMotion.from_angle(lambda f: np.array([-r * f, r]), (-4.0, 0.0))
    pol = kin.euclidean_polodes(motion, 401)
    line_err = np.abs(pol.fixed[:, 1]).max()
    circ_err = np.abs(np.hypot(*pol.moving.T) - r).max()
    slip = np.abs(pol.fixed_length - pol.moving_length).max()
    ok = q_err <= 1e-12 and sm_err <= 1e-9 and k_err <= 1e-6 and max(line_err, circ_err, slip) <= 1e-6
    record(5, "Euclidean reduction", ok,
           f"Q {q_err:.1e}, sm {sm_err:.1e}, curvature {k_err:.1e}, polodes {max(line_err, circ_err, slip):.1e}")
    assert ok


def _statement1_states():
    rng = np.random.default_rng(6)
    m = kin.circle_on_circle(L4, 1.0, 0.5, 0.4)
    states = [(float(rng.uniform(0.1, 0.95) * m.s_max), rng.uniform(-1.0, 1.0, 2)) for _ in range(20)]
    return m, states


def test_c06_statement1_instantaneous_pole():
    t0 = time.perf_counter()
    m, states = _statement1_states()
    sweep = [max(kin.instantaneous_pole_check(None, m, L4, s, p=p, h=h) for s, p in states)
             for h in (1e-4, 1e-5, 1e-6)]
    dt = time.perf_counter() - t0
    bound = sweep[1] <= 1e-4
    monotone = sweep[0] > sweep[1] > sweep[2]
    record(6, "Statement 1 (l4 circle-on-circle)", bound and monotone and dt < 10,
           "max residual at h=1e-4,1e-5,1e-6: " + ", ".join(f"{v:.3e}" for v in sweep) + f", {dt:.1f} s")
    assert bound, f"residual {sweep[1]:.3e} at h = 1e-5"
    assert monotone
    assert dt < 10


def test_c06_statement1_holds_at_start_state():
    # not the criterion itself: R(0) is the identity, so the property is exact at s = 0
    m, states = _statement1_states()
    res = max(kin.instantaneous_pole_check(None, m, L4, 0.0, p=p, h=1e-5) for _, p in states)
    assert res <= 1e-8


def test_c07_hypocycloid_cusps():
    counts = {}
    for n in (2, 3, 5):
        m = kin.hypocycloid(EUC, n)
        counts[n] = len(kin.count_cusps(m, m.moving(0.0), threshold=1e-3))
    m = kin.hypocycloid(EUC, 2)
    pts = kin.roulette_trace(m, m.moving(0.0)).position
    c = pts - pts.mean(axis=0)
    normal = np.linalg.svd(c, full_matrices=False)[2][1]
    coll = np.abs(c @ normal).max()
    ok = all(counts[n] == n for n in counts) and coll <= 1e-6
    record(7, "hypocycloid cusps", ok, f"cusps {counts}, n=2 line distance {coll:.1e}")
    assert ok


def _cycloid():
    return kin.RollingMotion(line((0, 0), (1, 0)), circle((0, 1), 1, -math.pi / 2), EUC, s_max=10)


def test_c08_first_es_euclidean():
    r = cv.es_first(_cycloid(), EUC, (0.0, 2.0))
    OP = float(np.hypot(*(r.O - r.P)))
    ok = (abs(r.KP - 2) <= 1e-6 and abs(r.KI - 1) <= 1e-6 and abs(r.KO + 2) <= 1e-6 and abs(OP - 4) <= 1e-6)
    record(8, "first Euler–Savary", ok, f"cycloid KP {r.KP:.9f}, KI {r.KI:.9f}, KO {r.KO:.9f}, |OP| {OP:.9f}")
    assert ok


def test_c08_first_es_l4():
    t0 = time.perf_counter()
    m = kin.circle_on_circle(L4, 1.0, 0.5, 0.4)
    pts = cv.fan_points(L4, m.fixed(0.0), 8, 0.3)
    res = [cv.es_first(m, L4, P, 1e-2) for P in pts]
    dt = time.perf_counter() - t0
    worst = max(r.residual_first for r in res)
    order = min(r.order for r in res)
    ok = worst <= 2e-2 and order >= 1.0 and dt < 60
    record(8, "first Euler–Savary", ok, f"l4 max residual {worst:.3e}, min order {order:.2f}, {dt:.1f} s")
    assert order >= 1.0
    assert worst <= 2e-2


def test_c09_second_es_euclidean_wheel():
    r = 2.0
    m = kin.RollingMotion(line((0, 0), (1, 0)), circle((0, r), r, -math.pi / 2), EUC, s_max=10)
    s2 = cv.es_second(m, EUC)
    ok = abs(abs(s2.lhs) - 1 / r) <= 1e-6 and abs(s2.alpha_K - r) <= 1e-6 and s2.residual <= 1e-6
    record(9, "second Euler–Savary and combined formula", ok,
           f"wheel |Δχ| {abs(s2.lhs):.9f}, alpha {s2.alpha_K:.9f}")
    assert ok


def test_c09_second_es_l4():
    m = kin.circle_on_circle(L4, 1.0, 0.5, 0.4)
    seq = [cv.es_second(m, L4, h) for h in (4e-2, 2e-2, 1e-2)]
    last = seq[-1]
    ok = last.residual <= 2e-2 and last.order >= 1.0
    record(9, "second Euler–Savary and combined formula", ok,
           f"l4 dual-route residual {last.residual:.1e}, order {last.order:.2f}")
    assert ok


def test_c09_combined_formula_l4():
    res = cv.es_combined(L4, 1.0, 0.5, 0.4, fan=16)
    worst = res.max_residual
    ok = len(res.rows) == 16 and worst <= 5e-2
    record(9, "second Euler–Savary and combined formula", ok,
           f"combined max residual {worst:.3e} on {len(res.rows)} points (scale {res.scale:.6f})")
    assert worst <= 5e-2


def test_c10_inflection_curve():
    ic = cv.inflection_curve(_cycloid(), EUC, 256)
    center = 0.5 * (ic.K + ic.L)
    rad = 0.5 * np.hypot(*(ic.L - ic.K))
    thales = np.abs(np.hypot(*(ic.locus - center).T) - rad).max()
    m = kin.circle_on_circle(L4, 1.0, 0.5, 0.4)
    ic4 = cv.inflection_curve(m, L4, 256)
    star = cv.starlike_fan_test(ic4)
    mem = ic4.membership_residuals(L4, m).max()
    spread = cv.minkowski_circle_spread(L4, ic4.locus)[0]
    ok = thales <= 1e-6 and star and mem <= 1e-8 and spread > 1e-3
    record(10, "inflection curve", ok,
           f"Thales {thales:.1e}, l4 starlike {star}, membership {mem:.1e}, spread {spread:.3f}")
    assert ok


def test_c11_cli_determinism(tmp_path):
    scen = ["cycloid.scn", "hypocycloid3.scn", "l4_full.scn"]
    same = True
    for name in scen:
        a, b = tmp_path / "a", tmp_path / "b"
        main(["verify", str(ROOT / "scenarios" / name), "--out", str(a)])
        main(["verify", str(ROOT / "scenarios" / name), "--out", str(b)])
        files = sorted(p.name for p in a.iterdir() if p.suffix in (".csv", ".svg"))
        same &= bool(files) and all(filecmp.cmp(a / f, b / f, shallow=False) for f in files)
    rc_ok = main(["verify", str(ROOT / "scenarios" / "cycloid.scn"), "--out", str(tmp_path / "c")])
    rc_bad = main(["verify", str(ROOT / "scenarios" / "failing.scn"), "--out", str(tmp_path / "d")])
    ok = same and rc_ok == 0 and rc_bad == 1
    record(11, "CLI determinism and exit codes", ok, f"byte-identical {same}, exit codes {rc_ok}/{rc_bad}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
