from pathlib import Path

import numpy as np
import pytest

from mkin.cli import main
from mkin.errors import BadParams, ParseError, UnknownKey, UnresolvedName
from mkin.scenario import load_scenario, parse_scenario, print_scenario, strip_meta
from mkin.svg import Polyline, fmt, render_svg

SCEN = Path(__file__).resolve().parents[1] / "scenarios"

MINIMAL = """name = t
ball = l4
curve a {
  kind = circle
  radius = 1
}
curve b {
  kind = homothet
  of = a
  center = 1, 0
  ratio = 0.5
}
motion {
  fixed = a
  moving = b
}
"""


def test_parse_errors_carry_location():
    with pytest.raises(ParseError) as err:
        parse_scenario("name = x\nball = l0\n")
    assert err.value.line == 2
    with pytest.raises(UnknownKey):
        parse_scenario("nmae = x\n")
    with pytest.raises(UnresolvedName):
        parse_scenario(MINIMAL.replace("fixed = a", "fixed = zz"))
    with pytest.raises(ParseError):
        parse_scenario("curve a {\n  kind = circle\n")


@pytest.mark.parametrize("name", sorted(p.name for p in SCEN.glob("*.scn")))
def test_round_trip(name):
    sc = load_scenario(SCEN / name)
    assert strip_meta(parse_scenario(print_scenario(sc))) == strip_meta(sc)


def test_minimal_round_trip():
    sc = parse_scenario(MINIMAL)
    assert strip_meta(parse_scenario(print_scenario(sc))) == strip_meta(sc)


def test_fmt():
    assert fmt(-0.0) == "0"
    assert fmt(-1e-9) == "0"
    assert fmt(1.23456789) == "1.234568"


def test_svg_deterministic_and_nonempty():
    pts = np.array([[0.0, 0.0], [1.0, 2.0], [np.nan, np.nan], [3.0, -1.0]])
    a = render_svg([Polyline("c", pts)], [("K", (0.0, 0.0))])
    assert a == render_svg([Polyline("c", pts.copy())], [("K", (0.0, 0.0))])
    assert 'd="M0 0 L1 -2 M3 1"' in a
    with pytest.raises(BadParams):
        render_svg([Polyline("c", np.full((3, 2), np.nan))])


def test_norm_info(capsys):
    assert main(["norm-info", "l4"]) == 0
    out = capsys.readouterr().out
    assert "circumference 6.79386964726" in out


def test_rotate_command(capsys):
    assert main(["rotate", "linf", "arclen", "--theta", "0.7853981633974483", "--point", "1,0"]) == 0
    assert capsys.readouterr().out.strip() == "1,1"


def test_usage_and_parse_errors_exit_2(tmp_path):
    assert main(["verify"]) == 2
    bad = tmp_path / "bad.scn"
    bad.write_text("ball = l0\n")
    assert main(["verify", str(bad)]) == 2


def test_roll_writes_files(tmp_path, capsys):
    assert main(["roll", str(SCEN / "cycloid.scn"), "--out", str(tmp_path)]) == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert "cycloid.svg" in names and "cycloid_roulette_0.csv" in names
    rows = (tmp_path / "cycloid_roulette_0.csv").read_text().splitlines()
    assert rows[0] == "s,x,y,vx,vy,ax,ay"


def test_verify_only_and_exit_codes(tmp_path, capsys):
    assert main(["verify", str(SCEN / "cycloid.scn"), "--only", "es1", "--out", str(tmp_path)]) == 0
    report = (tmp_path / "cycloid_report.csv").read_text().splitlines()
    assert report[0] == "quantity,lhs,rhs,residual,h,observed_order"
    assert main(["verify", str(SCEN / "failing.scn"), "--out", str(tmp_path / "f")]) == 1


def test_demo_rejects_small_n(tmp_path):
    assert main(["demo", "hypocycloid", "--n", "1", "--out", str(tmp_path)]) == 2
