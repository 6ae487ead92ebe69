"""Scenario files: a flat ``key = value`` format with named blocks.

Grammar (one item per line, ``#`` starts a comment)::

    scenario := item*
    item     := key "=" value | header "{" item* "}"
    header   := "motion" | "verify" | "tolerances" | "output" | "curve" NAME
    value    := number | word | string | number "," number | point (";" point)*

Top-level keys: ``name``, ``ball``, ``measure``, ``points``, ``seed``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import ParseError, UnknownKey, UnresolvedName

CHECKS = ("statement1", "es1", "es2", "combined", "brass", "group_laws", "inflection", "cusps")
DEFAULT_TOL = {
    "statement1": 1e-4, "es1": 2e-2, "es2": 2e-2, "combined": 5e-2, "brass": 1e-8,
    "group_laws": 1e-8, "inflection": 1e-8, "cusps": 1e-3,
}

TOP_KEYS = {"name", "ball", "measure", "points", "seed"}
CURVE_KEYS = {
    "circle": {"center", "radius", "start", "clockwise"},
    "line": {"point", "direction", "extent"},
    "mcircle": {"center", "radius"},
    "ellipse": {"p", "eps"},
    "nephroid": set(),
    "samples": {"file"},
    "homothet": {"of", "center", "ratio"},
}
MOTION_KEYS = {"preset", "fixed", "moving", "steps", "s_max", "ratio", "radius", "angle", "n", "h"}
PRESETS = {"circle_on_circle", "hypocycloid"}
OUTPUT_KEYS = {"dir", "prefix"}

_BALL_RE = re.compile(r"^(euclidean|l(\d+(\.\d+)?|inf)|lp:\s*(\S+)|polygon:\S+|radial:\S+)$", re.I)


@dataclass
class Scenario:
    name: str = "scenario"
    ball: str = "euclidean"
    measure: str = "arclen"
    curves: dict = field(default_factory=dict)
    motion: dict = field(default_factory=dict)
    points: list = field(default_factory=list)
    verify: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = 0

    def enabled(self) -> list[str]:
        return [c for c in CHECKS if self.verify.get(c, False)]

    def tol(self, check: str) -> float:
        return float(self.tolerances.get(check, DEFAULT_TOL[check]))

    def ball_spec(self) -> str:
        """Normalize aliases such as ``l4`` and ``linf`` to ``lp:<p>``."""
        b = self.ball.strip().lower()
        if re.fullmatch(r"l(\d+(\.\d+)?|inf)", b):
            return "lp:" + b[1:]
        return self.ball


def _value(raw: str, line: int, col: int):
    s = raw.strip()
    if not s:
        raise ParseError("missing value", line, col)
    if len(s) >= 2 and s[0] == s[-1] == '"':
        return s[1:-1]
    if ";" in s or "," in s:
        try:
            pts = [tuple(float(v) for v in chunk.strip().strip("()").split(",")) for chunk in s.split(";")]
        except ValueError:
            raise ParseError(f"bad coordinate list {s!r}", line, col) from None
        if any(len(p) != 2 for p in pts):
            raise ParseError("coordinates need exactly two components", line, col)
        return pts if ";" in s else pts[0]
    low = s.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        v = float(s)
    except ValueError:
        return s
    return int(v) if re.fullmatch(r"[+-]?\d+", s) else v


def _check_ball(value, line, col):
    if not isinstance(value, str) or not _BALL_RE.match(value.strip()):
        raise ParseError(f"key 'ball': unknown ball kind {value!r}", line, col)
    b = value.strip().lower()
    m = re.fullmatch(r"l(\d+(\.\d+)?)", b) or re.fullmatch(r"lp:\s*([0-9.]+)", b)
    if m and float(m.group(1)) < 1:
        raise ParseError(f"key 'ball': exponent below 1 in {value!r}", line, col)


def parse_scenario(text: str) -> Scenario:
    sc = Scenario()
    block = None  # (kind, name, dict, header line)
    seen_blocks = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.strip()
        if not stripped:
            continue
        col0 = len(body) - len(body.lstrip()) + 1
        if stripped == "}":
            if block is None:
                raise ParseError("unmatched '}'", ln, col0)
            kind, name, data, hl = block
            _close_block(sc, kind, name, data, hl)
            block = None
            continue
        if stripped.endswith("{"):
            if block is not None:
                raise ParseError("blocks cannot nest", ln, col0)
            words = stripped[:-1].split()
            if not words:
                raise ParseError("block header without a name", ln, col0)
            kind = words[0].lower()
            if kind == "curve":
                if len(words) != 2:
                    raise ParseError("curve blocks need exactly one name", ln, col0)
                name = words[1]
                if name in sc.curves:
                    raise ParseError(f"curve {name!r} defined twice", ln, col0)
            elif kind in ("motion", "verify", "tolerances", "output"):
                if len(words) != 1:
                    raise ParseError(f"block {kind!r} takes no name", ln, col0)
                if kind in seen_blocks:
                    raise ParseError(f"block {kind!r} given twice", ln, col0)
                seen_blocks[kind] = ln
                name = kind
            else:
                raise UnknownKey(f"unknown block {words[0]!r}", ln, col0)
            block = (kind, name, {}, ln)
            continue
        if "=" not in stripped:
            raise ParseError(f"expected 'key = value', got {stripped!r}", ln, col0)
        key, _, rest = stripped.partition("=")
        key = key.strip()
        vcol = col0 + len(stripped) - len(rest.lstrip()) if rest.strip() else col0 + len(stripped)
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise ParseError(f"bad key {key!r}", ln, col0)
        val = _value(rest, ln, vcol)
        if block is None:
            _set_top(sc, key, val, ln, col0, vcol)
        else:
            kind, name, data, _ = block
            _check_block_key(kind, key, val, ln, col0, vcol)
            if key in data:
                raise ParseError(f"key {key!r} repeated", ln, col0)
            data[key] = val
    if block is not None:
        raise ParseError(f"block {block[1]!r} is not closed", block[3], 1)
    _resolve(sc)
    return sc


def _set_top(sc, key, val, ln, col, vcol):
    if key not in TOP_KEYS:
        raise UnknownKey(f"unknown key {key!r}", ln, col)
    if key == "ball":
        _check_ball(val, ln, vcol)
        sc.ball = str(val).strip()
    elif key == "measure":
        if val not in ("arclen", "area"):
            raise ParseError(f"key 'measure': unknown measure {val!r}", ln, vcol)
        sc.measure = val
    elif key == "points":
        pts = val if isinstance(val, list) else [val] if isinstance(val, tuple) else None
        if pts is None:
            raise ParseError("key 'points': expected x, y pairs separated by ';'", ln, vcol)
        sc.points = [tuple(p) for p in pts]
    elif key == "seed":
        if not isinstance(val, int):
            raise ParseError("key 'seed': expected an integer", ln, vcol)
        sc.seed = val
    else:
        sc.name = str(val)


def _check_block_key(kind, key, val, ln, col, vcol):
    if kind == "verify":
        if key not in CHECKS:
            raise UnknownKey(f"unknown check {key!r}", ln, col)
        if not isinstance(val, bool):
            raise ParseError(f"key {key!r}: expected true or false", ln, vcol)
    elif kind == "tolerances":
        if key not in CHECKS:
            raise UnknownKey(f"unknown check {key!r}", ln, col)
        if isinstance(val, bool) or not isinstance(val, (int, float)) or val <= 0:
            raise ParseError(f"key {key!r}: expected a positive number", ln, vcol)
    elif kind == "motion":
        if key not in MOTION_KEYS:
            raise UnknownKey(f"unknown motion key {key!r}", ln, col)
        if key == "steps" and (not isinstance(val, int) or val < 16):
            raise ParseError("key 'steps': expected an integer >= 16", ln, vcol)
        if key == "s_max" and (isinstance(val, bool) or not isinstance(val, (int, float)) or val <= 0):
            raise ParseError("key 's_max': expected a positive number", ln, vcol)
        if key == "preset" and val not in PRESETS:
            raise ParseError(f"key 'preset': unknown preset {val!r}", ln, vcol)
    elif kind == "output":
        if key not in OUTPUT_KEYS:
            raise UnknownKey(f"unknown output key {key!r}", ln, col)
    elif kind == "curve":
        allowed = {"kind"} | set().union(*CURVE_KEYS.values())
        if key not in allowed:
            raise UnknownKey(f"unknown curve key {key!r}", ln, col)
        if key == "kind" and val not in CURVE_KEYS:
            raise ParseError(f"key 'kind': unknown curve kind {val!r}", ln, vcol)


def _close_block(sc, kind, name, data, hl):
    if kind == "curve":
        if "kind" not in data:
            raise ParseError(f"curve {name!r} has no kind", hl, 1)
        extra = set(data) - {"kind"} - CURVE_KEYS[data["kind"]]
        if extra:
            raise UnknownKey(f"curve {name!r}: keys {sorted(extra)} do not apply to {data['kind']}", hl, 1)
        data["_line"] = hl
        sc.curves[name] = data
    elif kind == "motion":
        data["_line"] = hl
        sc.motion = data
    else:
        getattr(sc, kind).update(data)


def _resolve(sc: Scenario):
    for name, c in sc.curves.items():
        if c["kind"] == "homothet":
            ref = c.get("of")
            if ref not in sc.curves or ref == name:
                raise UnresolvedName(f"curve {name!r} refers to undefined curve {ref!r}", c["_line"], 1)
    m = sc.motion
    if m and "preset" not in m:
        for key in ("fixed", "moving"):
            ref = m.get(key)
            if ref is None:
                raise ParseError(f"motion needs '{key}' or a preset", m["_line"], 1)
            if ref not in sc.curves:
                raise UnresolvedName(f"motion {key} refers to undefined curve {ref!r}", m["_line"], 1)


# --------------------------------------------------------------------------
# printing

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        r = repr(v)
        return r if ("." in r or "e" in r or "n" in r) else r + ".0"
    if isinstance(v, tuple):
        return f"{_fmt(float(v[0]))}, {_fmt(float(v[1]))}"
    if isinstance(v, list):
        return "; ".join(f"({_fmt(float(p[0]))}, {_fmt(float(p[1]))})" for p in v)
    s = str(v)
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.:/-]*", s) and s.lower() not in ("true", "false", "yes", "no", "on", "off"):
        return s
    return f'"{s}"'


def print_scenario(sc: Scenario) -> str:
    out = [f"name = {_fmt(sc.name)}", f"ball = {sc.ball}", f"measure = {sc.measure}", f"seed = {sc.seed}"]
    if sc.points:
        out.append(f"points = {_fmt([tuple(p) for p in sc.points])}")
    for name, c in sc.curves.items():
        out.append(f"curve {name} {{")
        out += [f"  {k} = {_fmt(v)}" for k, v in c.items() if not k.startswith("_")]
        out.append("}")
    for kind in ("motion", "verify", "tolerances", "output"):
        data = getattr(sc, kind)
        items = [(k, v) for k, v in data.items() if not k.startswith("_")]
        if items:
            out.append(f"{kind} {{")
            out += [f"  {k} = {_fmt(v)}" for k, v in items]
            out.append("}")
    return "\n".join(out) + "\n"


def strip_meta(sc: Scenario) -> Scenario:
    """Copy without source-position bookkeeping, for comparisons."""
    curves = {n: {k: v for k, v in c.items() if not k.startswith("_")} for n, c in sc.curves.items()}
    motion = {k: v for k, v in sc.motion.items() if not k.startswith("_")}
    return Scenario(sc.name, sc.ball, sc.measure, curves, motion, list(sc.points), dict(sc.verify),
                    dict(sc.tolerances), dict(sc.output), sc.seed)


def load_scenario(path) -> Scenario:
    from pathlib import Path
    return parse_scenario(Path(path).read_text())
