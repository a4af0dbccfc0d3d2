"""Scene files: TOML documents declaring a ring, named objects and an ordered task list.

    [ring]
    vars = ["z1", "z2"]

    [foliation.F]
    generators = ["d1"]

    [map.f]
    components = ["z1*z2"]

    [field.H]
    epsilons = [0.1, 0.05, 0.025]
    entries = { "1,1" = "eps", "2,2" = "1/(1+abs2(z2))^2 + eps" }

    [chart.box]
    center = [0, 0, 0, 0]
    half_width = 1
    grid = 32

    [[task]]
    id = "t1"
    op = "nt-check"
    args = ["H", "box"]
    params = { k = 1 }

Every error found while validating is collected; parsing either returns a
fully validated :class:`SceneDoc` or raises :class:`SceneError`.
"""
from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from typing import Any

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ._parse import ParseError
from .expr import Expression
from .fields import Chart, HermitianField
from .foliation import RationalMap, VectorField, parse_vector_field
from .modules import PolyModule
from .poly import parse_poly

__all__ = [
    "SceneDoc",
    "FieldSpec",
    "ChartSpec",
    "TaskSpec",
    "SceneError",
    "LocatedError",
    "OPS",
    "parse_scene",
    "print_scene",
    "load_scene",
]


@dataclass(frozen=True)
class LocatedError:
    line: int | None
    col: int | None
    message: str

    def __str__(self):
        if self.line is None:
            return self.message
        return f"{self.line}:{self.col or 1}: {self.message}"


class SceneError(ValueError):
    def __init__(self, errors: list[LocatedError]):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


@dataclass(frozen=True)
class FieldSpec:
    entries: dict[tuple[int, int], str]
    epsilons: tuple[float, ...]


@dataclass(frozen=True)
class ChartSpec:
    center: tuple[float, ...]
    half_width: float
    grid: int


@dataclass(frozen=True)
class TaskSpec:
    id: str
    op: str
    args: tuple[str, ...]
    params: dict[str, Any] = field(default_factory=dict)


# op -> (argument kinds, required params, allowed params)
OPS: dict[str, tuple[tuple[str, ...], frozenset, frozenset]] = {
    "rank": (("foliation",), frozenset(), frozenset()),
    "singular-locus": (("foliation",), frozenset(), frozenset()),
    "saturate": (("foliation",), frozenset(), frozenset()),
    "involutive": (("foliation",), frozenset(), frozenset()),
    "closure": (("foliation",), frozenset(), frozenset()),
    "union": (("foliation", "foliation"), frozenset(), frozenset()),
    "intersection": (("foliation", "foliation"), frozenset(), frozenset()),
    "induced": (("map",), frozenset(), frozenset()),
    "test-form-basis": ((), frozenset({"k", "p"}), frozenset({"n", "k", "p"})),
    "nt-check": (("field", "chart"), frozenset({"k"}),
                 frozenset({"k", "r_max", "floor", "order", "workers"})),
    "transversality": (("field", "chart"), frozenset({"k", "eps"}), frozenset({"k", "eps", "order"})),
    "pullback-check": (("field", "chart"), frozenset({"k", "tol"}), frozenset({"k", "eps", "tol", "order"})),
    "cs-audit": ((), frozenset({"p", "matrix"}), frozenset({"p", "matrix", "tol"})),
    "nu-proxy": (("field", "chart"), frozenset(), frozenset({"r_max", "floor"})),
}

_INT_PARAMS = {"k", "p", "n", "workers"}
_REAL_PARAMS = {"eps", "tol", "r_max", "floor"}


@dataclass(frozen=True)
class SceneDoc:
    vars: tuple[str, ...]
    foliations: dict[str, tuple[str, ...]] = field(default_factory=dict)
    maps: dict[str, tuple[str, ...]] = field(default_factory=dict)
    fields: dict[str, FieldSpec] = field(default_factory=dict)
    charts: dict[str, ChartSpec] = field(default_factory=dict)
    tasks: tuple[TaskSpec, ...] = ()

    @property
    def n(self) -> int:
        return len(self.vars)

    def kind_of(self, name: str) -> str | None:
        for kind, table in (("foliation", self.foliations), ("map", self.maps),
                            ("field", self.fields), ("chart", self.charts)):
            if name in table:
                return kind
        return None

    # builders -------------------------------------------------------------

    def vector_fields(self, name: str) -> list[VectorField]:
        return [parse_vector_field(g, self.vars) for g in self.foliations[name]]

    def module(self, name: str) -> PolyModule:
        return PolyModule(self.vars, self.n, [X.components for X in self.vector_fields(name)])

    def rational_map(self, name: str) -> RationalMap:
        return RationalMap([parse_poly(c, self.vars) for c in self.maps[name]])

    def hermitian_field(self, name: str) -> HermitianField:
        spec = self.fields[name]
        entries = {ab: Expression.parse(text, self.vars) for ab, text in spec.entries.items()}
        return HermitianField.from_entries(self.n, entries, spec.epsilons, name)

    def chart_box(self, name: str) -> Chart:
        c = self.charts[name]
        return Chart(c.center, c.half_width, c.grid)


# -- locating ---------------------------------------------------------------

def _offset_to_linecol(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _Locator:
    def __init__(self, text: str):
        self.text = text

    def find(self, *patterns: str) -> tuple[int | None, int | None]:
        for pat in patterns:
            m = re.search(pat, self.text, re.MULTILINE)
            if m:
                return _offset_to_linecol(self.text, m.start())
        return None, None

    def header(self, kind: str, name: str):
        q = re.escape(name)
        return self.find(rf'^\s*\[\s*{kind}\s*\.\s*(?:"{q}"|\'{q}\'|{q})\s*\]',
                         rf'^\s*{kind}\s*\.\s*(?:"{q}"|{q})\b', rf'\b{q}\b')

    def string(self, value: str, fallback=(None, None)):
        """Position of the first quoted occurrence of ``value`` at or after ``fallback``'s line."""
        start = 0
        if fallback[0] is not None:
            start = sum(len(l) for l in self.text.splitlines(keepends=True)[: fallback[0] - 1])
        for q in ('"', "'"):
            off = self.text.find(q + value + q, start)
            if off >= 0:
                line, col = _offset_to_linecol(self.text, off)
                return line, col + 1
        return fallback

    def task(self, tid: str):
        return self.find(rf'\bid\s*=\s*["\']{re.escape(tid)}["\']', r"^\s*\[\[\s*task\s*\]\]")


# -- parsing ----------------------------------------------------------------

_TOML_LOC = re.compile(r"\(at line (\d+), column (\d+)\)")


def _load_toml(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        msg = str(exc)
        m = _TOML_LOC.search(msg)
        if m:
            raise SceneError([LocatedError(int(m.group(1)), int(m.group(2)),
                                           "syntax error: " + _TOML_LOC.sub("", msg).strip())]) from None
        if "end of document" in msg:
            line = text.count("\n") + (0 if text.endswith("\n") else 1)
            raise SceneError([LocatedError(max(line, 1), 1, "syntax error: " + msg)]) from None
        raise SceneError([LocatedError(None, None, "syntax error: " + msg)]) from None


def _is_real(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_scene(text: str) -> SceneDoc:
    """Parse and validate scene text; raises :class:`SceneError` listing every problem found."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    data = _load_toml(text)
    loc = _Locator(text)
    errors: list[LocatedError] = []

    def err(where, message):
        errors.append(LocatedError(where[0], where[1], message))

    known = {"ring", "foliation", "map", "field", "chart", "task"}
    for key in data:
        if key not in known:
            err(loc.find(rf"^\s*\[+\s*{re.escape(key)}\b", rf"^\s*{re.escape(key)}\b"), f"unknown section {key!r}")

    ring = data.get("ring")
    vars: tuple[str, ...] = ()
    if not isinstance(ring, dict) or "vars" not in ring:
        err(loc.find(r"^\s*\[\s*ring\s*\]"), "missing [ring] section with a 'vars' list")
    else:
        raw = ring["vars"]
        if (not isinstance(raw, list) or not raw or not all(isinstance(v, str) for v in raw)):
            err(loc.find(r"^\s*vars\s*="), "ring.vars must be a non-empty list of variable names")
        else:
            vars = tuple(raw)
            bad = [v for v in vars if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v)
                   or v in ("i", "eps", "conj", "abs2") or re.fullmatch(r"d\d+", v)]
            if bad:
                err(loc.find(r"^\s*vars\s*="), f"reserved or invalid variable name {bad[0]!r}")
                vars = ()
            elif len(set(vars)) != len(vars):
                err(loc.find(r"^\s*vars\s*="), "duplicate variable name in ring.vars")
                vars = ()
    n = len(vars)

    def table(kind: str) -> dict:
        t = data.get(kind, {})
        if not isinstance(t, dict):
            err(loc.find(rf"^\s*{kind}\b"), f"'{kind}' must be a table of named entries")
            return {}
        return t

    seen: dict[str, str] = {}

    def claim(kind: str, name: str) -> None:
        if name in seen:
            err(loc.header(kind, name), f"duplicate name {name!r} (already declared as a {seen[name]})")
        else:
            seen[name] = kind

    foliations: dict[str, tuple[str, ...]] = {}
    for name, body in table("foliation").items():
        claim("foliation", name)
        where = loc.header("foliation", name)
        gens = body.get("generators") if isinstance(body, dict) else None
        if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
            err(where, f"foliation {name!r} needs a 'generators' list of strings")
            continue
        if vars:
            for g in gens:
                try:
                    parse_vector_field(g, vars)
                except ParseError as exc:
                    err(loc.string(g, where), f"foliation {name!r}: {exc.message}")
        foliations[name] = tuple(gens)

    maps: dict[str, tuple[str, ...]] = {}
    for name, body in table("map").items():
        claim("map", name)
        where = loc.header("map", name)
        comps = body.get("components") if isinstance(body, dict) else None
        if not isinstance(comps, list) or not comps or not all(isinstance(c, str) for c in comps):
            err(where, f"map {name!r} needs a non-empty 'components' list of strings")
            continue
        if vars:
            for c in comps:
                try:
                    parse_poly(c, vars)
                except ParseError as exc:
                    err(loc.string(c, where), f"map {name!r}: malformed polynomial {c!r}: {exc.message}")
        maps[name] = tuple(comps)

    fields: dict[str, FieldSpec] = {}
    for name, body in table("field").items():
        claim("field", name)
        where = loc.header("field", name)
        if not isinstance(body, dict):
            err(where, f"field {name!r} must be a table")
            continue
        eps = body.get("epsilons", [])
        if (not isinstance(eps, list) or not all(_is_real(e) for e in eps) or any(e <= 0 for e in eps)
                or any(b >= a for a, b in zip(eps, eps[1:]))):
            err(where, f"field {name!r}: epsilons must be a strictly decreasing list of positive numbers")
            eps = []
        raw_entries = body.get("entries", {})
        entries: dict[tuple[int, int], str] = {}
        if not isinstance(raw_entries, dict):
            err(where, f"field {name!r}: entries must be a table mapping \"a,b\" to expressions")
            raw_entries = {}
        for key, expr in raw_entries.items():
            m = re.fullmatch(r"\s*(\d+)\s*,\s*(\d+)\s*", key)
            if not m:
                err(where, f"field {name!r}: entry key {key!r} is not of the form \"a,b\"")
                continue
            a, b = int(m.group(1)), int(m.group(2))
            if n and not 1 <= a <= b <= n:
                err(where, f"field {name!r}: entry ({a},{b}) is not in the upper triangle of a {n}x{n} matrix")
                continue
            if not isinstance(expr, str):
                err(where, f"field {name!r}: entry ({a},{b}) must be an expression string")
                continue
            if (a, b) in entries:
                err(where, f"field {name!r}: entry ({a},{b}) declared twice")
                continue
            if vars:
                try:
                    Expression.parse(expr, vars)
                except ParseError as exc:
                    err(loc.string(expr, where), f"field {name!r}: entry ({a},{b}): {exc}")
            entries[(a, b)] = expr
        extra = set(body) - {"epsilons", "entries"}
        if extra:
            err(where, f"field {name!r}: unknown key {sorted(extra)[0]!r}")
        fields[name] = FieldSpec(dict(sorted(entries.items())), tuple(float(e) for e in eps))

    charts: dict[str, ChartSpec] = {}
    for name, body in table("chart").items():
        claim("chart", name)
        where = loc.header("chart", name)
        if not isinstance(body, dict):
            err(where, f"chart {name!r} must be a table")
            continue
        center = body.get("center")
        hw = body.get("half_width")
        grid = body.get("grid")
        ok = True
        if not isinstance(center, list) or not all(_is_real(c) for c in center) or (n and len(center) != 2 * n):
            err(where, f"chart {name!r}: center must list {2 * n} real coordinates")
            ok = False
        if not _is_real(hw) or hw <= 0:
            err(where, f"chart {name!r}: half_width must be a positive number")
            ok = False
        if not _is_int(grid) or grid < 2:
            err(where, f"chart {name!r}: grid must be an integer >= 2")
            ok = False
        if ok:
            charts[name] = ChartSpec(tuple(float(c) for c in center), float(hw), int(grid))

    tasks: list[TaskSpec] = []
    raw_tasks = data.get("task", [])
    if not isinstance(raw_tasks, list):
        err(loc.find(r"^\s*\[\s*task\b"), "tasks must be declared as [[task]] array entries")
        raw_tasks = []
    ids: set[str] = set()
    for pos, body in enumerate(raw_tasks, start=1):
        tid = body.get("id") if isinstance(body, dict) else None
        if not isinstance(tid, str) or not tid:
            err(loc.find(r"^\s*\[\[\s*task\s*\]\]"), f"task #{pos} needs a string 'id'")
            continue
        where = loc.task(tid)
        if tid in ids:
            err(where, f"duplicate task id {tid!r}")
            continue
        ids.add(tid)
        op = body.get("op")
        if op not in OPS:
            err(where, f"task {tid!r}: unknown op {op!r}")
            continue
        kinds, required, allowed = OPS[op]
        args = body.get("args", [])
        params = body.get("params", {})
        extra = set(body) - {"id", "op", "args", "params"}
        if extra:
            err(where, f"task {tid!r}: unknown key {sorted(extra)[0]!r}")
        if not isinstance(args, list) or not all(isinstance(a, str) for a in args):
            err(where, f"task {tid!r}: args must be a list of names")
            continue
        if not isinstance(params, dict):
            err(where, f"task {tid!r}: params must be a table")
            continue
        if len(args) != len(kinds):
            err(where, f"task {tid!r}: op {op!r} takes {len(kinds)} argument(s), got {len(args)}")
        for a, kind in zip(args, kinds):
            actual = _declared_kind(a, foliations, maps, fields, charts, seen)
            if actual is None:
                err(loc.string(a, where), f"task {tid!r}: dangling reference to undeclared {kind} {a!r}")
            elif actual != kind:
                err(where, f"task {tid!r}: {a!r} is a {actual}, expected a {kind}")
        for key in sorted(required - set(params)):
            err(where, f"task {tid!r}: missing parameter {key!r}")
        for key, val in params.items():
            if key not in allowed:
                err(where, f"task {tid!r}: unknown parameter {key!r} for op {op!r}")
            elif key in _INT_PARAMS and not _is_int(val):
                err(where, f"task {tid!r}: parameter {key!r} must be an integer")
            elif key in _REAL_PARAMS and not _is_real(val):
                err(where, f"task {tid!r}: parameter {key!r} must be a number")
            elif key == "order" and (not isinstance(val, list) or sorted(val) != list(range(1, n + 1))):
                err(where, f"task {tid!r}: order must be a permutation of 1..{n}")
            elif key == "matrix" and not _valid_matrix(val):
                err(where, f"task {tid!r}: matrix must be a square list of lists of numbers or strings")
        tasks.append(TaskSpec(tid, op, tuple(args), dict(params)))

    if errors:
        raise SceneError(sorted(errors, key=lambda e: (e.line or 0, e.col or 0)))
    return SceneDoc(vars, foliations, maps, fields, charts, tuple(tasks))


def _declared_kind(name, foliations, maps, fields, charts, seen) -> str | None:
    for kind, t in (("foliation", foliations), ("map", maps), ("field", fields), ("chart", charts)):
        if name in t:
            return kind
    return seen.get(name)


def _valid_matrix(val) -> bool:
    if not isinstance(val, list) or not val:
        return False
    return all(isinstance(r, list) and len(r) == len(val)
               and all(_is_real(x) or isinstance(x, str) for x in r) for r in val)


def load_scene(path) -> SceneDoc:
    with open(path, "rb") as fh:
        return parse_scene(fh.read().decode("utf-8"))


def print_scene(doc: SceneDoc) -> str:
    """TOML text that parses back to a structurally equal document."""
    out: dict[str, Any] = {"ring": {"vars": list(doc.vars)}}
    if doc.foliations:
        out["foliation"] = {k: {"generators": list(v)} for k, v in doc.foliations.items()}
    if doc.maps:
        out["map"] = {k: {"components": list(v)} for k, v in doc.maps.items()}
    if doc.fields:
        out["field"] = {
            k: {"epsilons": list(f.epsilons), "entries": {f"{a},{b}": e for (a, b), e in f.entries.items()}}
            for k, f in doc.fields.items()
        }
    if doc.charts:
        out["chart"] = {k: {"center": list(c.center), "half_width": c.half_width, "grid": c.grid}
                        for k, c in doc.charts.items()}
    if doc.tasks:
        tasks = []
        for t in doc.tasks:
            entry: dict[str, Any] = {"id": t.id, "op": t.op, "args": list(t.args)}
            if t.params:
                entry["params"] = dict(t.params)
            tasks.append(entry)
        out["task"] = tasks
    return tomli_w.dumps(out)
