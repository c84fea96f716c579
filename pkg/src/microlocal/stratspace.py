"""Finite regular cell complexes with a stratification.

Cells are identified by strings.  Open sets are upward-closed cell sets in
the face poset, closed sets are downward-closed ones.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable


class UnknownCell(KeyError):
    pass


@dataclass(frozen=True)
class Stratum:
    label: str
    cells: frozenset
    cx_dim: Fraction
    is_complex: bool = False


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    severity: str
    cells: tuple
    message: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "severity": self.severity, "cells": list(self.cells), "message": self.message}


@dataclass(frozen=True, eq=False)
class StratifiedComplex:
    name: str
    cells: tuple  # ((id, dim), ...) in a fixed order
    incidences: dict = field(repr=False)  # (tau, sigma) -> sign, tau covers sigma
    strata: tuple = ()

    @cached_property
    def dim_of(self) -> dict:
        return dict(self.cells)

    @cached_property
    def ids(self) -> tuple:
        return tuple(c for c, _ in self.cells)

    @cached_property
    def index(self) -> dict:
        return {c: i for i, c in enumerate(self.ids)}

    @property
    def dim(self) -> int:
        return max((d for _, d in self.cells), default=-1)

    @cached_property
    def faces(self) -> dict:
        out = {c: [] for c in self.ids}
        for (t, s) in self.incidences:
            out[t].append(s)
        return {c: tuple(sorted(v, key=self.index.get)) for c, v in out.items()}

    @cached_property
    def cofaces(self) -> dict:
        out = {c: [] for c in self.ids}
        for (t, s) in self.incidences:
            out[s].append(t)
        return {c: tuple(sorted(v, key=self.index.get)) for c, v in out.items()}

    @cached_property
    def _up(self) -> dict:
        up = {}
        for c in sorted(self.ids, key=lambda x: -self.dim_of[x]):
            s = {c}
            for t in self.cofaces[c]:
                s |= up[t]
            up[c] = frozenset(s)
        return up

    @cached_property
    def _down(self) -> dict:
        down = {}
        for c in sorted(self.ids, key=lambda x: self.dim_of[x]):
            s = {c}
            for f in self.faces[c]:
                s |= down[f]
            down[c] = frozenset(s)
        return down

    def leq(self, a: str, b: str) -> bool:
        return b in self._up[a]

    def sort(self, cells: Iterable[str]) -> list:
        return sorted(cells, key=self.index.__getitem__)

    def check_cell(self, c: str) -> None:
        if c not in self.dim_of:
            raise UnknownCell(c)

    @property
    def all_cells(self) -> frozenset:
        return frozenset(self.ids)

    def stratum_of(self, c: str) -> Stratum:
        for s in self.strata:
            if c in s.cells:
                return s
        raise UnknownCell(c)

    def stratum(self, label: str) -> Stratum:
        for s in self.strata:
            if s.label == label:
                return s
        raise KeyError(label)

    def is_open(self, cells: Iterable[str]) -> bool:
        cells = set(cells)
        return all(self._up[c] <= cells for c in cells)

    def is_closed(self, cells: Iterable[str]) -> bool:
        cells = set(cells)
        return all(self._down[c] <= cells for c in cells)

    def to_json(self) -> dict:
        return {
            "cells": [{"id": c, "dim": d} for c, d in self.cells],
            "incidences": [[t, s, sg] for (t, s), sg in sorted(self.incidences.items(), key=lambda kv: (self.index[kv[0][0]], self.index[kv[0][1]]))],
            "strata": [
                {"label": s.label, "cells": self.sort(s.cells), "cx_dim": str(s.cx_dim), "is_complex": s.is_complex}
                for s in self.strata
            ],
        }

    @staticmethod
    def from_json(obj: dict, name: str = "inline") -> "StratifiedComplex":
        cells = tuple((str(c["id"]), int(c["dim"])) for c in obj["cells"])
        inc = {(str(t), str(s)): int(sg) for t, s, sg in obj["incidences"]}
        strata = tuple(
            Stratum(str(s["label"]), frozenset(map(str, s["cells"])), Fraction(str(s.get("cx_dim", 0))), bool(s.get("is_complex", False)))
            for s in obj.get("strata", [])
        )
        return StratifiedComplex(name, cells, inc, strata)


def open_star(s: StratifiedComplex, sigma: str) -> frozenset:
    s.check_cell(sigma)
    return s._up[sigma]


def closure(s: StratifiedComplex, cells: Iterable[str]) -> frozenset:
    out = set()
    for c in cells:
        s.check_cell(c)
        out |= s._down[c]
    return frozenset(out)


def upward_closure(s: StratifiedComplex, cells: Iterable[str]) -> frozenset:
    out = set()
    for c in cells:
        out |= s._up[c]
    return frozenset(out)


def link(s: StratifiedComplex, sigma: str) -> frozenset:
    st = open_star(s, sigma)
    return closure(s, st) - st - closure(s, [sigma])


def frontier(s: StratifiedComplex, cells: Iterable[str]) -> frozenset:
    cells = frozenset(cells)
    return closure(s, cells) - cells


def standard_cover(s: StratifiedComplex) -> list:
    """X together with X - closure(S) and X - frontier(S) per stratum; empties dropped."""
    X = s.all_cells
    out, seen = [], set()
    for u in [X] + [u for st in s.strata for u in (X - closure(s, st.cells), X - frontier(s, st.cells))]:
        if u and u not in seen:
            seen.add(u)
            out.append(frozenset(u))
    return out


def validate(s: StratifiedComplex) -> list:
    diags: list = []
    dims = s.dim_of
    for (t, c), sg in s.incidences.items():
        if t not in dims or c not in dims:
            diags.append(Diagnostic("unknown-cell", "error", (t, c), "incidence mentions an unknown cell"))
            continue
        if dims[t] != dims[c] + 1:
            diags.append(Diagnostic("grading", "error", (t, c), f"{t} covers {c} but dimensions differ by {dims[t] - dims[c]}"))
        if sg not in (1, -1):
            diags.append(Diagnostic("sign", "error", (t, c), f"incidence sign {sg} is not +-1"))
    if any(d.severity == "error" for d in diags):
        return diags
    for rho in s.ids:
        below = {}
        for tau in s.faces[rho]:
            for sig in s.faces[tau]:
                below[sig] = below.get(sig, 0) + s.incidences[(rho, tau)] * s.incidences[(tau, sig)]
        for sig, v in below.items():
            if v:
                diags.append(Diagnostic("boundary-squared", "error", (rho, sig), f"the 2-chain {rho} > {sig} has boundary coefficient {v} != 0"))
    seen: dict = {}
    for st in s.strata:
        for c in st.cells:
            if c not in dims:
                diags.append(Diagnostic("unknown-cell", "error", (c,), f"stratum {st.label} lists unknown cell"))
            elif c in seen:
                diags.append(Diagnostic("partition", "error", (c,), f"cell in strata {seen[c]} and {st.label}"))
            seen[c] = st.label
    missing = [c for c in s.ids if c not in seen]
    if missing:
        diags.append(Diagnostic("partition", "error", tuple(missing), "cells not covered by any stratum"))
    if any(d.severity == "error" for d in diags):
        return diags
    for a in s.strata:
        for b in s.strata:
            if a is b:
                continue
            cl = closure(s, b.cells)
            if a.cells & cl and not a.cells <= (cl - b.cells):
                bad = tuple(s.sort(a.cells - cl))
                diags.append(Diagnostic("frontier", "error", bad, f"stratum {a.label} meets the closure of {b.label} without lying in its frontier"))
    for st in s.strata:
        if not _connected(s, st.cells):
            diags.append(Diagnostic("connectivity", "warning", tuple(s.sort(st.cells)), f"stratum {st.label} is disconnected"))
    return diags


def is_valid(s: StratifiedComplex) -> bool:
    return not any(d.severity == "error" for d in validate(s))


def _connected(s: StratifiedComplex, cells: frozenset) -> bool:
    cells = set(cells)
    if not cells:
        return True
    start = next(iter(cells))
    seen, todo = {start}, [start]
    while todo:
        c = todo.pop()
        for n in s.faces[c] + s.cofaces[c]:
            if n in cells and n not in seen:
                seen.add(n)
                todo.append(n)
    return seen == cells


# --- presets -----------------------------------------------------------------

def _mk(name, cells, inc, strata):
    return StratifiedComplex(
        name,
        tuple(cells),
        {(t, s): sg for t, s, sg in inc},
        tuple(Stratum(l, frozenset(cs), Fraction(cx), ic) for l, cs, cx, ic in strata),
    )


def interval() -> StratifiedComplex:
    return _mk("interval", [("a", 0), ("b", 0), ("e", 1)], [("e", "a", -1), ("e", "b", 1)],
               [("a", ["a"], 0, False), ("e", ["e"], Fraction(1, 2), False), ("b", ["b"], 0, False)])


def circle() -> StratifiedComplex:
    cells = [("v0", 0), ("v1", 0), ("e0", 1), ("e1", 1)]
    inc = [("e0", "v0", -1), ("e0", "v1", 1), ("e1", "v1", -1), ("e1", "v0", 1)]
    return _mk("circle", cells, inc, [("S1", ["v0", "v1", "e0", "e1"], Fraction(1, 2), False)])


def disc() -> StratifiedComplex:
    """Closed disc: centre c, two radii, two boundary arcs, two sectors."""
    cells = [("c", 0), ("w1", 0), ("w2", 0), ("r1", 1), ("r2", 1), ("b1", 1), ("b2", 1), ("f1", 2), ("f2", 2)]
    inc = [
        ("r1", "c", -1), ("r1", "w1", 1), ("r2", "c", -1), ("r2", "w2", 1),
        ("b1", "w1", -1), ("b1", "w2", 1), ("b2", "w2", -1), ("b2", "w1", 1),
        # f1 = r1 + b1 - r2, f2 = r2 + b2 - r1
        ("f1", "r1", 1), ("f1", "b1", 1), ("f1", "r2", -1),
        ("f2", "r2", 1), ("f2", "b2", 1), ("f2", "r1", -1),
    ]
    strata = [("centre", ["c"], 0, False), ("interior", ["r1", "r2", "f1", "f2"], 1, False),
              ("boundary", ["w1", "w2", "b1", "b2"], Fraction(1, 2), False)]
    return _mk("disc", cells, inc, strata)


def _bigon(name, strata):
    cells = [("p0", 0), ("pinf", 0), ("e1", 1), ("e2", 1), ("f1", 2), ("f2", 2)]
    inc = [
        ("e1", "p0", -1), ("e1", "pinf", 1), ("e2", "p0", -1), ("e2", "pinf", 1),
        ("f1", "e1", 1), ("f1", "e2", -1), ("f2", "e2", 1), ("f2", "e1", -1),
    ]
    return _mk(name, cells, inc, strata)


def p1() -> StratifiedComplex:
    """Riemann sphere as a bigon: poles p0, pinf; C* = two meridians and two lunes."""
    return _bigon("p1", [("U", ["e1", "e2", "f1", "f2"], 1, True), ("0", ["p0"], 0, True), ("inf", ["pinf"], 0, True)])


def s2() -> StratifiedComplex:
    """Boundary of a tetrahedron, one complex stratum."""
    verts = ["0", "1", "2", "3"]
    cells = [(f"v{v}", 0) for v in verts]
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    cells += [(f"e{i}{j}", 1) for i, j in edges]
    tris = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    cells += [(f"t{i}{j}{k}", 2) for i, j, k in tris]
    inc = []
    for i, j in edges:
        inc += [(f"e{i}{j}", f"v{i}", -1), (f"e{i}{j}", f"v{j}", 1)]
    orient = {(0, 1, 2): 1, (0, 1, 3): -1, (0, 2, 3): 1, (1, 2, 3): -1}
    for (i, j, k), o in orient.items():
        inc += [(f"t{i}{j}{k}", f"e{j}{k}", o), (f"t{i}{j}{k}", f"e{i}{k}", -o), (f"t{i}{j}{k}", f"e{i}{j}", o)]
    return _mk("s2", cells, inc, [("S2", [c for c, _ in cells], 1, True)])


def c_origin() -> StratifiedComplex:
    """The complex line with origin o, two rays and two half planes."""
    cells = [("o", 0), ("r1", 1), ("r2", 1), ("h1", 2), ("h2", 2)]
    inc = [("r1", "o", -1), ("r2", "o", -1), ("h1", "r1", 1), ("h1", "r2", -1), ("h2", "r2", 1), ("h2", "r1", -1)]
    return _mk("c-origin", cells, inc, [("0", ["o"], 0, True), ("C*", ["r1", "r2", "h1", "h2"], 1, True)])


def subdivided_interval(n: int) -> StratifiedComplex:
    """[0, 1] cut into n edges; strata: the two endpoints and the interior."""
    cells = [(f"v{i}", 0) for i in range(n + 1)] + [(f"e{i}", 1) for i in range(1, n + 1)]
    inc = []
    for i in range(1, n + 1):
        inc += [(f"e{i}", f"v{i - 1}", -1), (f"e{i}", f"v{i}", 1)]
    interior = [f"v{i}" for i in range(1, n)] + [f"e{i}" for i in range(1, n + 1)]
    return _mk(f"interval{n}", cells, inc, [("a", ["v0"], 0, False), ("V", interior, Fraction(1, 2), False), ("b", [f"v{n}"], 0, False)])


def subdivided_circle(n: int) -> StratifiedComplex:
    cells = [(f"v{i}", 0) for i in range(n)] + [(f"e{i}", 1) for i in range(n)]
    inc = []
    for i in range(n):
        inc += [(f"e{i}", f"v{i}", -1), (f"e{i}", f"v{(i + 1) % n}", 1)]
    return _mk(f"circle{n}", cells, inc, [("S1", [c for c, _ in cells], Fraction(1, 2), False)])


PRESETS = {
    "interval": interval,
    "circle": circle,
    "disc": disc,
    "s2": s2,
    "p1": p1,
    "c-origin": c_origin,
}

COMPLEX_PRESETS = ("p1", "c-origin", "s2")


def preset(name: str) -> StratifiedComplex:
    """Shared instance of a named preset (spaces are immutable, so caches keyed on them are reused)."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return _preset(name)


@lru_cache(maxsize=None)
def _preset(name: str) -> StratifiedComplex:
    return PRESETS[name]()


def load_space(spec: str | dict) -> StratifiedComplex:
    if isinstance(spec, dict):
        return StratifiedComplex.from_json(spec)
    if spec in PRESETS:
        return preset(spec)
    with open(spec) as fh:
        return StratifiedComplex.from_json(json.load(fh), name=spec)
