"""Directed piecewise-linear Morse theory on graphs.

A directed function lives on a subdivided 1-complex: rational values at the
vertices of an open domain plus a flag at each frontier vertex, "in" when the
function tends to -infinity there and "out" when it tends to +infinity.  Morse
data are read off the barycentric graph whose nodes are the cells of the domain
(an edge cell takes the mean of its endpoint values), so the cochain model of a
pair is exactly the relative barycentric complex used for Hom between standard
objects.  Ascending flow goes from each non-maximal node to its highest upper
neighbour; maxima are the degree-0 generators, unmatched incidences the degree-1
generators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import ainfty
from .homalg import Matrix, nonzero_dims
from .sheafcat.hom import HomComplex, cup, hom_standard, pair_cochains
from .stratspace import (StratifiedComplex, closure, open_star, subdivided_circle,
                         subdivided_interval)

INF = float("inf")
EPS = Fraction(1, 2)


class NotMorse(ValueError):
    pass


class NotDirected(ValueError):
    pass


# --- bases ------------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subdivision:
    """A subdivided preset graph with the carrier of every fine cell."""

    coarse: StratifiedComplex
    fine: StratifiedComplex
    carrier: dict

    def refine(self, U) -> frozenset:
        U = frozenset(U)
        return frozenset(c for c, k in self.carrier.items() if k in U)

    def vertex_over(self, cell: str) -> str:
        vs = [c for c, k in self.carrier.items() if k == cell and self.fine.dim_of[c] == 0]
        if not vs:
            raise ValueError(f"no fine vertex over {cell}")
        return vs[len(vs) // 2]


def subdivide(space: StratifiedComplex, n: int = 8) -> Subdivision:
    if space.name == "interval":
        fine = subdivided_interval(n)
        car = {f"v{i}": "e" for i in range(1, n)} | {f"e{i}": "e" for i in range(1, n + 1)}
        car |= {"v0": "a", f"v{n}": "b"}
        return Subdivision(space, fine, car)
    if space.name == "circle":
        if n % 4:
            # with n = 2 mod 4 the distance tents over open stars have flat edges
            raise ValueError("circle subdivision needs a multiple of 4")
        fine = subdivided_circle(n)
        h = n // 2
        car = {"v0": "v0", f"v{h}": "v1"}
        car |= {f"v{i}": "e0" for i in range(1, h)} | {f"v{i}": "e1" for i in range(h + 1, n)}
        car |= {f"e{i}": "e0" for i in range(h)} | {f"e{i}": "e1" for i in range(h, n)}
        return Subdivision(space, fine, car)
    raise ValueError("Morse bases are the interval and circle presets")


# --- directed functions ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DirectedFunction:
    base: StratifiedComplex
    values: dict  # vertex of the domain -> Fraction
    domain: frozenset
    flags: dict = field(default_factory=dict)  # frontier vertex -> "in" | "out"

    def __post_init__(self):
        object.__setattr__(self, "values", {v: Fraction(x) for v, x in self.values.items()})
        object.__setattr__(self, "domain", frozenset(self.domain))

    @cached_property
    def frontier(self) -> frozenset:
        return closure(self.base, self.domain) - self.domain

    def validate(self) -> None:
        sp = self.base
        if sp.dim > 1:
            raise ValueError("directed functions live on graphs")
        if not sp.is_open(self.domain):
            raise ValueError("domain must be open")
        verts = {c for c in self.domain if sp.dim_of[c] == 0}
        if set(self.values) != verts:
            raise ValueError("values must be given exactly on the domain vertices")
        if set(self.flags) != set(self.frontier):
            raise ValueError(f"flags must be given exactly on the frontier {sorted(self.frontier)}")
        if any(f not in ("in", "out") for f in self.flags.values()):
            raise ValueError("flags are 'in' or 'out'")
        for e in self.domain:
            if sp.dim_of[e] == 1:
                ends = [v for v in sp.faces[e] if v in self.domain]
                if len(ends) == 2 and self.values[ends[0]] == self.values[ends[1]]:
                    raise NotMorse(f"flat edge {e}")

    def to_json(self) -> dict:
        return {"space": self.base.name, "domain_cells": sorted(self.domain),
                "vertex_values": {v: str(x) for v, x in sorted(self.values.items())},
                "flags": dict(sorted(self.flags.items()))}

    @staticmethod
    def from_json(obj: dict, base: StratifiedComplex) -> "DirectedFunction":
        f = DirectedFunction(base, {v: Fraction(x) for v, x in obj["vertex_values"].items()},
                             frozenset(obj["domain_cells"]), dict(obj.get("flags", {})))
        f.validate()
        return f


def _graph_distance(space, verts: set, sources: set) -> dict:
    adj = {v: set() for v in verts | sources}
    for e, d in space.dim_of.items():
        if d == 1:
            ends = list(space.faces[e])
            if len(ends) == 2 and all(v in adj for v in ends):
                a, b = ends
                adj[a].add(b)
                adj[b].add(a)
    dist = {s: 0 for s in sources}
    todo = list(sources)
    while todo:
        nxt = []
        for v in todo:
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        todo = nxt
    return dist


def tent(base: StratifiedComplex, U) -> DirectedFunction:
    """Standard function of an open set: distance to the frontier, -infinity on it.

    Without a frontier the distance is taken to the valence-one vertices, or to the
    first vertex on a cycle."""
    U = frozenset(U)
    fr = closure(base, U) - U
    verts = {c for c in U if base.dim_of[c] == 0}
    src = set(fr)
    if not src:
        val1 = {v for v in verts if len(base.cofaces[v]) == 1}
        src = val1 or {base.sort(verts)[0]}
    dist = _graph_distance(base, verts, src)
    f = DirectedFunction(base, {v: Fraction(dist[v]) for v in verts}, U, {w: "in" for w in fr})
    f.validate()
    return f


def local_brane(sub: Subdivision, datum) -> DirectedFunction:
    """Directed function for a Morse datum at a vertex: the fine open star of the vertex,
    flagged "in" towards the negative part and "out" elsewhere."""
    x = sub.vertex_over(datum.cell)
    dom = open_star(sub.fine, x)
    f = DirectedFunction(sub.fine, {x: Fraction(0)}, dom, {})
    flags = {w: ("in" if sub.carrier[w] in datum.negative or _edge_carrier(sub, x, w) in datum.negative else "out")
             for w in f.frontier}
    g = DirectedFunction(sub.fine, {x: Fraction(0)}, dom, flags)
    g.validate()
    return g


def _edge_carrier(sub, x, w):
    for e in sub.fine.cofaces[x]:
        if w in sub.fine.faces[e]:
            return sub.carrier[e]
    return None


def difference(f0: DirectedFunction, f1: DirectedFunction, eps: Fraction = EPS) -> DirectedFunction:
    """The pair function f1 - eps f0 on the common domain.

    At a frontier vertex outside the domain of f1 the flag of f1 dominates; otherwise
    the flag of f0 is reversed."""
    if f0.base is not f1.base:
        raise NotDirected("functions live on different bases")
    D = f0.domain & f1.domain
    vals = {v: f1.values[v] - eps * f0.values[v] for v in D if f0.base.dim_of[v] == 0}
    g = DirectedFunction(f0.base, vals, D, {})
    flags = {}
    for w in g.frontier:
        if w not in f1.domain:
            flags[w] = f1.flags[w]
        else:
            flags[w] = "out" if f0.flags[w] == "in" else "in"
    g = DirectedFunction(f0.base, vals, D, flags)
    try:
        g.validate()
    except NotMorse as exc:
        raise NotDirected(f"difference is not Morse: {exc}") from None
    return g


# --- the flow --------------------------------------------------------------------------------------

def _sign(chain, node) -> int:
    """Coefficient of chain in d(node*): +1 for the edge cell, -1 for the vertex."""
    return 1 if chain[1] == node else -1


@dataclass(eq=False)
class Flow:
    g: DirectedFunction
    value: dict
    nodes: list
    outs: list
    chains: list  # incidences (vertex, edge)
    up: dict  # node -> upper neighbour or None

    @cached_property
    def matched(self) -> dict:
        """node -> the incidence along which it flows up."""
        out = {}
        for n, m in self.up.items():
            if m is not None:
                out[n] = (n, m) if self.g.base.dim_of[n] == 0 else (m, n)
        return out

    @cached_property
    def pair_of(self) -> dict:
        return {c: n for n, c in self.matched.items()}

    @cached_property
    def critical_nodes(self) -> list:
        return [n for n in self.nodes if self.up[n] is None]

    @cached_property
    def critical_chains(self) -> list:
        return [c for c in self.chains if c not in self.pair_of]

    @cached_property
    def at(self) -> dict:
        inc = {n: [] for n in self.nodes}
        for c in self.chains:
            for n in c:
                if n in inc:
                    inc[n].append(c)
        return inc

    def trajectory(self, x) -> list:
        """Ascending path from x to a maximum or an out vertex."""
        path = [x]
        while x in self.up and self.up[x] is not None:
            x = self.up[x]
            path.append(x)
            if len(path) > len(self.nodes) + 2:
                raise AssertionError("flow cycle")
        return path

    def terminal(self, x):
        end = self.trajectory(x)[-1]
        return end if end in self.up else None

    def coflow_paths(self, chain) -> list:
        """Descending paths from an incidence to critical incidences: (path, weight)."""
        res = []
        stack = [([chain], Fraction(1))]
        while stack:
            path, w = stack.pop()
            c = path[-1]
            n = self.pair_of.get(c)
            if n is None:
                res.append((path, w))
                continue
            if len(path) > len(self.chains) + 1:
                raise AssertionError("flow cycle")
            for c2 in self.at[n]:
                if c2 != c:
                    stack.append((path + [c2], w * -Fraction(_sign(c2, n), _sign(c, n))))
        return res

    def coflow(self, chain) -> dict:
        out = {}
        for path, w in self.coflow_paths(chain):
            out[path[-1]] = out.get(path[-1], 0) + w
        return {k: v for k, v in out.items() if v}


def flow(g: DirectedFunction) -> Flow:
    g.validate()
    sp = g.base
    nodes = sp.sort(g.domain)
    outs = sp.sort(w for w, f in g.flags.items() if f == "out")
    value = {}
    for n in nodes:
        if sp.dim_of[n] == 0:
            value[n] = g.values[n]
    for n in nodes:
        if sp.dim_of[n] == 1:
            ends = list(sp.faces[n])
            fin = [g.values[v] for v in ends if v in g.domain]
            base = sum(fin, Fraction(0)) / len(fin) if fin else Fraction(0)
            if len(fin) < len(ends):
                bump = sum(1 if g.flags[v] == "out" else -1 for v in ends if v not in g.domain)
                base += Fraction(bump, 4)
            value[n] = base
    for w in outs:
        value[w] = INF
    chains = []
    for e in nodes:
        if sp.dim_of[e] == 1:
            for v in sp.sort(sp.faces[e]):
                if v in g.domain or v in outs:
                    chains.append((v, e))
    nbrs = {n: [] for n in nodes}
    for v, e in chains:
        nbrs[e].append(v)
        if v in nbrs:
            nbrs[v].append(e)
    up = {}
    for n in nodes:
        higher = [m for m in nbrs[n] if value[m] > value[n]]
        up[n] = max(higher, key=lambda m: (value[m], m)) if higher else None
    return Flow(g, value, nodes, outs, chains, up)


# --- Morse complex -------------------------------------------------------------------------------

@dataclass
class MorseComplexResult:
    critical: list  # (label chain, degree)
    differential: Matrix  # degree-1 generators x degree-0 generators
    dims: dict
    convention: str = "degree 0 = maxima, degree 1 = unmatched ascending incidences (superlevel filtration)"

    def to_json(self) -> dict:
        return {"critical": [{"cell": list(c), "degree": k} for c, k in self.critical],
                "differential": self.differential.to_strings(), "dims": {str(k): v for k, v in self.dims.items()},
                "convention": self.convention}


def morse_complex(pair) -> MorseComplexResult:
    """Generators and signed gradient counts; ``pair`` is (f0, f1) or an already formed pair function."""
    g = difference(*pair) if isinstance(pair, tuple) else pair
    fl = flow(g)
    zeros = [(n,) for n in fl.critical_nodes]
    ones = fl.critical_chains
    col = {c: i for i, c in enumerate(zeros)}
    ent = {}
    for r, c in enumerate(ones):
        for n in c:
            if n in fl.up:
                p = fl.terminal(n)
                if p is not None:
                    ent[(r, col[(p,)])] = ent.get((r, col[(p,)]), 0) + _sign(c, n)
    d = Matrix.from_dict(len(ones), len(zeros), ent)
    rk = d.rank()
    dims = {k: v for k, v in ((0, len(zeros) - rk), (1, len(ones) - rk)) if v}
    return MorseComplexResult([(c, 0) for c in zeros] + [(c, 1) for c in ones], d, dims)


def pair_oracle_dims(g: DirectedFunction) -> dict:
    """Relative cohomology of (domain with its out vertices, out vertices)."""
    outs = frozenset(w for w, f in g.flags.items() if f == "out")
    return nonzero_dims(pair_cochains(g.base, g.domain | outs, outs))


# --- flow projection -------------------------------------------------------------------------------

def hom_basis(h: HomComplex) -> tuple[list, tuple]:
    ch = [c for k in sorted(h.basis) for c in h.basis[k]]
    return ch, tuple(len(c) - 1 for c in ch)


def _hom_m1(h: HomComplex) -> Matrix:
    """A-infinity m1 = (-1)^|a| d on the hom complex in the flat basis."""
    ch, degs = hom_basis(h)
    off = {}
    pos = 0
    for k in sorted(h.basis):
        off[k] = pos
        pos += len(h.basis[k])
    ent = {}
    for k in sorted(h.basis):
        if k + 1 not in h.basis:
            continue
        d = h.complex.d(k)
        for i in range(d.rows):
            for j in range(d.cols):
                if d.data[i][j]:
                    ent[(off[k + 1] + i, off[k] + j)] = d.data[i][j] * (-1) ** k
    return Matrix.from_dict(len(ch), len(ch), ent)


@dataclass
class FlowProjection:
    small: tuple
    P: Matrix
    I: Matrix
    H: Matrix
    critical: list  # chains in small order


def flow_projection(g: DirectedFunction, h: HomComplex) -> FlowProjection:
    """Cancel every flow incidence against its node; the survivors are the critical cells."""
    fl = flow(g)
    ch, degs = hom_basis(h)
    if set(ch) != {(n,) for n in fl.nodes} | set(fl.chains):
        raise ValueError("the pair function does not match the Hom model")
    idx = {c: i for i, c in enumerate(ch)}
    pairs = [(idx[c], idx[(n,)]) for n, c in fl.matched.items()]
    small, P, I, H = ainfty.matching_transfer(_hom_m1(h), degs, pairs)
    matched = {i for p in pairs for i in p}
    crit = [c for i, c in enumerate(ch) if i not in matched]
    return FlowProjection(small, P, I, H, crit)


# --- Morse trees ------------------------------------------------------------------------------------

@dataclass(frozen=True)
class MorseTree:
    """A Y-tree: centre cell, one ascending trajectory per input, a descending path to the output."""

    centre: tuple
    leaves: tuple  # per input, the trajectory or incidence it starts from
    root: tuple  # path from the centre to the output
    weight: Fraction


def _input_weight(fl: Flow, a, chain) -> tuple[Fraction, tuple]:
    """Value of the flow inclusion of a critical generator on a basis chain."""
    if len(a) == 1:
        if len(chain) != 1 or chain[0] not in fl.up:
            return Fraction(0), ()
        path = fl.trajectory(chain[0])
        return (Fraction(1), tuple(path)) if path[-1] == a[0] else (Fraction(0), ())
    return (Fraction(1), (chain,)) if chain == a else (Fraction(0), ())


def enumerate_morse_trees(fs, inputs, output) -> list:
    """Trees for m1 (one input) and m2 (two inputs) in the dg convention.

    ``fs`` is the directed sequence f0, ..., fk; input t is a critical cell of the
    pair (f_{t-1}, f_t) and the output one of (f0, fk)."""
    k = len(fs) - 1
    if len(inputs) != k or k not in (1, 2):
        raise ValueError("trees are enumerated for one or two inputs")
    pairs = {}
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            pairs[(i, j)] = flow(difference(fs[i], fs[j]))
    out = pairs[(0, k)]
    U = [f.domain for f in fs]
    target = [c for c in [(n,) for n in out.nodes] + out.chains]
    trees = []
    for t in target:
        if k == 1:
            # the centre is an incidence; the input enters through the basins of its ends
            if len(t) != 2 or len(inputs[0]) != 1:
                continue
            w = sum((_sign(t, n) * _input_weight(out, inputs[0], (n,))[0] for n in t if n in out.up), Fraction(0))
            leaf = (t,)
            if not w:
                continue
        else:
            w, leaf = Fraction(0), ()
            for q in range(len(t)):
                front, back = t[:q + 1], t[q:]
                if not (set(front) <= U[2] and front[-1] in U[1] and set(back) <= U[1] and back[-1] in U[0]):
                    continue
                w2, l2 = _input_weight(pairs[(1, 2)], inputs[1], front)
                w1, l1 = _input_weight(pairs[(0, 1)], inputs[0], back)
                if w1 and w2:
                    w += w1 * w2
                    leaf = (l1, l2)
            if not w:
                continue
        if len(output) == 1:
            if t == output:
                trees.append(MorseTree(t, leaf, (t,), w))
        elif len(t) == 2:
            for path, pw in out.coflow_paths(t):
                if path[-1] == output:
                    trees.append(MorseTree(t, leaf, tuple(path), w * pw))
    return trees


def count_morse_trees(fs, inputs, output) -> Fraction:
    return sum((t.weight for t in enumerate_morse_trees(fs, inputs, output)), Fraction(0))


# --- Open = Mor --------------------------------------------------------------------------------------

def standard_category(base: StratifiedComplex, opens: dict, max_arity: int = 2) -> tuple:
    """dg category of standard objects with cup composition; returns (A, hom complexes, bases)."""
    names = list(opens)
    homs, bases, degs, diffs, comps = {}, {}, {}, {}, {}
    for X in names:
        for Y in names:
            h = hom_standard(base, opens[X], opens[Y])
            ch, dg = hom_basis(h)
            if not ch:
                continue
            homs[(X, Y)] = h
            bases[(X, Y)] = ch
            degs[(X, Y)] = dg
            m1 = _hom_m1(h)
            diffs[(X, Y)] = Matrix.from_rows([[m1.data[i][j] * (-1) ** dg[j] for j in range(len(ch))]
                                              for i in range(len(ch))], cols=len(ch))
    for X in names:
        for Y in names:
            for Z in names:
                if (X, Y) not in homs or (Y, Z) not in homs or (X, Z) not in homs:
                    continue
                tgt = bases[(X, Z)]
                tix = {c: i for i, c in enumerate(tgt)}
                table = {}
                for j1, c1 in enumerate(bases[(X, Y)]):
                    for j2, c2 in enumerate(bases[(Y, Z)]):
                        prod = cup(base, {c2: Fraction(1)}, {c1: Fraction(1)}, _cup_targets(c2, c1, tix))
                        if prod:
                            table[(j1, j2)] = {tix[c]: v for c, v in prod.items()}
                comps[(X, Y, Z)] = table
    A = ainfty.from_dg(names, degs, diffs, comps, max_arity)
    return A, homs, bases


def _cup_targets(front, back, tix):
    """Chains whose split at one point gives (front, back)."""
    if front[-1] != back[0]:
        return []
    c = front + back[1:]
    return [c] if c in tix else []


@dataclass
class OpenMorReport:
    ok: bool
    rows: list
    mismatches: list

    def to_json(self) -> dict:
        return {"ok": self.ok, "rows": self.rows, "mismatches": self.mismatches}


def transfer_to_morse(base, objects: dict, arity: int = 2, extra=None):
    """Standard dg category of ``objects`` (name -> standard DirectedFunction), transferred along the flow."""
    opens = {X: f.domain for X, f in objects.items()}
    A, homs, bases = standard_category(base, opens, arity)
    small, P, I, H, crit = {}, {}, {}, {}, {}
    for (X, Y), h in homs.items():
        fp = flow_projection(difference(objects[X], objects[Y]), h)
        small[(X, Y)], P[(X, Y)], I[(X, Y)], H[(X, Y)] = fp.small, fp.P, fp.I, fp.H
        crit[(X, Y)] = fp.critical
    T = ainfty.TransferData(small, P, I, H)
    res = ainfty.hpl_transfer(A, T, arity, functor_arity=1)
    return A, res, crit


def open_vs_mor(base: StratifiedComplex, objects: dict) -> OpenMorReport:
    """Transferred m1, m2 against tree counts for every pair and triple of objects."""
    names = list(objects)
    A, res, crit = transfer_to_morse(base, objects, 2)
    B = res.B
    rows, bad = [], []
    for (X, Y), cr in crit.items():
        mc = morse_complex((objects[X], objects[Y]))
        same_gens = sorted(cr) == sorted(c for c, _ in mc.critical)
        ok = same_gens
        for j, a in enumerate(cr):
            for i, b in enumerate(cr):
                tr = B.apply((X, Y), (j,)).get(i, Fraction(0))
                cnt = count_morse_trees([objects[X], objects[Y]], [a], b) * (-1) ** (len(a) - 1)
                if tr != cnt:
                    ok = False
                    bad.append({"m": 1, "objects": [X, Y], "inputs": [list(a)], "output": list(b),
                                "transfer": str(tr), "trees": str(cnt)})
        rows.append({"objects": [X, Y], "generators": len(cr), "dims": {str(k): v for k, v in mc.dims.items()},
                     "ok": ok})
    for X in names:
        for Y in names:
            for Z in names:
                if not all(k in crit for k in ((X, Y), (Y, Z), (X, Z))):
                    continue
                for j1, a1 in enumerate(crit[(X, Y)]):
                    for j2, a2 in enumerate(crit[(Y, Z)]):
                        outs = B.apply((X, Y, Z), (j1, j2))
                        for i, b in enumerate(crit[(X, Z)]):
                            tr = outs.get(i, Fraction(0))
                            cnt = count_morse_trees([objects[X], objects[Y], objects[Z]], [a1, a2], b)
                            cnt *= (-1) ** (len(a1) - 1)
                            if tr != cnt:
                                bad.append({"m": 2, "objects": [X, Y, Z], "inputs": [list(a1), list(a2)],
                                            "output": list(b), "transfer": str(tr), "trees": str(cnt)})
    return OpenMorReport(not bad and all(r["ok"] for r in rows), rows, bad)


def preset_objects(space: StratifiedComplex, n: int = 8) -> tuple[Subdivision, dict]:
    """Standard objects over the standard cover and the open stars of a graph preset, with tent functions."""
    from .stratspace import standard_cover

    sub = subdivide(space, n)
    objs = {}
    opens = standard_cover(space) + [open_star(space, c) for c in space.ids]
    for U in dict.fromkeys(opens):
        name = "+".join(space.sort(U))
        objs[name] = tent(sub.fine, sub.refine(U))
    return sub, objs


# --- modules and the endpoint pair ----------------------------------------------------------------------------

def _strip_into(A: ainfty.AInftyStructure, star) -> ainfty.AInftyStructure:
    """Drop every hom into ``star`` so that the remaining paths from ``star`` form a left module."""
    hom = {k: v for k, v in A.hom.items() if k[1] != star}
    m = {p: t for p, t in A.m.items() if star not in p[1:]}
    objs = tuple(o for o in A.objects if o != star) + (star,)
    return ainfty.AInftyStructure(objs, hom, m, A.max_arity)


@dataclass
class ModuleReport:
    ok: bool
    dims: dict  # object -> transferred module cohomology dims
    morse_dims: dict
    mismatches: list
    s_quasi_iso: bool

    def to_json(self) -> dict:
        return {"ok": self.ok, "dims": self.dims, "morse_dims": self.morse_dims,
                "mismatches": self.mismatches, "s_quasi_iso": self.s_quasi_iso}


def module_vs_mor(base: StratifiedComplex, objects: dict, star: DirectedFunction) -> ModuleReport:
    """Transfer the module U -> Hom(star, U) along the flow and compare N1, N2 with tree counts."""
    opens = {X: f.domain for X, f in objects.items()} | {ainfty.STAR: star.domain}
    full, homs, _ = standard_category(base, opens, 2)
    ext = _strip_into(full, ainfty.STAR)
    funcs = dict(objects) | {ainfty.STAR: star}
    T = {k: {} for k in ("small", "P", "I", "H")}
    Tm = {k: {} for k in ("small", "P", "I", "H")}
    crit = {}
    for key in ext.hom:
        fp = flow_projection(difference(funcs[key[0]], funcs[key[1]]), homs[key])
        side = Tm if key[0] == ainfty.STAR else T
        side["small"][key], side["P"][key], side["I"][key], side["H"][key] = fp.small, fp.P, fp.I, fp.H
        crit[key] = fp.critical
    M = ainfty.AInftyModule(ext)
    r = ainfty.module_transfer(M, ainfty.TransferData(**T), ainfty.TransferData(**Tm), 2)
    N = r.N.ext
    bad, dims, mdims = [], {}, {}
    for X in objects:
        key = (ainfty.STAR, X)
        if key not in crit:
            dims[X], mdims[X] = {}, {}
            continue
        mc = morse_complex((star, objects[X]))
        mdims[X] = {str(k): v for k, v in mc.dims.items()}
        cx = ainfty._graded_complex(N, key)
        dims[X] = {str(k): v for k, v in nonzero_dims(cx).items()} if cx is not None else {}
        for j, a in enumerate(crit[key]):
            for i, b in enumerate(crit[key]):
                tr = N.apply(key, (j,)).get(i, Fraction(0))
                cnt = count_morse_trees([star, objects[X]], [a], b) * (-1) ** (len(a) - 1)
                if tr != cnt:
                    bad.append({"m": 1, "objects": ["*", X], "transfer": str(tr), "trees": str(cnt)})
        for Y in objects:
            if (X, Y) not in crit or (ainfty.STAR, Y) not in crit:
                continue
            for j1, a1 in enumerate(crit[key]):
                for j2, a2 in enumerate(crit[(X, Y)]):
                    outs = N.apply((ainfty.STAR, X, Y), (j1, j2))
                    for i, b in enumerate(crit[(ainfty.STAR, Y)]):
                        cnt = count_morse_trees([star, objects[X], objects[Y]], [a1, a2], b) * (-1) ** (len(a1) - 1)
                        if outs.get(i, Fraction(0)) != cnt:
                            bad.append({"m": 2, "objects": ["*", X, Y], "inputs": [list(a1), list(a2)],
                                        "output": list(b), "transfer": str(outs.get(i, 0)), "trees": str(cnt)})
    sq = ainfty.module_s_is_quasi_iso(M, r)
    rel = ainfty.check_relations(N, 2).ok
    return ModuleReport(not bad and dims == mdims and sq and rel, dims, mdims, bad, sq)


@dataclass
class EndpointPairReport:
    sheaf_side: dict  # datum label -> dims
    morse_side: dict

    @property
    def ok(self) -> bool:
        return self.sheaf_side == self.morse_side

    def to_json(self) -> dict:
        return {"ok": self.ok, "sheaf_side": self.sheaf_side, "morse_side": self.morse_side}


def endpoint_pair(n: int = 8) -> EndpointPairReport:
    """The interval with V its interior: local Morse groups of i_*Q_V at the endpoint b
    against Morse complexes of the local branes paired with the tent over V."""
    from .microloc import MorseDatum, local_morse_group
    from .sheafcat.core import standard_object
    from .stratspace import preset

    X = preset("interval")
    V = frozenset({"e"})
    F = standard_object(X, V)
    sub = subdivide(X, n)
    fV = tent(sub.fine, sub.refine(V))
    sheaf, mor = {}, {}
    for neg in (frozenset(), frozenset({"e"})):
        d = MorseDatum("b", "b", neg)
        label = f"b|{','.join(sorted(neg)) or '-'}"
        sheaf[label] = local_morse_group(F, d).dims
        mor[label] = morse_complex((local_brane(sub, d), fV)).dims
    return EndpointPairReport(sheaf, mor)


def endpoint_pair_objects(n: int = 8) -> tuple[Subdivision, dict, DirectedFunction]:
    """Objects X and V and the star of b as a module probe."""
    from .stratspace import preset

    X = preset("interval")
    sub = subdivide(X, n)
    objs = {"X": tent(sub.fine, sub.refine(X.all_cells)), "V": tent(sub.fine, sub.refine({"e"}))}
    star = tent(sub.fine, sub.refine(open_star(X, "b")))
    return sub, objs, star
