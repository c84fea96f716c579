"""Cellular sheaf complexes: functors from the face poset to cochain complexes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

from ..homalg import (
    ChainMap,
    CochainComplex,
    Matrix,
    StructuralError,
    block_diag,
    cone,
    dual,
    dual_map,
    is_acyclic,
    nonzero_dims,
    shift,
    shift_map,
)
from ..stratspace import StratifiedComplex, open_star, standard_cover


class NotOpen(ValueError):
    pass


class NotClosed(ValueError):
    pass


class NotConstructible(ValueError):
    pass


@lru_cache(maxsize=4096)
def chains(space: StratifiedComplex, cells: frozenset) -> tuple:
    """Strictly increasing chains of the face poset restricted to ``cells``."""
    order = space.sort(cells)
    ups = {c: [t for t in order if t != c and space.leq(c, t)] for c in order}
    out = []

    def grow(ch):
        out.append(ch)
        for t in ups[ch[-1]]:
            grow(ch + (t,))

    for c in order:
        grow((c,))
    out.sort(key=lambda ch: (len(ch), [space.index[x] for x in ch]))
    return tuple(out)


class _Total:
    """Total complex of blocks (key, p, C) with horizontal maps between blocks."""

    def __init__(self, blocks):
        self.blocks = blocks  # list of (key, p, complex)
        lo = min((p + c.lo for _, p, c in blocks), default=0)
        hi = max((p + c.hi for _, p, c in blocks), default=0)
        self.lo, self.hi = lo, hi
        self.offset = {}
        self.dims = {n: 0 for n in range(lo, hi + 1)}
        for key, p, c in blocks:
            for q in c.degrees():
                n = p + q
                self.offset[(key, q)] = self.dims[n]
                self.dims[n] += c.dim(q)
        self.entries = {n: {} for n in range(lo, hi)}
        self.byk = {key: (p, c) for key, p, c in blocks}
        for key, p, c in blocks:
            sg = -1 if p % 2 else 1
            for q in range(c.lo, c.hi):
                self._put(key, q, key, q + 1, c.d(q), sg)

    def _put(self, skey, sq, tkey, tq, m: Matrix, coeff):
        sp, _ = self.byk[skey]
        tp, _ = self.byk[tkey]
        n = sp + sq
        if tp + tq != n + 1 or n not in self.entries:
            return
        ro, co = self.offset[(tkey, tq)], self.offset[(skey, sq)]
        e = self.entries[n]
        for i, row in enumerate(m.data):
            for j, v in enumerate(row):
                if v:
                    e[(ro + i, co + j)] = e.get((ro + i, co + j), 0) + coeff * v

    def add_map(self, skey, tkey, f: ChainMap | None, coeff):
        _, cs = self.byk[skey]
        for q in cs.degrees():
            m = f[q] if f is not None else Matrix.identity(cs.dim(q))
            if m.rows and m.cols:
                self._put(skey, q, tkey, q, m, coeff)

    def complex(self, check=True) -> CochainComplex:
        dims = [self.dims[n] for n in range(self.lo, self.hi + 1)]
        diffs = [Matrix.from_dict(self.dims[n + 1], self.dims[n], self.entries[n]) for n in range(self.lo, self.hi)]
        return CochainComplex(self.lo, dims, diffs, check=check)

    def projection_to(self, other: "_Total") -> ChainMap:
        """Projection onto the blocks shared with ``other`` (a sub-collection of keys)."""
        src, tgt = self.complex(check=False), other.complex(check=False)
        comps = {}
        for n in range(min(self.lo, other.lo), max(self.hi, other.hi) + 1):
            ent = {}
            for key, p, c in other.blocks:
                for q in c.degrees():
                    if p + q != n or not c.dim(q):
                        continue
                    ro, co = other.offset[(key, q)], self.offset[(key, q)]
                    for i in range(c.dim(q)):
                        ent[(ro + i, co + i)] = Fraction(1)
            comps[n] = Matrix.from_dict(tgt.dim(n), src.dim(n), ent)
        return ChainMap(src, tgt, comps, check=False)


@dataclass(eq=False)
class SheafComplex:
    space: StratifiedComplex
    stalks: dict
    gens: dict = field(default_factory=dict)  # (sigma, tau) covering pairs -> ChainMap
    check: bool = True

    def __post_init__(self):
        for c in self.space.ids:
            self.stalks.setdefault(c, CochainComplex.zero())
        for (t, s) in self.space.incidences:
            if (s, t) not in self.gens:
                self.gens[(s, t)] = ChainMap.zero(self.stalks[s], self.stalks[t])
        self._cache = {}
        if self.check:
            self.check_functorial()

    def gen(self, s: str, t: str) -> ChainMap:
        if s == t:
            return ChainMap.identity(self.stalks[s])
        key = (s, t)
        if key in self._cache:
            return self._cache[key]
        if key in self.gens:
            return self.gens[key]
        if not self.space.leq(s, t):
            raise ValueError(f"{s} is not a face of {t}")
        mid = next(u for u in self.space.cofaces[s] if self.space.leq(u, t))
        g = self.gen(mid, t) @ self.gens[(s, mid)]
        self._cache[key] = g
        return g

    def check_functorial(self) -> None:
        sp = self.space
        for s in sp.ids:
            for m in sp.cofaces[s]:
                for t in sp.cofaces[m]:
                    ref = self.gens[(m, t)] @ self.gens[(s, m)]
                    for m2 in sp.cofaces[s]:
                        if m2 != m and (m2, t) in self.gens and sp.leq(m2, t):
                            other = self.gens[(m2, t)] @ self.gens[(s, m2)]
                            if any(ref[k] != other[k] for k in set(ref.comps) | set(other.comps)):
                                raise StructuralError(f"generizations {s}<{m}<{t} and {s}<{m2}<{t} disagree")

    def stalk(self, s: str) -> CochainComplex:
        self.space.check_cell(s)
        return self.stalks[s]

    def is_zero(self) -> bool:
        return all(is_acyclic(c) for c in self.stalks.values())

    def to_json(self) -> dict:
        return {
            "space": self.space.name,
            "stalks": {c: self.stalks[c].to_json() for c in self.space.ids},
            "gens": {f"{s}<{t}": g.to_json() for (s, t), g in self.gens.items()},
        }

    @staticmethod
    def from_json(space: StratifiedComplex, obj: dict) -> "SheafComplex":
        stalks = {c: CochainComplex.from_json(v) for c, v in obj.get("stalks", {}).items()}
        for c in space.ids:
            stalks.setdefault(c, CochainComplex.zero())
        gens = {}
        for k, v in obj.get("gens", {}).items():
            s, t = k.split("<")
            gens[(s, t)] = ChainMap.from_json(stalks[s], stalks[t], v)
        return SheafComplex(space, stalks, gens)


@dataclass(eq=False)
class SheafMap:
    source: SheafComplex
    target: SheafComplex
    comps: dict  # cell -> ChainMap

    def check(self) -> None:
        sp = self.source.space
        for (t, s) in sp.incidences:
            lhs = self.target.gens[(s, t)] @ self.comps[s]
            rhs = self.comps[t] @ self.source.gens[(s, t)]
            for k in set(lhs.comps) | set(rhs.comps):
                if lhs[k] != rhs[k]:
                    raise StructuralError(f"sheaf map not natural along {s}<{t}")


def constant_sheaf(space: StratifiedComplex, degree: int = 0, cells: Iterable[str] | None = None) -> SheafComplex:
    """Q placed in ``degree`` on ``cells`` (default all) with identity generizations; zero elsewhere."""
    cells = set(space.ids if cells is None else cells)
    stalks = {c: CochainComplex.point(degree) if c in cells else CochainComplex.zero() for c in space.ids}
    gens = {}
    for (t, s) in space.incidences:
        if s in cells and t in cells:
            gens[(s, t)] = ChainMap.identity(stalks[s])
    return SheafComplex(space, stalks, gens)


def skyscraper(space: StratifiedComplex, cell: str, degree: int = 0) -> SheafComplex:
    return constant_sheaf(space, degree, [cell])


def zero_sheaf(space: StratifiedComplex) -> SheafComplex:
    return SheafComplex(space, {}, {})


def shift_sheaf(F: SheafComplex, n: int) -> SheafComplex:
    stalks = {c: shift(v, n) for c, v in F.stalks.items()}
    gens = {k: shift_map(g, n) for k, g in F.gens.items()}
    return SheafComplex(F.space, stalks, gens, check=False)


def shift_sheaf_map(f: SheafMap, n: int, source=None, target=None) -> SheafMap:
    source = source or shift_sheaf(f.source, n)
    target = target or shift_sheaf(f.target, n)
    return SheafMap(source, target, {c: ChainMap(source.stalks[c], target.stalks[c], {k - n: m for k, m in g.comps.items()}, check=False) for c, g in f.comps.items()})


def cone_sheaf(f: SheafMap) -> SheafComplex:
    A, B = f.source, f.target
    stalks = {c: cone(f.comps[c]) for c in A.space.ids}
    gens = {}
    for (t, s) in A.space.incidences:
        ga, gb = A.gens[(s, t)], B.gens[(s, t)]
        src, tgt = stalks[s], stalks[t]
        comps = {}
        for k in src.degrees():
            comps[k] = block_diag([ga[k + 1], gb[k]])
        gens[(s, t)] = ChainMap(src, tgt, comps, check=False)
    return SheafComplex(A.space, stalks, gens, check=False)


def _require_open(space, U) -> frozenset:
    U = frozenset(U)
    if not space.is_open(U):
        raise NotOpen(f"{sorted(U)} is not upward-closed")
    return U


# --- sections ------------------------------------------------------------------

def _nerve_total(F: SheafComplex, U: frozenset) -> _Total:
    ch = chains(F.space, U)
    blocks = [(c, len(c) - 1, F.stalks[c[-1]]) for c in ch]
    tot = _Total(blocks)
    index = set(ch)
    for c in ch:
        k = len(c) - 1
        # insert one element to get the cofaces of c
        for longer in _cofaces_of_chain(F.space, c, U):
            pos, new = longer
            tc = c[:pos] + (new,) + c[pos:]
            if tc not in index:
                continue
            sign = -1 if pos % 2 else 1
            if pos == k + 1:
                tot.add_map(c, tc, F.gen(c[-1], new), sign)
            else:
                tot.add_map(c, tc, None, sign)
    return tot


def _cofaces_of_chain(space, c, U):
    out = []
    for pos in range(len(c) + 1):
        lo = c[pos - 1] if pos > 0 else None
        hi = c[pos] if pos < len(c) else None
        for x in space.sort(U):
            if x in c:
                continue
            if lo is not None and not space.leq(lo, x):
                continue
            if hi is not None and not space.leq(x, hi):
                continue
            out.append((pos, x))
    return out


def sections(F: SheafComplex, U: Iterable[str]) -> CochainComplex:
    """Derived sections over an open set via the poset nerve."""
    U = _require_open(F.space, U)
    return _nerve_total(F, U).complex()


def restriction(F: SheafComplex, U: Iterable[str], V: Iterable[str]) -> ChainMap:
    """Restriction RG(U, F) -> RG(V, F) for V inside U."""
    U = _require_open(F.space, U)
    V = _require_open(F.space, V)
    if not V <= U:
        raise ValueError("V must be contained in U")
    return _nerve_total(F, U).projection_to(_nerve_total(F, V))


def compact_sections(F: SheafComplex, U: Iterable[str]) -> CochainComplex:
    """Compactly supported sections via the dimension-graded cellular complex."""
    return _cellular_total(F, _require_open(F.space, U)).complex()


def _cellular_total(F: SheafComplex, U: frozenset) -> _Total:
    sp = F.space
    cells = sp.sort(U)
    tot = _Total([(c, sp.dim_of[c], F.stalks[c]) for c in cells])
    for c in cells:
        for t in sp.cofaces[c]:
            if t in U:
                tot.add_map(c, t, F.gens[(c, t)], sp.incidences[(t, c)])
    return tot


def compact_inclusion(F: SheafComplex, V: frozenset, U: frozenset) -> ChainMap:
    """Extension by zero RG_c(V) -> RG_c(U) for open V inside U."""
    big, small = _cellular_total(F, U), _cellular_total(F, V)
    p = big.projection_to(small)
    from ..homalg import ChainMap as CM
    return CM(p.target, p.source, {k: m.T for k, m in p.comps.items()}, check=False)


def stalk(F: SheafComplex, s: str) -> CochainComplex:
    return F.stalk(s)


def costalk(F: SheafComplex, s: str) -> CochainComplex:
    """cone(RG(star s) -> RG(star s - s))[-1], the cellular normalisation."""
    st = open_star(F.space, s)
    r = restriction(F, st, st - {s})
    return shift(cone(r), -1)


# --- standard objects --------------------------------------------------------------

def nerve_cochains(space: StratifiedComplex, V: frozenset) -> CochainComplex:
    ch = chains(space, frozenset(V))
    return _simplicial(ch)


def _simplicial(ch) -> CochainComplex:
    bydeg: dict = {}
    for c in ch:
        bydeg.setdefault(len(c) - 1, []).append(c)
    if not ch:
        return CochainComplex.zero()
    top = max(bydeg)
    idx = {k: {c: i for i, c in enumerate(v)} for k, v in bydeg.items()}
    diffs = []
    for k in range(top):
        ent = {}
        for c, j in idx[k].items():
            pass
        for c, i in idx[k + 1].items():
            for pos in range(len(c)):
                f = c[:pos] + c[pos + 1:]
                j = idx[k].get(f)
                if j is not None:
                    ent[(i, j)] = ent.get((i, j), 0) + (-1) ** pos
        diffs.append(Matrix.from_dict(len(bydeg[k + 1]), len(bydeg[k]), ent))
    return CochainComplex(0, [len(bydeg[k]) for k in range(top + 1)], diffs)


def _chain_restriction(space, big: frozenset, small: frozenset, src: CochainComplex, tgt: CochainComplex) -> ChainMap:
    cb, cs = chains(space, big), chains(space, small)
    ib = _deg_index(cb)
    is_ = _deg_index(cs)
    comps = {}
    for k in src.degrees():
        ent = {}
        for c, i in is_.get(k, {}).items():
            ent[(i, ib[k][c])] = Fraction(1)
        comps[k] = Matrix.from_dict(tgt.dim(k), src.dim(k), ent)
    return ChainMap(src, tgt, comps, check=False)


def _deg_index(ch):
    out: dict = {}
    for c in ch:
        d = out.setdefault(len(c) - 1, {})
        d[c] = len(d)
    return out


def standard_object(space: StratifiedComplex, U: Iterable[str]) -> SheafComplex:
    """i_* Q_U with stalk at s the nerve cochains of U meet star(s)."""
    U = _require_open(space, U)
    stalks = {c: nerve_cochains(space, U & open_star(space, c)) for c in space.ids}
    gens = {}
    for (t, s) in space.incidences:
        gens[(s, t)] = _chain_restriction(space, U & open_star(space, s), U & open_star(space, t), stalks[s], stalks[t])
    return SheafComplex(space, stalks, gens, check=False)


def costandard_object(space: StratifiedComplex, U: Iterable[str]) -> SheafComplex:
    """i_! Q_U: Q on U, zero outside."""
    U = _require_open(space, U)
    return constant_sheaf(space, 0, U)


# --- adjunction triangles ------------------------------------------------------------

def extension_by_zero(F: SheafComplex, U: frozenset) -> tuple[SheafComplex, SheafMap]:
    """j_! j^* F with its inclusion into F."""
    stalks = {c: (F.stalks[c] if c in U else CochainComplex.zero()) for c in F.space.ids}
    gens = {}
    for (t, s) in F.space.incidences:
        if s in U:
            gens[(s, t)] = F.gens[(s, t)]
    G = SheafComplex(F.space, stalks, gens, check=False)
    comps = {c: (ChainMap.identity(F.stalks[c]) if c in U else ChainMap.zero(stalks[c], F.stalks[c])) for c in F.space.ids}
    return G, SheafMap(G, F, comps)


def restrict_to_closed(F: SheafComplex, Y: frozenset) -> tuple[SheafComplex, SheafMap]:
    """i_* i^* F with the projection from F."""
    stalks = {c: (F.stalks[c] if c in Y else CochainComplex.zero()) for c in F.space.ids}
    gens = {}
    for (t, s) in F.space.incidences:
        if t in Y:
            gens[(s, t)] = F.gens[(s, t)]
    G = SheafComplex(F.space, stalks, gens, check=False)
    comps = {c: (ChainMap.identity(F.stalks[c]) if c in Y else ChainMap.zero(F.stalks[c], stalks[c])) for c in F.space.ids}
    return G, SheafMap(F, G, comps)


def pushforward_restriction(F: SheafComplex, U: frozenset) -> tuple[SheafComplex, SheafMap]:
    """j_* j^* F realised by nerve sections over U meet star(s), with the unit F -> j_* j^* F."""
    sp = F.space
    tots = {c: _nerve_total(F, U & open_star(sp, c)) for c in sp.ids}
    stalks = {c: tots[c].complex(check=False) for c in sp.ids}
    gens = {}
    for (t, s) in sp.incidences:
        gens[(s, t)] = tots[s].projection_to(tots[t])
    G = SheafComplex(sp, stalks, gens, check=False)
    comps = {}
    for c in sp.ids:
        tot, src = tots[c], F.stalks[c]
        ms = {}
        for q in src.degrees():
            ent = {}
            for x in sp.sort(U & open_star(sp, c)):
                key = ((x,), q)
                if key not in tot.offset:
                    continue
                g = F.gen(c, x)[q]
                ro = tot.offset[key]
                for i, row in enumerate(g.data):
                    for j, v in enumerate(row):
                        if v:
                            ent[(ro + i, j)] = v
            ms[q] = Matrix.from_dict(stalks[c].dim(q), src.dim(q), ent)
        comps[c] = ChainMap(src, stalks[c], ms, check=False)
    return G, SheafMap(F, G, comps)


@dataclass
class Triangle:
    left: SheafComplex
    middle: SheafComplex
    right: SheafComplex
    f: SheafMap
    g: SheafMap


def adjunction_triangles(F: SheafComplex, Y: Iterable[str]) -> tuple[Triangle, Triangle]:
    """j_! j^! F -> F -> i_* i^* F and i_! i^! F -> F -> j_* j^* F for closed Y."""
    sp = F.space
    Y = frozenset(Y)
    if not sp.is_closed(Y):
        raise NotClosed(f"{sorted(Y)} is not downward-closed")
    U = sp.all_cells - Y
    jl, inc = extension_by_zero(F, U)
    ir, proj = restrict_to_closed(F, Y)
    t1 = Triangle(jl, F, ir, inc, proj)
    jr, unit = pushforward_restriction(F, U)
    fib = shift_sheaf(cone_sheaf(unit), -1)
    # projection of the fibre onto F: the source summand of the cone
    comps = {}
    for c in sp.ids:
        src, tgt = fib.stalks[c], F.stalks[c]
        comps[c] = ChainMap(src, tgt, {k: Matrix.from_rows([[Fraction(1) if j == i else Fraction(0) for j in range(src.dim(k))] for i in range(tgt.dim(k))], cols=src.dim(k)) for k in src.degrees()}, check=False)
    t2 = Triangle(fib, F, jr, SheafMap(fib, F, comps), unit)
    return t1, t2


# --- Verdier duality ---------------------------------------------------------------

def verdier_dual(F: SheafComplex) -> SheafComplex:
    """(DF)(s) = dual of RG_c(star s, F); generizations dual to extension by zero."""
    sp = F.space
    tots = {c: _cellular_total(F, open_star(sp, c)) for c in sp.ids}
    cs = {c: tots[c].complex() for c in sp.ids}
    stalks = {c: dual(cs[c]) for c in sp.ids}
    gens = {}
    for (t, s) in sp.incidences:
        p = tots[s].projection_to(tots[t])  # RG_c(star s) -> RG_c(star t), adjoint of inclusion
        inc = ChainMap(cs[t], cs[s], {k: m.T for k, m in p.comps.items()}, check=False)
        gens[(s, t)] = dual_map(inc)
        g = gens[(s, t)]
        gens[(s, t)] = ChainMap(stalks[s], stalks[t], g.comps, check=False)
    return SheafComplex(sp, stalks, gens, check=False)


# --- comparisons ---------------------------------------------------------------------

def test_opens(space: StratifiedComplex) -> list:
    out, seen = [], set()
    for U in list(standard_cover(space)) + [open_star(space, c) for c in space.ids]:
        if U not in seen:
            seen.add(U)
            out.append(U)
    return out


def section_profile(F: SheafComplex, opens=None, sections_fn: Callable | None = None) -> dict:
    fn = sections_fn or (lambda U: sections(F, U))
    opens = opens if opens is not None else test_opens(F.space)
    return {tuple(F.space.sort(U)): nonzero_dims(fn(U)) for U in opens}


def quasi_isomorphic(F: SheafComplex, G: SheafComplex) -> bool:
    """Equal sections dims over the standard cover and all open stars."""
    return section_profile(F) == section_profile(G)


def is_constructible(F: SheafComplex) -> list:
    """Intra-stratum generizations that fail to be quasi-isomorphisms."""
    from ..homalg import is_quasi_iso
    bad = []
    for (t, s) in F.space.incidences:
        st = F.space.stratum_of(s)
        if t in st.cells and not is_quasi_iso(F.gens[(s, t)]):
            bad.append((s, t))
    return bad
