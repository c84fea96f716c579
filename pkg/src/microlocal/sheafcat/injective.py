"""Complexes of down-set sheaves Q^{<=rho}.

Each summand is a copy of the sheaf that is Q on the closed cell below its label
and zero elsewhere, placed in one degree.  These are injective cellular sheaves,
so chain-level maps into such complexes already compute derived maps, and
sections over an open U are obtained by keeping the summands labelled in U.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..homalg import ChainMap, CochainComplex, Matrix, StructuralError
from ..stratspace import StratifiedComplex


class Sparse:
    """Sparse rational matrix stored as {(row, col): value}."""

    __slots__ = ("rows", "cols", "e")

    def __init__(self, rows: int, cols: int, e: dict | None = None):
        self.rows, self.cols = rows, cols
        self.e = {k: Fraction(v) for k, v in (e or {}).items() if v}

    @staticmethod
    def identity(n: int) -> "Sparse":
        return Sparse(n, n, {(i, i): 1 for i in range(n)})

    def __matmul__(self, o: "Sparse") -> "Sparse":
        bycol: dict = {}
        for (i, j), v in o.e.items():
            bycol.setdefault(i, []).append((j, v))
        out: dict = {}
        for (i, k), v in self.e.items():
            for j, w in bycol.get(k, ()):
                out[(i, j)] = out.get((i, j), 0) + v * w
        return Sparse(self.rows, o.cols, out)

    def __add__(self, o: "Sparse") -> "Sparse":
        out = dict(self.e)
        for k, v in o.e.items():
            out[k] = out.get(k, 0) + v
        return Sparse(self.rows, self.cols, out)

    def __sub__(self, o: "Sparse") -> "Sparse":
        return self + o.scale(-1)

    def scale(self, c) -> "Sparse":
        return Sparse(self.rows, self.cols, {k: v * c for k, v in self.e.items()})

    def is_zero(self) -> bool:
        return not self.e

    def sub(self, rows: list, cols: list) -> "Sparse":
        ri = {r: a for a, r in enumerate(rows)}
        ci = {c: a for a, c in enumerate(cols)}
        return Sparse(len(rows), len(cols), {(ri[i], ci[j]): v for (i, j), v in self.e.items() if i in ri and j in ci})

    def dense(self) -> Matrix:
        return Matrix.from_dict(self.rows, self.cols, self.e)

    def to_list(self) -> list:
        return [[i, j, str(v)] for (i, j), v in sorted(self.e.items())]

    @staticmethod
    def from_list(rows, cols, items) -> "Sparse":
        return Sparse(rows, cols, {(int(i), int(j)): Fraction(v) for i, j, v in items})


def block_sparse(parts, rows, cols) -> Sparse:
    """Assemble from [(row_offset, col_offset, Sparse)]."""
    e = {}
    for ro, co, m in parts:
        for (i, j), v in m.e.items():
            e[(ro + i, co + j)] = v
    return Sparse(rows, cols, e)


def solve_sparse(eqs: list, nvars: int) -> list | None:
    """Solve a list of (row dict, rhs) equations; free variables are set to zero."""
    pivots: dict = {}  # var -> (row dict, rhs), row normalised with 1 at var
    order = []
    for row, rhs in eqs:
        row = {k: Fraction(v) for k, v in row.items() if v}
        rhs = Fraction(rhs)
        while row:
            var = min(row)
            if var not in pivots:
                break
            c = row[var]
            prow, prhs = pivots[var]
            for k, v in prow.items():
                nv = row.get(k, 0) - c * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            rhs -= c * prhs
        if not row:
            if rhs:
                return None
            continue
        var = min(row)
        c = row[var]
        pivots[var] = ({k: v / c for k, v in row.items()}, rhs / c)
        order.append(var)
    x = [Fraction(0)] * nvars
    # every pivot row only involves variables at or after its pivot
    for var in sorted(pivots, reverse=True):
        row, rhs = pivots[var]
        x[var] = rhs - sum(v * x[k] for k, v in row.items() if k != var)
    return x


@dataclass(eq=False)
class InjComplex:
    space: StratifiedComplex
    labels: tuple
    degrees: tuple
    D: Sparse

    def __post_init__(self):
        self.labels, self.degrees = tuple(self.labels), tuple(self.degrees)
        n = len(self.labels)
        if (self.D.rows, self.D.cols) != (n, n):
            raise StructuralError("differential has wrong shape")

    def __len__(self):
        return len(self.labels)

    def validate(self) -> None:
        sp = self.space
        for (i, j), v in self.D.e.items():
            if self.degrees[i] != self.degrees[j] + 1:
                raise StructuralError("differential must raise degree by one")
            if not sp.leq(self.labels[i], self.labels[j]):
                raise StructuralError(f"no map from Q<={self.labels[j]} to Q<={self.labels[i]}")
        if not (self.D @ self.D).is_zero():
            raise StructuralError("D^2 != 0")

    @staticmethod
    def empty(space) -> "InjComplex":
        return InjComplex(space, (), (), Sparse(0, 0))

    def shift(self, n: int) -> "InjComplex":
        return InjComplex(self.space, self.labels, tuple(d - n for d in self.degrees), self.D.scale(-1 if n % 2 else 1))

    def select(self, keep) -> CochainComplex:
        """Complex spanned by the summands in ``keep`` (assumed to be a quotient)."""
        keep = list(keep)
        if not keep:
            return CochainComplex.zero()
        degs = sorted({self.degrees[j] for j in keep})
        lo, hi = degs[0], degs[-1]
        by = {k: [j for j in keep if self.degrees[j] == k] for k in range(lo, hi + 1)}
        diffs = [self.D.sub(by[k + 1], by[k]).dense() for k in range(lo, hi)]
        return CochainComplex(lo, [len(by[k]) for k in range(lo, hi + 1)], diffs, check=False)

    def sections(self, U) -> CochainComplex:
        return self.select(j for j, l in enumerate(self.labels) if l in U)

    def stalk_indices(self, s: str) -> list:
        return [j for j, l in enumerate(self.labels) if self.space.leq(s, l)]

    def stalk(self, s: str) -> CochainComplex:
        return self.select(self.stalk_indices(s))

    def to_sheaf(self):
        from .core import SheafComplex

        sp = self.space
        idx = {c: self.stalk_indices(c) for c in sp.ids}
        stalks = {c: self.select(idx[c]) for c in sp.ids}

        def bydeg(ix):
            out = {}
            for j in ix:
                out.setdefault(self.degrees[j], []).append(j)
            return out

        gens = {}
        for (t, s) in sp.incidences:
            a, b = bydeg(idx[s]), bydeg(idx[t])
            comps = {}
            for k in stalks[s].degrees():
                pos = {j: i for i, j in enumerate(a.get(k, []))}
                ent = {(i, pos[j]): 1 for i, j in enumerate(b.get(k, []))}
                comps[k] = Matrix.from_dict(stalks[t].dim(k), stalks[s].dim(k), ent)
            gens[(s, t)] = ChainMap(stalks[s], stalks[t], comps, check=False)
        return SheafComplex(sp, stalks, gens, check=False)

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "degrees": list(self.degrees), "D": self.D.to_list()}

    @staticmethod
    def from_json(space, obj) -> "InjComplex":
        n = len(obj["labels"])
        return InjComplex(space, obj["labels"], obj["degrees"], Sparse.from_list(n, n, obj["D"]))


@dataclass(eq=False)
class InjMap:
    """Degree-zero chain map; entry (i, j) maps summand j of source to summand i of target."""

    source: InjComplex
    target: InjComplex
    M: Sparse

    def validate(self) -> None:
        s, t = self.source, self.target
        for (i, j), v in self.M.e.items():
            if t.degrees[i] != s.degrees[j] or not s.space.leq(t.labels[i], s.labels[j]):
                raise StructuralError("entry violates degree or label constraint")
        if not (t.D @ self.M - self.M @ s.D).is_zero():
            raise StructuralError("not a chain map")

    def __matmul__(self, o: "InjMap") -> "InjMap":
        return InjMap(o.source, self.target, self.M @ o.M)


def direct_sum(parts: list) -> InjComplex:
    space = parts[0].space
    labels, degrees, blocks, off = [], [], [], 0
    for p in parts:
        labels += p.labels
        degrees += p.degrees
        blocks.append((off, off, p.D))
        off += len(p)
    return InjComplex(space, labels, degrees, block_sparse(blocks, off, off))


def cone(f: InjMap) -> InjComplex:
    """Summands: source shifted down by one, then target; D = [[-Ds, 0], [f, Dt]]."""
    s, t = f.source, f.target
    ns, nt = len(s), len(t)
    D = block_sparse([(0, 0, s.D.scale(-1)), (ns, 0, f.M), (ns, ns, t.D)], ns + nt, ns + nt)
    return InjComplex(s.space, s.labels + t.labels, tuple(d - 1 for d in s.degrees) + t.degrees, D)


def nerve_model(F, U=None) -> InjComplex:
    """The nerve coresolution of a sheaf complex, restricted to chains in U."""
    from .core import _nerve_total

    sp = F.space
    U = sp.all_cells if U is None else frozenset(U)
    tot = _nerve_total(F, U)
    c = tot.complex(check=False)
    labels, degrees = [], []
    base = {}
    for n in c.degrees():
        base[n] = len(labels)
        labels += [None] * c.dim(n)
        degrees += [n] * c.dim(n)
    for key, p, st in tot.blocks:
        for q in st.degrees():
            for i in range(st.dim(q)):
                labels[base[p + q] + tot.offset[(key, q)] + i] = key[0]
    e = {}
    for n, ent in tot.entries.items():
        for (r, col), v in ent.items():
            if v:
                e[(base[n + 1] + r, base[n] + col)] = v
    return InjComplex(sp, labels, degrees, Sparse(len(labels), len(labels), e))


def standard_model(space, U) -> InjComplex:
    """Nerve cochains of U as a complex of down-set sheaves; its sheaf is i_* Q_U."""
    from .core import chains

    ch = chains(space, frozenset(U))
    pos = {c: i for i, c in enumerate(ch)}
    e = {}
    for c, i in pos.items():
        for k in range(len(c)):
            f = c[:k] + c[k + 1:]
            j = pos.get(f)
            if j is not None:
                e[(i, j)] = (-1) ** k
    return InjComplex(space, [c[0] for c in ch], [len(c) - 1 for c in ch], Sparse(len(ch), len(ch), e))


@dataclass(eq=False)
class Reduction:
    """Strong deformation retract: p i = 1 on the small complex."""

    big: InjComplex
    small: InjComplex
    p: InjMap
    i: InjMap


def minimize(C: InjComplex) -> Reduction:
    """Cancel invertible entries of D between summands with equal labels."""
    n = len(C)
    alive = list(range(n))
    D = {k: v for k, v in C.D.e.items()}
    # p: big -> current, i: current -> big, stored as dict maps on original indices
    p = {j: {j: Fraction(1)} for j in range(n)}  # column j of p (big j -> combination of alive)
    i = {j: {j: Fraction(1)} for j in range(n)}  # column j of i (alive j -> combination of big)

    def col(j):
        return {r: v for (r, c), v in D.items() if c == j}

    def row(a):
        return {c: v for (r, c), v in D.items() if r == a}

    changed = True
    live = set(alive)
    while changed:
        changed = False
        for (a, b), c in sorted(D.items()):
            if a in live and b in live and C.labels[a] == C.labels[b] and c:
                cb, ra = col(b), row(a)
                new = dict(D)
                for x, u in cb.items():
                    for y, w in ra.items():
                        new[(x, y)] = new.get((x, y), 0) - u * w / c
                live -= {a, b}
                D = {k: v for k, v in new.items() if v and k[0] in live and k[1] in live}
                # p' = pi (1 - D h), h a = b / c: image of a becomes -D(b)/c
                for j, comb in p.items():
                    if a in comb:
                        coef = comb.pop(a)
                        for x, u in cb.items():
                            if x != a:
                                comb[x] = comb.get(x, 0) - coef * u / c
                    comb.pop(b, None)
                    for x in [x for x, v in comb.items() if not v]:
                        del comb[x]
                # i' = (1 - h D) iota: y -> y - (D_ay / c) b, pushed through previous i
                ib = i[b]
                for y, w in ra.items():
                    if y in live:
                        for z, v in ib.items():
                            i[y][z] = i[y].get(z, 0) - w / c * v
                        for z in [z for z, v in i[y].items() if not v]:
                            del i[y][z]
                changed = True
                break
    keep = sorted(live)
    pos = {j: k for k, j in enumerate(keep)}
    small = InjComplex(C.space, [C.labels[j] for j in keep], [C.degrees[j] for j in keep],
                       Sparse(len(keep), len(keep), {(pos[x], pos[y]): v for (x, y), v in D.items()}))
    pm = Sparse(len(keep), n, {(pos[x], j): v for j, comb in p.items() for x, v in comb.items() if x in pos})
    im = Sparse(n, len(keep), {(z, pos[y]): v for y in keep for z, v in i[y].items()})
    return Reduction(C, small, InjMap(C, small, pm), InjMap(small, C, im))


def hom_cocycles(A: InjComplex, B: InjComplex) -> tuple[list, list]:
    """Degree-zero chain maps A -> B: (entry positions, basis of solutions)."""
    from ..homalg import kernel_basis

    sp = A.space
    var = [(i, j) for i in range(len(B)) for j in range(len(A))
           if B.degrees[i] == A.degrees[j] and sp.leq(B.labels[i], A.labels[j])]
    if not var:
        return var, []
    vi = {v: a for a, v in enumerate(var)}
    bcols: dict = {}
    for (r, m), c in B.D.e.items():
        bcols.setdefault(m, []).append((r, c))
    arows: dict = {}
    for (m, jj), c in A.D.e.items():
        arows.setdefault(m, []).append((jj, c))
    eqs: dict = {}
    for (i, j), a in vi.items():
        for r, c in bcols.get(i, ()):
            row = eqs.setdefault((r, j), {})
            row[a] = row.get(a, 0) + c
        for jj, c in arows.get(j, ()):
            row = eqs.setdefault((i, jj), {})
            row[a] = row.get(a, 0) - c
    rows = [r for r in eqs.values() if any(r.values())]
    if not rows:
        return var, [[Fraction(int(a == b)) for a in range(len(var))] for b in range(len(var))]
    A_ = Matrix.from_dict(len(rows), len(var), {(r, a): v for r, row in enumerate(rows) for a, v in row.items()})
    return var, kernel_basis(A_)


def random_chain_map(A: InjComplex, B: InjComplex, rng, lo: int = -2, hi: int = 2) -> InjMap:
    var, basis = hom_cocycles(A, B)
    e = {}
    for b in basis:
        c = rng.randint(lo, hi)
        if c:
            for a, v in enumerate(b):
                if v:
                    e[var[a]] = e.get(var[a], 0) + c * v
    return InjMap(A, B, Sparse(len(B), len(A), e))
