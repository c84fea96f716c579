"""Express a sheaf complex as iterated cones of shifted standard objects."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..homalg import complement_in, kernel_basis, nonzero_dims
from ..stratspace import StratifiedComplex, closure
from .core import NotConstructible, SheafComplex, is_constructible, section_profile, test_opens
from .injective import (
    InjComplex,
    InjMap,
    Sparse,
    cone,
    hom_cocycles,
    minimize,
    nerve_model,
    solve_sparse,
    standard_model,
)


class NotGenerated(ValueError):
    """The object is not reachable from standard objects (for example at a boundary point)."""


@lru_cache(maxsize=1024)
def _standard_min(space: StratifiedComplex, U: frozenset):
    return minimize(standard_model(space, U))


def restriction_map(space: StratifiedComplex, U: frozenset, V: frozenset) -> InjMap:
    """Restriction i_*Q_U -> i_*Q_V on minimal models, for V inside U."""
    from .core import chains

    big, small = _standard_min(space, U), _standard_min(space, V)
    cu, cv = chains(space, U), chains(space, V)
    pu = {c: i for i, c in enumerate(cu)}
    r = Sparse(len(cv), len(cu), {(j, pu[c]): 1 for j, c in enumerate(cv)})
    m = small.p.M @ r @ big.i.M
    return InjMap(big.small, small.small, m)


@dataclass(eq=False)
class DecompositionTree:
    kind: str  # "leaf", "cone" or "zero"
    open: frozenset = frozenset()
    shift: int = 0
    left: "DecompositionTree | None" = None
    right: "DecompositionTree | None" = None
    map: Sparse | None = None

    @staticmethod
    def leaf(U, shift: int = 0) -> "DecompositionTree":
        return DecompositionTree("leaf", frozenset(U), shift)

    @staticmethod
    def zero() -> "DecompositionTree":
        return DecompositionTree("zero")

    @staticmethod
    def cone(left, right, m: Sparse) -> "DecompositionTree":
        return DecompositionTree("cone", left=left, right=right, map=m)

    def shifted(self, n: int) -> "DecompositionTree":
        if n == 0 or self.kind == "zero":
            return self
        if self.kind == "leaf":
            return DecompositionTree.leaf(self.open, self.shift + n)
        return DecompositionTree.cone(self.left.shifted(n), self.right.shifted(n), self.map.scale(-1 if n % 2 else 1))

    def evaluate(self, space: StratifiedComplex) -> InjComplex:
        if self.kind == "zero":
            return InjComplex.empty(space)
        if self.kind == "leaf":
            return _standard_min(space, self.open).small.shift(self.shift)
        a, b = self.left.evaluate(space), self.right.evaluate(space)
        f = InjMap(a, b, self.map)
        f.validate()
        return cone(f)

    def leaves(self):
        if self.kind == "leaf":
            yield self
        elif self.kind == "cone":
            yield from self.left.leaves()
            yield from self.right.leaves()

    def size(self) -> int:
        return 1 + (self.left.size() + self.right.size() if self.kind == "cone" else 0)

    def to_json(self, space: StratifiedComplex | None = None) -> dict:
        if self.kind == "zero":
            return {"zero": True}
        if self.kind == "leaf":
            cells = space.sort(self.open) if space else sorted(self.open)
            return {"leaf": {"open": list(cells), "shift": self.shift}}
        return {"cone": [self.left.to_json(space), self.right.to_json(space), self.map.to_list()]}

    @staticmethod
    def from_json(space: StratifiedComplex, obj: dict) -> "DecompositionTree":
        if obj.get("zero"):
            return DecompositionTree.zero()
        if "leaf" in obj:
            U = frozenset(obj["leaf"]["open"])
            for c in U:
                space.check_cell(c)
            return DecompositionTree.leaf(U, int(obj["leaf"].get("shift", 0)))
        l, r, m = obj["cone"]
        left = DecompositionTree.from_json(space, l)
        right = DecompositionTree.from_json(space, r)
        a, b = len(left.evaluate(space)), len(right.evaluate(space))
        return DecompositionTree.cone(left, right, Sparse.from_list(b, a, m))


@lru_cache(maxsize=1024)
def _cell_block(space: StratifiedComplex, s: str):
    """A tree evaluating to a model of Q<=s in degree 0, and the comparison vector."""
    cl = closure(space, {s})
    outer = space.all_cells - (cl - {s})
    inner = space.all_cells - cl
    r = restriction_map(space, outer, inner)
    fib = DecompositionTree.cone(DecompositionTree.leaf(outer), DecompositionTree.leaf(inner), r.M).shifted(-1)
    E = fib.evaluate(space)
    h = nonzero_dims(E.stalk(s))
    if list(h.values()) != [1]:
        raise NotGenerated(f"standard objects do not generate the cell sheaf at {s}")
    c = next(iter(h))
    tree = fib.shifted(c)
    E = tree.evaluate(space)
    ref = InjComplex(space, (s,), (0,), Sparse(1, 1))
    if section_profile(ref.to_sheaf(), sections_fn=ref.sections) != section_profile(E.to_sheaf(), sections_fn=E.sections):
        raise NotGenerated(f"standard objects do not generate the cell sheaf at {s}")
    # a degree-zero cocycle of Hom(Q<=s, E) that is not a coboundary
    j0 = [j for j, l in enumerate(E.labels) if E.degrees[j] == 0 and space.leq(l, s)]
    jm = [j for j, l in enumerate(E.labels) if E.degrees[j] == -1 and space.leq(l, s)]
    j1 = [j for j, d in enumerate(E.degrees) if d == 1]
    z = kernel_basis(E.D.sub(j1, j0).dense()) if j1 else [[Fraction(int(a == b)) for a in range(len(j0))] for b in range(len(j0))]
    bnd = E.D.sub(j0, jm).dense().columns() if jm else []
    pick = complement_in(bnd, z, len(j0))
    if not pick:
        raise NotGenerated(f"no comparison map for the cell sheaf at {s}")
    vec = {j0[a]: v for a, v in enumerate(pick[0]) if v}
    return tree, vec


def _decompose(M: InjComplex):
    sp = M.space
    n = len(M)
    if n == 0:
        return DecompositionTree.zero(), InjComplex.empty(sp), Sparse(0, 0)
    top = max(set(M.labels), key=lambda c: (sp.dim_of[c], sp.index[c]))
    G = [j for j in range(n) if M.labels[j] == top]
    K = [j for j in range(n) if M.labels[j] != top]
    Kc = InjComplex(sp, [M.labels[j] for j in K], [M.degrees[j] for j in K], M.D.sub(K, K))
    T_K, E_K, q_K = _decompose(Kc)

    block, vec = _cell_block(sp, top)
    parts, beta = [], {}
    off = 0
    for a, g in enumerate(G):
        t = block.shifted(-M.degrees[g])
        e = t.evaluate(sp)
        parts.append((t, e))
        for j, v in vec.items():
            beta[(off + j, a)] = v
        off += len(e)
    # direct sum of the blocks, as cones of zero maps
    T_G, E_G = parts[-1]
    for t, e in reversed(parts[:-1]):
        T_G = DecompositionTree.cone(t.shifted(-1), T_G, Sparse(len(E_G), len(e)))
        E_G = T_G.evaluate(sp)
    beta = Sparse(len(E_G), len(G), beta)
    if not K:
        return T_G, E_G, beta

    S = E_G.shift(-1)
    iota = M.D.sub(K, G)  # G[-1] -> K
    target = q_K @ iota  # A -> E_K
    nk, ns, ng = len(E_K), len(S), len(G)
    adeg = [M.degrees[g] + 1 for g in G]
    var = {}
    for i in range(nk):
        for j in range(ns):
            if E_K.degrees[i] == S.degrees[j] and sp.leq(E_K.labels[i], S.labels[j]):
                var[("p", i, j)] = len(var)
        for g in range(ng):
            if E_K.degrees[i] == adeg[g] - 1 and sp.leq(E_K.labels[i], top):
                var[("h", i, g)] = len(var)
    eqs: dict = {}

    def add(key, v, c):
        row = eqs.setdefault(key, {})
        row[v] = row.get(v, 0) + c

    dk_cols: dict = {}
    for (r, m), c in E_K.D.e.items():
        dk_cols.setdefault(m, []).append((r, c))
    ds_rows: dict = {}
    for (m, j), c in S.D.e.items():
        ds_rows.setdefault(m, []).append((j, c))
    b_rows: dict = {}
    for (m, g), c in beta.e.items():
        b_rows.setdefault(m, []).append((g, c))
    for key, v in var.items():
        kind, i, j = key
        if kind == "p":
            for r, c in dk_cols.get(i, ()):
                add(("c", r, j), v, c)
            for jj, c in ds_rows.get(j, ()):
                add(("c", i, jj), v, -c)
            for g, c in b_rows.get(j, ()):
                add(("l", i, g), v, c)
        else:
            for r, c in dk_cols.get(i, ()):
                add(("l", r, j), v, -c)
    rhs = {("l", r, g): c for (r, g), c in target.e.items()}
    for k in rhs:
        eqs.setdefault(k, {})
    sol = solve_sparse([(row, rhs.get(k, 0)) for k, row in eqs.items()], len(var))
    if sol is None:
        raise NotGenerated("connecting map does not lift")
    phi = Sparse(nk, ns, {(i, j): sol[v] for (kind, i, j), v in var.items() if kind == "p"})
    h = Sparse(nk, ng, {(i, g): sol[v] for (kind, i, g), v in var.items() if kind == "h"})
    tree = DecompositionTree.cone(T_G.shifted(-1), T_K, phi)
    E = cone(InjMap(S, E_K, phi))
    # comparison M -> E: G part by beta, K part by q_K, cross term -h
    q = {}
    for (r, a), c in beta.e.items():
        q[(r, G[a])] = c
    for (r, a), c in h.e.items():
        q[(ns + r, G[a])] = -c
    for (r, a), c in q_K.e.items():
        q[(ns + r, K[a])] = c
    return tree, E, Sparse(len(E), n, q)


def _iso_between(M: InjComplex, E: InjComplex, rng) -> Sparse | None:
    """An isomorphism of minimal complexes M -> E, if one exists."""
    if sorted(zip(M.labels, M.degrees)) != sorted(zip(E.labels, E.degrees)):
        return None
    var, basis = hom_cocycles(M, E)
    if not basis:
        return None
    for _ in range(3):
        coeffs = [rng.randint(-3, 3) for _ in basis]
        x = [sum(c * b[a] for c, b in zip(coeffs, basis)) for a in range(len(var))]
        X = Sparse(len(E), len(M), {var[a]: v for a, v in enumerate(x) if v})
        if X.dense().rank() == len(M):
            return X
    return None


def _match_standard(M: InjComplex) -> DecompositionTree | None:
    import random

    from ..stratspace import standard_cover

    rng = random.Random(0)
    sp = M.space
    if not len(M):
        return DecompositionTree.zero()
    for U in standard_cover(sp):
        base = _standard_min(sp, U).small
        if len(base) != len(M) or not len(base):
            continue
        n = min(base.degrees) - min(M.degrees)
        if _iso_between(M, base.shift(n), rng) is not None:
            return DecompositionTree.leaf(U, n)
    return None


def minimal_model(F: SheafComplex) -> InjComplex:
    return minimize(nerve_model(F)).small


def decompose_into_standards(F: SheafComplex, require_constructible: bool = True, verify: bool = True) -> DecompositionTree:
    if require_constructible:
        bad = is_constructible(F)
        if bad:
            s, t = bad[0]
            raise NotConstructible(f"generization {s}<{t} inside a stratum is not a quasi-isomorphism")
    M = minimal_model(F)
    leaf = _match_standard(M)
    if leaf is not None:
        return leaf
    tree, E, q = _decompose(M)
    if verify:
        InjMap(M, E, q).validate()
        if not same_sections(F, tree):
            raise NotGenerated("evaluated tree differs from the input on some open set")
    return tree


def same_sections(F: SheafComplex, tree: DecompositionTree) -> bool:
    E = minimize(tree.evaluate(F.space)).small
    M = minimal_model(F)
    opens = test_opens(F.space)
    return all(nonzero_dims(M.sections(U)) == nonzero_dims(E.sections(U)) for U in opens)
