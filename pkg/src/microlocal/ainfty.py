"""Finite A-infinity categories, functors, modules and homotopy transfer.

Conventions.  A composable sequence X0 -> X1 -> ... -> Xd is stored in natural
order: the tensor ``m[(X0, ..., Xd)]`` takes inputs (a1, ..., ad) with
a_t in hom(X_{t-1}, X_t) and outputs in hom(X0, Xd).  In the usual notation this
is m^d(a_d, ..., a_1).  With reduced degrees |a| - 1 the defining identities are
the Koszul-signed bar relations

    sum (-1)^(|a_1|+...+|a_i| - i) m(a_1..a_i, m(a_{i+1}..a_{i+l}), ...) = 0.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .homalg import Matrix


def _add(acc: dict, key, v) -> None:
    if v:
        nv = acc.get(key, 0) + v
        if nv:
            acc[key] = nv
        else:
            acc.pop(key, None)


@dataclass(eq=False)
class AInftyStructure:
    objects: tuple
    hom: dict  # (X, Y) -> tuple of degrees
    m: dict = field(default_factory=dict)  # path -> {input index tuple: {out index: coeff}}
    max_arity: int = 6

    def deg(self, X, Y, j) -> int:
        return self.hom[(X, Y)][j]

    def dim(self, X, Y) -> int:
        return len(self.hom.get((X, Y), ()))

    def paths(self, d: int):
        """Composable object sequences of length d+1 with nonzero homs."""
        for p in itertools.product(self.objects, repeat=d + 1):
            if all(self.dim(p[t], p[t + 1]) for t in range(d)):
                yield p

    def apply(self, path: tuple, idx: tuple) -> dict:
        return self.m.get(path, {}).get(idx, {})

    def set(self, path, idx, out: dict) -> None:
        out = {k: Fraction(v) for k, v in out.items() if v}
        if out:
            self.m.setdefault(tuple(path), {})[tuple(idx)] = out

    def arity_part(self, d: int) -> dict:
        return {p: t for p, t in self.m.items() if len(p) == d + 1}

    def is_zero(self) -> bool:
        return all(not self.dim(X, Y) for X, Y in self.hom)

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "hom": {f"{X}->{Y}": list(v) for (X, Y), v in self.hom.items()},
            "max_arity": self.max_arity,
            "m": {",".join(p): [[list(i), o, str(c)] for i, outs in sorted(t.items()) for o, c in sorted(outs.items())]
                  for p, t in self.m.items()},
        }

    @staticmethod
    def from_json(obj: dict) -> "AInftyStructure":
        hom = {}
        for k, v in obj["hom"].items():
            X, Y = k.split("->")
            hom[(X, Y)] = tuple(int(x) for x in v)
        A = AInftyStructure(tuple(obj["objects"]), hom, {}, int(obj.get("max_arity", 6)))
        for k, rows in obj.get("m", {}).items():
            path = tuple(k.split(","))
            for i, o, c in rows:
                t = A.m.setdefault(path, {}).setdefault(tuple(i), {})
                _add(t, int(o), Fraction(c))
        return A


def _rdeg(A: AInftyStructure, path, idx) -> list:
    return [A.deg(path[t], path[t + 1], j) - 1 for t, j in enumerate(idx)]


def _basis_tuples(A: AInftyStructure, path):
    return itertools.product(*[range(A.dim(path[t], path[t + 1])) for t in range(len(path) - 1)])


def _apply_inner(A, path, idx, start, l):
    """Apply m^l to positions start..start+l-1 of a basis tuple; returns {(path, idx): coeff}."""
    sub_p = path[start:start + l + 1]
    outs = A.apply(sub_p, idx[start:start + l])
    if not outs:
        return {}
    sign = -1 if sum(_rdeg(A, path[:start + 1], idx[:start])) % 2 else 1
    npath = path[:start + 1] + path[start + l:]
    res = {}
    for o, c in outs.items():
        _add(res, (npath, idx[:start] + (o,) + idx[start + l:]), sign * c)
    return res


def _bar(A: AInftyStructure, elem: dict, min_arity: int = 1) -> dict:
    """The coderivation of m (arities >= min_arity) on a tensor element {(path, idx): coeff}."""
    res = {}
    for (path, idx), c in elem.items():
        L = len(idx)
        for start in range(L):
            for l in range(min_arity, L - start + 1):
                for k, v in _apply_inner(A, path, idx, start, l).items():
                    _add(res, k, c * v)
    return res


@dataclass
class RelationReport:
    ok: bool
    arity: int | None = None
    witness: tuple | None = None
    value: dict | None = None

    def to_json(self) -> dict:
        out = {"ok": self.ok}
        if not self.ok:
            out.update({"arity": self.arity, "path": list(self.witness[0]), "inputs": list(self.witness[1]),
                        "value": {str(k): str(v) for k, v in (self.value or {}).items()}})
        return out


def check_relations(A: AInftyStructure, arity: int | None = None) -> RelationReport:
    """Evaluate the A-infinity identities on every basis tuple of length <= arity."""
    arity = A.max_arity if arity is None else arity
    if arity > A.max_arity:
        raise ValueError("arity exceeds stored data")
    for d in range(1, arity + 1):
        for path in A.paths(d):
            room = set(A.hom.get((path[0], path[-1]), ()))
            for idx in _basis_tuples(A, path):
                # the identity lands in degree sum|a| + 3 - d
                if sum(A.deg(path[t], path[t + 1], j) for t, j in enumerate(idx)) + 3 - d not in room:
                    continue
                once = _bar(A, {(path, idx): Fraction(1)})
                # only the outermost m of the second pass reaches length one
                out = {}
                for (p, i), c in once.items():
                    for o, v in A.apply(p, i).items():
                        _add(out, o, c * v)
                if out:
                    return RelationReport(False, d, (path, idx), out)
    return RelationReport(True)


# --- dg input ------------------------------------------------------------------------------------

def from_dg(objects, hom, diff: dict, comp: dict, max_arity: int = 6) -> AInftyStructure:
    """dg data to A-infinity data: m1(a) = (-1)^|a| da, m2(a2, a1) = (-1)^|a1| a2 a1.

    ``diff[(X, Y)]`` is a Matrix on hom(X, Y); ``comp[(X, Y, Z)]`` maps (j1, j2) with
    j1 in hom(X, Y), j2 in hom(Y, Z) to {out: coeff} for the composite a2 a1."""
    A = AInftyStructure(tuple(objects), dict(hom), {}, max_arity)
    for (X, Y), d in diff.items():
        degs = hom[(X, Y)]
        for j in range(len(degs)):
            col = {i: d.data[i][j] for i in range(d.rows) if d.data[i][j]}
            A.set((X, Y), (j,), {i: v * (-1) ** degs[j] for i, v in col.items()})
    for (X, Y, Z), table in comp.items():
        for (j1, j2), outs in table.items():
            s = (-1) ** hom[(X, Y)][j1]
            A.set((X, Y, Z), (j1, j2), {o: s * c for o, c in outs.items()})
    return A


def m1_matrix(A: AInftyStructure, X, Y) -> Matrix:
    n = A.dim(X, Y)
    ent = {}
    for (j,), outs in A.m.get((X, Y), {}).items():
        for o, c in outs.items():
            ent[(o, j)] = c
    return Matrix.from_dict(n, n, ent)


# --- transfer data --------------------------------------------------------------------------------

@dataclass(eq=False)
class TransferData:
    """Per hom: P (onto the small space), I, and H with I P - 1 = m1 H + H m1."""

    small: dict  # (X, Y) -> tuple of degrees of the small space
    P: dict
    I: dict
    H: dict

    def check(self, A: AInftyStructure, side: bool = True) -> list:
        bad = []
        for key in A.hom:
            n = A.dim(*key)
            k = len(self.small.get(key, ()))
            P = self.P.get(key, Matrix.zeros(k, n))
            I = self.I.get(key, Matrix.zeros(n, k))
            H = self.H.get(key, Matrix.zeros(n, n))
            m1 = m1_matrix(A, *key)
            if P @ I != Matrix.identity(k):
                bad.append((key, "P I = 1"))
            if I @ P - Matrix.identity(n) != m1 @ H + H @ m1:
                bad.append((key, "I P - 1 = m1 H + H m1"))
            if side:
                if not (H @ I).is_zero():
                    bad.append((key, "H I = 0"))
                if not (P @ H).is_zero():
                    bad.append((key, "P H = 0"))
                if not (H @ H).is_zero():
                    bad.append((key, "H H = 0"))
        return bad

    def repaired(self, A: AInftyStructure) -> "TransferData":
        """Impose the side conditions without changing P and I."""
        H2 = {}
        for key in A.hom:
            n = A.dim(*key)
            if key not in self.H:
                continue
            m1 = m1_matrix(A, *key)
            pi = self.I[key] @ self.P[key] - Matrix.identity(n)
            h1 = pi @ self.H[key] @ pi
            H2[key] = -(h1 @ m1 @ h1)
        return TransferData(self.small, self.P, self.I, H2)


def identity_transfer(A: AInftyStructure) -> TransferData:
    return TransferData(dict(A.hom), {k: Matrix.identity(A.dim(*k)) for k in A.hom},
                        {k: Matrix.identity(A.dim(*k)) for k in A.hom},
                        {k: Matrix.zeros(A.dim(*k), A.dim(*k)) for k in A.hom})


def matching_transfer(m1: Matrix, degrees, pairs) -> tuple[tuple, Matrix, Matrix, Matrix]:
    """Cancel matched pairs (a, b) with m1[a][b] != 0 one at a time.

    Returns (small degrees, P, I, H) with I P - 1 = m1 H + H m1 and the side conditions.
    One cancellation with h = -e_b e_a^T / c updates every map by a rank-one term."""
    n = len(degrees)
    D = {r: {c: v for c, v in enumerate(m1.data[r]) if v} for r in range(n)}
    P = {r: {r: Fraction(1)} for r in range(n)}  # rows indexed by surviving generators
    I = {c: {c: Fraction(1)} for c in range(n)}  # columns indexed by surviving generators
    H: dict = {}
    alive = set(range(n))

    def col(M, j):
        return {r: row[j] for r, row in M.items() if row.get(j)}

    for a, b in pairs:
        c = D.get(a, {}).get(b)
        if not c:
            raise ValueError(f"pair {a},{b} is not invertible in the current differential")
        Db, Da = col(D, b), dict(D[a])
        Pa, Ib = dict(P[a]), dict(I[b])
        for r, x in Ib.items():
            row = H.setdefault(r, {})
            for j, y in Pa.items():
                _add(row, j, -x * y / c)
        for r, x in Db.items():
            if r in (a, b):
                continue
            for j, y in Pa.items():
                _add(P[r], j, -x * y / c)
            for j, y in Da.items():
                _add(D[r], j, -x * y / c)
        for j, y in Da.items():
            if j in (a, b):
                continue
            for r, x in Ib.items():
                _add(I[j], r, -x * y / c)
        alive -= {a, b}
        for k in (a, b):
            D.pop(k, None)
            P.pop(k, None)
            I.pop(k, None)
        for row in D.values():
            row.pop(a, None)
            row.pop(b, None)
    keep = sorted(alive)
    Pm = Matrix.from_dict(len(keep), n, {(i, j): v for i, r in enumerate(keep) for j, v in P[r].items()})
    Im = Matrix.from_dict(n, len(keep), {(r, i): v for i, c in enumerate(keep) for r, v in I[c].items()})
    Hm = Matrix.from_dict(n, n, {(r, j): v for r, row in H.items() for j, v in row.items()})
    return tuple(degrees[k] for k in keep), Pm, Im, Hm


# --- transfer -------------------------------------------------------------------------------------

def _tensor_map(elem: dict, maps: dict, dims_key) -> dict:
    """Apply per-hom matrices factorwise (degree zero maps, no signs)."""
    res = {}
    for (path, idx), c in elem.items():
        cols = []
        for t, j in enumerate(idx):
            M = maps[(path[t], path[t + 1])]
            cols.append([(i, M.data[i][j]) for i in range(M.rows) if M.data[i][j]])
        for combo in itertools.product(*cols):
            v = c
            for _, w in combo:
                v *= w
            _add(res, (path, tuple(i for i, _ in combo)), v)
    return res


def _apply_h(A: AInftyStructure, elem: dict, H: dict, IP: dict) -> dict:
    """H_n = sum_j 1^{j} (x) h (x) (ip)^{n-j-1} with Koszul signs (h is odd)."""
    res = {}
    for (path, idx), c in elem.items():
        rd = _rdeg(A, path, idx)
        for j in range(len(idx)):
            sign = -1 if sum(rd[:j]) % 2 else 1
            facts = []
            for t, x in enumerate(idx):
                key = (path[t], path[t + 1])
                if t < j:
                    facts.append([(x, 1)])
                else:
                    M = H[key] if t == j else IP[key]
                    facts.append([(i, M.data[i][x]) for i in range(M.rows) if M.data[i][x]])
            for combo in itertools.product(*facts):
                v = c * sign
                for _, w in combo:
                    v *= w
                _add(res, (path, tuple(i for i, _ in combo)), v)
    return res


def _perturbation_series(A: AInftyStructure, start: dict, H: dict, IP: dict) -> dict:
    """Length-one part of sum_n (delta H)^n delta applied to ``start``."""
    out = {}
    w = _bar(A, start, min_arity=2)
    while w:
        nxt = {}
        for k, v in w.items():
            if len(k[1]) == 1:
                _add(out, k, v)
            else:
                nxt[k] = v
        if not nxt:
            break
        w = _bar(A, _apply_h(A, nxt, H, IP), min_arity=2)
    return out


@dataclass(eq=False)
class AInftyFunctor:
    source: AInftyStructure
    target: AInftyStructure
    obj: dict
    comps: dict = field(default_factory=dict)  # path in source -> {idx: {out: coeff}}
    max_arity: int = 6

    def apply(self, path, idx) -> dict:
        return self.comps.get(tuple(path), {}).get(tuple(idx), {})

    def set(self, path, idx, out: dict) -> None:
        out = {k: Fraction(v) for k, v in out.items() if v}
        if out:
            self.comps.setdefault(tuple(path), {})[tuple(idx)] = out


def identity_functor(A: AInftyStructure) -> AInftyFunctor:
    F = AInftyFunctor(A, A, {X: X for X in A.objects}, {}, A.max_arity)
    for key in A.hom:
        for j in range(A.dim(*key)):
            F.set(key, (j,), {j: 1})
    return F


def _functor_hat(F: AInftyFunctor, elem: dict) -> dict:
    """Coalgebra map on tensor elements: sum over splittings of F components."""
    res = {}
    for (path, idx), c in elem.items():
        L = len(idx)
        for cuts in _compositions(L):
            pieces, pos, ok = [], 0, True
            for s in cuts:
                outs = F.apply(path[pos:pos + s + 1], idx[pos:pos + s])
                if not outs:
                    ok = False
                    break
                pieces.append((path[pos], path[pos + s], outs))
                pos += s
            if not ok:
                continue
            npath = tuple(F.obj[p[0]] for p in pieces) + (F.obj[pieces[-1][1]],)
            for combo in itertools.product(*[list(p[2].items()) for p in pieces]):
                v = c
                for _, w in combo:
                    v *= w
                _add(res, (npath, tuple(o for o, _ in combo)), v)
    return res


def _compositions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def check_functor(F: AInftyFunctor, arity: int | None = None) -> RelationReport:
    """F-hat after the source bar differential equals the target bar differential after F-hat."""
    arity = F.max_arity if arity is None else arity
    if arity > F.max_arity:
        raise ValueError("arity exceeds stored data")
    A, B = F.source, F.target
    for d in range(1, arity + 1):
        for path in A.paths(d):
            for idx in _basis_tuples(A, path):
                e = {(path, idx): Fraction(1)}
                lhs = {k: v for k, v in _functor_hat(F, _bar(A, e)).items() if len(k[1]) == 1}
                rhs = {k: v for k, v in _bar(B, _functor_hat(F, e)).items() if len(k[1]) == 1}
                diff = dict(lhs)
                for k, v in rhs.items():
                    _add(diff, k, -v)
                if diff:
                    return RelationReport(False, d, (path, idx), {k[1][0]: v for k, v in diff.items()})
    return RelationReport(True)


def compose_functors(G: AInftyFunctor, F: AInftyFunctor) -> AInftyFunctor:
    """(G o F)^d = sum G^r(F^{s_1}(...), ..., F^{s_r}(...)); F acts first."""
    if F.target is not G.source:
        raise ValueError("functors are not composable")
    A = F.source
    arity = min(F.max_arity, G.max_arity)
    out = AInftyFunctor(A, G.target, {X: G.obj[F.obj[X]] for X in A.objects}, {}, arity)
    for d in range(1, arity + 1):
        for path in A.paths(d):
            for idx in _basis_tuples(A, path):
                img = _functor_hat(F, {(path, idx): Fraction(1)})
                res = {}
                for (p2, i2), c in img.items():
                    for o, v in G.apply(p2, i2).items():
                        _add(res, o, c * v)
                out.set(path, idx, res)
    return out


def functors_equal(F: AInftyFunctor, G: AInftyFunctor) -> bool:
    keys = set(F.comps) | set(G.comps)
    for k in keys:
        a, b = F.comps.get(k, {}), G.comps.get(k, {})
        for idx in set(a) | set(b):
            if a.get(idx, {}) != b.get(idx, {}):
                return False
    return True


@dataclass(eq=False)
class TransferResult:
    B: AInftyStructure
    F: AInftyFunctor  # B -> A (inclusion side)
    G: AInftyFunctor  # A -> B (projection side)
    homotopy: dict  # path -> {idx: {out: coeff}}, components of h + hAh on the source


def _tree_vector(A: AInftyStructure, F: "AInftyFunctor", path, idx, arities) -> dict:
    """sum over r >= 2 of m_r applied to F-hat(y): the root of every tree with H on inner edges.

    Only splittings into r pieces with r in ``arities`` (those where A has operations) are expanded."""
    vec = {}
    k = len(idx)
    for cuts in _compositions(k):
        r = len(cuts)
        if r < 2 or r not in arities:
            continue
        pieces, pos = [], 0
        for c in cuts:
            outs = F.apply(path[pos:pos + c + 1], idx[pos:pos + c])
            if not outs:
                break
            pieces.append(list(outs.items()))
            pos += c
        else:
            npath = tuple(path[p] for p in itertools.accumulate((0,) + cuts))
            table = A.m.get(npath)
            if not table:
                continue
            for combo in itertools.product(*pieces):
                outs = table.get(tuple(o for o, _ in combo))
                if not outs:
                    continue
                w = Fraction(1)
                for _, x in combo:
                    w *= x
                for o, v in outs.items():
                    _add(vec, o, w * v)
    return vec


def hpl_transfer(A: AInftyStructure, T: TransferData, arity: int | None = None, functor_arity: int | None = None,
                 method: str = "trees") -> TransferResult:
    """Transferred structure B, inclusion-side functor F and projection-side functor G.

    ``method="trees"`` builds F and B by recursion on arity, reusing lower F components;
    ``method="series"`` sums the perturbation series of the tensor-trick homotopy directly."""
    if method not in ("trees", "series"):
        raise ValueError(f"unknown method {method!r}")
    arity = A.max_arity if arity is None else arity
    bad = T.check(A)
    if bad:
        raise ValueError(f"transfer data violates {bad[0][1]} on {bad[0][0]}")
    B = AInftyStructure(A.objects, {k: tuple(T.small.get(k, ())) for k in A.hom}, {}, arity)
    IP = {k: T.I[k] @ T.P[k] for k in A.hom}
    F = AInftyFunctor(B, A, {X: X for X in A.objects}, {}, arity)
    G = AInftyFunctor(A, B, {X: X for X in A.objects}, {}, functor_arity or arity)
    for key in A.hom:
        m1 = m1_matrix(A, *key)
        b1 = T.P[key] @ m1 @ T.I[key]
        for j in range(B.dim(*key)):
            B.set(key, (j,), {i: b1.data[i][j] for i in range(b1.rows)})
            F.set(key, (j,), {i: T.I[key].data[i][j] for i in range(T.I[key].rows)})
        for j in range(A.dim(*key)):
            G.set(key, (j,), {i: T.P[key].data[i][j] for i in range(T.P[key].rows)})
    hom_h = {}
    arities = {len(p) - 1 for p, t in A.m.items() if t}
    for d in range(2, arity + 1):
        for path in B.paths(d):
            key = (path[0], path[-1])
            room = set(A.hom.get(key, ()))
            for idx in _basis_tuples(B, path):
                # the series lands in degree sum|y| + 2 - d of A(key); skip empty degrees
                if sum(B.deg(path[t], path[t + 1], j) for t, j in enumerate(idx)) + 2 - d not in room:
                    continue
                if method == "trees":
                    vec = _tree_vector(A, F, path, idx, arities)
                else:
                    start = _tensor_map({(path, idx): Fraction(1)}, T.I, None)
                    res = _perturbation_series(A, start, T.H, IP)
                    vec = {k[1][0]: v for k, v in res.items()}
                if key not in T.P:
                    continue
                P, H = T.P[key], T.H[key]
                B.set(path, idx, {i: sum(P.data[i][x] * v for x, v in vec.items()) for i in range(P.rows)})
                F.set(path, idx, {i: sum(H.data[i][x] * v for x, v in vec.items()) for i in range(H.rows)})
    for d in range(2, (functor_arity or arity) + 1):
        for path in A.paths(d):
            key = (path[0], path[-1])
            room = set(A.hom.get(key, ()))
            for idx in _basis_tuples(A, path):
                if sum(A.deg(path[t], path[t + 1], j) for t, j in enumerate(idx)) + 1 - d not in room:
                    continue
                start = _apply_h(A, {(path, idx): Fraction(1)}, T.H, IP)
                res = _perturbation_series(A, start, T.H, IP)
                key = (path[0], path[-1])
                vec = {k[1][0]: v for k, v in res.items()}
                if key not in T.P:
                    continue
                P = T.P[key]
                G.set(path, idx, {i: sum(P.data[i][x] * v for x, v in vec.items()) for i in range(P.rows)})
                hom_h.setdefault(path, {})[idx] = {i: sum(T.H[key].data[i][x] * v for x, v in vec.items()) for i in range(A.dim(*key))}
    return TransferResult(B, F, G, hom_h)


# --- modules ----------------------------------------------------------------------------------------

STAR = "*"


@dataclass(eq=False)
class AInftyModule:
    """A left module as the extension of A by an object * with hom(*, X) = M(X)."""

    ext: AInftyStructure

    @property
    def objects(self):
        return tuple(o for o in self.ext.objects if o != STAR)

    def dims(self) -> dict:
        return {X: self.ext.hom.get((STAR, X), ()) for X in self.objects}

    def action(self, d: int) -> dict:
        """Structure maps m_M^d: paths starting at *, d = number of inputs from A plus one."""
        return {p: t for p, t in self.ext.m.items() if p[0] == STAR and len(p) == d + 1}


def make_module(A: AInftyStructure, M: dict, action: dict) -> AInftyModule:
    """``M[X]`` degrees of M(X); ``action[path]`` with path = (*, X0, ..., Xk) tensors as in AInftyStructure."""
    hom = dict(A.hom)
    for X, degs in M.items():
        hom[(STAR, X)] = tuple(degs)
    ext = AInftyStructure(A.objects + (STAR,), hom, {k: dict(v) for k, v in A.m.items()}, A.max_arity)
    for path, t in action.items():
        for idx, outs in t.items():
            ext.set(path, idx, outs)
    return AInftyModule(ext)


def check_module(M: AInftyModule, arity: int | None = None) -> RelationReport:
    return check_relations(M.ext, arity)


@dataclass(eq=False)
class ModuleTransferResult:
    N: AInftyModule
    t: AInftyFunctor
    s: AInftyFunctor
    B: AInftyStructure


def module_transfer(M: AInftyModule, T: TransferData, Tm: TransferData, arity: int | None = None) -> ModuleTransferResult:
    """Transfer A and M together; N lives over the transferred B."""
    data = TransferData({**T.small, **Tm.small}, {**T.P, **Tm.P}, {**T.I, **Tm.I}, {**T.H, **Tm.H})
    res = hpl_transfer(M.ext, data, arity, functor_arity=min(arity or M.ext.max_arity, 3))
    return ModuleTransferResult(AInftyModule(res.B), res.F, res.G, res.B)


def module_s_is_quasi_iso(M: AInftyModule, r: ModuleTransferResult) -> bool:
    """H(s^1): H(M(X)) -> H(N(X)) is an isomorphism for every object."""
    from .homalg import is_quasi_iso

    for X in M.objects:
        key = (STAR, X)
        cm = _graded_complex(M.ext, key)
        cn = _graded_complex(r.N.ext, key)
        if cm is None and cn is None:
            continue
        f = _graded_map(M.ext, r.N.ext, key, r.s, cm, cn)
        if not is_quasi_iso(f):
            return False
    return True


def _graded_complex(A: AInftyStructure, key):
    from .homalg import CochainComplex

    degs = A.hom.get(key, ())
    if not degs:
        return None
    lo, hi = min(degs), max(degs)
    by = {k: [j for j, d in enumerate(degs) if d == k] for k in range(lo, hi + 1)}
    m1 = m1_matrix(A, *key)
    diffs = []
    for k in range(lo, hi):
        # m1 = (-1)^|a| d, recover d
        diffs.append(Matrix.from_rows([[m1.data[i][j] * (-1) ** k for j in by[k]] for i in by[k + 1]], cols=len(by[k])))
    return CochainComplex(lo, [len(by[k]) for k in range(lo, hi + 1)], diffs)


def _graded_map(A, B, key, F: AInftyFunctor, ca, cb):
    from .homalg import ChainMap, CochainComplex

    ca = ca or CochainComplex.zero()
    cb = cb or CochainComplex.zero()
    da, db = A.hom.get(key, ()), B.hom.get(key, ())
    comps = {}
    for k in range(min(ca.lo, cb.lo), max(ca.hi, cb.hi) + 1):
        ja = [j for j, d in enumerate(da) if d == k]
        jb = [j for j, d in enumerate(db) if d == k]
        rows = []
        for i in jb:
            rows.append([F.apply(key, (j,)).get(i, Fraction(0)) for j in ja])
        comps[k] = Matrix.from_rows(rows, cols=len(ja)) if rows else Matrix.zeros(0, len(ja))
    return ChainMap(ca, cb, comps)


# --- cohomology-level checks ---------------------------------------------------------------------------

def cohomology_product(A: AInftyStructure, X, Y, Z, j1: int, j2: int) -> dict:
    """[a2].[a1] = (-1)^|a1| [m2(a2, a1)] on basis elements (valid when m1 = 0)."""
    s = (-1) ** A.deg(X, Y, j1)
    return {o: s * c for o, c in A.apply((X, Y, Z), (j1, j2)).items()}


def c_unital(A: AInftyStructure) -> bool:
    """Every endomorphism space of a minimal structure has a two-sided unit for the induced product."""
    from .homalg import solve

    for X in A.objects:
        n = A.dim(X, X)
        if not n:
            continue
        if any(A.m.get((X, X), {}).values()):
            raise ValueError("c-unitality check expects m1 = 0 on endomorphisms")
        zero = [j for j in range(n) if A.deg(X, X, j) == 0]
        # unknown e = sum x_z basis_z; for every a: e.a = a and a.e = a on every hom touching X
        rows, rhs = [], []
        for Y in A.objects:
            for key, left in (((X, Y), True), ((Y, X), False)):
                for a in range(A.dim(*key)):
                    target = {a: Fraction(1)}
                    acc = {}
                    for zi, z in enumerate(zero):
                        if left:
                            prod = cohomology_product(A, X, X, Y, z, a)
                        else:
                            prod = cohomology_product(A, Y, X, X, a, z)
                        for o, c in prod.items():
                            acc.setdefault(o, {})[zi] = c
                    for o in range(A.dim(*key)):
                        rows.append([acc.get(o, {}).get(zi, Fraction(0)) for zi in range(len(zero))])
                        rhs.append(target.get(o, Fraction(0)))
        if not zero:
            return False
        if solve(Matrix.from_rows(rows, cols=len(zero)), rhs) is None:
            return False
    return True


# --- simplicial cochain algebras --------------------------------------------------------------

def cochain_algebra(simplices, obj: str = "X", max_arity: int = 6) -> tuple[AInftyStructure, list]:
    """Cochains of a simplicial complex (vertex tuples, increasing) with the front/back cup.

    Returns the structure and the ordered simplex basis.  a2.a1 is the cup a2 u a1."""
    cells = sorted({tuple(s) for s in simplices}, key=lambda s: (len(s), s))
    index = {s: i for i, s in enumerate(cells)}
    degs = tuple(len(s) - 1 for s in cells)
    n = len(cells)
    ent = {}
    for t in cells:
        for pos in range(len(t)):
            f = t[:pos] + t[pos + 1:]
            if f in index:
                ent[(index[t], index[f])] = (-1) ** pos
    d = Matrix.from_dict(n, n, ent)
    table = {}
    for c in cells:
        for q in range(len(c)):
            front, back = c[:q + 1], c[q:]
            if front in index and back in index:
                table.setdefault((index[back], index[front]), {})[index[c]] = Fraction(1)
    A = from_dg([obj], {(obj, obj): degs}, {(obj, obj): d}, {(obj, obj, obj): table}, max_arity)
    return A, cells


def greedy_matching(m1: Matrix, rng, leave: int = 0) -> list:
    """A random sequence of cancellable pairs (a, b), an acyclic matching by construction.

    Each pair has nonzero coefficient in the differential left by the earlier
    cancellations.  The last ``leave`` pairs are dropped, so the small space keeps
    some differential; any prefix of a valid sequence is valid."""
    n = m1.rows
    alive = list(range(n))
    D = [list(r) for r in m1.data]
    pairs = []
    while True:
        cands = [(a, b) for a in alive for b in alive if D[a][b]]
        if not cands:
            break
        a, b = rng.choice(cands)
        c = D[a][b]
        for r in alive:
            if r != a and D[r][b]:
                f = D[r][b] / c
                for s in alive:
                    D[r][s] -= f * D[a][s]
        alive = [t for t in alive if t not in (a, b)]
        pairs.append((a, b))
    return pairs[:len(pairs) - leave] if leave else pairs


def random_complex(rng, max_cells: int = 12) -> list:
    """A random simplicial complex on at most ``max_cells`` simplices (closed under faces)."""
    while True:
        nv = rng.randint(2, 5)
        cand = [c for r in (2, 3) for c in itertools.combinations(range(nv), r)]
        rng.shuffle(cand)
        cells = {(v,) for v in range(nv)}
        for c in cand:
            faces = {f for r in range(1, len(c)) for f in itertools.combinations(c, r)}
            new = cells | faces | {c}
            if len(new) <= max_cells and rng.random() < 0.6:
                cells = new
        if len(cells) <= max_cells:
            return sorted(cells, key=lambda s: (len(s), s))
