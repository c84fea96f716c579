"""Exact rational linear algebra and bounded cochain complexes.

Matrices are dense tuples of :class:`fractions.Fraction`.  A complex stores
the dimension of each degree in ``[lo, hi]`` and the differentials
``d^k : C^k -> C^{k+1}`` as ``dims[k+1] x dims[k]`` matrices.

>>> c = CochainComplex(0, [1, 1], [Matrix.from_rows([[1]])])
>>> cohomology_dims(c)
{0: 0, 1: 0}
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


class StructuralError(ValueError):
    pass


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    data: tuple = field(repr=False)

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise StructuralError("entry count does not match dimensions")

    @staticmethod
    def from_rows(rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        data = tuple(tuple(_q(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return Matrix(len(data), cols, data)

    @staticmethod
    def zeros(rows: int, cols: int) -> "Matrix":
        z = Fraction(0)
        return Matrix(rows, cols, tuple((z,) * cols for _ in range(rows)))

    @staticmethod
    def identity(n: int) -> "Matrix":
        one, z = Fraction(1), Fraction(0)
        return Matrix(n, n, tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)))

    @staticmethod
    def from_columns(cols: Sequence[Sequence], rows: int) -> "Matrix":
        return Matrix.from_rows([[c[i] for c in cols] for i in range(rows)], cols=len(cols))

    @staticmethod
    def from_dict(rows: int, cols: int, entries: dict) -> "Matrix":
        m = [[Fraction(0)] * cols for _ in range(rows)]
        for (i, j), v in entries.items():
            m[i][j] += v
        return Matrix(rows, cols, tuple(tuple(r) for r in m))

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def column(self, j: int) -> list:
        return [r[j] for r in self.data]

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise StructuralError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ocols = other.T.data
        out = []
        for r in self.data:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append(tuple(sum((a * oc[k] for k, a in nz), Fraction(0)) for oc in ocols))
        return Matrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence) -> list:
        return [sum((a * x for a, x in zip(r, v) if a and x), Fraction(0)) for r in self.data]

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols, tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c) -> "Matrix":
        c = _q(c)
        return Matrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.data))

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise StructuralError("shape mismatch")

    def is_zero(self) -> bool:
        return all(not a for r in self.data for a in r)

    def rank(self) -> int:
        return len(rref(self)[1])

    def to_strings(self) -> list:
        return [str(a) for r in self.data for a in r]


def block(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix; every block in a row shares its row count."""
    rows = []
    for brow in blocks:
        h = brow[0].rows
        for i in range(h):
            rows.append(tuple(x for b in brow for x in b.data[i]))
    cols = sum(b.cols for b in blocks[0]) if blocks else 0
    return Matrix(len(rows), cols, tuple(rows))


def rref(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    a = [list(r) for r in m.data]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        p = next((i for i in range(r, m.rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    return a[:r], pivots


def kernel_basis(m: Matrix) -> list[list[Fraction]]:
    red, piv = rref(m)
    free = [j for j in range(m.cols) if j not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(m: Matrix, b: Sequence) -> list | None:
    """A particular solution of ``m x = b`` or None."""
    aug = Matrix.from_rows([list(r) + [bi] for r, bi in zip(m.data, b)], cols=m.cols + 1) if m.rows else None
    if aug is None:
        return [Fraction(0)] * m.cols
    red, piv = rref(aug)
    if m.cols in piv:
        return None
    x = [Fraction(0)] * m.cols
    for row, p in zip(red, piv):
        x[p] = row[-1]
    return x


def complement_in(span: list[list[Fraction]], candidates: list[list[Fraction]], n: int) -> list[list[Fraction]]:
    """Greedy choice (in order) of candidates independent modulo ``span``."""
    chosen: list[list[Fraction]] = []
    basis_rows: list[list[Fraction]] = []
    piv_of: list[int] = []

    def reduce(v):
        v = list(v)
        for row, p in zip(basis_rows, piv_of):
            if v[p]:
                f = v[p]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def insert(v):
        p = next(i for i, x in enumerate(v) if x)
        inv = 1 / v[p]
        v = [x * inv for x in v]
        for k, row in enumerate(basis_rows):
            if row[p]:
                f = row[p]
                basis_rows[k] = [x - f * y for x, y in zip(row, v)]
        basis_rows.append(v)
        piv_of.append(p)

    for s in span:
        v = reduce(s)
        if any(v):
            insert(v)
    for c in candidates:
        v = reduce(c)
        if any(v):
            insert(v)
            chosen.append(list(c))
    return chosen


@dataclass(frozen=True)
class CochainComplex:
    lo: int
    dims: tuple
    diffs: tuple

    def __init__(self, lo: int, dims: Iterable[int], diffs: Iterable[Matrix] | None = None, check: bool = True):
        dims = tuple(int(d) for d in dims)
        if diffs is None:
            diffs = [Matrix.zeros(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]
        diffs = tuple(diffs)
        object.__setattr__(self, "lo", int(lo))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "diffs", diffs)
        if len(diffs) != max(len(dims) - 1, 0):
            raise StructuralError("need one differential between consecutive degrees")
        for i, d in enumerate(diffs):
            if (d.rows, d.cols) != (dims[i + 1], dims[i]):
                raise StructuralError(f"differential d^{lo + i} has wrong shape")
        if check:
            for i in range(len(diffs) - 1):
                if not (diffs[i + 1] @ diffs[i]).is_zero():
                    raise StructuralError(f"d^{lo + i + 1} d^{lo + i} != 0")

    @staticmethod
    def zero() -> "CochainComplex":
        return CochainComplex(0, [0], [])

    @staticmethod
    def point(degree: int = 0, dim: int = 1) -> "CochainComplex":
        return CochainComplex(degree, [dim], [])

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    def dim(self, k: int) -> int:
        i = k - self.lo
        return self.dims[i] if 0 <= i < len(self.dims) else 0

    def d(self, k: int) -> Matrix:
        i = k - self.lo
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return Matrix.zeros(self.dim(k + 1), self.dim(k))

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def total_dim(self) -> int:
        return sum(self.dims)

    def euler(self) -> int:
        return sum((-1) ** k * self.dim(k) for k in self.degrees())

    def is_zero(self) -> bool:
        return self.total_dim() == 0

    def reindexed(self, lo: int, hi: int) -> "CochainComplex":
        """Same complex stored over a wider (or narrower, if zero there) range."""
        dims = [self.dim(k) for k in range(lo, hi + 1)]
        diffs = [self.d(k) for k in range(lo, hi)]
        return CochainComplex(lo, dims, diffs, check=False)

    def trimmed(self) -> "CochainComplex":
        nz = [k for k in self.degrees() if self.dim(k)]
        if not nz:
            return CochainComplex.zero()
        return self.reindexed(nz[0], nz[-1])

    def to_json(self) -> dict:
        return {
            "degrees": [self.lo, self.hi],
            "dims": list(self.dims),
            "diffs": [d.to_strings() for d in self.diffs],
        }

    @staticmethod
    def from_json(obj: dict) -> "CochainComplex":
        lo, hi = obj["degrees"]
        dims = obj["dims"]
        if len(dims) != hi - lo + 1:
            raise StructuralError("dims length does not match degrees")
        diffs = []
        for i, flat in enumerate(obj.get("diffs", [])):
            r, c = dims[i + 1], dims[i]
            if len(flat) != r * c:
                raise StructuralError(f"diff {i} has {len(flat)} entries, expected {r * c}")
            diffs.append(Matrix.from_rows([flat[j * c:(j + 1) * c] for j in range(r)], cols=c))
        if not obj.get("diffs"):
            diffs = None
        return CochainComplex(lo, dims, diffs)


@dataclass(frozen=True)
class Cohomology:
    dims: dict
    representatives: dict

    def nonzero(self) -> dict:
        return {k: v for k, v in self.dims.items() if v}


def cohomology(c: CochainComplex) -> Cohomology:
    dims, reps = {}, {}
    for k in c.degrees():
        ker = kernel_basis(c.d(k))
        im = c.d(k - 1).columns()
        chosen = complement_in(im, ker, c.dim(k))
        dims[k] = len(chosen)
        reps[k] = chosen
    return Cohomology(dims, reps)


def cohomology_dims(c: CochainComplex) -> dict:
    out = {}
    for k in c.degrees():
        out[k] = c.dim(k) - c.d(k).rank() - c.d(k - 1).rank()
    return out


def nonzero_dims(c: CochainComplex) -> dict:
    return {k: v for k, v in cohomology_dims(c).items() if v}


def is_acyclic(c: CochainComplex) -> bool:
    return not nonzero_dims(c)


@dataclass(frozen=True)
class ChainMap:
    source: CochainComplex
    target: CochainComplex
    comps: dict

    def __init__(self, source, target, comps: dict | None = None, check: bool = True):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        full = {}
        comps = comps or {}
        for k in range(min(source.lo, target.lo), max(source.hi, target.hi) + 1):
            m = comps.get(k)
            if m is None:
                m = Matrix.zeros(target.dim(k), source.dim(k))
            elif (m.rows, m.cols) != (target.dim(k), source.dim(k)):
                raise StructuralError(f"component {k} has wrong shape")
            full[k] = m
        object.__setattr__(self, "comps", full)
        if check:
            for k in full:
                lhs = target.d(k) @ self[k]
                rhs = self[k + 1] @ source.d(k)
                if lhs != rhs:
                    raise StructuralError(f"chain map fails to commute in degree {k}")

    def __getitem__(self, k: int) -> Matrix:
        m = self.comps.get(k)
        return m if m is not None else Matrix.zeros(self.target.dim(k), self.source.dim(k))

    @staticmethod
    def identity(c: CochainComplex) -> "ChainMap":
        return ChainMap(c, c, {k: Matrix.identity(c.dim(k)) for k in c.degrees()}, check=False)

    @staticmethod
    def zero(a: CochainComplex, b: CochainComplex) -> "ChainMap":
        return ChainMap(a, b, {}, check=False)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        ks = set(self.comps) | set(other.comps)
        return ChainMap(other.source, self.target, {k: self[k] @ other[k] for k in ks}, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        ks = set(self.comps) | set(other.comps)
        return ChainMap(self.source, self.target, {k: self[k] + other[k] for k in ks}, check=False)

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target, {k: m.scale(c) for k, m in self.comps.items()}, check=False)

    def to_json(self) -> dict:
        return {str(k): m.to_strings() for k, m in sorted(self.comps.items()) if m.rows and m.cols}

    @staticmethod
    def from_json(source, target, obj: dict) -> "ChainMap":
        comps = {}
        for k, flat in obj.items():
            k = int(k)
            r, c = target.dim(k), source.dim(k)
            comps[k] = Matrix.from_rows([flat[j * c:(j + 1) * c] for j in range(r)], cols=c)
        return ChainMap(source, target, comps)


def induced_rank(f: ChainMap, k: int) -> int:
    """Rank of H^k(f)."""
    reps = cohomology(f.source).representatives.get(k, [])
    if not reps:
        return 0
    imgs = [f[k].apply(v) for v in reps]
    bnd = f.target.d(k - 1).columns()
    return len(complement_in(bnd, imgs, f.target.dim(k)))


def cone(f: ChainMap) -> CochainComplex:
    """C(f)^k = src^{k+1} + tgt^k with d = [[-d_src, 0], [f, d_tgt]]."""
    s, t = f.source, f.target
    lo, hi = min(s.lo - 1, t.lo), max(s.hi - 1, t.hi)
    dims, diffs = [], []
    for k in range(lo, hi + 1):
        dims.append(s.dim(k + 1) + t.dim(k))
    for k in range(lo, hi):
        diffs.append(block([
            [-s.d(k + 1), Matrix.zeros(s.dim(k + 2), t.dim(k))],
            [f[k + 1], t.d(k)],
        ]))
    return CochainComplex(lo, dims, diffs, check=False)


def cone_maps(f: ChainMap) -> tuple[ChainMap, ChainMap]:
    """Canonical maps target -> cone(f) -> source[1]."""
    s, t = f.source, f.target
    c = cone(f)
    inc, proj = {}, {}
    for k in c.degrees():
        inc[k] = block_diag([Matrix.zeros(s.dim(k + 1), 0), Matrix.identity(t.dim(k))])
        proj[k] = block_diag([Matrix.identity(s.dim(k + 1)), Matrix.zeros(0, t.dim(k))])
    return ChainMap(t, c, inc), ChainMap(c, shift(s, 1), proj)


def _shift_sign(n: int) -> int:
    return -1 if n % 2 else 1


def shift(c: CochainComplex, n: int) -> CochainComplex:
    """c[n]: degree k of the result is degree k+n of c; d picks up (-1)^n."""
    sg = _shift_sign(n)
    return CochainComplex(c.lo - n, c.dims, [d.scale(sg) for d in c.diffs], check=False)


def shift_map(f: ChainMap, n: int) -> ChainMap:
    return ChainMap(shift(f.source, n), shift(f.target, n), {k - n: m for k, m in f.comps.items()}, check=False)


def dual(c: CochainComplex) -> CochainComplex:
    """Degree k of the dual is the dual of degree -k; differentials transpose."""
    n = len(c.dims)
    dims = list(reversed(c.dims))
    diffs = [c.diffs[n - 2 - i].T for i in range(n - 1)]
    return CochainComplex(-c.hi, dims, diffs, check=False)


def dual_map(f: ChainMap) -> ChainMap:
    """f: A -> B gives f^*: B^* -> A^*."""
    return ChainMap(dual(f.target), dual(f.source), {-k: m.T for k, m in f.comps.items()}, check=False)


def direct_sum(cs: Sequence[CochainComplex]) -> CochainComplex:
    cs = [c for c in cs]
    if not cs:
        return CochainComplex.zero()
    lo, hi = min(c.lo for c in cs), max(c.hi for c in cs)
    dims = [sum(c.dim(k) for c in cs) for k in range(lo, hi + 1)]
    diffs = [block_diag([c.d(k) for c in cs]) for k in range(lo, hi)]
    return CochainComplex(lo, dims, diffs, check=False)


def block_diag(ms: Sequence[Matrix]) -> Matrix:
    rows = sum(m.rows for m in ms)
    cols = sum(m.cols for m in ms)
    out = [[Fraction(0)] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in ms:
        for i in range(m.rows):
            for j in range(m.cols):
                out[r0 + i][c0 + j] = m.data[i][j]
        r0 += m.rows
        c0 += m.cols
    return Matrix(rows, cols, tuple(tuple(r) for r in out))


def truncate_leq(c: CochainComplex, k: int) -> CochainComplex:
    """... -> C^{k-1} -> ker d^k -> 0."""
    if k < c.lo:
        return CochainComplex.zero()
    if k >= c.hi:
        return c
    ker = kernel_basis(c.d(k))
    kmat = Matrix.from_columns(ker, c.dim(k)) if ker else Matrix.zeros(c.dim(k), 0)
    dims = [c.dim(j) for j in range(c.lo, k)] + [len(ker)]
    diffs = [c.d(j) for j in range(c.lo, k - 1)]
    if k > c.lo:
        last = c.d(k - 1)
        coords = [solve(kmat, col) for col in last.columns()]
        diffs.append(Matrix.from_columns(coords, len(ker)) if coords else Matrix.zeros(len(ker), 0))
    return CochainComplex(c.lo, dims, diffs)


def truncate_geq(c: CochainComplex, k: int) -> CochainComplex:
    """0 -> C^k / im d^{k-1} -> C^{k+1} -> ..."""
    if k > c.hi:
        return CochainComplex.zero()
    if k <= c.lo:
        return c
    im = c.d(k - 1)
    ann = kernel_basis(im.T)  # rows of Q: ker Q = im d^{k-1}
    q, piv = rref(Matrix.from_rows(ann, cols=c.dim(k))) if ann else ([], [])
    nq = len(q)
    sect = Matrix.from_columns([[Fraction(1) if i == p else Fraction(0) for i in range(c.dim(k))] for p in piv], c.dim(k)) if nq else Matrix.zeros(c.dim(k), 0)
    dims = [nq] + [c.dim(j) for j in range(k + 1, c.hi + 1)]
    diffs = ([c.d(k) @ sect] if k < c.hi else []) + [c.d(j) for j in range(k + 1, c.hi)]
    return CochainComplex(k, dims, diffs)


def is_quasi_iso(f: ChainMap) -> bool:
    return is_acyclic(cone(f))
