"""Hom complexes between standard objects and their cup-product composition.

Hom(i_*Q_{U0}, i_*Q_{U1}) is modelled by cochains on chains of U1 whose top
element lies in U0, i.e. relative cochains of the pair (nerve U1, nerve U1 - U0).
By excision this is the relative cohomology of (closure U0 meet U1, frontier U0 meet U1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..homalg import CochainComplex, Matrix
from ..stratspace import StratifiedComplex, closure
from .core import _require_open, chains


@dataclass(eq=False)
class HomComplex:
    space: StratifiedComplex
    source: frozenset
    target: frozenset
    basis: dict  # degree -> list of chains
    complex: CochainComplex

    def index(self, k: int) -> dict:
        return {c: i for i, c in enumerate(self.basis.get(k, []))}


def _relative_complex(ch) -> tuple[dict, CochainComplex]:
    basis: dict = {}
    for c in ch:
        basis.setdefault(len(c) - 1, []).append(c)
    if not basis:
        return {}, CochainComplex.zero()
    top = max(basis)
    for k in range(top + 1):
        basis.setdefault(k, [])
    idx = {k: {c: i for i, c in enumerate(v)} for k, v in basis.items()}
    diffs = []
    for k in range(top):
        ent = {}
        for c, i in idx[k + 1].items():
            for pos in range(len(c)):
                j = idx[k].get(c[:pos] + c[pos + 1:])
                if j is not None:
                    ent[(i, j)] = ent.get((i, j), 0) + (-1) ** pos
        diffs.append(Matrix.from_dict(len(basis[k + 1]), len(basis[k]), ent))
    return basis, CochainComplex(0, [len(basis[k]) for k in range(top + 1)], diffs)


def hom_standard(space: StratifiedComplex, U0, U1) -> HomComplex:
    U0 = _require_open(space, U0)
    U1 = _require_open(space, U1)
    ch = [c for c in chains(space, U1) if c[-1] in U0]
    basis, cx = _relative_complex(ch)
    return HomComplex(space, U0, U1, basis, cx)


def pair_cochains(space: StratifiedComplex, A: frozenset, B: frozenset) -> CochainComplex:
    """Relative order-complex cochains of (A, B) for B inside A, any subsets of cells."""
    ch = [c for c in chains(space, frozenset(A)) if not set(c) <= B]
    return _relative_complex(ch)[1]


def hom_pair_oracle(space: StratifiedComplex, U0, U1) -> CochainComplex:
    """The excised pair (closure U0 meet U1, (closure U0 - U0) meet U1)."""
    U0, U1 = frozenset(U0), frozenset(U1)
    cl = closure(space, U0)
    return pair_cochains(space, cl & U1, (cl - U0) & U1)


def unit(h: HomComplex) -> list:
    """The identity: the constant 1 on vertices."""
    if h.source != h.target:
        raise ValueError("unit only for endomorphisms")
    return [Fraction(1)] * len(h.basis.get(0, []))


def cup(space: StratifiedComplex, left: dict, right: dict, target_chains) -> dict:
    """Front/back cup: (a u b)(s0..sn) = sum over splits a(s0..sq) b(sq..sn).

    ``left`` and ``right`` map chains to coefficients (homogeneous or not)."""
    out = {}
    for c in target_chains:
        v = 0
        for q in range(len(c)):
            a = left.get(c[:q + 1])
            if a:
                b = right.get(c[q:])
                if b:
                    v += a * b
        if v:
            out[c] = v
    return out


def compose(g_hom: HomComplex, f_hom: HomComplex, g: dict, f: dict) -> dict:
    """g o f for f in Hom(U0, U1) and g in Hom(U1, U2), cochains given as {chain: value}."""
    if f_hom.target != g_hom.source:
        raise ValueError("homs are not composable")
    out = hom_standard(f_hom.space, f_hom.source, g_hom.target)
    allc = [c for b in out.basis.values() for c in b]
    return cup(f_hom.space, g, f, allc)


def as_cochain(h: HomComplex, k: int, vec) -> dict:
    return {c: Fraction(v) for c, v in zip(h.basis.get(k, []), vec) if v}


def as_vector(h: HomComplex, k: int, cochain: dict) -> list:
    return [cochain.get(c, Fraction(0)) for c in h.basis.get(k, [])]


def unit_cochain(h: HomComplex) -> dict:
    return as_cochain(h, 0, unit(h))
