"""Seeded random sheaf complexes built from shifted standard objects by cones."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .sheafcat.decompose import _standard_min
from .sheafcat.injective import InjComplex, cone, direct_sum, minimize, random_chain_map
from .stratspace import preset, standard_cover


@dataclass(eq=False)
class CorpusSheaf:
    name: str
    model: InjComplex

    @property
    def space(self):
        return self.model.space

    def sheaf(self):
        return self.model.to_sheaf()


def _standards(space):
    return [(U, _standard_min(space, U).small) for U in standard_cover(space)]


def random_sheaf(space, rng: random.Random, depth: int = 2) -> tuple[str, InjComplex]:
    """A cone of a random chain map between two random objects, recursively."""
    std = _standards(space)
    if depth == 0 or rng.random() < 0.3:
        U, E = rng.choice(std)
        n = rng.choice([0, 1, 1, 1, 2])
        return f"std({','.join(space.sort(U))})[{n}]", E.shift(n)
    na, A = random_sheaf(space, rng, depth - 1)
    nb, B = random_sheaf(space, rng, depth - 1)
    kind = rng.random()
    if kind < 0.15:
        return f"({na}+{nb})", minimize(direct_sum([A, B])).small
    A1 = A.shift(rng.choice([-1, 0, 0, 1]))
    f = random_chain_map(A1, B, rng)
    return f"cone({na}->{nb})", minimize(cone(f)).small


def corpus(n: int = 100, seed: int = 0, spaces=None) -> list:
    rng = random.Random(seed)
    names = list(spaces or ("p1", "c-origin", "p1", "c-origin", "s2"))
    out = []
    i = 0
    while len(out) < n:
        sp = preset(names[i % len(names)])
        i += 1
        depth = 1 if sp.name == "s2" else 2
        name, M = random_sheaf(sp, rng, depth)
        out.append(CorpusSheaf(f"{sp.name}:{name}", M))
    return out
