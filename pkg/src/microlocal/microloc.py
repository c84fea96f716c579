"""Local Morse groups, singular support, perversity tests and characteristic cycles."""
from __future__ import annotations

from dataclasses import dataclass, field

from .homalg import CochainComplex, cone, nonzero_dims, shift
from .sheafcat.core import SheafComplex, costalk, restriction, sections
from .sheafcat.injective import InjComplex
from .stratspace import StratifiedComplex, open_star


class InvalidDatum(ValueError):
    pass


class MissingCoverage(ValueError):
    pass


@dataclass(frozen=True)
class MorseDatum:
    stratum: str
    cell: str
    negative: frozenset = frozenset()
    shift: int = 0
    opposite: frozenset | None = None

    def validate(self, space: StratifiedComplex) -> None:
        space.check_cell(self.cell)
        if self.cell not in space.stratum(self.stratum).cells:
            raise InvalidDatum(f"{self.cell} is not in stratum {self.stratum}")
        star = open_star(space, self.cell)
        for part in (self.negative, self.opposite or frozenset()):
            if not part <= star - {self.cell}:
                raise InvalidDatum(f"negative part must lie in the punctured star of {self.cell}")
            if not space.is_open(part):
                raise InvalidDatum("negative part must be upward-closed")

    def flipped(self) -> "MorseDatum":
        if self.opposite is None:
            raise InvalidDatum("datum has no declared opposite")
        return MorseDatum(self.stratum, self.cell, self.opposite, self.shift, self.negative)

    def to_json(self) -> dict:
        out = {"stratum": self.stratum, "cell": self.cell, "negative_cells": sorted(self.negative), "shift": self.shift}
        if self.opposite is not None:
            out["opposite_cells"] = sorted(self.opposite)
        return out

    @staticmethod
    def from_json(obj: dict) -> "MorseDatum":
        opp = obj.get("opposite_cells")
        return MorseDatum(obj["stratum"], obj["cell"], frozenset(obj.get("negative_cells", [])),
                          int(obj.get("shift", 0)), None if opp is None else frozenset(opp))


@dataclass
class MorseGroupResult:
    datum: MorseDatum
    complex: CochainComplex
    dims: dict = field(default_factory=dict)
    euler: int = 0

    def concentrated_in_zero(self) -> bool:
        return all(k == 0 for k in self.dims)

    def to_json(self) -> dict:
        return {"datum": self.datum.to_json(), "dims": {str(k): v for k, v in self.dims.items()}, "euler": self.euler}


def _result(d: MorseDatum, c: CochainComplex) -> MorseGroupResult:
    dims = nonzero_dims(c)
    return MorseGroupResult(d, c, dims, sum((-1) ** k * v for k, v in dims.items()))


def local_morse_group(F, d: MorseDatum) -> MorseGroupResult:
    """cone(RG(star s, F) -> RG(negative, F))[-1], shifted by the datum's index shift."""
    if isinstance(F, InjComplex):
        return _morse_injective(F, d)
    d.validate(F.space)
    star = open_star(F.space, d.cell)
    if not d.negative:
        c = sections(F, star)
    else:
        c = shift(cone(restriction(F, star, d.negative)), -1)
    return _result(d, shift(c, d.shift))


def _morse_injective(M: InjComplex, d: MorseDatum) -> MorseGroupResult:
    """For a complex of down-set sheaves the fibre is the span of summands labelled in star - negative."""
    d.validate(M.space)
    keep = open_star(M.space, d.cell) - d.negative
    c = M.select(j for j, l in enumerate(M.labels) if l in keep)
    return _result(d, shift(c, d.shift))


# --- perversity ---------------------------------------------------------------------------

@dataclass
class Verdict:
    perverse: bool
    witnesses: list = field(default_factory=list)  # (stratum, cell, side, degree)

    def to_json(self) -> dict:
        return {"perverse": self.perverse, "witnesses": [
            {"stratum": s, "cell": c, "side": side, "degree": k} for s, c, side, k in self.witnesses]}


def _stratum_dim(space, st, p) -> int:
    if p is None:
        if not st.is_complex:
            raise ValueError(f"stratum {st.label} has no complex dimension")
        return int(st.cx_dim)
    return int(p(st))


def point_costalk(F, s: str) -> dict:
    """Costalk cohomology at a point of the cell: the cellular costalk raised by dim s."""
    sp = F.space
    if isinstance(F, InjComplex):
        raw = nonzero_dims(_injective_costalk(F, s))
    else:
        raw = nonzero_dims(costalk(F, s))
    return {k + sp.dim_of[s]: v for k, v in raw.items()}


def _injective_costalk(M: InjComplex, s: str) -> CochainComplex:
    # fibre of the projection onto summands in star - s is spanned by the summands labelled s
    return M.select(j for j, l in enumerate(M.labels) if l == s)


def _stalk(F, s):
    return F.stalk(s)


def perversity_by_stalks(F, p=None) -> Verdict:
    """Stalks vanish above -d and point costalks vanish below d on each stratum of complex dimension d."""
    sp = F.space
    wit = []
    for st in sp.strata:
        dd = _stratum_dim(sp, st, p)
        for s in sp.sort(st.cells):
            for k in nonzero_dims(_stalk(F, s)):
                if k > -dd:
                    wit.append((st.label, s, "stalk", k))
            for k in point_costalk(F, s):
                if k < dd:
                    wit.append((st.label, s, "costalk", k))
    return Verdict(not wit, wit)


def _check_coverage(space, data) -> None:
    have = {d.stratum for d in data}
    missing = [st.label for st in space.strata if st.label not in have]
    if missing:
        raise MissingCoverage(f"no Morse datum for strata {missing}")


def perversity_by_morse_groups(F, data) -> Verdict:
    _check_coverage(F.space, data)
    wit = []
    for d in data:
        r = local_morse_group(F, d)
        for k in r.dims:
            if k != 0:
                wit.append((d.stratum, d.cell, "morse", k))
    return Verdict(not wit, wit)


def singular_support(F, data) -> set:
    _check_coverage(F.space, data)
    return {d.stratum for d in data if local_morse_group(F, d).dims}


@dataclass
class CharacteristicCycle:
    multiplicities: dict
    orientation: str = "complex"
    consistent: bool = True

    def vector(self, order) -> tuple:
        return tuple(self.multiplicities.get(s, 0) for s in order)

    def to_json(self) -> dict:
        return {"multiplicities": self.multiplicities, "orientation": self.orientation, "consistent": self.consistent}


def characteristic_cycle(F, data) -> CharacteristicCycle:
    """Multiplicity of each conormal = Euler characteristic of its Morse group."""
    _check_coverage(F.space, data)
    mult, ok = {}, True
    for d in data:
        e = local_morse_group(F, d).euler
        if d.stratum in mult and mult[d.stratum] != e:
            ok = False
        mult.setdefault(d.stratum, e)
    return CharacteristicCycle({st.label: mult[st.label] for st in F.space.strata}, consistent=ok)


@dataclass
class DualityReport:
    ok: bool
    rows: list

    def to_json(self) -> dict:
        return {"ok": self.ok, "rows": self.rows}


def morse_duality_check(F: SheafComplex, data, dual: SheafComplex | None = None) -> DualityReport:
    """dim H^k M_d(DF) = dim H^{-k} M_{opposite d}(F) for each datum."""
    from .sheafcat.core import verdier_dual

    _check_coverage(F.space, data)
    DF = dual if dual is not None else verdier_dual(F)
    rows, ok = [], True
    for d in data:
        a = local_morse_group(DF, d).dims
        b = local_morse_group(F, d.flipped()).dims
        flipped = {-k: v for k, v in b.items()}
        good = a == flipped
        ok &= good
        rows.append({"datum": d.to_json(), "dual": {str(k): v for k, v in a.items()},
                     "opposite": {str(k): v for k, v in b.items()}, "ok": good})
    return DualityReport(ok, rows)


# --- curated data ------------------------------------------------------------------------------

def _pair(stratum, cell, a, b):
    return [MorseDatum(stratum, cell, frozenset(a), 0, frozenset(b)), MorseDatum(stratum, cell, frozenset(b), 0, frozenset(a))]


def _quadratic(stratum, cell, sectors):
    s = frozenset(sectors)
    return [MorseDatum(stratum, cell, s, 0, s)]


def curated_data(space: StratifiedComplex) -> list:
    """One or two test data per stratum for the shipped presets."""
    name = space.name
    if name == "p1":
        return _pair("0", "p0", ["f1"], ["f2"]) + _pair("inf", "pinf", ["f1"], ["f2"]) + _quadratic("U", "e1", ["f1", "f2"])
    if name == "c-origin":
        return _pair("0", "o", ["h1"], ["h2"]) + _quadratic("C*", "r1", ["h1", "h2"])
    if name == "s2":
        return _quadratic("S2", "e01", ["t012", "t013"])
    if name == "interval":
        return [MorseDatum("b", "b", frozenset(), 0, frozenset({"e"})), MorseDatum("b", "b", frozenset({"e"}), 0, frozenset()),
                MorseDatum("a", "a", frozenset(), 0, frozenset({"e"})), MorseDatum("e", "e", frozenset(), 0, frozenset())]
    raise MissingCoverage(f"no curated Morse data for {name}")
