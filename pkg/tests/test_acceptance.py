"""Acceptance checks, one per criterion.  Each prints a PASS/FAIL line with its timing
and, on failure, a CLI invocation that reproduces the failing case."""
import json
import random
import tempfile
import time
from pathlib import Path

import pytest

from microlocal import ainfty as ai
from microlocal import laggr as lg
from microlocal import morse as mo
from microlocal.corpus import corpus
from microlocal.homalg import nonzero_dims
from microlocal.microloc import (characteristic_cycle, curated_data, morse_duality_check,
                                 perversity_by_morse_groups, perversity_by_stalks, singular_support)
from microlocal.sheafcat import NotGenerated, decompose_into_standards, shift_sheaf, standard_object
from microlocal.sheafcat.core import sections
from microlocal.sheafcat.core import test_opens as probe_opens
from microlocal.stratspace import preset

DUMP = Path(tempfile.gettempdir()) / "microlocal-acceptance"


@pytest.fixture(scope="module")
def sheaves():
    return [(c.name, c.space, c.sheaf()) for c in corpus(100, seed=0)]


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, seconds, limit=None, repro=None, detail=""):
        over = limit is not None and seconds >= limit
        status = "PASS" if ok and not over else "FAIL"
        line = f"criterion {n:>2} {status}  {title}  ({seconds:.2f}s" + (f" / limit {limit:g}s)" if limit else ")")
        if detail:
            line += f"  {detail}"
        with capsys.disabled():
            print("\n" + line)
            if status == "FAIL" and repro:
                print(f"  reproduce: {repro}")
        assert ok, detail or title
        assert not over, f"took {seconds:.2f}s, limit {limit}s"
    return emit


def dump_sheaf(name, F):
    DUMP.mkdir(exist_ok=True)
    p = DUMP / (name.replace(":", "_").replace("/", "_")[:80] + ".json")
    p.write_text(json.dumps(F.to_json()))
    return p


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def test_c01_endpoint_pair(report):
    r, dt = timed(mo.endpoint_pair)
    ok = r.sheaf_side == {"b|-": {0: 1}, "b|e": {}} and r.ok
    report(1, "endpoint pair fixed point", ok, dt, 1.0, "microlocal morse interval --endpoint-pair",
           f"sheaf {r.sheaf_side} morse {r.morse_side}")


def test_c02_p1(report):
    def run():
        sp = preset("p1")
        F = shift_sheaf(standard_object(sp, sp.stratum("U").cells), 1)
        data = curated_data(sp)
        return (perversity_by_stalks(F).perverse, perversity_by_morse_groups(F, data).perverse,
                characteristic_cycle(F, data).multiplicities)
    (a, b, cc), dt = timed(run)
    ok = a and b and cc == {"U": 1, "0": 1, "inf": 1}
    report(2, "P1 fixed point", ok, dt, 1.0, "microlocal sheaf-report p1 'std:U[1]' --perversity --cc",
           f"stalks={a} morse={b} CC={cc}")


def test_c03_perversity_agreement(report, sheaves):
    def run():
        bad = []
        for name, sp, F in sheaves:
            assert len(sp.ids) <= 40
            if perversity_by_stalks(F).perverse != perversity_by_morse_groups(F, curated_data(sp)).perverse:
                bad.append((name, sp, F))
        return bad
    bad, dt = timed(run)
    repro = None
    if bad:
        name, sp, F = bad[0]
        repro = f"microlocal sheaf-report {sp.name} {dump_sheaf(name, F)} --perversity"
    report(3, f"perversity tests agree on {len(sheaves)} sheaves", not bad, dt, 60.0, repro,
           f"{len(bad)} disagreements")


def test_c04_vanishing(report, sheaves):
    def run():
        bad = []
        for name, sp, F in sheaves:
            if not singular_support(F, curated_data(sp)) and not F.is_zero():
                bad.append((name, sp, F))
        return bad
    bad, dt = timed(run)
    repro = None
    if bad:
        name, sp, F = bad[0]
        repro = f"microlocal sheaf-report {sp.name} {dump_sheaf(name, F)} --morse-groups"
    nz = sum(1 for _, _, F in sheaves if F.is_zero())
    report(4, "vanishing Morse groups force zero stalks", not bad, dt, None, repro,
           f"{len(bad)} counterexamples, {nz} zero sheaves")


def test_c05_duality(report, sheaves):
    def run():
        return [(n, sp, F) for n, sp, F in sheaves if not morse_duality_check(F, curated_data(sp)).ok]
    bad, dt = timed(run)
    repro = None
    if bad:
        name, sp, F = bad[0]
        repro = f"microlocal sheaf-report {sp.name} {dump_sheaf(name, F)} --dual-check"
    report(5, "Morse groups commute with duality", not bad, dt, None, repro, f"{len(bad)} failures")


def test_c06_generation(report, sheaves):
    def run():
        bad = []
        for name, sp, F in sheaves:
            try:
                tree = decompose_into_standards(F, verify=False)
            except NotGenerated:
                bad.append((name, sp, F))
                continue
            E = tree.evaluate(sp)
            for U in probe_opens(sp):
                if nonzero_dims(sections(F, U)) != nonzero_dims(E.sections(U)):
                    bad.append((name, sp, F))
                    break
        return bad
    bad, dt = timed(run)
    repro = None
    if bad:
        name, sp, F = bad[0]
        repro = f"microlocal decompose {sp.name} {dump_sheaf(name, F)}"
    report(6, "decomposition trees reproduce sections", not bad, dt, None, repro, f"{len(bad)} failures")


def _transfer(cells, seed, leave):
    A, _ = ai.cochain_algebra(cells, max_arity=6)
    K = ("X", "X")
    m1 = ai.m1_matrix(A, *K)
    pairs = ai.greedy_matching(m1, random.Random(seed), leave)
    small, P, I, H = ai.matching_transfer(m1, A.hom[K], pairs)
    return ai.hpl_transfer(A, ai.TransferData({K: small}, {K: P}, {K: I}, {K: H}), 6, functor_arity=1).B


def test_c07_ainfty(report):
    def run():
        cases = [("interval", [(0,), (1,), (0, 1)], 0, 0),
                 ("circle", [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)], 0, 0)]
        rng = random.Random(3)
        for t in range(10):
            cases.append((f"random {t}", ai.random_complex(rng), t, t % 3))
        bad = []
        for name, cells, seed, leave in cases:
            assert len(cells) <= 12
            if not ai.check_relations(_transfer(cells, seed, leave), 6).ok:
                bad.append(name)
        return bad
    bad, dt = timed(run)
    report(7, "transferred structures satisfy the relations through arity 6", not bad, dt, 30.0,
           "microlocal ainfty --preset random --seed 3 --max-arity 6", f"failures: {bad}")


def test_c08_open_mor(report):
    def run():
        out = {}
        for name in ("interval", "circle"):
            sub, objs = mo.preset_objects(preset(name), 8)
            out[name] = mo.open_vs_mor(sub.fine, objs)
        return out
    reps, dt = timed(run)
    ok = all(r.ok for r in reps.values())
    bad = [n for n, r in reps.items() if not r.ok]
    report(8, "transfer along the flow equals Morse tree counts", ok, dt, None,
           f"microlocal morse {bad[0] if bad else 'interval'} --trees",
           ", ".join(f"{n}: {len(r.rows)} pairs, {len(r.mismatches)} mismatches" for n, r in reps.items()))


def test_c09_module(report):
    def run():
        sub, objs, star = mo.endpoint_pair_objects()
        return mo.module_vs_mor(sub.fine, objs, star)
    r, dt = timed(run)
    report(9, "module pairing equals the Morse pairing", r.ok and r.dims == r.morse_dims, dt, None,
           "microlocal morse interval --endpoint-pair", f"dims {r.dims}")


def test_c10_degree_law(report):
    recs, dt = timed(lambda: lg.degree_law_run(1000, seed=0, ns=(1, 2, 3, 4)))
    worst_im = max(max(abs(r.phase0.imag) / abs(r.phase0), abs(r.phase1.imag) / abs(r.phase1)) for r in recs)
    pos = all(r.phase0.real > 0 and r.phase1.real > 0 for r in recs)
    worst_sum = max(abs(r.angle_sum + r.n / 2) for r in recs)
    worst_pair = max(r.pairing for r in recs)
    worst_deg = max(abs(r.degree - r.n) for r in recs)
    ok = (len(recs) == 1000 and {r.n for r in recs} == {1, 2, 3, 4} and pos and worst_im < 1e-9
          and worst_sum < 1e-8 and worst_pair < 1e-8 and worst_deg < 1e-6)
    report(10, "holomorphic degree law on 1000 pairs", ok, dt, 10.0, "microlocal degree --random 1000 --seed 0",
           f"max |Im|={worst_im:.1e} sum={worst_sum:.1e} pairing={worst_pair:.1e} degree={worst_deg:.1e}")
