"""Command-line front end.  Exit codes: 0 pass, 1 check failure, 2 input error."""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

SCHEMA = "microlocal.report/1"


class InputError(Exception):
    pass


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _emit(args, command: str, ok: bool, body: dict, human: list) -> int:
    if args.json:
        out = {"schema": SCHEMA, "command": command, "ok": ok, **body}
        print(json.dumps(out, sort_keys=True, default=_default, indent=2))
    else:
        for line in human:
            print(line)
        print("result: " + ("pass" if ok else "FAIL"))
    return 0 if ok else 1


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _space(spec: str):
    from .stratspace import PRESETS, load_space

    if spec not in PRESETS and not spec.endswith(".json"):
        raise InputError(f"unknown preset {spec!r}; choose from {sorted(PRESETS)} or give a .json file")
    obj = spec if spec in PRESETS else _load_json(spec)
    try:
        sp = load_space(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{spec}: bad field {exc}") from None
    return sp if spec in PRESETS else type(sp)(spec, sp.cells, sp.incidences, sp.strata)


_SHEAF = re.compile(r"^(std|costd|const|sky)(?::([^\[\]]+))?(?:\[(-?\d+)\])?$")


def parse_sheaf(space, spec: str):
    """``std:CELLS[n]``, ``costd:CELLS[n]``, ``const[n]``, ``sky:CELL[n]`` or a JSON file.

    CELLS is a comma list of cells or stratum labels, or X for every cell; [n] shifts by n."""
    from .sheafcat.core import (SheafComplex, constant_sheaf, costandard_object, shift_sheaf, skyscraper,
                                standard_object)

    if spec.endswith(".json"):
        try:
            return SheafComplex.from_json(space, _load_json(spec))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{spec}: bad sheaf data: {exc}") from None
    m = _SHEAF.match(spec)
    if not m:
        raise InputError(f"cannot parse sheaf {spec!r}")
    kind, cells, n = m.group(1), m.group(2), int(m.group(3) or 0)
    if cells in (None, "X"):
        U = space.all_cells
    else:
        labels = {st.label: st.cells for st in space.strata}
        U = frozenset()
        for c in (c.strip() for c in cells.split(",")):
            # a stratum label stands for its cells
            U |= labels[c] if c in labels and c not in space.all_cells else {c}
        bad = sorted(U - space.all_cells)
        if bad:
            raise InputError(f"unknown cells {bad}")
    try:
        if kind == "std":
            F = standard_object(space, U)
        elif kind == "costd":
            F = costandard_object(space, U)
        elif kind == "const":
            F = constant_sheaf(space)
        else:
            if len(U) != 1:
                raise InputError("a skyscraper needs one cell")
            F = skyscraper(space, next(iter(U)))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return shift_sheaf(F, n) if n else F


# --- commands --------------------------------------------------------------------------------------

def cmd_validate(args) -> int:
    from .stratspace import validate

    sp = _space(args.space)
    diags = validate(sp)
    ok = not any(d.severity == "error" for d in diags)
    human = [f"space {sp.name}: {len(sp.ids)} cells, {len(sp.strata)} strata"]
    human += [f"{d.severity}: {d.kind} {list(d.cells)}: {d.message}" for d in diags]
    return _emit(args, "validate", ok, {"space": sp.name, "diagnostics": [d.to_json() for d in diags]}, human)


def cmd_sheaf_report(args) -> int:
    from . import microloc as ml
    from .homalg import nonzero_dims

    sp = _space(args.space)
    F = parse_sheaf(sp, args.sheaf)
    body, human, ok = {"space": sp.name, "sheaf": args.sheaf}, [], True
    everything = not (args.perversity or args.cc or args.morse_groups or args.ss or args.dual_check)
    need_data = everything or args.perversity or args.cc or args.morse_groups or args.ss or args.dual_check
    data = None
    if need_data:
        try:
            data = ml.curated_data(sp)
        except ml.MissingCoverage as exc:
            raise InputError(str(exc)) from None
    body["stalks"] = {c: {str(k): v for k, v in nonzero_dims(F.stalk(c)).items()} for c in sp.ids}
    if everything or args.perversity:
        a = ml.perversity_by_stalks(F)
        b = ml.perversity_by_morse_groups(F, data)
        body["perversity"] = {"stalks": a.to_json(), "morse": b.to_json(), "agree": a.perverse == b.perverse}
        ok &= a.perverse and b.perverse
        human.append(f"perverse: {'yes' if a.perverse and b.perverse else 'no'}"
                     + ("" if a.perverse == b.perverse else " (tests disagree)"))
        for s, c, side, k in a.witnesses + b.witnesses:
            human.append(f"  witness: stratum {s} cell {c} {side} degree {k}")
    if everything or args.cc:
        cc = ml.characteristic_cycle(F, data)
        body["cc"] = cc.to_json()
        ok &= cc.consistent
        human.append("CC = (" + ", ".join(f"{s}:{v}" for s, v in cc.multiplicities.items()) + ")")
    if everything or args.morse_groups:
        rows = [ml.local_morse_group(F, d).to_json() for d in data]
        body["morse_groups"] = rows
        for r in rows:
            human.append(f"M[{r['datum']['cell']} | {','.join(r['datum']['negative_cells']) or '-'}] = {r['dims']}")
    if everything or args.ss:
        ss = ml.singular_support(F, data)
        body["singular_support"] = sorted(ss)
        human.append(f"SS over strata: {sorted(ss)}")
    if everything or args.dual_check:
        rep = ml.morse_duality_check(F, data)
        body["duality"] = rep.to_json()
        ok &= rep.ok
        human.append(f"duality: {'ok' if rep.ok else 'FAILED'}")
    return _emit(args, "sheaf-report", ok, body, human)


def cmd_decompose(args) -> int:
    from .sheafcat.core import NotConstructible
    from .sheafcat.decompose import NotGenerated, decompose_into_standards, same_sections

    sp = _space(args.space)
    F = parse_sheaf(sp, args.sheaf)
    try:
        tree = decompose_into_standards(F, verify=False)
    except (NotGenerated, NotConstructible) as exc:
        return _emit(args, "decompose", False, {"error": str(exc)}, [f"not generated: {exc}"])
    ok = same_sections(F, tree)
    leaves = [(sp.sort(t.open), t.shift) for t in tree.leaves()]
    human = [f"tree with {tree.size()} nodes, leaves:"] + [f"  std({','.join(U)})[{n}]" for U, n in leaves]
    human.append(f"sections match: {'yes' if ok else 'no'}")
    return _emit(args, "decompose", ok, {"tree": tree.to_json(sp), "sections_match": ok}, human)


def _ainfty_preset(name: str, arity: int, seed: int):
    import random

    from . import ainfty as ai

    if name == "circle":
        cells = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
    elif name == "interval":
        cells = [(0,), (1,), (0, 1)]
    elif name == "random":
        cells = ai.random_complex(random.Random(seed))
    else:
        raise InputError(f"unknown A-infinity preset {name!r}")
    A, _ = ai.cochain_algebra(cells, max_arity=arity)
    m1 = ai.m1_matrix(A, "X", "X")
    pairs = ai.greedy_matching(m1, random.Random(seed))
    small, P, I, H = ai.matching_transfer(m1, A.hom[("X", "X")], pairs)
    T = ai.TransferData({("X", "X"): small}, {("X", "X"): P}, {("X", "X"): I}, {("X", "X"): H})
    return ai.hpl_transfer(A, T, arity, functor_arity=2).B


def cmd_ainfty(args) -> int:
    from . import ainfty as ai

    if args.structure:
        try:
            B = ai.AInftyStructure.from_json(_load_json(args.structure))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{args.structure}: bad structure: {exc}") from None
        arity = min(args.max_arity, B.max_arity)
    else:
        B = _ainfty_preset(args.preset, args.max_arity, args.seed)
        arity = args.max_arity
    rep = ai.check_relations(B, arity)
    human = ["hom generator degrees: " + ", ".join(f"{X}->{Y}: {list(v)}" for (X, Y), v in B.hom.items()),
             f"relations through arity {arity}: {'pass' if rep.ok else 'FAIL'}"]
    if not rep.ok:
        human.append(f"  witness arity {rep.arity} path {rep.witness[0]} inputs {rep.witness[1]}")
    body = {"relations": rep.to_json(), "arity": arity}
    if args.dump:
        body["structure"] = B.to_json()
    return _emit(args, "ainfty", rep.ok, body, human)


def cmd_morse(args) -> int:
    from . import morse as mo

    sp = _space(args.space)
    if args.endpoint_pair:
        r = mo.endpoint_pair(args.subdivision)
        sub, objs, star = mo.endpoint_pair_objects(args.subdivision)
        mod = mo.module_vs_mor(sub.fine, objs, star)
        ok = r.ok and mod.ok
        human = [f"sheaf side {r.sheaf_side}", f"morse side {r.morse_side}", f"module dims {mod.dims}"]
        return _emit(args, "morse", ok, {"endpoint_pair": r.to_json(), "module": mod.to_json()}, human)
    try:
        sub, objs = mo.preset_objects(sp, args.subdivision)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep = mo.open_vs_mor(sub.fine, objs)
    human = [f"objects: {list(objs)}"]
    human += [f"  Hom({r['objects'][0]}, {r['objects'][1]}): {r['generators']} critical cells, H = {r['dims']}"
              for r in rep.rows]
    body = rep.to_json()
    if args.trees:
        counts = []
        names = list(objs)
        for X in names:
            for Y in names:
                for Z in names:
                    try:
                        fx, fy, fz = objs[X], objs[Y], objs[Z]
                        mx = mo.morse_complex((fx, fy)).critical
                        my = mo.morse_complex((fy, fz)).critical
                        mz = mo.morse_complex((fx, fz)).critical
                    except mo.NotDirected:
                        continue
                    for a1, _ in mx:
                        for a2, _ in my:
                            for b, _ in mz:
                                c = mo.count_morse_trees([fx, fy, fz], [a1, a2], b)
                                if c:
                                    counts.append({"objects": [X, Y, Z], "inputs": [list(a1), list(a2)],
                                                   "output": list(b), "count": str(c)})
        body["trees"] = counts
        human.append(f"nonzero m2 tree counts: {len(counts)}")
    human.append(f"transfer = trees: {'yes' if rep.ok else 'no'} ({len(rep.mismatches)} mismatches)")
    return _emit(args, "morse", rep.ok, body, human)


def cmd_degree(args) -> int:
    from . import laggr as lg

    if args.planes:
        obj = _load_json(args.planes)
        try:
            L0, L1 = (lg.LagrangianPlane.from_json(p) for p in obj["planes"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{args.planes}: bad plane data: {exc}") from None
        try:
            a = lg.short_path_angles(L0, L1)
            deg = lg.intersection_degree(L0, L1)
        except (lg.NotTransverse, lg.Ungraded) as exc:
            raise InputError(str(exc)) from None
        human = ["angles: " + " ".join(f"{x:.10f}" for x in a.angles), f"degree: {deg:.10f}"]
        return _emit(args, "degree", True, {"angles": a.angles.tolist(), "degree": deg}, human)
    recs = lg.degree_law_run(args.random, args.seed)
    tol = args.tolerance
    worst = {
        "phase_imag": max(max(abs(r.phase0.imag), abs(r.phase1.imag)) for r in recs),
        "phase_real_min": min(min(r.phase0.real, r.phase1.real) for r in recs),
        "angle_sum": max(abs(r.angle_sum + r.n / 2) for r in recs),
        "pairing": max(r.pairing for r in recs),
        "degree": max(abs(r.degree - r.n) for r in recs),
    }
    ok = (worst["phase_imag"] < 1e-9 and worst["phase_real_min"] > 0 and worst["angle_sum"] < tol
          and worst["pairing"] < tol and worst["degree"] < 1e-6)
    human = [f"{len(recs)} random holomorphic pairs, seed {args.seed}"] + [f"  max {k}: {v:.3e}" for k, v in worst.items()]
    return _emit(args, "degree", ok, {"pairs": len(recs), "worst": worst}, human)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="microlocal", description="Constructible sheaves, Morse groups and A-infinity transfer.")
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a stratified complex")
    v.add_argument("space")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("sheaf-report", help="perversity, CC, Morse groups, duality")
    s.add_argument("space")
    s.add_argument("sheaf")
    for flag in ("--perversity", "--cc", "--morse-groups", "--ss", "--dual-check"):
        s.add_argument(flag, action="store_true")
    s.set_defaults(func=cmd_sheaf_report)

    d = sub.add_parser("decompose", help="standard-object decomposition tree")
    d.add_argument("space")
    d.add_argument("sheaf")
    d.set_defaults(func=cmd_decompose)

    a = sub.add_parser("ainfty", help="transfer and check A-infinity relations")
    g = a.add_mutually_exclusive_group()
    g.add_argument("--preset", default="circle", choices=["circle", "interval", "random"])
    g.add_argument("--structure")
    a.add_argument("--max-arity", type=int, default=6)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--dump", action="store_true", help="include the structure in the JSON report")
    a.set_defaults(func=cmd_ainfty)

    m = sub.add_parser("morse", help="open sets against Morse trees on a graph preset")
    m.add_argument("space", choices=["interval", "circle"])
    m.add_argument("--subdivision", type=int, default=8)
    m.add_argument("--trees", action="store_true")
    m.add_argument("--endpoint-pair", action="store_true")
    m.set_defaults(func=cmd_morse)

    g2 = sub.add_parser("degree", help="short-path angles and intersection degrees")
    g2.add_argument("--planes")
    g2.add_argument("--random", type=int, default=1000)
    g2.add_argument("--seed", type=int, default=0)
    g2.add_argument("--tolerance", type=float, default=1e-8)
    g2.set_defaults(func=cmd_degree)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # accept --json anywhere on the line
    as_json = "--json" in argv
    argv = [x for x in argv if x != "--json"]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    args.json = as_json
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
