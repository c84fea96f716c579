import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microlocal.stratspace import (PRESETS, StratifiedComplex, UnknownCell, closure, is_valid, link, load_space,
                                   open_star, preset, standard_cover, subdivided_circle, subdivided_interval,
                                   validate)

ALL = sorted(PRESETS)


def spaces():
    return st.one_of(st.sampled_from(ALL).map(preset),
                     st.integers(1, 6).map(subdivided_interval),
                     st.integers(2, 6).map(subdivided_circle))


@pytest.mark.parametrize("name", ALL)
def test_presets_valid(name):
    assert validate(preset(name)) == []


def test_interval_stars():
    X = preset("interval")
    assert open_star(X, "b") == {"b", "e"}
    assert open_star(X, "e") == {"e"}


def test_p1_star():
    assert open_star(preset("p1"), "p0") == {"p0", "e1", "e2", "f1", "f2"}


def test_interval_cover():
    X = preset("interval")
    got = set(standard_cover(X))
    assert got == {frozenset("abe"), frozenset("be"), frozenset("ae"), frozenset("e")}


def test_one_stratum_cover():
    assert standard_cover(preset("circle")) == [preset("circle").all_cells]


def test_p1_cover_size():
    # the empty complement of the open stratum's closure is dropped
    assert len(standard_cover(preset("p1"))) == 4


def test_broken_incidence():
    X = preset("interval").to_json()
    X["incidences"].append(["e", "zz", 1])
    diags = validate(StratifiedComplex.from_json(X))
    assert [d.kind for d in diags] == ["unknown-cell"]


def test_boundary_squared_detected():
    # a 2-cell whose boundary edges do not close up
    obj = {"cells": [{"id": c, "dim": d} for c, d in
                     [("p", 0), ("q", 0), ("x", 1), ("y", 1), ("f", 2)]],
           "incidences": [["x", "q", 1], ["x", "p", -1], ["y", "q", 1], ["y", "p", -1], ["f", "x", 1], ["f", "y", 1]],
           "strata": [{"label": "all", "cells": ["p", "q", "x", "y", "f"]}]}
    kinds = {d.kind for d in validate(StratifiedComplex.from_json(obj))}
    assert "boundary-squared" in kinds


def test_partition_errors():
    X = preset("interval").to_json()
    X["strata"] = [{"label": "ae", "cells": ["a", "e"]}]
    assert not is_valid(StratifiedComplex.from_json(X))


def test_frontier_condition():
    X = preset("interval").to_json()
    X["strata"] = [{"label": "e", "cells": ["e"]}, {"label": "ab", "cells": ["a", "b"]}]
    assert is_valid(StratifiedComplex.from_json(X))
    X["strata"] = [{"label": "ae", "cells": ["a", "e"]}, {"label": "b", "cells": ["b"]}]
    assert is_valid(StratifiedComplex.from_json(X))


def test_disconnected_is_warning():
    X = preset("interval").to_json()
    X["strata"] = [{"label": "e", "cells": ["e"]}, {"label": "ab", "cells": ["a", "b"]}]
    diags = validate(StratifiedComplex.from_json(X))
    assert [(d.kind, d.severity) for d in diags] == [("connectivity", "warning")]


def test_unknown_cell():
    with pytest.raises(UnknownCell):
        open_star(preset("interval"), "zz")


def test_json_round_trip(tmp_path):
    for name in ALL:
        s = preset(name)
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(s.to_json()))
        t = load_space(str(p))
        assert t.cells == s.cells and t.incidences == s.incidences
        assert [(x.label, x.cells) for x in t.strata] == [(x.label, x.cells) for x in s.strata]


@settings(max_examples=40, deadline=None)
@given(spaces(), st.data())
def test_star_is_minimal_open(s, data):
    c = data.draw(st.sampled_from(s.ids))
    U = open_star(s, c)
    assert s.is_open(U) and c in U
    for x in U - {c}:
        assert not s.is_open(U - {x})


@settings(max_examples=40, deadline=None)
@given(spaces(), st.data())
def test_closure_of_star(s, data):
    c = data.draw(st.sampled_from(s.ids))
    U = open_star(s, c)
    assert closure(s, U) - U == link(s, c) | (closure(s, {c}) - {c})


@settings(max_examples=30, deadline=None)
@given(spaces())
def test_cover_opens(s):
    assert is_valid(s)
    for U in standard_cover(s):
        assert s.is_open(U)
