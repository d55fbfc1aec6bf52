from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from restdim import digitsets as ds
from restdim import treesets as ts


def enumerate_count(t: ts.TreeSet, level: int) -> int:
    return sum(1 for _ in t.paths_at_level(level))


@pytest.mark.parametrize("s", [ds.evens(), ds.odds(), ds.Finite([2, 3, 7]), ds.GeometricBlocks(1, 2, 4),
                               ~ds.multiples(3), ds.phi_image(ds.naturals(), 2, 3)])
def test_digit_tree_survivors_match_enumeration(s):
    t = ts.from_digitset(s)
    for lv in range(0, 13):
        assert t.survivors_at_level(lv) == enumerate_count(t, lv) == 2 ** s.count(lv)
        assert t.count_below((), lv) == 2 ** s.count(lv)


def test_full_tree_in_two_dimensions():
    t = ts.FullTree(2)
    assert t.survivors_at_level(3) == 64 == enumerate_count(t, 3)


def test_family_tree_closed_form_matches_traversal():
    fam = ds.ListFamily([ds.evens(), ds.Finite([1, 2]), ds.naturals()])
    t = ts.family_assemble(fam)
    for lv in range(0, 12):
        assert t.survivors_at_level(lv) == enumerate_count(t, lv)


def test_family_tree_infinite_family():
    t = ts.family_assemble(ds.ConstantFamily(ds.odds()))
    for lv in range(0, 12):
        assert t.survivors_at_level(lv) == t.count_below((), lv)


def test_explicit_tree():
    t = ts.ExplicitTree(1, 3, [(0, 1, 1), (1, 0, 0), (0, 1, 0)])
    assert t.survivors_at_level(3) == 3
    assert t.survivors_at_level(2) == 2
    assert t.survivors_at_level(5) == 3  # continues along child 0 below depth
    assert t.survives((0, 1)) and not t.survives((1, 1))
    with pytest.raises(ValueError):
        ts.ExplicitTree(1, 2, [(0, 2)])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 2), st.integers(1, 5))
def test_random_tree_properties(seed, n, depth):
    t = ts.random_tree(random.Random(seed), n, depth)
    assert ts.check_nonempty(t, depth)
    lay = ts.layers(t, depth)
    assert len(lay) == depth + 1
    assert t.survivors_at_level(depth) == len(t.leaves)


def test_layers_collapse_states():
    t = ts.from_digitset(ds.evens())
    lay = ts.layers(t, 20)
    assert all(len(level) == 1 for level in lay)


def test_deep_levels_use_states_not_paths():
    s = ds.GeometricBlocks(1, 2, 4)
    t = ts.DigitTree(s)
    assert t.count_below((), 60) == 2 ** s.count(60)


def test_is_subtree():
    k = ts.from_digitset(ds.Finite([2]))
    assert ts.is_subtree(k, ts.from_digitset(ds.evens()), 10)
    assert not ts.is_subtree(ts.from_digitset(ds.odds()), ts.from_digitset(ds.evens()), 10)


def test_uniform_measure_conserves_mass():
    w = ts.uniform_measure(ts.from_digitset(ds.GeometricBlocks(1, 2, 4)))
    assert w.check_conservation(14)
    assert w.mass((0, 0, 0, 1)) == Fraction(1, 2)
    assert w.mass((0, 0, 0, 1, 1, 1, 0)) == Fraction(1, 16)
    assert w.mass((1,)) == 0


def test_equal_split_on_explicit_tree():
    t = ts.ExplicitTree(1, 2, [(0, 0), (0, 1), (1, 1)])
    w = ts.equal_split(t)
    assert w.mass((0, 1)) == Fraction(1, 4) and w.mass((1, 1)) == Fraction(1, 2)
    assert w.check_conservation(4)


def test_uniform_measure_needs_digit_tree():
    with pytest.raises(TypeError):
        ts.uniform_measure(ts.FullTree(1))


def test_json_roundtrip():
    trees = [ts.FullTree(2), ts.from_digitset(ds.evens()),
             ts.ExplicitTree(1, 2, [(0, 1), (1, 1)]),
             ts.family_assemble(ds.ListFamily([ds.evens(), ds.odds()]))]
    for t in trees:
        back = ts.from_json(json.loads(json.dumps(t.to_json())))
        assert [back.survivors_at_level(l) for l in range(8)] == [t.survivors_at_level(l) for l in range(8)]
    with pytest.raises(ValueError):
        ts.from_json({"kind": "nope"})


def test_depth_limit_enforced_for_traversal():
    t = ts.ExplicitTree(1, 2, [(0, 1)])
    with pytest.raises(ts.DepthExceeded):
        t.count_below((), 10**6)


def test_dump_lists_paths():
    text = ts.dump(ts.from_digitset(ds.Finite([2])), 2)
    assert text.splitlines()[1:] == ["00", "01"]
