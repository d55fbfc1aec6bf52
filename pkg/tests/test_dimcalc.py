from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from restdim import digitsets as ds
from restdim import dimcalc as dc
from restdim import scales as sc
from restdim.constructions import darboux_scale

BLOCKS = ds.GeometricBlocks(1, 2, 4)


def test_evens_every_dimension_is_half():
    h, p = dc.hdim_pdim(ds.evens())
    assert h.value == p.value == Fraction(1, 2)
    assert dc.drdim_AS(ds.evens(), sc.all_levels()).value == Fraction(1, 2)
    assert dc.drdim_AS(ds.evens(), sc.SuperGeometric(1, 3)).value == Fraction(1, 2)


def test_blocks_liminf_limsup():
    h, p = dc.hdim_pdim(BLOCKS)
    assert (h.value, p.value) == (Fraction(1, 3), Fraction(2, 3))
    assert dc.rdim_AS(BLOCKS).value == Fraction(2, 3)


def test_bounded_gaps_give_hausdorff_dimension():
    assert dc.drdim_AS(BLOCKS, sc.Arithmetic(0, 5)).value == Fraction(1, 3)


def test_block_endpoints_give_extremes():
    assert dc.drdim_AS(BLOCKS, sc.BlockEndpoints(BLOCKS, "end")).value == Fraction(2, 3)
    assert dc.drdim_AS(BLOCKS, sc.BlockEndpoints(BLOCKS, "start")).value == Fraction(1, 3)


def test_prefix_does_not_change_value():
    d = sc.Concat([1, 2, 3], sc.BlockEndpoints(BLOCKS, "end"))
    assert dc.drdim_AS(BLOCKS, d).value == Fraction(2, 3)


@pytest.mark.parametrize("alpha", [Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)])
def test_darboux_scale_certified(alpha):
    assert dc.drdim_AS(BLOCKS, darboux_scale(BLOCKS, alpha)).value == alpha


def test_evidence_is_never_exact_and_stays_in_sandwich():
    # geometric scales of ratio 2 do not line up with blocks of ratio 4
    b = dc.drdim_AS(BLOCKS, sc.SuperGeometric(3, 2))
    assert not b.exact and b.evidence_depth > 0
    assert Fraction(1, 3) <= b.lower <= b.upper <= Fraction(2, 3)


def test_evidence_bounds_bracket_known_liminf():
    # n_k = 4^k lands right after a block start: M = (1 + 4 + ... + 4^(k-1) + k) / 4^k -> 1/3
    b = dc.drdim_AS(BLOCKS, sc.SuperGeometric(1, 4))
    assert abs(b.lower - Fraction(1, 3)) < Fraction(1, 100)


def test_limit_bounds_validation_and_json():
    with pytest.raises(ValueError):
        dc.LimitBounds(Fraction(1), Fraction(0), False)
    with pytest.raises(ValueError):
        dc.LimitBounds(Fraction(0), Fraction(1), True)
    b = dc.LimitBounds(Fraction(1, 3), Fraction(1, 2), False, 9, "x")
    assert dc.LimitBounds.from_json(json.loads(json.dumps(b.to_json()))) == b
    assert b.to_json()["lower"] == "1/3"
    with pytest.raises(ValueError):
        b.value


def test_family_of_two_members():
    fam = [ds.evens(), ds.multiples(3)]
    assert dc.drdim_family(fam, sc.all_levels()).value == Fraction(1, 2)


def test_family_without_envelope_is_not_exact():
    fam = ds.ConstantFamily(BLOCKS)
    b = dc.drdim_family(fam, sc.SuperGeometric(3, 2))
    assert not b.exact


def test_constant_family_with_exact_member():
    b = dc.drdim_family(ds.ConstantFamily(ds.evens()), sc.all_levels())
    assert b.value == Fraction(1, 2)


def test_density_csv_columns():
    text = dc.density_csv(ds.evens(), sc.all_levels(), 4)
    assert text.splitlines() == ["k,n_k,count,density", "1,1,0,0", "2,2,1,1/2", "3,3,1,1/3", "4,4,2,1/2"]


def test_sandwich_on_random_pairs():
    rng = random.Random(3)
    for _ in range(60):
        s, d = dc.random_rule_pair(rng)
        assert dc.sandwich_holds(s, d)
