from __future__ import annotations

import json
import threading
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from restdim import scales as sc
from restdim.digitsets import GeometricBlocks


def test_all_levels_and_arithmetic():
    d = sc.all_levels()
    assert d.prefix(5) == [1, 2, 3, 4, 5]
    a = sc.Arithmetic(2, 3)
    assert a.prefix(4) == [5, 8, 11, 14]
    assert a.is_allowed(11) and not a.is_allowed(12) and not a.is_allowed(2)
    assert a.levels_upto(12) == [5, 8, 11]
    assert a.gap_bound() == 3


def test_supergeometric_is_strictly_increasing():
    d = sc.SuperGeometric(1, Fraction(3, 2))
    pre = d.prefix(40)
    assert all(b > a for a, b in zip(pre, pre[1:]))
    assert d.ratio_bound() is not None
    assert sc.SuperGeometric(1, 4).prefix(4) == [4, 16, 64, 256]


def test_non_increasing_rule_is_rejected():
    class Bad(sc.ScaleSequence):
        kind = "bad"

        def _term(self, k):
            return 5 if k < 3 else 4

    with pytest.raises(ValueError):
        Bad().prefix(4)


@given(st.fractions(min_value=Fraction(1, 10**6), max_value=Fraction(10**6)))
def test_bucket_of_brackets_value(x):
    l = sc.bucket_of(x)
    assert Fraction(1, 1) / Fraction(2) ** l <= x < Fraction(2) / Fraction(2) ** l


def test_bucket_of_examples():
    assert sc.bucket_of(Fraction(1, 2)) == 1
    assert sc.bucket_of(Fraction(3, 4)) == 1
    assert sc.bucket_of(Fraction(1)) == 0
    assert sc.bucket_of(Fraction(1, 1024)) == 10


def test_canonicalize_buckets_roundtrip():
    base = sc.Arithmetic(0, 3)
    d = sc.canonicalize(sc.SorgenfreyUnion.buckets(base))
    assert d.prefix(10) == base.prefix(10)


def test_canonicalize_power_union():
    # pieces [3^-k, 3^-k + 10^-(k+2)) are narrow: each meets one bucket
    d = sc.canonicalize(sc.SorgenfreyUnion.power(3, 10, 2))
    expected = [sc.bucket_of(Fraction(1, 3**k)) for k in range(1, 21)]
    assert d.prefix(20) == sorted(set(expected))[:20]


def test_finite_union_not_admissible():
    with pytest.raises(sc.NotAdmissible):
        sc.canonicalize(sc.SorgenfreyUnion.finite([(Fraction(1, 4), Fraction(1, 8))]))


def test_missing_witness_not_admissible():
    u = sc.SorgenfreyUnion(rule=lambda k: (Fraction(1, 2**k), Fraction(1, 2**k)))
    with pytest.raises(sc.NotAdmissible):
        sc.canonicalize(u)


def test_wide_piece_covers_several_buckets():
    assert sc.piece_levels(Fraction(1, 8), Fraction(1, 2)) == (1, 3)


def test_block_endpoints():
    s = GeometricBlocks(1, 2, 4)
    assert sc.BlockEndpoints(s, "end").prefix(3) == [8, 32, 128]
    assert sc.BlockEndpoints(s, "start").prefix(3) == [3, 15, 63]


def test_concat_prefix_then_tail():
    d = sc.Concat([2, 3], sc.Arithmetic(10, 5))
    assert d.prefix(4) == [2, 3, 15, 20]


@pytest.mark.parametrize("d", [
    sc.all_levels(),
    sc.Arithmetic(1, 4),
    sc.SuperGeometric(2, Fraction(5, 2)),
    sc.Concat([1, 4], sc.SuperGeometric(3, 2)),
    sc.BlockEndpoints(GeometricBlocks(1, 3, 5), "start"),
])
def test_json_roundtrip(d):
    text = json.dumps(d.to_json())
    back = sc.from_json(json.loads(text))
    assert back.prefix(12) == d.prefix(12)
    assert back == d and hash(back) == hash(d)


def test_concurrent_readers_see_same_prefix():
    d = sc.SuperGeometric(1, Fraction(3, 2))
    out = []

    def read():
        out.append(tuple(d.prefix(200)))

    threads = [threading.Thread(target=read) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(out)) == 1


def test_darboux_tolerance_shrinks():
    assert sc.darboux_tolerance(1) == Fraction(1, 4)
    assert sc.darboux_tolerance(9) == Fraction(1, 100)
