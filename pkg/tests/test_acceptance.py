"""Acceptance checks, one test per criterion; each prints a PASS/FAIL line."""

from __future__ import annotations

import random
import time
from fractions import Fraction
from math import factorial

import pytest

from restdim import constructions as cons
from restdim import coveroracle as co
from restdim import digitsets as ds
from restdim import dimcalc as dc
from restdim import scales as sc
from restdim import treesets as ts
from restdim._exact import Pow2Sum


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def _random_query(rng, n, max_depth):
    depth = rng.randint(1, max_depth)
    tree = ts.random_tree(rng, n, depth, keep=rng.choice([0.4, 0.6, 0.8]))
    s = Fraction(rng.randint(0, 8 * n), 8)
    levels = sorted(rng.sample(range(1, depth + 1), rng.randint(1, depth)))
    scales = sc.Concat(levels, sc.Arithmetic(depth + 1, 1))
    return co.ContentQuery(tree, s, scales, depth)


def test_c01_oracle_equivalence(report):
    rng = random.Random(2024)
    t0 = time.perf_counter()
    mismatches = 0
    cases = [(1, 6)] * 100 + [(2, 4)] * 20
    for n, max_depth in cases:
        q = _random_query(rng, n, max_depth)
        if co.min_cover_content_dp(q) != co.brute_force_content(q):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60
    report(1, ok, f"{len(cases)} trees, {mismatches} mismatches, {elapsed:.1f}s")


def _rule_class_samples():
    blocks = ds.GeometricBlocks(1, 2, 4)
    holder, _ = cons.holder_witness(ds.evens(), sc.SuperGeometric(1, 4), 1, 2)
    return {
        "finite": ds.Finite([1, 5, 6, 30, 64]),
        "periodic": ds.EventuallyPeriodic(7, 5, [0, 3]),
        "ap_block": ds.APBlock([(3, 20, 3, (0,)), (40, 60, 2, (1,))]),
        "explicit_blocks": ds.ExplicitBlocks([(2, 9), (17, 40)]),
        "geometric_blocks": blocks,
        "zero_one": cons.ZeroOneBlocks(2),
        "prime_factorial": cons.PrimeFactorialBlocks(1) | cons.PrimeFactorialBlocks(2),
        "guard": cons.GuardBlocks(1),
        "union": blocks | ds.multiples(5),
        "intersection": ~blocks & ds.odds(),
        "complement": ~ds.multiples(3),
        "phi_image": ds.phi_image(blocks, 2, 3),
        "holder": holder,
    }


def test_c02_survivors_equal_two_to_count(report):
    bad = []
    samples = _rule_class_samples()
    for name, s in samples.items():
        t = ts.from_digitset(s)
        for lv in range(0, 65):
            if t.count_below((), lv) != 2 ** s.count(lv):
                bad.append((name, lv))
                break
    report(2, not bad, f"{len(samples)} rule classes, levels 0..64, failures {bad}")


def test_c03_sandwich(report):
    rng = random.Random(7)
    exact, violations = 0, 0
    for _ in range(200):
        s, d = dc.random_rule_pair(rng)
        h, p = dc.hdim_pdim(s)
        b = dc.drdim_AS(s, d)
        assert h.exact and p.exact  # the generator only draws sets with exact limits
        if b.exact:
            exact += 1
            violations += not (h.value <= b.value <= p.value)
        else:
            violations += not (h.value <= b.lower <= b.upper <= p.value)
        violations += not dc.sandwich_holds(s, d)
    report(3, violations == 0, f"200 pairs ({exact} certified), {violations} violations")


def test_c04_darboux(report):
    s = ds.GeometricBlocks(1, 2, 4)
    h, p = dc.hdim_pdim(s)
    assert (h.value, p.value) == (Fraction(1, 3), Fraction(2, 3))
    t0 = time.perf_counter()
    worst = Fraction(0)
    for alpha in (Fraction(1, 3), Fraction(2, 5), Fraction(1, 2), Fraction(3, 5), Fraction(2, 3)):
        d = cons.darboux_scale(s, alpha)
        for k in range(10, 51):
            n = d.level_at(k)
            worst = max(worst, abs(Fraction(s.count(n), n) - alpha))
    rejected = 0
    for alpha in (Fraction(1, 4), Fraction(7, 10), Fraction(0), Fraction(1)):
        try:
            cons.darboux_scale(s, alpha)
        except cons.OutOfRange:
            rejected += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= Fraction(2, 100) and rejected == 4 and elapsed < 10
    report(4, ok, f"max |M-alpha| = {float(worst):.2e}, {rejected}/4 rejected, {elapsed:.2f}s")


def test_c05_zero_one(report):
    details, ok = [], True
    for i in (2, 3, 4):
        k = i * factorial(3 * i)
        m = Fraction(cons.ZeroOneBlocks(i).count(k), k)
        err = abs(m - (1 - Fraction(1, i * i)))
        ok &= err <= Fraction(1, 1000)
        details.append(f"i={i}: |M-(1-1/i^2)|={float(err):.1e}")
    fam = cons.zero_one_family()
    b = dc.drdim_family(fam, sc.all_levels())
    ok &= b.exact and b.value == 0
    details.append(f"D=all: {b.lower} exact={b.exact}")
    for i in (2, 3, 4):
        s = cons.ZeroOneBlocks(i)
        ends = sc.BlockEndpoints(s, "end")
        bound = dc.drdim_AS(s, ends).lower
        sampled = min(Fraction(s.count(n), n) for n in ends.prefix(3))
        target = 1 - Fraction(1, i) - Fraction(1, 100)
        ok &= bound >= target and sampled >= target
        details.append(f"i={i}: ends lower={bound}, sampled min={float(sampled):.4f}")
    report(5, ok, "; ".join(details))


CANONICAL_SCALES = [
    lambda: sc.all_levels(),
    lambda: sc.Arithmetic(0, 2),
    lambda: sc.Arithmetic(3, 7),
    lambda: sc.SuperGeometric(1, 2),
    lambda: sc.SuperGeometric(1, Fraction(3, 2)),
    lambda: sc.Concat([1, 4, 9], sc.SuperGeometric(4, 3)),
    lambda: sc.BlockEndpoints(cons.PrimeFactorialBlocks(2), "end"),
    lambda: sc.BlockEndpoints(cons.PrimeFactorialBlocks(3), "end"),
    lambda: sc.BlockEndpoints(cons.PrimeFactorialBlocks(4), "start"),
    lambda: cons.darboux_scale(cons.PrimeFactorialBlocks(3), Fraction(1, 2)),
]


def test_c06_prime_factorial(report):
    ok, details = True, []
    for i in (1, 2, 3, 4):
        s = cons.PrimeFactorialBlocks(i)
        p = dc.hdim_pdim(s)[1]
        r = dc.rdim_AS(s)
        ok &= p.exact and p.value == Fraction(i - 1, i) and r.exact and r.value == p.value
    details.append("limsup and rdim = (i-1)/i for i<=4")
    fam = cons.prime_factorial_family()
    worst = Fraction(0)
    for make in CANONICAL_SCALES:
        b = dc.drdim_family(fam, make())
        ok &= b.exact and b.value < 1
        worst = max(worst, b.upper)
    details.append(f"10 scales: family values certified, max {worst}")
    for i in (2, 3, 4):
        s = cons.PrimeFactorialBlocks(i)
        alpha = Fraction(i - 1, i)
        d = cons.darboux_scale(s, alpha)
        v = dc.drdim_AS(s, d)
        on_track = all(abs(Fraction(s.count(n), n) - alpha) < sc.darboux_tolerance(k)
                       for k, n in enumerate(d.prefix(8), 1))
        ok &= v.exact and v.value >= 1 - Fraction(1, i) and on_track
    details.append("Darboux witnesses reach 1-1/i")
    report(6, ok, "; ".join(details))


def test_c07_holder(report):
    ok, details = True, []
    worst_density = Fraction(0)
    for n_rule in (sc.SuperGeometric(1, 4), sc.SuperGeometric(1, Fraction(3, 2))):
        s, _ = cons.holder_witness(None, n_rule, 3, 4)
        worst_density = max(worst_density, max(Fraction(s.count(i), i) for i in range(1, 10_001)))
        b = dc.drdim_AS(s, n_rule)
        ok &= b.exact and b.value == Fraction(1, 2)
    ok &= worst_density <= Fraction(1, 2)
    details.append(f"max M_S(i<=1e4) = {worst_density}, drdim = 1/2 exact")

    # geometric configuration: p/q = 3/4 in (2/3, 5/6), n_k = ceil((3/2)^k)
    p, q = 3, 4
    n_rule = sc.SuperGeometric(1, Fraction(3, 2))
    _, t = cons.holder_witness(None, n_rule, p, q)
    scan = cons.holder_ratio_scan(t, p, q, depth=40, pairs=10_000, seed=0)
    ok &= scan["within_bound"] and scan["pairs"] == 10_000
    details.append(f"ratio {scan['max_ratio']:.4f} <= 2^(3/4) = {scan['bound']:.4f}")

    r = Fraction(p, q)
    m_t = [Fraction(t.count(n_rule.level_at(k + 1)), n_rule.level_at(k + 1)) for k in range(1, 120)]
    ok &= max(m_t) < r / 2
    details.append(f"max M_T(n_(k+1)) = {float(max(m_t)):.5f} < r/2 = 3/8")
    report(7, ok, "; ".join(details))


def test_c08_rdim_not_pdim(report):
    t = cons.rdim_not_pdim_construct(cons.PowerPhi(2), 1, 5)
    led = t.ledger
    ok = (led.n_seq[0], led.m_seq[0], led.n_seq[1], led.m_seq[1], led.n_seq[2]) == (0, 1, 2, 9, 27)
    details = [f"prefix {(led.n_seq[0], led.m_seq[0], led.n_seq[1], led.m_seq[1], led.n_seq[2])}"]
    for k in range(1, len(led.m_seq)):
        ok &= led.l_seq[k] == led.l_seq[k - 1] - 1 + 2 ** (led.m_seq[k - 1] - led.n_seq[k - 1])
    details.append(f"l_k recurrence over {len(led.m_seq)} stages")
    s = Fraction(1, 5)
    tenth = Pow2Sum.rational(Fraction(1, 10))
    for k in (4, 5):
        cert = t.certificate(k, s)
        ok &= cert["bound"] < tenth and cert["cover_cost"] <= cert["bound"]
        details.append(f"k={k}: r1^s + l_k r2^s ~ {float(cert['bound']):.2e}")
    for k in range(1, 5):
        nk, mk = led.n_seq[k - 1], led.m_seq[k - 1]
        ok &= t.count_below(tuple(led.j_seq[k - 1]), mk - nk) == 2 ** (mk - nk)
    details.append("distinguished cubes carry 2^(m_k - n_k) survivors, k<=4")
    report(8, ok, "; ".join(details))


def test_c09_mass_principle(report):
    rng = random.Random(99)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(50):
        s, _d = dc.random_rule_pair(rng)
        depth = rng.randint(8, 16)
        levels = sorted(rng.sample(range(1, depth + 1), rng.randint(2, depth)))
        scales = sc.Concat(levels, sc.Arithmetic(depth + 1, 1))
        exp = Fraction(rng.randint(1, 12), 12)
        tree = ts.from_digitset(s)
        content = co.min_cover_content_dp(co.ContentQuery(tree, exp, scales, depth))
        rep = co.mass_check(ts.uniform_measure(tree), exp, scales, depth)
        failures += not co.mass_consistent(content, 1, rep)
    elapsed = time.perf_counter() - t0
    report(9, failures == 0 and elapsed < 30, f"50 instances, {failures} failures, {elapsed:.1f}s")


def _regular_cases():
    rng = random.Random(5)
    cases = []
    while len(cases) < 20:
        if rng.random() < 0.6:
            m = rng.randint(2, 5)
            res = rng.sample(range(m), rng.randint(0, m - 1))
            s = ds.EventuallyPeriodic(rng.randint(1, 6), m, res)
        else:
            s = ds.Finite(rng.sample(range(1, 19), rng.randint(0, 4)))
        bound = co.window_assouad_estimate(s, 32, 64).upper
        if bound >= 1:
            continue
        t = bound + (1 - bound) * Fraction(rng.randint(1, 4), 4)
        cases.append((s, bound, t))
    return cases


def _log2_ratio_between(k: int, l: int, lo: Fraction, hi: Fraction) -> bool:
    # lo < log2(k)/l < hi  <=>  2^(l lo) < k < 2^(l hi), compared via integer powers
    def below(x: Fraction) -> bool:  # 2^(l x) < k
        return 2 ** (l * x.numerator) < k ** x.denominator

    return below(lo) and not below(hi) and 2 ** (l * hi.numerator) != k ** hi.denominator


def test_c10_regular_cover(report):
    failures = []
    for idx, (s, bound, t) in enumerate(_regular_cases()):
        K = ts.from_digitset(s)
        L, (k, l) = cons.regular_cover(K, t, bound, depth=18)
        in_range = _log2_ratio_between(k, l, bound, t)
        sub = ts.is_subtree(K, L, 18)
        counts = all(L.count_below((), m * l) == k**m for m in range(0, 18 // l + 1))
        if not (in_range and sub and counts):
            failures.append(idx)
    report(10, not failures, f"20 (K, t) cases, failures {failures}")
