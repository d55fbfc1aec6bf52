"""Explicit constructions: Darboux scales, factorial block families, the
Hoelder witness, the rdim/pdim separating tree, regular covers and ball
packings.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, factorial
from typing import Callable, Iterable, Optional, Sequence

from ._exact import Pow2Sum, as_fraction, fmt_fraction, pow2_cost
from . import digitsets as ds
from .digitsets import (
    BlockFamily,
    Combined,
    DigitSet,
    DigitSetFamily,
    RatioBlocks,
    evens,
    naturals,
    phi,
    phi_image,
    phi_inverse,
)
from .dimcalc import LimitBounds, drdim_AS, hdim_pdim
from . import scales as sc
from .scales import BlockEndpoints, DarbouxScale, ScaleSequence, floor_log2
from . import treesets as ts
from .treesets import TreeSet


class OutOfRange(ValueError):
    """Target value outside ``[hdim A_S, pdim A_S]``."""


# -- Darboux scales -----------------------------------------------------------


def darboux_scale(s: DigitSet, alpha) -> DarbouxScale:
    """Scales with ``M_S(n_k) -> alpha`` for ``alpha`` in ``[hdim A_S, pdim A_S]``.

    ``n_k`` is the least index beyond ``n_{k-1}`` whose density is within
    ``1/(k+1)^2`` of ``alpha``.  Such an index always exists: the density
    moves by less than ``1/n`` per step and comes arbitrarily close to both
    ends of the interval infinitely often.
    """
    alpha = as_fraction(alpha)
    lo, hi = hdim_pdim(s)
    if not (lo.exact and hi.exact):
        raise ValueError("darboux_scale needs exact liminf and limsup of the density")
    if not lo.value <= alpha <= hi.value:
        raise OutOfRange(
            f"alpha = {fmt_fraction(alpha)} is outside [hdim, pdim] = "
            f"[{fmt_fraction(lo.value)}, {fmt_fraction(hi.value)}]"
        )
    return DarbouxScale(s, alpha)


# -- factorial block families -------------------------------------------------


class ZeroOneBlocks(RatioBlocks):
    """``S_i = U_{m >= i} [(3m)!/i, i (3m)!]``."""

    kind = "zero_one"

    def __init__(self, i: int):
        super().__init__()
        if i < 1:
            raise ValueError("i must be >= 1")
        self.i = int(i)
        self.ratio = self.i**2

    def _start(self, j: int) -> int:
        m = self.i + j - 1
        return factorial(3 * m) // self.i

    def _block(self, j):
        m = self.i + j - 1
        f = factorial(3 * m)
        return f // self.i, self.i * f

    def drdim_rule(self, scales):
        # block ends (starts) of a sibling S_l: the l*(3m)! (resp. (3m)!/l - 1)
        # sit at a fixed relative position of the m-th block of S_i
        if isinstance(scales, BlockEndpoints) and isinstance(scales.digitset, ZeroOneBlocks):
            l, i = scales.digitset.i, self.i
            if scales.which == "end":
                v = 1 - Fraction(1, i * l) if l <= i else Fraction(i * i - 1, i * l)
            else:
                v = 1 - Fraction(l, i) if i > l else Fraction(0)
            return LimitBounds.exactly(v, f"scales from block {scales.which}s of S_{l}")
        return None

    def to_json(self) -> dict:
        return {"kind": self.kind, "i": self.i}


class ZeroOneFamily(DigitSetFamily):
    kind = "zero_one"

    def member(self, i: int) -> ZeroOneBlocks:
        return _zero_one(i)

    def tail_envelope(self, first: int, scales) -> Optional[LimitBounds]:
        if scales.ratio_bound() is not None:
            return LimitBounds.exactly(0, "bounded-ratio scales: every member has liminf 0")
        if isinstance(scales, BlockEndpoints) and isinstance(scales.digitset, ZeroOneBlocks):
            # members i >= l give 1 - 1/(i l) (ends) or 1 - l/i (starts); both tend to 1
            return LimitBounds.exactly(1, "supremum over members tends to 1")
        return None

    def to_json(self) -> dict:
        return {"kind": self.kind}


@lru_cache(maxsize=None)
def _zero_one(i: int) -> ZeroOneBlocks:
    return ZeroOneBlocks(i)


def zero_one_family(i_max: Optional[int] = None):
    """Members ``S_1, S_2, ...`` (lazy) or the first ``i_max`` of them."""
    fam = ZeroOneFamily()
    return fam if i_max is None else fam.members(i_max)


@lru_cache(maxsize=None)
def odd_prime(i: int) -> int:
    """The ``i``-th odd prime (``odd_prime(1) = 3``)."""
    from sympy import prime

    return int(prime(i + 1))


class PrimeFactorialBlocks(RatioBlocks):
    """``S_i = U_j [(p_i^j)!, i (p_i^j)!]`` with ``p_i`` the i-th odd prime."""

    kind = "prime_factorial"

    def __init__(self, i: int):
        super().__init__()
        if i < 1:
            raise ValueError("i must be >= 1")
        self.i = int(i)
        self.p = odd_prime(self.i)
        self.ratio = self.i

    def _start(self, j: int) -> int:
        return factorial(self.p**j)

    def drdim_rule(self, scales):
        j = _guard_index(scales)
        if j is not None and j != self.i:
            return LimitBounds.exactly(0, f"scales live in the guard set P_{j}")
        if isinstance(scales, BlockEndpoints) and isinstance(scales.digitset, PrimeFactorialBlocks) \
                and scales.which == "start":
            return LimitBounds.exactly(0, "block starts minus one avoid every guard set")
        return None

    def to_json(self) -> dict:
        return {"kind": self.kind, "i": self.i}


class GuardBlocks(BlockFamily):
    """``P_i = U_j [(p_i^j)!, (p_i^j + 1)! - 1]``."""

    kind = "guard"

    def __init__(self, i: int):
        super().__init__()
        self.i = int(i)
        self.p = odd_prime(self.i)

    def _block(self, j):
        a = factorial(self.p**j)
        return a, a * (self.p**j + 1) - 1

    def to_json(self) -> dict:
        return {"kind": self.kind, "i": self.i}


def _guard_index(scales) -> Optional[int]:
    """``j`` when the scales eventually stay inside ``P_j``."""
    if isinstance(scales, BlockEndpoints) and isinstance(scales.digitset, PrimeFactorialBlocks):
        if scales.which == "end":
            return scales.digitset.i
    if isinstance(scales, DarbouxScale) and isinstance(scales.digitset, PrimeFactorialBlocks):
        # a positive density target forces the scales into P_j
        if scales.alpha > 0:
            return scales.digitset.i
    return None


class PrimeFactorialFamily(DigitSetFamily):
    kind = "prime_factorial"

    def member(self, i: int) -> PrimeFactorialBlocks:
        return _prime_factorial(i)

    def guard(self, i: int) -> GuardBlocks:
        return GuardBlocks(i)

    def tail_envelope(self, first: int, scales) -> Optional[LimitBounds]:
        if scales.ratio_bound() is not None:
            return LimitBounds.exactly(0, "bounded-ratio scales: every member has liminf 0")
        j = _guard_index(scales)
        if j is not None:
            if j < first:
                return LimitBounds.exactly(0, f"only S_{j} can be positive")
            v = drdim_AS(self.member(j), scales)
            return v if v.exact else None
        if isinstance(scales, BlockEndpoints) and isinstance(scales.digitset, PrimeFactorialBlocks):
            return LimitBounds.exactly(0, "block starts minus one avoid every guard set")
        return None

    def to_json(self) -> dict:
        return {"kind": self.kind}


@lru_cache(maxsize=None)
def _prime_factorial(i: int) -> PrimeFactorialBlocks:
    return PrimeFactorialBlocks(i)


def prime_factorial_family(i_max: Optional[int] = None):
    fam = PrimeFactorialFamily()
    return fam if i_max is None else fam.members(i_max)


def guard_sets_disjoint(i_max: int, upto: int) -> bool:
    """``P_i & P_j & [1, upto]`` empty for ``i < j <= i_max`` (interval arithmetic)."""
    blocks = []
    for i in range(1, i_max + 1):
        blocks.extend((a, b, i) for a, b in GuardBlocks(i).blocks_upto(upto))
    blocks.sort()
    return all(b1 < a2 for (_, b1, _), (a2, _, _) in zip(blocks, blocks[1:]))


# -- Hoelder witness ------------------------------------------------------


class _IndexBlocks(BlockFamily):
    """Blocks ``[lo(k), hi(k)]`` for ``k`` in an index set, skipping empty ones."""

    def __init__(self, index: DigitSet, bounds: Callable[[int], tuple[int, int]]):
        super().__init__()
        self.index = index
        self.bounds = bounds
        self._k = 0

    def _block(self, j):
        while True:
            k = self.index.next_member(self._k)
            if k is None:
                return None
            self._k = k
            a, b = self.bounds(k)
            if a <= b:
                return a, b


class HolderSet(Combined):
    """Half-filled tail blocks on ``k in K``, even numbers elsewhere.

    ``S = U_{k in K} [ceil((n_k + n_{k+1})/2), n_{k+1} - 2]
          U U_{k not in K} (2N & [n_k, n_{k+1} - 1])``
    """

    kind = "holder"

    def __init__(self, k_rule: DigitSet, n_rule: ScaleSequence):
        self.k_rule, self.n_rule = k_rule, n_rule
        n = n_rule.level_at
        tails = _IndexBlocks(k_rule, lambda k: (-(-(n(k) + n(k + 1)) // 2), n(k + 1) - 2))
        spans = _IndexBlocks(ds.combine("complement", [k_rule]), lambda k: (n(k), n(k + 1) - 1))
        fill = ds.combine("intersection", [evens(), spans])
        super().__init__("union", [tails, fill])
        self.tails, self.fill = tails, fill

    def drdim_rule(self, scales):
        # every block loses at most 3/2 against half density, so
        # n_k/2 - O(k) <= count(n_k) <= n_k/2 and superlinear scales give 1/2
        if scales is self.n_rule or (_json_or_none(scales) is not None
                                     and _json_or_none(scales) == _json_or_none(self.n_rule)):
            if self.n_rule.superlinear():
                return LimitBounds.exactly(Fraction(1, 2), "half-filled blocks along superlinear scales")
        return None

    def to_json(self) -> dict:
        return {"kind": self.kind, "K": self.k_rule.to_json(), "scales": self.n_rule.to_json()}


def _json_or_none(x):
    try:
        return x.to_json()
    except NotImplementedError:
        return None


def holder_witness(k_rule: Optional[DigitSet], n_rule: ScaleSequence, p: int, q: int):
    """``(S, T)`` with ``T = phi_{p,q}(S)``; ``k_rule=None`` means every index."""
    if not 1 <= p < q:
        raise ValueError("need 1 <= p < q")
    s = HolderSet(k_rule if k_rule is not None else naturals(), n_rule)
    return s, phi_image(s, p, q)


def holder_map_eval(p: int, q: int, digits: Sequence[int]) -> Fraction:
    """``f_{p,q}``: the binary digit at position ``phi(i)`` moves to position ``i``.

    ``digits[j-1]`` is the digit at position ``j`` of a point of ``A_T``.
    """
    out = Fraction(0)
    for j, d in enumerate(digits, start=1):
        if d not in (0, 1):
            raise ValueError("binary digits only")
        if d:
            i = phi_inverse(j, p, q)
            if i is None:
                raise ValueError(f"digit at position {j} is outside the image of phi_{p},{q}")
            out += Fraction(1, 2**i)
    return out


def digits_value(digits: Sequence[int]) -> Fraction:
    return sum((Fraction(d, 2**j) for j, d in enumerate(digits, start=1) if d), Fraction(0))


def holder_bound_holds(p: int, q: int, fx: Fraction, fz: Fraction, x: Fraction, z: Fraction) -> bool:
    """``|f(x)-f(z)| <= 2^{(p/q)(q-p)} |x-z|^{p/q}``, decided exactly via q-th powers."""
    return abs(fx - fz) ** q <= 2 ** (p * (q - p)) * abs(x - z) ** p


def holder_valid_constant(p: int, q: int) -> float:
    """A constant that provably works for ``f_{p,q}`` on all of ``A_{phi(N)}``.

    If ``i`` is the first index where the preimages differ, then
    ``|f(x) - f(z)| <= 2^(1-i)`` and ``|x - z| >= c_m 2^-phi(i)`` with
    ``m = kp - i`` and ``c_m = 2^-m (2^q - 2^p)/(2^q - 1)`` (the image of
    phi leaves ``q - p`` holes per ``q`` positions).  Since
    ``r phi(i) - i = m (1 - r)``, the ratio is at most
    ``2^(1+m) ((2^q - 1)/(2^q - 2^p))^r``, largest at ``m = p - 1``.
    """
    return 2**p * ((2**q - 1) / (2**q - 2**p)) ** (p / q)


def holder_valid_bound_holds(p: int, q: int, fx, fz, x, z) -> bool:
    """``|f(x)-f(z)| <= holder_valid_constant(p, q) |x-z|^{p/q}``, exactly."""
    lhs = abs(fx - fz) ** q
    const_q = Fraction(2 ** (p * q)) * Fraction(2**q - 1, 2**q - 2**p) ** p
    return lhs <= const_q * abs(x - z) ** p


def holder_ratio_scan(t: DigitSet, p: int, q: int, depth: int = 40, pairs: int = 10_000,
                      seed: int = 0) -> dict:
    """Sample pairs of points of ``A_T`` (digits up to ``depth``) and measure
    ``|f(x) - f(z)| / |x - z|^{p/q}``.

    Pairs share a random-length prefix so that every scale is probed.
    """
    rng = random.Random(seed)
    free = [j for j in range(1, depth + 1) if t.contains(j)]
    worst, worst_pair, ok, valid_ok = 0.0, None, True, True
    for _ in range(pairs):
        x = [0] * depth
        for j in free:
            x[j - 1] = rng.randrange(2)
        z = list(x)
        cut = rng.randrange(len(free)) if free else 0
        for j in free[cut:]:
            z[j - 1] = rng.randrange(2)
        if x == z:
            continue
        xv, zv = digits_value(x), digits_value(z)
        fx, fz = holder_map_eval(p, q, x), holder_map_eval(p, q, z)
        if not holder_bound_holds(p, q, fx, fz, xv, zv):
            ok = False
        if not holder_valid_bound_holds(p, q, fx, fz, xv, zv):
            valid_ok = False
        ratio = float(abs(fx - fz)) / float(abs(xv - zv)) ** (p / q)
        if ratio > worst:
            worst, worst_pair = ratio, (x, z)
    return {"max_ratio": worst, "bound": 2 ** (p * (q - p) / q), "within_bound": ok,
            "valid_constant": holder_valid_constant(p, q), "within_valid_constant": valid_ok,
            "pairs": pairs, "worst_pair": worst_pair}


# -- admissible functions and the rdim/pdim separating set -----------------------


class AdmissibleFunction:
    """``Phi`` on ``(0, 1]`` with ``0 < Phi(d) <= d`` and ``Phi(d)/d -> 0``."""

    kind = "abstract"

    def __call__(self, delta: Fraction) -> Fraction:
        raise NotImplementedError

    def neg_log2_floor(self, e: int) -> int:
        """``floor(-log2 Phi(2^-e))``."""
        return floor_log2(1 / self(Fraction(1, 2**e)))

    def check(self, delta: Fraction) -> None:
        v = self(delta)
        if not 0 < v <= delta:
            raise ValueError(f"Phi({fmt_fraction(delta)}) = {fmt_fraction(v)} violates 0 < Phi(d) <= d")

    def to_json(self) -> dict:
        raise NotImplementedError


class PowerPhi(AdmissibleFunction):
    """``Phi(d) = d^a`` for an integer ``a >= 2``."""

    kind = "power"

    def __init__(self, a: int = 2):
        if int(a) != a or a < 2:
            raise ValueError("power must be an integer >= 2")
        self.a = int(a)

    def __call__(self, delta):
        return as_fraction(delta) ** self.a

    def neg_log2_floor(self, e: int) -> int:
        return self.a * e

    def to_json(self) -> dict:
        return {"kind": self.kind, "a": self.a}


class CallablePhi(AdmissibleFunction):
    kind = "callable"

    def __init__(self, fn: Callable[[Fraction], Fraction]):
        self.fn = fn

    def __call__(self, delta):
        return as_fraction(self.fn(as_fraction(delta)))


def admissible_from_json(obj: dict) -> AdmissibleFunction:
    if obj["kind"] == "power":
        return PowerPhi(obj["a"])
    raise ValueError(f"unknown admissible function {obj['kind']!r}")


def first_m(phi_fn: AdmissibleFunction, e: int) -> int:
    """Least ``m`` with ``2^-m < Phi(2^-e)``."""
    if not isinstance(phi_fn, PowerPhi):
        phi_fn.check(Fraction(1, 2**e))
    # 2^-m < v  <=>  m > -log2 v  <=>  m = floor(-log2 v) + 1
    return phi_fn.neg_log2_floor(e) + 1


@dataclass
class RdimNotPdimLedger:
    n: int
    phi_fn: AdmissibleFunction
    n_seq: list = field(default_factory=list)   # n_1, n_2, ...
    m_seq: list = field(default_factory=list)   # m_1, m_2, ...
    l_seq: list = field(default_factory=list)   # l_1, l_2, ...
    q_seq: list = field(default_factory=list)   # Q_{q_k} as (level, path)
    j_seq: list = field(default_factory=list)   # path of the distinguished n_k-cube

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "phi": self.phi_fn.to_json(),
            "n_k": self.n_seq,
            "m_k": self.m_seq,
            "l_k": [str(x) if x.bit_length() > 53 else x for x in self.l_seq],
            "q_k": [{"level": lv, "path": "".join(map(str, p))} for lv, p in self.q_seq],
            "j_k": ["".join(map(str, p)) if len(p) <= 64 else
                    "".join(map(str, p[:32])) + f"...({len(p)} digits, zeros after prefix)" for p in self.j_seq],
        }


class RdimNotPdimTree(TreeSet):
    """The nested cube unions ``C_k``.

    At stage ``k`` every selected level-``n_k`` cube except the distinguished
    one continues along its first (lexicographic) subcube down to level
    ``n_{k+1}``; the distinguished cube keeps all subcubes down to level
    ``m_k`` and then continues along the first subcube of each.
    """

    kind = "rdim_not_pdim"

    def __init__(self, phi_fn: AdmissibleFunction, n: int = 1, stages: int = 4):
        super().__init__(n, depth_limit=None)
        self.phi_fn = phi_fn
        self.ledger = RdimNotPdimLedger(n, phi_fn)
        self._last_q: Optional[tuple] = None
        self.extend(stages)

    # ledger ------------------------------------------------------------
    def extend(self, stages: int) -> None:
        led = self.ledger
        if not led.n_seq:
            led.n_seq.append(0)
            led.l_seq.append(1)
        while len(led.m_seq) < stages:
            k = len(led.m_seq) + 1
            nk = led.n_seq[k - 1]
            m = first_m(self.phi_fn, k * nk)
            if m <= nk:
                raise ValueError("Phi violates Phi(d) <= d at a queried point")
            # the distinguished cube must be known before stage k's survival rule
            qk = self._next_q()
            if qk[0] > nk:
                raise ValueError("q_k beyond level n_k")
            led.q_seq.append(qk)
            led.j_seq.append(self._first_descendant(qk[1], nk))
            led.m_seq.append(m)
            led.n_seq.append((k + 1) * m)
            led.l_seq.append(led.l_seq[-1] - 1 + 2 ** (self.n * (m - nk)))

    def _stage(self, level: int) -> int:
        led = self.ledger
        for k in range(len(led.m_seq), 0, -1):
            if led.n_seq[k - 1] <= level:
                if level >= led.n_seq[k]:
                    raise ts.DepthExceeded(f"level {level} needs more stages")
                return k
        raise ts.DepthExceeded(f"level {level} needs more stages")

    def children(self, path):
        level = len(path)
        k = self._stage(level)
        nk = self.ledger.n_seq[k - 1]
        mk = self.ledger.m_seq[k - 1]
        if level < mk and path[:nk] == self.ledger.j_seq[k - 1]:
            return tuple(range(self.branching))
        return (0,)

    def _first_descendant(self, path: tuple, level: int) -> tuple:
        p = tuple(path)
        while len(p) < level:
            p = p + (min(self.children(p)),)
        return p

    def _next_q(self) -> tuple:
        """Successor of ``Q_{q_{k-1}}`` among surviving cubes in (level, lex) order."""
        if self._last_q is None:
            self._last_q = (0, ())
            return self._last_q
        level, path = self._last_q
        nxt = self._lex_successor(path)
        if nxt is None:
            nxt = self._first_descendant((), level + 1)
            level += 1
        self._last_q = (level, nxt)
        return self._last_q

    def _lex_successor(self, path: tuple) -> Optional[tuple]:
        for cut in range(len(path) - 1, -1, -1):
            kids = sorted(self.children(path[:cut]))
            bigger = [c for c in kids if c > path[cut]]
            if bigger:
                return self._first_descendant(path[:cut] + (bigger[0],), len(path))
        return None

    def state(self, path):
        led = self.ledger
        for j in led.j_seq:
            if len(path) <= len(j) and j[: len(path)] == path:
                return path
        level = len(path)
        k = self._stage(level)
        nk, mk = led.n_seq[k - 1], led.m_seq[k - 1]
        inside = level < mk and path[:nk] == led.j_seq[k - 1]
        return ("free", level, inside)

    def survivors_closed_form(self, level: int) -> int:
        """``(l_k - 1) + 2^{n (min(level, m_k) - n_k)}`` for ``n_k <= level <= n_{k+1}``."""
        led = self.ledger
        k = self._stage(level)
        nk, mk = led.n_seq[k - 1], led.m_seq[k - 1]
        return led.l_seq[k - 1] - 1 + 2 ** (self.n * (min(level, mk) - nk))

    def survivors_at_level(self, level: int) -> int:
        return self.survivors_closed_form(level)

    def traverse_survivors(self, level: int) -> int:
        return self.count_below((), level)

    def certificate(self, k: int, s, scales: Optional[ScaleSequence] = None) -> dict:
        """Stage-``k`` cover: the distinguished cube at level ``n_k`` (``r_1``) plus
        one cube per remaining selected cube (``r_2``).

        The remaining cubes are single chains down to level ``n_{k+1}``, so any
        allowed level in ``[n_k, n_{k+1}]`` covers them; ``r_2`` uses the deepest
        one.  ``literal`` is the same sum with ``r_2 = 2^-n_k``.
        """
        s = as_fraction(s)
        led = self.ledger
        if k + 1 > len(led.n_seq):
            self.extend(k)
        nk, nk1, lk = led.n_seq[k - 1], led.n_seq[k], led.l_seq[k - 1]
        scales = scales if scales is not None else sc.all_levels()
        if nk >= 1 and not scales.is_allowed(nk):
            raise ValueError(f"level n_{k} = {nk} is not allowed by the scales")
        window = [lv for lv in scales.levels_upto(nk1) if lv >= max(nk, 1)]
        if not window:
            raise ValueError(f"no allowed level in [n_{k}, n_{k+1}]")
        r2_level = window[-1]
        best = pow2_cost(nk, s) + pow2_cost(r2_level, s, lk - 1)
        stage_bound = pow2_cost(nk, s) + pow2_cost(r2_level, s, lk)
        literal = pow2_cost(nk, s) + pow2_cost(nk, s, lk)
        return {"k": k, "r1_level": nk, "r2_level": r2_level, "cover_cost": best,
                "bound": stage_bound, "literal": literal}

    def to_json(self) -> dict:
        return {"kind": self.kind, "phi": self.phi_fn.to_json(), "n": self.n,
                "stages": len(self.ledger.m_seq)}


def rdim_not_pdim_construct(phi_fn: AdmissibleFunction, n: int = 1, depth: int = 4) -> RdimNotPdimTree:
    """Build ``depth`` stages of the ledger and the lazy tree realizing ``C_k``."""
    return RdimNotPdimTree(phi_fn, n, depth)


# -- regular covers ---------------------------------------------------------


def _log_ratio_in(k: int, l: int, lo: Fraction, hi: Fraction) -> bool:
    """``lo < log2(k)/l < hi`` decided exactly: ``k^b`` versus ``2^(l a)``."""
    above = k ** lo.denominator > 2 ** (l * lo.numerator) if lo >= 0 else True
    below = k ** hi.denominator < 2 ** (l * hi.numerator)
    return above and below


def _local_max(K: TreeSet, l: int, depth: int) -> int:
    """Largest number of surviving level-``(m+1)l`` subcubes of a K-cube at level ``ml``."""
    best = 0
    for m in range(0, max(1, depth // l + 1)):
        for p in _states_at(K, m * l):
            best = max(best, K.count_below(p, l))
    return best


def _states_at(K: TreeSet, level: int) -> list[tuple]:
    reps = {(): None}
    for _ in range(level):
        nxt = {}
        for p in reps:
            for c in K.children(p):
                child = p + (c,)
                nxt.setdefault((K.state(child), len(child)), child)
        reps = {v: None for v in nxt.values()}
    return list(reps)


class RegularCoverTree(TreeSet):
    """``L``: every selected level-``ml`` cube has exactly ``k`` selected
    level-``(m+1)l`` subcubes, those meeting ``K`` first, then the
    lexicographically smallest others."""

    kind = "regular_cover"

    def __init__(self, K: TreeSet, k: int, l: int, spec: Optional[dict] = None):
        super().__init__(K.n, depth_limit=None)
        self.K, self.k, self.l = K, k, l
        self.spec = spec
        self._sel: dict = {}

    def _suffixes(self, root: tuple) -> list[tuple]:
        hit = self._sel.get(root)
        if hit is not None:
            return hit
        b, l, k = self.branching, self.l, self.k
        chosen = []
        if self.K.survives(root):
            chosen = list(self.K.paths_at_level(len(root) + l, root))
            chosen = [p[len(root):] for p in chosen]
            if len(chosen) > k:
                raise ValueError(f"K has {len(chosen)} > k = {k} subcubes below {root}")
        taken = set(chosen)
        idx = 0
        while len(chosen) < k:
            digits = []
            v = idx
            for _ in range(l):
                digits.append(v % b)
                v //= b
            cand = tuple(reversed(digits))
            if cand not in taken:
                chosen.append(cand)
                taken.add(cand)
            idx += 1
        chosen.sort()
        if len(self._sel) < 100_000:
            self._sel[root] = chosen
        return chosen

    def children(self, path):
        cut = (len(path) // self.l) * self.l
        root, rel = path[:cut], path[cut:]
        return tuple(sorted({s[len(rel)] for s in self._suffixes(root) if s[: len(rel)] == rel}))

    def state(self, path):
        cut = (len(path) // self.l) * self.l
        root = path[:cut]
        if not self.K.survives(root):
            return ("pad", len(path) % self.l, path[cut:])
        return path

    def survivors_at_level(self, level: int) -> int:
        if level % self.l == 0:
            return self.k ** (level // self.l)
        return super().survivors_at_level(level)

    def to_json(self) -> dict:
        if self.spec is None:
            raise NotImplementedError
        return dict(self.spec)


def regular_cover(K: TreeSet, t, adim_bound, depth: int = 18, max_l: int = 64):
    """Choose ``k, l`` with ``adim_bound < log2(k)/l < t`` (smallest ``l``, then ``k``)
    such that ``K`` never has more than ``k`` subcubes per ``l`` levels up to
    ``depth``, and build ``L``.  Returns ``(L, s)`` with ``s = log2(k)/l`` given
    as the pair ``(k, l)`` inside ``L``.
    """
    t, bound = as_fraction(t), as_fraction(adim_bound)
    if not t > bound:
        raise ValueError(f"need adim bound < t (got {fmt_fraction(bound)} >= {fmt_fraction(t)})")
    if t > K.n:
        raise ValueError("t cannot exceed the ambient dimension")
    for l in range(1, max_l + 1):
        need = None
        for k in range(1, 2 ** (K.n * l) + 1):
            if not _log_ratio_in(k, l, bound, t):
                continue
            if need is None:
                need = _local_max(K, l, depth)
            if k >= need:
                spec = None
                try:
                    spec = {"kind": "regular_cover", "K": K.to_json(), "t": fmt_fraction(t),
                            "bound": fmt_fraction(bound), "depth": depth}
                except NotImplementedError:
                    pass
                return RegularCoverTree(K, k, l, spec), (k, l)
    raise ValueError("no (k, l) found within the search range")


def regular_exponent(k: int, l: int) -> float:
    from math import log2

    return log2(k) / l


# -- ball packing -------------------------------------------------------------


def ball_packing_count(delta, eps, n: int) -> int:
    """``ceil((delta / (4 eps))^n)`` disjoint closed eps-balls in an open delta-ball."""
    delta, eps = as_fraction(delta), as_fraction(eps)
    if delta <= 0 or eps <= 0:
        raise ValueError("diameters must be positive")
    if eps > delta / 2:
        raise ValueError("need 0 < eps <= delta/2")
    if n < 1:
        raise ValueError("n must be >= 1")
    return ceil((delta / (4 * eps)) ** n)


# -- JSON registration ------------------------------------------------------

ds.register("zero_one")(lambda o: _zero_one(int(o["i"])))
ds.register("prime_factorial")(lambda o: _prime_factorial(int(o["i"])))
ds.register("guard")(lambda o: GuardBlocks(int(o["i"])))
ds.register("holder")(lambda o: HolderSet(ds.from_json(o["K"]), sc.from_json(o["scales"])))
ds.register_family("zero_one")(lambda o: ZeroOneFamily())
ds.register_family("prime_factorial")(lambda o: PrimeFactorialFamily())
ts.register("rdim_not_pdim")(
    lambda o: RdimNotPdimTree(admissible_from_json(o["phi"]), o.get("n", 1), o.get("stages", 4))
)


@ts.register("regular_cover")
def _regular_from_json(o):
    L, _ = regular_cover(ts.from_json(o["K"]), Fraction(o["t"]), Fraction(o["bound"]), o.get("depth", 18))
    return L
