"""Exact symbolic subsets of the positive integers.

Every digit set exposes a lazy *segment stream*: a partition of ``[1, inf)``
into consecutive intervals ``[lo, hi]`` (``hi`` may be ``None`` for the last,
unbounded one), each carrying a periodic membership pattern
``x % mod in res``.  Gaps are segments with an empty residue set.  Counting,
boolean combination, images under ``phi_{p,q}`` and searching for indices
with a prescribed density all reduce to arithmetic on segments, so blocks
with factorial endpoints are never enumerated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import islice
from math import gcd
from typing import Callable, Iterable, Iterator, NamedTuple, Optional, Sequence

from ._exact import as_fraction, fmt_fraction

MAX_MODULUS = 10**6
SEARCH_BIT_CAP = 4096


class Segment(NamedTuple):
    lo: int
    hi: Optional[int]  # None = unbounded
    mod: int
    res: frozenset

    def count_upto(self, x: int) -> int:
        """Members in ``[lo, min(x, hi)]``."""
        top = x if self.hi is None else min(x, self.hi)
        return residue_count(self.lo, top, self.mod, self.res)

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.res), self.mod)

    def __contains__(self, x: int) -> bool:
        return self.lo <= x and (self.hi is None or x <= self.hi) and x % self.mod in self.res


def residue_count(lo: int, hi: int, mod: int, res: Iterable[int]) -> int:
    """``#{x in [lo, hi] : x % mod in res}``."""
    if hi < lo:
        return 0
    if mod == 1:
        return (hi - lo + 1) if res else 0
    return sum((hi - r) // mod - (lo - 1 - r) // mod for r in res)


@lru_cache(maxsize=4096)
def _lift(mod: int, res: frozenset, new_mod: int) -> frozenset:
    return frozenset(x for x in range(new_mod) if x % mod in res)


@lru_cache(maxsize=4096)
def normalize_pattern(mod: int, res: frozenset) -> tuple[int, frozenset]:
    """Smallest period representing the same residue pattern."""
    if not res:
        return 1, frozenset()
    if len(res) == mod:
        return 1, frozenset({0})
    for d in range(1, mod):
        if mod % d:
            continue
        small = frozenset(r % d for r in res)
        if len(small) * (mod // d) == len(res) and _lift(d, small, mod) == res:
            return d, small
    return mod, res


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@dataclass(frozen=True)
class DensityValue:
    value: Fraction
    k: int

    def __float__(self) -> float:
        return float(self.value)


class DigitSet:
    """Base class; subclasses provide ``segments()``."""

    kind = "abstract"

    def segments(self) -> Iterator[Segment]:
        raise NotImplementedError

    # -- queries --------------------------------------------------------
    def contains(self, i: int) -> bool:
        for seg in self.segments():
            if seg.hi is None or i <= seg.hi:
                return i >= seg.lo and i % seg.mod in seg.res
        return False

    def __contains__(self, i: int) -> bool:
        return self.contains(i)

    def count(self, k: int) -> int:
        """``#(S & {1..k})``."""
        if k < 1:
            return 0
        total = 0
        for seg in self.segments():
            if seg.lo > k:
                break
            total += seg.count_upto(k)
            if seg.hi is None or seg.hi >= k:
                break
        return total

    def density(self, k: int) -> DensityValue:
        if k < 1:
            raise ValueError("k must be >= 1")
        return DensityValue(Fraction(self.count(k), k), k)

    def members(self, k: int) -> list[int]:
        """Explicit members up to ``k`` (small ``k`` only)."""
        out = []
        for seg in self.segments_upto(k):
            top = k if seg.hi is None else min(k, seg.hi)
            if seg.res:
                out.extend(x for x in range(seg.lo, top + 1) if x % seg.mod in seg.res)
        return out

    def segments_upto(self, k: int) -> Iterator[Segment]:
        for seg in self.segments():
            if seg.lo > k:
                return
            yield seg

    def pieces_upto(self, k: int) -> list[Segment]:
        """Nonempty segments meeting ``[1, k]``, clipped to ``k`` (APBlock form)."""
        out = []
        for seg in self.segments_upto(k):
            hi = k if seg.hi is None else min(seg.hi, k)
            if seg.res and residue_count(seg.lo, hi, seg.mod, seg.res):
                out.append(Segment(seg.lo, hi, seg.mod, seg.res))
        return out

    def first_index_within(self, after: int, alpha, tol, max_bits: int = SEARCH_BIT_CAP) -> int:
        """Smallest ``n > after`` with ``|count(n)/n - alpha| < tol``.

        Within one segment, along each residue class mod ``seg.mod`` the count
        is affine in the step number, so the condition reduces to two linear
        inequalities solved exactly.  Infinite block families are searched up
        to ``2^max_bits``; past that a ValueError is raised.
        """
        alpha, tol = as_fraction(alpha), as_fraction(tol)
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        before = 0  # count(seg.lo - 1)
        for seg in self.segments():
            if seg.lo.bit_length() > max_bits:
                raise ValueError(f"no index below 2^{max_bits} attains the requested density window")
            if seg.hi is not None and seg.hi <= after:
                before += seg.count_upto(seg.hi)
                continue
            start = max(seg.lo, after + 1)
            best = None
            for u in range(seg.mod):
                x0 = start + u
                if seg.hi is not None and x0 > seg.hi:
                    break
                c = before + residue_count(seg.lo, x0, seg.mod, seg.res)
                t = _first_t(c, x0, seg.mod, len(seg.res), alpha, tol, seg.hi)
                if t is not None:
                    x = x0 + t * seg.mod
                    if best is None or x < best:
                        best = x
            if best is not None:
                return best
            if seg.hi is None:
                raise ValueError("no index attains the requested density window")
            before += seg.count_upto(seg.hi)
        raise ValueError("segment stream ended")

    def next_member(self, after: int) -> Optional[int]:
        """Smallest member ``> after``, or None when there is none."""
        for seg in self.segments():
            if seg.hi is not None and seg.hi <= after:
                continue
            if seg.res:
                start = max(seg.lo, after + 1)
                base = start - start % seg.mod
                cands = [base + r if base + r >= start else base + r + seg.mod for r in seg.res]
                x = min(cands)
                if seg.hi is None or x <= seg.hi:
                    return x
            if seg.hi is None:
                return None
        return None

    def drdim_rule(self, scales):
        """Certified ``liminf_k M_S(n_k)`` for special (set, scales) pairs, else None."""
        return None

    # -- structure ------------------------------------------------------
    def eventually_periodic(self) -> bool:
        return False

    def tail_segment(self) -> Optional[Segment]:
        """The unbounded final segment, for eventually periodic sets."""
        if not self.eventually_periodic():
            return None
        for seg in self.segments():
            if seg.hi is None:
                return seg
        return None

    def limits(self) -> Optional[tuple[Fraction, Fraction]]:
        """Exact ``(liminf, limsup)`` of ``M_S(k)`` when certified by the rule."""
        tail = self.tail_segment()
        if tail is not None:
            return tail.density, tail.density
        return None

    def to_json(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no JSON form")

    def __repr__(self) -> str:
        try:
            return f"{type(self).__name__}({self.to_json()})"
        except NotImplementedError:
            return f"{type(self).__name__}(...)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DigitSet):
            return NotImplemented
        if self is other:
            return True
        try:
            return self.to_json() == other.to_json()
        except NotImplementedError:
            return False

    def __hash__(self) -> int:
        try:
            return hash(json.dumps(self.to_json(), sort_keys=True))
        except NotImplementedError:
            return id(self)

    # -- combinators ----------------------------------------------------
    def __or__(self, other: "DigitSet") -> "DigitSet":
        return combine("union", [self, other])

    def __and__(self, other: "DigitSet") -> "DigitSet":
        return combine("intersection", [self, other])

    def __invert__(self) -> "DigitSet":
        return combine("complement", [self])


def _first_t(c, x0, mod, r, alpha, tol, hi) -> Optional[int]:
    # count(x0 + t*mod) = c + t*r ; need |(c + t r)/(x0 + t mod) - alpha| < tol
    lo_t, hi_t = 0, None
    if hi is not None:
        hi_t = (hi - x0) // mod
    for a, b in (
        (c - (alpha - tol) * x0, r - (alpha - tol) * mod),
        ((alpha + tol) * x0 - c, (alpha + tol) * mod - r),
    ):
        # integers t >= 0 with a + b t > 0
        if b > 0:
            lo_t = max(lo_t, _floor(-a / b) + 1)
        elif b == 0:
            if a <= 0:
                return None
        else:
            cap = _ceil(a / -b) - 1
            hi_t = cap if hi_t is None else min(hi_t, cap)
    if hi_t is not None and lo_t > hi_t:
        return None
    return lo_t


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


# -- concrete rules -------------------------------------------------------


class Finite(DigitSet):
    kind = "finite"

    def __init__(self, elements: Iterable[int] = ()):
        els = sorted(set(int(x) for x in elements))
        if els and els[0] < 1:
            raise ValueError("digit sets live in the positive integers")
        self.elements = tuple(els)

    def segments(self) -> Iterator[Segment]:
        pos = 1
        i = 0
        els = self.elements
        while i < len(els):
            j = i
            while j + 1 < len(els) and els[j + 1] == els[j] + 1:
                j += 1
            if els[i] > pos:
                yield Segment(pos, els[i] - 1, 1, frozenset())
            yield Segment(els[i], els[j], 1, frozenset({0}))
            pos = els[j] + 1
            i = j + 1
        yield Segment(pos, None, 1, frozenset())

    def contains(self, i: int) -> bool:
        return i in set(self.elements)

    def eventually_periodic(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"kind": self.kind, "elements": list(self.elements)}


def empty() -> Finite:
    return Finite(())


class EventuallyPeriodic(DigitSet):
    """``{i >= threshold : i % modulus in residues}``."""

    kind = "periodic"

    def __init__(self, threshold: int, modulus: int, residues: Iterable[int]):
        if modulus < 1 or modulus > MAX_MODULUS:
            raise ValueError("modulus out of range")
        self.threshold = max(1, int(threshold))
        self.modulus = int(modulus)
        self.residues = frozenset(int(r) % self.modulus for r in residues)

    def segments(self) -> Iterator[Segment]:
        if self.threshold > 1:
            yield Segment(1, self.threshold - 1, 1, frozenset())
        mod, res = normalize_pattern(self.modulus, self.residues)
        yield Segment(self.threshold, None, mod, res)

    def contains(self, i: int) -> bool:
        return i >= self.threshold and i % self.modulus in self.residues

    def count(self, k: int) -> int:
        return residue_count(self.threshold, k, self.modulus, self.residues)

    def eventually_periodic(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "threshold": self.threshold,
            "modulus": self.modulus,
            "residues": sorted(self.residues),
        }


def evens() -> EventuallyPeriodic:
    return EventuallyPeriodic(1, 2, {0})


def odds() -> EventuallyPeriodic:
    return EventuallyPeriodic(1, 2, {1})


def naturals() -> EventuallyPeriodic:
    return EventuallyPeriodic(1, 1, {0})


def multiples(m: int) -> EventuallyPeriodic:
    return EventuallyPeriodic(1, m, {0})


class APBlock(DigitSet):
    """Finite list of residue-restricted intervals ``(lo, hi, mod, residues)``."""

    kind = "apblock"

    def __init__(self, pieces: Iterable[tuple]):
        segs = []
        for lo, hi, mod, res in pieces:
            mod, resn = normalize_pattern(int(mod), frozenset(int(r) % int(mod) for r in res))
            segs.append(Segment(int(lo), None if hi is None else int(hi), mod, resn))
        segs.sort(key=lambda s: s.lo)
        for a, b in zip(segs, segs[1:]):
            if a.hi is None or a.hi >= b.lo:
                raise ValueError("APBlock pieces must be disjoint")
        if segs and segs[0].lo < 1:
            raise ValueError("pieces must lie in the positive integers")
        self.pieces = tuple(segs)

    def segments(self) -> Iterator[Segment]:
        pos = 1
        for seg in self.pieces:
            if seg.lo > pos:
                yield Segment(pos, seg.lo - 1, 1, frozenset())
            yield seg
            if seg.hi is None:
                return
            pos = seg.hi + 1
        yield Segment(pos, None, 1, frozenset())

    def eventually_periodic(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "pieces": [[s.lo, s.hi, s.mod, sorted(s.res)] for s in self.pieces],
        }


class BlockFamily(DigitSet):
    """Union of integer intervals ``[a_j, b_j]`` with ``b_j < a_{j+1}``.

    Subclasses implement ``_block(j)`` returning ``(a_j, b_j)`` or ``None``
    once a finite family is exhausted.
    """

    kind = "blocks"

    def __init__(self) -> None:
        self._blocks: list[tuple[int, int]] = []
        self._done = False

    def _block(self, j: int) -> Optional[tuple[int, int]]:
        raise NotImplementedError

    def block(self, j: int) -> Optional[tuple[int, int]]:
        while len(self._blocks) < j and not self._done:
            nxt = self._block(len(self._blocks) + 1)
            if nxt is None:
                self._done = True
                break
            a, b = int(nxt[0]), int(nxt[1])
            if a < 1 or b < a:
                raise ValueError(f"block {len(self._blocks) + 1} = {nxt} is malformed")
            if self._blocks and a <= self._blocks[-1][1]:
                raise ValueError("blocks must be strictly separated (b_j < a_{j+1})")
            self._blocks.append((a, b))
        return self._blocks[j - 1] if j <= len(self._blocks) else None

    def blocks_upto(self, k: int) -> list[tuple[int, int]]:
        out = []
        j = 1
        while True:
            blk = self.block(j)
            if blk is None or blk[0] > k:
                return out
            out.append(blk)
            j += 1

    def segments(self) -> Iterator[Segment]:
        pos = 1
        j = 1
        while True:
            blk = self.block(j)
            if blk is None:
                yield Segment(pos, None, 1, frozenset())
                return
            a, b = blk
            if a > pos:
                yield Segment(pos, a - 1, 1, frozenset())
            yield Segment(a, b, 1, frozenset({0}))
            pos = b + 1
            j += 1

    def contains(self, i: int) -> bool:
        j = 1
        while True:
            blk = self.block(j)
            if blk is None or blk[0] > i:
                return False
            if i <= blk[1]:
                return True
            j += 1

    def count(self, k: int) -> int:
        total = 0
        j = 1
        while True:
            blk = self.block(j)
            if blk is None or blk[0] > k:
                return total
            total += min(blk[1], k) - blk[0] + 1
            j += 1

    # Density falls between blocks and rises inside them, so the extremes of
    # M_S sit at a_j - 1 and b_j.  Subclasses whose ``limits`` come from these
    # event sequences set this flag.
    events_certified = False


class ExplicitBlocks(BlockFamily):
    kind = "explicit_blocks"

    def __init__(self, blocks: Sequence[tuple[int, int]]):
        super().__init__()
        self.spec_blocks = tuple((int(a), int(b)) for a, b in blocks)
        for j in range(1, len(self.spec_blocks) + 1):
            self.block(j)

    def _block(self, j):
        return self.spec_blocks[j - 1] if j <= len(self.spec_blocks) else None

    def eventually_periodic(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"kind": self.kind, "blocks": [list(b) for b in self.spec_blocks]}


class CallableBlocks(BlockFamily):
    """Block family from an arbitrary generator ``j -> (a_j, b_j)`` (no JSON form)."""

    kind = "callable_blocks"

    def __init__(self, generator: Callable[[int], Optional[tuple[int, int]]]):
        super().__init__()
        self.generator = generator

    def _block(self, j):
        return self.generator(j)


class GeometricBlocks(BlockFamily):
    """Blocks ``[u*base^j, v*base^j]`` for ``j >= start``; requires ``u < v < u*base``.

    Between blocks the density strictly decreases and inside a block it
    strictly increases, so the extremes of ``M_S`` are attained at ``a_j - 1``
    and ``b_j``; both event sequences converge, giving exact limits

        liminf = (v - u) / (u (base - 1)),   limsup = (v - u) base / (v (base - 1)).
    """

    kind = "geometric_blocks"
    events_certified = True

    def __init__(self, u: int = 1, v: int = 2, base: int = 4, start: int = 1):
        super().__init__()
        if not (1 <= u < v < u * base) or base < 2 or start < 0:
            raise ValueError("need 1 <= u < v < u*base, base >= 2")
        self.u, self.v, self.base, self.start = int(u), int(v), int(base), int(start)

    def _block(self, j):
        e = self.start + j - 1
        return self.u * self.base**e, self.v * self.base**e

    def limits(self) -> tuple[Fraction, Fraction]:
        u, v, R = self.u, self.v, self.base
        return Fraction(v - u, u * (R - 1)), Fraction((v - u) * R, v * (R - 1))

    def to_json(self) -> dict:
        return {"kind": self.kind, "u": self.u, "v": self.v, "base": self.base, "start": self.start}


class RatioBlocks(BlockFamily):
    """Blocks ``[a_j, ratio * a_j]`` whose starts grow super-exponentially.

    Subclasses certify ``a_{j+1} / a_j -> inf``; then earlier blocks are
    negligible, the density at ``a_j - 1`` tends to 0 and at ``b_j`` to
    ``1 - 1/ratio``.
    """

    ratio: int = 1
    events_certified = True
    superexponential = True

    def _start(self, j: int) -> int:
        raise NotImplementedError

    def _block(self, j):
        a = self._start(j)
        return a, self.ratio * a

    def limits(self) -> tuple[Fraction, Fraction]:
        return Fraction(0), 1 - Fraction(1, self.ratio)


def combine(op: str, args: Sequence[DigitSet]) -> DigitSet:
    """Union, intersection or complement of digit sets, with exact counting."""
    if op not in ("union", "intersection", "complement"):
        raise ValueError(f"unknown combinator {op!r}")
    args = list(args)
    if op == "complement":
        if len(args) != 1:
            raise ValueError("complement takes exactly one argument")
    elif not args:
        raise ValueError(f"{op} needs at least one argument")
    return Combined(op, args)


class Combined(DigitSet):
    kind = "combine"

    def __init__(self, op: str, args: Sequence[DigitSet]):
        self.op = op
        self.args = tuple(args)

    def segments(self) -> Iterator[Segment]:
        if self.op == "complement":
            for seg in self.args[0].segments():
                mod, res = normalize_pattern(seg.mod, frozenset(range(seg.mod)) - seg.res)
                yield Segment(seg.lo, seg.hi, mod, res)
            return
        stream = self.args[0].segments()
        for other in self.args[1:]:
            stream = _merge(stream, other.segments(), self.op)
        yield from stream

    def contains(self, i: int) -> bool:
        if self.op == "complement":
            return not self.args[0].contains(i)
        if self.op == "union":
            return any(a.contains(i) for a in self.args)
        return all(a.contains(i) for a in self.args)

    def count(self, k: int) -> int:
        if self.op == "complement":
            return max(k, 0) - self.args[0].count(k)
        return super().count(k)

    def eventually_periodic(self) -> bool:
        return all(a.eventually_periodic() for a in self.args)

    def limits(self):
        if self.op == "complement":
            inner = self.args[0].limits()
            if inner is None:
                return None
            lo, hi = inner
            return 1 - hi, 1 - lo
        mixed = self._periodic_with_blocks()
        if mixed is not None:
            rho, (lo, hi) = mixed
            if self.op == "union":
                return rho + (1 - rho) * lo, rho + (1 - rho) * hi
            return rho * lo, rho * hi
        return super().limits()

    def _periodic_with_blocks(self):
        # A periodic pattern of density rho meets o(k) block boundaries below
        # k, so M = rho + (1 - rho) M_B + o(1) for unions and rho M_B + o(1)
        # for intersections; both maps are monotone in M_B.
        if len(self.args) != 2:
            return None
        for per, blk in (self.args, self.args[::-1]):
            tail = per.tail_segment()
            if tail is None or not isinstance(blk, BlockFamily) or not blk.events_certified:
                continue
            lims = blk.limits()
            if lims is not None:
                return tail.density, lims
        return None

    def to_json(self) -> dict:
        return {"kind": self.kind, "op": self.op, "args": [a.to_json() for a in self.args]}


def _merge(a: Iterator[Segment], b: Iterator[Segment], op: str) -> Iterator[Segment]:
    sa, sb = next(a), next(b)
    pos = 1
    while True:
        ends = [h for h in (sa.hi, sb.hi) if h is not None]
        hi = min(ends) if ends else None
        mod = _lcm(sa.mod, sb.mod)
        if mod > MAX_MODULUS:
            raise ValueError("combined modulus too large")
        ra, rb = _lift(sa.mod, sa.res, mod), _lift(sb.mod, sb.res, mod)
        res = ra | rb if op == "union" else ra & rb
        mod, res = normalize_pattern(mod, res)
        yield Segment(pos, hi, mod, res)
        if hi is None:
            return
        pos = hi + 1
        if sa.hi == hi:
            sa = next(a)
        if sb.hi == hi:
            sb = next(b)


# -- phi_{p,q} --------------------------------------------------------------


def phi(i: int, p: int, q: int) -> int:
    """``phi_{p,q}(k p - m) = k q - m`` for ``0 <= m <= p-1``; ``phi(0) = 0``."""
    k = -((-i) // p)
    return i + (q - p) * k


def phi_preimage_count(x: int, p: int, q: int) -> int:
    """``#{i >= 1 : phi(i) <= x}``."""
    if x < 1:
        return 0
    k, rem = divmod(x, q)
    return k * p + max(0, rem - (q - p))


def phi_inverse(x: int, p: int, q: int) -> Optional[int]:
    k = -((-x) // q)
    m = k * q - x
    if m > p - 1:
        return None
    return k * p - m


class PhiImage(DigitSet):
    """``phi_{p,q}(S)``; each segment of ``S`` maps to one residue-pattern segment."""

    kind = "phi_image"

    def __init__(self, base: DigitSet, p: int, q: int):
        if not (1 <= p < q):
            raise ValueError("phi_{p,q} needs positive integers p < q")
        self.base, self.p, self.q = base, int(p), int(q)

    def segments(self) -> Iterator[Segment]:
        p, q = self.p, self.q
        for seg in self.base.segments():
            lo = phi(seg.lo - 1, p, q) + 1
            hi = None if seg.hi is None else phi(seg.hi, p, q)
            if not seg.res:
                yield Segment(lo, hi, 1, frozenset())
                continue
            period = _lcm(seg.mod, p)
            img_mod = period * q // p
            if img_mod > MAX_MODULUS:
                raise ValueError("image modulus too large")
            res = frozenset(
                phi(i, p, q) % img_mod
                for i in range(seg.lo, seg.lo + period)
                if i % seg.mod in seg.res
            )
            mod, res = normalize_pattern(img_mod, res)
            yield Segment(lo, hi, mod, res)

    def contains(self, x: int) -> bool:
        i = phi_inverse(x, self.p, self.q)
        return i is not None and self.base.contains(i)

    def count(self, k: int) -> int:
        return self.base.count(phi_preimage_count(k, self.p, self.q))

    def eventually_periodic(self) -> bool:
        return self.base.eventually_periodic()

    def limits(self):
        inner = self.base.limits()
        if inner is None:
            return None
        r = Fraction(self.p, self.q)
        return r * inner[0], r * inner[1]

    def to_json(self) -> dict:
        return {"kind": self.kind, "base": self.base.to_json(), "p": self.p, "q": self.q}


def phi_image(s: DigitSet, p: int, q: int) -> DigitSet:
    """``T = phi_{p,q}(S)``; finite inputs come back as an explicit APBlock."""
    if p >= q or p < 1:
        raise ValueError("phi_{p,q} needs 1 <= p < q")
    img = PhiImage(s, p, q)
    if isinstance(s, (Finite, APBlock, ExplicitBlocks)) and not _has_unbounded_members(s):
        last = 0
        for seg in s.segments():
            if seg.hi is None:
                break
            last = seg.hi
        return APBlock([_tighten(seg) for seg in img.pieces_upto(phi(last, p, q))])
    return img


def _tighten(seg: Segment) -> tuple:
    """Shrink a bounded segment to ``[first member, last member]``."""
    lo = next(x for x in range(seg.lo, seg.lo + seg.mod) if x % seg.mod in seg.res)
    hi = next(x for x in range(seg.hi, seg.hi - seg.mod, -1) if x % seg.mod in seg.res)
    return lo, hi, seg.mod, seg.res


def _has_unbounded_members(s: DigitSet) -> bool:
    for seg in s.segments():
        if seg.hi is None:
            return bool(seg.res)
    return False


# -- families -------------------------------------------------------------


class DigitSetFamily:
    """Lazily indexed sequence ``S_1, S_2, ...`` (possibly finite)."""

    kind = "abstract_family"
    length: Optional[int] = None

    def member(self, i: int) -> DigitSet:
        raise NotImplementedError

    def members(self, count: int) -> list[DigitSet]:
        n = count if self.length is None else min(count, self.length)
        return [self.member(i) for i in range(1, n + 1)]

    def tail_envelope(self, first: int, scales) -> Optional[Fraction]:
        """Upper bound on ``sup_{i >= first} liminf_k M_{S_i}(n_k)``, if certified."""
        if self.length is not None and first > self.length:
            return Fraction(0)
        return None

    def to_json(self) -> dict:
        raise NotImplementedError


class ListFamily(DigitSetFamily):
    kind = "list"

    def __init__(self, sets: Sequence[DigitSet]):
        self.sets = tuple(sets)
        self.length = len(self.sets)

    def member(self, i: int) -> DigitSet:
        if not 1 <= i <= self.length:
            raise IndexError(i)
        return self.sets[i - 1]

    def to_json(self) -> dict:
        return {"kind": self.kind, "sets": [s.to_json() for s in self.sets]}


class ConstantFamily(DigitSetFamily):
    """``S_i = S`` for every ``i``."""

    kind = "constant"

    def __init__(self, s: DigitSet):
        self.s = s

    def member(self, i: int) -> DigitSet:
        return self.s

    def tail_envelope(self, first, scales):
        from .dimcalc import drdim_AS

        b = drdim_AS(self.s, scales)
        return b if b.exact else None

    def to_json(self) -> dict:
        return {"kind": self.kind, "set": self.s.to_json()}


def as_family(s_list) -> DigitSetFamily:
    if isinstance(s_list, DigitSetFamily):
        return s_list
    return ListFamily(list(s_list))


# -- JSON -------------------------------------------------------------------

_DECODERS: dict[str, Callable[[dict], DigitSet]] = {}


def register(kind: str):
    def deco(fn):
        _DECODERS[kind] = fn
        return fn

    return deco


register("finite")(lambda o: Finite(o["elements"]))
register("periodic")(lambda o: EventuallyPeriodic(o["threshold"], o["modulus"], o["residues"]))
register("apblock")(lambda o: APBlock([tuple(p) for p in o["pieces"]]))
register("explicit_blocks")(lambda o: ExplicitBlocks([tuple(b) for b in o["blocks"]]))
register("geometric_blocks")(lambda o: GeometricBlocks(o["u"], o["v"], o["base"], o.get("start", 1)))
register("combine")(lambda o: Combined(o["op"], [from_json(a) for a in o["args"]]))
register("phi_image")(lambda o: PhiImage(from_json(o["base"]), o["p"], o["q"]))


def from_json(obj: dict) -> DigitSet:
    kind = obj["kind"]
    if kind not in _DECODERS:
        from . import constructions  # noqa: F401  (registers construction kinds)
    try:
        return _DECODERS[kind](obj)
    except KeyError:
        raise ValueError(f"unknown digit set kind {kind!r}") from None


_FAMILY_DECODERS: dict[str, Callable[[dict], DigitSetFamily]] = {
    "list": lambda o: ListFamily([from_json(s) for s in o["sets"]]),
    "constant": lambda o: ConstantFamily(from_json(o["set"])),
}


def register_family(kind: str):
    def deco(fn):
        _FAMILY_DECODERS[kind] = fn
        return fn

    return deco


def family_from_json(obj: dict) -> DigitSetFamily:
    kind = obj["kind"]
    if kind not in _FAMILY_DECODERS:
        from . import constructions  # noqa: F401
    try:
        return _FAMILY_DECODERS[kind](obj)
    except KeyError:
        raise ValueError(f"unknown family kind {kind!r}") from None


# -- module-level operations --------------------------------------------


def count(s: DigitSet, k: int) -> int:
    return s.count(k)


def density(s: DigitSet, k: int) -> DensityValue:
    return s.density(k)


def density_trace(s: DigitSet, ks: Iterable[int]) -> list[tuple[int, int, Fraction]]:
    """Rows ``(k, count, density)``."""
    return [(k, s.count(k), Fraction(s.count(k), k)) for k in ks]


def take(it, n):
    return list(islice(it, n))
