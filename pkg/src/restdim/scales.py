"""Scale sequences: canonical forms of admissible diameter sets.

An admissible diameter set ``D`` (Sorgenfrey open in ``(0, inf)`` with
``inf D = 0``) is determined, as far as restricted dimensions go, by the
strictly increasing sequence of dyadic levels ``n_k`` whose buckets
``[2^-n, 2^-n+1)`` it meets.  Everything here works with exact integers.
"""

from __future__ import annotations

import bisect
import json
import threading
from fractions import Fraction
from math import ceil
from typing import Callable, Iterator, Optional, Sequence

from ._exact import as_fraction, fmt_fraction


class NotAdmissible(ValueError):
    """The diameter set is not in the admissible class (e.g. ``inf D > 0``)."""


class ScaleSequence:
    """Strictly increasing positive integer levels ``n_1 < n_2 < ...``.

    Subclasses implement ``_term(k)``; values are cached append-only under a
    lock so concurrent readers always see a consistent prefix.
    """

    kind = "abstract"

    def __init__(self) -> None:
        self._cache: list[int] = []
        self._lock = threading.Lock()

    def _term(self, k: int) -> int:
        raise NotImplementedError

    def _extend(self, k: int) -> None:
        with self._lock:
            while len(self._cache) < k:
                j = len(self._cache) + 1
                v = self._term(j)
                if not isinstance(v, int) or v < 1:
                    raise ValueError(f"{self.kind}: n_{j} = {v!r} is not a positive integer")
                if self._cache and v <= self._cache[-1]:
                    raise ValueError(
                        f"{self.kind}: n_{j} = {v} not greater than n_{j - 1} = {self._cache[-1]}"
                    )
                self._cache.append(v)

    def level_at(self, k: int) -> int:
        if k < 1:
            raise ValueError("k must be >= 1")
        if len(self._cache) < k:
            self._extend(k)
        return self._cache[k - 1]

    def prefix(self, count: int) -> list[int]:
        if count <= 0:
            return []
        self.level_at(count)
        return list(self._cache[:count])

    def __iter__(self) -> Iterator[int]:
        k = 1
        while True:
            yield self.level_at(k)
            k += 1

    def index_of_first_at_least(self, level: int) -> int:
        """Smallest ``k`` with ``n_k >= level``."""
        k = max(1, len(self._cache))
        while self.level_at(k) < level:
            k *= 2
        cache = self._cache
        return bisect.bisect_left(cache, level, 0, k) + 1

    def is_allowed(self, level: int) -> bool:
        if level < 1:
            return False
        k = self.index_of_first_at_least(level)
        return self.level_at(k) == level

    def levels_upto(self, max_level: int) -> list[int]:
        if max_level < 1:
            return []
        k = self.index_of_first_at_least(max_level)
        out = self.prefix(k)
        if out[-1] > max_level:
            out.pop()
        return out

    # Growth facts used by the limit analysis in ``dimcalc``.  Each returns a
    # certified eventual property of the rule or None when not known.
    def gap_bound(self) -> Optional[int]:
        """Eventual bound on ``n_{k+1} - n_k``."""
        return None

    def ratio_bound(self) -> Optional[Fraction]:
        """Eventual bound on ``n_{k+1} / n_k``."""
        gap = self.gap_bound()
        return Fraction(2) if gap is not None else None

    def superlinear(self) -> bool:
        """True when ``k / n_k -> 0`` is certified."""
        return False

    def to_json(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no JSON form")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScaleSequence):
            return NotImplemented
        try:
            return self.to_json() == other.to_json()
        except NotImplementedError:
            return self is other

    def __hash__(self) -> int:
        try:
            return hash(json.dumps(self.to_json(), sort_keys=True))
        except NotImplementedError:
            return id(self)

    def __repr__(self) -> str:
        try:
            return f"{type(self).__name__}({self.to_json()})"
        except NotImplementedError:
            return f"{type(self).__name__}(...)"


class Arithmetic(ScaleSequence):
    """``n_k = a + d*k``."""

    kind = "arithmetic"

    def __init__(self, a: int = 0, d: int = 1):
        super().__init__()
        if d < 1 or a + d < 1:
            raise ValueError("need d >= 1 and a + d >= 1")
        self.a, self.d = int(a), int(d)

    def _term(self, k: int) -> int:
        return self.a + self.d * k

    def level_at(self, k: int) -> int:
        if k < 1:
            raise ValueError("k must be >= 1")
        return self.a + self.d * k

    def is_allowed(self, level: int) -> bool:
        return level >= self.a + self.d and (level - self.a) % self.d == 0

    def index_of_first_at_least(self, level: int) -> int:
        return max(1, -((self.a - level) // self.d))

    def prefix(self, count: int) -> list[int]:
        return [self.a + self.d * k for k in range(1, count + 1)]

    def gap_bound(self) -> int:
        return self.d

    def superlinear(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"kind": self.kind, "a": self.a, "d": self.d}


def all_levels() -> Arithmetic:
    """``D = (0, inf)``: every level allowed."""
    return Arithmetic(0, 1)


class SuperGeometric(ScaleSequence):
    """``n_k = max(ceil(c * rho^k), n_{k-1} + 1)`` with rational ``c > 0``, ``rho > 1``.

    The max only matters for small ``k`` when ``c*rho^k*(rho-1) < 1``; beyond
    that point the sequence is exactly ``ceil(c*rho^k)``.
    """

    kind = "supergeometric"

    def __init__(self, c=1, rho=2):
        super().__init__()
        self.c, self.rho = as_fraction(c), as_fraction(rho)
        if self.c <= 0 or self.rho <= 1:
            raise ValueError("need c > 0 and rho > 1")

    def _term(self, k: int) -> int:
        v = ceil(self.c * self.rho**k)
        if self._cache:
            v = max(v, self._cache[-1] + 1)
        return max(v, 1)

    def ratio_bound(self) -> Fraction:
        return self.rho + 1

    def superlinear(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"kind": self.kind, "c": fmt_fraction(self.c), "rho": fmt_fraction(self.rho)}


class Concat(ScaleSequence):
    """Explicit prefix followed by a tail rule whose own index restarts at 1."""

    kind = "concat"

    def __init__(self, prefix: Sequence[int], tail: ScaleSequence):
        super().__init__()
        self.head = tuple(int(x) for x in prefix)
        self.tail = tail

    def _term(self, k: int) -> int:
        if k <= len(self.head):
            return self.head[k - 1]
        return self.tail.level_at(k - len(self.head))

    def gap_bound(self) -> Optional[int]:
        return self.tail.gap_bound()

    def ratio_bound(self) -> Optional[Fraction]:
        return self.tail.ratio_bound()

    def superlinear(self) -> bool:
        return self.tail.superlinear()

    def to_json(self) -> dict:
        return {"kind": self.kind, "prefix": list(self.head), "tail": self.tail.to_json()}


class BlockEndpoints(ScaleSequence):
    """Levels sampled from a block family: block ends ``b_j`` or ``a_j - 1``."""

    kind = "blockends"

    def __init__(self, digitset, which: str = "end"):
        super().__init__()
        if which not in ("end", "start"):
            raise ValueError("which must be 'end' or 'start'")
        if not hasattr(digitset, "block"):
            raise TypeError("block endpoints need a block-family digit set")
        self.digitset = digitset
        self.which = which
        self._j = 0

    def _term(self, k: int) -> int:
        # skip blocks starting at 1 when sampling starts (a_j - 1 must be >= 1)
        while True:
            self._j += 1
            blk = self.digitset.block(self._j)
            if blk is None:
                raise ValueError("block family is finite; endpoints exhausted")
            a, b = blk
            v = b if self.which == "end" else a - 1
            if v >= 1 and (not self._cache or v > self._cache[-1]):
                return v

    def to_json(self) -> dict:
        return {"kind": self.kind, "set": self.digitset.to_json(), "which": self.which}


def darboux_tolerance(k: int) -> Fraction:
    """Acceptance radius for the k-th term of a Darboux subsequence."""
    return Fraction(1, (k + 1) ** 2)


class DarbouxScale(ScaleSequence):
    """Greedy subsequence along which ``M_S(n_k) -> alpha``.

    ``n_k`` is the smallest index beyond ``n_{k-1}`` with
    ``|M_S(n) - alpha| < darboux_tolerance(k)``.  Validity of ``alpha``
    (inside ``[liminf, limsup]``) is checked by the builder in
    ``constructions.darboux_scale``.
    """

    kind = "darboux"

    def __init__(self, digitset, alpha):
        super().__init__()
        self.digitset = digitset
        self.alpha = as_fraction(alpha)

    def _term(self, k: int) -> int:
        after = self._cache[-1] if self._cache else 0
        return self.digitset.first_index_within(after, self.alpha, darboux_tolerance(k))

    def to_json(self) -> dict:
        return {"kind": self.kind, "set": self.digitset.to_json(), "alpha": fmt_fraction(self.alpha)}


class BucketTrace(ScaleSequence):
    """Canonical scale sequence of a rule-based Sorgenfrey union."""

    kind = "trace"

    def __init__(self, union: "SorgenfreyUnion"):
        super().__init__()
        self.union = union
        self._gen = _trace_levels(union)

    def _term(self, k: int) -> int:
        return next(self._gen)

    def to_json(self) -> dict:
        return {"kind": self.kind, "union": self.union.to_json()}


# -- Sorgenfrey unions ----------------------------------------------------


def floor_log2(x: Fraction) -> int:
    """``e`` with ``2^e <= x < 2^(e+1)``."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    e = x.numerator.bit_length() - x.denominator.bit_length()
    while Fraction(2) ** e > x:
        e -= 1
    while Fraction(2) ** (e + 1) <= x:
        e += 1
    return e


def ceil_log2(x: Fraction) -> int:
    e = floor_log2(x)
    return e if Fraction(2) ** e == x else e + 1


def bucket_of(x: Fraction) -> int:
    """Level ``l`` with ``x`` in ``[2^-l, 2^-l+1)``."""
    return -floor_log2(x)


def piece_levels(left: Fraction, length: Fraction) -> tuple[int, int]:
    """Inclusive level range met by ``[left, left + length)``."""
    left, length = as_fraction(left), as_fraction(length)
    if left <= 0 or length <= 0:
        raise ValueError("pieces need positive left endpoint and length")
    right = left + length
    lo = 1 - ceil_log2(right)
    hi = bucket_of(left)
    return lo, hi


class SorgenfreyUnion:
    """Union of half-open pieces ``[t_j, t_j + delta_j)``.

    Infinite unions are given by a rule ``j -> (t_j, delta_j)`` (``j >= 1``)
    with nonincreasing right endpoints, plus a witness map
    ``eps -> j`` returning a piece with ``t_j < eps``; the witness is what
    certifies ``inf D = 0``.  Finite unions always have positive infimum.
    """

    def __init__(
        self,
        pieces: Optional[Sequence[tuple]] = None,
        rule: Optional[Callable[[int], tuple]] = None,
        witness: Optional[Callable[[Fraction], int]] = None,
        spec: Optional[dict] = None,
    ):
        if (pieces is None) == (rule is None):
            raise ValueError("give exactly one of pieces or rule")
        self.pieces = None if pieces is None else tuple(
            (as_fraction(t), as_fraction(d)) for t, d in pieces
        )
        self.rule = rule
        self.witness = witness
        self.spec = spec

    @classmethod
    def finite(cls, pieces: Sequence[tuple]) -> "SorgenfreyUnion":
        return cls(pieces=pieces, spec={"kind": "finite", "pieces": [
            [fmt_fraction(as_fraction(t)), fmt_fraction(as_fraction(d))] for t, d in pieces
        ]})

    @classmethod
    def buckets(cls, scales: ScaleSequence) -> "SorgenfreyUnion":
        """``D = union_k [2^-n_k, 2^-n_k+1)``."""

        def rule(k):
            n = scales.level_at(k)
            return Fraction(1, 2**n), Fraction(1, 2**n)

        def witness(eps):
            k = 1
            while Fraction(1, 2 ** scales.level_at(k)) >= eps:
                k += 1
            return k

        try:
            spec = {"kind": "buckets", "scales": scales.to_json()}
        except NotImplementedError:
            spec = None
        return cls(rule=rule, witness=witness, spec=spec)

    @classmethod
    def power(cls, base: int = 3, width_base: int = 10, width_shift: int = 2) -> "SorgenfreyUnion":
        """``D = union_k [base^-k, base^-k + width_base^-(k+width_shift))``."""
        if base < 2 or width_base < 2:
            raise ValueError("bases must be >= 2")

        def rule(k):
            return Fraction(1, base**k), Fraction(1, width_base ** (k + width_shift))

        def witness(eps):
            k = 1
            while Fraction(1, base**k) >= eps:
                k += 1
            return k

        spec = {"kind": "power", "base": base, "width_base": width_base, "width_shift": width_shift}
        return cls(rule=rule, witness=witness, spec=spec)

    def piece(self, j: int) -> tuple[Fraction, Fraction]:
        if self.pieces is not None:
            return self.pieces[j - 1]
        return self.rule(j)

    def to_json(self) -> dict:
        if self.spec is None:
            raise NotImplementedError("union built from an ad-hoc rule has no JSON form")
        return dict(self.spec)

    @classmethod
    def from_json(cls, obj: dict) -> "SorgenfreyUnion":
        kind = obj["kind"]
        if kind == "finite":
            return cls.finite([(Fraction(t), Fraction(d)) for t, d in obj["pieces"]])
        if kind == "buckets":
            return cls.buckets(from_json(obj["scales"]))
        if kind == "power":
            return cls.power(obj["base"], obj["width_base"], obj["width_shift"])
        raise ValueError(f"unknown union kind {kind!r}")


def _trace_levels(union: SorgenfreyUnion) -> Iterator[int]:
    # Right endpoints are nonincreasing, so the first level a piece can reach
    # is nondecreasing in j; a pending level is final once no future piece
    # can add a smaller one.
    pending: set[int] = set()
    emitted = 0
    j = 1
    lo, hi = piece_levels(*union.piece(j))
    while True:
        pending.update(range(max(lo, 1), hi + 1))
        j += 1
        lo_next, hi_next = piece_levels(*union.piece(j))
        if lo_next < lo:
            raise ValueError("piece right endpoints must be nonincreasing")
        while pending:
            m = min(pending)
            if m <= max(lo_next, emitted + 1):
                pending.discard(m)
                emitted = m
                yield m
            else:
                break
        lo, hi = lo_next, hi_next


def canonicalize(d: SorgenfreyUnion) -> ScaleSequence:
    """Increasing levels ``l`` with ``D`` meeting ``[2^-l, 2^-l+1)``."""
    if d.pieces is not None:
        inf = min(t for t, _ in d.pieces) if d.pieces else None
        raise NotAdmissible(f"finite union has inf D = {fmt_fraction(inf) if inf is not None else 'undefined'} > 0")
    if d.witness is None:
        raise NotAdmissible("rule-based union must declare a witness map eps -> piece")
    # spot-check the witness before trusting it
    for e in (1, 10, 40):
        eps = Fraction(1, 2**e)
        t, _ = d.piece(d.witness(eps))
        if not t < eps:
            raise NotAdmissible(f"witness failed at eps = 2^-{e}")
    return BucketTrace(d)


def level_at(scales: ScaleSequence, k: int) -> int:
    return scales.level_at(k)


def is_allowed(scales: ScaleSequence, level: int) -> bool:
    return scales.is_allowed(level)


def from_json(obj: dict) -> ScaleSequence:
    kind = obj["kind"]
    if kind == "arithmetic":
        return Arithmetic(int(obj["a"]), int(obj["d"]))
    if kind == "supergeometric":
        return SuperGeometric(Fraction(obj["c"]), Fraction(obj["rho"]))
    if kind == "concat":
        return Concat(obj["prefix"], from_json(obj["tail"]))
    if kind == "trace":
        return BucketTrace(SorgenfreyUnion.from_json(obj["union"]))
    if kind in ("blockends", "darboux"):
        from . import digitsets

        s = digitsets.from_json(obj["set"])
        if kind == "blockends":
            return BlockEndpoints(s, obj.get("which", "end"))
        return DarbouxScale(s, Fraction(obj["alpha"]))
    raise ValueError(f"unknown scale kind {kind!r}")
