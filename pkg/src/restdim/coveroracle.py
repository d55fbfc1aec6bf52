"""Finite-depth ground truth for restricted Hausdorff content.

Only dyadic-aligned covers are considered: a cover is an antichain of
surviving cubes at allowed levels ``<= m`` containing every surviving
level-``m`` cube, and its cost is ``sum 2^(-level*s)``.  Arbitrary sets of
diameter ``2^-l`` meet at most ``2^n`` aligned cubes of the same level, so
the restriction changes contents by a bounded factor and never changes a
dimension.

Costs live in ``Q(2^(1/b))`` (``b`` = denominator of ``s``) and are handled
exactly by :class:`~restdim._exact.Pow2Sum`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._exact import Pow2Sum, as_fraction, fmt_fraction, pow2_cost
from .digitsets import DigitSet
from .dimcalc import LimitBounds
from .scales import ScaleSequence
from .treesets import TreeSet, WeightedTree, layers

BRUTE_FORCE_MAX_DEPTH = 8
DEFAULT_DEPTH = {1: 24, 2: 12}


class InfeasibleCover(ValueError):
    """No admissible dyadic cover exists; ``path`` is a branch with no allowed ancestor level."""

    def __init__(self, reason: str, path: tuple = ()):
        super().__init__(reason)
        self.reason = reason
        self.path = path

    def to_json(self) -> dict:
        return {"status": "infeasible", "reason": self.reason, "path": list(self.path)}


@dataclass
class ContentQuery:
    tree: TreeSet
    s: Fraction
    scales: ScaleSequence
    depth: int
    allowed: frozenset = field(init=False)

    def __post_init__(self):
        self.s = as_fraction(self.s)
        if self.s < 0 or self.s > self.tree.n:
            raise ValueError(f"exponent must lie in [0, {self.tree.n}]")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        self.allowed = frozenset(self.scales.levels_upto(self.depth))
        if not self.allowed:
            raise InfeasibleCover(f"no allowed level <= {self.depth}")

    def cost(self, level: int, count: int = 1) -> Pow2Sum:
        return pow2_cost(level, self.s, count)


def min_cover_content_dp(q: ContentQuery) -> Pow2Sum:
    """``cost(node) = min([level allowed] 2^(-level s), sum cost(children))``.

    Evaluated bottom-up over the distinct subtree states of each level.
    """
    lay = layers(q.tree, q.depth)
    m = q.depth
    below: dict = {}
    stuck: Optional[tuple] = None
    for d in range(m, -1, -1):
        here = {}
        for key, (path, kids) in lay[d].items():
            best = q.cost(d) if d in q.allowed else None
            if d < m:
                subs = [below[ck] for ck in kids]
                if all(x is not None for x in subs):
                    total = Pow2Sum.zero()
                    for x in subs:
                        total = total + x
                    if best is None or total < best:
                        best = total
            if best is None and stuck is None:
                stuck = path
            here[key] = best
        below = here
    result = next(iter(below.values()))
    if result is None:
        bad = stuck or ()
        raise InfeasibleCover(
            f"branch {''.join(map(str, bad)) or 'root'} has no allowed level on its way to depth {m}", bad
        )
    return result


def _profiles(q: ContentQuery):
    """Every per-level count vector realized by some admissible cover."""
    lay = layers(q.tree, q.depth)
    m = q.depth
    levels = sorted(q.allowed)
    index = {lv: i for i, lv in enumerate(levels)}
    zero = (0,) * len(levels)
    below: dict = {}
    for d in range(m, -1, -1):
        here = {}
        for key, (path, kids) in lay[d].items():
            out = set()
            if d in q.allowed:
                v = list(zero)
                v[index[d]] = 1
                out.add(tuple(v))
            if d < m:
                acc = {zero}
                for ck in kids:
                    sub = below[ck]
                    acc = {tuple(a + b for a, b in zip(x, y)) for x in acc for y in sub}
                    if not acc:
                        break
                out |= acc
            here[key] = out
        below = here
    return next(iter(below.values())), levels


def brute_force_content(q: ContentQuery) -> Pow2Sum:
    """Exhaustive minimum over all admissible covers (``depth <= 8``)."""
    if q.depth > BRUTE_FORCE_MAX_DEPTH:
        raise ValueError(f"brute force is limited to depth {BRUTE_FORCE_MAX_DEPTH}")
    profiles, levels = _profiles(q)
    if not profiles:
        raise InfeasibleCover(f"no admissible cover at depth {q.depth}")
    best = None
    for prof in profiles:
        total = Pow2Sum.zero()
        for lv, c in zip(levels, prof):
            if c:
                total = total + q.cost(lv, c)
        if best is None or total < best:
            best = total
    return best


def naive_content(q: ContentQuery) -> Pow2Sum:
    """Subset enumeration over all allowed-level surviving cubes; tiny trees only."""
    tree, m = q.tree, q.depth
    cubes = [p for lv in sorted(q.allowed) for p in tree.paths_at_level(lv)]
    if len(cubes) > 20:
        raise ValueError("too many candidate cubes for subset enumeration")
    leaves = list(tree.paths_at_level(m))
    best = None
    for r in range(1, len(cubes) + 1):
        for combo in itertools.combinations(cubes, r):
            if not all(any(leaf[: len(c)] == c for c in combo) for leaf in leaves):
                continue
            # antichain only
            if any(a != b and b[: len(a)] == a for a in combo for b in combo):
                continue
            total = Pow2Sum.zero()
            for c in combo:
                total = total + q.cost(len(c))
            if best is None or total < best:
                best = total
    if best is None:
        raise InfeasibleCover("no admissible cover")
    return best


def single_level_content(tree: TreeSet, s, scales: ScaleSequence, depth: int) -> Pow2Sum:
    """``min_l survivors(l) * 2^(-l s)`` over allowed levels ``l <= depth``."""
    s = as_fraction(s)
    best = None
    for lv in scales.levels_upto(depth):
        c = pow2_cost(lv, s, tree.survivors_at_level(lv))
        if best is None or c < best:
            best = c
    if best is None:
        raise InfeasibleCover(f"no allowed level <= {depth}")
    return best


def content_decay_profile(tree: TreeSet, s, scales: ScaleSequence, depths: Sequence[int]) -> list[Pow2Sum]:
    depths = list(depths)
    if any(b <= a for a, b in zip(depths, depths[1:])):
        raise ValueError("depths must be increasing")
    return [min_cover_content_dp(ContentQuery(tree, s, scales, d)) for d in depths]


def decay_csv(depths, contents) -> str:
    lines = ["depth,content,approx"]
    for d, c in zip(depths, contents):
        lines.append(f"{d},{_pow2_text(c)},{float(c):.12g}")
    return "\n".join(lines) + "\n"


def _pow2_text(x: Pow2Sum) -> str:
    return fmt_fraction(x.as_rational()) if x.is_rational() else str(x)


@dataclass
class MassReport:
    best_constant: Pow2Sum
    divergent: bool
    witness: tuple
    witness_level: int
    level_maxima: dict
    slack: int = 2

    def to_json(self) -> dict:
        return {
            "best_constant": self.best_constant.to_json(),
            "divergent": self.divergent,
            "witness": {"path": list(self.witness), "level": self.witness_level},
            "slack": self.slack,
            "level_maxima": {str(k): v.to_json() for k, v in sorted(self.level_maxima.items())},
        }


def _level_representatives(w: WeightedTree, depth: int) -> dict[int, list[tuple]]:
    """Nodes to scan per level: one per subtree state when the mass is a
    function of the state, otherwise every surviving node."""
    if w.state_invariant:
        lay = layers(w.base, depth)
        return {d: sorted(entry[0] for entry in lay[d].values()) for d in range(depth + 1)}
    return {d: list(w.base.paths_at_level(d)) for d in range(depth + 1)}


def mass_check(w: WeightedTree, s, scales: ScaleSequence, depth: int) -> MassReport:
    """``C = max mu(U) 2^(level s)`` over surviving cubes at allowed levels ``<= depth``.

    An arbitrary closed interval of diameter ``2^-l`` meets at most 2 aligned
    level-``l`` intervals, hence the recorded slack factor 2 in ``n = 1``.
    The divergence flag is raised when the per-level maxima over the deeper
    half of the allowed levels exceed those over the shallower half by a
    factor of at least 2 and keep increasing at the last levels.
    """
    s = as_fraction(s)
    tree = w.base
    allowed = scales.levels_upto(depth)
    if not allowed:
        raise InfeasibleCover(f"no allowed level <= {depth}")
    reps = _level_representatives(w, depth)
    maxima: dict[int, Pow2Sum] = {}
    wit: dict[int, tuple] = {}
    for lv in allowed:
        best, arg = None, None
        for p in reps[lv]:
            r = Pow2Sum.term(w.mass(p), lv * s)
            if best is None or r > best:
                best, arg = r, p
        maxima[lv], wit[lv] = best, arg
    top = max(allowed, key=lambda lv: (maxima[lv], -lv))
    # first level attaining the maximum
    for lv in allowed:
        if maxima[lv] == maxima[top]:
            top = lv
            break
    divergent = False
    if len(allowed) >= 4:
        half = len(allowed) // 2
        early = max(maxima[lv] for lv in allowed[:half])
        late = [maxima[lv] for lv in allowed[half:]]
        rising = late[-1] >= late[len(late) // 2] and late[-1] > late[0]
        divergent = max(late) >= 2 * early and rising
    return MassReport(maxima[top], divergent, wit[top], top, maxima)


def mass_consistent(content: Pow2Sum, root_mass, report: MassReport) -> bool:
    """``content >= mu(root) / (slack * C)``, i.e. ``slack * C * content >= mu(root)``."""
    return report.slack * report.best_constant * content >= Pow2Sum.rational(root_mass)


def window_assouad_estimate(s: DigitSet, max_window: int, max_offset: int) -> LimitBounds:
    """Window-density estimate of ``adim A_S``.

    ``N(k) = max_m #(S & (m, m+k])`` is subadditive, so ``N(k)/k`` decreases
    to the Assouad dimension of ``A_S``.  Offsets are scanned up to
    ``max_offset``; the reported lower value is ``min_{k <= max_window}`` of
    the scanned window maxima.  Eventually periodic sets are exact (the
    value is the tail density).
    """
    if max_window < 1 or max_offset < 0:
        raise ValueError("need max_window >= 1 and max_offset >= 0")
    tail = s.tail_segment()
    if tail is not None:
        return LimitBounds.exactly(tail.density, "periodic tail")
    N = max_offset + max_window
    members = s.members(N)
    marks = np.zeros(N + 1, dtype=np.int64)
    marks[np.asarray(members, dtype=np.int64)] = 1
    c = np.cumsum(marks)
    best = Fraction(1)
    for k in range(1, max_window + 1):
        top = int((c[k: max_offset + k + 1] - c[: max_offset + 1]).max())
        best = min(best, Fraction(top, k))
    return LimitBounds(best, Fraction(1), False, max_window,
                       f"windows up to {max_window}, offsets up to {max_offset}")
