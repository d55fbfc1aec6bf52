"""Compact subsets of ``[0,1]^n`` as dyadic survival trees.

A node is a path of child indices in ``{0, ..., 2^n - 1}``; the root is the
empty tuple.  A tree rule lists the surviving children of each surviving
node and must never return an empty list, so the represented set (the
intersection of the nested unions of surviving cubes) is nonempty and
compact.  Level-``l`` cubes get the nominal diameter ``2^-l``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .digitsets import DigitSet, DigitSetFamily, as_family
from . import digitsets as _ds

DEFAULT_DEPTH_LIMIT = 64


class DepthExceeded(ValueError):
    pass


class TreeSet:
    """Base survival tree.

    ``state(path)`` returns a hashable key such that nodes with equal keys
    have isomorphic subtrees (including level); memoized traversals use it,
    so rules with lots of symmetry stay cheap.  The default key is the path
    itself.
    """

    kind = "abstract"

    def __init__(self, n: int = 1, depth_limit: Optional[int] = DEFAULT_DEPTH_LIMIT):
        if n < 1:
            raise ValueError("ambient dimension must be >= 1")
        self.n = n
        self.depth_limit = depth_limit

    @property
    def branching(self) -> int:
        return 2**self.n

    def children(self, path: tuple) -> tuple:
        raise NotImplementedError

    def state(self, path: tuple):
        return path

    def _check_depth(self, level: int) -> None:
        if self.depth_limit is not None and level > self.depth_limit:
            raise DepthExceeded(f"level {level} exceeds depth limit {self.depth_limit}")

    def survives(self, path: Sequence[int]) -> bool:
        path = tuple(path)
        for i in range(len(path)):
            if path[i] not in self.children(path[:i]):
                return False
        return True

    def count_below(self, path: tuple, remaining: int) -> int:
        """Surviving descendants of ``path`` exactly ``remaining`` levels down."""
        self._check_depth(len(path) + remaining)
        frontier = {self.state(path): (path, 1)}
        for _ in range(remaining):
            nxt: dict = {}
            for p, mult in frontier.values():
                for c in self.children(p):
                    child = p + (c,)
                    key = self.state(child)
                    if key in nxt:
                        nxt[key] = (nxt[key][0], nxt[key][1] + mult)
                    else:
                        nxt[key] = (child, mult)
            frontier = nxt
        return sum(m for _, m in frontier.values())

    def survivors_at_level(self, level: int) -> int:
        if level < 0:
            raise ValueError("level must be >= 0")
        self._check_depth(level)
        return self.count_below((), level)

    def survivor_exponent(self, level: int) -> Optional[int]:
        """``e`` with survivors = ``2^e`` when the rule certifies it, else None."""
        return None

    def paths_at_level(self, level: int, start: tuple = ()) -> Iterator[tuple]:
        """Surviving paths at ``level`` in lexicographic order."""
        if len(start) == level:
            yield start
            return
        for c in sorted(self.children(start)):
            yield from self.paths_at_level(level, start + (c,))

    def to_json(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no JSON form")

    def __repr__(self) -> str:
        try:
            return f"{type(self).__name__}({self.to_json()})"
        except NotImplementedError:
            return f"{type(self).__name__}(n={self.n})"


class FullTree(TreeSet):
    """``[0,1]^n``."""

    kind = "full"

    def __init__(self, n: int = 1):
        super().__init__(n, depth_limit=None)

    def children(self, path):
        return tuple(range(self.branching))

    def state(self, path):
        return len(path)

    def survivors_at_level(self, level: int) -> int:
        return self.branching**level

    def survivor_exponent(self, level: int) -> int:
        return self.n * level

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n}


class DigitTree(TreeSet):
    """``A_S``: the digit at position ``i`` is free iff ``i in S``, else 0."""

    kind = "digit"

    def __init__(self, s: DigitSet):
        super().__init__(1, depth_limit=None)
        self.s = s

    def children(self, path):
        return (0, 1) if self.s.contains(len(path) + 1) else (0,)

    def state(self, path):
        return len(path)

    def survivor_exponent(self, level: int) -> int:
        return self.s.count(level)

    def survivors_at_level(self, level: int) -> int:
        if level < 0:
            raise ValueError("level must be >= 0")
        return 2 ** self.s.count(level)

    def to_json(self) -> dict:
        return {"kind": self.kind, "set": self.s.to_json()}


class FamilyTree(TreeSet):
    """``A({S_i}) = {0} U U_i 2^-i (1 + A_{S_i})``.

    The path ``0^(i-1) 1`` roots the copy of ``A_{S_i}``; inside it the
    digit at absolute position ``i + j`` is free iff ``j in S_i``.  The
    all-zero path is the point 0.
    """

    kind = "family"

    def __init__(self, family):
        super().__init__(1, depth_limit=None)
        self.family: DigitSetFamily = as_family(family)

    def _has(self, i: int) -> bool:
        return self.family.length is None or i <= self.family.length

    def _split(self, path):
        # (i, j): i = copy index (0 on the spine), j = depth inside the copy
        for pos, d in enumerate(path):
            if d:
                return pos + 1, len(path) - pos - 1
        return 0, len(path)

    def children(self, path):
        i, j = self._split(path)
        if i == 0:
            return (0, 1) if self._has(j + 1) else (0,)
        return (0, 1) if self.family.member(i).contains(j + 1) else (0,)

    def state(self, path):
        return self._split(path)

    def survivors_at_level(self, level: int) -> int:
        if level < 0:
            raise ValueError("level must be >= 0")
        total = 1
        top = level if self.family.length is None else min(level, self.family.length)
        for i in range(1, top + 1):
            total += 2 ** self.family.member(i).count(level - i)
        return total

    def to_json(self) -> dict:
        return {"kind": self.kind, "family": self.family.to_json()}


class ExplicitTree(TreeSet):
    """Finite tree given by its surviving paths at ``depth``.

    Below ``depth`` every surviving leaf continues along child 0, so the
    rule stays total.
    """

    kind = "explicit"

    def __init__(self, n: int, depth: int, leaves: Iterable[Sequence[int]]):
        super().__init__(n)
        self.depth = depth
        leaves = sorted(set(tuple(int(c) for c in p) for p in leaves))
        if not leaves:
            raise ValueError("an explicit tree needs at least one leaf")
        for p in leaves:
            if len(p) != depth or any(not 0 <= c < 2**n for c in p):
                raise ValueError(f"bad leaf {p}")
        self.leaves = tuple(leaves)
        self._kids: dict[tuple, set] = {}
        for p in leaves:
            for i in range(depth):
                self._kids.setdefault(p[:i], set()).add(p[i])

    def children(self, path):
        if len(path) >= self.depth:
            return (0,)
        return tuple(sorted(self._kids.get(path, ())))

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "depth": self.depth,
                "leaves": [list(p) for p in self.leaves]}


def random_tree(rng, n: int, depth: int, keep: float = 0.6) -> ExplicitTree:
    """Random explicit tree; each child survives with probability ``keep``
    (at least one child always survives)."""
    leaves = []

    def grow(path):
        if len(path) == depth:
            leaves.append(path)
            return
        kids = [c for c in range(2**n) if rng.random() < keep]
        if not kids:
            kids = [rng.randrange(2**n)]
        for c in kids:
            grow(path + (c,))

    grow(())
    return ExplicitTree(n, depth, leaves)


def layers(t: TreeSet, depth: int, root: tuple = ()) -> list[dict]:
    """Distinct subtree states per level below ``root``.

    ``out[d]`` maps each state key at relative depth ``d`` to
    ``(representative path, child keys)``; child keys are empty at ``depth``.
    Keys are unique within a level, so bottom-up passes over ``out`` replace
    recursion over the tree.
    """
    out = [{t.state(root): [root, ()]}]
    for d in range(depth):
        nxt: dict = {}
        for key, entry in out[d].items():
            p = entry[0]
            kids = []
            for c in sorted(t.children(p)):
                child = p + (c,)
                ck = t.state(child)
                kids.append(ck)
                if ck not in nxt:
                    nxt[ck] = [child, ()]
            entry[1] = tuple(kids)
        out.append(nxt)
    return out


# -- builders -------------------------------------------------------------


def from_digitset(s: DigitSet) -> DigitTree:
    return DigitTree(s)


def family_assemble(s_list) -> FamilyTree:
    return FamilyTree(s_list)


def survivors_at_level(t: TreeSet, level: int) -> int:
    return t.survivors_at_level(level)


def check_nonempty(t: TreeSet, depth: int) -> bool:
    """Every surviving node above ``depth`` has a surviving child."""
    seen = set()

    def walk(path):
        key = t.state(path)
        if (key, len(path)) in seen:
            return True
        seen.add((key, len(path)))
        kids = t.children(path)
        if not kids:
            return False
        if len(path) + 1 >= depth:
            return True
        return all(walk(path + (c,)) for c in kids)

    return walk(())


def is_subtree(k: TreeSet, l: TreeSet, depth: int) -> bool:
    """``K subset L`` leafwise: every surviving node of K up to ``depth`` survives in L."""

    def walk(path):
        if len(path) == depth:
            return True
        lk = set(l.children(path))
        for c in k.children(path):
            if c not in lk or not walk(path + (c,)):
                return False
        return True

    return walk(())


def dump(t: TreeSet, level: int) -> str:
    """Debug listing: one surviving path per line, digits in base ``2^n``."""
    lines = [f"# {t.kind} n={t.n} level={level} survivors={t.survivors_at_level(level)}"]
    for p in t.paths_at_level(level):
        lines.append(" ".join(str(c) for c in p) if t.n > 1 else "".join(str(c) for c in p))
    return "\n".join(lines)


# -- measures ---------------------------------------------------------------


class WeightedTree:
    """A survival tree with a mass rule ``path -> Fraction`` (root mass 1)."""

    def __init__(self, base: TreeSet, mass: Callable[[tuple], Fraction], kind: str = "custom",
                 state_invariant: bool = False):
        self.base = base
        self._mass = mass
        self.kind = kind
        # True when nodes sharing a subtree state also share their mass
        self.state_invariant = state_invariant

    def mass(self, path: Sequence[int]) -> Fraction:
        path = tuple(path)
        if not self.base.survives(path):
            return Fraction(0)
        return self._mass(path)

    def state(self, path):
        return self.base.state(path)

    def check_conservation(self, depth: int) -> bool:
        """Children masses sum to the parent's at every node above ``depth``."""
        seen = set()

        def walk(path):
            key = (self.base.state(path), len(path))
            if key in seen:
                return True
            seen.add(key)
            m = self.mass(path)
            kids = self.base.children(path)
            if sum((self.mass(path + (c,)) for c in kids), Fraction(0)) != m:
                return False
            if len(path) + 1 >= depth:
                return True
            return all(walk(path + (c,)) for c in kids)

        return self.mass(()) == 1 and walk(())


def uniform_measure(t: TreeSet) -> WeightedTree:
    """Mass ``2^-count(S, j)`` on every surviving level-j node of ``A_S``."""
    if not isinstance(t, DigitTree):
        raise TypeError("uniform_measure needs an A_S tree; use equal_split for other trees")
    s = t.s
    return WeightedTree(t, lambda path: Fraction(1, 2 ** s.count(len(path))), kind="uniform",
                        state_invariant=True)


def equal_split(t: TreeSet) -> WeightedTree:
    """Each node splits its mass equally among its surviving children."""

    def mass(path):
        m = Fraction(1)
        for i in range(len(path)):
            m /= len(t.children(path[:i]))
        return m

    return WeightedTree(t, mass, kind="equal_split")


# -- JSON -------------------------------------------------------------------

_DECODERS: dict[str, Callable[[dict], TreeSet]] = {
    "full": lambda o: FullTree(o.get("n", 1)),
    "digit": lambda o: DigitTree(_ds.from_json(o["set"])),
    "family": lambda o: FamilyTree(_ds.family_from_json(o["family"])),
    "explicit": lambda o: ExplicitTree(o["n"], o["depth"], o["leaves"]),
}


def register(kind: str):
    def deco(fn):
        _DECODERS[kind] = fn
        return fn

    return deco


def from_json(obj: dict) -> TreeSet:
    kind = obj["kind"]
    if kind not in _DECODERS:
        from . import constructions  # noqa: F401
    try:
        return _DECODERS[kind](obj)
    except KeyError:
        raise ValueError(f"unknown tree kind {kind!r}") from None
