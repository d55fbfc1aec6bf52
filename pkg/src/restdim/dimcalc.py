"""Closed-form restricted dimensions of digit-restriction sets.

For ``A_S`` every quantity is a limit of the density ``M_S(k)``:

* ``hdim A_S = liminf_k M_S(k)``, ``pdim A_S = limsup_k M_S(k)``;
* along scales ``n_k``, ``dim_D A_S = liminf_k M_S(n_k)``;
* for ``A({S_i})`` the value is the supremum over members.

A result is flagged exact only when a rule-level argument certifies it (see
``drdim_AS`` for the list).  Otherwise the numbers are finite evidence and
carry the depth they were computed at.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ._exact import fmt_fraction
from .digitsets import DigitSet, as_family
from .scales import BlockEndpoints, Concat, DarbouxScale, ScaleSequence

DEFAULT_DEPTH = 64
SMALL_SCAN = 2000
EVIDENCE_BIT_CAP = 4096  # stop sampling scales once n_k has this many bits


@dataclass(frozen=True)
class LimitBounds:
    lower: Fraction
    upper: Fraction
    exact: bool
    evidence_depth: int = 0
    note: str = ""

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} > upper {self.upper}")
        if self.exact and self.lower != self.upper:
            raise ValueError("exact bounds must pin a single value")

    @classmethod
    def exactly(cls, value, note: str = "") -> "LimitBounds":
        v = Fraction(value)
        return cls(v, v, True, 0, note)

    @property
    def value(self) -> Fraction:
        if not self.exact:
            raise ValueError("bounds are not exact")
        return self.lower

    def contains(self, x) -> bool:
        return self.lower <= x <= self.upper

    def to_json(self) -> dict:
        out = {
            "lower": fmt_fraction(self.lower),
            "upper": fmt_fraction(self.upper),
            "exact": self.exact,
            "evidence_depth": self.evidence_depth,
        }
        if self.note:
            out["note"] = self.note
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "LimitBounds":
        return cls(Fraction(obj["lower"]), Fraction(obj["upper"]), bool(obj["exact"]),
                   int(obj.get("evidence_depth", 0)), obj.get("note", ""))


def _event_densities(s: DigitSet, depth: int) -> list[tuple[int, Fraction]]:
    """``M_S`` at small k and at the endpoints of the first ``depth`` segments."""
    pts = set(range(1, SMALL_SCAN + 1))
    for i, seg in enumerate(s.segments()):
        if i >= depth or seg.hi is None:
            pts.add(max(seg.lo, 1) * 4)
            break
        if seg.lo > 1:
            pts.add(seg.lo - 1)
        pts.add(seg.hi)
    ks = sorted(pts)
    return [(k, Fraction(s.count(k), k)) for k in ks]


def hdim_pdim(s: DigitSet, depth: int = DEFAULT_DEPTH) -> tuple[LimitBounds, LimitBounds]:
    """``(liminf M_S, limsup M_S)`` as bounds."""
    lims = s.limits()
    if lims is not None:
        lo, hi = lims
        return LimitBounds.exactly(lo), LimitBounds.exactly(hi)
    ev = _event_densities(s, depth)
    half = [m for _, m in ev[len(ev) // 2:]]
    quarter = [m for _, m in ev[3 * len(ev) // 4:]]
    n = len(ev)
    inf_b = LimitBounds(min(half), min(quarter), False, n, "tail minimum of event densities")
    sup_b = LimitBounds(max(quarter), max(half), False, n, "tail maximum of event densities")
    return inf_b, sup_b


def _strip(scales: ScaleSequence) -> ScaleSequence:
    # a finite prefix never changes a liminf
    while isinstance(scales, Concat):
        scales = scales.tail
    return scales


def _same(a, b) -> bool:
    return a is b or a == b


def drdim_AS(s: DigitSet, scales: ScaleSequence, depth: int = DEFAULT_DEPTH) -> LimitBounds:
    """``liminf_k M_S(n_k)``.

    Certified cases:

    * the set has a density (then every subsequence converges to it);
    * ``n_{k+1} - n_k`` is bounded: ``|M_S(m) - M_S(n_k)| <= gap/m`` for the
      nearest ``n_k``, so the liminf equals the full one;
    * super-exponentially spaced ratio blocks with scales of bounded ratio:
      some ``n_k`` always lands in ``[a_{j+1}/R, a_{j+1})`` where the
      density tends to 0;
    * the scales were built by ``darboux_scale`` for this set and ``alpha``;
    * the scales are the block ends (starts) of this set, whose event
      sequence realizes the limsup (liminf);
    * a rule supplied by the set itself (``DigitSet.drdim_rule``).
    """
    d = _strip(scales)
    special = s.drdim_rule(d)
    if special is not None:
        return special if isinstance(special, LimitBounds) else LimitBounds.exactly(special)
    lims = s.limits()
    if lims is not None:
        lo, hi = lims
        if lo == hi:
            return LimitBounds.exactly(lo, "density exists")
        if d.gap_bound() is not None:
            return LimitBounds.exactly(lo, "bounded gaps: full liminf")
        if getattr(s, "superexponential", False) and d.ratio_bound() is not None and lo == 0:
            return LimitBounds.exactly(0, "bounded ratio scales meet the empty stretches")
        if isinstance(d, BlockEndpoints) and _same(d.digitset, s) and s.events_certified:
            return LimitBounds.exactly(hi if d.which == "end" else lo, f"block {d.which}s")
    if isinstance(d, DarbouxScale) and _same(d.digitset, s):
        return LimitBounds.exactly(d.alpha, "Darboux subsequence")
    return _drdim_evidence(s, d, depth)


def _drdim_evidence(s: DigitSet, d: ScaleSequence, depth: int) -> LimitBounds:
    vals = []
    for k in range(1, depth + 1):
        n = d.level_at(k)
        vals.append(Fraction(s.count(n), n))
        if n.bit_length() > EVIDENCE_BIT_CAP:
            break
    K = len(vals)
    lower = min(vals[K // 2:])
    upper = min(vals[(3 * K) // 4:])
    h, p = hdim_pdim(s)
    lo_cap = h.lower if h.exact else Fraction(0)
    hi_cap = p.upper if p.exact else Fraction(1)

    def clamp(x):
        return min(max(x, lo_cap), hi_cap)

    return LimitBounds(clamp(lower), clamp(upper), False, K, "finite evidence along the scales")


def drdim_family(s_list, scales: ScaleSequence, truncation: int = 8,
                 depth: int = DEFAULT_DEPTH) -> LimitBounds:
    """``sup_i liminf_k M_{S_i}(n_k)``; infinite families need a tail envelope."""
    fam = as_family(s_list)
    d = _strip(scales)
    n = fam.length if fam.length is not None else truncation
    vals = [drdim_AS(fam.member(i), d, depth) for i in range(1, n + 1)]
    lower = max((v.lower for v in vals), default=Fraction(0))
    upper = max((v.upper for v in vals), default=Fraction(0))
    exact = all(v.exact for v in vals)
    ev = max((v.evidence_depth for v in vals), default=0)
    if fam.length is not None and fam.length <= n:
        if exact:
            return LimitBounds.exactly(lower, f"maximum over {n} members")
        return LimitBounds(lower, upper, False, ev, f"maximum over {n} members")
    env = fam.tail_envelope(n + 1, d)
    if env is None:
        return LimitBounds(lower, Fraction(1), False, ev,
                           f"truncated at i <= {n}; no tail envelope for these scales")
    if not isinstance(env, LimitBounds):
        env = LimitBounds(Fraction(0), Fraction(env), False, 0)
    if exact and (env.exact or env.upper <= lower):
        value = max(lower, env.lower) if env.exact else lower
        return LimitBounds.exactly(value, f"members i <= {n} plus tail envelope")
    return LimitBounds(max(lower, env.lower), max(upper, env.upper), False, ev,
                       f"members i <= {n} plus tail envelope")


def rdim_AS(s: DigitSet, depth: int = DEFAULT_DEPTH) -> LimitBounds:
    """Supremum over scales of ``dim_D A_S``; it is attained and equals the packing dimension."""
    return hdim_pdim(s, depth)[1]


def density_rows(s: DigitSet, scales: ScaleSequence, count: int) -> list[tuple[int, int, int, Fraction]]:
    """Rows ``(k, n_k, count, M_S(n_k))``."""
    rows = []
    for k in range(1, count + 1):
        n = scales.level_at(k)
        c = s.count(n)
        rows.append((k, n, c, Fraction(c, n)))
    return rows


def rows_to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt_fraction(x) if isinstance(x, Fraction) else x for x in r])
    return buf.getvalue()


def density_csv(s: DigitSet, scales: ScaleSequence, count: int) -> str:
    return rows_to_csv(["k", "n_k", "count", "density"], density_rows(s, scales, count))


def sandwich_holds(s: DigitSet, scales: ScaleSequence, depth: int = DEFAULT_DEPTH) -> bool:
    """``hdim <= dim_D <= pdim`` on certified endpoints."""
    h, p = hdim_pdim(s, depth)
    d = drdim_AS(s, scales, depth)
    if h.exact and d.upper < h.lower:
        return False
    if p.exact and d.lower > p.upper:
        return False
    if h.exact and p.exact and d.exact:
        return h.value <= d.value <= p.value
    return d.lower <= d.upper


def random_rule_pair(rng) -> tuple[DigitSet, ScaleSequence]:
    """A random ``(S, D)`` pair drawn from the rule classes with exact limits.

    Sets: eventually periodic, geometric blocks, their complements, unions
    with periodic sets, and ``phi_{p,q}`` images.  Scales: arithmetic,
    super-geometric, block endpoints, Darboux scales and finite prefixes.
    """
    from .constructions import darboux_scale
    from .digitsets import EventuallyPeriodic, GeometricBlocks, phi_image
    from .scales import Arithmetic, SuperGeometric

    def periodic():
        m = rng.randint(1, 6)
        res = rng.sample(range(m), rng.randint(0, m))
        return EventuallyPeriodic(rng.randint(1, 20), m, res)

    def blocks():
        u = rng.randint(1, 3)
        R = rng.randint(3 if u == 1 else 2, 5)
        return GeometricBlocks(u, rng.randint(u + 1, u * R - 1), R, rng.randint(0, 2))

    kind = rng.randrange(5)
    if kind == 0:
        s = periodic()
    elif kind == 1:
        s = blocks()
    elif kind == 2:
        s = ~blocks()
    elif kind == 3:
        s = periodic() | blocks() if rng.random() < 0.5 else periodic() & periodic()
    else:
        q = rng.randint(2, 5)
        s = phi_image(blocks() if rng.random() < 0.5 else periodic(), rng.randint(1, q - 1), q)

    choice = rng.randrange(5)
    if choice == 0:
        d: ScaleSequence = Arithmetic(rng.randint(0, 5), rng.randint(1, 4))
    elif choice == 1:
        d = SuperGeometric(rng.randint(1, 3), Fraction(rng.randint(3, 8), 2))
    elif choice == 2 and isinstance(s, GeometricBlocks):
        d = BlockEndpoints(s, rng.choice(["end", "start"]))
    elif choice == 3:
        lo, hi = s.limits() or (None, None)
        if lo is None:
            d = Arithmetic(1, 1)
        else:
            d = darboux_scale(s, lo + (hi - lo) * Fraction(rng.randint(0, 4), 4))
    else:
        d = Concat(sorted(rng.sample(range(1, 30), 3)), Arithmetic(30, rng.randint(1, 3)))
    return s, d
