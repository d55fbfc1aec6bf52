"""Wrapping a thin tree inside a self-similar one.

Given a tree K with small local growth, pick k subcubes per l levels with
log2(k)/l between the growth bound and a target t, and pad K's choices to
exactly k.  The padded tree has k^m survivors at level m*l.
"""

from __future__ import annotations

from fractions import Fraction
from math import log2

from restdim import coveroracle as co
from restdim import digitsets as ds
from restdim import treesets as ts
from restdim.constructions import regular_cover

for s, t in ((ds.empty(), Fraction(1, 2)), (ds.evens(), Fraction(3, 4)), (ds.multiples(3), Fraction(1, 2))):
    bound = co.window_assouad_estimate(s, 32, 64).upper
    K = ts.from_digitset(s)
    L, (k, l) = regular_cover(K, t, bound)
    print(f"bound {bound}, target {t}: k = {k}, l = {l}, s = {log2(k) / l:.4f}, "
          f"contains K: {ts.is_subtree(K, L, 18)}, "
          f"survivors {[L.survivors_at_level(m * l) for m in range(4)]}")
