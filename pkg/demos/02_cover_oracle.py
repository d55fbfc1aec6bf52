"""Finite-depth contents: dynamic programming against exhaustive search.

For a few small trees the minimal restricted cover cost is computed twice and
printed exactly; then the content of the "evens" set is followed as the depth
grows, once below and once above its dimension 1/2.
"""

from __future__ import annotations

import random
from fractions import Fraction

from restdim import coveroracle as co
from restdim import evens
from restdim import scales as sc
from restdim import treesets as ts

rng = random.Random(1)
for _ in range(5):
    tree = ts.random_tree(rng, 1, 5)
    q = co.ContentQuery(tree, Fraction(1, 2), sc.Concat([1, 3], sc.Arithmetic(5, 2)), 5)
    dp, bf = co.min_cover_content_dp(q), co.brute_force_content(q)
    print(f"{tree.survivors_at_level(5):2d} leaves: dp = {dp}  brute = {bf}  equal = {dp == bf}")

tree = ts.from_digitset(evens())
depths = [4, 8, 16, 32, 48]
for s in (Fraction(2, 5), Fraction(3, 5)):
    vals = co.content_decay_profile(tree, s, sc.all_levels(), depths)
    print(f"s = {s}: " + ", ".join(f"{d}: {float(v):.3g}" for d, v in zip(depths, vals)))
