"""A set whose image under a digit-spreading map changes dimension.

S keeps every other digit on long stretches, so its density never exceeds
1/2.  Moving digit i to position phi(i) spreads S out by q/p; the map back is
Hoelder with exponent p/q, and we sample difference quotients to see the
constant.
"""

from __future__ import annotations

from fractions import Fraction

from restdim import constructions as cons
from restdim import dimcalc as dc
from restdim import scales as sc

n_rule = sc.SuperGeometric(1, Fraction(3, 2))
p, q = 3, 4
S, T = cons.holder_witness(None, n_rule, p, q)
print("first members of S:", S.members(60))
print("max density of S up to 10^4:", max(Fraction(S.count(i), i) for i in range(1, 10_001)))
print("dim along n_k:", dc.drdim_AS(S, n_rule).to_json())
scan = cons.holder_ratio_scan(T, p, q, depth=40, pairs=4000, seed=0)
print(f"largest ratio {scan['max_ratio']:.4f}, 2^(p(q-p)/q) = {scan['bound']:.4f}, "
      f"always-valid constant {scan['valid_constant']:.4f}")
ks = range(5, 60, 6)
print("density of T at n_(k+1):", [round(float(Fraction(T.count(n_rule.level_at(k + 1)), n_rule.level_at(k + 1))), 4) for k in ks])
