"""Nested cube unions whose restricted dimensions all vanish.

With Phi(d) = d^2 the stage levels grow as 0, 2, 27, 652, 26085, ... .  At
each stage one distinguished cube is fully refined for a while, every other
cube follows a single branch.  The cover made of that cube plus one small cube
per branch gets cheaper very quickly.
"""

from __future__ import annotations

from fractions import Fraction

from restdim import constructions as cons

tree = cons.rdim_not_pdim_construct(cons.PowerPhi(2), 1, 5)
led = tree.ledger
print("n_k:", led.n_seq)
print("m_k:", led.m_seq)
print("l_k bit lengths:", [x.bit_length() for x in led.l_seq])
for k in range(1, 6):
    c = tree.certificate(k, Fraction(1, 5))
    print(f"k={k}: r1 level {c['r1_level']}, r2 level {c['r2_level']}, cover ~ {float(c['cover_cost']):.3g}")
for lv in (10, 27, 100, 652):
    print(f"survivors at level {lv}: {tree.survivors_at_level(lv)}")
