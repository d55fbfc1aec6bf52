"""Steering the density of a block set to any value between its extremes.

Blocks [4^j, 2*4^j] fill a third of [1, k] just before a block starts and two
thirds at a block end.  For each target alpha in between we build a scale
sequence along which the density converges to alpha, and print how fast.
"""

from __future__ import annotations

from fractions import Fraction

from restdim import darboux_scale, drdim_AS, hdim_pdim
from restdim.digitsets import GeometricBlocks

blocks = GeometricBlocks(1, 2, 4)
lo, hi = hdim_pdim(blocks)
print(f"liminf = {lo.value}, limsup = {hi.value}")

for alpha in (Fraction(1, 3), Fraction(2, 5), Fraction(1, 2), Fraction(3, 5), Fraction(2, 3)):
    d = darboux_scale(blocks, alpha)
    ks = (1, 5, 10, 25, 50)
    errs = [abs(Fraction(blocks.count(d.level_at(k)), d.level_at(k)) - alpha) for k in ks]
    print(f"alpha = {str(alpha):>4}: dim_D = {drdim_AS(blocks, d).value}, "
          + ", ".join(f"k={k}: {float(e):.1e}" for k, e in zip(ks, errs)))
