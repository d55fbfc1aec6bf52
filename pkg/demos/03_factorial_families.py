"""Two families of block sets whose union behaves differently under every scale.

Each member of the {0,1} family has packing value close to 1 but Hausdorff
value 0; all levels give 0 for the whole family, while block ends of one
member push the family value to 1.  In the prime-factorial family every
admissible scale sequence lands in at most one guard set, so the family
value stays below its supremum.
"""

from __future__ import annotations

from fractions import Fraction

from restdim import dimcalc as dc
from restdim import scales as sc
from restdim.constructions import (PrimeFactorialBlocks, ZeroOneBlocks, darboux_scale,
                                   prime_factorial_family, zero_one_family)

for i in (2, 3, 4):
    s = ZeroOneBlocks(i)
    a, b = s.block(1)
    print(f"S_{i}: first block [{a}, {b}], density at its end {float(Fraction(s.count(b), b)):.6f}")

zo = zero_one_family()
print("{0,1} family, all levels:", dc.drdim_family(zo, sc.all_levels()).to_json())
print("{0,1} family, ends of S_2:", dc.drdim_family(zo, sc.BlockEndpoints(ZeroOneBlocks(2))).to_json())

pf = prime_factorial_family()
for d in (sc.all_levels(), sc.BlockEndpoints(PrimeFactorialBlocks(3)),
          darboux_scale(PrimeFactorialBlocks(4), Fraction(1, 2))):
    print(f"prime family along {d.to_json()['kind']}: {dc.drdim_family(pf, d).lower}")
for i in (2, 3, 4):
    s = PrimeFactorialBlocks(i)
    print(f"member {i}: rdim = {dc.rdim_AS(s).value}")
