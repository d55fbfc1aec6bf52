"""Diameter-restricted Hausdorff dimensions of digit-restriction sets.

Exact closed forms live in :mod:`restdim.dimcalc`; :mod:`restdim.coveroracle`
computes finite-depth contents by brute force and dynamic programming to
check them; :mod:`restdim.constructions` builds the example sets.
"""

from __future__ import annotations

from ._exact import Pow2Sum, fmt_fraction
from .constructions import (
    OutOfRange,
    darboux_scale,
    holder_witness,
    prime_factorial_family,
    rdim_not_pdim_construct,
    regular_cover,
    zero_one_family,
)
from .coveroracle import (
    ContentQuery,
    InfeasibleCover,
    brute_force_content,
    mass_check,
    min_cover_content_dp,
    window_assouad_estimate,
)
from .digitsets import DigitSet, EventuallyPeriodic, GeometricBlocks, evens, naturals, odds, phi_image
from .dimcalc import LimitBounds, drdim_AS, drdim_family, hdim_pdim, rdim_AS
from .scales import ScaleSequence, SorgenfreyUnion, all_levels, canonicalize
from .treesets import TreeSet, family_assemble, from_digitset

__version__ = "0.1.0"

__all__ = [
    "ContentQuery", "DigitSet", "EventuallyPeriodic", "GeometricBlocks", "InfeasibleCover",
    "LimitBounds", "OutOfRange", "Pow2Sum", "ScaleSequence", "SorgenfreyUnion", "TreeSet",
    "all_levels", "brute_force_content", "canonicalize", "darboux_scale", "drdim_AS",
    "drdim_family", "evens", "family_assemble", "fmt_fraction", "from_digitset", "hdim_pdim",
    "holder_witness", "mass_check", "min_cover_content_dp", "naturals", "odds", "phi_image",
    "prime_factorial_family", "rdim_AS", "rdim_not_pdim_construct", "regular_cover",
    "window_assouad_estimate", "zero_one_family",
]
