"""Integer (co)homology: Smith forms, reductions and generators."""
from .engine import (HomologyResult, betti_numbers, cohomology, fill, filling_trace, homology,
                     is_boundary, relative_homology)
from .oracle import betti_oracle, oracle_generators
from .reduction import CoreductionTrace, ShaveTrace, coreduce, shave_acyclic
from .snf import SNFResult, smith_invariants, smith_normal_form

__all__ = [
    "HomologyResult", "SNFResult", "CoreductionTrace", "ShaveTrace",
    "smith_normal_form", "smith_invariants", "shave_acyclic", "coreduce",
    "homology", "cohomology", "relative_homology", "betti_numbers", "betti_oracle",
    "oracle_generators", "is_boundary", "fill", "filling_trace",
]
