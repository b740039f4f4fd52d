"""Integer cohomology cuts and T-Omega eddy-current solves on labeled 3D meshes."""
__version__ = "0.1.0"

from .cell_complex import (ChainComplex, CxCochain, IntChain, SubcomplexView, boundary, coboundary,
                           inner_product, relative_complex, restrict)
from .cut_extractor import CutSet, compute_cuts, linked_current, verify_cutset, z2_counterexample_check
from .dual_complex import DualMap, dual_boundary, dual_support
from .errors import (DimensionError, InconsistencyError, MeshError, NotAcyclicError, RankDeficiencyError,
                     SolverError, TopocutError)
from .homology import betti_numbers, betti_oracle, cohomology, homology, relative_homology
from .kernels import BACKEND
from .mesh_ingest import Mesh, RegionLabeling, build_complex, build_skeleton, dump_mesh, parse_mesh
from .scenes import SCENES, generate_scene
from .t_omega import MaterialParams, Source, assemble, build_constitutive, check_laws, solve

__all__ = [
    "ChainComplex", "CxCochain", "IntChain", "SubcomplexView", "boundary", "coboundary", "inner_product",
    "relative_complex", "restrict", "CutSet", "compute_cuts", "linked_current", "verify_cutset",
    "z2_counterexample_check", "DualMap", "dual_boundary", "dual_support", "DimensionError",
    "InconsistencyError", "MeshError", "NotAcyclicError", "RankDeficiencyError", "SolverError",
    "TopocutError", "betti_numbers", "betti_oracle", "cohomology", "homology", "relative_homology",
    "BACKEND", "Mesh", "RegionLabeling", "build_complex", "build_skeleton", "dump_mesh", "parse_mesh", "SCENES",
    "generate_scene", "MaterialParams", "Source", "assemble", "build_constitutive", "check_laws", "solve",
]
