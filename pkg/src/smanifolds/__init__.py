"""Finite combinatorial models of stratified manifolds, with and without corners."""

from .rings import StructuralError
from .complex import AffineRealization, Chain, DeltaComplex, boundary_chain, simplicial_complex, validate_complex
from .homology import AbelianGroupPresentation, Z2Cocycle, homology_groups, is_boundary, is_cycle
from .maps import CellMap, StratifiedMap
from .smanifold import (OrientationCert, SManifold, check_orientation, check_orientation_bundle,
                        check_z2_class, closure_poset, find_orientation, fundamental_class,
                        validate_smanifold)
from .corners import (CornerMorphism, FiberPoset, SManifoldC, boundary, check_corner_orientation,
                      corner_counts, corner_lift, corner_space, fiber_poset, find_corner_orientation,
                      has_simplicial_corners, is_bnormal, is_interior, iterated_boundary, validate_corners,
                      validate_morphism)
from .fibre_product import (NonGenericError, OrientationRefused, PLMap, abstract_fibre_product,
                            check_transverse, corner_fibre_product, corner_product,
                            geometric_fibre_product, geometric_product, level_set, mediating_map,
                            orient_fibre_product, swap_law)
from .towers import Group, Tower, hawaiian_tower, mittag_leffler_status, truncated_limit
from .importer import SingularCycleInput, import_cycle, import_relative_cycle

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
