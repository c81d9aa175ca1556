"""Exact Hochschild cohomology of weight-graded commutative algebras over Q."""

__version__ = "0.1.0"

from .exactlin import ExactMatrix, RowReducer, rank, kernel_basis, cohomology_dim, cohomology_representatives
from .dgalg import FreeDGAlgebra, Derivation, check_square_zero, slice_complex, exterior_algebra
from .koszul import (Presentation, GradedModule, QuotientAlgebra, polynomial_ring, koszul_complex,
                     is_regular_up_to, zero_divisor_check, InhomogeneousElement)
from .bar import bar_differentials, contracting_homotopy_check, hochschild_direct, hochschild_direct_table
from .resolvent import (tate_resolvent, pad_resolvent, kaehler, hkr_table, normal_cone_check,
                        resolvent_independence, BoundTooSmall)
from .cech import (nerve, Chart, Overlap, Space, SimplicialAlgebra, polyvector_module, cech_complex,
                   cech_cohomology, global_hh_smooth, simplicial_hochschild)

__all__ = [
    "__version__",
    "ExactMatrix", "RowReducer", "rank", "kernel_basis", "cohomology_dim", "cohomology_representatives",
    "FreeDGAlgebra", "Derivation", "check_square_zero", "slice_complex", "exterior_algebra",
    "Presentation", "GradedModule", "QuotientAlgebra", "polynomial_ring", "koszul_complex",
    "is_regular_up_to", "zero_divisor_check", "InhomogeneousElement",
    "bar_differentials", "contracting_homotopy_check", "hochschild_direct", "hochschild_direct_table",
    "tate_resolvent", "pad_resolvent", "kaehler", "hkr_table", "normal_cone_check", "resolvent_independence",
    "BoundTooSmall",
    "nerve", "Chart", "Overlap", "Space", "SimplicialAlgebra", "polyvector_module", "cech_complex",
    "cech_cohomology", "global_hh_smooth", "simplicial_hochschild",
]
