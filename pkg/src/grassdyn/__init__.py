"""Orbit dynamics of linear operators on R^N: Jordan data, supercyclicity bounds,
basis reduction, exact binomial identities and subspace-orbit density."""

from .delta import RationalPolynomial, binomial_poly, check_L_identity, delta_leading_law, delta_poly
from .errors import (DegenerateOrbitError, GrassdynError, InvalidInputError, InvarianceViolationError,
                     ModulusZeroError, PreconditionError, RankDeficiencyError, SingularMatrixError,
                     UnsupportedStructureError)
from .grassmann import (GrassmannDistance, Subspace, complement, grassmann_distance,
                        point_to_subspace_distance, principal_angles)
from .jordan import (BoundReport, JordanStructure, assemble, bounds, example_operator, quotient_operator,
                     recover_structure)
from .matrix_core import BlockSpec, jordan_block, jordan_block_power, matrix_power
from .orbits import (DensityReport, dual_operator, duality_check, esp2sup_membership, kronecker_find,
                     norm_ratio_invariant, orbit_grassmann_density, orbit_point_density,
                     projection_rank_lock)
from .reduction import ChiView, ReducedBasis, chi, reduce, verify_reduction
from .report import VERSION as __version__

__all__ = [name for name in dir() if not name.startswith("_")]
