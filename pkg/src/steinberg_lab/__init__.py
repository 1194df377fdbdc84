"""Steinberg modules, Lusztig complexes and derived limits over F2."""
from .errors import CapError, InvariantError, OracleMismatch
from .gf2 import (ChainComplex, CochainComplex, GF2Matrix, Homology, filtered_e1,
                  kernel_basis, rank, rref, solve_linear_system)
from .lattice import (GLElement, PosetView, Subspace, enumerate_GL, enumerate_subspaces,
                      gaussian_binomial, lattice_ops, quotient_chart)
from .steinberg import (gl_on_steinberg, lusztig_complex, r_map, s_map, steinberg,
                        transport)
from .functors import (PosetFunctor, derived_limit, derived_limit_dims, functor_from_json,
                       lambda_phi, make_standard_functor, random_functor)
from .resolutions import (BE1_check, C1_complex, bicomplex_I, ext_from_S0, inj_resolution_simple,
                          klim_bridge, oliver_complex, proj_resolution_simple, tot_resolution)
from .steenrod import (FormProduct, GradedIdeal, Poly, TruncatedPolyAlgebra, a_stability_check,
                       c_V, e_sub_W, ideal_basis, prime_ideal_P_W, serre_radical_check, sq)
from .pf import (EFiniteModule, M_of_V, efinite_toolkit, ephi_doubling_check,
                 generation_check, gl_on_M0, psi_of_ideal, r_pf, steinberg_dual_intertwiner)

__version__ = "0.1.0"
