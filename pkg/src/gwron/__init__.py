"""Bethe-ansatz machinery for polynomial Wronskians and Gaudin spectra.

Solve Bethe ansatz equations of master functions, build the fundamental
differential operators of their critical points, construct Gaudin
Hamiltonians on tensor products of representations, and verify counts,
reality, eigenvalues, commutativity, Shapovalov symmetry, exponents, and
polynomial monodromy numerically at desk scale.
"""

from . import bethe, errors, gaudin, jsonio, master, polyops, rep, solver
from .bethe import BetheVector, bethe_basis_check, enumerate_P, is_singular, weight_function
from .gaudin import (OperatorDiffOp, build_K, build_M, central_element_check,
                     commutation_defect, eigenvalue_match, hamiltonian_matrix,
                     polynomial_solutions_check, real_spectrum_check,
                     sample_points, shapovalov_defect, simple_spectrum_check)
from .master import (ExponentSpec, MasterSpec, TuplePoint, TupleY, bae_jacobian,
                     bae_residual, fundamental_op_typeA, log_master,
                     recover_tuple, spec_from_exponents, tuple_y)
from .polyops import (INFINITY, ExponentReport, Poly, RatFn, ScalarDiffOp,
                      compose_factors, exponents_at, find_roots, formal_conjugate,
                      fundamental_operator, is_real_space, monic_wronskian,
                      polynomial_kernel, ramification_points, wronskian)
from .rep import (RepSpace, Subspace, WeightVector, generator_action,
                  multiplicity_N, shapovalov_gram, singular_subspace, sl2_rep,
                  weight_space)
from .solver import (CriticalOrbit, SolveReport, SolveStrategy,
                     conjugation_check, newton_polish, reality_check, solve_all)

__version__ = "0.1.0"
