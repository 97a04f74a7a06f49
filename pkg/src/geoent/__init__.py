"""Geometric measure of entanglement for multipartite pure states."""

from .qstate import (FactorShape, PureState, ProductState, ShapeMismatchError, StateFormatError,
                     distance_sq, expand_product, factor_norms, load_state, overlap, random_state,
                     read_state, save_state, write_state)
from .linalg import hermitian_eig, svd
from .closest import (ExtremaReport, ExtremumResult, NoConvergenceError, SolverConfig,
                      ZeroCollapseError, find_extrema)
from .schmidt import (BipartiteSplit, chain_min_over_orders, qubit_split_quadratic,
                      reduced_density, schmidt_chain, schmidt_decompose, von_neumann_entropy)
from .symmetric import SymmetricFamily, build_state, closed_form_nq, fig2_table

__version__ = "0.1.0"
