"""Invariant Hermitian geometry toolkit.

Sparse exterior algebra over a fixed coframe, Hermitian metrics with the
full pointwise operator kit (Hodge star, Lefschetz pair, division by powers
of the metric form), invariant complex-manifold models from structure
constants, the star-split metric invariants and classification, the
second-order operator suite with identity verifiers, and a derivative-free
metric search.
"""

from .errors import (AlgebraError, DimensionMismatchError, ExpressionError,
                     InputError, StarsplitError, UnboundParameterError)
from .forms import Form, approx_equal, bidegree_component, conjugate, linear_combine, wedge
from .metric import (HermitianMetric, divide_by_power, form_norm, hodge_star,
                     inner_product, lefschetz_L, lefschetz_decompose,
                     lefschetz_lambda, omega_form, omega_power)
from .complex_structure import (InvariantComplexManifold, PullbackMap,
                                adjoint_del, adjoint_delbar, l2_pairing,
                                laplacian_delbar, pullback, pullback_metric,
                                structure_compatibility, total_volume)
from .analysis import (MetricReport, PairReport, TripleReport, classify,
                       conformal_f, eigenvalues_rel_omega, f_scalar,
                       gauduchon_adjoint_on_constant, pair_analysis, rescale_f,
                       rho, star_rho, triple_analysis)
from .operators import (IdentityReport, P, Q, R, S, T, torsion_tau,
                        torsion_tau_bar, verify_commutation_suite,
                        verify_operator_identities)
from .search import (MetricFamily, SearchResult, diagonal_family,
                     hermitian_family, pss_defect, scan, search_pss)
from . import catalog

__version__ = "0.1.0"
