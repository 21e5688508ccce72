"""Koornwinder-Macdonald (multivariable Askey-Wilson) polynomials with numeric identity checks."""

from .koornwinder import (
    KMPolynomial,
    NormalizedEval,
    build_gs,
    build_op,
    evaluation_constant,
    gustafson_constant,
    norm_closed_form,
    norm_quadrature,
    normalized,
    phi43,
    pieri_rhs,
)
from .operators import apply_Dr, coeff_U, coeff_U_chain, coeff_V, eigen_E, eigen_Er, operator_matrix
from .params import Params, default_param_sets, dual, is_self_dual, make_params
from .partitions import SignedSet, dominance_leq, down_set, signed_moves
from .symcore import QuadGrid, SymPoly, eval_monomial, eval_sympoly, expand_from_samples, inner_product
from .verify import CHECK_IDS, Config, Report, run_all, run_check

__version__ = "0.1.0"

__all__ = [
    "KMPolynomial",
    "NormalizedEval",
    "build_gs",
    "build_op",
    "evaluation_constant",
    "gustafson_constant",
    "norm_closed_form",
    "norm_quadrature",
    "normalized",
    "phi43",
    "pieri_rhs",
    "apply_Dr",
    "coeff_U",
    "coeff_U_chain",
    "coeff_V",
    "eigen_E",
    "eigen_Er",
    "operator_matrix",
    "Params",
    "default_param_sets",
    "dual",
    "is_self_dual",
    "make_params",
    "SignedSet",
    "dominance_leq",
    "down_set",
    "signed_moves",
    "QuadGrid",
    "SymPoly",
    "eval_monomial",
    "eval_sympoly",
    "expand_from_samples",
    "inner_product",
    "CHECK_IDS",
    "Config",
    "Report",
    "run_all",
    "run_check",
]
