"""Formal group laws over BP, induced power operations and the twisted
ring T, with exact verification of the identities relating them."""

from .poly import F2, QQ, Z4, Poly, Ring, format_poly, parse_poly
from .series import Residual, TruncSeries, compose, revert
from .fgl import Fgl, build_bp_fgl, build_mult_fgl, formal_sum, n_series
from .tring import TContext, TElem, bp_context, ku_context
from .powerop import bp_table, ku_table, p_n_closed, p_n_extracted, ptilde, qbar_eval, u_n
from .ideals import TriangularIdeal, construct_J, nf, realisability_report
from .checks import REGISTRY, run_check, run_checks

__all__ = [
    "F2", "QQ", "Z4", "Poly", "Ring", "format_poly", "parse_poly",
    "Residual", "TruncSeries", "compose", "revert",
    "Fgl", "build_bp_fgl", "build_mult_fgl", "formal_sum", "n_series",
    "TContext", "TElem", "bp_context", "ku_context",
    "bp_table", "ku_table", "p_n_closed", "p_n_extracted", "ptilde", "qbar_eval", "u_n",
    "TriangularIdeal", "construct_J", "nf", "realisability_report",
    "REGISTRY", "run_check", "run_checks",
]
