"""Summation formulas over the roots of p sin(pi x) + x cos(pi x) = 0.

Both sides of each identity are evaluated independently and compared in a
:class:`VerificationReport`.  Submodules: ``eigen`` (roots and weights),
``kernels``, ``quad`` (adaptive and principal-value quadrature), ``zeta``,
``testfns`` (preset test functions), ``sumform`` and ``identities`` (the
formulas), ``campaign`` and ``cli``.
"""

from .campaign import FORMULAS, CampaignConfig, load_config, run_campaign
from .eigen import EigenTable, Params, eigen_table, solve_lambda, weight
from .errors import (BracketFailure, HypothesisViolation, KoshError, PoleMisdeclared, QuadFailure,
                     UnknownPreset)
from .kernels import kernel_K, kernel_K_partial_fraction, sigma, sigma_p
from .report import VerificationReport
from .testfns import AnalyticFunction, parse_preset, preset
from .zeta import ZetaValue, eta_p_integral, eta_p_series, zeta_p_series, zeta_p_via_functional_eq

__version__ = "0.1.0"

__all__ = [
    "FORMULAS", "CampaignConfig", "load_config", "run_campaign",
    "EigenTable", "Params", "eigen_table", "solve_lambda", "weight",
    "BracketFailure", "HypothesisViolation", "KoshError", "PoleMisdeclared", "QuadFailure", "UnknownPreset",
    "kernel_K", "kernel_K_partial_fraction", "sigma", "sigma_p",
    "VerificationReport",
    "AnalyticFunction", "parse_preset", "preset",
    "ZetaValue", "eta_p_integral", "eta_p_series", "zeta_p_series", "zeta_p_via_functional_eq",
]
