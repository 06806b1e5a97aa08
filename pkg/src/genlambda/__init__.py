"""Generalized lambda functions: exact q-expansions, modular equations, CM values."""

__version__ = "0.1.0"

from .cyclotomic import CycloContext, CyclotomicNumber, cyclo_context, zeta_pow
from .qlaurent import PrecisionExhausted, QLaurentSeries
from .phiexp import LambdaParams, UnimodularMatrix, brace, lambda_slash, phi_order, phi_slash, theta, w_slash
from .cosets import build_transversal, same_coset
from .modpoly import ModularEquation, modular_equation
from .cmeval import CMPoint, IntegralityCertificate, certify_integral, eval_lambda

__all__ = [
    "CMPoint",
    "CycloContext",
    "CyclotomicNumber",
    "IntegralityCertificate",
    "LambdaParams",
    "ModularEquation",
    "PrecisionExhausted",
    "QLaurentSeries",
    "UnimodularMatrix",
    "brace",
    "build_transversal",
    "certify_integral",
    "cyclo_context",
    "eval_lambda",
    "lambda_slash",
    "modular_equation",
    "phi_order",
    "phi_slash",
    "same_coset",
    "theta",
    "w_slash",
    "zeta_pow",
]
