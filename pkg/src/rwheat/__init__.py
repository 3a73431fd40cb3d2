"""Exact heat-trace asymptotics for Robertson-Walker spin geometries.

The package computes the even coefficients a_{2n} of the small-time expansion
of Tr(exp(-s D^2)) on R x S^3 with metric dt^2 + a(t)^2 dsigma^2, as exact
rational polynomials in a(t) and its derivatives, by a pseudodifferential
parametrix recursion carried out in two independent coordinate systems.
"""

__version__ = "1.0.0"

from .scalars import QuadExt, Rational, Scalar, rational
from .symexpr import Encoding, EvalExpr, SymExpr

__all__ = [
    "Encoding",
    "EvalExpr",
    "QuadExt",
    "Rational",
    "Scalar",
    "SymExpr",
    "rational",
    "__version__",
]
