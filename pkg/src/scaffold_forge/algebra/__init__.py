from .fp import (
    FpScalar,
    InconsistentSystem,
    LinearSystemFp,
    is_prime,
    nullspace_fp,
    require_prime,
    solve_fp,
)
from .laurent import LaurentFrac, frobenius_pow, laurent_series
from .poly import MultiPoly, monomial_key, monomials_up_to
from .prational import fmt_rational, prational

__all__ = [
    "FpScalar",
    "InconsistentSystem",
    "LaurentFrac",
    "LinearSystemFp",
    "MultiPoly",
    "fmt_rational",
    "frobenius_pow",
    "is_prime",
    "laurent_series",
    "monomial_key",
    "monomials_up_to",
    "nullspace_fp",
    "prational",
    "require_prime",
    "solve_fp",
]
