"""Self-contained special functions and adaptive quadrature.

Everything here is implemented in-repo so the quadrature oracle used by the
tests stays independent of the fast evaluation paths.
"""

from ._bessel import bessel_k
from ._erf import erf, erfc
from ._gamma import digamma, gamma_fn, gammaln, gammaln_signed, lgamma_complex
from ._meijer import (
    gg_cdf,
    gg_pdf_kernel,
    gg_sf,
    meijer_g_3_0_1_3,
    meijer_g_3_1_2_4,
)
from ._quad import NumericalFailure, QuadratureSpec, integrate

__all__ = [
    "NumericalFailure",
    "QuadratureSpec",
    "bessel_k",
    "digamma",
    "erf",
    "erfc",
    "gamma_fn",
    "gammaln",
    "gammaln_signed",
    "gg_cdf",
    "gg_pdf_kernel",
    "gg_sf",
    "integrate",
    "lgamma_complex",
    "meijer_g_3_0_1_3",
    "meijer_g_3_1_2_4",
]
