"""Gamma-function utilities and density normalizing constants.

The two density families handled throughout the package are

  beta:       c_{d,b} (1 - |x|^2)^b   on the open unit ball of R^d, b > -1
  betaPrime:  c~_{d,b} (1 + |x|^2)^-b on all of R^d,                b > d/2

with normalizing constants built from Gamma ratios. Every constant is
assembled in log space and exponentiated at the end; several downstream
formulas run at dimensions in the hundreds where the raw Gamma values
overflow long before the ratios do.
"""

import math

from . import _kernels
from .errors import DomainError, NumericalError

LN_PI = math.log(math.pi)

FAMILIES = ("beta", "betaPrime")


def _check_family(family: str) -> str:
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; expected 'beta' or 'betaPrime'")
    return family


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires finite x > 0, got {x}")
    return math.lgamma(x)


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b), the CDF of the Beta(a, b) law at x."""
    x = float(x)
    a = float(a)
    b = float(b)
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if not (math.isfinite(a) and a > 0.0 and math.isfinite(b) and b > 0.0):
        raise DomainError(f"shape parameters must be positive, got a={a}, b={b}")
    v = _kernels.betainc_xc(a, b, x, 1.0 - x)
    if math.isnan(v):
        raise NumericalError(
            f"incomplete beta continued fraction failed at (x={x}, a={a}, b={b})"
        )
    # continued fraction can land a few ulp outside [0, 1]
    return min(1.0, max(0.0, v))


def log_norm_const(family: str, d: int, beta: float) -> float:
    """ln of the density normalizing constant; same domain as norm_const."""
    _check_family(family)
    d = int(d)
    beta = float(beta)
    if d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    if family == "beta":
        if not beta > -1.0:
            raise DomainError(f"beta family requires beta > -1, got {beta}")
        return math.lgamma(0.5 * d + beta + 1.0) - 0.5 * d * LN_PI - math.lgamma(beta + 1.0)
    if not beta > 0.5 * d:
        raise DomainError(f"betaPrime family requires beta > d/2 = {0.5 * d}, got {beta}")
    return math.lgamma(beta) - 0.5 * d * LN_PI - math.lgamma(beta - 0.5 * d)


def norm_const(family: str, d: int, beta: float) -> float:
    """Normalizing constant of the family's density in R^d."""
    return math.exp(log_norm_const(family, d, beta))


def log_sphere_surface(d: int) -> float:
    """ln of the surface measure of the unit sphere in R^d: 2 pi^{d/2} / Gamma(d/2)."""
    d = int(d)
    if d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    return math.log(2.0) + 0.5 * d * LN_PI - math.lgamma(0.5 * d)


def log_binom(n: int, k: int) -> float:
    """ln binomial(n, k); requires 0 <= k <= n."""
    if k < 0 or k > n:
        raise DomainError(f"binomial index out of range: ({n}, {k})")
    return math.lgamma(n + 1.0) - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0)
