"""Expected face counts, angles, and conic intrinsic volumes of random polytopes.

Two convex-hull models with radially symmetric inputs (a compactly supported
family on the unit ball and a heavy-tailed family on all of R^d), plus the
hulls of heavy-tailed Poisson point processes and the dual zero cells of
Poisson hyperplane tessellations. Closed formulas and quadrature live in
`betapoly.formulas` / `betapoly.quadrature`; the independent simulation oracle
lives in `betapoly.montecarlo`; `betapoly.cli` exposes everything as the
`betapoly` command.
"""

__version__ = "0.1.0"

from .errors import (
    BetapolyError,
    ConsistencyError,
    DegeneracyError,
    DomainError,
    NumericalError,
)

__all__ = [
    "__version__",
    "BetapolyError",
    "ConsistencyError",
    "DegeneracyError",
    "DomainError",
    "NumericalError",
]
