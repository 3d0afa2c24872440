import pytest

from betapoly.formulas import JProvider
from betapoly.sampling import SeededStream

# two-sided Kolmogorov-Smirnov critical constant at the 1% level: D_crit = c/sqrt(n)
KS_CRIT_1PCT = 1.62762


@pytest.fixture(scope="session")
def exact_provider() -> JProvider:
    # exact-table lookups only; a Monte Carlo fallback inside these tests
    # would mean a formula asked for a J value it should not need
    return JProvider(seed=0, allow_mc=False)


@pytest.fixture()
def stream() -> SeededStream:
    return SeededStream(20260818, 0)
