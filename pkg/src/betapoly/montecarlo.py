"""Simulation oracles for the expectation formulas.

Two kinds of machinery live here. The two-stage estimator for the expected
internal angle of a random simplex face (the J functional, the one
ingredient of the face-count formulas without a closed form), and full
simulation pipelines (f-vectors, external angles, tangent-cone intrinsic
volumes, Poisson hulls, distance laws) that the formula layer is tested
against.

Every estimator walks rep indices 0..reps-1 and derives one substream per
index, so results depend only on (seed, reps), not on worker count or
scheduling. Degenerate realizations are resampled from attempt substreams,
with a hard cap so silent infinite loops cannot occur.
"""

import concurrent.futures
import dataclasses
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .cones import (
    Cone,
    MCEstimate,
    conic_intrinsic_volumes_mc,
    external_angle_mc,
    solid_angle_mc,
    tangent_cone,
)
from .cones import _h_single  # shared per-index Grassmann estimator
from .errors import ConsistencyError, DegeneracyError, DomainError, NumericalError
from .hull import complex_from_facets, enumerate_facets
from .sampling import DistParams, SeededStream, sample_config, sample_points
from .sampling import sample_poisson_hull_points

_MAX_ATTEMPTS = 50

# exact internal angles of a simplex face; keys (ell - m, ) patterns below
_J_FAMILIES = ("beta", "betaPrime")


@dataclasses.dataclass(frozen=True)
class JEstimate:
    """Expected internal angle of the ell-vertex face of an m-point simplex."""

    m: int
    ell: int
    alpha: float
    family: str
    estimate: MCEstimate

    def __post_init__(self) -> None:
        if not 0.0 <= self.estimate.mean <= 1.0:
            raise DomainError("an angle fraction must lie in [0, 1]")


def exact_J(m: int, ell: int) -> Optional[float]:
    """Closed-form internal angle values independent of the shape parameter.

    The full face has angle 1, a facet has angle 1/2, and the vertex angles
    of a triangle average to 1/6 regardless of the vertex law's shape.
    """
    if ell == m:
        return 1.0
    if ell == m - 1:
        return 0.5
    if (m, ell) == (3, 1):
        return 1.0 / 6.0
    if (m, ell) == (2, 1):
        return 0.5
    if (m, ell) == (1, 1):
        return 1.0
    return None


def _map_reps(
    reps: int,
    rng: SeededStream,
    worker: Callable[[SeededStream], np.ndarray],
    threads: int,
    width: int,
) -> np.ndarray:
    """Evaluate worker on one substream per rep index; order-independent."""
    out = np.empty((reps, width))

    def run(r: int) -> None:
        out[r] = worker(rng.substream(r))

    if threads <= 1:
        for r in range(reps):
            run(r)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(reps)))
    return out


def _with_resampling(
    body: Callable[[SeededStream], np.ndarray], rep_stream: SeededStream
) -> np.ndarray:
    for attempt in range(_MAX_ATTEMPTS):
        try:
            return body(rep_stream.substream(attempt))
        except (DegeneracyError, NumericalError):
            continue
    raise NumericalError(
        f"no usable realization in {_MAX_ATTEMPTS} attempts; "
        "the configuration is persistently degenerate"
    )


def _pooled(values: np.ndarray) -> MCEstimate:
    reps = values.shape[0]
    mean = float(values.mean())
    if reps > 1:
        se = float(values.std(ddof=1) / math.sqrt(reps))
    else:
        se = 0.0
    return MCEstimate(mean, se, reps)


def estimate_J(
    family: str,
    m: int,
    ell: int,
    alpha: float,
    outer_reps: int = 10_000,
    inner_samples: int = 1_000,
    rng: Optional[SeededStream] = None,
    use_exact: bool = True,
    threads: int = 1,
) -> JEstimate:
    """Two-stage estimate of the expected internal angle J_{m,ell}.

    The points live in R^{m-1} with the given family and shape. The outer
    stage samples the simplex, the inner stage measures the solid angle of
    the tangent cone at the face of the first ell vertices. The reported
    standard error is the spread of per-configuration angle estimates, which
    carries both the between-configuration and the within-configuration
    variance. Exact values (ell in {m, m-1}, and the shape-free triangle
    vertex) short-circuit the sampling unless use_exact is false.
    """
    if family not in _J_FAMILIES:
        raise DomainError(f"family must be one of {_J_FAMILIES}, got {family!r}")
    if m < 2 or not 1 <= ell <= m:
        raise DomainError(f"need m >= 2 and 1 <= ell <= m, got ({m}, {ell})")
    params = DistParams(family, m - 1, alpha)  # validates alpha for dim m-1
    if use_exact:
        known = exact_J(m, ell)
        if known is not None:
            est = MCEstimate(known, 0.0, max(1, outer_reps))
            return JEstimate(m, ell, float(alpha), family, est)
    if rng is None:
        raise DomainError("an unseeded J estimate would not be reproducible")
    if outer_reps < 1 or inner_samples < 1:
        raise DomainError("outer_reps and inner_samples must be positive")

    d = m - 1

    def worker(rep_stream: SeededStream) -> np.ndarray:
        def body(stream: SeededStream) -> np.ndarray:
            config = sample_config(params, m, stream.substream("config"))
            if ell == m:
                base = config.points[0]
                cone = Cone(d, np.zeros((0, d)), config.points[1:] - base)
            else:
                cone = tangent_cone(config, range(ell))
            est = solid_angle_mc(cone, inner_samples, stream.substream("angle"))
            return np.array([est.mean])

        return _with_resampling(body, rep_stream)

    values = _map_reps(outer_reps, rng, worker, threads, 1)[:, 0]
    return JEstimate(m, ell, float(alpha), family, _pooled(values))


def simulate_expected_fvector(
    params: DistParams,
    n: int,
    reps: int,
    rng: SeededStream,
    threads: int = 1,
) -> Tuple[MCEstimate, ...]:
    """Average face counts of hulls of n sampled points, indices 0..d-1."""
    if reps < 1:
        raise DomainError("reps must be positive")
    d = params.d
    if n < d + 1:
        raise DomainError(f"need at least d+1 = {d + 1} points, got {n}")

    def worker(rep_stream: SeededStream) -> np.ndarray:
        def body(stream: SeededStream) -> np.ndarray:
            config = sample_config(params, n, stream)
            facets = enumerate_facets(config)
            complex_ = complex_from_facets(facets, d)
            return np.array(complex_.fvector, dtype=np.float64)

        return _with_resampling(body, rep_stream)

    table = _map_reps(reps, rng, worker, threads, d)
    return tuple(_pooled(table[:, k]) for k in range(d))


def simulate_expected_external_angle(
    params: DistParams,
    n: int,
    k: int,
    reps: int,
    rng: SeededStream,
    inner_samples: int = 512,
    threads: int = 1,
) -> MCEstimate:
    """Average external angle at the face of the first k sampled points.

    Non-faces contribute zero, matching the convention in the expectation
    formula. In a one-dimensional complement (k = d) the per-configuration
    angle is exact, so the only noise is configuration sampling.
    """
    if not 1 <= k <= params.d:
        raise DomainError(f"face size must lie in [1, {params.d}], got {k}")
    if reps < 1:
        raise DomainError("reps must be positive")

    def worker(rep_stream: SeededStream) -> np.ndarray:
        def body(stream: SeededStream) -> np.ndarray:
            config = sample_config(params, n, stream.substream("config"))
            est = external_angle_mc(
                config, range(k), inner_samples, stream.substream("gauss")
            )
            return np.array([est.mean])

        return _with_resampling(body, rep_stream)

    values = _map_reps(reps, rng, worker, threads, 1)[:, 0]
    return _pooled(values)


def simulate_tangent_civ(
    params: DistParams,
    n: int,
    k: int,
    j: int,
    reps: int,
    rng: SeededStream,
    inner_samples: int = 512,
    threads: int = 1,
) -> MCEstimate:
    """Average j-th conic intrinsic volume of tangent cones at k-point faces.

    When the first k points do not span a face, the tangent cone is all of
    R^d by convention and contributes the indicator of j = d. Only the one
    or two Grassmann angles entering upsilon_j = h_j - h_{j+2} are sampled
    per configuration.
    """
    d = params.d
    if not 1 <= k <= d:
        raise DomainError(f"face size must lie in [1, {d}], got {k}")
    if not k - 1 <= j <= d:
        raise DomainError(f"need k-1 <= j <= d, got j = {j}")
    if reps < 1:
        raise DomainError("reps must be positive")

    def worker(rep_stream: SeededStream) -> np.ndarray:
        def body(stream: SeededStream) -> np.ndarray:
            config = sample_config(params, n, stream.substream("config"))
            cone = tangent_cone(config, range(k))
            if cone.is_subspace:
                # not a face: the cone is R^d
                return np.array([1.0 if j == d else 0.0])
            if j == 0:
                # closure value: 1 - (h_1 + h_2) with h_1 = 1/2 exact
                h2 = _h_single(cone, 2, inner_samples, stream.substream("h2"), 1)
                return np.array([0.5 - h2.mean])
            hj = _h_single(cone, j, inner_samples, stream.substream("hj"), 1)
            if j + 2 <= d:
                hj2 = _h_single(cone, j + 2, inner_samples, stream.substream("hj2"), 1)
                return np.array([hj.mean - hj2.mean])
            return np.array([hj.mean])

        return _with_resampling(body, rep_stream)

    values = _map_reps(reps, rng, worker, threads, 1)[:, 0]
    return _pooled(values)


def simulate_poisson_fvector(
    d: int,
    alpha: float,
    reps: int,
    rng: SeededStream,
    threads: int = 1,
) -> Tuple[MCEstimate, ...]:
    """Average face counts of hulls of the heavy-tailed Poisson process."""
    if reps < 1:
        raise DomainError("reps must be positive")

    def worker(rep_stream: SeededStream) -> np.ndarray:
        def body(stream: SeededStream) -> np.ndarray:
            sample = sample_poisson_hull_points(d, alpha, stream)
            complex_ = complex_from_facets(frozenset(sample.facets), d)
            return np.array(complex_.fvector, dtype=np.float64)

        return _with_resampling(body, rep_stream)

    table = _map_reps(reps, rng, worker, threads, d)
    return tuple(_pooled(table[:, k]) for k in range(d))


def prob_not_face(
    formula_side: Callable[[DistParams, int], Sequence[float]],
    d: int,
    n: int,
    k: int,
    params: DistParams,
) -> float:
    """P[the first k points do not span a face], from an f-vector provider.

    Exchangeability ties the face probability to the expected face count:
    E f_{k-1} = binom(n, k) P[face], so the complement is
    1 - E f_{k-1} / binom(n, k). A provider/simulation mismatch shows up as
    a value outside [0, 1] and is reported instead of clamped away.
    """
    if params.d != d:
        raise DomainError(f"params dimension {params.d} != d = {d}")
    if not 1 <= k <= d:
        raise DomainError(f"face size must lie in [1, {d}], got {k}")
    efv = formula_side(params, n)
    if len(efv) < k:
        raise DomainError("provider returned too few face counts")
    value = 1.0 - float(efv[k - 1]) / math.comb(n, k)
    if value < -1e-8 or value > 1.0 + 1e-8:
        raise ConsistencyError(
            f"face probability {1.0 - value} outside [0, 1]; "
            "the f-vector provider disagrees with exchangeability"
        )
    return min(1.0, max(0.0, value))


def simulate_squared_distance(
    params: DistParams, k: int, reps: int, rng: SeededStream
) -> np.ndarray:
    """Squared distances from the origin to affine hulls of k sampled points.

    k = 1 is the squared-norm law of a single point. Each rep draws a fresh
    k-point configuration.
    """
    if not 1 <= k <= params.d:
        raise DomainError(f"need 1 <= k <= d = {params.d}, got {k}")
    if reps < 1:
        raise DomainError("reps must be positive")
    out = np.empty(reps)
    for r in range(reps):
        pts = sample_points(params, k, rng.substream(r))
        base = pts[0]
        if k == 1:
            out[r] = float(base @ base)
            continue
        diffs = (pts[1:] - base).T  # (d, k-1)
        q, _ = np.linalg.qr(diffs)
        along = q.T @ base
        out[r] = float(base @ base - along @ along)
    return out


def ks_statistic(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """Sup-norm distance between the empirical CDF and a reference CDF."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = xs.size
    if n == 0:
        raise DomainError("need at least one sample")
    try:
        ref = np.asarray(cdf(xs), dtype=np.float64)
        if ref.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        # scalar-only reference CDF
        ref = np.array([float(cdf(x)) for x in xs])
    grid = np.arange(1, n + 1) / n
    d_plus = float((grid - ref).max())
    d_minus = float((ref - (grid - 1.0 / n)).max())
    return max(d_plus, d_minus)
