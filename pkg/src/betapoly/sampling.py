"""Exact samplers: radial point laws, Poisson power-law processes, subspaces.

All randomness flows through :class:`SeededStream`, a (seed, stream_id) pair
backing a counter-based Philox generator, so identical streams reproduce
identical draws bit-exactly and parallel workers get independent streams by
construction rather than by locking.
"""

import dataclasses
import hashlib
import math
from typing import Optional, Tuple, Union

import numpy as np

from . import _kernels, hull
from .errors import DegeneracyError, DomainError, NumericalError
from .specfun import log_sphere_surface

_MASK64 = (1 << 64) - 1

POINT_FAMILIES = ("beta", "betaPrime", "sphereUniform", "gaussian")


def _mix64(z: int) -> int:
    """splitmix64 finalizer; avalanches stream indices into fresh ids."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclasses.dataclass(frozen=True)
class SeededStream:
    """Reproducible random stream: (seed, stream_id) keys a Philox generator."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: Union[int, str]) -> "SeededStream":
        """Derived independent stream; deterministic in (self, index)."""
        if isinstance(index, str):
            h = int.from_bytes(
                hashlib.blake2b(index.encode("utf-8"), digest_size=8).digest(), "big"
            )
        else:
            h = _mix64(int(index) & _MASK64)
        return SeededStream(self.seed, _mix64((self.stream_id ^ h) & _MASK64))


@dataclasses.dataclass(frozen=True)
class DistParams:
    """Point distribution: radially symmetric family, dimension, shape."""

    family: str
    d: int
    beta: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in POINT_FAMILIES:
            raise DomainError(
                f"unknown family {self.family!r}; expected one of {POINT_FAMILIES}"
            )
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "beta", float(self.beta))
        if self.family == "beta" and not self.beta >= -1.0:
            raise DomainError(f"beta family requires beta >= -1, got {self.beta}")
        if self.family == "betaPrime" and not self.beta > 0.5 * self.d:
            raise DomainError(
                f"betaPrime family requires beta > d/2 = {0.5 * self.d}, got {self.beta}"
            )


@dataclasses.dataclass(frozen=True)
class PoissonSample:
    """Realization of the power-law process outside a ball, with its hull.

    All norms exceed epsilon; when stable is true, every facet hyperplane of
    the convex hull lies at distance > epsilon from the origin and the origin
    is interior, so points of norm <= epsilon cannot alter the hull. `facets`
    carries the hull's facet index sets (into `points`) as computed by the
    stability loop.
    """

    points: np.ndarray
    epsilon: float
    stable: bool
    facets: Optional[Tuple[frozenset, ...]] = None

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        object.__setattr__(self, "points", pts)
        if self.epsilon <= 0.0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")
        if pts.size and float(np.min(np.linalg.norm(pts, axis=1))) <= self.epsilon:
            raise DomainError("every point must have norm above epsilon")


def _draw_points(params: DistParams, n: int, gen: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws; the draw order (normals, then radial gammas) is fixed."""
    d = params.d
    g = gen.standard_normal((n, d))
    if params.family == "gaussian":
        return g
    norms = np.linalg.norm(g, axis=1)
    # a zero Gaussian vector is a measure-zero event; guard anyway
    while (norms == 0.0).any():
        bad = norms == 0.0
        g[bad] = gen.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(g, axis=1)
    dirs = g / norms[:, None]
    if params.family == "sphereUniform" or (
        params.family == "beta" and params.beta == -1.0
    ):
        return dirs
    g1 = gen.gamma(0.5 * d, 1.0, size=n)
    if params.family == "beta":
        g2 = gen.gamma(params.beta + 1.0, 1.0, size=n)
        r = np.sqrt(g1 / (g1 + g2))
    else:
        g2 = gen.gamma(params.beta - 0.5 * d, 1.0, size=n)
        r = np.sqrt(g1 / g2)
    return dirs * r[:, None]


def sample_point(params: DistParams, rng: SeededStream) -> np.ndarray:
    """One exact draw from the distribution."""
    return _draw_points(params, 1, rng.generator())[0]


def sample_points(params: DistParams, n: int, rng: SeededStream) -> np.ndarray:
    """n i.i.d. exact draws as an (n, d) array."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    return _draw_points(params, int(n), rng.generator())


# beyond this many (d+1)-subsets the certificate scan is skipped; the facet
# enumerator's strict-side tolerance re-detects any degeneracy downstream
_CERTIFICATE_BUDGET = 2 * 10**6


def sample_config(params: DistParams, n: int, rng: SeededStream) -> hull.PointConfig:
    """n i.i.d. points with a general-position certificate; resamples on failure."""
    n = int(n)
    if n < params.d + 1:
        raise DomainError(f"need n >= d+1 = {params.d + 1}, got {n}")
    check = math.comb(n, params.d + 1) <= _CERTIFICATE_BUDGET
    for attempt in range(10):
        pts = _draw_points(params, n, rng.substream(attempt).generator())
        if not check or _kernels.general_position_ok(pts, hull.GENERAL_POSITION_RTOL):
            return hull.PointConfig(points=pts, d=params.d, general_position=True)
    raise NumericalError(
        "10 consecutive configurations failed the general-position certificate; "
        "the stream or tolerance is broken"
    )


def _pareto_radii(
    gen: np.random.Generator, count: int, alpha: float, lo: float, hi: Optional[float]
) -> np.ndarray:
    """Radii with density proportional to r^{-alpha-1} on (lo, hi)."""
    u = gen.random(count)
    lo_p = lo ** (-alpha)
    if hi is None:
        return (lo_p * (1.0 - u)) ** (-1.0 / alpha)
    hi_p = hi ** (-alpha)
    return (lo_p - u * (lo_p - hi_p)) ** (-1.0 / alpha)


def _poisson_layer(
    gen: np.random.Generator, d: int, alpha: float, lo: float, hi: Optional[float]
) -> np.ndarray:
    """Points of the process with norm in (lo, hi); count is Poisson."""
    mean = math.exp(log_sphere_surface(d)) / alpha * (
        lo ** (-alpha) - (0.0 if hi is None else hi ** (-alpha))
    )
    count = int(gen.poisson(mean))
    if count == 0:
        return np.empty((0, d))
    g = gen.standard_normal((count, d))
    norms = np.linalg.norm(g, axis=1)
    while (norms == 0.0).any():
        bad = norms == 0.0
        g[bad] = gen.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(g, axis=1)
    radii = _pareto_radii(gen, count, alpha, lo, hi)
    return g / norms[:, None] * radii[:, None]


def sample_poisson_hull_points(
    d: int,
    alpha: float,
    rng: SeededStream,
    eps0: float = 1.0,
    max_halvings: int = 20,
) -> PoissonSample:
    """Power-law Poisson process truncated outward of a shrinking ball.

    Simulates the process on {|x| > eps}, starting at eps = eps0. The hull of
    the accumulated points is stable once the origin is strictly interior and
    every facet hyperplane is farther than eps from the origin: any point of
    norm <= eps is then inside the hull, so the truncation no longer matters.
    Until that certificate holds, eps is halved and the fresh annulus is
    added. Facet searches run on the current hull vertices plus the new
    annulus only; since added points can evict but never resurrect vertices,
    this prunes nothing.
    """
    d = int(d)
    alpha = float(alpha)
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    if not alpha > 0.0:
        raise DomainError(f"need alpha > 0, got {alpha}")
    if not eps0 > 0.0:
        raise DomainError(f"need eps0 > 0, got {eps0}")
    gen = rng.generator()
    eps = float(eps0)
    pts = _poisson_layer(gen, d, alpha, eps, None)
    active = np.arange(pts.shape[0])

    for _ in range(max_halvings + 1):
        keep = active
        if active.size >= d + 1:
            cfg = hull.PointConfig(points=pts[active], d=d, general_position=True)
            try:
                local_facets = hull.enumerate_facets(cfg)
            except DegeneracyError:
                # near-tie among current points; more points usually evict it
                local_facets = None
            if local_facets:
                _, offsets = hull.facet_normals(
                    pts[active], [sorted(f) for f in local_facets]
                )
                # offsets are the <u, x> = h > 0 facet planes with the hull
                # interior on the < h side, so offsets > eps certifies both
                # that the origin is strictly interior and that every facet
                # hyperplane is farther than eps from it
                if (offsets > eps).all():
                    facet_sets = tuple(
                        frozenset(int(active[i]) for i in f) for f in local_facets
                    )
                    return PoissonSample(
                        points=pts, epsilon=eps, stable=True, facets=facet_sets
                    )
                vertex_ids = sorted({i for f in local_facets for i in f})
                keep = active[np.array(vertex_ids, dtype=np.int64)]
        # not stable yet: pull in the next annulus
        new_lo = 0.5 * eps
        layer = _poisson_layer(gen, d, alpha, new_lo, eps)
        eps = new_lo
        start = pts.shape[0]
        pts = np.vstack([pts, layer])
        active = np.concatenate([keep, np.arange(start, pts.shape[0])])
    raise NumericalError(
        f"no stable hull after {max_halvings} halvings of the truncation radius"
    )


def sample_uniform_subspace(ambient: int, dim: int, rng: SeededStream) -> np.ndarray:
    """Orthonormal basis (dim rows in R^ambient) of a uniform random subspace.

    Gram-Schmidt applied to dim i.i.d. standard Gaussian vectors, realized as
    a QR factorization with the R diagonal forced positive (the two agree).
    """
    ambient = int(ambient)
    dim = int(dim)
    if ambient < 1 or not 1 <= dim <= ambient:
        raise DomainError(f"need 1 <= dim <= ambient, got dim={dim}, ambient={ambient}")
    a = rng.generator().standard_normal((ambient, dim))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))[None, :]
    return q.T.copy()
