"""Expected face counts, angle functionals, and asymptotic constants.

Everything here is an explicit expression: finite sums of quadrature values
times expected internal angles (the J functional), or pure Gamma-ratio
closed forms. J values with no closed form come from a provider that
consults an exact table, then a cache, then a seeded Monte Carlo fallback,
so the accuracy/runtime trade-off stays in the caller's hands.

Closed forms that can exceed float range at large dimension are evaluated
in log space and carry their logarithm alongside the (possibly overflowed)
value, so ratio checks stay well-defined.
"""

import dataclasses
import json
import math
import os
import tempfile
import threading
from typing import Dict, Mapping, Optional, Tuple

from .errors import ConsistencyError, DomainError, NumericalError
from .montecarlo import estimate_J, exact_J
from .quadrature import compute_I, compute_I_tilde, log_asymptotic_coeff
from .sampling import DistParams, SeededStream
from .specfun import LN_PI, log_binom, log_sphere_surface

_LN2 = math.log(2.0)


def _exp_safe(ln: float) -> float:
    """exp that saturates to inf instead of raising past float range."""
    try:
        return math.exp(ln)
    except OverflowError:
        return math.inf


@dataclasses.dataclass(frozen=True)
class FormulaValue:
    """A formula evaluation with uncertainty from any sampled J inputs.

    sigma is 0 for fully closed-form results. terms breaks the value down
    by summation index. log_value is set by the log-space closed forms
    (and is None when the value was assembled additively).
    """

    value: float
    sigma: float
    terms: Mapping[int, float]
    log_value: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.sigma >= 0.0:
            raise DomainError("sigma must be nonnegative")
        object.__setattr__(self, "terms", dict(self.terms))


class JProvider:
    """Expected internal angles of random simplices, on demand.

    Resolution order: exact table (full face, facet, triangle vertex),
    then the in-memory/file cache, then a two-stage Monte Carlo run whose
    stream is derived from the request key, so repeated runs with one seed
    reproduce bit-identically. The cache file is a JSON map from
    "family,m,ell,alpha" (alpha at 12 significant digits) to
    {mean, sigma, n_samples}.
    """

    def __init__(
        self,
        seed: int = 0,
        cache_path: Optional[str] = None,
        outer_reps: int = 10_000,
        inner_samples: int = 1_000,
        threads: int = 1,
        allow_mc: bool = True,
    ) -> None:
        self.seed = int(seed)
        self.cache_path = cache_path
        self.outer_reps = int(outer_reps)
        self.inner_samples = int(inner_samples)
        self.threads = int(threads)
        self.allow_mc = bool(allow_mc)
        self._lock = threading.Lock()
        self._cache: Dict[str, Tuple[float, float]] = {}
        if cache_path is not None and os.path.exists(cache_path):
            self._cache = _load_cache(cache_path)

    @staticmethod
    def key(family: str, m: int, ell: int, alpha: float) -> str:
        return f"{family},{m},{ell},{alpha:.12g}"

    def value(self, family: str, m: int, ell: int, alpha: float) -> Tuple[float, float]:
        """(mean, sigma) for the expected internal angle J_{m,ell}(alpha)."""
        known = exact_J(m, ell)
        if known is not None:
            return known, 0.0
        key = self.key(family, m, ell, alpha)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not self.allow_mc:
            raise DomainError(
                f"no exact or cached value for J[{key}] and Monte Carlo is disabled"
            )
        stream = SeededStream(self.seed, 0).substream(f"J:{key}")
        est = estimate_J(
            family,
            m,
            ell,
            alpha,
            outer_reps=self.outer_reps,
            inner_samples=self.inner_samples,
            rng=stream,
            use_exact=False,
            threads=self.threads,
        )
        result = (est.estimate.mean, est.estimate.std_error)
        with self._lock:
            self._cache[key] = result
            if self.cache_path is not None:
                _store_cache(self.cache_path, self._cache, est.estimate.n_samples)
        return result


def _load_cache(path: str) -> Dict[str, Tuple[float, float]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        out = {}
        for key, entry in raw.items():
            out[str(key)] = (float(entry["mean"]), float(entry["sigma"]))
        return out
    except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
        raise NumericalError(f"unreadable J cache file {path!r}: {exc}") from exc


def _store_cache(path: str, cache: Dict[str, Tuple[float, float]], n: int) -> None:
    payload = {
        key: {"mean": mean, "sigma": sigma, "n_samples": n}
        for key, (mean, sigma) in sorted(cache.items())
    }
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _validate_family_beta(family: str, d: int, beta: float) -> None:
    # DistParams carries the family/shape domain rules
    DistParams(family, d, beta)


def _shift(family: str, d: int, beta: float) -> float:
    """The shape of the one-dimensional integrand: 2*beta + d or 2*beta - d."""
    return 2.0 * beta + d if family == "beta" else 2.0 * beta - d


def expected_fvector(
    family: str, d: int, n: int, beta: float, k: int, j_provider: JProvider
) -> FormulaValue:
    """Expected number of k-faces of the hull of n sampled points.

    The sum runs over s >= 0 with m = d - 2s >= k + 1:
        2 * binom(n, m) binom(m, k+1) I(n, m; shift) J_{m,k+1}(shape_s),
    where shift = 2*beta + d and shape_s = beta + s + 1/2 for the compactly
    supported family, and shift = 2*beta - d, shape_s = beta - s - 1/2 for
    the heavy-tailed one. Terms with binom(m, k+1) = 0 vanish, which
    truncates the sum. sigma combines the J uncertainties of the terms.
    """
    if d < 1:
        raise DomainError(f"need d >= 1, got {d}")
    if n < d + 1:
        raise DomainError(f"need n >= d+1 = {d + 1}, got {n}")
    if not 0 <= k <= d - 1:
        raise DomainError(f"face dimension must lie in [0, {d - 1}], got {k}")
    _validate_family_beta(family, d, beta)
    shift = _shift(family, d, beta)
    quad = compute_I if family == "beta" else compute_I_tilde

    total = 0.0
    var = 0.0
    terms: Dict[int, float] = {}
    s = 0
    while d - 2 * s >= k + 1:
        m = d - 2 * s
        shape = beta + s + 0.5 if family == "beta" else beta - s - 0.5
        j_mean, j_sigma = j_provider.value(family, m, k + 1, shape)
        coeff = (
            2.0
            * math.comb(n, m)
            * math.comb(m, k + 1)
            * quad(n, m, shift).value
        )
        terms[s] = coeff * j_mean
        total += coeff * j_mean
        var += (coeff * j_sigma) ** 2
        s += 1
    return FormulaValue(total, math.sqrt(var), terms)


def expected_external_angle(
    family: str, d: int, n: int, k: int, beta: float
) -> FormulaValue:
    """Expected external angle at the face of k out of n sampled points."""
    if not 1 <= k <= d:
        raise DomainError(f"face size must lie in [1, {d}], got {k}")
    if n < d + 1:
        raise DomainError(f"need n >= d+1 = {d + 1}, got {n}")
    _validate_family_beta(family, d, beta)
    shift = _shift(family, d, beta)
    quad = compute_I if family == "beta" else compute_I_tilde
    value = quad(n, k, shift).value
    return FormulaValue(value, 0.0, {0: value})


def expected_tangent_civ(
    family: str, d: int, n: int, k: int, j: int, beta: float, j_provider: JProvider
) -> FormulaValue:
    """Expected j-th conic intrinsic volume of the tangent cone at a k-face
    (all of R^d when the k points do not span a face, so the non-face mass
    sits at j = d).

    For j < d the value is the single product
        binom(n-k, j-k+1) I(n, j+1; shift) J_{j+1,k}(shape).
    The analogous product at j = d overshoots by half the non-face
    probability, because v_d = h_d and the telescoping that isolates a
    single product needs the Grassmann angle h_{d+2}, which is identically
    zero rather than given by the projection identity. So j = d is
    assembled from the h_d identity directly:
        1 - [E f_{k-1} + E f_{k-1} of the one-dimension-down projection]
            / (2 binom(n, k)),
    the projection being the same family at shape beta +- 1/2. terms: key 0
    holds the product (j < d); at j = d key -1 holds 1 minus half the face
    probability and keys s >= 0 the signed projection-sum terms.
    """
    if not 1 <= k <= d:
        raise DomainError(f"face size must lie in [1, {d}], got {k}")
    if not k - 1 <= j <= d:
        raise DomainError(f"need k-1 <= j <= d, got j = {j}")
    if n < d + 1:
        raise DomainError(f"need n >= d+1 = {d + 1}, got {n}")
    _validate_family_beta(family, d, beta)
    shift = _shift(family, d, beta)
    quad = compute_I if family == "beta" else compute_I_tilde

    if j < d:
        shape = beta + 0.5 * (d - j) if family == "beta" else beta - 0.5 * (d - j)
        j_mean, j_sigma = j_provider.value(family, j + 1, k, shape)
        coeff = math.comb(n - k, j - k + 1) * quad(n, j + 1, shift).value
        return FormulaValue(coeff * j_mean, coeff * j_sigma, {0: coeff * j_mean})

    nk = math.comb(n, k)
    efv = expected_fvector(family, d, n, beta, k - 1, j_provider)
    p_face = efv.value / nk
    if p_face > 1.0 + 1e-8:
        raise ConsistencyError(
            f"face probability {p_face} exceeds 1; "
            "f-vector input is inconsistent with exchangeability"
        )
    p_face = min(1.0, p_face)
    base = 1.0 - 0.5 * p_face
    terms: Dict[int, float] = {-1: base}
    total = base
    var = (0.5 * efv.sigma / nk) ** 2
    s = 0
    while d - 1 - 2 * s >= k:
        m = d - 1 - 2 * s
        shape = beta + s + 1.0 if family == "beta" else beta - s - 1.0
        j_mean, j_sigma = j_provider.value(family, m, k, shape)
        coeff = math.comb(n, m) * math.comb(m, k) * quad(n, m, shift).value / nk
        terms[s] = -coeff * j_mean
        total -= coeff * j_mean
        var += (coeff * j_sigma) ** 2
        s += 1
    return FormulaValue(total, math.sqrt(var), terms)


def expected_fvector_poisson(
    d: int, alpha: float, k: int, j_provider: JProvider
) -> FormulaValue:
    """Expected k-face count of the hull of the heavy-tailed Poisson process.

    Sum over m in {k+1, ..., d} with m congruent to d mod 2 of
        2 * [Gamma((m a + 1)/2) Gamma(a/2)^m
             / (Gamma(m a / 2) Gamma((a+1)/2)^m)]
          * (sqrt(pi) a)^(m-1) / m * binom(m, k+1) * Jt_{m,k+1}((m-1+a)/2),
    Gamma ratios in log space. This is also the large-n limit of the
    heavy-tailed f-vector at shape (d + a)/2.
    """
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    if not 0 <= k <= d - 1:
        raise DomainError(f"face dimension must lie in [0, {d - 1}], got {k}")
    if not alpha > 0.0:
        raise DomainError(f"need alpha > 0, got {alpha}")
    total = 0.0
    var = 0.0
    terms: Dict[int, float] = {}
    m = k + 1 if (k + 1) % 2 == d % 2 else k + 2
    index = 0
    while m <= d:
        ln_coeff = (
            _LN2
            + math.lgamma(0.5 * (m * alpha + 1.0))
            + m * math.lgamma(0.5 * alpha)
            - math.lgamma(0.5 * m * alpha)
            - m * math.lgamma(0.5 * (alpha + 1.0))
            + (m - 1) * (0.5 * LN_PI + math.log(alpha))
            - math.log(m)
            + log_binom(m, k + 1)
        )
        j_mean, j_sigma = j_provider.value("betaPrime", m, k + 1, 0.5 * (m - 1 + alpha))
        coeff = _exp_safe(ln_coeff)
        terms[index] = coeff * j_mean
        total += coeff * j_mean
        var += (coeff * j_sigma) ** 2
        m += 2
        index += 1
    return FormulaValue(total, math.sqrt(var), terms)


def _log_zero_cell_f0(d: int, alpha: float) -> float:
    """log of E f_0 of the zero cell: (2/d)(sqrt(pi) a)^(d-1) Gamma ratio."""
    return (
        _LN2
        - math.log(d)
        + (d - 1) * (0.5 * LN_PI + math.log(alpha))
        + math.lgamma(0.5 * (d * alpha + 1.0))
        + d * math.lgamma(0.5 * alpha)
        - math.lgamma(0.5 * d * alpha)
        - d * math.lgamma(0.5 * (alpha + 1.0))
    )


def expected_fvector_zero_cell(
    d: int, alpha: float, k: int, j_provider: JProvider
) -> FormulaValue:
    """Expected k-face count of the cell around the origin.

    Polarity swaps the cell with the Poisson hull and flips face dimensions
    k <-> d-k-1. Closed forms cover k = 0 (vertex count), k = 1 (edge count
    = (d/2) * vertex count, by the simplicial ridge relation on the dual),
    and the stationary isotropic case k = d-2; the rest goes through the
    flipped Poisson sum.
    """
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    if not 0 <= k <= d - 1:
        raise DomainError(f"face dimension must lie in [0, {d - 1}], got {k}")
    if not alpha > 0.0:
        raise DomainError(f"need alpha > 0, got {alpha}")
    if k == 0:
        ln = _log_zero_cell_f0(d, alpha)
        return FormulaValue(_exp_safe(ln), 0.0, {0: _exp_safe(ln)}, log_value=ln)
    if k == 1:
        ln = _log_zero_cell_f0(d, alpha) + math.log(0.5 * d)
        return FormulaValue(_exp_safe(ln), 0.0, {0: _exp_safe(ln)}, log_value=ln)
    if k == d - 2 and alpha == 1.0:
        ln = math.log(0.5) + log_binom(d + 1, 3) + 2.0 * LN_PI
        return FormulaValue(_exp_safe(ln), 0.0, {0: _exp_safe(ln)}, log_value=ln)
    dual = expected_fvector_poisson(d, alpha, d - k - 1, j_provider)
    log_value = math.log(dual.value) if dual.value > 0.0 else None
    return FormulaValue(dual.value, dual.sigma, dual.terms, log_value=log_value)


def _ln_sphere_limit_coeff(d: int) -> float:
    """log coefficient of the beta = -1 limit of E f_k / n (J factor aside).

    2^d pi^(d/2 - 1) / (d (d-1)^2) * Gamma(1 + d(d-2)/2) / Gamma((d-1)^2/2)
    * (Gamma((d+1)/2) / Gamma(d/2))^(d-1).
    """
    return (
        d * _LN2
        + (0.5 * d - 1.0) * LN_PI
        - math.log(d)
        - 2.0 * math.log(d - 1)
        + math.lgamma(1.0 + 0.5 * d * (d - 2))
        - math.lgamma(0.5 * (d - 1) ** 2)
        + (d - 1) * (math.lgamma(0.5 * (d + 1)) - math.lgamma(0.5 * d))
    )


def _ln_ball_limit_coeff(d: int) -> float:
    """log coefficient of the beta = 0 limit of n^(-(d-1)/(d+1)) E f_k.

    2 pi^(d(d-1)/(2(d+1))) / (d+1)! * Gamma(1 + d^2/2)
    * Gamma((d^2+1)/(d+1)) / Gamma((d^2+1)/2)
    * ((d+1) Gamma((d+1)/2) / Gamma(1 + d/2))^((d^2+1)/(d+1)).
    """
    p = (d * d + 1.0) / (d + 1.0)
    return (
        _LN2
        + 0.5 * d * (d - 1) / (d + 1.0) * LN_PI
        - math.lgamma(d + 2)
        + math.lgamma(1.0 + 0.5 * d * d)
        + math.lgamma(p)
        - math.lgamma(0.5 * (d * d + 1))
        + p
        * (math.log(d + 1.0) + math.lgamma(0.5 * (d + 1)) - math.lgamma(1.0 + 0.5 * d))
    )


def fvector_asymptotic_const(
    d: int, k: int, beta: float, j_provider: JProvider
) -> FormulaValue:
    """Limit of n^(-(d-1)/(2 beta + d + 1)) E f_k for the compact family.

    (2/d!) binom(d, k+1) J_{d,k+1}(beta + 1/2) times the n-free coefficient
    of the large-n law of I(n, d; 2 beta + d). Valid down to beta = -1
    (points on the sphere, where the scaling becomes 1/n). At beta = -1 and
    beta = 0 the dedicated reduced coefficients are used and cross-checked
    against the general expression; a mismatch raises ConsistencyError.
    """
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    if not 0 <= k <= d - 1:
        raise DomainError(f"face dimension must lie in [0, {d - 1}], got {k}")
    if not beta >= -1.0:
        raise DomainError(f"need beta >= -1, got {beta}")
    shift = 2.0 * beta + d
    ln_general = (
        _LN2
        - math.lgamma(d + 1)
        + log_asymptotic_coeff("beta", d, shift)
    )
    ln_coeff = ln_general
    if beta == -1.0:
        ln_coeff = _ln_sphere_limit_coeff(d)
    elif beta == 0.0:
        ln_coeff = _ln_ball_limit_coeff(d)
    if abs(ln_coeff - ln_general) > 1e-9 * max(1.0, abs(ln_general)):
        raise ConsistencyError(
            f"reduced and general asymptotic coefficients disagree at beta={beta}: "
            f"{ln_coeff} vs {ln_general}"
        )
    ln_coeff += log_binom(d, k + 1)
    j_mean, j_sigma = j_provider.value("beta", d, k + 1, beta + 0.5)
    coeff = _exp_safe(ln_coeff)
    return FormulaValue(coeff * j_mean, coeff * j_sigma, {0: coeff * j_mean})


def affine_surface_area_const(d: int, k: int, j_provider: JProvider) -> FormulaValue:
    """Universal constant tying hull face counts to affine surface area.

    For hulls of uniform points in a smooth convex body, the k-face count
    scales like n^((d-1)/(d+1)) times this constant times the body's affine
    surface area; it equals the uniform-ball limit divided by the ball's
    affine surface area 2 pi^(d/2) / Gamma(d/2).
    """
    ball = fvector_asymptotic_const(d, k, 0.0, j_provider)
    omega = math.exp(log_sphere_surface(d))
    return FormulaValue(ball.value / omega, ball.sigma / omega, {0: ball.value / omega})


def zero_cell_highdim_asymptotic(d: int, k: int, alpha: float) -> FormulaValue:
    """Large-d asymptotic of the zero cell's expected k-face count.

    General schedule (any fixed alpha > 0):
        sqrt(a)/2^(k-1/2) * (Gamma(a/2)/Gamma((a+1)/2))^d
        * (sqrt(pi) a)^(d-1) * d^(k-1/2) / k!.
    Stationary isotropic case alpha = 1 reduces to
        pi^(d-1/2) (d/2)^(k-1/2) / k!
    (algebraically identical to the general schedule). When alpha equals d
    (the typical cell of the nearest-point tessellation) the display
        e^(1/4) 2^((d+1)/2-k) pi^((d-1)/2) d^(d/2+k-1) / k!
    is used instead; it differs at finite d by the second-order Gamma-ratio
    expansion that produces the e^(1/4) factor. Schedules where alpha varies
    with d in any other way are untested here. Evaluated in log space; the
    value may overflow to inf while log_value stays finite.
    """
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    if k < 0:
        raise DomainError(f"need k >= 0, got {k}")
    if not alpha > 0.0:
        raise DomainError(f"need alpha > 0, got {alpha}")
    if float(alpha) == float(d):
        ln = (
            0.25
            + (0.5 * (d + 1) - k) * _LN2
            + 0.5 * (d - 1) * LN_PI
            + (0.5 * d + k - 1) * math.log(d)
            - math.lgamma(k + 1)
        )
    elif alpha == 1.0:
        ln = (d - 0.5) * LN_PI + (k - 0.5) * (math.log(d) - _LN2) - math.lgamma(k + 1)
    else:
        ln = (
            0.5 * math.log(alpha)
            - (k - 0.5) * _LN2
            + d * (math.lgamma(0.5 * alpha) - math.lgamma(0.5 * (alpha + 1.0)))
            + (d - 1) * (0.5 * LN_PI + math.log(alpha))
            + (k - 0.5) * math.log(d)
            - math.lgamma(k + 1)
        )
    return FormulaValue(_exp_safe(ln), 0.0, {0: _exp_safe(ln)}, log_value=ln)


def half_sphere_expected_fvector(
    d: int, k: int, j_provider: JProvider, n: Optional[int] = None
) -> FormulaValue:
    """Expected k-face count of the spherical hull of n uniform points on a
    half-sphere of dimension d (living in R^(d+1)).

    Identical in law to the heavy-tailed polytope at shape (d+1)/2, so this
    delegates there. n = None gives the n -> infinity limit, which is the
    Poisson hull value at unit exponent.
    """
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    if n is None:
        return expected_fvector_poisson(d, 1.0, k, j_provider)
    if n < d + 1:
        raise DomainError(f"need n >= d+1 = {d + 1}, got {n}")
    return expected_fvector("betaPrime", d, n, 0.5 * (d + 1), k, j_provider)
