"""Polyhedral cones and Monte Carlo angle functionals.

A cone is stored as a lineality part (lines it contains) plus a positive
hull of generators. Tangent cones of simplicial faces decompose exactly
this way: the face's direction space is the lineality, and the remaining
points project onto its orthogonal complement to give the generators.

Three Gaussian/Grassmannian functionals are estimated by sampling:

* solid angle        alpha(C) = P[N in C], N standard normal on lin(C)
* external angle     of a face, via the halfspace event in the complement
* Grassmann angles   h_k(C) = (1/2) P[C meets a uniform (d+1-k)-subspace
                     outside the origin]

Conic intrinsic volumes come from differencing the h-profile rather than
from metric projection: that route needs only LP feasibility. h_k is
conventionally defined for k >= 1; index 0 of an h-profile is fixed at 1/2
for cones that are not subspaces, the value forced by the closure identity
h_1 = upsilon_1 + upsilon_3 + ... and its even counterpart summing to 1/2.

Every membership or intersection predicate reduces to phase-1 simplex
feasibility with Bland's rule (pivot tolerance 1e-10); free variables enter
as +/- pairs so one kernel serves all predicates.
"""

import concurrent.futures
import dataclasses
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .errors import DegeneracyError, DomainError, NumericalError
from .hull import PointConfig
from .sampling import SeededStream

PIVOT_TOL = 1e-10

# sample block granularity for the MC loops; per-block substreams keep the
# estimates independent of how many worker threads execute the blocks
_BLOCK = 8192

_RANK_RTOL = 1e-12


def _orthonormal_rows(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as rows) of the row span, rank-truncated."""
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[1]))
    q, r = np.linalg.qr(vectors.T)
    diag = np.abs(np.diag(r))
    keep = diag > _RANK_RTOL * max(1.0, diag.max())
    return np.ascontiguousarray(q[:, keep].T)


@dataclasses.dataclass(frozen=True)
class Cone:
    """lin(lineality) + pos(generators) in R^ambient_dim.

    Lines contained in the cone belong in ``lineality``; the positive hull
    of the generators is expected to be pointed once projected off the
    lineality span, and the angle routines reject violations instead of
    silently re-splitting the input.
    """

    ambient_dim: int
    generators: np.ndarray
    lineality: np.ndarray

    def __post_init__(self) -> None:
        d = self.ambient_dim
        if not isinstance(d, (int, np.integer)) or d < 1:
            raise DomainError(f"ambient_dim must be a positive integer, got {d!r}")
        gens = _as_vectors(self.generators, d, "generators")
        lin = _as_vectors(self.lineality, d, "lineality")
        norms = np.linalg.norm(gens, axis=1)
        if gens.shape[0] and not (norms > 0.0).all():
            raise DomainError("generators must be nonzero vectors")
        object.__setattr__(self, "ambient_dim", int(d))
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "lineality", lin)

        w_basis = _orthonormal_rows(lin)
        if w_basis.shape[0]:
            proj = gens - (gens @ w_basis.T) @ w_basis
        else:
            proj = gens.copy()
        if proj.shape[0]:
            keep = np.linalg.norm(proj, axis=1) > _RANK_RTOL * np.maximum(norms, 1.0)
            proj = np.ascontiguousarray(proj[keep])
        u_basis = _orthonormal_rows(proj)
        object.__setattr__(self, "_w_basis", w_basis)
        object.__setattr__(self, "_gens_perp", proj)
        object.__setattr__(self, "_u_basis", u_basis)

    @property
    def lineality_dim(self) -> int:
        return self._w_basis.shape[0]

    @property
    def is_subspace(self) -> bool:
        """True when the positive-hull part is trivial."""
        return self._gens_perp.shape[0] == 0

    def _pointed_positive_part(self) -> bool:
        g = self._gens_perp.shape[0]
        if g == 0:
            return True
        aug = np.zeros((self.ambient_dim + 1, g + 1))
        aug[:-1, :-1] = self._gens_perp.T
        aug[-1, :-1] = 1.0
        aug[-1, -1] = 1.0
        return not cone_feasible(g, aug, False)


def _as_vectors(vectors: object, d: int, name: str) -> np.ndarray:
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.size == 0:
        arr = arr.reshape(0, d)
    if arr.ndim != 2 or arr.shape[1] != d:
        raise DomainError(f"{name} must be a sequence of {d}-vectors")
    if not np.isfinite(arr).all():
        raise DomainError(f"{name} must be finite")
    return np.ascontiguousarray(arr)


@dataclasses.dataclass(frozen=True)
class MCEstimate:
    """Sample mean with its standard error."""

    mean: float
    std_error: float
    n_samples: int

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise DomainError("n_samples must be positive")
        if not (self.std_error >= 0.0):
            raise DomainError("std_error must be nonnegative")


@dataclasses.dataclass(frozen=True)
class CIVProfile:
    """Estimates indexed 0..ambient_dim.

    Holds either a conic-intrinsic-volume profile (means sum to 1 up to MC
    error) or a Grassmann-angle h-profile (entry 0 pinned at 1/2 for
    non-subspace cones).
    """

    values: Tuple[MCEstimate, ...]

    def __post_init__(self) -> None:
        if len(self.values) < 2:
            raise DomainError("a profile needs indices 0..ambient_dim")
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def ambient_dim(self) -> int:
        return len(self.values) - 1

    def means(self) -> np.ndarray:
        return np.array([v.mean for v in self.values])

    def std_errors(self) -> np.ndarray:
        return np.array([v.std_error for v in self.values])


def cone_feasible(
    ambient: int, equality_matrix: np.ndarray, require_nonzero: bool
) -> bool:
    """Feasibility of A @ lam = b, lam >= 0 (phase-1 simplex, Bland's rule).

    ``equality_matrix`` is the augmented system [A | b]. The first
    ``ambient`` columns of A are conic-combination multipliers; when
    ``require_nonzero`` is set, the normalization row sum(lam[:ambient]) = 1
    is appended so the zero solution cannot serve as a witness. Trailing
    columns (lineality directions entered as +/- pairs, slacks) stay
    unconstrained by the normalization.
    """
    mat = np.ascontiguousarray(equality_matrix, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[1] < 2:
        raise DomainError("equality_matrix must be a 2-d augmented system [A | b]")
    if not np.isfinite(mat).all():
        raise DomainError("equality_matrix must be finite")
    ncols = mat.shape[1] - 1
    if require_nonzero:
        if not 1 <= ambient <= ncols:
            raise DomainError(
                f"normalization needs 1 <= ambient <= {ncols}, got {ambient}"
            )
        row = np.zeros((1, ncols + 1))
        row[0, :ambient] = 1.0
        row[0, -1] = 1.0
        mat = np.vstack([mat, row])
    status = _kernels.phase1_feasible(
        np.ascontiguousarray(mat[:, :-1]), np.ascontiguousarray(mat[:, -1]), PIVOT_TOL
    )
    if status < 0:
        raise NumericalError("phase-1 simplex pivot breakdown")
    return bool(status)


def _bernoulli_estimate(count: int, samples: int) -> MCEstimate:
    p = count / samples
    if samples > 1:
        se = math.sqrt(max(p * (1.0 - p), 0.0) / (samples - 1))
    else:
        se = 0.0
    return MCEstimate(p, se, samples)


def _blocked_count(
    count_block: Callable[[SeededStream, int], int],
    samples: int,
    rng: SeededStream,
    threads: int,
) -> int:
    """Sum count_block over fixed-size blocks with per-block substreams.

    The block layout depends only on ``samples``, so results are identical
    for any thread count.
    """
    sizes = [_BLOCK] * (samples // _BLOCK)
    if samples % _BLOCK:
        sizes.append(samples % _BLOCK)
    tasks = [(rng.substream(i), size) for i, size in enumerate(sizes)]
    if threads <= 1 or len(tasks) == 1:
        return sum(count_block(stream, size) for stream, size in tasks)
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(count_block, stream, size) for stream, size in tasks]
        return sum(f.result() for f in futures)


def solid_angle_mc(
    cone: Cone, samples: int, rng: SeededStream, threads: int = 1
) -> MCEstimate:
    """alpha(C) = P[N in C] for N standard normal on the linear hull of C.

    The lineality component of N is always in C, so only the component in
    the generator span matters; sampling happens directly in those
    coordinates. Simplicial cones (square well-conditioned generator
    matrix) use a linear solve, the rest an LP feasibility test per draw.
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    gens = cone._gens_perp
    if gens.shape[0] == 0:
        # subspace: every draw on lin(C) lands in C
        return MCEstimate(1.0, 0.0, samples)
    u_basis = cone._u_basis
    q = u_basis.shape[0]
    gu = np.ascontiguousarray(gens @ u_basis.T)  # (g, q) generator rows

    g_cols = np.ascontiguousarray(gu.T)  # (q, g) for the LP kernel
    ginv: Optional[np.ndarray] = None
    if gu.shape[0] == q:
        try:
            cond = np.linalg.cond(gu)
            if np.isfinite(cond) and cond < 1e12:
                ginv = np.ascontiguousarray(np.linalg.inv(gu.T))
        except np.linalg.LinAlgError:
            ginv = None

    def count_block(stream: SeededStream, size: int) -> int:
        draws = stream.generator().standard_normal((size, q))
        if ginv is not None:
            return int(_kernels.membership_count_solve(ginv, draws, PIVOT_TOL))
        got = int(_kernels.membership_count_lp(g_cols, draws, PIVOT_TOL))
        if got < 0:
            raise NumericalError("phase-1 simplex pivot breakdown")
        return got

    count = _blocked_count(count_block, samples, rng, threads)
    return _bernoulli_estimate(count, samples)


def _face_complement_rows(
    config: PointConfig, face_indices: Sequence[int]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(face diffs, complement basis rows, non-face points in complement coords)."""
    pts = config.points
    n, d = pts.shape
    face = sorted(set(int(i) for i in face_indices))
    if len(face) != len(tuple(face_indices)):
        raise DomainError("face_indices must be distinct")
    k = len(face)
    if not 1 <= k <= d:
        raise DomainError(f"face size must lie in [1, {d}], got {k}")
    if face[0] < 0 or face[-1] >= n:
        raise DomainError("face_indices out of range")
    base = pts[face[0]]
    diffs = pts[face[1:]] - base  # (k-1, d)
    if k > 1:
        qfull, r = np.linalg.qr(diffs.T, mode="complete")
        diag = np.abs(np.diag(r[: k - 1, : k - 1])) if k > 1 else np.array([])
        scale = max(1.0, float(np.linalg.norm(diffs, axis=1).max()))
        if diag.size < k - 1 or (diag <= _RANK_RTOL * scale).any():
            raise DegeneracyError("face vertices are affinely dependent")
        comp = qfull[:, k - 1 :].T  # (d-k+1, d)
    else:
        comp = np.eye(d)
    rest = np.array([i for i in range(n) if i not in set(face)], dtype=np.int64)
    y = (pts[rest] - base) @ comp.T  # (n-k, d-k+1)
    return diffs, comp, np.ascontiguousarray(y)


def _is_face_lp(y: np.ndarray) -> bool:
    """Supporting-hyperplane test: exists v with y_i . v <= -1 for all i."""
    m, q = y.shape
    if m == 0:
        return True
    A = np.hstack([y, -y, np.eye(m)])
    aug = np.hstack([A, -np.ones((m, 1))])
    return cone_feasible(2 * q + m, aug, False)


def tangent_cone(config: PointConfig, face_indices: Sequence[int]) -> Cone:
    """Tangent cone of conv(points) at the face spanned by ``face_indices``.

    Lineality is the face's direction space (k-1 difference vectors);
    generators are the remaining points projected onto its orthogonal
    complement, relative to the common projection of the face. When no
    supporting hyperplane separates the face (it is not a face of the
    hull), the cone is all of R^d.
    """
    diffs, comp, y = _face_complement_rows(config, face_indices)
    d = config.points.shape[1]
    if not _is_face_lp(y):
        return Cone(d, np.zeros((0, d)), np.eye(d))
    gens = y @ comp  # back to ambient coordinates, orthogonal to the face span
    return Cone(d, gens, diffs)


def external_angle_mc(
    config: PointConfig,
    face_indices: Sequence[int],
    samples: int,
    rng: SeededStream,
    threads: int = 1,
) -> MCEstimate:
    """External angle of a face: Gaussian mass of the normal cone.

    Works in the (d-k+1)-dimensional complement of the face's direction
    space, counting draws N with <y_i, N> <= 0 for every projected non-face
    point y_i. A one-dimensional complement admits the exact answer (the
    event is a half-line when the subset is a face, null otherwise). By
    convention the angle is 0 when the subset is not a face.
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    _, _, y = _face_complement_rows(config, face_indices)
    q = y.shape[1]
    if y.shape[0] == 0:
        # the whole configuration is the face; its normal cone is {0} in R^0
        return MCEstimate(1.0, 0.0, samples)
    if q == 1:
        scale = float(np.abs(y).max())
        tol = _RANK_RTOL * max(scale, 1.0)
        has_pos = bool((y > tol).any())
        has_neg = bool((y < -tol).any())
        value = 0.0 if (has_pos and has_neg) else 0.5
        return MCEstimate(value, 0.0, samples)

    def count_block(stream: SeededStream, size: int) -> int:
        draws = stream.generator().standard_normal((size, q))
        return int(_kernels.halfspace_event_count(y, draws))

    count = _blocked_count(count_block, samples, rng, threads)
    return _bernoulli_estimate(count, samples)


def _h_single(
    cone: Cone, k: int, samples: int, rng: SeededStream, threads: int
) -> MCEstimate:
    """One Grassmann angle h_k = (1/2) P[C meets a uniform (d+1-k)-subspace].

    Exact entries: h_0 = 1/2 by the convention noted in the module
    docstring, and h_k = 1/2 whenever the subspace dimension plus the
    lineality dimension exceeds d (the intersection is then certain);
    k = 1 always qualifies because the subspace is all of R^d. Anything
    else is sampled with the witness LP
        project(G^T lam + W^T mu) = 0, sum(lam) = 1, lam >= 0, mu free.
    Soundness needs the positive-hull part pointed; lines hiding among the
    generators are rejected.
    """
    d = cone.ambient_dim
    if not 0 <= k <= d:
        raise DomainError(f"Grassmann index must lie in [0, {d}], got {k}")
    if cone.is_subspace:
        raise DomainError(
            "h-profile of a linear subspace is not defined here; "
            "conic_intrinsic_volumes_mc handles subspaces exactly"
        )
    if not cone._pointed_positive_part():
        raise DomainError(
            "positive hull contains a line; move lines into the lineality part"
        )
    w_basis = cone._w_basis
    dim_l = w_basis.shape[0]
    gens = cone._gens_perp
    sub_dim = d + 1 - k
    if k == 0 or k == 1 or sub_dim + dim_l > d:
        return MCEstimate(0.5, 0.0, samples)

    def count_block(stream: SeededStream, size: int) -> int:
        gauss = stream.generator().standard_normal((size, d, d))
        qmat, rmat = np.linalg.qr(gauss)
        sign = np.sign(np.einsum("sii->si", rmat))
        sign[sign == 0.0] = 1.0
        qmat = qmat * sign[:, None, :]
        bperp = np.ascontiguousarray(qmat[:, :, sub_dim:])
        got = int(_kernels.grassmann_hit_count(gens, w_basis, bperp, PIVOT_TOL))
        if got < 0:
            raise NumericalError("phase-1 simplex pivot breakdown")
        return got

    count = _blocked_count(count_block, samples, rng, threads)
    hit = _bernoulli_estimate(count, samples)
    return MCEstimate(0.5 * hit.mean, 0.5 * hit.std_error, samples)


def grassmann_angles_mc(
    cone: Cone, samples: int, rng: SeededStream, threads: int = 1
) -> CIVProfile:
    """h-profile, indices 0..ambient_dim; one substream per sampled index."""
    if samples < 1:
        raise DomainError("samples must be positive")
    d = cone.ambient_dim
    values = [
        _h_single(cone, k, samples, rng.substream(f"h:{k}"), threads)
        for k in range(d + 1)
    ]
    return CIVProfile(tuple(values))


def conic_intrinsic_volumes_mc(
    cone: Cone, samples: int, rng: SeededStream, threads: int = 1
) -> CIVProfile:
    """upsilon-profile via conic Crofton differencing of the h-profile.

    upsilon_k = h_k - h_{k+2} (h vanishes beyond d), and upsilon_0 closes
    the profile to total mass 1. Linear subspaces short-circuit to the
    exact indicator profile at their dimension.
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    d = cone.ambient_dim
    if cone.is_subspace:
        rank = cone.lineality_dim
        values = [
            MCEstimate(1.0 if k == rank else 0.0, 0.0, samples) for k in range(d + 1)
        ]
        return CIVProfile(tuple(values))
    h = grassmann_angles_mc(cone, samples, rng, threads=threads)
    hm = h.means()
    hs = h.std_errors()
    values: list = [None] * (d + 1)
    total = 0.0
    for k in range(1, d + 1):
        upper_m = hm[k + 2] if k + 2 <= d else 0.0
        upper_s = hs[k + 2] if k + 2 <= d else 0.0
        mean = hm[k] - upper_m
        se = math.hypot(hs[k], upper_s)
        values[k] = MCEstimate(mean, se, samples)
        total += mean
    # closure: the telescoping sum above equals h_1 + h_2, so the remainder
    # carries exactly the uncertainty of h_1 and h_2
    values[0] = MCEstimate(1.0 - total, math.hypot(hs[1], hs[2]), samples)
    return CIVProfile(tuple(values))
