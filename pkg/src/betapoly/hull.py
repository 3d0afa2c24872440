"""Convex hulls of small point configurations by exhaustive facet search.

Inputs are random and in general position almost surely, so every hull here
is simplicial: facets are d-element vertex sets, every proper face is a
vertex subset of some facet, and the face lattice is free once the facets
are known. A candidate d-subset is a facet exactly when all remaining points
lie strictly on one side of its affine hull; ties within a relative
tolerance are rejected as degenerate rather than perturbed, since silent
perturbation would bias downstream angle statistics.
"""

import dataclasses
import itertools
import math
from typing import FrozenSet, Iterable, Mapping, Sequence, Tuple

import numpy as np

from . import _kernels
from .errors import ConsistencyError, DegeneracyError, DomainError

GENERAL_POSITION_RTOL = 1e-10
SIDE_RTOL = 1e-10

# combinatorial budget of the exhaustive scan; the planar/spatial allowance is
# larger because heavy-tailed Poisson hull pipelines run there with pruned but
# occasionally sizable active sets
_MAX_N_HIGH_DIM = 25
_MAX_N_LOW_DIM = 600
_MAX_D = 7


@dataclasses.dataclass(frozen=True)
class PointConfig:
    """n points of R^d with a general-position certificate."""

    points: np.ndarray
    d: int
    general_position: bool

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.d:
            raise DomainError(
                f"points must form an (n, {self.d}) array, got shape {pts.shape}"
            )
        if not np.isfinite(pts).all():
            raise DomainError("points must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclasses.dataclass(frozen=True)
class HullComplex:
    """Full face lattice of a simplicial polytope, by vertex index sets."""

    facets: FrozenSet[FrozenSet[int]]
    faces_by_dim: Mapping[int, FrozenSet[FrozenSet[int]]]
    fvector: Tuple[int, ...]


def _check_budget(n: int, d: int) -> None:
    if d < 1 or d > _MAX_D:
        raise DomainError(f"dimension must lie in [1, {_MAX_D}], got {d}")
    cap = _MAX_N_LOW_DIM if d <= 3 else _MAX_N_HIGH_DIM
    if n > cap:
        raise DomainError(
            f"facet enumeration budget allows n <= {cap} for d = {d}, got n = {n}"
        )


def enumerate_facets(config: PointConfig) -> FrozenSet[FrozenSet[int]]:
    """All facets of conv(points) as d-element index sets."""
    if not config.general_position:
        raise DomainError("facet enumeration requires the general-position certificate")
    n, d = config.points.shape
    _check_budget(n, d)
    if n < d + 1:
        raise DomainError(f"a full-dimensional hull needs n >= d+1 = {d + 1} points, got {n}")
    if d == 1:
        xs = config.points[:, 0]
        lo = int(np.argmin(xs))
        hi = int(np.argmax(xs))
        if lo == hi or abs(xs[hi] - xs[lo]) <= SIDE_RTOL * max(abs(xs[hi]), abs(xs[lo]), 1.0):
            raise DegeneracyError("all points coincide within tolerance")
        return frozenset({frozenset({lo}), frozenset({hi})})
    buf = np.empty((math.comb(n, d), d), dtype=np.int64)
    count, status = _kernels.enumerate_facets_impl(config.points, SIDE_RTOL, buf)
    if status != 0:
        raise DegeneracyError(
            "a point lies within tolerance of a candidate facet hyperplane "
            "(or a candidate d-subset is affinely dependent)"
        )
    facets = frozenset(frozenset(int(i) for i in row) for row in buf[:count])
    if len(facets) < d + 1:
        raise DegeneracyError(f"only {len(facets)} facets found; hull is not full-dimensional")
    return facets


def complex_from_facets(
    facets: Iterable[FrozenSet[int]], d: int
) -> HullComplex:
    """Face lattice of a simplicial polytope given its facet vertex sets.

    Valid because every proper face of a simplicial polytope is the convex
    hull of a vertex subset of some facet, and every subset of a simplex
    facet's vertex set spans a face.
    """
    facets = frozenset(frozenset(f) for f in facets)
    faces: dict[int, set] = {k: set() for k in range(d)}
    for f in facets:
        verts = sorted(f)
        if len(verts) != d:
            raise DomainError(f"facet {verts} does not have d = {d} vertices")
        for size in range(1, d + 1):
            for sub in itertools.combinations(verts, size):
                faces[size - 1].add(frozenset(sub))
    fvector = tuple(len(faces[k]) for k in range(d))
    euler = sum((-1) ** k * fvector[k] for k in range(d))
    if euler != 1 - (-1) ** d:
        raise ConsistencyError(f"Euler relation violated by f-vector {fvector}")
    if d >= 2 and 2 * fvector[d - 2] != d * fvector[d - 1]:
        raise ConsistencyError(
            f"facet/ridge incidence count violated by f-vector {fvector}"
        )
    return HullComplex(
        facets=facets,
        faces_by_dim={k: frozenset(v) for k, v in faces.items()},
        fvector=fvector,
    )


def face_lattice(config: PointConfig) -> HullComplex:
    """Facets plus all lower faces and the f-vector of conv(points)."""
    return complex_from_facets(enumerate_facets(config), config.d)


def is_face(config: PointConfig, subset: Iterable[int]) -> bool:
    """Whether the given vertex index set spans a face of conv(points)."""
    sub = frozenset(int(i) for i in subset)
    if not sub:
        raise DomainError("the empty set is not a candidate face")
    if len(sub) > config.d:
        return False
    lattice = face_lattice(config)
    return sub in lattice.faces_by_dim[len(sub) - 1]


def facet_normals(points: np.ndarray, facets: Sequence[Sequence[int]]):
    """Outward unit normals and offsets <u, x> = h of the given facets.

    Orientation is fixed by requiring the centroid of all points to satisfy
    <u, centroid> < h. Returns (normals, offsets) arrays.
    """
    pts = np.asarray(points, dtype=np.float64)
    d = pts.shape[1]
    center = pts.mean(axis=0)
    normals = np.empty((len(facets), d))
    offsets = np.empty(len(facets))
    for i, f in enumerate(facets):
        verts = sorted(f)
        base = pts[verts[0]]
        diffs = pts[verts[1:]] - base
        # unit normal = last right singular vector of the (d-1) x d diff matrix
        _, sv, vh = np.linalg.svd(diffs)
        if d > 1 and (sv.size < d - 1 or sv[-1] <= 1e-12 * max(sv[0], 1e-300)):
            raise DegeneracyError(f"facet {verts} is affinely dependent")
        u = vh[-1]
        h = float(u @ base)
        side = float(u @ center) - h
        if abs(side) <= 1e-14 * max(abs(h), 1.0):
            raise DegeneracyError("hull centroid lies on a facet hyperplane")
        if side > 0.0:
            u = -u
            h = -h
        normals[i] = u
        offsets[i] = h
    return normals, offsets
