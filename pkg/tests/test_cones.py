"""Cone predicates and angle estimators against independent oracles.

The LP kernel is cross-checked with exact rational arithmetic (basic-solution
enumeration over Fractions), the intrinsic-volume profile with a brute-force
metric projection based on scipy's NNLS solver.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.optimize

from betapoly.cones import (
    Cone,
    cone_feasible,
    conic_intrinsic_volumes_mc,
    external_angle_mc,
    grassmann_angles_mc,
    solid_angle_mc,
    tangent_cone,
)
from betapoly.errors import DomainError
from betapoly.hull import PointConfig
from betapoly.sampling import SeededStream

QUADRANT = Cone(2, np.array([[1.0, 0.0], [0.0, 1.0]]), np.zeros((0, 2)))
HALFPLANE = Cone(2, np.array([[0.0, 1.0]]), np.array([[1.0, 0.0]]))
TRIANGLE = PointConfig(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]]), 2, True)


def _within(est, target: float, band: float = 3.0) -> bool:
    return abs(est.mean - target) <= band * max(est.std_error, 1e-12)


class TestConeType:
    def test_rejects_zero_generator(self):
        with pytest.raises(DomainError):
            Cone(2, np.array([[0.0, 0.0]]), np.zeros((0, 2)))

    def test_rejects_wrong_width(self):
        with pytest.raises(DomainError):
            Cone(2, np.array([[1.0, 0.0, 0.0]]), np.zeros((0, 3)))

    def test_subspace_detection(self):
        line = Cone(3, np.zeros((0, 3)), np.array([[1.0, 1.0, 0.0]]))
        assert line.is_subspace and line.lineality_dim == 1
        assert not QUADRANT.is_subspace

    def test_generator_inside_lineality_is_dropped(self):
        cone = Cone(2, np.array([[2.0, 0.0], [0.0, 1.0]]), np.array([[1.0, 0.0]]))
        # (2,0) lies in the lineality span, leaving one genuine generator
        assert cone.lineality_dim == 1
        assert not cone.is_subspace


class TestConeFeasible:
    def test_membership_inside(self):
        mat = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
        assert cone_feasible(2, mat, False)

    def test_membership_outside(self):
        mat = np.array([[1.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
        assert not cone_feasible(2, mat, False)

    def test_line_intersection(self):
        # x in pos{e1, e2} and x in span{v}, x != 0: columns (lam1, lam2, mu+, mu-)
        def meets(v) -> bool:
            mat = np.array(
                [
                    [1.0, 0.0, -v[0], v[0], 0.0],
                    [0.0, 1.0, -v[1], v[1], 0.0],
                ]
            )
            return cone_feasible(2, mat, True)

        assert not meets((1.0, -1.0))
        assert meets((1.0, 1.0))

    def test_zero_rhs_needs_normalization(self):
        mat = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        assert cone_feasible(2, mat, False)  # lam = 0 is a witness
        assert not cone_feasible(2, mat, True)  # pointed: no unit-mass witness

    def test_input_validation(self):
        with pytest.raises(DomainError):
            cone_feasible(1, np.array([1.0, 2.0]), False)
        with pytest.raises(DomainError):
            cone_feasible(1, np.array([[np.inf, 1.0]]), False)
        with pytest.raises(DomainError):
            cone_feasible(5, np.array([[1.0, 2.0]]), True)


def _rational_feasible(matrix, require_nonzero: bool) -> bool:
    """Exact oracle for A lam = b, lam >= 0 by basic-solution enumeration.

    A feasible system has a basic feasible solution supported on linearly
    independent columns, so scanning all independent column subsets decides
    feasibility exactly.
    """
    rows = [[Fraction(x) for x in row] for row in matrix]
    if require_nonzero:
        width = len(rows[0])
        rows.append([Fraction(1)] * (width - 1) + [Fraction(1)])
    ncols = len(rows[0]) - 1
    nrows = len(rows)
    b = [r[-1] for r in rows]
    if all(v == 0 for v in b):
        return True  # lam = 0
    for size in range(1, min(ncols, nrows) + 1):
        for subset in itertools.combinations(range(ncols), size):
            aug = [[rows[i][j] for j in subset] + [b[i]] for i in range(nrows)]
            sol = _solve_exact(aug, size)
            if sol is not None and all(v >= 0 for v in sol):
                return True
    return False


def _solve_exact(aug, nvars):
    """Unique rational solution of an augmented system, or None."""
    rows = [row[:] for row in aug]
    pivots = []
    r = 0
    for c in range(nvars):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            return None  # dependent columns; a smaller subset covers this case
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rows[r] = [v / rows[r][c] for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * bb for a, bb in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            return None  # inconsistent
    return [rows[i][-1] for i in range(nvars)]


class TestLPAgainstRationalOracle:
    @pytest.mark.parametrize("trial", range(40))
    def test_random_small_systems(self, trial):
        gen = np.random.default_rng(1000 + trial)
        nrows = int(gen.integers(2, 4))
        ncols = int(gen.integers(2, 7))
        num = gen.integers(-9, 10, size=(nrows, ncols + 1))
        den = gen.integers(1, 11, size=(nrows, ncols + 1))
        exact = [
            [Fraction(int(num[i, j]), int(den[i, j])) for j in range(ncols + 1)]
            for i in range(nrows)
        ]
        require = bool(trial % 3 == 0)
        want = _rational_feasible(exact, require)
        mat = np.array([[float(v) for v in row] for row in exact])
        assert cone_feasible(ncols, mat, require) == want, (
            f"trial {trial}: LP disagrees with the rational oracle "
            f"on\n{mat}\nrequire_nonzero={require}"
        )

    @pytest.mark.parametrize("trial", range(10))
    def test_zero_rhs_pointedness_instances(self, trial):
        gen = np.random.default_rng(2000 + trial)
        ncols = int(gen.integers(2, 7))
        mat_int = gen.integers(-5, 6, size=(2, ncols))
        exact = [[Fraction(int(v)) for v in row] + [Fraction(0)] for row in mat_int]
        want = _rational_feasible(exact, True)
        mat = np.array([[float(v) for v in row] for row in exact])
        assert cone_feasible(ncols, mat, True) == want


class TestSolidAngle:
    def test_half_line(self, stream):
        half = Cone(1, np.array([[1.0]]), np.zeros((0, 1)))
        est = solid_angle_mc(half, 20_000, stream)
        assert _within(est, 0.5)

    def test_quadrant(self, stream):
        est = solid_angle_mc(QUADRANT, 20_000, stream)
        assert _within(est, 0.25)

    @pytest.mark.parametrize("d", [2, 4])
    def test_halfspace(self, d, stream):
        lineality = np.eye(d)[: d - 1]
        cone = Cone(d, np.array([np.eye(d)[d - 1]]), lineality)
        est = solid_angle_mc(cone, 20_000, stream)
        assert _within(est, 0.5)

    def test_subspace_short_circuit(self, stream):
        plane = Cone(3, np.zeros((0, 3)), np.eye(3)[:2])
        est = solid_angle_mc(plane, 100, stream)
        assert est.mean == 1.0 and est.std_error == 0.0

    def test_non_simplicial_cone(self, stream):
        # three planar generators sweeping 135 degrees; the middle one is
        # redundant, forcing the LP membership path
        gens = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 1.0]])
        est = solid_angle_mc(Cone(2, gens, np.zeros((0, 2))), 20_000, stream)
        assert _within(est, 0.375)


class TestTangentCone:
    def test_segment_endpoint(self):
        seg = PointConfig(np.array([[0.0], [2.0]]), 1, True)
        cone = tangent_cone(seg, [0])
        assert cone.lineality.shape[0] == 0
        assert cone.generators.shape == (1, 1)
        assert cone.generators[0, 0] > 0.0

    def test_triangle_edge(self):
        cone = tangent_cone(TRIANGLE, [0, 1])
        assert cone.lineality_dim == 1
        lin = cone.lineality[0] / np.linalg.norm(cone.lineality[0])
        assert abs(abs(lin[0]) - 1.0) <= 1e-12  # edge direction is the x-axis
        assert cone.generators.shape[0] == 1
        assert cone.generators[0, 1] > 0.0  # third point lies above

    def test_non_face_gives_full_space(self):
        square = PointConfig(
            np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]), 2, True
        )
        cone = tangent_cone(square, [0, 3])
        assert cone.is_subspace and cone.lineality_dim == 2

    def test_face_size_bounds(self):
        with pytest.raises(DomainError):
            tangent_cone(TRIANGLE, [0, 1, 2])
        with pytest.raises(DomainError):
            tangent_cone(TRIANGLE, [])


class TestExternalAngle:
    def test_triangle_edge_is_exact(self, stream):
        est = external_angle_mc(TRIANGLE, [0, 1], 64, stream)
        assert est.mean == 0.5 and est.std_error == 0.0

    def test_interval_endpoint(self, stream):
        seg = PointConfig(np.array([[0.0], [2.0]]), 1, True)
        est = external_angle_mc(seg, [0], 64, stream)
        assert est.mean == 0.5

    def test_vertex_angles_of_triangle_sum_to_one(self, stream):
        total = 0.0
        spread = 0.0
        for i in range(3):
            est = external_angle_mc(TRIANGLE, [i], 40_000, stream.substream(i))
            total += est.mean
            spread = math.hypot(spread, est.std_error)
        assert abs(total - 1.0) <= 3 * spread

    def test_non_face_contributes_zero(self, stream):
        square = PointConfig(
            np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]), 2, True
        )
        est = external_angle_mc(square, [0, 3], 64, stream)
        assert est.mean == 0.0


class TestGrassmannAngles:
    def test_quadrant_profile(self, stream):
        prof = grassmann_angles_mc(QUADRANT, 20_000, stream)
        means = prof.means()
        assert means[0] == 0.5  # pinned for cones that are not subspaces
        assert _within(prof.values[1], 0.5)
        assert _within(prof.values[2], 0.25)

    def test_halfplane_every_line_meets(self, stream):
        prof = grassmann_angles_mc(HALFPLANE, 5000, stream)
        # a plane through the origin always meets a halfplane nontrivially,
        # so the top Grassmann angle saturates at its 1/2 ceiling
        assert prof.values[2].mean == 0.5
        assert prof.values[1].mean == 0.5

    def test_rejects_subspace(self, stream):
        line = Cone(2, np.zeros((0, 2)), np.array([[1.0, 0.0]]))
        with pytest.raises(DomainError):
            grassmann_angles_mc(line, 100, stream)


def _nnls_civ_oracle(generators: np.ndarray, samples: int, seed: int) -> np.ndarray:
    """Metric-projection profile: project Gaussians, count active generators."""
    d = generators.shape[1]
    gen = np.random.default_rng(seed)
    counts = np.zeros(d + 1, dtype=np.int64)
    gt = generators.T
    for x in gen.standard_normal((samples, d)):
        lam, _ = scipy.optimize.nnls(gt, x)
        counts[int((lam > 1e-9).sum())] += 1
    return counts / samples


class TestConicIntrinsicVolumes:
    def test_quadrant_profile(self, stream):
        prof = conic_intrinsic_volumes_mc(QUADRANT, 20_000, stream)
        for value, target in zip(prof.values, (0.25, 0.5, 0.25)):
            assert _within(value, target)

    def test_quadrant_against_metric_projection(self, stream):
        oracle = _nnls_civ_oracle(QUADRANT.generators, 20_000, seed=6)
        prof = conic_intrinsic_volumes_mc(QUADRANT, 20_000, stream)
        for k in range(3):
            band = 4 * math.hypot(prof.values[k].std_error, 0.5 / math.sqrt(20_000))
            assert abs(prof.values[k].mean - oracle[k]) <= band

    def test_skewed_3d_cone_against_metric_projection(self, stream):
        gens = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.4, 0.3, 1.0]])
        cone = Cone(3, gens, np.zeros((0, 3)))
        oracle = _nnls_civ_oracle(gens, 20_000, seed=7)
        prof = conic_intrinsic_volumes_mc(cone, 20_000, stream)
        for k in range(4):
            band = 4 * math.hypot(prof.values[k].std_error, 0.5 / math.sqrt(20_000))
            assert abs(prof.values[k].mean - oracle[k]) <= band

    def test_subspace_is_exact_indicator(self, stream):
        line = Cone(2, np.zeros((0, 2)), np.array([[1.0, 0.0]]))
        prof = conic_intrinsic_volumes_mc(line, 100, stream)
        assert list(prof.means()) == [0.0, 1.0, 0.0]
        assert list(prof.std_errors()) == [0.0, 0.0, 0.0]

    def test_profile_sums_to_one(self, stream):
        gens = np.array([[1.0, 0.2, 0.0], [0.1, 1.0, 0.3], [0.0, 0.4, 1.0]])
        prof = conic_intrinsic_volumes_mc(Cone(3, gens, np.zeros((0, 3))), 8000, stream)
        spread = float(np.sqrt((prof.std_errors() ** 2).sum()))
        assert abs(prof.means().sum() - 1.0) <= max(4 * spread, 1e-9)

    @pytest.mark.parametrize(
        "gens",
        [
            np.array([[1.0, 0.0], [0.0, 1.0]]),
            np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.4, 0.3, 1.0]]),
        ],
    )
    def test_gauss_bonnet(self, gens, stream):
        cone = Cone(gens.shape[1], gens, np.zeros((0, gens.shape[1])))
        prof = conic_intrinsic_volumes_mc(cone, 20_000, stream)
        means = prof.means()
        errs = prof.std_errors()
        for parity in (0, 1):
            total = means[parity::2].sum()
            spread = float(np.sqrt((errs[parity::2] ** 2).sum()))
            assert abs(total - 0.5) <= max(4 * spread, 1e-9)

    def test_top_entry_matches_solid_angle(self, stream):
        gens = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.4, 0.3, 1.0]])
        cone = Cone(3, gens, np.zeros((0, 3)))
        prof = conic_intrinsic_volumes_mc(cone, 20_000, stream.substream("p"))
        angle = solid_angle_mc(cone, 20_000, stream.substream("a"))
        band = 4 * math.hypot(prof.values[3].std_error, angle.std_error)
        assert abs(prof.values[3].mean - angle.mean) <= band
