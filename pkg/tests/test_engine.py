import sys
import os
import unittest
import logging

from pydantic import ValidationError

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.control import ControlFunction, ControlFunctions
from app.engine import (
    EXACT,
    ZERO,
    CoarseParams,
    SampleSpec,
    boundedly_supported_cohomology,
    check_acyclicity_at_infinity,
    coarse_cohomology,
    coarse_cohomology_of_complement,
    consistency_check_dA,
)
from app.errors import ComplementExhausted, MissingBasepoint
from app.spaces.generators import generate_circle_pack, generate_grid
from app.spaces.metric import neighborhood, point_cloud
from app.towers import STABILIZED

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)


class TestCoarseCohomology(unittest.TestCase):
    """
    Coarse cohomology of Euclidean grids and bounded spaces
    """

    def test_line(self):
        X = generate_grid(1, 12, 1.0)
        profile = coarse_cohomology(X, CoarseParams(scale=1.5, max_degree=2, threads=2))
        self.assertFalse(profile.bounded)
        self.assertEqual(profile.degrees[0].verdict, ZERO)
        self.assertEqual(profile.degrees[1].verdict, STABILIZED)
        self.assertEqual([profile.rank(k) for k in range(3)], [0, 1, 0])
        self.assertEqual(profile.provenance["method"], "complement_tower")
        self.assertEqual(len(profile.provenance["stages_used"]), 12)
        self.assertEqual(profile.to_dict()["degrees"][1]["verdict"], "STABILIZED(1)")

    def test_plane(self):
        X = generate_grid(2, 8, 1.0)
        params = CoarseParams(scale=1.5, r_grid=[2.0, 2.5, 3.0, 4.0, 5.0], max_degree=2,
                              window=1, stability=3, threads=2)
        profile = coarse_cohomology(X, params)
        self.assertEqual([profile.rank(k) for k in range(3)], [0, 0, 1])
        self.assertEqual(profile.degrees[2].stage_betti, [1, 1, 1, 1, 1])
        self.assertIn("tower", profile.to_dict())

    def test_plane_with_default_parameters(self):
        X = generate_grid(2, 12, 1.0)
        profile = coarse_cohomology(X, CoarseParams())
        self.assertEqual(profile.provenance["scale"], 1.5)
        self.assertEqual(profile.degrees[2].verdict, STABILIZED)
        self.assertEqual(profile.to_dict()["degrees"][2]["verdict"], "STABILIZED(1)")
        self.assertEqual([profile.rank(k) for k in range(4)], [0, 0, 1, 0])

    def test_bounded_space(self):
        X = point_cloud([[0.0], [1.0], [3.0]])
        profile = coarse_cohomology(X, CoarseParams(max_degree=3))
        self.assertTrue(profile.bounded)
        self.assertEqual([d.verdict for d in profile.degrees], [EXACT] * 4)
        self.assertEqual([profile.rank(k) for k in range(4)], [1, 0, 0, 0])
        self.assertEqual(profile.provenance["method"], "full_complex")

    def test_bounded_override(self):
        X = generate_grid(1, 2, 1.0)
        profile = coarse_cohomology(X, CoarseParams(max_degree=2, bounded=True))
        self.assertEqual([profile.rank(k) for k in range(3)], [1, 0, 0])

    def test_missing_basepoint(self):
        X = point_cloud([[0.0], [1.0]])
        with self.assertRaises(MissingBasepoint):
            coarse_cohomology(X, CoarseParams(bounded=False))

    def test_parameter_validation(self):
        with self.assertRaises(ValidationError):
            CoarseParams(ring="r")
        with self.assertRaises(ValidationError):
            CoarseParams(window=0)


class TestBoundedSupport(unittest.TestCase):
    """
    Boundedly supported cohomology
    """

    def test_bounded_space_has_the_ring_in_degree_zero(self):
        X = point_cloud([[0.0, 0.0], [2.0, 0.0]])
        profile = boundedly_supported_cohomology(X, CoarseParams(max_degree=2, ring="z"))
        self.assertEqual(profile.kind, "bounded_support")
        self.assertEqual([profile.rank(k) for k in range(3)], [1, 0, 0])

    def test_unbounded_shares_the_tower(self):
        X = generate_grid(1, 12, 1.0)
        profile = boundedly_supported_cohomology(X, CoarseParams(scale=1.5, max_degree=1, threads=2))
        self.assertEqual(profile.kind, "bounded_support")
        self.assertEqual([profile.rank(k) for k in range(2)], [0, 1])


class TestComplement(unittest.TestCase):
    """
    Coarse cohomology of X - A
    """

    def test_removing_a_half_line_leaves_a_ray(self):
        X = generate_grid(1, 12, 1.0)
        A = X.select(range(X.basepoint, X.size))
        params = CoarseParams(scale=1.5, r_grid=[2.0, 3.0, 4.0, 5.0, 6.0], max_degree=2,
                              window=1, stability=3)
        profile = coarse_cohomology_of_complement(X, A, params)
        self.assertEqual(profile.kind, "complement")
        self.assertEqual([profile.rank(k) for k in range(3)], [0, 0, 0])

    def test_removing_the_origin(self):
        X = generate_grid(1, 12, 1.0)
        params = CoarseParams(scale=1.5, r_grid=[2.0, 3.0, 4.0, 5.0, 6.0], max_degree=1,
                              window=1, stability=3)
        profile = coarse_cohomology_of_complement(X, X.base_selection(), params)
        self.assertEqual(profile.rank(1), 1)

    def test_removing_the_basepoint_matches_coarse_cohomology(self):
        X = generate_grid(1, 12, 1.0)
        params = CoarseParams(scale=1.5, r_grid=[2.0, 3.0, 4.0, 5.0, 6.0], max_degree=2,
                              window=1, stability=3)
        complement_profile = coarse_cohomology_of_complement(X, X.base_selection(), params)
        coarse_profile = coarse_cohomology(X, params)
        self.assertEqual([d.to_dict() for d in complement_profile.degrees],
                         [d.to_dict() for d in coarse_profile.degrees])
        self.assertEqual(complement_profile.provenance, coarse_profile.provenance)
        self.assertEqual([complement_profile.rank(k) for k in range(3)], [0, 1, 0])

    def test_exhausted(self):
        X = generate_grid(1, 3, 1.0)
        with self.assertRaises(ComplementExhausted):
            coarse_cohomology_of_complement(X, X.everything(), CoarseParams(scale=1.5, r_grid=[1.0]))
        with self.assertRaises(ComplementExhausted):
            coarse_cohomology_of_complement(X, X.base_selection(), CoarseParams(scale=1.5, r_grid=[1.0, 5.0]))


class TestDAConsistency(unittest.TestCase):
    """
    Towers over (X, d) and (X/A, d_A) agree away from A
    """

    def test_circle_pack_about_the_ray(self):
        X = generate_circle_pack(5, 24)
        params = CoarseParams(scale=1.5, r_grid=[1.0, 2.0, 4.0, 6.0, 8.0], max_degree=2, threads=2)
        report = consistency_check_dA(X, X.group("ray"), params)
        self.assertTrue(report.passed, report.mismatches)
        self.assertEqual(report.compared_radii, [4.0, 6.0, 8.0])
        self.assertEqual(report.to_dict()["verdict"], "PASS")
        self.assertEqual(len(report.rows_d), len(report.rows_dA))

    def test_line_about_the_origin(self):
        X = generate_grid(1, 12, 1.0)
        params = CoarseParams(scale=1.5, r_grid=[2.0, 4.0, 6.0, 8.0], max_degree=1)
        report = consistency_check_dA(X, X.base_selection(), params)
        self.assertTrue(report.passed, report.mismatches)
        self.assertEqual(report.compared_radii, [4.0, 6.0, 8.0])

    def test_line_about_a_half_line(self):
        # A = {-12, ..., 0}; the default grid runs from 1.5 to 6 and compares r > 3
        X = generate_grid(1, 12, 1.0)
        A = X.select(range(0, X.basepoint + 1))
        report = consistency_check_dA(X, A, CoarseParams(scale=1.5, max_degree=2, threads=2))
        self.assertTrue(report.passed, report.mismatches)
        self.assertEqual(len(report.compared_radii), 6)
        self.assertGreater(report.compared_radii[0], 3.0)
        self.assertAlmostEqual(report.compared_radii[-1], 6.0)

    def test_plane_about_a_disc(self):
        # the complements X - N_r(A) are annuli around the removed disc
        X = generate_grid(2, 12, 1.0)
        A = neighborhood(X, X.base_selection(), 2.0)
        report = consistency_check_dA(X, A, CoarseParams(scale=1.5, max_degree=2, threads=2))
        self.assertTrue(report.passed, report.mismatches)
        self.assertEqual(len(report.compared_radii), 6)
        self.assertAlmostEqual(report.compared_radii[-1], 6.0)


class TestAcyclicity(unittest.TestCase):
    """
    The sampled acyclicity-at-infinity check
    """

    def test_plane_passes(self):
        X = generate_grid(2, 12, 1.0)
        controls = ControlFunctions(ControlFunction.constant(0.0), ControlFunction.affine(1.0, 2.0))
        sample = SampleSpec(radii=[1.5, 3.0], centers_per_radius=4, seed=5)
        report = check_acyclicity_at_infinity(X, controls, sample, 1.5, max_dim=2)
        self.assertTrue(report.passed)
        self.assertFalse(report.vacuous)
        self.assertEqual(report.samples, 8)
        self.assertEqual(report.to_dict()["label"], "necessary-condition check")

    def test_small_circle_fails(self):
        X = generate_circle_pack(5, 24)
        controls = ControlFunctions(ControlFunction.constant(0.0), ControlFunction.constant(1.0))
        sample = SampleSpec(radii=[2.5], centers=X.group("circle_1").sorted()[:3])
        report = check_acyclicity_at_infinity(X, controls, sample, 1.5, max_dim=2)
        self.assertFalse(report.passed)
        self.assertEqual(report.samples, 3)
        self.assertEqual({v.degree for v in report.violations}, {1})
        self.assertTrue(all(v.center in X.group("circle_1") for v in report.violations))
        self.assertTrue(report.violations[0].witness)
        self.assertEqual(report.to_dict()["verdict"], "FAIL")

    def test_circle_pack_with_quadratic_mu_passes(self):
        # far out every small ball is an arc, a ray segment or a cone at a tangency point
        X = generate_circle_pack(5, 24)
        controls = ControlFunctions(ControlFunction.parse("quad:1,0,0"), ControlFunction.parse("affine:2,4"))
        centers = [50, 60] + X.group("circle_5").sorted()
        sample = SampleSpec(radii=[1.5], centers=centers)
        report = check_acyclicity_at_infinity(X, controls, sample, 1.5, max_dim=2)
        self.assertTrue(report.passed, report.violations)
        self.assertFalse(report.vacuous)
        self.assertEqual(report.samples, 26)

    def test_circle_pack_with_zero_mu_fails_around_a_circle(self):
        X = generate_circle_pack(5, 24)
        controls = ControlFunctions(ControlFunction.constant(0.0), ControlFunction.parse("affine:2,4"))
        sample = SampleSpec(radii=[2.5], centers=X.group("circle_1").sorted()[:3])
        report = check_acyclicity_at_infinity(X, controls, sample, 1.5, max_dim=2)
        self.assertFalse(report.passed)
        circle, ray = X.group("circle_1"), X.group("ray")
        for violation in report.violations:
            self.assertEqual(violation.degree, 1)
            vertices = {v for simplex, _ in violation.witness for v in simplex}
            # ray points alone carry no cycle; the rest of the witness is on circle 1
            off_ray = {v for v in vertices if v not in ray}
            self.assertTrue(off_ray)
            self.assertTrue(all(v in circle for v in off_ray))

        X = generate_grid(2, 6, 1.0)
        controls = ControlFunctions(ControlFunction.constant(0.0), ControlFunction.affine(1.0, 2.0))
        sample = SampleSpec(radii=[1.5], centers=[0])
        report = check_acyclicity_at_infinity(X, controls, sample, 1.5, mode="away")
        self.assertTrue(report.passed)
        self.assertEqual(report.mode, "away")
        self.assertEqual(report.samples, 1)

    def test_vacuous(self):
        X = generate_grid(2, 3, 1.0)
        controls = ControlFunctions(ControlFunction.constant(1000.0), ControlFunction.constant(1.0))
        report = check_acyclicity_at_infinity(X, controls, SampleSpec(radii=[1.5]), 1.5)
        self.assertTrue(report.vacuous)
        self.assertTrue(report.passed)
        self.assertEqual(report.samples, 0)

    def test_unknown_mode(self):
        X = generate_grid(1, 2, 1.0)
        controls = ControlFunctions(ControlFunction.constant(0.0), ControlFunction.constant(1.0))
        with self.assertRaises(ValueError):
            check_acyclicity_at_infinity(X, controls, SampleSpec(), 1.5, mode="sideways")


if __name__ == "__main__":
    unittest.main()
