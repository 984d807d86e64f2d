import sys
import os
import unittest
import logging
from unittest.mock import patch

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.cochains import (
    RawCochain,
    coboundary,
    cochain_from_json,
    diagonal_distance,
    full_complex_cohomology,
    is_boundedly_supported,
    is_coarse_on_truncation,
    random_cochain,
    stabilized_distance,
    support_report,
)
from app.errors import DimensionMismatch, MissingBasepoint, RingMismatch, SizeLimit
from app.spaces.generators import generate_grid
from app.spaces.metric import neighborhood, point_cloud

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)


def line(half_extent):
    return generate_grid(1, half_extent, 1.0)


def ranks(groups):
    return [g.free_rank for g in groups]


class TestRawCochain(unittest.TestCase):
    """
    Construction and arithmetic of sparse cochains
    """

    def test_values(self):
        phi = RawCochain(1, "q", {(0, 1): 2, (1, 0): 0, (2, 2): -1}, size=3)
        self.assertEqual(phi.support, [(0, 1), (2, 2)])
        self.assertEqual(phi((0, 1)), 2)
        self.assertEqual(phi((1, 2)), 0)
        self.assertEqual(phi.vertices(), {0, 1, 2})
        self.assertEqual(len(phi), 2)

    def test_gf2_reduces_values(self):
        phi = RawCochain(0, "gf2", {(0,): 2, (1,): 3})
        self.assertEqual(phi.support, [(1,)])

    def test_bad_tuples(self):
        with self.assertRaises(DimensionMismatch):
            RawCochain(1, "gf2", {(0, 1, 2): 1})
        with self.assertRaises(DimensionMismatch):
            RawCochain(0, "gf2", {(5,): 1}, size=3)
        with self.assertRaises(ValueError):
            RawCochain(-1, "gf2")

    def test_arithmetic(self):
        a = RawCochain(1, "q", {(0, 1): 1, (1, 2): 1})
        b = RawCochain(1, "q", {(0, 1): 1})
        self.assertEqual((a - b).support, [(1, 2)])
        self.assertTrue((a - a).is_zero())
        self.assertEqual((-b)((0, 1)), -1)
        with self.assertRaises(RingMismatch):
            a + RawCochain(1, "gf2", {(0, 1): 1})
        with self.assertRaises(DimensionMismatch):
            a + RawCochain(0, "q", {(0,): 1})

    def test_evaluate(self):
        phi = RawCochain(1, "q", {(0, 1): 2, (1, 2): 3})
        self.assertEqual(phi.evaluate({(0, 1): 1, (1, 2): -1, (2, 3): 5}), -1)

    def test_from_json(self):
        data = {"degree": 1, "ring": "q", "entries": [[[0, 1], "1/2"], [[0, 1], "1/2"], [[1, 1], 3]]}
        phi = cochain_from_json(data, size=2)
        self.assertEqual(phi((0, 1)), 1)
        self.assertEqual(phi.to_json()["entries"], [[[0, 1], "1"], [[1, 1], "3"]])


class TestCoboundary(unittest.TestCase):
    """
    The coboundary on the full tuple complex
    """

    def test_point_indicator(self):
        X = line(1)
        phi = RawCochain(0, "q", {(0,): 1}, size=X.size)
        dphi = coboundary(phi, X)
        # (d phi)(x0, x1) = phi(x1) - phi(x0)
        self.assertEqual(dphi((1, 0)), 1)
        self.assertEqual(dphi((0, 1)), -1)
        self.assertEqual(dphi((0, 0)), 0)
        self.assertEqual(len(dphi), 2 * (X.size - 1))

    def test_square_is_zero(self):
        X = line(2)
        rng = np.random.default_rng(3)
        for ring in ("gf2", "q", "z"):
            for degree in (0, 1):
                phi = random_cochain(X, degree, ring, 6, rng)
                self.assertTrue(coboundary(coboundary(phi, X), X).is_zero())

    def test_square_is_zero_over_many_seeds(self):
        X = line(1)
        for seed in range(200):
            rng = np.random.default_rng(seed)
            for ring in ("gf2", "q", "z"):
                for degree in (0, 1, 2):
                    phi = random_cochain(X, degree, ring, 4, rng)
                    self.assertTrue(coboundary(coboundary(phi, X), X).is_zero(), f"seed={seed} {ring} {degree}")

    def test_coboundary_keeps_the_diagonal_trace(self):
        # on (x, .., x) the n + 2 faces of d phi agree, so the alternating sum is
        # phi(x, .., x) when n is odd and 0 when n is even
        X = line(2)
        for seed in range(50):
            rng = np.random.default_rng(seed)
            for ring in ("gf2", "q", "z"):
                for degree in (0, 1, 2):
                    phi = random_cochain(X, degree, ring, 8, rng, support=[1, 2, 3])
                    trace = support_report(phi, X, []).diag_trace
                    d_trace = support_report(coboundary(phi, X), X, []).diag_trace
                    self.assertTrue(d_trace <= neighborhood(X, X.select(sorted(trace)), 0.0).members)
                    self.assertEqual(d_trace, trace if degree % 2 else set())

    def test_size_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            coboundary(RawCochain(0, "gf2", {(0,): 1}, size=2), line(1))


class TestSupports(unittest.TestCase):
    """
    Diagonal trace, near-diagonal support and the truncation predicates
    """

    def setUp(self):
        # line(3): index i sits at i - 3, the basepoint is index 3
        self.X = line(3)
        self.phi = RawCochain(1, "gf2", {(3, 3): 1, (0, 6): 1}, size=self.X.size)

    def test_distances(self):
        self.assertEqual(diagonal_distance(self.X, (0, 2)), 1.0)
        self.assertEqual(diagonal_distance(self.X, (4, 4, 4)), 0.0)
        self.assertEqual(stabilized_distance(self.X, (0,), (0, 2)), 2.0)

    def test_support_report(self):
        report = support_report(self.phi, self.X, [1.0, 3.0])
        self.assertEqual(report.diag_trace, {3})
        self.assertEqual(report.near_diag[1.0], [(3, 3)])
        self.assertEqual(report.near_diag[3.0], [(0, 6), (3, 3)])
        self.assertEqual(report.near_vertices(3.0), {0, 3, 6})
        self.assertEqual(report.to_dict()["near_diag"]["1"], [[3, 3]])

    def test_bounded_support(self):
        self.assertTrue(is_boundedly_supported(self.phi, self.X, 0.0))
        far = RawCochain(1, "gf2", {(6, 6): 1}, size=self.X.size)
        self.assertFalse(is_boundedly_supported(far, self.X, 2.0))
        self.assertTrue(is_boundedly_supported(far, self.X, 3.0))

    def test_coarse_on_truncation(self):
        self.assertTrue(is_coarse_on_truncation(self.phi, self.X, [1.0], 1.0))
        self.assertFalse(is_coarse_on_truncation(self.phi, self.X, [1.0, 3.0], 1.0))
        self.assertTrue(is_coarse_on_truncation(self.phi, self.X, [1.0, 3.0], 3.0))

    def test_missing_basepoint(self):
        X = point_cloud([[0.0], [1.0]])
        phi = RawCochain(0, "gf2", {(0,): 1})
        with self.assertRaises(MissingBasepoint):
            is_boundedly_supported(phi, X, 1.0)
        with self.assertRaises(MissingBasepoint):
            is_coarse_on_truncation(phi, X, [1.0], 1.0)


class TestFullComplex(unittest.TestCase):
    """
    Ground truth for bounded spaces: the full tuple complex is acyclic
    """

    def test_small_spaces_every_ring(self):
        for points in (1, 2, 3):
            X = point_cloud([[float(i)] for i in range(points)])
            for ring in ("gf2", "q", "z"):
                groups = full_complex_cohomology(X, 3, ring)
                self.assertEqual(ranks(groups), [1, 0, 0, 0], f"{points} points over {ring}")
                self.assertTrue(all(not g.torsion for g in groups))

    def test_five_points(self):
        X = point_cloud([[0, 0], [1, 0], [0, 1], [2, 2], [5, 1]])
        for ring in ("gf2", "q"):
            self.assertEqual(ranks(full_complex_cohomology(X, 3, ring)), [1, 0, 0, 0])
        self.assertEqual(ranks(full_complex_cohomology(X, 2, "z")), [1, 0, 0])

    def test_limits(self):
        X = point_cloud([[float(i)] for i in range(7)])
        with self.assertRaises(SizeLimit):
            full_complex_cohomology(X, 1)
        with self.assertRaises(SizeLimit):
            full_complex_cohomology(point_cloud([[0.0]]), 4)
        with patch.dict(os.environ, {"COARSE_FULL_COMPLEX_MAX_POINTS": "2"}):
            with self.assertRaises(SizeLimit):
                full_complex_cohomology(point_cloud([[0.0], [1.0], [2.0]]), 1)


class TestRandomCochains(unittest.TestCase):
    """
    Seeded random cochains
    """

    def test_reproducible(self):
        X = line(3)
        a = random_cochain(X, 2, "q", 5, np.random.default_rng(11), support=[2, 3, 4])
        b = random_cochain(X, 2, "q", 5, np.random.default_rng(11), support=[2, 3, 4])
        self.assertEqual(a, b)
        self.assertTrue(a.vertices() <= {2, 3, 4})
        self.assertEqual(a.degree, 2)


if __name__ == "__main__":
    unittest.main()
