import sys
import os
import math
import unittest
import logging

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.algebra.linalg import field_for
from app.cohomology import cohomology_basis
from app.errors import EmptyComplex, NotASubcomplex, SizeLimit
from app.simplicial import (
    boundary_matrix,
    coboundary_matrix,
    cochain_data,
    cohomology,
    export_complex,
    from_simplices,
    inclusion,
    proximity_graph,
    rips_complex,
)
from app.spaces.generators import generate_grid
from app.spaces.metric import point_cloud

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

# 6-vertex triangulation of the projective plane
PROJECTIVE_PLANE = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5),
]


def unit_square():
    return point_cloud([[0, 0], [1, 0], [1, 1], [0, 1]], name="square")


def hexagon():
    return point_cloud([[math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)] for k in range(6)],
                       name="hexagon")


def ranks(groups):
    return [g.free_rank for g in groups]


class TestRipsComplex(unittest.TestCase):
    """
    Rips construction and its bookkeeping
    """

    def test_square_is_a_cycle(self):
        K = rips_complex(unit_square(), 1.0, 2)
        self.assertEqual(K.counts(), [4, 4])
        self.assertEqual(K.dim, 1)
        self.assertIn((0, 1), K)
        self.assertNotIn((0, 2), K)

    def test_square_with_diagonals(self):
        K = rips_complex(unit_square(), 1.5, 3)
        self.assertEqual(K.counts(), [4, 6, 4, 1])

    def test_line(self):
        K = rips_complex(generate_grid(1, 3), 1.5)
        self.assertEqual(K.counts(), [7, 6])
        self.assertEqual(K.level(2), [])
        self.assertEqual(K.count(5), 0)

    def test_selection(self):
        X = generate_grid(1, 3)
        K = rips_complex(X, 1.5, selection=[0, 1, 2, 5])
        self.assertEqual(K.vertices, [0, 1, 2, 5])
        self.assertEqual(K.level(1), [(0, 1), (1, 2)])

    def test_levels_are_sorted(self):
        K = rips_complex(generate_grid(2, 1), 1.5, 3)
        for level in K.simplices:
            self.assertEqual(level, sorted(level))
            for simplex in level:
                self.assertEqual(list(simplex), sorted(simplex))

    def test_grows_with_the_scale(self):
        X = generate_grid(2, 2)
        complexes = [rips_complex(X, s, 2) for s in (1.0, 1.5, 2.0, 2.5, 3.0)]
        for smaller, larger in zip(complexes, complexes[1:]):
            for level in smaller.simplices:
                for simplex in level:
                    self.assertIn(simplex, larger)
            self.assertTrue(all(a <= b for a, b in zip(smaller.counts(), larger.counts())))

    def test_king_graph_cliques(self):
        # at scale 1.5 a side-m square grid is the king graph: cliques live in the 2x2 blocks
        for n in (1, 2, 3):
            m = 2 * n + 1
            K = rips_complex(generate_grid(2, n), 1.5, 3)
            expected = [m * m, 2 * m * (m - 1) + 2 * (m - 1) ** 2, 4 * (m - 1) ** 2, (m - 1) ** 2]
            self.assertEqual(K.counts(), expected, f"n={n}")
        self.assertEqual(rips_complex(generate_grid(2, 2), 1.5, 3).counts(), [25, 72, 64, 16])

    def test_size_cap(self):
        with self.assertRaises(SizeLimit):
            rips_complex(generate_grid(2, 2), 1.5, 2, max_simplices=20)

    def test_bad_arguments(self):
        with self.assertRaises(ValueError):
            rips_complex(unit_square(), -1.0)

    def test_proximity_graph_weights(self):
        graph = proximity_graph(unit_square(), 1.5)
        self.assertEqual(graph.number_of_edges(), 6)
        self.assertAlmostEqual(graph[0][2]["weight"], math.sqrt(2))

    def test_export(self):
        data = export_complex(rips_complex(unit_square(), 1.0))
        self.assertEqual(data["counts"], [4, 4])
        self.assertEqual(data["simplices"][1][0], [0, 1])
        self.assertEqual(data["scale"], 1.0)


class TestBoundaries(unittest.TestCase):
    """
    Boundary and coboundary matrices
    """

    def test_signs(self):
        K = from_simplices([(0, 1, 2)])
        d2 = boundary_matrix(K, 2)
        # faces (1,2), (0,2), (0,1) enter with +, -, +
        index = K.index(1)
        self.assertEqual(d2.columns[0], {index[(1, 2)]: 1, index[(0, 2)]: -1, index[(0, 1)]: 1})

    def test_boundary_squares_to_zero(self):
        K = rips_complex(generate_grid(2, 1), 1.5, 3)
        for k in (2, 3):
            product = boundary_matrix(K, k - 1).matmul(boundary_matrix(K, k))
            self.assertTrue(product.is_zero())

    def test_coboundary_is_transpose(self):
        K = rips_complex(unit_square(), 1.5, 3)
        self.assertEqual(coboundary_matrix(K, 1).to_dense(), boundary_matrix(K, 2).transpose().to_dense())
        top = coboundary_matrix(K, 3)
        self.assertEqual(top.shape, (0, 1))

    def test_dimension_zero_boundary(self):
        with self.assertRaises(ValueError):
            boundary_matrix(from_simplices([(0, 1)]), 0)


class TestCohomology(unittest.TestCase):
    """
    Cohomology of small complexes in every ring
    """

    def test_square(self):
        K = rips_complex(unit_square(), 1.0, 3)
        for ring in ("gf2", "q", "z"):
            self.assertEqual(ranks(cohomology(K, ring, 2)), [1, 1, 0])
            self.assertEqual(ranks(cohomology(K, ring, 2, reduced=True)), [0, 1, 0])

    def test_filled_square(self):
        K = rips_complex(unit_square(), 1.5, 3)
        for ring in ("gf2", "q", "z"):
            self.assertEqual(ranks(cohomology(K, ring, 2)), [1, 0, 0])

    def test_hexagon(self):
        X = hexagon()
        self.assertEqual(ranks(cohomology(rips_complex(X, 1.2, 3), "q", 2)), [1, 1, 0])
        # above sqrt(3) every point sees all but its antipode: an octahedron
        self.assertEqual(ranks(cohomology(rips_complex(X, 1.8, 3), "q", 2)), [1, 0, 1])

    def test_disconnected(self):
        X = point_cloud([[0.0], [1.0], [10.0]])
        K = rips_complex(X, 1.5)
        self.assertEqual(ranks(cohomology(K, "gf2", 1)), [2, 0])
        self.assertEqual(ranks(cohomology(K, "gf2", 1, reduced=True)), [1, 0])

    def test_projective_plane_torsion(self):
        K = from_simplices(PROJECTIVE_PLANE)
        self.assertEqual(K.counts(), [6, 15, 10])
        integral = cohomology(K, "z", 2)
        self.assertEqual(ranks(integral), [1, 0, 0])
        self.assertEqual([g.torsion for g in integral], [[], [], [2]])
        self.assertEqual(str(integral[2]), "Z/2")
        self.assertEqual(ranks(cohomology(K, "gf2", 2)), [1, 1, 1])
        self.assertEqual(ranks(cohomology(K, "q", 2)), [1, 0, 0])
        # GF(2) and Q disagree by exactly one in the degrees around the torsion
        self.assertEqual(ranks(cohomology(K, "gf2", 2, reduced=True)), [0, 1, 1])
        self.assertEqual(ranks(cohomology(K, "q", 2, reduced=True)), [0, 0, 0])

    def test_empty_complex(self):
        with self.assertRaises(EmptyComplex):
            cohomology(from_simplices([]), "gf2", 1)

    def test_cohomology_basis_of_a_circle(self):
        K = rips_complex(unit_square(), 1.0, 3)
        dims, coboundaries = cochain_data(K, 1, "q")
        basis = cohomology_basis("q", dims, coboundaries, 1)
        self.assertEqual(basis.rank, 1)
        f = field_for("q")
        # the cocycle dual to a single edge represents the generator
        coords = basis.coordinates(f.unit(0))
        self.assertEqual(len(coords), 1)
        reduced0 = cohomology_basis("q", dims, coboundaries, 0)
        self.assertEqual(reduced0.rank, 0)


class TestInclusions(unittest.TestCase):
    """
    Subcomplex inclusions and cochain restriction
    """

    def test_inclusion_positions(self):
        X = generate_grid(1, 3)
        K = rips_complex(X, 1.5, selection=[4, 5, 6])
        L = rips_complex(X, 1.5)
        inc = inclusion(K, L)
        self.assertEqual(inc.positions[0], [4, 5, 6])
        self.assertEqual([L.level(1)[p] for p in inc.positions[1]], [(4, 5), (5, 6)])

    def test_restrict_and_push(self):
        X = generate_grid(1, 3)
        K = rips_complex(X, 1.5, selection=[4, 5, 6])
        L = rips_complex(X, 1.5)
        inc = inclusion(K, L)
        f = field_for("gf2")
        everything = f.vector({i: 1 for i in range(L.count(1))})
        self.assertEqual(inc.restrict(f, everything, 1), f.vector({0: 1, 1: 1}))
        self.assertEqual(inc.push(f, f.unit(0), 1), f.unit(L.index(1)[(4, 5)]))
        self.assertEqual(inc.restrict(f, everything, 2), f.zero_vector())

    def test_not_a_subcomplex(self):
        X = generate_grid(1, 3)
        small = rips_complex(X, 1.5, selection=[0, 1])
        large = rips_complex(X, 1.5)
        with self.assertRaises(NotASubcomplex):
            inclusion(large, small)
        with self.assertRaises(NotASubcomplex):
            inclusion(small, rips_complex(X, 2.5))
        with self.assertRaises(NotASubcomplex):
            inclusion(small, rips_complex(generate_grid(1, 3), 1.5))


if __name__ == "__main__":
    unittest.main()
