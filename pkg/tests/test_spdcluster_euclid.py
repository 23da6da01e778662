"""
Test suite for spdcluster_euclid module.
Tests Euclidean Frechet maps, multilateration and separability tools.
"""

import unittest
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from src.spdcluster_errors import DegenerateRefs, NoSolution, RefTouchesSet
from src.spdcluster_euclid import (
    EuclidRefs, embed_euclid, hyperplane_separable, in_convex_hull, invert_multilateration,
    midpoint_convexity_check, mutual_coherence, paraboloid_membership, reflect_across_hull,
    sample_ball_euclid,
)

UNIT_REFS = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]


class TestEmbedEuclid(unittest.TestCase):
    """Test the Euclidean map."""

    def test_single_reference(self):
        np.testing.assert_allclose(embed_euclid(EuclidRefs([(0.0, 0.0)], 2), np.array([3.0, 4.0])), [25.0])
        np.testing.assert_allclose(embed_euclid(EuclidRefs([(0.0, 0.0)], 1), np.array([3.0, 4.0])), [5.0])

    def test_point_on_reference(self):
        refs = EuclidRefs(UNIT_REFS, 2)
        self.assertEqual(embed_euclid(refs, np.array(UNIT_REFS[0]))[0], 0.0)

    def test_rowwise(self):
        refs = EuclidRefs(UNIT_REFS, 2)
        X = np.random.default_rng(0).standard_normal((5, 3))
        F = embed_euclid(refs, X)
        self.assertEqual(F.shape, (5, 3))
        np.testing.assert_allclose(F[2], embed_euclid(refs, X[2]))


class TestMultilateration(unittest.TestCase):
    """Test inversion of the squared-distance map."""

    def setUp(self):
        self.refs = EuclidRefs(UNIT_REFS, 2)

    def test_two_mirror_solutions(self):
        d = embed_euclid(self.refs, np.array([1.0, 2.0, 3.0]))
        res = invert_multilateration(self.refs, d)
        self.assertEqual(len(res.solutions), 2)
        found = sorted(tuple(np.round(s, 9)) for s in res.solutions)
        self.assertEqual(found, [(1.0, 2.0, -3.0), (1.0, 2.0, 3.0)])
        self.assertAlmostEqual(res.s_squared, 9.0)

    def test_point_on_hull(self):
        x = np.array([0.25, 0.5, 0.0])
        res = invert_multilateration(self.refs, embed_euclid(self.refs, x))
        self.assertEqual(len(res.solutions), 1)
        np.testing.assert_allclose(res.solutions[0], x, atol=1e-9)

    def test_no_solution(self):
        with self.assertRaises(NoSolution):
            invert_multilateration(self.refs, np.zeros(3))

    def test_degenerate_refs(self):
        with self.assertRaises(DegenerateRefs):
            invert_multilateration(EuclidRefs([(0, 0, 0), (1, 0, 0), (2, 0, 0)], 2), np.ones(3))

    def test_random_round_trips(self):
        rng = np.random.default_rng(1)
        for m in (2, 3, 4):
            refs = EuclidRefs(rng.standard_normal((m, m)) * 3.0, 2)
            x = rng.standard_normal(m)
            sols = invert_multilateration(refs, embed_euclid(refs, x)).solutions
            self.assertLess(min(np.linalg.norm(s - x) for s in sols), 1e-8)

    def test_reflection(self):
        np.testing.assert_allclose(reflect_across_hull(self.refs, np.array([1.0, 2.0, 3.0])), [1.0, 2.0, -3.0])

    def test_paraboloid_membership(self):
        x = np.array([0.3, -1.2, 2.0])
        self.assertTrue(paraboloid_membership(self.refs, embed_euclid(self.refs, x)))
        self.assertFalse(paraboloid_membership(self.refs, np.array([0.0, 0.0, -1.0])))
        on_hull = embed_euclid(self.refs, np.array([0.5, 0.5, 0.0]))
        self.assertTrue(paraboloid_membership(self.refs, on_hull))


class TestCoherence(unittest.TestCase):
    """Test mutual coherence of reference directions."""

    def test_orthogonal_directions(self):
        report = mutual_coherence(EuclidRefs([(1.0, 0.0), (0.0, 1.0)], 2), np.array([[0.0, 0.0]]))
        self.assertAlmostEqual(report.mu, 0.0)
        self.assertAlmostEqual(report.dist_to_set, 1.0)

    def test_diagonal_direction(self):
        report = mutual_coherence(EuclidRefs([(1.0, 0.0), (1.0, 1.0)], 2), np.array([[0.0, 0.0]]))
        self.assertAlmostEqual(report.mu, 1.0 / np.sqrt(2.0))

    def test_identical_references(self):
        report = mutual_coherence(EuclidRefs([(1.0, 0.0), (1.0, 0.0)], 2), np.array([[0.0, 0.0]]))
        self.assertAlmostEqual(report.mu, 1.0)

    def test_condition(self):
        refs = EuclidRefs([(10.0, 0.0), (0.0, 10.0)], 2)
        A = np.array([[0.0, 0.0], [0.1, 0.0]])
        self.assertTrue(mutual_coherence(refs, A, rho=0.1).condition_holds)
        self.assertFalse(mutual_coherence(refs, A, rho=50.0).condition_holds)

    def test_reference_on_set(self):
        with self.assertRaises(RefTouchesSet):
            mutual_coherence(EuclidRefs([(1.0, 0.0), (0.0, 1.0)], 2), np.array([[1.0, 0.0]]))


class TestSeparability(unittest.TestCase):
    """Test linear separability and hull membership."""

    def test_two_points(self):
        self.assertTrue(hyperplane_separable(np.array([[0.0, 0.0]]), np.array([[1.0, 1.0]])))

    def test_xor(self):
        self.assertFalse(hyperplane_separable(np.array([[0.0, 0.0], [1.0, 1.0]]),
                                              np.array([[0.0, 1.0], [1.0, 0.0]])))

    def test_convex_hull(self):
        square = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        self.assertTrue(in_convex_hull(square, np.array([0.5, 0.5])))
        self.assertFalse(in_convex_hull(square, np.array([1.5, 0.5])))

    def test_ball_samples(self):
        rng = np.random.default_rng(2)
        pts = sample_ball_euclid(np.ones(3), 0.5, 200, rng)
        self.assertTrue(np.all(np.linalg.norm(pts - 1.0, axis=1) <= 0.5 + 1e-12))
        shell = sample_ball_euclid(np.zeros(2), 2.0, 50, rng, boundary=True)
        np.testing.assert_allclose(np.linalg.norm(shell, axis=1), 2.0)

    def test_convexity_of_small_ball_image(self):
        rng = np.random.default_rng(3)
        refs = EuclidRefs([(10.0, 0.0), (0.0, 10.0)], 2)
        check = midpoint_convexity_check(refs, np.zeros(2), 0.5, 60, 30, rng)
        self.assertEqual(check.n_midpoints, 30)
        self.assertTrue(check.all_inside)


if __name__ == '__main__':
    unittest.main()
