"""
Test suite for spdcluster_synthgen module.
Tests geodesic-ball sampling and the benchmark generators.
"""

import unittest
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from src.spdcluster_errors import RetriesExhausted
from src.spdcluster_manifold import check_spd, dist_affine, dist_affine_many, dist_log_euclidean, inner_at
from src.spdcluster_synthgen import (
    BallConfig, LabeledDataset, gen_ball_config, gen_mirror_config, random_spd, random_unit_direction,
    sample_ball,
)


class TestSampleBall(unittest.TestCase):
    """Test uniform sampling of geodesic balls."""

    def setUp(self):
        self.C = random_spd(3, np.random.default_rng(0))

    def test_tiny_radius_stays_at_center(self):
        S = sample_ball(self.C, 1e-12, 20, seed=1)
        for X in S:
            np.testing.assert_allclose(X, self.C, atol=1e-9)

    def test_samples_inside_ball(self):
        S = sample_ball(self.C, 0.7, 300, seed=2)
        self.assertEqual(S.shape, (300, 3, 3))
        self.assertTrue(np.all(dist_affine_many(self.C, S) <= 0.7 * (1 + 1e-9)))
        for X in S[:10]:
            check_spd(X)

    def test_radius_distribution(self):
        # for m = 3 the normalized radius has mean 3/4 and standard deviation sqrt(0.0375)
        C = random_spd(2, np.random.default_rng(3))
        S = sample_ball(C, 1.0, 5000, seed=4)
        r = dist_affine_many(C, S)
        self.assertLess(abs(r.mean() - 0.75), 4 * np.sqrt(0.0375 / 5000))

    def test_reproducible(self):
        np.testing.assert_array_equal(sample_ball(self.C, 0.5, 5, 9), sample_ball(self.C, 0.5, 5, 9))

    def test_unit_direction(self):
        V = random_unit_direction(self.C, np.random.default_rng(5))
        self.assertAlmostEqual(inner_at(self.C, V, V), 1.0, places=10)


class TestBallConfig(unittest.TestCase):
    """Test the constrained ball generator."""

    def test_single_ball(self):
        ds = gen_ball_config(BallConfig(k=1, n=3, samples_per_ball=25, seed=1))
        self.assertEqual(len(ds), 25)
        self.assertEqual(ds.k, 1)
        self.assertEqual(ds.provenance['center_draws'], 1)

    def test_ratio_band_holds(self):
        ds = gen_ball_config(BallConfig(k=2, n=3, samples_per_ball=10, d_low=1.1, d_up=3.0, seed=2))
        ratio = dist_affine(ds.centers[0], ds.centers[1]) / (ds.radii[0] + ds.radii[1])
        self.assertGreaterEqual(ratio, 1.1)
        self.assertLessEqual(ratio, 3.0)
        self.assertEqual(ds.points.shape, (20, 3, 3))
        np.testing.assert_array_equal(ds.labels, [0] * 10 + [1] * 10)

    def test_points_in_labeled_balls(self):
        ds = gen_ball_config(BallConfig(k=3, n=2, samples_per_ball=30, d_low=1.1, d_up=4.0, seed=3))
        for j in range(3):
            d = dist_affine_many(ds.centers[j], ds.points[ds.labels == j])
            self.assertTrue(np.all(d <= ds.radii[j] * (1 + 1e-9)))

    def test_impossible_band(self):
        cfg = BallConfig(k=2, n=3, samples_per_ball=5, d_low=1.5, d_up=1.5, seed=4, max_retries=5)
        with self.assertRaises(RetriesExhausted) as cm:
            gen_ball_config(cfg)
        self.assertEqual(cm.exception.pair, (0, 1))

    def test_deterministic(self):
        cfg = BallConfig(k=2, n=2, samples_per_ball=8, seed=5)
        np.testing.assert_array_equal(gen_ball_config(cfg).points, gen_ball_config(cfg).points)

    def test_validation(self):
        with self.assertRaises(ValueError):
            BallConfig(k=2, n=3, samples_per_ball=10, d_low=3.0, d_up=1.0)
        with self.assertRaises(ValueError):
            BallConfig(k=2, n=3, samples_per_ball=10, radius_range=(0.0, 1.0))


class TestMirrorConfig(unittest.TestCase):
    """Test the four-ball mirrored configuration."""

    @classmethod
    def setUpClass(cls):
        cls.ds = gen_mirror_config(4, samples_per_ball=5, seed=6)

    def test_layout(self):
        self.assertEqual(len(self.ds), 20)
        self.assertEqual(self.ds.k, 4)
        self.assertEqual(self.ds.centers.shape, (4, 4, 4))
        self.assertEqual(self.ds.provenance['generator'], 'mirror')

    def test_mirror_distances(self):
        C1, C2, C3, C4 = self.ds.centers
        d12 = dist_affine(C1, C2)
        self.assertAlmostEqual(dist_affine(C3, C4), d12, delta=1e-2 * d12)
        # C1 and C3 commute; compare in log coordinates
        self.assertAlmostEqual(dist_log_euclidean(C1, C3), 24.0, delta=1e-5)

    def test_balls_disjoint(self):
        C = self.ds.centers
        for i in range(4):
            for j in range(i + 1, 4):
                self.assertGreater(dist_affine(C[i], C[j]), 2.0)

    def test_requires_n_at_least_two(self):
        with self.assertRaises(ValueError):
            gen_mirror_config(1, samples_per_ball=2, seed=0)


class TestLabeledDataset(unittest.TestCase):
    """Test the dataset container."""

    def test_unlabeled(self):
        ds = LabeledDataset(np.stack([np.eye(2)] * 3))
        self.assertIsNone(ds.labels)
        self.assertEqual(ds.k, 0)
        self.assertEqual(ds.n, 2)

    def test_length_mismatch(self):
        with self.assertRaises(ValueError):
            LabeledDataset(np.stack([np.eye(2)] * 3), labels=[0, 1])


if __name__ == '__main__':
    unittest.main()
