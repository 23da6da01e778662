"""
Test suite for spdcluster_refpoints module.
Tests random and principled reference-point selection.
"""

import unittest
import sys
import os
from unittest import mock

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from src.spdcluster_embed import FrechetMapSpec, embed_dataset
from src.spdcluster_errors import TooFewPoints
from src.spdcluster_manifold import check_positive, dist_affine, log_map
from src.spdcluster_partition import KMeansConfig
from src.spdcluster_refpoints import PrincipledParams, estimate_radius, select_principled, select_random
from src.spdcluster_synthgen import gen_mirror_config, sample_ball


def balls(centers, radius=0.4, per_ball=15, seed=0):
    data = np.concatenate([sample_ball(C, radius, per_ball, seed + i) for i, C in enumerate(centers)])
    return data, np.repeat(np.arange(len(centers)), per_ball)


def _diag_exp(*logs):
    return np.diag(np.exp(np.asarray(logs, dtype=float)))


TWO_CENTERS = [np.eye(3), _diag_exp(3.0, -3.0, 0.0)]
FIVE_CENTERS = [
    np.eye(3),
    _diag_exp(4.0, 0.0, 0.0),
    _diag_exp(0.0, 4.0, 0.0),
    _diag_exp(0.0, 0.0, 4.0),
    _diag_exp(-4.0, -4.0, 0.0),
]


class TestRandomSelection(unittest.TestCase):
    """Test uniform selection from the dataset."""

    def setUp(self):
        self.data, _ = balls(TWO_CENTERS)

    def test_whole_dataset(self):
        refs = select_random(self.data, len(self.data), seed=1)
        self.assertEqual(len(refs), len(self.data))
        found = sorted(int(np.argmin([np.abs(X - R).sum() for X in self.data])) for R in refs)
        self.assertEqual(found, list(range(len(self.data))))

    def test_single_reference(self):
        refs = select_random(self.data, 1, seed=2)
        self.assertEqual(refs.shape, (1, 3, 3))
        self.assertTrue(any(np.array_equal(refs[0], X) for X in self.data))

    def test_deterministic(self):
        np.testing.assert_array_equal(select_random(self.data, 4, 3), select_random(self.data, 4, 3))

    def test_too_many(self):
        with self.assertRaises(TooFewPoints):
            select_random(self.data, len(self.data) + 1, 0)


class TestEstimateRadius(unittest.TestCase):
    """Test the sampled radius quantile."""

    def test_copies_of_mean(self):
        M = _diag_exp(0.5, 0.1, -0.2)
        self.assertEqual(estimate_radius([M] * 10, M, n_rho=50), 0.0)

    def test_nearest_rank_quantile(self):
        cluster = [_diag_exp(d, 0.0) for d in np.arange(1, 11) / 10.0]
        self.assertAlmostEqual(estimate_radius(cluster, np.eye(2), n_rho=50, quantile=0.9), 0.9, places=12)

    def test_all_points_used_when_small(self):
        cluster = [_diag_exp(d, 0.0) for d in np.arange(1, 11) / 10.0]
        self.assertEqual(estimate_radius(cluster, np.eye(2), 10, 0.9, seed=1),
                         estimate_radius(cluster, np.eye(2), 10, 0.9, seed=2))


class TestPrincipledSelection(unittest.TestCase):
    """Test placement on geodesics through approximate cluster means."""

    def setUp(self):
        self.data, self.truth = balls(TWO_CENTERS, seed=10)
        self.kmeans = KMeansConfig(k=2, restarts=3, seed=11)

    def test_far_pair_refs_between_means(self):
        refs, report = select_principled(self.data, 2, PrincipledParams(seed=1), self.kmeans)
        self.assertEqual(refs.shape, (2, 3, 3))
        pair = report.pairs[0]
        self.assertEqual(pair.case, 'far')
        self.assertEqual(pair.t, 0.35)
        Mi, Mj = report.means
        d = dist_affine(Mi, Mj)
        for R in refs:
            self.assertLess(dist_affine(Mi, R), d)
            self.assertLess(dist_affine(Mj, R), d)

    def test_close_pair_refs_beyond_means(self):
        params = PrincipledParams(eps_d=100.0, seed=1)
        refs, report = select_principled(self.data, 2, params, self.kmeans)
        pair = report.pairs[0]
        self.assertEqual(pair.case, 'close')
        for R in refs:
            self.assertAlmostEqual(dist_affine(pair.midpoint, R), 5.0 * pair.distance / 2.0, places=6)

    def test_refs_collinear_with_means(self):
        refs, report = select_principled(self.data, 2, PrincipledParams(seed=1), self.kmeans)
        mid = report.pairs[0].midpoint
        axis = log_map(mid, report.means[1])
        axis /= np.linalg.norm(axis)
        for R in refs:
            v = log_map(mid, R)
            cosine = float(np.sum(v * axis) / np.linalg.norm(v))
            self.assertAlmostEqual(abs(cosine), 1.0, places=6)

    def test_five_clusters_give_twenty_refs(self):
        data, _ = balls(FIVE_CENTERS, radius=0.3, seed=20)
        refs, report = select_principled(data, 5, PrincipledParams(seed=2), KMeansConfig(k=5, restarts=5, seed=3))
        self.assertEqual(refs.shape, (20, 3, 3))
        self.assertFalse(report.degenerate)
        self.assertEqual(report.n_refs, 20)
        self.assertEqual(len(report.to_dict()['pairs']), 10)

    def test_mirrored_balls(self):
        ds = gen_mirror_config(4, samples_per_ball=15, seed=7)
        kmeans = KMeansConfig(k=4, restarts=3, seed=3)
        refs, report = select_principled(ds.points, 4, PrincipledParams(seed=2), kmeans)
        self.assertFalse(report.degenerate)
        self.assertEqual(refs.shape, (12, 4, 4))
        self.assertEqual(report.n_refs, 12)
        for R in refs:
            check_positive(R)
        F = embed_dataset(FrechetMapSpec(refs, 1), ds.points)
        self.assertEqual(F.shape, (60, 12))
        self.assertTrue(np.all(np.isfinite(F)))

    def test_coincident_means_fall_back(self):
        with mock.patch('src.spdcluster_refpoints.frechet_mean_icm', return_value=np.eye(3)):
            refs, report = select_principled(self.data, 2, PrincipledParams(seed=3), self.kmeans)
        self.assertTrue(report.degenerate)
        self.assertEqual(report.to_dict()['strategy'], 'random_fallback')
        self.assertEqual(len(refs), 2)
        self.assertEqual(report.n_refs, 2)
        self.assertEqual(report.to_dict()['n_refs'], 2)

    def test_requires_two_clusters(self):
        with self.assertRaises(ValueError):
            select_principled(self.data, 1)

    def test_params_validation(self):
        with self.assertRaises(ValueError):
            PrincipledParams(t_close=0.5)
        with self.assertRaises(ValueError):
            PrincipledParams(t_far=1.0)


if __name__ == '__main__':
    unittest.main()
