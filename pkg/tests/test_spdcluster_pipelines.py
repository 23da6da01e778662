"""
Test suite for spdcluster_pipelines module.
Tests the IRC, ARC, LEC and FMC clustering pipelines.
"""

import unittest
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from src.spdcluster_embed import FrechetMapSpec
from src.spdcluster_errors import DimMismatch, NotPositiveDefinite, TooFewPoints
from src.spdcluster_evaluation import accuracy
from src.spdcluster_manifold import log_euclidean_mean
from src.spdcluster_mean import frechet_mean_icm
from src.spdcluster_partition import KMeansConfig
from src.spdcluster_pipelines import cluster_arc, cluster_fmc, cluster_irc, cluster_lec, log_coordinates
from src.spdcluster_refpoints import select_random
from src.spdcluster_synthgen import sample_ball


def two_balls(per_ball=20, seed=0):
    """Two radius-0.5 balls in SPD(3) whose centers are about 4.2 apart."""
    centers = [np.eye(3), np.diag([np.exp(3.0), np.exp(-3.0), 1.0])]
    data = np.concatenate([sample_ball(C, 0.5, per_ball, seed + i) for i, C in enumerate(centers)])
    return data, np.repeat([0, 1], per_ball)


def commuting_clusters(seed=0):
    rng = np.random.default_rng(seed)
    logs = np.concatenate([rng.normal(0.0, 0.2, (15, 3)), rng.normal(2.5, 0.2, (15, 3))])
    return np.stack([np.diag(np.exp(row)) for row in logs]), np.repeat([0, 1], 15)


class TestRiemannianPipelines(unittest.TestCase):
    """Test IRC and ARC."""

    def setUp(self):
        self.data, self.truth = two_balls()
        self.cfg = KMeansConfig(k=2, restarts=3, seed=1)

    def test_irc_separates_balls(self):
        part = cluster_irc(self.data, self.cfg)
        self.assertEqual(accuracy(self.truth, part.labels, 2), 1.0)
        self.assertEqual(part.centroids.shape, (2, 3, 3))
        self.assertEqual(part.metadata['centroid_method'], 'gd')

    def test_arc_separates_balls(self):
        part = cluster_arc(self.data, self.cfg)
        self.assertEqual(accuracy(self.truth, part.labels, 2), 1.0)
        self.assertEqual(part.metadata['centroid_method'], 'icm')

    def test_arc_single_cluster_is_icm_mean(self):
        part = cluster_arc(self.data, KMeansConfig(k=1, restarts=1, seed=2))
        np.testing.assert_allclose(part.centroids[0], frechet_mean_icm(self.data), rtol=1e-12)

    def test_arc_shuffled_order_is_reproducible(self):
        a = cluster_arc(self.data, self.cfg, icm_order_seed=4)
        b = cluster_arc(self.data, self.cfg, icm_order_seed=4)
        np.testing.assert_array_equal(a.labels, b.labels)
        np.testing.assert_array_equal(a.centroids, b.centroids)

    def test_irc_matches_lec_on_commuting_data(self):
        data, truth = commuting_clusters()
        irc = cluster_irc(data, self.cfg)
        lec = cluster_lec(data, self.cfg)
        self.assertEqual(accuracy(irc.labels, lec.labels, 2), 1.0)
        self.assertEqual(accuracy(truth, irc.labels, 2), 1.0)

    def test_bad_point_index(self):
        data = self.data.copy()
        data[5] = np.diag([1.0, -1.0, 1.0])
        with self.assertRaises(NotPositiveDefinite) as cm:
            cluster_irc(data, self.cfg)
        self.assertEqual(cm.exception.index, 5)


class TestLogEuclideanPipeline(unittest.TestCase):
    """Test LEC."""

    def setUp(self):
        self.data, self.truth = two_balls(seed=10)

    def test_separates_balls(self):
        part = cluster_lec(self.data, KMeansConfig(k=2, seed=3))
        self.assertEqual(accuracy(self.truth, part.labels, 2), 1.0)
        self.assertEqual(part.centroid_vectors.shape, (2, 6))
        self.assertEqual(part.metadata['totdisp_metric'], 'log_euclidean')

    def test_single_cluster_is_log_euclidean_mean(self):
        part = cluster_lec(self.data, KMeansConfig(k=1, seed=4))
        np.testing.assert_allclose(part.centroids[0], log_euclidean_mean(self.data), rtol=1e-10)

    def test_identity_base_point(self):
        np.testing.assert_allclose(log_coordinates(self.data, np.eye(3)), log_coordinates(self.data), atol=1e-12)


class TestFrechetMapPipeline(unittest.TestCase):
    """Test FMC."""

    def setUp(self):
        self.data, self.truth = two_balls(seed=20)

    def test_random_refs_separate_balls(self):
        refs = select_random(self.data, 2, seed=5)
        for p in (1, 2):
            part = cluster_fmc(self.data, FrechetMapSpec(refs, p), KMeansConfig(k=2, seed=6))
            self.assertEqual(accuracy(self.truth, part.labels, 2), 1.0)
            self.assertEqual(part.metadata['pipeline'], f'FMC{p}')
            self.assertEqual(part.metadata['distance_evaluations'], len(self.data) * 2)
            self.assertEqual(part.centroids.shape, (2, 3, 3))

    def test_one_point_per_cluster(self):
        data = self.data[:3]
        part = cluster_fmc(data, FrechetMapSpec(self.data[10:12], 2), KMeansConfig(k=3, seed=7))
        self.assertEqual(part.totdisp, 0.0)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimMismatch):
            cluster_fmc(self.data, FrechetMapSpec(np.eye(2)), KMeansConfig(k=2))

    def test_too_few_points(self):
        with self.assertRaises(TooFewPoints):
            cluster_fmc(self.data[:2], FrechetMapSpec(np.eye(3)), KMeansConfig(k=3))


if __name__ == '__main__':
    unittest.main()
