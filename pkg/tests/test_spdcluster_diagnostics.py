"""
Test suite for spdcluster_diagnostics module.
Runs each property check on a small number of random instances.
"""

import unittest
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.spdcluster_diagnostics import (
    SUITES, check_coherence, check_distortion, check_geometry, check_jacobian, check_local_rank,
    check_multilateration, check_separability, diagnose_euclid,
)
from src.spdcluster_export import to_jsonable
from src.spdcluster_helpers import make_rng


class TestEuclidChecks(unittest.TestCase):
    """Test the Euclidean property checks."""

    def test_multilateration(self):
        result = check_multilateration(make_rng(1), instances=20)
        self.assertTrue(result['passed'], result)

    def test_separability(self):
        result = check_separability(make_rng(2), pairs=4, samples=60)
        self.assertTrue(result['passed'], result)

    def test_coherence(self):
        result = check_coherence(make_rng(3), trials=3)
        self.assertTrue(result['passed'])
        self.assertEqual(len(result['trials']), 3)

    def test_suite_report(self):
        report = diagnose_euclid(seed=4)
        self.assertEqual(report['suite'], 'euclid')
        self.assertIn('seconds', report['multilateration'])
        self.assertEqual(to_jsonable(report)['seed'], 4)


class TestSpdChecks(unittest.TestCase):
    """Test the SPD geometry checks."""

    def test_geometry(self):
        result = check_geometry(make_rng(5), instances=25)
        self.assertTrue(result['passed'], result['max_errors'])
        for key in ('project_to_det_det', 'project_to_det_excess', 'commuting_geodesic',
                    'affine_invariance', 'exp_log_round_trip'):
            self.assertLess(result['max_errors'][key], 1e-8, key)

    def test_jacobian(self):
        result = check_jacobian(make_rng(6), instances=4)
        self.assertTrue(result['passed'], result)

    def test_local_rank(self):
        result = check_local_rank(make_rng(7), instances=3)
        self.assertTrue(result['passed'], result)

    def test_distortion(self):
        result = check_distortion(make_rng(8))
        self.assertTrue(result['passed'])
        self.assertIn('p1', result)

    def test_suites_registered(self):
        self.assertEqual(sorted(SUITES), ['euclid', 'spd'])


if __name__ == '__main__':
    unittest.main()
