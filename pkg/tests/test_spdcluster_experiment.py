"""
Test suite for spdcluster_experiment module.
Tests experiment configuration, presets, repetitions and summaries.
"""

import json
import unittest
import sys
import os
import shutil
import tempfile

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from src.spdcluster_config import SpdClusterConfig, get_config, set_config
from src.spdcluster_errors import ConfigError
from src.spdcluster_experiment import (
    PRESETS, ROW_COLUMNS, ExperimentConfig, GeneratorSpec, RefStrategy, cluster_with,
    load_experiment_config, preset_config, run_experiment, summarize,
)
from src.spdcluster_partition import KMeansConfig
from src.spdcluster_synthgen import sample_ball


def small_config(**overrides):
    d = {
        'name': 'small',
        'generator': {'kind': 'ball', 'k': 2, 'n': 3, 'samples_per_ball': 15},
        'algorithms': ['IRC', 'LEC', 'FMC2'],
        'refs': {'kind': 'random', 'n_refs': 2},
        'restarts': 2,
        'repetitions': 2,
        'seed': 5,
    }
    d.update(overrides)
    return ExperimentConfig.from_dict(d)


class TestExperimentConfig(unittest.TestCase):
    """Test configuration parsing and validation."""

    def test_defaults(self):
        cfg = ExperimentConfig()
        self.assertEqual(cfg.algorithms, ['FMC2'])
        self.assertEqual(cfg.refs.kind, 'principled')
        self.assertTrue(cfg.uses_refs)

    def test_algorithm_names(self):
        self.assertEqual(ExperimentConfig(algorithms='lec').algorithms, ['LEC'])
        self.assertFalse(ExperimentConfig(algorithms=['IRC']).uses_refs)
        with self.assertRaises(ConfigError):
            ExperimentConfig(algorithms=['KMEANS'])
        with self.assertRaises(ConfigError):
            ExperimentConfig(algorithms=[])

    def test_validation(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig(repetitions=0)
        with self.assertRaises(ConfigError):
            ExperimentConfig(eval_mean_method='median')
        with self.assertRaises(ConfigError):
            RefStrategy(kind='nearest')
        with self.assertRaises(ConfigError):
            RefStrategy(kind='random', n_refs=0)

    def test_from_dict_ignores_unknown_keys(self):
        cfg = ExperimentConfig.from_dict({'name': 'x', 'colour': 'blue', 'generator': {'k': 3, 'shape': 1}})
        self.assertEqual(cfg.name, 'x')
        self.assertEqual(cfg.generator.k, 3)

    def test_dict_round_trip(self):
        cfg = small_config()
        again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
        self.assertEqual(again.to_dict(), cfg.to_dict())

    def test_generators(self):
        self.assertEqual(GeneratorSpec(kind='mirror', k=2).k, 4)
        with self.assertRaises(ConfigError):
            GeneratorSpec(kind='file')
        with self.assertRaises(ConfigError):
            GeneratorSpec(kind='grid')

    def test_presets(self):
        for name in PRESETS:
            cfg = preset_config(name, seed=1)
            self.assertEqual(cfg.name, name)
            self.assertEqual(cfg.seed, 1)
        self.assertEqual(preset_config('mirror').generator.k, 4)
        self.assertEqual(preset_config('random2').refs.n_refs, 2)
        with self.assertRaises(ConfigError):
            preset_config('nope')

    def test_load_json_file(self):
        temp_dir = tempfile.mkdtemp()
        try:
            path = os.path.join(temp_dir, 'exp.json')
            with open(path, 'w') as f:
                json.dump({'name': 'filed', 'algorithms': ['ARC'], 'repetitions': 3}, f)
            cfg = load_experiment_config(path)
            self.assertEqual((cfg.name, cfg.algorithms, cfg.repetitions), ('filed', ['ARC'], 3))
            with open(path, 'w') as f:
                f.write('[1, 2]')
            with self.assertRaises(ConfigError):
                load_experiment_config(path)
            with self.assertRaises(ConfigError):
                load_experiment_config(os.path.join(temp_dir, 'missing.json'))
        finally:
            shutil.rmtree(temp_dir, ignore_errors=True)


class TestClusterWith(unittest.TestCase):
    """Test algorithm dispatch."""

    def setUp(self):
        self.data = np.concatenate([sample_ball(np.eye(2), 0.3, 6, 0),
                                    sample_ball(np.diag([np.e ** 3, 1.0]), 0.3, 6, 1)])

    def test_fmc_needs_refs(self):
        with self.assertRaises(ConfigError):
            cluster_with('FMC2', self.data, KMeansConfig(k=2, seed=0))

    def test_unknown_algorithm(self):
        with self.assertRaises(ConfigError):
            cluster_with('DBSCAN', self.data, KMeansConfig(k=2, seed=0))

    def test_dispatch(self):
        part = cluster_with('fmc1', self.data, KMeansConfig(k=2, seed=0), refs=self.data[:2])
        self.assertEqual(part.metadata['pipeline'], 'FMC1')
        self.assertEqual(cluster_with('LEC', self.data, KMeansConfig(k=2, seed=0)).metadata['pipeline'], 'LEC')


class TestRunExperiment(unittest.TestCase):
    """Test repetitions, row bookkeeping and failure isolation."""

    def tearDown(self):
        set_config(SpdClusterConfig())

    def test_rows_ordered_and_complete(self):
        result = run_experiment(small_config())
        self.assertEqual(len(result.rows), 6)
        order = [(r['repetition'], r['algorithm']) for r in result.rows]
        self.assertEqual(order, [(0, 'IRC'), (0, 'LEC'), (0, 'FMC2'), (1, 'IRC'), (1, 'LEC'), (1, 'FMC2')])
        for row in result.rows:
            self.assertEqual(set(row), set(ROW_COLUMNS))
            self.assertEqual(row['status'], 'ok')
            self.assertEqual((row['k'], row['n'], row['N']), (2, 3, 30))
            self.assertGreaterEqual(row['accuracy'], 0.5)
            self.assertLessEqual(row['accuracy'], 1.0)
        for row in result.rows:
            if row['algorithm'] == 'IRC':
                self.assertEqual(row['speedup'], 1.0)
                self.assertIsNone(row['n_refs'])
            if row['algorithm'] == 'FMC2':
                self.assertEqual(row['n_refs'], 2)
                self.assertEqual(row['ref_params'], {'kind': 'random', 'n_refs': 2})
        self.assertEqual([s['algorithm'] for s in result.summary], ['IRC', 'LEC', 'FMC2'])
        self.assertEqual(result.summary[0]['speedup'], 1.0)
        self.assertEqual(result.provenance['master_seed'], 5)
        self.assertEqual(result.failed, [])

    def test_deterministic_for_seed(self):
        keys = ('seed', 'accuracy', 'totdisp', 'normalized_totdisp', 'iterations')
        get_config().processes = 1
        a = run_experiment(small_config())
        get_config().processes = 3
        b = run_experiment(small_config())
        for ra, rb in zip(a.rows, b.rows):
            self.assertEqual([ra[key] for key in keys], [rb[key] for key in keys])

    def test_repetition_seeds_differ(self):
        rows = run_experiment(small_config(algorithms=['LEC'])).rows
        self.assertNotEqual(rows[0]['seed'], rows[1]['seed'])

    def test_failed_generation_is_recorded(self):
        cfg = small_config(generator={'kind': 'ball', 'k': 2, 'n': 3, 'samples_per_ball': 5,
                                      'd_low': 1.5, 'd_up': 1.5, 'max_retries': 2})
        result = run_experiment(cfg)
        self.assertEqual(len(result.rows), 6)
        self.assertEqual(len(result.failed), 6)
        self.assertIn('RetriesExhausted', result.rows[0]['error'])
        for entry in result.summary:
            self.assertEqual(entry['failed'], 2)
            self.assertIsNone(entry['accuracy_mean'])


class TestSummarize(unittest.TestCase):
    """Test per-algorithm aggregation."""

    def test_statistics(self):
        rows = [
            {'algorithm': 'IRC', 'status': 'ok', 'accuracy': 1.0, 'normalized_totdisp': 1.0,
             'totdisp': 2.0, 'runtime_s': 4.0},
            {'algorithm': 'IRC', 'status': 'ok', 'accuracy': 0.5, 'normalized_totdisp': 1.2,
             'totdisp': 3.0, 'runtime_s': 2.0},
            {'algorithm': 'FMC2', 'status': 'ok', 'accuracy': 1.0, 'normalized_totdisp': 1.0,
             'totdisp': 2.0, 'runtime_s': 1.0},
            {'algorithm': 'FMC2', 'status': 'failed', 'accuracy': None, 'normalized_totdisp': None,
             'totdisp': None, 'runtime_s': None},
        ]
        irc, fmc = summarize(rows, ['IRC', 'FMC2'])
        self.assertAlmostEqual(irc['accuracy_mean'], 0.75)
        self.assertAlmostEqual(irc['accuracy_std'], 0.25)
        self.assertEqual(irc['accuracy_min'], 0.5)
        self.assertAlmostEqual(irc['accuracy_p10'], 0.55)
        self.assertAlmostEqual(irc['totdisp_mean'], 2.5)
        self.assertEqual(irc['speedup'], 1.0)
        self.assertEqual((fmc['runs'], fmc['failed']), (2, 1))
        self.assertEqual(fmc['speedup'], 3.0)

    def test_without_irc(self):
        summary = summarize([{'algorithm': 'LEC', 'status': 'ok', 'accuracy': 1.0, 'normalized_totdisp': 1.0,
                              'totdisp': 1.0, 'runtime_s': 1.0}], ['LEC'])
        self.assertIsNone(summary[0]['speedup'])


if __name__ == '__main__':
    unittest.main()
