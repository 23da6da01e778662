"""
Test suite for spdcluster_cli module.
Runs the command-line commands end to end in a temporary directory.
"""

import contextlib
import csv
import io
import json
import unittest
import sys
import os
import shutil
import tempfile

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.spdcluster_cli import SpdCluster, main
from src.spdcluster_config import SpdClusterConfig, get_config, set_config
from src.spdcluster_dataset import load_dataset, load_partition
from src.spdcluster_export import read_json


class TestCli(unittest.TestCase):
    """End-to-end runs of the spdcluster commands."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.dataset = self.path('balls.spd')

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)
        set_config(SpdClusterConfig())

    def path(self, name):
        return os.path.join(self.temp_dir, name)

    def run_cli(self, *args):
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            code = SpdCluster().run(list(args))
        return code, out.getvalue()

    def generate(self):
        code, _ = self.run_cli('--seed', '3', '--k', '2', '--n', '3', '--samples', '12', 'generate', self.dataset)
        self.assertEqual(code, 0)

    def test_help(self):
        code, out = self.run_cli('--help')
        self.assertEqual(code, 0)
        self.assertIn('Usage: spdcluster', out)
        self.assertEqual(self.run_cli()[0], 0)

    def test_unknown_command(self):
        code, out = self.run_cli('frobnicate')
        self.assertEqual(code, 1)
        self.assertIn('FATAL', out)

    def test_bad_option(self):
        self.assertEqual(self.run_cli('--seed', 'x', 'generate', self.dataset)[0], 1)
        self.assertEqual(self.run_cli('--no-such-option')[0], 1)
        self.assertEqual(self.run_cli('-c', 'processes=0', 'generate', self.dataset)[0], 1)

    def test_config_override(self):
        self.generate()
        self.run_cli('-c', 'processes=1', '--algorithm', 'LEC', 'cluster', self.dataset, self.path('p.json'))
        self.assertEqual(get_config().processes, 1)

    def test_generate(self):
        self.generate()
        ds = load_dataset(self.dataset)
        self.assertEqual(ds.points.shape, (24, 3, 3))
        self.assertEqual(ds.k, 2)

    def test_generate_mirror(self):
        code, _ = self.run_cli('--seed', '1', '--generator', 'mirror', '--n', '3', '--samples', '4',
                               'generate', self.dataset)
        self.assertEqual(code, 0)
        self.assertEqual(load_dataset(self.dataset).k, 4)

    def test_cluster_and_evaluate(self):
        self.generate()
        part_path = self.path('partition.json')
        code, out = self.run_cli('--seed', '3', '--algorithm', 'LEC', 'cluster', self.dataset, part_path)
        self.assertEqual(code, 0)
        self.assertIn('LEC', out)
        part = load_partition(part_path)
        self.assertEqual(len(part.labels), 24)
        self.assertEqual(read_json(part_path)['algorithm'], 'LEC')

        report_path = self.path('report.json')
        code, out = self.run_cli('evaluate', self.dataset, part_path, report_path)
        self.assertEqual(code, 0)
        self.assertIn('accuracy', out)
        report = read_json(report_path)
        self.assertGreaterEqual(report['accuracy'], 0.5)
        self.assertEqual(report['k'], 2)

    def test_cluster_fmc_records_refs(self):
        self.generate()
        part_path = self.path('fmc.json')
        code, _ = self.run_cli('--seed', '4', '--algorithm', 'FMC1', '--refs', 'random', '--n-refs', '2',
                               'cluster', self.dataset, part_path)
        self.assertEqual(code, 0)
        doc = read_json(part_path)
        self.assertEqual(doc['refs'], {'strategy': 'random', 'n_refs': 2})
        self.assertEqual(doc['metadata']['pipeline'], 'FMC1')

    def test_refpoints(self):
        self.generate()
        out_path = self.path('refs.json')
        code, _ = self.run_cli('--seed', '5', '--refs', 'random', '--n-refs', '3', 'refpoints', self.dataset, out_path)
        self.assertEqual(code, 0)
        doc = read_json(out_path)
        self.assertEqual(len(doc['refs']), 3)
        self.assertEqual(len(doc['refs'][0]), 3)

    def test_wrong_argument_count(self):
        self.assertEqual(self.run_cli('cluster', self.dataset)[0], 1)

    def test_bench_requires_seed(self):
        code, out = self.run_cli('--preset', 'random2', 'bench', self.path('out'))
        self.assertEqual(code, 1)
        self.assertIn('--seed', out)

    def test_bench_experiment_file(self):
        exp = self.path('exp.json')
        with open(exp, 'w') as f:
            json.dump({
                'name': 'tiny',
                'generator': {'kind': 'ball', 'k': 2, 'n': 2, 'samples_per_ball': 8},
                'algorithms': ['LEC', 'FMC2'],
                'refs': {'kind': 'random', 'n_refs': 2},
                'restarts': 2,
                'repetitions': 2,
            }, f)
        outdir = self.path('results')
        code, out = self.run_cli('--seed', '9', 'bench', exp, outdir)
        self.assertEqual(code, 0)
        with open(os.path.join(outdir, 'tiny.csv'), newline='') as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(len(rows), 4)
        self.assertEqual([r['algorithm'] for r in rows], ['LEC', 'FMC2', 'LEC', 'FMC2'])
        self.assertTrue(os.path.exists(os.path.join(outdir, 'tiny_summary.csv')))

    def test_bench_json_format(self):
        exp = self.path('exp.json')
        with open(exp, 'w') as f:
            json.dump({'name': 'j', 'generator': {'k': 2, 'n': 2, 'samples_per_ball': 6},
                       'algorithms': ['LEC'], 'restarts': 1}, f)
        code, _ = self.run_cli('--seed', '1', '--format', 'json', 'bench', exp, self.path('o'))
        self.assertEqual(code, 0)
        doc = read_json(os.path.join(self.path('o'), 'j.json'))
        self.assertEqual(doc['provenance']['master_seed'], 1)

    def test_diagnose_unknown_suite(self):
        self.assertEqual(self.run_cli('diagnose', 'hyperbolic', self.path('d.json'))[0], 1)

    def test_unknown_config_key_exits(self):
        with contextlib.redirect_stdout(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main(['-c', 'nope=1', 'generate', self.dataset])
        self.assertEqual(cm.exception.code, 1)


if __name__ == '__main__':
    unittest.main()
