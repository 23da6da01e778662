"""
Test suite for spdcluster_tabledata module.
"""

import unittest
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.spdcluster_experiment import summarize
from src.spdcluster_tabledata import SummaryTableFormatter


def _rows():
    return [
        {'algorithm': 'IRC', 'status': 'ok', 'accuracy': 0.9, 'normalized_totdisp': 1.0,
         'totdisp': 1.0, 'runtime_s': 8.0},
        {'algorithm': 'FMC2', 'status': 'ok', 'accuracy': 0.95, 'normalized_totdisp': 0.98,
         'totdisp': 1.0, 'runtime_s': 2.0},
        {'algorithm': 'LEC', 'status': 'failed', 'accuracy': None, 'normalized_totdisp': None,
         'totdisp': None, 'runtime_s': None},
    ]


class TestSummaryTableFormatter(unittest.TestCase):
    """Test the console summary tables."""

    def setUp(self):
        self.summary = summarize(_rows(), ['IRC', 'FMC2', 'LEC'])
        self.formatter = SummaryTableFormatter()

    def test_accuracy_table(self):
        lines = self.formatter.format_accuracy_table(self.summary, 3, n_refs=6).splitlines()
        self.assertEqual(len(lines), 5)
        self.assertIn('90.00%', lines[2])
        self.assertIn(' 6 ', lines[3])
        self.assertIn(' - ', lines[2])
        self.assertTrue(lines[4].rstrip().endswith('1'))

    def test_comparison_table(self):
        table = self.formatter.format_comparison_table(self.summary)
        self.assertIn('4.0x', table)
        self.assertIn('---', table)

    def test_columns_aligned(self):
        lines = self.formatter.format_summary(self.summary, 3).split('\n\n')[1].splitlines()
        self.assertEqual(len({len(line) for line in lines}), 1)


if __name__ == '__main__':
    unittest.main()
