"""
Console tables for experiment summaries.
"""

from typing import Any, Dict, List, Optional, Sequence


def _pct(value: Optional[float]) -> str:
    return '-' if value is None else f'{100.0 * value:.2f}%'


def _num(value: Optional[float], fmt: str = '.3f') -> str:
    return '-' if value is None else format(value, fmt)


class SummaryTableFormatter:
    """Renders summary rows as fixed-width text tables."""

    def _render(self, header: Sequence[str], rows: List[List[str]]) -> str:
        widths = [len(h) for h in header]
        for row in rows:
            widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
        lines = ['  '.join(h.rjust(w) for h, w in zip(header, widths)),
                 '  '.join('-' * w for w in widths)]
        for row in rows:
            lines.append('  '.join(cell.rjust(w) for cell, w in zip(row, widths)))
        return '\n'.join(lines)

    def format_accuracy_table(self, summary: List[Dict[str, Any]], k: int,
                              n_refs: Optional[int] = None) -> str:
        """Accuracy statistics: mean, std, min and 10th percentile."""
        header = ['algorithm', 'k', 'l', 'mean (%)', 'std', 'min (%)', '10th (%)', 'failed']
        rows = [[
            s['algorithm'], str(k), '-' if n_refs is None or not s['algorithm'].startswith('FMC') else str(n_refs),
            _pct(s['accuracy_mean']), _num(s['accuracy_std']), _pct(s['accuracy_min']),
            _pct(s['accuracy_p10']), str(s['failed']),
        ] for s in summary]
        return self._render(header, rows)

    def format_comparison_table(self, summary: List[Dict[str, Any]]) -> str:
        """Method comparison: runtime, speedup, accuracy and normalized dispersion."""
        header = ['Method', 'Runtime', 'Speedup', 'Accuracy', 'Normalized Dispersion']
        rows = []
        for s in summary:
            speedup = '---' if s['algorithm'] == 'IRC' or s['speedup'] is None else f'{s["speedup"]:.1f}x'
            rows.append([s['algorithm'], _num(s['runtime_mean'], '.2f'), speedup,
                         _pct(s['accuracy_mean']), _num(s['normalized_mean'], '.2f')])
        return self._render(header, rows)

    def format_summary(self, summary: List[Dict[str, Any]], k: int, n_refs: Optional[int] = None) -> str:
        return (self.format_accuracy_table(summary, k, n_refs) + '\n\n'
                + self.format_comparison_table(summary))
