"""
Export module for spdcluster.

Writes experiment tables to CSV, JSON or YAML and partition / report
documents to JSON.
"""

import csv
import datetime
import enum
import json
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .spdcluster_config import get_config
from .spdcluster_errors import IoError
from .spdcluster_helpers import log_verbose, log_warning

FORMATS = ('csv', 'json', 'yaml')


class ResultsEncoder(json.JSONEncoder):
    """JSON encoder that understands numpy values, enums and report objects."""

    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, enum.Enum):
            return obj.value
        if isinstance(obj, (datetime.datetime, datetime.date)):
            return obj.isoformat()
        if isinstance(obj, (set, tuple)):
            return list(obj)
        if hasattr(obj, 'to_dict'):
            return obj.to_dict()
        return super().default(obj)


def to_jsonable(obj: Any) -> Any:
    """Plain Python structure equivalent to what ResultsEncoder writes."""
    return json.loads(json.dumps(obj, cls=ResultsEncoder))


def write_json(path: str, obj: Any, indent: Optional[int] = None) -> str:
    """
    Write ``obj`` as JSON. Floats keep their shortest round-trip repr.

    Raises:
        IoError: the file cannot be written
    """
    if indent is None:
        indent = get_config().json_indent
    try:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(obj, f, cls=ResultsEncoder, indent=indent or None, ensure_ascii=False)
            f.write('\n')
    except OSError as e:
        raise IoError(f'cannot write {path}: {e}') from e
    log_verbose(f'Wrote {path}')
    return path


def read_json(path: str) -> Any:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except OSError as e:
        raise IoError(f'cannot read {path}: {e}') from e


def _csv_cell(value: Any, precision: Optional[int]) -> str:
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return repr(float(value)) if precision is None else f'{float(value):.{precision}g}'
    if isinstance(value, (dict, list)):
        return json.dumps(value, cls=ResultsEncoder, sort_keys=True)
    return str(value)


class ResultsExporter:
    """
    Exports an experiment result table.

    The table object provides ``columns`` and ``rows`` (dicts keyed by
    column), ``summary_columns`` and ``summary`` for the per-algorithm
    aggregate, and a ``provenance`` dict.
    """

    def __init__(self, table, basename: str = 'results'):
        self.table = table
        self.basename = basename

    def _path(self, output_path: str, suffix: str) -> str:
        return os.path.join(output_path, f'{self.basename}{suffix}')

    def _write_csv(self, path: str, columns: Sequence[str], rows: Sequence[Dict[str, Any]],
                   precision: Optional[int]) -> str:
        try:
            with open(path, 'w', encoding='utf-8', newline='') as f:
                writer = csv.writer(f)
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([_csv_cell(row.get(c), precision) for c in columns])
        except OSError as e:
            raise IoError(f'cannot write {path}: {e}') from e
        log_verbose(f'Exported {len(rows)} rows to {path}')
        return path

    def export_csv(self, output_path: str) -> List[str]:
        """
        Write ``<basename>.csv`` (full precision rows) and
        ``<basename>_summary.csv`` (summary at ``csv_precision`` digits).

        Returns:
            Paths of the written files
        """
        t = self.table
        return [
            self._write_csv(self._path(output_path, '.csv'), t.columns, t.rows, None),
            self._write_csv(self._path(output_path, '_summary.csv'), t.summary_columns, t.summary,
                            get_config().csv_precision),
        ]

    def get_results_dict(self) -> Dict[str, Any]:
        t = self.table
        return {
            'provenance': t.provenance,
            'columns': list(t.columns),
            'rows': [{c: row.get(c) for c in t.columns} for row in t.rows],
            'summary': [{c: row.get(c) for c in t.summary_columns} for row in t.summary],
        }

    def export_json(self, output_path: str) -> List[str]:
        return [write_json(self._path(output_path, '.json'), self.get_results_dict())]

    def export_yaml(self, output_path: str) -> List[str]:
        """
        Write ``<basename>.yaml``.

        Returns:
            Paths written; empty when PyYAML is not installed
        """
        try:
            import yaml
        except ImportError:
            log_warning('PyYAML not installed, skipping YAML export')
            return []
        path = self._path(output_path, '.yaml')
        try:
            with open(path, 'w', encoding='utf-8') as f:
                yaml.safe_dump(to_jsonable(self.get_results_dict()), f,
                               default_flow_style=False, allow_unicode=True, sort_keys=False)
        except OSError as e:
            raise IoError(f'cannot write {path}: {e}') from e
        log_verbose(f'Exported results to {path}')
        return [path]


def emit_results(table, fmt: str, output_path: str, basename: str = 'results') -> List[str]:
    """
    Write a result table in one of ``csv``, ``json`` or ``yaml``.

    Args:
        table: experiment result (see ResultsExporter)
        fmt: output format
        output_path: existing or creatable directory

    Returns:
        Paths of the written files

    Raises:
        ValueError: unknown format
        IoError: the directory or a file cannot be written
    """
    if fmt not in FORMATS:
        raise ValueError(f'unknown output format "{fmt}" (expected one of {", ".join(FORMATS)})')
    try:
        os.makedirs(output_path, exist_ok=True)
    except OSError as e:
        raise IoError(f'cannot create output directory {output_path}: {e}') from e
    exporter = ResultsExporter(table, basename)
    return getattr(exporter, f'export_{fmt}')(output_path)
