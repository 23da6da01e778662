"""
User-facing CLI text for spdcluster.

Messages live in spdcluster_strings.json, grouped by category. They are
flattened to dotted keys on import:

    from .spdcluster_strings import S, text
    print(text('error.fatal', message='dataset not found'))
"""

import json
import os
from typing import Any, Dict

STRINGS_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'spdcluster_strings.json')


def _flatten(raw: Dict[str, Any], prefix: str = '') -> Dict[str, str]:
    flat: Dict[str, str] = {}
    for key, value in raw.items():
        if key.startswith('_'):
            continue
        dotted = f'{prefix}{key}'
        if isinstance(value, dict):
            flat.update(_flatten(value, dotted + '.'))
        else:
            flat[dotted] = value
    return flat


def load_strings(path: str = STRINGS_FILE) -> Dict[str, str]:
    """Read a strings file into a flat ``{'category.key': text}`` dict."""
    with open(path, 'r', encoding='utf-8') as f:
        return _flatten(json.load(f))


S = load_strings()


def text(key: str, /, **fields: Any) -> str:
    """Look up ``key`` and fill its ``{placeholders}``."""
    return S[key].format(**fields) if fields else S[key]
