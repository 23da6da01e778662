"""
Configuration module for spdcluster.

Provides a dataclass-based configuration with sensible defaults
and a global configuration accessor.
"""

from dataclasses import dataclass, field, fields, asdict
from typing import Any, Dict
import os


@dataclass
class SpdClusterConfig:
    """Configuration settings for SPD clustering and benchmarking."""

    # Numerical tolerances
    sym_tol: float = 1e-10  # relative Frobenius asymmetry
    pd_tol: float = 1e-12  # scaled by the largest |eigenvalue|, floored at 1
    rank_tol: float = 1e-8
    at_reference_tol: float = 1e-9
    lipschitz_slack: float = 1e-9
    degenerate_pair_tol: float = 1e-12

    # Frechet mean solver defaults
    eta: float = 0.5
    grad_tol: float = 1e-8
    mean_max_iter: int = 200

    # k-means defaults
    kmeans_restarts: int = 10
    kmeans_max_iter: int = 100

    # Evaluation
    eval_mean_method: str = 'icm'

    # Processing settings
    processes: int = field(default_factory=lambda: min(4, os.cpu_count() or 1))

    # Output settings
    json_indent: int = 2
    csv_precision: int = 6

    # Debug settings
    debug: bool = False
    verbose: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> 'SpdClusterConfig':
        """Create config from dictionary. Unknown keys are ignored."""
        config = cls()
        for key, value in d.items():
            if hasattr(config, key):
                setattr(config, key, value)
        return config


# Global configuration instance
_config: SpdClusterConfig = SpdClusterConfig()


def get_config() -> SpdClusterConfig:
    """Get the global configuration instance."""
    return _config


def set_config(config: SpdClusterConfig) -> None:
    """Set the global configuration instance."""
    global _config
    _config = config


def set_config_value(key: str, value: str) -> None:
    """
    Set one configuration field from its string form (``-c key=value``).

    The string is coerced to the type of the field's current value.

    Args:
        key: Field name
        value: Text value from the command line

    Raises:
        KeyError: If the key is not a configuration field
        ValueError: If the value cannot be converted
    """
    names = {f.name for f in fields(SpdClusterConfig)}
    if key not in names:
        raise KeyError('no such key "%s" in config' % key)

    current = getattr(_config, key)
    if isinstance(current, bool):
        new_value: Any = value.lower() in ('true', '1', 'yes', 'on')
    elif isinstance(current, int):
        new_value = int(value)
        if key in ('processes', 'kmeans_restarts', 'kmeans_max_iter', 'mean_max_iter') and new_value < 1:
            raise ValueError(f'{key} must be at least 1, got: {new_value}')
    elif isinstance(current, float):
        new_value = float(value)
    else:
        new_value = value
    setattr(_config, key, new_value)
