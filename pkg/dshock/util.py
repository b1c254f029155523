"""Utility methods"""

import collections.abc
from typing import Any, Dict, MutableMapping

import numpy as np


def merge_dict(base_dict: MutableMapping[str, Any], new_dict: Dict[str, Any]) -> None:
    """Merges new_dict into base_dict.

    Nested sections are merged key by key; any other value (lists included)
    replaces the old one.
    """
    for key, value in new_dict.items():
        if key in base_dict:
            old_value = base_dict[key]
            if isinstance(old_value, collections.abc.MutableMapping):
                # Combine section
                assert isinstance(
                    value, collections.abc.Mapping
                ), f"Not a dict: {value}"
                merge_dict(old_value, value)
            else:
                # Overwrite
                base_dict[key] = value
        else:
            base_dict[key] = value


def to_builtin(value: Any) -> Any:
    """Convert numpy scalars/arrays nested in value to plain Python objects."""
    if isinstance(value, collections.abc.Mapping):
        return {str(k): to_builtin(v) for k, v in value.items()}

    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())

    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]

    if isinstance(value, np.generic):
        return to_builtin(value.item())

    if isinstance(value, complex):
        return {"real": value.real, "imag": value.imag}

    if isinstance(value, float) and not np.isfinite(value):
        # JSON has no inf/nan
        return None

    return value


def unit(vector: np.ndarray) -> np.ndarray:
    """Scale vector to unit Euclidean length."""
    norm = float(np.linalg.norm(vector))
    assert norm > 0, "Zero vector"
    return vector / norm
