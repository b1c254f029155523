import math

import numpy as np
import pytest

from dshock.util import merge_dict, to_builtin, unit


def test_merge_dict():
    base = {"shooting": {"eps": 0.1, "eps_list": [0.1, 0.05]}, "fv": {"cfl": 0.05}}
    merge_dict(base, {"shooting": {"eps_list": [0.02]}, "output": {"format": "json"}})

    assert base == {
        "shooting": {"eps": 0.1, "eps_list": [0.02]},
        "fv": {"cfl": 0.05},
        "output": {"format": "json"},
    }


def test_to_builtin():
    value = {
        "array": np.array([1.0, math.nan]),
        "scalar": np.float64(2.5),
        "flag": np.bool_(True),
        "lambda": complex(0.5, -1.0),
        "nested": [(np.int64(3), math.inf)],
    }

    assert to_builtin(value) == {
        "array": [1.0, None],
        "scalar": 2.5,
        "flag": True,
        "lambda": {"real": 0.5, "imag": -1.0},
        "nested": [[3, None]],
    }
    assert type(to_builtin(np.int64(3))) is int


def test_unit():
    assert unit(np.array([3.0, 4.0])) == pytest.approx([0.6, 0.8])
