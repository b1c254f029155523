"""Shared access to package resources"""

import importlib.metadata
from pathlib import Path

__version__ = importlib.metadata.version("dshock")

_DIR = Path(__file__).parent

SAMPLE_CONFIG_PATH = _DIR / "data" / "sample_data.json"
