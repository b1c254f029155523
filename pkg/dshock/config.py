"""Run configuration loaded from JSON or YAML files."""

import dataclasses
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Dict, Iterable, Optional, Set, Type, TypeVar, Union

import yaml

from .errors import ConfigError, ValidationError
from .fv import Grid1D
from .integrate import IntegratorConfig
from .model import ModelParams
from .profile import ShootingConfig
from .riemann import RiemannData
from .singular import SingularConfig
from .util import merge_dict

_LOGGER = logging.getLogger("dshock.config")

OUT_DIR_ENV = "OUT_DIR"
OUTPUT_FORMATS = ("csv", "json")

_T = TypeVar("_T")


@dataclass
class ClassifyConfig:
    """Sampling of the over-compressive region for a fixed uL."""

    n_beta: int = 20
    n_v: int = 20
    n_curve: int = 200
    """Samples along each boundary curve."""


@dataclass
class WeakLimitConfig:
    r0: Optional[float] = None
    """Section bounding the spike; the profile's own r0 when unset."""

    bump_half_width: float = 0.1
    """Half width of the bump test function centered at s."""


@dataclass
class FvConfig:
    x_min: float = -1.0
    x_max: float = 1.0
    n_cells: int = 400
    cfl: float = 0.05
    n_steps: int = 20_000
    record_every: int = 100

    @property
    def grid(self) -> Grid1D:
        return Grid1D(x_min=self.x_min, x_max=self.x_max, n_cells=self.n_cells)


@dataclass
class OutputConfig:
    dir: str = "out"
    """Output directory; the OUT_DIR environment variable takes precedence."""

    format: str = "csv"
    """Tables as csv or json (reports are always json)."""

    def __post_init__(self):
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError("output.format", f"must be one of {OUTPUT_FORMATS}")


@dataclass
class RunConfig:
    """Everything a dshock run needs."""

    model: ModelParams = field(default_factory=ModelParams)
    riemann: Optional[RiemannData] = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    classify: ClassifyConfig = field(default_factory=ClassifyConfig)
    singular: SingularConfig = field(default_factory=SingularConfig)
    shooting: ShootingConfig = field(default_factory=ShootingConfig)
    weak_limit: WeakLimitConfig = field(default_factory=WeakLimitConfig)
    fv: FvConfig = field(default_factory=FvConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def riemann_data(self) -> RiemannData:
        if self.riemann is None:
            raise ConfigError("riemann", "Riemann data are required")

        return self.riemann

    @property
    def out_dir(self) -> Path:
        return Path(os.environ.get(OUT_DIR_ENV) or self.output.dir)

    @staticmethod
    def from_files(file_paths: Iterable[Union[str, Path]]) -> "RunConfig":
        """Load and merge configuration files in order."""
        config_dict: Dict[str, Any] = {}
        for file_path in file_paths:
            _LOGGER.debug("Loading config: %s", file_path)
            with open(file_path, "r", encoding="utf-8") as config_file:
                merge_dict(config_dict, _load(config_file, str(file_path)))

        return RunConfig.from_dict(config_dict)

    @staticmethod
    def from_yaml(config_file: IO[str]) -> "RunConfig":
        return RunConfig.from_dict(_load(config_file, "<stream>"))

    @staticmethod
    def from_dict(input_dict: Dict[str, Any]) -> "RunConfig":
        """Parse a configuration dict.

        {
          "model": {"rho1": 2.0, "rho2": 1.0},
          "riemann": {"beta_l": 1.9, "v_l": 1.0, "beta_r": 1.1, "v_r": 0.5789...},
          "integrator": {...}, "classify": {...}, "singular": {...},
          "shooting": {...}, "weak_limit": {...}, "fv": {...},
          "output": {"dir": "out", "format": "csv"}
        }
        """
        _check_keys("", input_dict, {f.name for f in dataclasses.fields(RunConfig)})

        integrator = _section(IntegratorConfig, "integrator", input_dict.get("integrator"))

        riemann: Optional[RiemannData] = None
        riemann_dict = input_dict.get("riemann")
        if riemann_dict is not None:
            _check_keys("riemann", riemann_dict, {"beta_l", "v_l", "beta_r", "v_r"})
            missing = sorted({"beta_l", "v_l", "beta_r", "v_r"} - set(riemann_dict))
            if missing:
                raise ConfigError(f"riemann.{missing[0]}", "missing")

            riemann = _build("riemann", RiemannData.from_dict, riemann_dict)

        return RunConfig(
            model=_section(ModelParams, "model", input_dict.get("model")),
            riemann=riemann,
            integrator=integrator,
            classify=_section(ClassifyConfig, "classify", input_dict.get("classify")),
            singular=_section(
                SingularConfig,
                "singular",
                input_dict.get("singular"),
                integrator=integrator,
            ),
            shooting=_section(
                ShootingConfig,
                "shooting",
                input_dict.get("shooting"),
                integrator=integrator,
            ),
            weak_limit=_section(WeakLimitConfig, "weak_limit", input_dict.get("weak_limit")),
            fv=_section(FvConfig, "fv", input_dict.get("fv")),
            output=_section(OutputConfig, "output", input_dict.get("output")),
        )


# -----------------------------------------------------------------------------


def _load(config_file: IO[str], name: str) -> Dict[str, Any]:
    """Parse JSON or YAML, reporting the line of a syntax error."""
    try:
        loaded = yaml.safe_load(config_file)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        line = (mark.line + 1) if mark is not None else None
        problem = getattr(err, "problem", None) or str(err)
        raise ConfigError(name, f"not valid JSON/YAML: {problem}", line=line) from err

    if loaded is None:
        return {}

    if not isinstance(loaded, dict):
        raise ConfigError(name, "top level must be a mapping")

    return loaded


def _check_keys(section: str, values: Any, allowed: Set[str]) -> None:
    prefix = f"{section}." if section else ""
    if not isinstance(values, dict):
        raise ConfigError(section or "<root>", "must be a mapping")

    for key in values:
        if key not in allowed:
            raise ConfigError(f"{prefix}{key}", "unknown key")


def _build(section: str, factory, values: Dict[str, Any]):
    try:
        return factory(values)
    except (TypeError, ValueError) as err:
        raise ConfigError(section, str(err)) from err


def _section(
    cls: Type[_T], section: str, values: Optional[Dict[str, Any]], **fixed: Any
) -> _T:
    """Build dataclass cls from a config section, rejecting unknown keys."""
    if values is None:
        values = {}

    allowed = {f.name for f in dataclasses.fields(cls)} - set(fixed)  # type: ignore[arg-type]
    _check_keys(section, values, allowed)

    kwargs: Dict[str, Any] = {}
    for key, value in values.items():
        # Lists from JSON become tuples
        kwargs[key] = tuple(value) if isinstance(value, list) else value

    kwargs.update(fixed)
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except ValidationError as err:
        raise ConfigError(section, str(err)) from err
    except (TypeError, ValueError) as err:
        raise ConfigError(section, str(err)) from err
