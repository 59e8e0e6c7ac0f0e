import json
import os
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from utils.constants import DEFAULT_ORBIT_HORIZON, DEFAULT_SLOWDOWN, SFT_METRIC_BASE, SUITE_NAMES
from utils.errors import ConfigError


def parse_rational(value: Any) -> Fraction:
    """Parse ints, decimal strings and 'p/q' strings exactly."""
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SftModelConfig(StrictModel):
    kind: Literal["sft"]
    adjacency: list[list[int]]
    metric_base: int = Field(default=SFT_METRIC_BASE, ge=2)
    p_word: list[int] = [0]
    q_word: list[int] = [0, 1]

    @field_validator("adjacency")
    @classmethod
    def square_zero_one(cls, value: list[list[int]]) -> list[list[int]]:
        if not value or any(len(row) != len(value) for row in value):
            raise ValueError("adjacency must be a non-empty square matrix")
        if any(v not in (0, 1) for row in value for v in row):
            raise ValueError("adjacency entries must be 0 or 1")
        return value


class TorusModelConfig(StrictModel):
    kind: Literal["torus"]
    matrix: list[list[int]]
    p_points: list[tuple[str, str]] = [("0", "0")]
    q_seed: tuple[str, str] = ("1/3", "1/3")

    @field_validator("matrix")
    @classmethod
    def two_by_two(cls, value: list[list[int]]) -> list[list[int]]:
        if len(value) != 2 or any(len(row) != 2 for row in value):
            raise ValueError("matrix must be 2×2")
        return value

    @field_validator("p_points", "q_seed", mode="before")
    @classmethod
    def rational_strings(cls, value: Any) -> Any:
        def norm(pair):
            return tuple(str(parse_rational(v)) for v in pair)

        if isinstance(value, (list, tuple)) and value and isinstance(value[0], (list, tuple)):
            return [norm(pair) for pair in value]
        return norm(value)

    def p_rationals(self) -> list[tuple[Fraction, Fraction]]:
        return [(Fraction(x), Fraction(y)) for x, y in self.p_points]

    def q_rational(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.q_seed[0]), Fraction(self.q_seed[1])


ModelConfig = Annotated[Union[SftModelConfig, TorusModelConfig], Field(discriminator="kind")]


class Caps(StrictModel):
    homoclinic: int = Field(default=4, ge=0)
    window: int = Field(default=48, ge=1)
    window_depth: int = Field(default=1, ge=0)
    max_level: int = Field(default=3, ge=0)
    orbit_horizon: int = Field(default=DEFAULT_ORBIT_HORIZON, ge=1)
    cell_extension: int = Field(default=12, ge=0)


class SuiteParams(StrictModel):
    n_min: int = 1
    n_max: int = 4
    j: list[int] = [1, 2]
    i: int = 0
    k: int = 0
    l: int = 0
    pairs: int = Field(default=20, ge=1)
    window: Optional[int] = Field(default=None, ge=1)


class RunConfig(StrictModel):
    model: ModelConfig
    caps: Caps = Caps()
    delta: Optional[str] = None
    slowdown: int = Field(default=DEFAULT_SLOWDOWN, ge=1)
    suites: dict[str, SuiteParams] = {}
    seed: int = 0
    threads: int = Field(default=1, ge=1)
    out_dir: Optional[str] = None
    samples: int = Field(default=200, ge=1)

    @field_validator("delta", mode="before")
    @classmethod
    def delta_rational(cls, value: Any) -> Optional[str]:
        if value is None:
            return None
        delta = parse_rational(value)
        if delta < 0:
            raise ValueError("delta must be non-negative")
        return str(delta)

    @field_validator("suites")
    @classmethod
    def known_suites(cls, value: dict[str, SuiteParams]) -> dict[str, SuiteParams]:
        unknown = sorted(set(value) - set(SUITE_NAMES))
        if unknown:
            raise ValueError(f"unknown suites {unknown}; expected a subset of {list(SUITE_NAMES)}")
        return value

    def delta_exact(self) -> Optional[Fraction]:
        return None if self.delta is None else Fraction(self.delta)

    def suite(self, name: str) -> SuiteParams:
        return self.suites.get(name, SuiteParams())


def load_config(path) -> RunConfig:
    """Read and validate a JSON run configuration."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}:\n{e}") from e


def apply_overrides(config: RunConfig, **flags: Any) -> RunConfig:
    """Command-line values win over the file; None means 'not given'."""
    update = {key: value for key, value in flags.items() if value is not None}
    if not update:
        return config
    try:
        return RunConfig.model_validate({**config.model_dump(), **update})
    except ValidationError as e:
        raise ConfigError(f"invalid command-line override:\n{e}") from e


@lru_cache(maxsize=1)
def get_database_url() -> str:
    """Get archive database URL from environment variable."""
    raw_path = os.environ.get('SMALELAB_DB_PATH', 'smalelab.db')
    # If raw_path contains :// treat as full URL
    if '://' in raw_path:
        return raw_path
    db_path = Path(raw_path).resolve()
    return f'sqlite:///{db_path}'


@lru_cache(maxsize=1)
def get_output_root() -> Path:
    """Default directory for result artifacts when --out-dir is not given."""
    return Path(os.environ.get('SMALELAB_OUT_DIR', 'results')).resolve()
