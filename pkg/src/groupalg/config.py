"""Experiment configuration files (JSON) for the command line."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .groups import Group, group_from_config, with_generators
from .growth import GrowthFunction, parse_growth

DEFAULT_SEED = 42


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Everything a run needs; validated before any computation starts.

    ``group`` is a shorthand (``"f2"``) or a mapping accepted by
    ``group_from_config``.  ``sigma`` holds one or two growth expressions.
    """

    command: str
    group: object = None
    generators: list | None = None
    sigma: list = field(default_factory=list)
    radius: int | None = None
    rho_grid: list | None = None
    R_grid: list | None = None
    R: float | None = None
    p: float = 1.0
    z: float = 1.0
    rho: float | None = None
    m: int | None = None
    ell: int = 0
    eps: float | None = None
    elements: list = field(default_factory=list)
    seed: int = DEFAULT_SEED
    tolerance: float | None = None
    caps: list | None = None
    output: str | None = None
    csv: str | None = None
    cache_dir: str | None = None

    def __post_init__(self):
        if isinstance(self.sigma, str):
            self.sigma = [self.sigma]
        # parse eagerly so bad expressions fail before any work is done
        self.growth_functions()
        if self.group is not None:
            self.build_group()
        if self.radius is not None and self.radius < 0:
            raise ConfigError("radius must be >= 0")
        if self.caps is not None and (len(self.caps) != 2 or min(self.caps) < 1):
            raise ConfigError("caps must be [c_max, k_max] with both >= 1")

    def build_group(self) -> Group:
        try:
            g = group_from_config(self.group)
            if self.generators:
                g = with_generators(g, self.generators)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad group: {exc}") from None
        return g

    def growth_functions(self) -> list[GrowthFunction]:
        try:
            return [parse_growth(s) for s in self.sigma]
        except ValueError as exc:
            raise ConfigError(f"bad growth expression: {exc}") from None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        if "command" not in data:
            raise ConfigError("config needs a 'command'")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(data)
