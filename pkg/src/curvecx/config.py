"""Run configuration: caps, sweeps, tolerances, seed."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .cache import cache_dir
from .curvegraph import DEFAULT_L_SWEEP, DEFAULT_MAX_VERTICES


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    cache: str | None = None
    max_slice_vertices: int = DEFAULT_MAX_VERTICES
    max_quadruple_points: int = 2000
    thin_delta_cap: int = 400
    l_sweep: tuple = DEFAULT_L_SWEEP
    tolerance: float = 1e-9
    seed: int = 0
    threads: int = 1
    group_cap: int = 3628800
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("max_slice_vertices", "max_quadruple_points", "thin_delta_cap", "group_cap", "threads"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not self.l_sweep or any(x <= 0 for x in self.l_sweep):
            raise ConfigError("l_sweep must be a nonempty list of positive numbers")

    @property
    def cache_path(self):
        return cache_dir(self.cache)

    def to_json(self):
        d = asdict(self)
        d["l_sweep"] = list(self.l_sweep)
        return d


def load_config(path=None, **overrides):
    data = {}
    if path:
        with open(path) as fh:
            data = json.load(fh)
    known = {f.name for f in fields(Config)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    if "l_sweep" in data:
        data["l_sweep"] = tuple(data["l_sweep"])
    return Config(**data)
