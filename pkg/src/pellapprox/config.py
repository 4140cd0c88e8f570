"""Run configuration: defaults < environment < config file < command line."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import InvalidInput
from .intervals import CEILING_ENV_VAR

FORMATS = ("json", "csv", "text")


@dataclass(frozen=True)
class RunConfig:
    precision_start: int = 128
    precision_ceiling: int = 8192
    y_cap: int = 10**6
    q_max: int = 10**4
    output_format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.precision_start > self.precision_ceiling:
            raise InvalidInput("precision_start must not exceed precision_ceiling")
        if self.precision_start < 16:
            raise InvalidInput("precision_start must be at least 16 bits")
        if self.y_cap < 1 or self.q_max < 1:
            raise InvalidInput("caps must be at least 1")
        if self.output_format not in FORMATS:
            raise InvalidInput(f"output_format must be one of {', '.join(FORMATS)}")

    def updated(self, **overrides) -> RunConfig:
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    known = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise InvalidInput(f"config line {lineno}: unknown key {key!r}")
        if key == "output_format":
            out[key] = value
        else:
            try:
                out[key] = int(value)
            except ValueError:
                raise InvalidInput(f"config line {lineno}: {key} must be an integer") from None
    return out


def load_config(path: str | os.PathLike | None = None, **overrides) -> RunConfig:
    cfg = RunConfig()
    env = os.environ.get(CEILING_ENV_VAR)
    if env:
        try:
            ceiling = int(env)
        except ValueError:
            raise InvalidInput(f"{CEILING_ENV_VAR} must be an integer") from None
        cfg = cfg.updated(precision_ceiling=ceiling, precision_start=min(cfg.precision_start, ceiling))
    if path is not None:
        cfg = cfg.updated(**parse_config_text(Path(path).read_text()))
    return cfg.updated(**overrides)
