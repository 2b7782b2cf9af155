"""
Sweep configuration.

A sweep is fully described by a frozen SweepConfig; the CSV it produces is a
pure function of it. Config files are flat `key = value` text whose keys are
SweepConfig field names and whose values are YAML scalars or flow lists.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import yaml

from phy.modem import Mapping, required_antennas


class ChannelModel(str, Enum):
    RAYLEIGH_ZF = 'rayleigh_zf'
    HARDENING = 'hardening'
    UNCODED_RAYLEIGH_ZF = 'uncoded_rayleigh_zf'


DEFAULT_MIN_BLOCK_ERRORS = 100


def default_workers() -> int:
    return int(os.getenv('LINKSIM_WORKERS', '1'))


def parse_ebno_grid(spec) -> Tuple[float, ...]:
    """
    Eb/N0 grid from 'start:step:stop' (stop inclusive), a single number,
    or a sequence of numbers.
    """
    if isinstance(spec, (int, float)):
        return (float(spec),)
    if isinstance(spec, str):
        parts = spec.split(':')
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError(f"Eb/N0 grid {spec!r} must be 'start:step:stop'")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"Eb/N0 grid {spec!r} needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-3)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(v) for v in spec)


@dataclass(frozen=True)
class SweepConfig:
    n: int
    k: int
    m: int
    n_r: int
    n_b: int
    ebno_grid_db: Tuple[float, ...]
    trials_per_point: int
    mapping: Mapping = Mapping.GRAY
    channel_model: ChannelModel = ChannelModel.RAYLEIGH_ZF
    min_block_errors: Optional[int] = DEFAULT_MIN_BLOCK_ERRORS
    master_seed: int = 0
    query_cap: Optional[int] = None
    neumann_terms: Optional[int] = None
    workers: int = 1
    noise_free: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'mapping', Mapping(self.mapping))
        object.__setattr__(self, 'channel_model', ChannelModel(self.channel_model))
        object.__setattr__(self, 'ebno_grid_db', parse_ebno_grid(self.ebno_grid_db))

        if not 0 < self.k < self.n:
            raise ValueError(f"need 0 < k < n, got n={self.n}, k={self.k}")
        n_t = required_antennas(self.n, self.m)
        if self.m < 4 or (self.m.bit_length() - 1) % 2:
            raise ValueError(f"M={self.m} is not a square QAM order")
        if self.n_r < n_t:
            raise ValueError(f"n_r={self.n_r} is below the {n_t} transmit antennas")
        if not 0 <= self.n_b <= self.n:
            raise ValueError(f"need 0 <= n_b <= n, got n_b={self.n_b}")
        grid = self.ebno_grid_db
        if not grid:
            raise ValueError("Eb/N0 grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"Eb/N0 grid must be strictly increasing: {grid}")
        if self.trials_per_point < 1:
            raise ValueError(f"trials_per_point must be >= 1, got {self.trials_per_point}")
        if self.min_block_errors is not None and self.min_block_errors < 1:
            raise ValueError(f"min_block_errors must be >= 1, got {self.min_block_errors}")
        if self.query_cap is not None and self.query_cap < 1:
            raise ValueError(f"query_cap must be >= 1, got {self.query_cap}")
        if self.neumann_terms is not None and self.neumann_terms < 1:
            raise ValueError(f"neumann_terms must be >= 1, got {self.neumann_terms}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    @property
    def n_t(self) -> int:
        return required_antennas(self.n, self.m)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def bits_per_symbol(self) -> int:
        return self.m.bit_length() - 1

    def describe(self) -> str:
        return (f"RLC ({self.n},{self.k}) {self.m}-QAM {self.mapping.value}, "
                f"N_T={self.n_t} N_R={self.n_r}, {self.channel_model.value}, n_b={self.n_b}")


CONFIG_KEYS = tuple(f.name for f in fields(SweepConfig))
OPTIONAL_KEYS = ('min_block_errors', 'query_cap', 'neumann_terms')


def parse_config_text(text: str) -> Dict[str, Any]:
    """Flat key=value lines; '#' starts a comment."""
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        if key == 'ebno_grid_db' and ':' in value:
            # keep start:step:stop away from YAML 1.1 sexagesimal integers
            values[key] = value
            continue
        try:
            values[key] = yaml.safe_load(value) if value else None
        except yaml.YAMLError as e:
            raise ValueError(f"line {lineno}: cannot parse value {value!r}: {e}") from None
    return values


def load_config_file(path: str) -> Dict[str, Any]:
    with open(path, 'r') as f:
        return parse_config_text(f.read())


def config_from_mapping(values: Dict[str, Any]) -> SweepConfig:
    """
    Build a SweepConfig from parsed settings. An explicit None is kept for
    the optional settings (min_block_errors = null turns early stopping off);
    absent keys take the field default.
    """
    required = ('n', 'k', 'm', 'n_r', 'n_b', 'ebno_grid_db', 'trials_per_point')
    missing = [key for key in required if values.get(key) is None]
    if missing:
        raise ValueError(f"missing required settings: {', '.join(missing)}")
    return SweepConfig(**{key: val for key, val in values.items() if val is not None or key in OPTIONAL_KEYS})


def render_config(cfg: SweepConfig) -> str:
    """Config-file text that parse_config_text reads back to the same SweepConfig."""
    lines = []
    for key in CONFIG_KEYS:
        value = getattr(cfg, key)
        if value is None:
            value = 'null'
        elif isinstance(value, Enum):
            value = value.value
        elif isinstance(value, bool):
            value = 'true' if value else 'false'
        elif isinstance(value, tuple):
            value = '[' + ', '.join(repr(float(v)) for v in value) + ']'
        lines.append(f"{key} = {value}")
    return '\n'.join(lines) + '\n'
