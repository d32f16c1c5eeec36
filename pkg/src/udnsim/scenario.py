"""Scenario configuration and seeded topology generation.

Randomness comes from numpy's PCG64 bit generator driven by a
``SeedSequence``; the scenario seed is split into independent child streams
(BS placement, UE placement, algorithm run) so that changing one consumer
never shifts the draws of another.
"""
from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from .model import (
    BaseStation,
    NetworkState,
    PowerConfig,
    RadioConfig,
    UserEquipment,
)

GENERATOR_ID = "numpy.random.PCG64 via SeedSequence.spawn (streams: 0=bs, 1=ue, 2=algorithm)"

STREAM_BS = 0
STREAM_UE = 1
STREAM_ALGORITHM = 2
_N_STREAMS = 3


class Layout(str, enum.Enum):
    GRID = "grid"
    UNIFORM_RANDOM = "uniform_random"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulated deployment.

    Defaults: 20 BSs on a grid over 1 km x 1 km with 120 m radius and
    capacity 30.  ``n_ue = 250`` is our own pick (about 14 active BSs carrying
    15-22 UEs each).  ``s_max`` overrides
    ``power.max_load`` so the capacity lives in one visible place.
    """
    area: tuple[float, float] = (1000.0, 1000.0)
    n_bs: int = 20
    n_ue: int = 250
    bs_layout: Layout = Layout.GRID
    bs_radius_m: float = 120.0
    s_max: int = 30
    radio: RadioConfig = field(default_factory=RadioConfig)
    power: PowerConfig = field(default_factory=PowerConfig)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bs_layout", Layout(self.bs_layout))
        object.__setattr__(self, "area", tuple(float(v) for v in self.area))
        if self.n_bs < 1:
            raise ConfigError("n_bs must be >= 1")
        if self.n_ue < 0:
            raise ConfigError("n_ue must be >= 0")
        if len(self.area) != 2 or min(self.area) <= 0:
            raise ConfigError("area must be two positive lengths")
        if self.bs_radius_m <= 0:
            raise ConfigError("bs_radius_m must be > 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.power.max_load != self.s_max:
            object.__setattr__(self, "power", dataclasses.replace(self.power, max_load=self.s_max))

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["area"] = list(self.area)
        d["bs_layout"] = self.bs_layout.value
        d["radio"]["gain_model"] = self.radio.gain_model.value
        return d


def _build(cls, data: dict, where: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    return data


def config_from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    data = dict(_build(ScenarioConfig, data, "config"))
    try:
        if "radio" in data:
            data["radio"] = RadioConfig(**_build(RadioConfig, data["radio"], "radio"))
        if "power" in data:
            power = dict(_build(PowerConfig, data["power"], "power"))
            # a bare "power" block inherits the scenario capacity
            power.setdefault("max_load", data.get("s_max", ScenarioConfig.s_max))
            data["power"] = PowerConfig(**power)
        if "area" in data:
            data["area"] = tuple(data["area"])
        return ScenarioConfig(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data)


def seed_streams(seed: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(_N_STREAMS)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def algorithm_rng(seed: int) -> np.random.Generator:
    """The stream reserved for a stochastic algorithm run on this seed."""
    return seed_streams(seed)[STREAM_ALGORITHM]


def grid_shape(n: int) -> tuple[int, int]:
    """(rows, cols) of the most-square grid holding ``n`` cells."""
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    return rows, cols


def grid_positions(n: int, area: tuple[float, float]) -> list[tuple[float, float]]:
    w, h = area
    rows, cols = grid_shape(n)
    dx, dy = w / cols, h / rows
    out = []
    for k in range(n):
        r, c = divmod(k, cols)
        out.append(((c + 0.5) * dx, (r + 0.5) * dy))
    return out


def generate(cfg: ScenarioConfig) -> NetworkState:
    """Build a fresh all-active, unconnected network for ``cfg``."""
    w, h = cfg.area
    rng_bs, rng_ue, _ = seed_streams(cfg.seed)
    if cfg.bs_layout == Layout.GRID:
        bs_xy = grid_positions(cfg.n_bs, cfg.area)
    else:
        pts = rng_bs.uniform((0.0, 0.0), (w, h), size=(cfg.n_bs, 2))
        bs_xy = [(float(x), float(y)) for x, y in pts]
    ue_pts = rng_ue.uniform((0.0, 0.0), (w, h), size=(cfg.n_ue, 2))

    bss = [BaseStation(k, xy, cfg.bs_radius_m, cfg.power.max_tx_power_w)
           for k, xy in enumerate(bs_xy)]
    ues = [UserEquipment(k, (float(x), float(y))) for k, (x, y) in enumerate(ue_pts)]
    return NetworkState(bss, ues, area=cfg.area)


def coverage_audit(state: NetworkState, resolution_m: float = 5.0) -> dict[str, float]:
    """Largest distance from any sampled area point to its nearest BS.

    Samples a lattice with ``resolution_m`` spacing that includes the area
    border, and reports the fraction of points outside every BS radius.
    """
    if state.area is None:
        raise ValueError("state has no area")
    w, h = state.area
    xs = np.linspace(0.0, w, int(round(w / resolution_m)) + 1)
    ys = np.linspace(0.0, h, int(round(h / resolution_m)) + 1)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    bs_xy = np.array([bs.position for bs in state.base_stations])
    d = np.hypot(pts[:, None, 0] - bs_xy[None, :, 0], pts[:, None, 1] - bs_xy[None, :, 1])
    radii = state.radii()
    nearest = d.min(axis=1)
    uncovered = ~(d <= radii[None, :]).any(axis=1)
    return {
        "max_distance_to_nearest_bs_m": float(nearest.max()),
        "uncovered_fraction": float(uncovered.mean()),
    }
