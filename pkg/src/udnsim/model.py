"""Network state and the closed-form radio / power / efficiency model.

SINR uses a connection-independent, worst-case interference picture: the
serving BS spends ``p_max / S_max`` on the UE under evaluation and every
other Active BS is assumed to occupy the same resource unit.  With the
default ``per_resource`` model an interferer radiates its per-UE share
``p_max / S_max`` on that unit; ``full_power`` charges its whole ``p_max``
instead.  Either way link screening is well defined before any association
exists.

All interference sums are accumulated over BS index in ascending order with
plain IEEE additions, so the scalar :func:`sinr` and the vectorised
:func:`sinr_matrix` return bit-identical values.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np


class BSState(enum.IntEnum):
    SLEEP = 0
    ACTIVE = 1


class GainModel(str, enum.Enum):
    UNIT = "unit"
    POWER_LAW = "powerlaw"


class InterferenceModel(str, enum.Enum):
    PER_RESOURCE = "per_resource"
    FULL_POWER = "full_power"


class ContractViolation(ValueError):
    """Raised when an operation is called outside its precondition."""


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadioConfig:
    """Link-level parameters.

    Defaults: -5 dB threshold, path-loss exponent 2, -174 dBm/Hz noise over
    a 10 MHz band (the bandwidth is our own pick).
    """
    sinr_threshold_db: float = -5.0
    pathloss_exponent: float = 2.0
    gain_model: GainModel = GainModel.POWER_LAW
    noise_density_dbm_per_hz: float = -174.0
    bandwidth_hz: float = 10e6
    min_distance_m: float = 1.0
    interference_model: InterferenceModel = InterferenceModel.PER_RESOURCE

    def __post_init__(self):
        object.__setattr__(self, "gain_model", GainModel(self.gain_model))
        object.__setattr__(self, "interference_model", InterferenceModel(self.interference_model))
        if self.pathloss_exponent < 0:
            raise ValueError("pathloss_exponent must be >= 0")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be > 0")
        if self.min_distance_m <= 0:
            raise ValueError("min_distance_m must be > 0")

    @property
    def sinr_threshold_linear(self) -> float:
        return db_to_linear(self.sinr_threshold_db)


@dataclass(frozen=True)
class PowerConfig:
    """BS power figures in watts and the per-BS UE capacity.

    ``max_tx_power_w`` (1 W) is our own pick; the circuit, sleep and capacity
    defaults describe a typical small cell.
    """
    active_circuit_power_w: float = 25.0
    sleep_power_w: float = 8.0
    max_tx_power_w: float = 1.0
    max_load: int = 30

    def __post_init__(self):
        if not self.active_circuit_power_w > self.sleep_power_w >= 0:
            raise ValueError("need active_circuit_power_w > sleep_power_w >= 0")
        if self.max_load < 1:
            raise ValueError("max_load must be >= 1")
        if self.max_tx_power_w <= 0:
            raise ValueError("max_tx_power_w must be > 0")


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass
class BaseStation:
    id: int
    position: tuple[float, float]
    radius: float
    max_tx_power: float
    state: BSState = BSState.ACTIVE

    def __post_init__(self):
        if self.radius <= 0 or self.max_tx_power <= 0:
            raise ValueError(f"BS {self.id}: radius and max_tx_power must be > 0")

    @property
    def active(self) -> bool:
        return self.state == BSState.ACTIVE


@dataclass
class UserEquipment:
    id: int
    position: tuple[float, float]


class ConnectionMatrix:
    """Dense 0/1 association matrix, rows are BSs and columns UEs."""

    def __init__(self, n_bs: int, n_ue: int, data: Optional[np.ndarray] = None):
        if data is None:
            data = np.zeros((n_bs, n_ue), dtype=bool)
        else:
            data = np.array(data, dtype=bool, copy=True)
            if data.shape != (n_bs, n_ue):
                raise ValueError(f"expected shape {(n_bs, n_ue)}, got {data.shape}")
        self._a = data

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying boolean array."""
        view = self._a.view()
        view.flags.writeable = False
        return view

    def get(self, i: int, j: int) -> int:
        return int(self._a[i, j])

    def set(self, i: int, j: int, value: int = 1) -> None:
        if value not in (0, 1):
            raise ValueError("connection entries are 0 or 1")
        self._a[i, j] = bool(value)

    def clear(self) -> None:
        self._a[:] = False

    def row_count(self, i: int) -> int:
        return int(self._a[i].sum())

    def col_count(self, j: int) -> int:
        return int(self._a[:, j].sum())

    def row_counts(self) -> np.ndarray:
        return self._a.sum(axis=1)

    def col_counts(self) -> np.ndarray:
        return self._a.sum(axis=0)

    def ues_of(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self._a[i])]

    def bss_of(self, j: int) -> list[int]:
        return [int(i) for i in np.flatnonzero(self._a[:, j])]

    def serving_bs(self, j: int) -> Optional[int]:
        """The unique serving BS of UE ``j``, or None when unserved."""
        rows = np.flatnonzero(self._a[:, j])
        if len(rows) > 1:
            raise ContractViolation(f"UE {j} has {len(rows)} connections")
        return int(rows[0]) if len(rows) else None

    def links(self) -> Iterator[tuple[int, int]]:
        for i, j in zip(*np.nonzero(self._a)):
            yield int(i), int(j)

    def copy(self) -> "ConnectionMatrix":
        return ConnectionMatrix(*self._a.shape, data=self._a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConnectionMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __repr__(self) -> str:
        return f"ConnectionMatrix(shape={self.shape}, links={int(self._a.sum())})"


@dataclass
class NetworkState:
    """BSs, UEs and their association; mutated in place by the algorithms.

    BS and UE ids are their 0-based list positions.  Positions are treated as
    fixed once the state exists (geometry is cached on first use).
    """
    base_stations: list[BaseStation]
    user_equipments: list[UserEquipment]
    connections: Optional[ConnectionMatrix] = None
    area: Optional[tuple[float, float]] = None
    _geometry: Optional[tuple] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for k, bs in enumerate(self.base_stations):
            if bs.id != k:
                raise ValueError(f"base station at position {k} has id {bs.id}")
        for k, ue in enumerate(self.user_equipments):
            if ue.id != k:
                raise ValueError(f"UE at position {k} has id {ue.id}")
        if self.connections is None:
            self.connections = ConnectionMatrix(self.n_bs, self.n_ue)
        elif self.connections.shape != (self.n_bs, self.n_ue):
            raise ValueError("connection matrix shape does not match BS/UE counts")
        if self.area is not None:
            w, h = self.area
            for node in [*self.base_stations, *self.user_equipments]:
                x, y = node.position
                if not (0.0 <= x <= w and 0.0 <= y <= h):
                    raise ValueError(f"{type(node).__name__} {node.id} lies outside the area")

    @property
    def n_bs(self) -> int:
        return len(self.base_stations)

    @property
    def n_ue(self) -> int:
        return len(self.user_equipments)

    def active_mask(self) -> np.ndarray:
        return np.array([bs.active for bs in self.base_stations], dtype=bool)

    def active_ids(self) -> list[int]:
        return [bs.id for bs in self.base_stations if bs.active]

    def active_count(self) -> int:
        return sum(1 for bs in self.base_stations if bs.active)

    def _geom(self):
        if self._geometry is None:
            bs_xy = np.array([bs.position for bs in self.base_stations], dtype=float).reshape(-1, 2)
            ue_xy = np.array([ue.position for ue in self.user_equipments], dtype=float).reshape(-1, 2)
            bs_ue = np.hypot(bs_xy[:, None, 0] - ue_xy[None, :, 0], bs_xy[:, None, 1] - ue_xy[None, :, 1])
            bs_bs = np.hypot(bs_xy[:, None, 0] - bs_xy[None, :, 0], bs_xy[:, None, 1] - bs_xy[None, :, 1])
            self._geometry = (bs_ue, bs_bs)
        return self._geometry

    def bs_ue_distances(self) -> np.ndarray:
        """N x M Euclidean BS-UE distances in meters."""
        return self._geom()[0]

    def bs_bs_distances(self) -> np.ndarray:
        return self._geom()[1]

    def radii(self) -> np.ndarray:
        return np.array([bs.radius for bs in self.base_stations], dtype=float)

    def max_tx_powers(self) -> np.ndarray:
        return np.array([bs.max_tx_power for bs in self.base_stations], dtype=float)

    def in_radius(self) -> np.ndarray:
        """N x M mask: UE lies within the BS transmission radius."""
        return self.bs_ue_distances() <= self.radii()[:, None]

    def snapshot(self) -> tuple:
        """Hashable summary of the mutable part of the state."""
        a = self.connections.array
        return (tuple(int(bs.state) for bs in self.base_stations), a.shape, a.tobytes())

    def copy(self) -> "NetworkState":
        clone = NetworkState(
            [BaseStation(bs.id, bs.position, bs.radius, bs.max_tx_power, bs.state)
             for bs in self.base_stations],
            [UserEquipment(ue.id, ue.position) for ue in self.user_equipments],
            self.connections.copy(),
            self.area,
        )
        clone._geometry = self._geometry
        return clone


# ---------------------------------------------------------------------------
# Radio model
# ---------------------------------------------------------------------------

def _gain_from_distance(d, cfg: RadioConfig):
    if cfg.gain_model == GainModel.UNIT:
        return np.ones_like(d, dtype=float) if isinstance(d, np.ndarray) else 1.0
    if isinstance(d, np.ndarray):
        return np.maximum(d, cfg.min_distance_m) ** (-cfg.pathloss_exponent)
    return max(d, cfg.min_distance_m) ** (-cfg.pathloss_exponent)


def channel_gain(bs: BaseStation, ue: UserEquipment, cfg: RadioConfig) -> float:
    d = math.hypot(bs.position[0] - ue.position[0], bs.position[1] - ue.position[1])
    return float(_gain_from_distance(d, cfg))


def gain_matrix(state: NetworkState, cfg: RadioConfig) -> np.ndarray:
    return _gain_from_distance(state.bs_ue_distances(), cfg)


def noise_power(cfg: RadioConfig) -> float:
    """Thermal noise in watts over the configured bandwidth."""
    return 10.0 ** ((cfg.noise_density_dbm_per_hz - 30.0) / 10.0) * cfg.bandwidth_hz


def load_degree(state: NetworkState, i: int, pcfg: PowerConfig) -> float:
    return state.connections.row_count(i) / pcfg.max_load


def load_degrees(state: NetworkState, pcfg: PowerConfig) -> np.ndarray:
    return state.connections.row_counts() / pcfg.max_load


def tx_power(bs: BaseStation, state: NetworkState, cfg: PowerConfig) -> float:
    return bs.max_tx_power * state.connections.row_count(bs.id) / cfg.max_load


def interferer_powers(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig) -> np.ndarray:
    """Power each BS is charged with when it interferes with another link."""
    p_max = state.max_tx_powers()
    if cfg.interference_model == InterferenceModel.FULL_POWER:
        return p_max
    return p_max / pcfg.max_load


def _interference(gains: np.ndarray, p_intf: np.ndarray, active: np.ndarray, i: int, j) -> float:
    acc = 0.0
    for k in range(len(p_intf)):
        if active[k] and k != i:
            acc = acc + p_intf[k] * gains[k, j]
    return acc


def sinr(state: NetworkState, i: int, j: int, cfg: RadioConfig, pcfg: PowerConfig,
         active: Optional[np.ndarray] = None) -> float:
    """Linear SINR of BS ``i`` serving UE ``j``.

    ``active`` overrides the BS activity vector (used to evaluate a
    hypothetical post-sleep state without mutating ``state``).
    """
    if active is None:
        active = state.active_mask()
    if not active[i]:
        raise ContractViolation(f"BS {i} is asleep and cannot serve UE {j}")
    gains = gain_matrix(state, cfg)
    p_max = state.max_tx_powers()
    p_intf = interferer_powers(state, cfg, pcfg)
    signal = (p_max[i] / pcfg.max_load) * gains[i, j]
    return float(signal / (_interference(gains, p_intf, active, i, j) + noise_power(cfg)))


def sinr_matrix(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig,
                active: Optional[np.ndarray] = None) -> np.ndarray:
    """N x M SINR for every (serving BS, UE) pair; 0 where the BS is asleep."""
    if active is None:
        active = state.active_mask()
    active = np.asarray(active, dtype=bool)
    gains = gain_matrix(state, cfg)
    p_max = state.max_tx_powers()
    n = len(p_max)
    weighted = interferer_powers(state, cfg, pcfg)[:, None] * gains
    acc = np.zeros_like(gains)
    for k in range(n):
        if not active[k]:
            continue
        rows = np.ones(n, dtype=bool)
        rows[k] = False
        acc[rows] = acc[rows] + weighted[k]
    signal = (p_max / pcfg.max_load)[:, None] * gains
    out = signal / (acc + noise_power(cfg))
    out[~active] = 0.0
    return out


def qualifying_links(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig,
                     active: Optional[np.ndarray] = None, strict: bool = False,
                     sinr_values: Optional[np.ndarray] = None) -> np.ndarray:
    """N x M mask of links that clear the SINR threshold and the radius gate.

    ``strict`` selects ``>`` (initial association) instead of ``>=``
    (takeover checks).
    """
    if active is None:
        active = state.active_mask()
    s = sinr_matrix(state, cfg, pcfg, active) if sinr_values is None else sinr_values
    th = cfg.sinr_threshold_linear
    ok = s > th if strict else s >= th
    return ok & state.in_radius() & np.asarray(active, dtype=bool)[:, None]


def shannon_rate(sinr_value: float) -> float:
    if sinr_value < 0:
        raise ValueError("SINR must be non-negative")
    return math.log2(1.0 + sinr_value)


def total_rate(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig) -> float:
    """Sum of Shannon rates over links whose serving BS is Active."""
    active = state.active_mask()
    a = state.connections.array
    if not a.any():
        return 0.0
    s = sinr_matrix(state, cfg, pcfg, active)
    total = 0.0
    for i, j in state.connections.links():
        if active[i]:
            total += math.log2(1.0 + float(s[i, j]))
    return total


def total_power(state: NetworkState, pcfg: PowerConfig) -> float:
    total = 0.0
    for bs in state.base_stations:
        if bs.active:
            total += tx_power(bs, state, pcfg) + pcfg.active_circuit_power_w
        else:
            total += pcfg.sleep_power_w
    return total


def energy_efficiency(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig) -> float:
    """Total rate (bit/s/Hz) per watt of total network power."""
    return total_rate(state, cfg, pcfg) / total_power(state, pcfg)


def make_state(bs_positions: Sequence[tuple[float, float]],
               ue_positions: Sequence[tuple[float, float]],
               radius: float = 120.0, max_tx_power: float = 1.0,
               area: Optional[tuple[float, float]] = None) -> NetworkState:
    """Convenience constructor for hand-built fixtures."""
    bss = [BaseStation(k, (float(x), float(y)), radius, max_tx_power)
           for k, (x, y) in enumerate(bs_positions)]
    ues = [UserEquipment(k, (float(x), float(y))) for k, (x, y) in enumerate(ue_positions)]
    return NetworkState(bss, ues, area=area)
