"""Base-station sleeping simulator for ultra-dense cellular networks."""
from .model import (
    BaseStation,
    BSState,
    ConnectionMatrix,
    ContractViolation,
    GainModel,
    InterferenceModel,
    NetworkState,
    PowerConfig,
    RadioConfig,
    UserEquipment,
    channel_gain,
    energy_efficiency,
    load_degree,
    noise_power,
    shannon_rate,
    sinr,
    sinr_matrix,
    total_power,
    total_rate,
    tx_power,
)
from .scenario import ScenarioConfig, generate
from .initial_connection import initial_connect
from .sleeping import run_sleeping
from .baseline import run_baseline
from .constraints import validate

__version__ = "0.1.0"

__all__ = [
    "BaseStation",
    "BSState",
    "ConnectionMatrix",
    "ContractViolation",
    "GainModel",
    "InterferenceModel",
    "NetworkState",
    "PowerConfig",
    "RadioConfig",
    "UserEquipment",
    "channel_gain",
    "energy_efficiency",
    "load_degree",
    "noise_power",
    "shannon_rate",
    "sinr",
    "sinr_matrix",
    "total_power",
    "total_rate",
    "tx_power",
    "ScenarioConfig",
    "generate",
    "initial_connect",
    "run_sleeping",
    "run_baseline",
    "validate",
]
