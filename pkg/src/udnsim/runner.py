"""End-to-end experiment pipeline: generate, associate, sleep, summarise."""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Optional

from .baseline import run_baseline
from .constraints import ConstraintReport, link_violations, validate
from .initial_connection import ConnectionReport, initial_connect
from .model import NetworkState, energy_efficiency, total_power
from .scenario import ScenarioConfig, algorithm_rng, generate
from .sleeping import IterationRecord, Observer, run_sleeping

ALGORITHMS = ("proposed", "baseline")
DEFAULT_BASELINE_ATTEMPTS = 1000


@dataclass
class RunResult:
    config: ScenarioConfig
    algorithm: str
    connection: ConnectionReport
    records: list[IterationRecord]
    initial_ee: float
    initial_power_w: float
    topology_initial: dict
    topology_connected: dict
    topology_final: dict
    final_report: ConstraintReport
    qos_violations: list = field(default_factory=list)
    state: Optional[NetworkState] = field(default=None, repr=False)

    @property
    def final_active(self) -> int:
        return self.final_report.o2_active

    @property
    def final_ee(self) -> float:
        return self.final_report.o1_ee

    @property
    def convergence_iteration(self) -> int:
        """Index of the last accepted sleep, 0 when nothing was slept."""
        accepted = [r.iteration for r in self.records if r.event.startswith("accepted")]
        return accepted[-1] if accepted else 0


def topology(state: NetworkState) -> dict:
    return {
        "area": list(state.area) if state.area is not None else None,
        "base_stations": [
            {"id": bs.id, "x": bs.position[0], "y": bs.position[1], "radius": bs.radius,
             "state": "active" if bs.active else "sleep"}
            for bs in state.base_stations
        ],
        "user_equipments": [
            {"id": ue.id, "x": ue.position[0], "y": ue.position[1]} for ue in state.user_equipments
        ],
        "links": [[i, j] for i, j in state.connections.links()],
    }


def run_experiment(cfg: ScenarioConfig, algorithm: str = "proposed",
                   max_attempts: int = DEFAULT_BASELINE_ATTEMPTS,
                   stall_window: Optional[int] = None, t_load: Optional[float] = None,
                   observer: Optional[Observer] = None) -> RunResult:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    radio, power = cfg.radio, cfg.power
    state = generate(cfg)
    topo_initial = topology(state)
    report = initial_connect(state, radio, power)
    topo_connected = topology(state)
    initial_ee = energy_efficiency(state, radio, power)
    initial_power = total_power(state, power)

    if algorithm == "proposed":
        records = run_sleeping(state, radio, power, observer=observer)
    else:
        records = run_baseline(state, algorithm_rng(cfg.seed), max_attempts, radio, power,
                               stall_window=stall_window, observer=observer)
    return RunResult(
        config=cfg,
        algorithm=algorithm,
        connection=report,
        records=records,
        initial_ee=initial_ee,
        initial_power_w=initial_power,
        topology_initial=topo_initial,
        topology_connected=topo_connected,
        topology_final=topology(state),
        final_report=validate(state, radio, power, t_load),
        qos_violations=link_violations(state, radio, power),
        state=state,
    )


@dataclass
class BatchRow:
    seed: int
    algorithm: str
    final_active: int
    convergence_iteration: int
    iterations: int
    initial_ee: float
    final_ee: float
    served: int
    unserved: int


def batch_row(result: RunResult) -> BatchRow:
    return BatchRow(
        seed=result.config.seed,
        algorithm=result.algorithm,
        final_active=result.final_active,
        convergence_iteration=result.convergence_iteration,
        iterations=len(result.records),
        initial_ee=result.initial_ee,
        final_ee=result.final_ee,
        served=result.connection.served,
        unserved=len(result.connection.unserved),
    )


def medians(rows: list[BatchRow]) -> dict[str, dict[str, float]]:
    out = {}
    for alg in ALGORITHMS:
        sel = [r for r in rows if r.algorithm == alg]
        if not sel:
            continue
        out[alg] = {
            "final_active": statistics.median(r.final_active for r in sel),
            "convergence_iteration": statistics.median(r.convergence_iteration for r in sel),
            "final_ee": statistics.median(r.final_ee for r in sel),
        }
    return out
