"""Random BS deactivation baseline.

Each step sleeps a uniformly chosen Active BS and re-homes its UEs by
blind random picks among the other Active BSs; a pick only sticks when the
link qualifies and the target has spare capacity.  If any UE runs out of
picks the step is undone.
"""
from __future__ import annotations

from typing import Optional, Union

import numpy as np

from .model import (
    BSState,
    ContractViolation,
    NetworkState,
    PowerConfig,
    RadioConfig,
    energy_efficiency,
    qualifying_links,
    sinr_matrix,
    total_power,
)
from .sleeping import IterationRecord, Observer, OutcomeKind, SleepOutcome

DEFAULT_MAX_RETRIES = 10


def _as_rng(seed: Union[int, np.random.Generator, np.random.SeedSequence]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def random_sleep_step(state: NetworkState, rng: np.random.Generator, cfg: RadioConfig,
                      pcfg: PowerConfig, max_retries: int = DEFAULT_MAX_RETRIES) -> SleepOutcome:
    active = state.active_ids()
    if not active:
        raise ContractViolation("no Active BS left")
    victim = active[int(rng.integers(len(active)))]
    others = [b for b in active if b != victim]
    if not others:
        return SleepOutcome(OutcomeKind.REJECTED_NO_NEIGHBORS, candidate=victim)

    post = state.active_mask()
    post[victim] = False
    ok = qualifying_links(state, cfg, pcfg, post, sinr_values=sinr_matrix(state, cfg, pcfg, post))
    rows = state.connections.row_counts().copy()
    ues = state.connections.ues_of(victim)
    plan = []
    for j in rng.permutation(ues) if ues else []:
        j = int(j)
        reason = None
        for _ in range(max_retries):
            b = others[int(rng.integers(len(others)))]
            if not ok[b, j]:
                reason = OutcomeKind.REJECTED_SINR
            elif rows[b] >= pcfg.max_load:
                reason = OutcomeKind.REJECTED_OVERLOAD
            else:
                rows[b] += 1
                plan.append((j, b))
                reason = None
                break
        if reason is not None:
            return SleepOutcome(reason, candidate=victim)

    conn = state.connections
    for j, b in plan:
        conn.set(victim, j, 0)
        conn.set(b, j, 1)
    state.base_stations[victim].state = BSState.SLEEP
    return SleepOutcome(OutcomeKind.ACCEPTED, slept_bs=victim, reassignments=plan, candidate=victim)


def run_baseline(state: NetworkState, seed, max_attempts: int, cfg: RadioConfig, pcfg: PowerConfig,
                 stall_window: Optional[int] = None,
                 max_retries: int = DEFAULT_MAX_RETRIES,
                 observer: Optional[Observer] = None) -> list[IterationRecord]:
    """Repeat random sleep steps until ``stall_window`` consecutive rejections.

    ``stall_window`` defaults to the number of BSs.  ``seed`` may be an int
    or an already-constructed numpy Generator.
    """
    rng = _as_rng(seed)
    window = state.n_bs if stall_window is None else stall_window
    records: list[IterationRecord] = []
    stalled = 0
    while len(records) < max_attempts and stalled < window:
        outcome = random_sleep_step(state, rng, cfg, pcfg, max_retries)
        stalled = 0 if outcome.accepted else stalled + 1
        records.append(IterationRecord(
            iteration=len(records) + 1,
            active_count=state.active_count(),
            ee=energy_efficiency(state, cfg, pcfg),
            event=outcome.summary(),
            total_power_w=total_power(state, pcfg),
            outcome=outcome,
        ))
        if observer is not None:
            observer(records[-1], state)
    return records
