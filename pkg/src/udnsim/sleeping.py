"""Load-sharing BS sleeping.

One sweep localises a sleep candidate through the sleep index, tries to put
the least-loaded neighbour to sleep with two takeover BSs, and on failure
walks the remaining Active BSs in ascending load order.  The run stops when
a full sweep produces no accepted sleep.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .model import (
    BSState,
    ContractViolation,
    NetworkState,
    PowerConfig,
    RadioConfig,
    energy_efficiency,
    load_degrees,
    qualifying_links,
    sinr_matrix,
    total_power,
)


class OutcomeKind(str, enum.Enum):
    ACCEPTED = "accepted"
    REJECTED_OVERLOAD = "rejected_overload"
    REJECTED_SINR = "rejected_sinr"
    REJECTED_NO_NEIGHBORS = "rejected_no_neighbors"
    REJECTED_NO_PAIR = "rejected_no_pair"


class TakeoverOverload(Exception):
    """The takeover pair cannot absorb every UE of the sleeping BS."""


@dataclass(frozen=True)
class SleepIndex:
    bs_id: int
    k: int
    l: int

    @property
    def beta(self) -> int:
        return self.k * self.l


@dataclass
class SleepOutcome:
    kind: OutcomeKind
    slept_bs: Optional[int] = None
    reassignments: list[tuple[int, int]] = field(default_factory=list)
    candidate: Optional[int] = None

    @property
    def accepted(self) -> bool:
        return self.kind == OutcomeKind.ACCEPTED

    def summary(self) -> str:
        bs = self.slept_bs if self.accepted else self.candidate
        return self.kind.value if bs is None else f"{self.kind.value}:bs={bs}"


@dataclass
class IterationRecord:
    iteration: int
    active_count: int
    ee: float
    event: str
    total_power_w: float = float("nan")
    outcome: Optional[SleepOutcome] = field(default=None, repr=False, compare=False)


def _require_active(state: NetworkState, *ids: int) -> None:
    for i in ids:
        if not state.base_stations[i].active:
            raise ContractViolation(f"BS {i} is asleep")


def sleep_index(state: NetworkState, i: int, cfg: RadioConfig, pcfg: PowerConfig,
                qualifying: Optional[np.ndarray] = None) -> SleepIndex:
    """Transferability flag and backup-BS count of Active BS ``i``.

    A backup of UE ``j`` is another Active BS that reaches ``j`` at or above
    the SINR threshold (current interference picture) and within its radius.
    """
    _require_active(state, i)
    if qualifying is None:
        qualifying = qualifying_links(state, cfg, pcfg)
    k, l = 1, 0
    for j in state.connections.ues_of(i):
        backups = int(qualifying[:, j].sum()) - int(qualifying[i, j])
        if backups == 0:
            k = 0
        l += backups
    return SleepIndex(i, k, l)


def find_neighbors(state: NetworkState, bs: int) -> list[int]:
    """Active BSs other than ``bs`` within its transmission radius, by id."""
    d = state.bs_bs_distances()[bs]
    radius = state.base_stations[bs].radius
    return [b.id for b in state.base_stations
            if b.active and b.id != bs and d[b.id] <= radius]


def sharing_ratios(load_a: float, load_b: float, load_min: float) -> tuple[float, float]:
    """Split ``load_min`` between two takeover BSs, inversely to their loads.

    ``L_b`` is taken as the remainder ``load_min - L_a``; this equals
    ``load_a / (load_a + load_b) * load_min`` and keeps ``L_a + L_b`` within
    one ulp of ``load_min``.
    """
    total = load_a + load_b
    if total == 0:
        return load_min / 2, load_min / 2
    share_a = load_b / total * load_min
    return share_a, load_min - share_a


def _post_sleep_mask(state: NetworkState, bs: int) -> np.ndarray:
    active = state.active_mask()
    active[bs] = False
    return active


def plan_reassignment(state: NetworkState, bs_least: int, pair_a: int, pair_b: int,
                      L_a: float, L_b: float, cfg: RadioConfig, pcfg: PowerConfig,
                      sinr_values: Optional[np.ndarray] = None) -> list[tuple[int, int]]:
    """Assign every UE of ``bs_least`` to ``pair_a`` or ``pair_b``.

    ``pair_a`` gets ``round_half_up(n * L_a / (L_a + L_b))`` UEs, ``pair_b``
    the rest; a quota that exceeds a BS's spare capacity spills over to the
    other one.  UEs with the largest SINR advantage towards ``pair_a``
    (post-sleep picture) fill its quota first.

    Raises TakeoverOverload when the pair's spare capacity is below ``n``.
    """
    ues = state.connections.ues_of(bs_least)
    n = len(ues)
    if n == 0:
        return []
    rows = state.connections.row_counts()
    spare_a = pcfg.max_load - int(rows[pair_a])
    spare_b = pcfg.max_load - int(rows[pair_b])
    if spare_a + spare_b < n:
        raise TakeoverOverload(f"pair ({pair_a}, {pair_b}) has {spare_a + spare_b} slots for {n} UEs")

    n_a = math.floor(n * (L_a / (L_a + L_b)) + 0.5)
    n_a = min(max(n_a, n - spare_b), spare_a)
    if sinr_values is None:
        sinr_values = sinr_matrix(state, cfg, pcfg, _post_sleep_mask(state, bs_least))
    advantage = {j: sinr_values[pair_a, j] - sinr_values[pair_b, j] for j in ues}
    ordered = sorted(ues, key=lambda j: (-advantage[j], j))
    return [(j, pair_a) for j in ordered[:n_a]] + [(j, pair_b) for j in ordered[n_a:]]


def try_sleep(state: NetworkState, bs_least: int, pair_a: int, pair_b: int,
              cfg: RadioConfig, pcfg: PowerConfig) -> SleepOutcome:
    """Attempt to sleep ``bs_least`` with ``pair_a``/``pair_b`` taking over.

    The state is only touched when the attempt is accepted.
    """
    _require_active(state, bs_least, pair_a, pair_b)
    if len({bs_least, pair_a, pair_b}) != 3:
        raise ContractViolation("sleep candidate and takeover BSs must be distinct")
    near = state.bs_bs_distances()[bs_least]
    radius = state.base_stations[bs_least].radius
    if near[pair_a] > radius or near[pair_b] > radius:
        raise ContractViolation("takeover BSs must lie within the candidate's radius")

    loads = load_degrees(state, pcfg)
    L_a, L_b = sharing_ratios(float(loads[pair_a]), float(loads[pair_b]), float(loads[bs_least]))
    post = _post_sleep_mask(state, bs_least)
    s_post = sinr_matrix(state, cfg, pcfg, post)
    try:
        plan = plan_reassignment(state, bs_least, pair_a, pair_b, L_a, L_b, cfg, pcfg, s_post)
    except TakeoverOverload:
        return SleepOutcome(OutcomeKind.REJECTED_OVERLOAD, candidate=bs_least)

    rows = state.connections.row_counts().copy()
    for _, b in plan:
        rows[b] += 1
    if rows[pair_a] > pcfg.max_load or rows[pair_b] > pcfg.max_load:
        return SleepOutcome(OutcomeKind.REJECTED_OVERLOAD, candidate=bs_least)

    ok = qualifying_links(state, cfg, pcfg, post, sinr_values=s_post)
    if not all(ok[b, j] for j, b in plan):
        return SleepOutcome(OutcomeKind.REJECTED_SINR, candidate=bs_least)

    conn = state.connections
    for j, b in plan:
        conn.set(bs_least, j, 0)
        conn.set(b, j, 1)
    state.base_stations[bs_least].state = BSState.SLEEP
    return SleepOutcome(OutcomeKind.ACCEPTED, slept_bs=bs_least, reassignments=plan,
                        candidate=bs_least)


def _by_load(ids, loads) -> list[int]:
    return sorted(ids, key=lambda b: (loads[b], b))


def _attempt_from(state: NetworkState, bs_least: int, loads, cfg, pcfg) -> SleepOutcome:
    surrounding = find_neighbors(state, bs_least)
    if len(surrounding) < 2:
        return SleepOutcome(OutcomeKind.REJECTED_NO_PAIR, candidate=bs_least)
    pair_a, pair_b = _by_load(surrounding, loads)[:2]
    return try_sleep(state, bs_least, pair_a, pair_b, cfg, pcfg)


Observer = Callable[[IterationRecord, NetworkState], None]


def run_sleeping(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig,
                 observer: Optional[Observer] = None) -> list[IterationRecord]:
    """Sleep redundant BSs until a full sweep accepts nothing.

    Every attempt, accepted or not, yields one IterationRecord describing the
    state after the attempt; ``observer`` is called with each new record.
    """
    records: list[IterationRecord] = []

    def record(outcome: SleepOutcome) -> None:
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

    while True:
        active = state.active_ids()
        qualifying = qualifying_links(state, cfg, pcfg)
        indices = [sleep_index(state, i, cfg, pcfg, qualifying) for i in active]
        if not indices:
            break
        best = max(indices, key=lambda x: (x.beta, -x.bs_id))
        if best.beta == 0:
            break

        loads = load_degrees(state, pcfg)
        tried: set[int] = set()
        neighbors = find_neighbors(state, best.bs_id)
        if not neighbors:
            outcome = SleepOutcome(OutcomeKind.REJECTED_NO_NEIGHBORS, candidate=best.bs_id)
        else:
            bs_least = _by_load(neighbors, loads)[0]
            tried.add(bs_least)
            outcome = _attempt_from(state, bs_least, loads, cfg, pcfg)
        record(outcome)
        if outcome.accepted:
            continue

        # fallback: walk the Active set by ascending load
        for candidate in _by_load(active, loads):
            if candidate in tried:
                continue
            tried.add(candidate)
            outcome = _attempt_from(state, candidate, loads, cfg, pcfg)
            record(outcome)
            if outcome.accepted:
                break
        if not outcome.accepted:
            break
    return records
