import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udnsim.model import (
    BSState,
    ContractViolation,
    PowerConfig,
    RadioConfig,
    load_degrees,
    make_state,
    sinr,
    total_power,
)
from udnsim.sleeping import (
    OutcomeKind,
    SleepIndex,
    TakeoverOverload,
    find_neighbors,
    plan_reassignment,
    run_sleeping,
    sharing_ratios,
    sleep_index,
    try_sleep,
)

CFG = RadioConfig()
PCFG = PowerConfig(max_load=10)
TRIANGLE = [(100, 100), (160, 100), (100, 160)]
OWNERS = [0] * 5 + [1] * 2 + [2] * 3
OTHER_UES = [(170, 100), (165, 95), (100, 170), (95, 165), (105, 170)]


def _triangle(bs0_ues):
    state = make_state(TRIANGLE, list(bs0_ues) + OTHER_UES)
    for j, i in enumerate(OWNERS):
        state.connections.set(i, j)
    return state


def close_ues():
    # BS0's UEs hug BS0: nobody has a backup while all three BSs are on
    return _triangle([(105, 95), (110, 100), (100, 110), (95, 105), (100, 100)])


def midpoint_ues():
    # BS0's UEs sit near the midpoints towards BS1/BS2, so each has a backup
    return _triangle([(130, 100), (128, 102), (100, 130), (102, 128), (125, 125)])


# --- sharing ratios ------------------------------------------------------------

def test_sharing_ratios_worked_example():
    assert sharing_ratios(0.2, 0.3, 0.5) == (0.3, 0.2)


def test_sharing_ratios_equal_and_zero_loads():
    assert sharing_ratios(0.4, 0.4, 0.6) == (0.3, 0.3)
    assert sharing_ratios(0.0, 0.0, 0.5) == (0.25, 0.25)
    assert sharing_ratios(0.0, 0.5, 0.4) == (0.4, 0.0)


unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@settings(max_examples=300)
@given(a=unit, b=unit, m=unit)
def test_sharing_ratios_conserve_and_order(a, b, m):
    la, lb = sharing_ratios(a, b, m)
    assert abs((la + lb) - m) <= math.ulp(m)
    assert la >= 0 and lb >= -math.ulp(m)
    if a < b and m > 0:
        assert la >= lb  # the lighter BS takes the larger share


# --- sleep index / neighbours ----------------------------------------------------

def test_sleep_index_without_backups_is_zero():
    state = close_ues()
    assert [sleep_index(state, i, CFG, PCFG).beta for i in range(3)] == [0, 0, 0]


def test_sleep_index_counts_backups():
    state = midpoint_ues()
    # four UEs with one backup each, the diagonal one (125,125) with two
    assert sleep_index(state, 0, CFG, PCFG) == SleepIndex(0, 1, 6)
    assert sleep_index(state, 0, CFG, PCFG).beta == 6
    # BS1's far-side UEs have no backup, so k=0
    assert sleep_index(state, 1, CFG, PCFG).k == 0


def test_sleep_index_of_idle_bs_is_transferable_with_no_backups():
    state = make_state([(0, 0), (50, 0)], [(10, 0)])
    state.connections.set(0, 0)
    assert sleep_index(state, 1, CFG, PCFG) == SleepIndex(1, 1, 0)


def test_find_neighbors():
    state = make_state([(0, 0), (100, 0), (121, 0), (0, 120)], [])
    assert find_neighbors(state, 0) == [1, 3]
    state.base_stations[1].state = BSState.SLEEP
    assert find_neighbors(state, 0) == [3]
    assert find_neighbors(make_state([(0, 0)], []), 0) == []


def test_sleep_index_requires_active_bs():
    state = midpoint_ues()
    state.base_stations[0].state = BSState.SLEEP
    with pytest.raises(ContractViolation):
        sleep_index(state, 0, CFG, PCFG)


# --- reassignment plan ------------------------------------------------------------

def test_plan_quota_and_advantage_order():
    state = close_ues()
    # loads 0.5 / 0.2 / 0.3 -> shares (0.3, 0.2) -> quotas 3 and 2
    assert list(load_degrees(state, PCFG)) == [0.5, 0.2, 0.3]
    plan = plan_reassignment(state, 0, 1, 2, 0.3, 0.2, CFG, PCFG)
    # post-sleep advantage towards BS1: UE1 > UE0 > UE4 (0) > UE3 > UE2
    assert plan == [(1, 1), (0, 1), (4, 1), (3, 2), (2, 2)]


def test_plan_tie_goes_to_lowest_ue_id():
    # two UEs symmetric to both takeover BSs: equal advantage 0
    state = make_state([(0, 0), (50, 0), (-50, 0)], [(0, 10), (0, -10)])
    state.connections.set(0, 0)
    state.connections.set(0, 1)
    plan = plan_reassignment(state, 0, 1, 2, 0.5, 0.5, CFG, PCFG)
    assert plan == [(0, 1), (1, 2)]


def test_plan_spills_quota_to_spare_capacity():
    state = close_ues()
    pcfg = PowerConfig(max_load=5)
    for j in (7, 8):  # fill BS1 to 4/5 by taking two of BS2's UEs
        state.connections.set(2, j, 0)
        state.connections.set(1, j, 1)
    plan = plan_reassignment(state, 0, 1, 2, 0.3, 0.2, CFG, pcfg)
    assert sum(1 for _, b in plan if b == 1) == 1
    assert sum(1 for _, b in plan if b == 2) == 4


def test_plan_raises_when_pair_cannot_absorb():
    state = close_ues()
    with pytest.raises(TakeoverOverload):
        plan_reassignment(state, 0, 1, 2, 0.3, 0.2, CFG, PowerConfig(max_load=4))


# --- try_sleep ----------------------------------------------------------------------

def test_try_sleep_accepts_and_moves_every_ue():
    state = close_ues()
    out = try_sleep(state, 0, 1, 2, CFG, PCFG)
    assert out.accepted and out.slept_bs == 0
    assert state.base_stations[0].state == BSState.SLEEP
    assert state.connections.row_count(0) == 0
    assert list(state.connections.row_counts()) == [0, 5, 5]
    assert (state.connections.col_counts() == 1).all()
    assert out.summary() == "accepted:bs=0"


def test_try_sleep_rejects_sinr_atomically():
    state = make_state(TRIANGLE, [(30, 40), (170, 100), (100, 170)])
    for j, i in enumerate([0, 1, 2]):
        state.connections.set(i, j)
    before = state.snapshot()
    out = try_sleep(state, 0, 1, 2, CFG, PCFG)
    assert out.kind == OutcomeKind.REJECTED_SINR
    assert state.snapshot() == before


def test_try_sleep_rejects_overload_atomically():
    state = close_ues()
    before = state.snapshot()
    out = try_sleep(state, 0, 1, 2, CFG, PowerConfig(max_load=4))
    assert out.kind == OutcomeKind.REJECTED_OVERLOAD
    assert out.summary() == "rejected_overload:bs=0"
    assert state.snapshot() == before


def test_try_sleep_contract_checks():
    state = close_ues()
    with pytest.raises(ContractViolation):
        try_sleep(state, 0, 1, 1, CFG, PCFG)
    far = make_state([(0, 0), (50, 0), (500, 0)], [])
    with pytest.raises(ContractViolation):
        try_sleep(far, 0, 1, 2, CFG, PCFG)
    state.base_stations[2].state = BSState.SLEEP
    with pytest.raises(ContractViolation):
        try_sleep(state, 0, 1, 2, CFG, PCFG)


# --- full run ---------------------------------------------------------------------------

def test_run_without_backups_does_nothing():
    state = close_ues()
    before = state.snapshot()
    assert run_sleeping(state, CFG, PCFG) == []
    assert state.snapshot() == before


def test_run_sleeps_least_loaded_neighbour_of_best_candidate():
    state = midpoint_ues()
    records = run_sleeping(state, CFG, PCFG)
    # BS0 has the best index; its lightest neighbour BS1 is put to sleep with
    # (BS2, BS0) taking over: shares (0.125, 0.075) -> BS2 gets 1 UE
    assert [r.event for r in records] == ["accepted:bs=1"]
    assert records[0].outcome.reassignments == [(5, 2), (6, 0)]
    assert state.active_ids() == [0, 2]
    assert records[0].active_count == 2
    assert records[0].total_power_w == 25.6 + 25.4 + 8.0
    links = list(state.connections.links())
    expected = sum(math.log2(1 + sinr(state, i, j, CFG, PCFG)) for i, j in links) / 59.0
    assert records[0].ee == pytest.approx(expected, rel=1e-12)


def test_run_single_bs_and_colocated_pair():
    lone = make_state([(0, 0)], [(5, 0)])
    lone.connections.set(0, 0)
    assert run_sleeping(lone, CFG, PCFG) == []

    # two co-located BSs: every UE has a backup, but a pair is impossible
    twin = make_state([(0, 0), (0, 0)], [(5, 0)])
    twin.connections.set(0, 0)
    records = run_sleeping(twin, CFG, PCFG)
    assert records and all(r.outcome.kind == OutcomeKind.REJECTED_NO_PAIR for r in records)
    assert twin.active_count() == 2


def test_run_records_observer_calls_and_iteration_numbers():
    state = midpoint_ues()
    seen = []
    records = run_sleeping(state, CFG, PCFG, observer=lambda r, s: seen.append((r.iteration, s.active_count())))
    assert seen == [(r.iteration, r.active_count) for r in records]
    assert [r.iteration for r in records] == list(range(1, len(records) + 1))


def test_run_is_deterministic():
    a, b = midpoint_ues(), midpoint_ues()
    ra, rb = run_sleeping(a, CFG, PCFG), run_sleeping(b, CFG, PCFG)
    assert [(r.event, r.ee) for r in ra] == [(r.event, r.ee) for r in rb]
    assert a.connections == b.connections


def test_accepted_sleep_saves_the_circuit_difference():
    state = midpoint_ues()
    p0 = total_power(state, PCFG)
    records = run_sleeping(state, CFG, PCFG)
    assert records[0].total_power_w - p0 == pytest.approx(-17.0, rel=1e-9)
