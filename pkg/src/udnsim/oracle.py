"""Exhaustive solvers for small instances.

Feasibility of an Active set is decided exactly by a max-flow b-matching
(source -> UE cap 1, UE -> BS cap 1 for qualifying links, BS -> sink cap
S_max).  Only the model's SINR/threshold predicates are shared with the
heuristics.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import networkx as nx
import numpy as np

from .model import NetworkState, PowerConfig, RadioConfig, qualifying_links

MAX_BS = 12
MAX_UE = 40


class OracleSizeError(ValueError):
    pass


@dataclass
class OracleResult:
    feasible: bool
    min_active: Optional[int]
    active_set: Optional[tuple[int, ...]] = None
    witness: Optional[dict[int, int]] = None


def _guard(state: NetworkState) -> None:
    if state.n_bs > MAX_BS or state.n_ue > MAX_UE:
        raise OracleSizeError(
            f"oracle limited to {MAX_BS} BSs / {MAX_UE} UEs, got {state.n_bs} / {state.n_ue}")


def _b_matching(links: np.ndarray, capacity: int) -> tuple[int, dict[int, int]]:
    g = nx.DiGraph()
    n_bs, n_ue = links.shape
    g.add_node("s")
    g.add_node("t")
    for j in range(n_ue):
        g.add_edge("s", ("u", j), capacity=1)
    for i in range(n_bs):
        g.add_edge(("b", i), "t", capacity=capacity)
    for i, j in zip(*np.nonzero(links)):
        g.add_edge(("u", int(j)), ("b", int(i)), capacity=1)
    value, flow = nx.maximum_flow(g, "s", "t")
    assignment = {}
    for j in range(n_ue):
        for node, f in flow.get(("u", j), {}).items():
            if f > 0:
                assignment[j] = node[1]
    return int(value), assignment


def max_served(state: NetworkState, active: np.ndarray, cfg: RadioConfig,
               pcfg: PowerConfig) -> tuple[int, dict[int, int]]:
    """Largest number of UEs servable with exactly the given Active BSs."""
    links = qualifying_links(state, cfg, pcfg, np.asarray(active, dtype=bool))
    return _b_matching(links, pcfg.max_load)


def exhaustive_min_active(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig) -> OracleResult:
    """Fewest Active BSs that can serve every UE, by increasing popcount."""
    _guard(state)
    n, m = state.n_bs, state.n_ue
    for size in range(0 if m == 0 else 1, n + 1):
        for subset in itertools.combinations(range(n), size):
            active = np.zeros(n, dtype=bool)
            active[list(subset)] = True
            served, witness = max_served(state, active, cfg, pcfg)
            if served == m:
                return OracleResult(True, size, subset, witness)
    return OracleResult(False, None)


def exhaustive_max_served(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig) -> int:
    """Most UEs servable simultaneously with every BS Active."""
    _guard(state)
    return max_served(state, np.ones(state.n_bs, dtype=bool), cfg, pcfg)[0]
