"""Initial UE-BS association: screening, redundant-link pruning, overload
redistribution.

Links created here use the strict ``SINR > threshold`` test under the
all-active interference picture and must lie inside the BS radius.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import (
    ConnectionMatrix,
    ContractViolation,
    NetworkState,
    PowerConfig,
    RadioConfig,
    qualifying_links,
    sinr_matrix,
)


@dataclass
class ConnectionReport:
    served: int
    unserved: list[int]
    reassigned: int
    per_bs_load: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "served": self.served,
            "unserved": list(self.unserved),
            "reassigned": self.reassigned,
            "per_bs_load": [list(p) for p in self.per_bs_load],
        }


def feasibility_screen(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig) -> ConnectionMatrix:
    active = state.active_mask()
    if not active.all():
        raise ContractViolation("feasibility screening expects every BS to be Active")
    mask = qualifying_links(state, cfg, pcfg, active, strict=True)
    return ConnectionMatrix(state.n_bs, state.n_ue, data=mask)


def prune_redundant(candidates: ConnectionMatrix, state: NetworkState, cfg: RadioConfig,
                    pcfg: PowerConfig, sinr_values: Optional[np.ndarray] = None) -> ConnectionMatrix:
    """Keep only the highest-SINR candidate link of every UE.

    Ties go to the lowest BS id (``argmax`` returns the first maximum).
    """
    s = sinr_matrix(state, cfg, pcfg) if sinr_values is None else sinr_values
    cand = candidates.array
    out = np.zeros_like(cand)
    for j in np.flatnonzero(cand.any(axis=0)):
        col = np.where(cand[:, j], s[:, j], -np.inf)
        out[int(np.argmax(col)), j] = True
    return ConnectionMatrix(state.n_bs, state.n_ue, data=out)


def _report(conn: ConnectionMatrix, reassigned: int) -> ConnectionReport:
    col = conn.col_counts()
    rows = conn.row_counts()
    return ConnectionReport(
        served=int((col == 1).sum()),
        unserved=sorted(int(j) for j in np.flatnonzero(col == 0)),
        reassigned=reassigned,
        per_bs_load=[(i, int(c)) for i, c in enumerate(rows)],
    )


def redistribute_overload(conn: ConnectionMatrix, state: NetworkState, cfg: RadioConfig,
                          pcfg: PowerConfig, sinr_values: Optional[np.ndarray] = None,
                          ) -> tuple[ConnectionMatrix, ConnectionReport]:
    """Trim every BS above ``S_max`` to its strongest UEs and re-home the rest.

    Overloaded BSs are handled in ascending id order.  Evicted UEs are placed
    greedily: the UE whose best still-available alternative has the highest
    SINR goes first (ties: lowest UE id, then lowest BS id).  UEs with no
    alternative that has spare capacity stay unconnected.
    """
    if (conn.col_counts() > 1).any():
        raise ContractViolation("redistribution expects at most one link per UE")
    s = sinr_matrix(state, cfg, pcfg) if sinr_values is None else sinr_values
    qualifying = qualifying_links(state, cfg, pcfg, strict=True, sinr_values=s)
    s_max = pcfg.max_load
    a = conn.array.copy()
    load = a.sum(axis=1)
    reassigned = 0

    for i in range(state.n_bs):
        if load[i] <= s_max:
            continue
        ues = np.flatnonzero(a[i])
        # ascending SINR; among equal SINR the higher UE id sorts first (evicted first)
        order = sorted(ues, key=lambda j: (s[i, j], -j))
        evicted = [int(j) for j in order[: len(order) - s_max]]
        for j in evicted:
            a[i, j] = False
        load[i] = s_max

        pending = set(evicted)
        while pending:
            best = None
            for j in sorted(pending):
                options = qualifying[:, j] & (load < s_max)
                options[i] = False
                if not options.any():
                    continue
                col = np.where(options, s[:, j], -np.inf)
                b = int(np.argmax(col))
                if best is None or col[b] > best[0]:
                    best = (col[b], j, b)
            if best is None:
                break
            _, j, b = best
            a[b, j] = True
            load[b] += 1
            reassigned += 1
            pending.remove(j)

    out = ConnectionMatrix(state.n_bs, state.n_ue, data=a)
    return out, _report(out, reassigned)


def initial_connect(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig) -> ConnectionReport:
    """Build the initial association in place and return its report."""
    s = sinr_matrix(state, cfg, pcfg)
    candidates = feasibility_screen(state, cfg, pcfg)
    pruned = prune_redundant(candidates, state, cfg, pcfg, sinr_values=s)
    final, report = redistribute_overload(pruned, state, cfg, pcfg, sinr_values=s)
    state.connections = final
    return report
