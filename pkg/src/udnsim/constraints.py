"""Constraint validation (C1-C5) and objective reporting for a network state."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import (
    BSState,
    NetworkState,
    PowerConfig,
    RadioConfig,
    energy_efficiency,
    load_degrees,
    sinr_matrix,
)


@dataclass(frozen=True)
class Violation:
    constraint: str
    subject: int
    detail: str


@dataclass
class ConstraintReport:
    c1_ok: bool
    c2_ok: bool
    c3_ok: bool
    c4_ok: bool
    c5_ok: Optional[bool]
    violations: list[Violation] = field(default_factory=list)
    o1_ee: float = 0.0
    o2_active: int = 0
    t_load: object = "disabled"

    @property
    def core_ok(self) -> bool:
        """C1-C4 all hold."""
        return self.c1_ok and self.c2_ok and self.c3_ok and self.c4_ok

    def to_dict(self) -> dict:
        return {
            "c1_ok": self.c1_ok,
            "c2_ok": self.c2_ok,
            "c3_ok": self.c3_ok,
            "c4_ok": self.c4_ok,
            "c5_ok": self.c5_ok,
            "violations": [[v.constraint, v.subject, v.detail] for v in self.violations],
            "o1_ee": self.o1_ee,
            "o2_active": self.o2_active,
            "t_load": self.t_load,
        }


def validate(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig,
             t_load: Optional[float] = None) -> ConstraintReport:
    """Check C1-C5 without touching ``state``.

    C5 (total load below ``t_load``) is skipped and reported as None unless a
    threshold is given.
    """
    violations: list[Violation] = []
    for bs in state.base_stations:
        if bs.state not in (BSState.ACTIVE, BSState.SLEEP):
            violations.append(Violation("C1", bs.id, f"state {bs.state!r} is not 0/1"))

    a = state.connections.array
    if a.dtype != np.bool_:
        bad = np.argwhere((a != 0) & (a != 1))
        for i, j in bad:
            violations.append(Violation("C2", int(i), f"a[{i},{j}] = {a[i, j]}"))

    for j, c in enumerate(a.sum(axis=0)):
        if c != 1:
            violations.append(Violation("C3", j, f"UE has {int(c)} connections"))

    rows = a.sum(axis=1)
    for bs in state.base_stations:
        cap = int(bs.state) * pcfg.max_load
        if rows[bs.id] > cap:
            violations.append(Violation("C4", bs.id, f"{int(rows[bs.id])} UEs > capacity {cap}"))

    c5_ok = None
    if t_load is not None:
        total = float(load_degrees(state, pcfg).sum())
        c5_ok = total < t_load
        if not c5_ok:
            violations.append(Violation("C5", -1, f"total load {total:.6g} >= {t_load}"))

    failed = {v.constraint for v in violations}
    return ConstraintReport(
        c1_ok="C1" not in failed,
        c2_ok="C2" not in failed,
        c3_ok="C3" not in failed,
        c4_ok="C4" not in failed,
        c5_ok=c5_ok,
        violations=violations,
        o1_ee=energy_efficiency(state, cfg, pcfg),
        o2_active=state.active_count(),
        t_load="disabled" if t_load is None else t_load,
    )


def link_violations(state: NetworkState, cfg: RadioConfig, pcfg: PowerConfig) -> list[Violation]:
    """Links that are served by a sleeping BS, leave the radius, or miss the
    SINR threshold in the current interference picture.

    ``>=`` is the weakest governing test, so links created with the strict
    test pass too; interference only falls as BSs sleep.
    """
    active = state.active_mask()
    s = sinr_matrix(state, cfg, pcfg, active)
    in_radius = state.in_radius()
    th = cfg.sinr_threshold_linear
    out = []
    for i, j in state.connections.links():
        if not active[i]:
            out.append(Violation("QOS", j, f"served by sleeping BS {i}"))
        elif not in_radius[i, j]:
            out.append(Violation("QOS", j, f"outside radius of BS {i}"))
        elif not s[i, j] >= th:
            out.append(Violation("QOS", j, f"SINR {s[i, j]:.6g} to BS {i} below {th:.6g}"))
    return out
