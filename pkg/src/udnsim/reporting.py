"""Output files for runs, batches and oracle sweeps."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from pathlib import Path
from typing import Iterable

from .runner import BatchRow, RunResult
from .scenario import GENERATOR_ID

ITERATIONS_HEADER = ["iteration", "active_bs", "ee_bits_per_hz_per_watt", "event"]


def fmt_ee(x: float) -> str:
    return format(x, ".9g")


def iterations_csv(result: RunResult) -> str:
    """Iteration table; row 0 is the state right after initial association."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ITERATIONS_HEADER)
    w.writerow([0, result.config.n_bs, fmt_ee(result.initial_ee), "initial"])
    for r in result.records:
        w.writerow([r.iteration, r.active_count, fmt_ee(r.ee), r.event])
    return buf.getvalue()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def run_report(result: RunResult) -> dict:
    return {
        "algorithm": result.algorithm,
        "seed": result.config.seed,
        "generator": GENERATOR_ID,
        "config": result.config.to_dict(),
        "initial_connection": result.connection.to_dict(),
        "initial_ee": result.initial_ee,
        "initial_total_power_w": result.initial_power_w,
        "iterations": len(result.records),
        "convergence_iteration": result.convergence_iteration,
        "final_o1_ee": result.final_ee,
        "final_o2_active": result.final_active,
        "constraints": result.final_report.to_dict(),
        "qos_violations": [[v.constraint, v.subject, v.detail] for v in result.qos_violations],
    }


def charts_svg(series: dict[str, tuple[list[int], list[int], list[float]]]) -> str:
    """Active-BS and EE curves per algorithm as one self-contained SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "udnsim"
    matplotlib.rcParams["svg.fonttype"] = "path"
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for name, (its, active, ee) in series.items():
        ax1.step(its, active, where="post", label=name)
        ax2.plot(its, ee, marker=".", label=name)
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("active BSs")
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("EE (bit/s/Hz per W)")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def series_of(result: RunResult) -> tuple[list[int], list[int], list[float]]:
    its = [0] + [r.iteration for r in result.records]
    active = [result.config.n_bs] + [r.active_count for r in result.records]
    ee = [result.initial_ee] + [r.ee for r in result.records]
    return its, active, ee


def write_run(result: RunResult, out: Path, svg: bool = False) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "iterations.csv": iterations_csv(result),
        "topology_initial.json": dump_json(result.topology_initial),
        "topology_connected.json": dump_json(result.topology_connected),
        "topology_final.json": dump_json(result.topology_final),
        "report.json": dump_json(run_report(result)),
    }
    if svg:
        files["charts.svg"] = charts_svg({result.algorithm: series_of(result)})
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text)
        written.append(path)
    return written


SUMMARY_HEADER = [f.name for f in dataclasses.fields(BatchRow)]


def summary_csv(rows: Iterable[BatchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for r in rows:
        d = dataclasses.asdict(r)
        d["initial_ee"] = fmt_ee(r.initial_ee)
        d["final_ee"] = fmt_ee(r.final_ee)
        w.writerow([d[k] for k in SUMMARY_HEADER])
    return buf.getvalue()


def medians_csv(med: dict[str, dict[str, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "median_final_active", "median_convergence_iteration", "median_final_ee"])
    for alg, m in med.items():
        w.writerow([alg, m["final_active"], m["convergence_iteration"], fmt_ee(m["final_ee"])])
    return buf.getvalue()


def oracle_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "seed", "heuristic", "optimum", "gap"])
    for r in rows:
        w.writerow([r["instance"], r["seed"], r["heuristic"], r["optimum"], r["gap"]])
    return buf.getvalue()
