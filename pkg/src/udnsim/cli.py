"""Command-line entry point: ``udnsim {run,batch,oracle}``.

Exit codes: 0 success, 1 usage/config/output error, 2 constraint violation
in a final state (or a negative optimality gap for ``oracle``).
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from . import reporting
from .initial_connection import initial_connect
from .oracle import OracleSizeError, exhaustive_min_active
from .runner import ALGORITHMS, DEFAULT_BASELINE_ATTEMPTS, RunResult, batch_row, medians, run_experiment
from .scenario import ConfigError, Layout, ScenarioConfig, generate, load_config
from .sleeping import run_sleeping

log = logging.getLogger("udnsim")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON scenario config (default: built-in 20-BS scenario)")
    p.add_argument("--gain", choices=["unit", "powerlaw"], help="channel gain model override")
    p.add_argument("--ues", type=int, help="number of UEs override")
    p.add_argument("--out", type=Path, default=Path("udnsim-out"),
                   help="output directory (UDNSIM_OUT overrides)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="udnsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one seeded run with output files")
    _scenario_flags(run)
    run.add_argument("--algorithm", choices=ALGORITHMS, default="proposed")
    run.add_argument("--seed", type=_u64, help="scenario seed override")
    run.add_argument("--svg", action="store_true", help="also write charts.svg")
    run.add_argument("--tload", type=float, help="enable the total-load (C5) check")
    run.add_argument("--max-attempts", type=int, default=DEFAULT_BASELINE_ATTEMPTS,
                     help="baseline attempt budget")

    batch = sub.add_parser("batch", help="both algorithms over seeds 1..K")
    _scenario_flags(batch)
    batch.add_argument("--seeds", type=_positive, default=50)
    batch.add_argument("--jobs", type=_positive, default=1, help="parallel worker processes")
    batch.add_argument("--tload", type=float)

    orc = sub.add_parser("oracle", help="heuristic vs exhaustive optimum on small instances")
    orc.add_argument("--instances", type=_positive, default=20)
    orc.add_argument("--n-bs", type=int, default=6)
    orc.add_argument("--n-ue", type=int, default=20)
    orc.add_argument("--s-max", type=int, default=8)
    orc.add_argument("--area", type=float, default=300.0, help="side of the square area in m")
    orc.add_argument("--seed", type=_u64, default=1, help="first instance seed")
    orc.add_argument("--out", type=Path, default=Path("udnsim-out"),
                     help="output directory (UDNSIM_OUT overrides)")
    return parser


def _out_dir(args) -> Path:
    env = os.environ.get("UDNSIM_OUT")
    return Path(env) if env else args.out


def _scenario(args, seed: Optional[int] = None) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if args.ues is not None:
        changes["n_ue"] = args.ues
    if args.gain is not None:
        changes["radio"] = dataclasses.replace(cfg.radio, gain_model=args.gain)
    try:
        return cfg.replace(**changes) if changes else cfg
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _violates(result: RunResult) -> bool:
    rep = result.final_report
    return not (rep.c3_ok and rep.c4_ok)


def cmd_run(args) -> int:
    cfg = _scenario(args, args.seed)
    result = run_experiment(cfg, args.algorithm, max_attempts=args.max_attempts, t_load=args.tload)
    out = _out_dir(args)
    reporting.write_run(result, out, svg=args.svg)
    log.info("%s seed=%d: %d -> %d active BSs in %d iterations, EE %.6g -> %.6g",
             args.algorithm, cfg.seed, cfg.n_bs, result.final_active, len(result.records),
             result.initial_ee, result.final_ee)
    if _violates(result):
        bad = [v for v in result.final_report.violations if v.constraint in ("C3", "C4")]
        print(f"udnsim: final state violates {len(bad)} C3/C4 constraint(s); see {out / 'report.json'}",
              file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _batch_job_checked(job):
    cfg, algorithm, t_load = job
    result = run_experiment(cfg, algorithm, t_load=t_load)
    return batch_row(result), _violates(result)


def cmd_batch(args) -> int:
    jobs = [(_scenario(args, seed), alg, args.tload)
            for seed in range(1, args.seeds + 1) for alg in ALGORITHMS]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_batch_job_checked, jobs))
    else:
        results = [_batch_job_checked(j) for j in jobs]
    rows = [r for r, _ in results]
    med = medians(rows)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.csv").write_text(reporting.summary_csv(rows))
    (out / "summary_medians.csv").write_text(reporting.medians_csv(med))
    for alg, m in med.items():
        log.info("%s: median final active %s, median convergence iteration %s, median EE %.6g",
                 alg, m["final_active"], m["convergence_iteration"], m["final_ee"])
    violated = sum(1 for _, bad in results if bad)
    if violated:
        print(f"udnsim: {violated} run(s) ended with C3/C4 violations", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def oracle_instance(seed: int, n_bs: int = 6, n_ue: int = 20, s_max: int = 8,
                    side: float = 300.0) -> ScenarioConfig:
    return ScenarioConfig(area=(side, side), n_bs=n_bs, n_ue=n_ue, bs_layout=Layout.GRID,
                          s_max=s_max, seed=seed)


def oracle_gaps(first_seed: int, instances: int, **kw) -> list[dict]:
    """Heuristic vs exhaustive optimum on consecutive seeds.

    Instances where initial association strands a UE are skipped: the
    optimum requires every UE served, so the comparison would be unsound.
    """
    rows = []
    seed = first_seed
    while len(rows) < instances:
        cfg = oracle_instance(seed, **kw)
        state = generate(cfg)
        if not initial_connect(state, cfg.radio, cfg.power).unserved:
            run_sleeping(state, cfg.radio, cfg.power)
            opt = exhaustive_min_active(generate(cfg), cfg.radio, cfg.power)
            heuristic = state.active_count()
            rows.append({
                "instance": len(rows) + 1,
                "seed": seed,
                "heuristic": heuristic,
                "optimum": opt.min_active,
                "gap": heuristic - opt.min_active,
            })
        seed += 1
        if seed - first_seed > 100 * instances:
            raise RuntimeError("too many instances strand UEs; enlarge coverage")
    return rows


def cmd_oracle(args) -> int:
    rows = oracle_gaps(args.seed, args.instances, n_bs=args.n_bs, n_ue=args.n_ue,
                       s_max=args.s_max, side=args.area)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    (out / "oracle.csv").write_text(reporting.oracle_csv(rows))
    gaps = [r["gap"] for r in rows]
    print(f"instances={len(rows)} mean_gap={statistics.mean(gaps):.3f} min_gap={min(gaps)}")
    return EXIT_VIOLATION if min(gaps) < 0 else EXIT_OK


COMMANDS = {"run": cmd_run, "batch": cmd_batch, "oracle": cmd_oracle}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, OracleSizeError) as exc:
        print(f"udnsim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"udnsim: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
