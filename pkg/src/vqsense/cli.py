"""Command line harness: ``vqsense {single,baseline,multi,sweep-noise}``.

Exit codes: 0 success, 1 malformed config or arguments, 2 numerical abort.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import outputs
from .agent import error_summary, run_episode
from .config import ConfigError, ExperimentConfig, load_config, resolve
from .env import NoiseSpec
from .errors import NumericalError, ParameterError
from .fusion import run_multi

log = logging.getLogger("vqsense")

DEFAULT_AGENTS = {"single": 1, "baseline": 1, "multi": 3, "sweep-noise": 3}


def _summary_of(records, burn_in):
    return {
        "errors": error_summary([r.x_true for r in records], [r.x_hat for r in records], burn_in),
        "mean_mi_nats": float(sum(r.mi_value for r in records) / len(records)),
        "flagged_steps": sum(r.flagged for r in records),
    }


def cmd_single(cfg: ExperimentConfig) -> dict:
    records = run_episode(cfg.agent_config(), cfg.sawtooth, cfg.noise_spec, cfg.seed)
    outputs.atomic_write(os.path.join(cfg.out_dir, "trajectory.csv"), outputs.trajectory_csv(records))
    return {"policy": cfg.policy, "seed": cfg.seed, **_summary_of(records, cfg.burn_in)}


def _multi_run(cfg: ExperimentConfig, seed: int, noise: NoiseSpec, out_dir: str) -> dict:
    fused, runs = run_multi(cfg.agent_config(), cfg.sawtooth, noise, seed, cfg.agents)
    for k, records in enumerate(runs):
        outputs.atomic_write(os.path.join(out_dir, f"agent_{k}.csv"), outputs.trajectory_csv(records))
    outputs.atomic_write(os.path.join(out_dir, "fused.csv"), outputs.fused_csv(fused))
    return {
        "agents": [_summary_of(r, cfg.burn_in) for r in runs],
        "fused": {"errors": error_summary([r.x_true for r in fused], [r.fused for r in fused], cfg.burn_in)},
    }


def cmd_multi(cfg: ExperimentConfig) -> dict:
    return {"seed": cfg.seed, **_multi_run(cfg, cfg.seed, cfg.noise_spec, cfg.out_dir)}


def _sweep_task(args):
    cfg, p, seed = args
    noise = NoiseSpec("bit_flip", p=float(p))
    base = os.path.join(cfg.out_dir, f"p_{p!r}", f"seed_{seed}")
    multi = _multi_run(cfg, seed, noise, os.path.join(base, "multi"))
    single_cfg = cfg.agent_config(probes=cfg.agents * cfg.probes_per_agent, policy="adaptive")
    records = run_episode(single_cfg, cfg.sawtooth, noise, seed)
    outputs.atomic_write(os.path.join(base, "single_k_probes.csv"), outputs.trajectory_csv(records))
    return multi["fused"]["errors"], _summary_of(records, cfg.burn_in)["errors"]


def cmd_sweep(cfg: ExperimentConfig) -> dict:
    cfg = replace(cfg, policy="adaptive")
    tasks = [(cfg, p, s) for p in cfg.sweep_p for s in cfg.sweep_seeds]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]

    by_p = []
    it = iter(results)
    for p in cfg.sweep_p:
        arms = {"multi_agent_fused": [], "single_agent_k_probes": []}
        for seed in cfg.sweep_seeds:
            fused_err, single_err = next(it)
            arms["multi_agent_fused"].append({"seed": seed, **fused_err})
            arms["single_agent_k_probes"].append({"seed": seed, **single_err})
        entry = {"p": p}
        for arm, rows in arms.items():
            entry[arm] = {
                "per_seed": rows,
                "raw_std_full": outputs.ensemble([r["full"]["raw_std"] for r in rows]),
                "raw_std_post_burn_in": outputs.ensemble([r["post_burn_in"]["raw_std"] for r in rows]),
            }
        by_p.append(entry)
    return {"agents": cfg.agents, "sweep": by_p}


COMMANDS = {"single": cmd_single, "baseline": cmd_single, "multi": cmd_multi, "sweep-noise": cmd_sweep}


def _int_list(text: str) -> list[int]:
    """``N`` means seeds 0..N-1; ``a,b,c`` is an explicit list."""
    parts = [int(p) for p in text.split(",")]
    return list(range(parts[0])) if len(parts) == 1 else parts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqsense", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; every key optional")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--steps", type=int, dest="horizon", help="episode length T")
    common.add_argument("--policy", choices=["adaptive", "random"])
    common.add_argument("--noise", help="none | gauss:STD | bitflip:P")
    common.add_argument("--agents", type=int, help="number of agents K")
    common.add_argument("--probes", type=int, dest="probes_per_agent", help="probes per agent")
    common.add_argument("--out", dest="out_dir", help="output directory")
    common.add_argument("--workers", type=int, help="parallel processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("single", "baseline", "multi"):
        sub.add_parser(name, parents=[common])
    sweep = sub.add_parser("sweep-noise", parents=[common])
    sweep.add_argument("--p", dest="sweep_p", type=lambda s: [float(v) for v in s.split(",")],
                       help="comma-separated bit-flip probabilities")
    sweep.add_argument("--seeds", dest="sweep_seeds", type=_int_list,
                       help="seed count N (0..N-1) or comma-separated list")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "command", "verbose")}
    if args.command == "baseline":
        overrides["policy"] = "random"
    try:
        cfg = resolve(load_config(args.config), overrides, DEFAULT_AGENTS[args.command])
    except (ConfigError, TypeError) as exc:
        print(f"vqsense: config error: {exc}", file=sys.stderr)
        return 1

    print(cfg.to_json(), end="")
    outputs.atomic_write(os.path.join(cfg.out_dir, "config.json"), cfg.to_json())
    try:
        summary = COMMANDS[args.command](cfg)
    except NumericalError as exc:
        print(f"vqsense: numerical abort: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"vqsense: invalid parameters: {exc}", file=sys.stderr)
        return 1
    doc = {"schema": outputs.SUMMARY_SCHEMA, "csv_schema": outputs.CSV_SCHEMA,
           "command": args.command, "burn_in": cfg.burn_in, **summary}
    outputs.atomic_write(os.path.join(cfg.out_dir, "summary.json"), outputs.dumps_json(doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
