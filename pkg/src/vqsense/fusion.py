"""Inverse-variance fusion across independent sensing agents."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .agent import AgentConfig, StepRecord, run_episode
from .env import NoiseSpec, SawtoothConfig
from .errors import ParameterError


@dataclass(frozen=True)
class FusionRecord:
    t: int
    x_true: float
    estimates: tuple[float, ...]
    stds: tuple[float, ...]
    included: tuple[bool, ...]
    fused: float
    gamma: float


def fuse(estimates, stds) -> tuple[float, float]:
    """Inverse-variance weighted mean and its normalizer gamma = 1 / sum(1/std^2)."""
    est = np.asarray(estimates, dtype=float)
    std = np.asarray(stds, dtype=float)
    if est.size < 1 or est.shape != std.shape:
        raise ParameterError("need one std per estimate and at least one estimate")
    if np.any(~(std > 0)):
        raise ParameterError(f"stds must be positive, got {std}")
    prec = 1.0 / std**2
    gamma = 1.0 / prec.sum()
    # normalized weights make K = 1 (and identical estimates) exact
    return float((prec / prec.sum() * est).sum()), float(gamma)


def fusion_weights(stds) -> np.ndarray:
    prec = 1.0 / np.asarray(stds, dtype=float) ** 2
    return prec / prec.sum()


def agent_seed(master: int, k: int) -> int:
    return int(np.random.SeedSequence([master, k]).generate_state(1)[0])


def fuse_trajectories(runs: list[list[StepRecord]]) -> list[FusionRecord]:
    out = []
    for t, step in enumerate(zip(*runs)):
        est = tuple(r.x_hat for r in step)
        std = tuple(r.x_std for r in step)
        ok = tuple(not r.flagged for r in step)
        if not any(ok):
            ok = (True,) * len(step)  # nothing trustworthy this step; fuse everything
        fused, gamma = fuse([e for e, k in zip(est, ok) if k], [s for s, k in zip(std, ok) if k])
        out.append(FusionRecord(t, step[0].x_true, est, std, ok, fused, gamma))
    return out


def run_multi(cfg: AgentConfig, saw: SawtoothConfig, noise: NoiseSpec, master_seed: int,
              agents: int = 3, seeds: list[int] | None = None):
    """Run ``agents`` independent learned-variance agents and fuse them per step.

    Agent k uses ``seeds[k]`` (for both its own and its environment streams),
    derived from (master_seed, k) by default. Returns (fusion records,
    per-agent record lists).
    """
    if agents < 1:
        raise ParameterError(f"need at least one agent, got {agents}")
    if seeds is None:
        seeds = [agent_seed(master_seed, k) for k in range(agents)]
    if len(seeds) != agents:
        raise ParameterError(f"{agents} agents but {len(seeds)} seeds")
    cfg = replace(cfg, learned_std=True)
    # agents never interact, so each runs its whole episode in turn
    runs = [run_episode(cfg, saw, noise, s) for s in seeds]
    return fuse_trajectories(runs), runs
