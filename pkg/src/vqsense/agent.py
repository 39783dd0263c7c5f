"""The closed sensing loop and its random-action baseline.

Per step: predict the phase from the previous triplet, pick an action
(information-gain ascent or uniform random), deploy the probe and read one
shot per probe, then learn from the revealed phase with one Adam step.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import world_model as wm
from .env import NoiseSpec, SawtoothConfig, target_phase, true_execute
from .errors import EpisodeAborted, NumericalError, ParameterError
from .info_gain import PlannerConfig, estimate_mi, plan_action
from .sim import Action

log = logging.getLogger(__name__)

MAX_CONSECUTIVE_FAILURES = 10


@dataclass(frozen=True)
class AgentConfig:
    n_qubits: int = 6
    layers: int = 2
    policy: str = "adaptive"  # adaptive | random
    mc_samples: int = 64
    action_lr: float = 0.2
    model_lr: float = 1e-3
    fixed_std: float = 0.25
    learned_std: bool = False  # two-output model trained by Gaussian NLL
    probes: int = 1
    measurement_axis: str = "y"
    circular_input: bool = False

    def __post_init__(self):
        if self.policy not in ("adaptive", "random"):
            raise ParameterError(f"policy must be adaptive or random, got {self.policy!r}")
        if self.n_qubits < 1 or self.layers < 1 or self.probes < 1:
            raise ParameterError("n_qubits, layers and probes must be >= 1")
        if not self.model_lr >= 0:
            raise ParameterError(f"model_lr must be >= 0, got {self.model_lr}")
        if not wm.STD_MIN <= self.fixed_std <= wm.STD_MAX:
            raise ParameterError(f"fixed_std must be in [{wm.STD_MIN}, {wm.STD_MAX}], got {self.fixed_std}")
        self.planner  # validates mc_samples, action_lr, axis

    @property
    def planner(self) -> PlannerConfig:
        return PlannerConfig(self.mc_samples, self.action_lr, self.measurement_axis)

    @property
    def action_dim(self) -> int:
        return 4 * self.layers + self.n_qubits

    @property
    def obs_bits(self) -> int:
        return self.n_qubits * self.probes

    @property
    def input_dim(self) -> int:
        return wm.input_dim(self.obs_bits, self.action_dim, self.circular_input)

    @property
    def loss_kind(self) -> str:
        return "gaussian_nll" if self.learned_std else "squared"


@dataclass
class Streams:
    """Independent random streams; agent-side ones never see the environment seed."""

    init: np.random.Generator
    policy: np.random.Generator
    planner: np.random.Generator
    noise: np.random.Generator
    measure: np.random.Generator

    @classmethod
    def from_seeds(cls, agent_seed: int, env_seed: int | None = None) -> "Streams":
        env_seed = agent_seed if env_seed is None else env_seed
        g = np.random.default_rng
        return cls(g([agent_seed, 0]), g([agent_seed, 1]), g([agent_seed, 2]),
                   g([env_seed, 3]), g([env_seed, 4]))


@dataclass
class StepRecord:
    t: int
    action: Action
    observation: np.ndarray
    x_true: float
    x_hat: float
    x_std: float
    mi_value: float
    loss: float
    plan_failed: bool = False
    update_failed: bool = False

    @property
    def flagged(self) -> bool:
        return self.plan_failed or self.update_failed


@dataclass
class AgentState:
    net: wm.NetParams
    adam: wm.AdamState
    last_action: Action
    policy: str
    last_record: StepRecord | None = None
    consecutive_failures: int = field(default=0)


def init_agent(cfg: AgentConfig, streams: Streams) -> AgentState:
    net = wm.init_params(cfg.input_dim, 2 if cfg.learned_std else 1, streams.init)
    adam = wm.AdamState.for_params(net.arrays(), lr=cfg.model_lr)
    a0 = Action.random(cfg.n_qubits, cfg.layers, streams.init)
    return AgentState(net, adam, a0, cfg.policy)


def model_input(cfg: AgentConfig, last: StepRecord | None) -> np.ndarray:
    if last is None:
        return np.zeros(cfg.input_dim)
    return wm.encode_input(last.observation, last.x_true, last.action.vector(), cfg.circular_input)


def wrapped_error(x, x_hat):
    return np.mod(np.asarray(x) - np.asarray(x_hat) + np.pi, 2 * np.pi) - np.pi


def agent_step(state: AgentState, t: int, x_t: float, noise: NoiseSpec, cfg: AgentConfig,
               streams: Streams) -> tuple[AgentState, StepRecord]:
    inp = model_input(cfg, state.last_record)
    belief = wm.predict(state.net, inp, None if cfg.learned_std else cfg.fixed_std)
    x_hat = belief.mean

    plan_failed = False
    if state.policy == "adaptive":
        action, estimate, plan_failed = plan_action(state.last_action, belief, cfg.planner, streams.planner)
    else:
        action = Action.random(cfg.n_qubits, cfg.layers, streams.policy)
        estimate = estimate_mi(belief, action, cfg.planner, streams.planner)

    shots = [true_execute(action, x_t, noise, streams.noise, streams.measure, cfg.measurement_axis)
             for _ in range(cfg.probes)]
    observation = np.concatenate(shots)

    # x_t is revealed only now, after the estimate and the shots
    update_failed = False
    try:
        net, adam, loss = wm.online_update(state.net, state.adam, inp, x_t, cfg.loss_kind)
    except NumericalError as exc:
        log.warning("step %d: world-model update skipped: %s", t, exc)
        net, adam, loss, update_failed = state.net, state.adam, float("nan"), True

    record = StepRecord(t, action, observation, float(x_t), x_hat, belief.std,
                        estimate.value, loss, plan_failed, update_failed)
    failures = state.consecutive_failures + 1 if record.flagged else 0
    return AgentState(net, adam, action, state.policy, record, failures), record


def run_episode(cfg: AgentConfig, saw: SawtoothConfig, noise: NoiseSpec, agent_seed: int,
                env_seed: int | None = None) -> list[StepRecord]:
    streams = Streams.from_seeds(agent_seed, env_seed)
    state = init_agent(cfg, streams)
    records = []
    for t in range(saw.horizon):
        state, rec = agent_step(state, t, target_phase(saw, t), noise, cfg, streams)
        records.append(rec)
        if state.consecutive_failures > MAX_CONSECUTIVE_FAILURES:
            raise EpisodeAborted(f"{state.consecutive_failures} consecutive failed steps ending at t={t}")
    return records


def error_summary(x_true, x_hat, burn_in: int = 30) -> dict:
    """Mean/std of raw and wrapped errors, full horizon and after burn-in."""
    x_true, x_hat = np.asarray(x_true, dtype=float), np.asarray(x_hat, dtype=float)
    raw = x_true - x_hat
    wrapped = wrapped_error(x_true, x_hat)
    out = {}
    for window, sl in (("full", slice(None)), ("post_burn_in", slice(burn_in, None))):
        r, w = raw[sl], wrapped[sl]
        out[window] = {
            "steps": int(r.size),
            "raw_mean": float(r.mean()) if r.size else None,
            "raw_std": float(r.std()) if r.size else None,
            "wrapped_mean_abs": float(np.abs(w).mean()) if w.size else None,
            "wrapped_std": float(w.std()) if w.size else None,
        }
    return out
