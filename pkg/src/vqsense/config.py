"""Experiment configuration: JSON file + flag overrides -> validated dataclass.

Every key is optional. The resolved config (all defaults filled in) is
written next to the outputs and can be fed back with ``--config``.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .agent import AgentConfig
from .env import NoiseSpec, SawtoothConfig
from .errors import ParameterError


class ConfigError(ParameterError):
    pass


@dataclass
class ExperimentConfig:
    n_qubits: int = 6
    layers: int = 2
    horizon: int = 100
    period: float = 15.0
    t0: float = 0.0
    dt: float = 1.0
    policy: str = "adaptive"
    noise: str = "none"
    mc_samples: int = 64
    action_lr: float = 0.2
    model_lr: float = 0.001
    fixed_std: float = 0.25
    agents: int | None = None  # resolved per command: 1 for single/baseline, 3 for multi/sweep-noise
    probes_per_agent: int = 1
    measurement_axis: str = "y"
    circular_input: bool = False
    burn_in: int = 30
    seed: int = 0
    sweep_seeds: list[int] = field(default_factory=lambda: list(range(10)))
    sweep_p: list[float] = field(default_factory=lambda: [0.1, 0.2, 0.4])
    workers: int = 1
    out_dir: str = "runs"

    def validate(self) -> "ExperimentConfig":
        """Raise ConfigError naming the first bad field."""
        def check(name, ok, what):
            if not ok:
                raise ConfigError(f"field {name!r}: {what}, got {getattr(self, name)!r}")

        for name, typ in (("n_qubits", int), ("layers", int), ("horizon", int), ("mc_samples", int),
                          ("probes_per_agent", int), ("burn_in", int), ("seed", int), ("workers", int)):
            check(name, isinstance(getattr(self, name), typ) and not isinstance(getattr(self, name), bool),
                  "expected an integer")
        for name in ("period", "t0", "dt", "action_lr", "model_lr", "fixed_std"):
            v = getattr(self, name)
            check(name, isinstance(v, (int, float)) and not isinstance(v, bool), "expected a number")
        check("n_qubits", 1 <= self.n_qubits <= 12, "expected 1..12")
        check("layers", self.layers >= 1, "expected >= 1")
        check("horizon", self.horizon >= 1, "expected >= 1")
        check("period", self.period > 0, "expected > 0")
        check("dt", self.dt > 0, "expected > 0")
        check("policy", self.policy in ("adaptive", "random"), "expected adaptive or random")
        check("mc_samples", self.mc_samples >= 2, "expected >= 2")
        check("action_lr", self.action_lr >= 0, "expected >= 0")
        check("model_lr", self.model_lr >= 0, "expected >= 0")
        check("fixed_std", 1e-3 <= self.fixed_std <= 10, "expected in [0.001, 10]")
        check("agents", self.agents is None or (isinstance(self.agents, int) and self.agents >= 1),
              "expected a positive integer")
        check("probes_per_agent", self.probes_per_agent >= 1, "expected >= 1")
        check("measurement_axis", self.measurement_axis in ("y", "z"), "expected y or z")
        check("circular_input", isinstance(self.circular_input, bool), "expected true or false")
        check("burn_in", self.burn_in >= 0, "expected >= 0")
        check("seed", self.seed >= 0, "expected >= 0")
        check("workers", self.workers >= 1, "expected >= 1")
        check("sweep_seeds", isinstance(self.sweep_seeds, list) and len(self.sweep_seeds) > 0
              and all(isinstance(s, int) and s >= 0 for s in self.sweep_seeds), "expected non-empty list of seeds")
        check("sweep_p", isinstance(self.sweep_p, list) and len(self.sweep_p) > 0
              and all(isinstance(p, (int, float)) and 0 <= p <= 1 for p in self.sweep_p),
              "expected non-empty list of probabilities")
        check("out_dir", isinstance(self.out_dir, str) and self.out_dir != "", "expected a path")
        try:
            self.noise_spec
        except ParameterError as exc:
            raise ConfigError(f"field 'noise': {exc}") from None
        return self

    @property
    def noise_spec(self) -> NoiseSpec:
        return NoiseSpec.parse(self.noise)

    @property
    def sawtooth(self) -> SawtoothConfig:
        return SawtoothConfig(self.period, self.t0, self.horizon, self.dt)

    def agent_config(self, **overrides) -> AgentConfig:
        kw = dict(n_qubits=self.n_qubits, layers=self.layers, policy=self.policy,
                  mc_samples=self.mc_samples, action_lr=float(self.action_lr),
                  model_lr=float(self.model_lr), fixed_std=float(self.fixed_std),
                  probes=self.probes_per_agent, measurement_axis=self.measurement_axis,
                  circular_input=self.circular_input)
        kw.update(overrides)
        return AgentConfig(**kw)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"


FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    unknown = sorted(set(doc) - FIELDS)
    if unknown:
        raise ConfigError(f"{path}: unknown field(s) {', '.join(map(repr, unknown))}")
    return doc


def resolve(file_values: dict, overrides: dict, default_agents: int = 1) -> ExperimentConfig:
    values = {**file_values, **{k: v for k, v in overrides.items() if v is not None}}
    cfg = ExperimentConfig(**values)
    if cfg.agents is None:
        cfg.agents = default_agents
    return cfg.validate()
