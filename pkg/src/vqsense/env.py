"""Ground truth: the sawtooth phase and noisy execution of the real probe."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sim
from .errors import ParameterError
from .sim import Action


@dataclass(frozen=True)
class SawtoothConfig:
    period: float = 15.0
    t0: float = 0.0
    horizon: int = 100
    dt: float = 1.0

    def __post_init__(self):
        if not self.period > 0:
            raise ParameterError(f"period must be > 0, got {self.period}")
        if self.horizon < 1:
            raise ParameterError(f"horizon must be >= 1, got {self.horizon}")
        if not self.dt > 0:
            raise ParameterError(f"dt must be > 0, got {self.dt}")


def target_phase(cfg: SawtoothConfig, t: int) -> float:
    u = (t * cfg.dt - cfg.t0) / cfg.period
    x = 2 * np.pi * (u - np.floor(u))
    # fractional parts just below 1 can round up to exactly 2*pi
    return float(x) if x < 2 * np.pi else 0.0


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "none"  # none | param_gauss | bit_flip
    std: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "param_gauss", "bit_flip"):
            raise ParameterError(f"unknown noise kind {self.kind!r}")
        if not self.std >= 0:
            raise ParameterError(f"noise std must be >= 0, got {self.std}")
        if not 0 <= self.p <= 1:
            raise ParameterError(f"bit-flip probability must be in [0, 1], got {self.p}")

    @classmethod
    def parse(cls, text: str) -> "NoiseSpec":
        """Parse ``none``, ``gauss:STD`` or ``bitflip:P``."""
        kind, _, arg = text.strip().partition(":")
        try:
            if kind == "none" and not arg:
                return cls()
            if kind == "gauss":
                return cls("param_gauss", std=float(arg))
            if kind == "bitflip":
                return cls("bit_flip", p=float(arg))
        except ValueError:
            pass
        raise ParameterError(f"noise must be none, gauss:STD or bitflip:P, got {text!r}")

    def __str__(self) -> str:
        if self.kind == "param_gauss":
            return f"gauss:{self.std!r}"
        if self.kind == "bit_flip":
            return f"bitflip:{self.p!r}"
        return "none"


def true_execute(action: Action, x: float, noise: NoiseSpec, noise_rng: np.random.Generator,
                 meas_rng: np.random.Generator, axis: str = "y") -> np.ndarray:
    """Run the physical probe once and return a single measured bitstring.

    Noise draws are taken from ``noise_rng`` in a fixed shape whatever the
    noise strength, so sweeps over std or p stay coupled draw-for-draw.
    """
    n = action.n
    expanded = sim.expand_theta(action.theta, n)
    flips = None
    if noise.kind == "param_gauss":
        theta = action.theta + noise.std * noise_rng.standard_normal(action.theta.size)
        expanded = sim.expand_theta(theta, n)
    elif noise.kind == "bit_flip":
        flips = noise_rng.random((action.layers, n)) < noise.p
    probe = sim.prepare_expanded(expanded[None], n, flips)[0]
    state = sim.StateVector(n, probe * sim.channel_phases([x], n)[0])
    dist = sim.outcome_distribution(state, action.mu, axis)
    return sim.sample_observation(dist, meas_rng)
