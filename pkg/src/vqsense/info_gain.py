"""Monte-Carlo active information gain and one-step action planning.

The information gain of an action is the mutual information between the
next outcome and the phase under the agent's belief. It is computed in
its outcome-side form, H(mean_i p_i) - mean_i H(p_i), where the p_i are
exact outcome distributions at M phases drawn from the belief.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import sim
from .errors import NumericalError, ParameterError
from .sim import Action
from .world_model import Belief, sample_belief

LOG_FLOOR = 1e-15


@dataclass(frozen=True)
class PlannerConfig:
    mc_samples: int = 64
    action_lr: float = 0.2
    measurement_axis: str = "y"

    def __post_init__(self):
        if self.mc_samples < 2:
            raise ParameterError(f"mc_samples must be >= 2, got {self.mc_samples}")
        if not self.action_lr >= 0:
            raise ParameterError(f"action_lr must be >= 0, got {self.action_lr}")
        if self.measurement_axis not in ("y", "z"):
            raise ParameterError(f"measurement_axis must be 'y' or 'z', got {self.measurement_axis!r}")


@dataclass(frozen=True)
class MIEstimate:
    value: float
    per_sample_dists: np.ndarray  # (M, 2**n)
    mixture: np.ndarray
    samples: np.ndarray


class Plan(NamedTuple):
    action: Action
    estimate: MIEstimate | None
    failed: bool = False


def entropy(p: np.ndarray) -> np.ndarray:
    """Shannon entropy in nats along the last axis, with 0 log 0 = 0."""
    p = np.clip(p, 0.0, None)
    logs = np.log(np.where(p > 0, p, 1.0))
    return -(p * logs).sum(axis=-1)


def mi_from_dists(dists: np.ndarray) -> tuple[float, np.ndarray]:
    mixture = dists.mean(axis=0)
    value = float(entropy(mixture) - entropy(dists).mean())
    # the plug-in estimate is nonnegative by concavity; clip rounding residue
    return max(value, 0.0), mixture


def estimate_mi_at(samples, action: Action, axis: str = "y") -> MIEstimate:
    """MI estimate on a fixed set of phase samples."""
    samples = np.atleast_1d(np.asarray(samples, dtype=float))
    dists = sim.pipeline_batch(samples, action, axis)
    value, mixture = mi_from_dists(dists)
    return MIEstimate(value, dists, mixture, samples)


def estimate_mi(belief: Belief, action: Action, cfg: PlannerConfig, rng: np.random.Generator) -> MIEstimate:
    samples = sample_belief(belief, cfg.mc_samples, rng)
    return estimate_mi_at(samples, action, cfg.measurement_axis)


def mi_gradient_from(P: np.ndarray, J: np.ndarray) -> np.ndarray:
    """dI/da from per-sample distributions P (M, D) and Jacobians J (M, D, A)."""
    M = P.shape[0]
    pbar = P.mean(axis=0)
    Jbar = J.mean(axis=0)
    w_bar = 1.0 + np.log(np.maximum(pbar, LOG_FLOOR))
    w_i = 1.0 + np.log(np.maximum(P, LOG_FLOOR))
    grad = -(w_bar @ Jbar) + np.einsum("md,mda->a", w_i, J) / M
    if not np.all(np.isfinite(grad)):
        raise NumericalError("non-finite information-gain gradient")
    return grad


def mi_gradient(samples, action: Action, cfg: PlannerConfig) -> np.ndarray:
    P, J = sim.probs_and_jacobian(samples, action, cfg.measurement_axis)
    return mi_gradient_from(P, J)


def plan_action(prev: Action, belief: Belief, cfg: PlannerConfig, rng: np.random.Generator) -> Plan:
    """One gradient-ascent step on the information gain from ``prev``.

    The same Monte-Carlo samples serve the estimate and every shifted
    evaluation. On a numerical failure ``prev`` is returned with ``failed``.
    """
    samples = sample_belief(belief, cfg.mc_samples, rng)
    P, J = sim.probs_and_jacobian(samples, prev, cfg.measurement_axis)
    value, mixture = mi_from_dists(P)
    estimate = MIEstimate(value, P, mixture, samples)
    try:
        grad = mi_gradient_from(P, J)
    except NumericalError:
        return Plan(prev, estimate, failed=True)
    step = Action.from_vector(prev.vector() + cfg.action_lr * grad, prev.n)
    return Plan(step, estimate)
