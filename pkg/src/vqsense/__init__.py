"""Adaptive Bayesian single-shot variational quantum sensing."""
from .agent import AgentConfig, StepRecord, agent_step, run_episode
from .env import NoiseSpec, SawtoothConfig, target_phase, true_execute
from .errors import EpisodeAborted, NumericalError, ParameterError
from .fusion import fuse, run_multi
from .info_gain import PlannerConfig, estimate_mi, mi_gradient, plan_action
from .sim import Action, StateVector, apply_channel, outcome_distribution, prepare_probe, sample_observation, shift_jacobian
from .world_model import Belief, online_update, predict, sample_belief

__version__ = "0.1.0"
