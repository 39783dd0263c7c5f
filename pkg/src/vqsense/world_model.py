"""Gaussian world model: a ReLU MLP trained online with Adam.

The network maps the previous step's (observation, phase, action) triplet
to the mean of a Gaussian belief over the current phase. With two outputs
the second is a log-variance, trained by Gaussian negative log-likelihood.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NumericalError, ParameterError

HIDDEN = (256, 256, 256)
STD_MIN, STD_MAX = 1e-3, 10.0
LOGVAR_MIN, LOGVAR_MAX = 2 * np.log(STD_MIN), 2 * np.log(STD_MAX)


@dataclass(frozen=True)
class Belief:
    mean: float
    std: float

    def __post_init__(self):
        if not (np.isfinite(self.std) and self.std > 0):
            raise ParameterError(f"belief std must be positive and finite, got {self.std}")


@dataclass
class NetParams:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def outputs(self) -> int:
        return self.weights[-1].shape[1]

    def arrays(self) -> list[np.ndarray]:
        return [a for pair in zip(self.weights, self.biases) for a in pair]

    @classmethod
    def from_arrays(cls, arrays) -> "NetParams":
        arrays = list(arrays)
        return cls(arrays[0::2], arrays[1::2])

    def copy(self) -> "NetParams":
        return NetParams.from_arrays(a.copy() for a in self.arrays())


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, arrays, **hyper) -> "AdamState":
        return cls([np.zeros_like(a) for a in arrays], [np.zeros_like(a) for a in arrays], **hyper)


def init_params(input_dim: int, outputs: int, rng: np.random.Generator, hidden=HIDDEN) -> NetParams:
    """Glorot-uniform weights, zero biases."""
    sizes = [input_dim, *hidden, outputs]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return NetParams(weights, biases)


def zero_params(input_dim: int, outputs: int, hidden=HIDDEN) -> NetParams:
    sizes = [input_dim, *hidden, outputs]
    return NetParams(
        [np.zeros((i, o)) for i, o in zip(sizes[:-1], sizes[1:])],
        [np.zeros(o) for o in sizes[1:]],
    )


def encode_input(bits, x_prev: float, a_prev, circular: bool = False) -> np.ndarray:
    """Recode bits to +-1 and concatenate with the phase and action.

    With ``circular`` the phase enters as (cos, sin) instead of raw radians.
    """
    s = 1.0 - 2.0 * np.asarray(bits, dtype=float)
    x = [np.cos(x_prev), np.sin(x_prev)] if circular else [x_prev]
    return np.concatenate([s, x, np.asarray(a_prev, dtype=float)])


def input_dim(n_bits: int, action_dim: int, circular: bool = False) -> int:
    return n_bits + (2 if circular else 1) + action_dim


def forward(params: NetParams, x: np.ndarray, cache: bool = False):
    h = np.asarray(x, dtype=float)
    if h.shape != (params.input_dim,):
        raise ParameterError(f"model input has shape {h.shape}, expected ({params.input_dim},)")
    acts = [h]
    last = len(params.weights) - 1
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ W + b
        if i < last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    return (h, acts) if cache else h


def backward(params: NetParams, acts: list[np.ndarray], grad_out: np.ndarray) -> list[np.ndarray]:
    """Gradients in ``NetParams.arrays()`` order given dLoss/dOutput."""
    grads = []
    g = grad_out
    for i in range(len(params.weights) - 1, -1, -1):
        grads.append(g)  # bias
        grads.append(np.outer(acts[i], g))  # weight
        if i:
            g = (params.weights[i] @ g) * (acts[i] > 0)
    return grads[::-1]


def predict(params: NetParams, x: np.ndarray, fixed_std: float | None = None) -> Belief:
    out = forward(params, x)
    if params.outputs == 1:
        if fixed_std is None:
            raise ParameterError("single-output model needs a fixed_std")
        std = fixed_std
    else:
        std = np.exp(0.5 * np.clip(out[1], LOGVAR_MIN, LOGVAR_MAX))
    return Belief(float(out[0]), float(np.clip(std, STD_MIN, STD_MAX)))


def loss_and_output_grad(out: np.ndarray, target: float, kind: str) -> tuple[float, np.ndarray]:
    grad = np.zeros_like(out)
    resid = out[0] - target
    if kind == "squared":
        grad[0] = 2 * resid
        return float(resid**2), grad
    if kind == "gaussian_nll":
        lv = np.clip(out[1], LOGVAR_MIN, LOGVAR_MAX)
        var = np.exp(lv)
        grad[0] = resid / var
        if LOGVAR_MIN < out[1] < LOGVAR_MAX:
            grad[1] = 0.5 * (1.0 - resid**2 / var)
        return float(0.5 * (resid**2 / var + lv)), grad
    raise ParameterError(f"unknown loss kind {kind!r}")


def loss_and_grads(params: NetParams, x: np.ndarray, target: float, kind: str):
    out, acts = forward(params, x, cache=True)
    loss, g_out = loss_and_output_grad(out, target, kind)
    return loss, backward(params, acts, g_out)


def adam_step(arrays: list[np.ndarray], grads: list[np.ndarray], state: AdamState):
    """One bias-corrected Adam step; returns new arrays and a new state."""
    t = state.t + 1
    b1, b2 = state.beta1, state.beta2
    m = [b1 * mi + (1 - b1) * g for mi, g in zip(state.m, grads)]
    v = [b2 * vi + (1 - b2) * g * g for vi, g in zip(state.v, grads)]
    c1, c2 = 1 - b1**t, 1 - b2**t
    new = [a - state.lr * (mi / c1) / (np.sqrt(vi / c2) + state.eps) for a, mi, vi in zip(arrays, m, v)]
    return new, replace(state, m=m, v=v, t=t)


def online_update(params: NetParams, adam: AdamState, x: np.ndarray, target: float,
                  loss_kind: str = "squared") -> tuple[NetParams, AdamState, float]:
    """Exactly one Adam step on the loss at (x, target); returns the pre-step loss.

    Raises NumericalError and leaves the inputs untouched if the loss or any
    gradient is non-finite.
    """
    loss, grads = loss_and_grads(params, x, target, loss_kind)
    if not np.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads):
        raise NumericalError(f"non-finite loss or gradient (loss={loss})")
    arrays, adam = adam_step(params.arrays(), grads, adam)
    return NetParams.from_arrays(arrays), adam, loss


def sample_belief(belief: Belief, count: int, rng: np.random.Generator) -> np.ndarray:
    if count < 1:
        raise ParameterError(f"sample count must be >= 1, got {count}")
    return belief.mean + belief.std * rng.standard_normal(count)


# -- checkpoints ---------------------------------------------------------------
# JSON document; every array is stored flat in C (row-major) order next to its
# shape, and floats are written with repr so they round-trip exactly.

CHECKPOINT_FORMAT = "vqsense-checkpoint/1"


def _pack(arrays):
    return [{"shape": list(a.shape), "data": [float(v) for v in a.ravel()]} for a in arrays]


def _unpack(items):
    return [np.array(it["data"], dtype=float).reshape(it["shape"]) for it in items]


def checkpoint_dumps(params: NetParams, adam: AdamState) -> str:
    doc = {
        "format": CHECKPOINT_FORMAT,
        "params": _pack(params.arrays()),
        "adam": {
            "t": adam.t, "lr": adam.lr, "beta1": adam.beta1, "beta2": adam.beta2, "eps": adam.eps,
            "m": _pack(adam.m), "v": _pack(adam.v),
        },
    }
    return json.dumps(doc)


def checkpoint_loads(text: str) -> tuple[NetParams, AdamState]:
    doc = json.loads(text)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ParameterError(f"unsupported checkpoint format {doc.get('format')!r}")
    params = NetParams.from_arrays(_unpack(doc["params"]))
    a = doc["adam"]
    adam = AdamState(_unpack(a["m"]), _unpack(a["v"]), t=a["t"], lr=a["lr"],
                     beta1=a["beta1"], beta2=a["beta2"], eps=a["eps"])
    return params, adam
