"""Pure-state simulator for the variational sensing pipeline.

The probe is prepared by a ring-coupled ansatz whose single-qubit and
two-qubit gates share parameters within a layer. The channel is
``Rz(x)`` on every qubit, and readout is a layer of local rotations
followed by computational-basis measurement.

Conventions:

* ``Rz(x) = diag(exp(-ix/2), exp(+ix/2))``
* ``Ry(b) = [[cos(b/2), -sin(b/2)], [sin(b/2), cos(b/2)]]``
* ``ZZ(phi) = exp(-i (phi/2) Z(x)Z)``
* bitstring index: qubit 0 is the most significant bit.

Hot paths work on batched ``(B, 2**n)`` complex arrays; the dataclasses
below are the validated public surface.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .errors import ParameterError

HALF_PI = np.pi / 2
PARAMS_PER_LAYER = 4  # alpha, beta, gamma, phi


@dataclass(frozen=True)
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if self.n < 1 or amps.shape != (2**self.n,):
            raise ParameterError(f"expected {2**self.n} amplitudes for n={self.n}, got shape {amps.shape}")
        object.__setattr__(self, "amps", amps)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


@dataclass(frozen=True)
class Action:
    """Probe angles ``theta`` (4 per layer) and measurement angles ``mu`` (1 per qubit)."""

    theta: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float).ravel()
        mu = np.asarray(self.mu, dtype=float).ravel()
        if theta.size == 0 or theta.size % PARAMS_PER_LAYER:
            raise ParameterError(f"theta length must be a positive multiple of 4, got {theta.size}")
        if mu.size == 0:
            raise ParameterError("mu must have one angle per qubit")
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(mu))):
            raise ParameterError("action angles must be finite")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "mu", mu)

    @property
    def layers(self) -> int:
        return self.theta.size // PARAMS_PER_LAYER

    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def dim(self) -> int:
        return self.theta.size + self.mu.size

    def vector(self) -> np.ndarray:
        return np.concatenate([self.theta, self.mu])

    @classmethod
    def from_vector(cls, vec, n: int) -> "Action":
        vec = np.asarray(vec, dtype=float)
        return cls(theta=vec[:-n], mu=vec[-n:])

    @classmethod
    def zeros(cls, n: int, layers: int = 2) -> "Action":
        return cls(np.zeros(PARAMS_PER_LAYER * layers), np.zeros(n))

    @classmethod
    def random(cls, n: int, layers: int, rng: np.random.Generator) -> "Action":
        """Every angle uniform in (-pi, pi]."""
        vec = np.pi - 2 * np.pi * rng.random(PARAMS_PER_LAYER * layers + n)
        return cls.from_vector(vec, n)


# -- gate primitives ---------------------------------------------------------


def rz(x: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * x), 0], [0, np.exp(0.5j * x)]])


def ry(b: float) -> np.ndarray:
    c, s = np.cos(b / 2), np.sin(b / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _euler_batch(alpha, beta, gamma) -> np.ndarray:
    """Rz(alpha) @ Ry(beta) @ Rz(gamma), broadcast over the input shape -> (..., 2, 2)."""
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    ep = np.exp(-0.5j * (alpha + gamma))
    em = np.exp(-0.5j * (alpha - gamma))
    out = np.empty(np.shape(alpha) + (2, 2), dtype=complex)
    out[..., 0, 0] = ep * c
    out[..., 0, 1] = -em * s
    out[..., 1, 0] = np.conj(em) * s
    out[..., 1, 1] = np.conj(ep) * c
    return out


def ring_edges(n: int) -> list[tuple[int, int]]:
    """Successive pairs including the wrap pair; a 2-ring has one edge, a 1-ring none."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    return [(q, (q + 1) % n) for q in range(n)]


@lru_cache(maxsize=None)
def _z_signs(n: int) -> np.ndarray:
    """(n, 2**n) array of Z eigenvalues (+1 for bit 0) per qubit and basis index."""
    idx = np.arange(2**n)
    bits = (idx[None, :] >> (n - 1 - np.arange(n))[:, None]) & 1
    return 1 - 2 * bits


@lru_cache(maxsize=None)
def _zz_signs(n: int) -> np.ndarray:
    z = _z_signs(n)
    edges = ring_edges(n)
    if not edges:
        return np.zeros((0, 2**n))
    return np.stack([z[i] * z[j] for i, j in edges]).astype(float)


@lru_cache(maxsize=None)
def _channel_generator(n: int) -> np.ndarray:
    """Diagonal of sum_j Z_j / 2, i.e. (n - 2 popcount(b)) / 2."""
    return _z_signs(n).sum(axis=0) / 2.0


def _apply_1q_batch(states: np.ndarray, mats: np.ndarray, q: int, n: int) -> np.ndarray:
    """Apply per-batch 2x2 ``mats`` (B, 2, 2) to qubit ``q`` of ``states`` (B, 2**n)."""
    B = states.shape[0]
    s = states.reshape(B, 2**q, 2, 2 ** (n - q - 1))
    return np.einsum("bij,bkjl->bkil", mats, s).reshape(B, 2**n)


def expand_theta(theta: np.ndarray, n: int) -> np.ndarray:
    """Per-occurrence angles, shape (layers, 4, n).

    Rows are alpha, beta, gamma (one column per qubit) and phi (one column
    per ring edge; unused columns are zero).
    """
    theta = np.asarray(theta, dtype=float)
    layers = theta.size // PARAMS_PER_LAYER
    out = np.repeat(theta.reshape(layers, PARAMS_PER_LAYER, 1), n, axis=2)
    out[:, 3, len(ring_edges(n)):] = 0.0
    return out


def prepare_expanded(expanded: np.ndarray, n: int, flips: np.ndarray | None = None) -> np.ndarray:
    """Prepare probes from per-occurrence angles ``expanded`` of shape (B, layers, 4, n).

    ``flips``, if given, is a boolean (layers, n) mask of Pauli X insertions
    applied after each layer (shared across the batch).
    """
    B, layers = expanded.shape[:2]
    states = np.zeros((B, 2**n), dtype=complex)
    states[:, 0] = 1.0
    zz = _zz_signs(n)
    n_edges = zz.shape[0]
    idx = np.arange(2**n)
    for layer in range(layers):
        a, b, g, phi = (expanded[:, layer, k, :] for k in range(4))
        mats = _euler_batch(a, b, g)  # (B, n, 2, 2)
        for q in range(n):
            states = _apply_1q_batch(states, mats[:, q], q, n)
        if n_edges:
            states = states * np.exp(-0.5j * (phi[:, :n_edges] @ zz))
        if flips is not None:
            for q in np.flatnonzero(flips[layer]):
                states = states[:, idx ^ (1 << (n - 1 - q))]
    return states


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"qubit count must be a positive integer, got {n!r}")


def prepare_probe(theta, n: int) -> StateVector:
    _check_n(n)
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size == 0 or theta.size % PARAMS_PER_LAYER or not np.all(np.isfinite(theta)):
        raise ParameterError(f"theta must be finite with length a positive multiple of 4, got {theta.size}")
    amps = prepare_expanded(expand_theta(theta, n)[None], n)[0]
    return StateVector(n, amps)


def channel_phases(xs, n: int) -> np.ndarray:
    """Diagonal of Rz(x)^{(x)n} for each phase in ``xs`` -> (len(xs), 2**n)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    return np.exp(-1j * np.outer(xs, _channel_generator(n)))


def apply_channel(state: StateVector, x: float) -> StateVector:
    return StateVector(state.n, state.amps * channel_phases([x], state.n)[0])


def measurement_unitary(mu, axis: str = "y") -> np.ndarray:
    """Kronecker product of local rotations, qubit 0 leftmost."""
    gate = {"y": ry, "z": rz}.get(axis)
    if gate is None:
        raise ParameterError(f"measurement axis must be 'y' or 'z', got {axis!r}")
    return reduce(np.kron, [gate(m) for m in np.asarray(mu, dtype=float)])


def _born(states: np.ndarray) -> np.ndarray:
    return states.real**2 + states.imag**2


def outcome_distribution(state: StateVector, mu, axis: str = "y") -> np.ndarray:
    mu = np.asarray(mu, dtype=float).ravel()
    if mu.size != state.n:
        raise ParameterError(f"mu has {mu.size} angles for a {state.n}-qubit state")
    if not np.all(np.isfinite(mu)):
        raise ParameterError("mu must be finite")
    return _born(measurement_unitary(mu, axis) @ state.amps)


def pipeline_distribution(x: float, action: Action, axis: str = "y") -> np.ndarray:
    """Exact p(s | x, theta, mu) for the noise-free pipeline."""
    return pipeline_batch(np.atleast_1d(x), action, axis)[0]


def pipeline_batch(xs, action: Action, axis: str = "y") -> np.ndarray:
    """Outcome distributions for many phases at once -> (len(xs), 2**n)."""
    n = action.n
    probe = prepare_expanded(expand_theta(action.theta, n)[None], n)[0]
    perturbed = channel_phases(xs, n) * probe
    return _born(perturbed @ measurement_unitary(action.mu, axis).T)


def bits_of(index: int, n: int) -> np.ndarray:
    return ((index >> (n - 1 - np.arange(n))) & 1).astype(np.uint8)


def sample_observation(dist, rng: np.random.Generator) -> np.ndarray:
    """Draw one bitstring from ``dist`` by inverse-CDF on a single uniform."""
    p = np.clip(np.asarray(dist, dtype=float), 0.0, None)
    n = int(np.log2(p.size))
    cdf = np.cumsum(p)
    u = rng.random() * cdf[-1]
    index = min(int(np.searchsorted(cdf, u, side="right")), p.size - 1)
    return bits_of(index, n)


def probs_and_jacobian(xs, action: Action, axis: str = "y") -> tuple[np.ndarray, np.ndarray]:
    """Outcome distributions and their action-Jacobians at every phase in ``xs``.

    Returns ``P`` of shape (M, 2**n) and ``J`` of shape (M, 2**n, dim a).
    Parameters shared across several gates are differentiated by shifting
    each gate occurrence by +-pi/2 separately and summing (chain rule); a
    single shift of the shared angle is not exact because the summed
    generator has eigenvalues beyond +-1/2.
    """
    n = action.n
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    base = expand_theta(action.theta, n)
    layers = action.layers
    n_edges = len(ring_edges(n))

    # batch 0 is the unshifted probe; then +/- shifts per gate occurrence
    batch = [base]
    owners = []  # (theta index, sign) per shifted entry
    for layer in range(layers):
        for k in range(PARAMS_PER_LAYER):
            count = n_edges if k == 3 else n
            for o in range(count):
                for sign in (1.0, -1.0):
                    e = base.copy()
                    e[layer, k, o] += sign * HALF_PI
                    batch.append(e)
                    owners.append((layer * PARAMS_PER_LAYER + k, sign))
    probes = prepare_expanded(np.stack(batch), n)  # (B, D)

    U = measurement_unitary(action.mu, axis)
    phases = channel_phases(xs, n)  # (M, D)
    perturbed = phases[None, :, :] * probes[:, None, :]  # (B, M, D)
    probs = _born(perturbed @ U.T)  # (B, M, D)

    P = probs[0]
    M, D = P.shape
    J = np.zeros((M, D, action.dim))
    for (j, sign), p in zip(owners, probs[1:]):
        J[:, :, j] += 0.5 * sign * p

    gate = {"y": ry, "z": rz}[axis]
    for q in range(n):
        shifted = []
        for sign in (1.0, -1.0):
            mu = action.mu.copy()
            mu[q] += sign * HALF_PI
            shifted.append(_born(perturbed[0] @ reduce(np.kron, [gate(m) for m in mu]).T))
        J[:, :, action.theta.size + q] = 0.5 * (shifted[0] - shifted[1])
    return P, J


def shift_jacobian(x: float, action: Action, axis: str = "y") -> np.ndarray:
    """Parameter-shift Jacobian of the outcome distribution, shape (2**n, dim a)."""
    return probs_and_jacobian([x], action, axis)[1][0]
