"""Dense feedforward networks: architecture, parameters, forward pass and backprop.

CONVENTIONS:
- Layer ℓ = 1..L+1 maps width n_{ℓ-1} to n_ℓ with weight W_ℓ (n_ℓ × n_{ℓ-1})
  and bias b_ℓ (n_ℓ).
- Batched arrays are row-major: a batch of B inputs is a (B, n_0) array and
  the affine map is ``Z = A @ W.T + b``.
- Hidden layers share one activation; the output layer is the identity.

IMMUTABILITY:
NetworkParams arrays are flagged read-only on construction. Trained
parameters can therefore be shared between threads for forward evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Sequence

import numpy as np

from ..exceptions import ConfigurationError, InputError


class Activation(str, Enum):
    """Supported activations."""

    RELU = "relu"
    TANH = "tanh"
    SIGMOID = "sigmoid"
    IDENTITY = "identity"


HIDDEN_ACTIVATIONS = {Activation.RELU, Activation.TANH, Activation.SIGMOID}


def _activate(kind: Activation, z: np.ndarray) -> np.ndarray:
    if kind is Activation.RELU:
        return np.maximum(z, 0.0)
    if kind is Activation.TANH:
        return np.tanh(z)
    if kind is Activation.SIGMOID:
        return 0.5 * (1.0 + np.tanh(0.5 * z))
    return z


def _activate_derivative(kind: Activation, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Derivative of the activation, given pre-activation z and output a."""
    if kind is Activation.RELU:
        return (z > 0.0).astype(z.dtype)
    if kind is Activation.TANH:
        return 1.0 - a * a
    if kind is Activation.SIGMOID:
        return a * (1.0 - a)
    return np.ones_like(z)


@dataclass(frozen=True)
class Architecture:
    """Shape and activations of a dense network.

    Attributes:
        input_width: n_0
        hidden_widths: n_1..n_L (at least one hidden layer)
        output_width: n_{L+1}
        hidden_activation: Activation of every hidden layer
        output_activation: Always identity
    """

    input_width: int
    hidden_widths: tuple[int, ...]
    output_width: int
    hidden_activation: Activation = Activation.RELU
    output_activation: Activation = Activation.IDENTITY

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden_widths", tuple(int(w) for w in self.hidden_widths))
        object.__setattr__(self, "hidden_activation", Activation(self.hidden_activation))
        object.__setattr__(self, "output_activation", Activation(self.output_activation))

        errors = []
        if not self.hidden_widths:
            errors.append({"field": "hidden_widths", "error": "at least one hidden layer required"})
        widths = [self.input_width, *self.hidden_widths, self.output_width]
        if any(int(w) < 1 for w in widths):
            errors.append({"field": "widths", "error": f"all widths must be >= 1, got {widths}"})
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            errors.append({"field": "hidden_activation", "error": "must be relu, tanh or sigmoid"})
        if self.output_activation is not Activation.IDENTITY:
            errors.append({"field": "output_activation", "error": "output layer must be identity"})
        if errors:
            raise ConfigurationError("Invalid network architecture", {"errors": errors})

    @property
    def layer_widths(self) -> list[int]:
        """[n_0, n_1, ..., n_{L+1}]."""
        return [self.input_width, *self.hidden_widths, self.output_width]

    @property
    def num_layers(self) -> int:
        """Number of affine layers (L + 1)."""
        return len(self.hidden_widths) + 1

    def weight_shapes(self) -> list[tuple[int, int]]:
        w = self.layer_widths
        return [(w[i + 1], w[i]) for i in range(self.num_layers)]

    def to_dict(self) -> dict:
        return {
            "input_width": self.input_width,
            "hidden_widths": list(self.hidden_widths),
            "output_width": self.output_width,
            "hidden_activation": self.hidden_activation.value,
            "output_activation": self.output_activation.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Architecture":
        return cls(
            input_width=int(data["input_width"]),
            hidden_widths=tuple(data["hidden_widths"]),
            output_width=int(data["output_width"]),
            hidden_activation=Activation(data.get("hidden_activation", "relu")),
            output_activation=Activation(data.get("output_activation", "identity")),
        )


@dataclass(frozen=True)
class NetworkParams:
    """Weights and biases of every layer.

    Also used for gradients and Adam moment accumulators, which share the
    same shapes.
    """

    arch: Architecture
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        weights = tuple(np.array(w, dtype=np.float64, copy=True) for w in self.weights)
        biases = tuple(np.array(b, dtype=np.float64, copy=True).reshape(-1) for b in self.biases)
        shapes = self.arch.weight_shapes()
        if len(weights) != len(shapes) or len(biases) != len(shapes):
            raise InputError(
                "Layer count does not match architecture",
                {"expected": len(shapes), "weights": len(weights), "biases": len(biases)},
            )
        for i, (w, b, shape) in enumerate(zip(weights, biases, shapes)):
            if w.shape != shape or b.shape != (shape[0],):
                raise InputError(
                    f"Layer {i + 1} shape mismatch",
                    {"expected": shape, "weight": w.shape, "bias": b.shape},
                )
            w.setflags(write=False)
            b.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    def arrays(self) -> Iterator[np.ndarray]:
        """Iterate W_1, b_1, W_2, b_2, ... in layer order."""
        for w, b in zip(self.weights, self.biases):
            yield w
            yield b

    def map(self, fn: Callable[..., np.ndarray], *others: "NetworkParams") -> "NetworkParams":
        """Apply ``fn`` array-wise to self and ``others`` (same architecture)."""
        weights = tuple(fn(w, *(o.weights[i] for o in others)) for i, w in enumerate(self.weights))
        biases = tuple(fn(b, *(o.biases[i] for o in others)) for i, b in enumerate(self.biases))
        return NetworkParams(self.arch, weights, biases)

    def zeros_like(self) -> "NetworkParams":
        return self.map(np.zeros_like)

    def num_parameters(self) -> int:
        return sum(a.size for a in self.arrays())

    def flat(self) -> np.ndarray:
        """All parameters as one vector, in ``arrays()`` order."""
        return np.concatenate([a.ravel() for a in self.arrays()])

    @classmethod
    def from_flat(cls, arch: Architecture, vector: np.ndarray) -> "NetworkParams":
        vector = np.asarray(vector, dtype=np.float64)
        weights, biases, offset = [], [], 0
        for rows, cols in arch.weight_shapes():
            weights.append(vector[offset:offset + rows * cols].reshape(rows, cols))
            offset += rows * cols
            biases.append(vector[offset:offset + rows])
            offset += rows
        if offset != vector.size:
            raise InputError("Flat vector length does not match architecture",
                             {"expected": offset, "got": vector.size})
        return cls(arch, tuple(weights), tuple(biases))


def init_network(arch: Architecture, seed: int) -> NetworkParams:
    """He-uniform initialization: W_ℓ ~ U(-√(6/n_{ℓ-1}), √(6/n_{ℓ-1})), b_ℓ = 0.

    Deterministic given ``seed``.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    weights, biases = [], []
    for rows, cols in arch.weight_shapes():
        bound = np.sqrt(6.0 / cols)
        weights.append(rng.uniform(-bound, bound, size=(rows, cols)))
        biases.append(np.zeros(rows))
    return NetworkParams(arch, tuple(weights), tuple(biases))


def forward_batch(params: NetworkParams, inputs: np.ndarray) -> np.ndarray:
    """Evaluate the network on a (B, n_0) batch, returning (B, n_{L+1})."""
    a = np.asarray(inputs, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1) if params.arch.input_width == 1 else a.reshape(1, -1)
    if a.ndim != 2 or a.shape[1] != params.arch.input_width:
        raise InputError(
            "Input width does not match architecture",
            {"expected": params.arch.input_width, "shape": list(np.shape(inputs))},
        )
    last = params.arch.num_layers - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w.T + b
        kind = params.arch.output_activation if i == last else params.arch.hidden_activation
        a = _activate(kind, z)
    return a


def forward(params: NetworkParams, input: Sequence[float] | np.ndarray) -> np.ndarray:
    """f_NN(θ) = f_{L+1} ∘ f_L ∘ ... ∘ f_1(θ) for a single input vector."""
    x = np.asarray(input, dtype=np.float64).reshape(-1)
    if x.size != params.arch.input_width:
        raise InputError(
            "Input length does not match architecture",
            {"expected": params.arch.input_width, "got": int(x.size)},
        )
    return forward_batch(params, x.reshape(1, -1))[0]


def batch_loss_and_gradient(
    params: NetworkParams, inputs: np.ndarray, targets: np.ndarray
) -> tuple[float, NetworkParams]:
    """Mean squared error over the batch and its gradient by backpropagation.

    loss = (1/B) Σ_i ||f_NN(x_i) - t_i||²
    """
    x = np.asarray(inputs, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, params.arch.input_width)
    if t.ndim == 1:
        t = t.reshape(-1, params.arch.output_width)
    batch = x.shape[0]
    if batch == 0:
        raise InputError("Cannot compute loss of an empty batch")
    if x.shape[1] != params.arch.input_width or t.shape != (batch, params.arch.output_width):
        raise InputError(
            "Batch is not dimension-consistent with architecture",
            {"inputs": list(x.shape), "targets": list(t.shape)},
        )

    arch = params.arch
    last = arch.num_layers - 1
    pre: list[np.ndarray] = []
    post: list[np.ndarray] = [x]
    a = x
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w.T + b
        kind = arch.output_activation if i == last else arch.hidden_activation
        a = _activate(kind, z)
        pre.append(z)
        post.append(a)

    residual = post[-1] - t
    loss = float(np.sum(residual * residual) / batch)

    grad_w: list[np.ndarray] = [np.empty(0)] * arch.num_layers
    grad_b: list[np.ndarray] = [np.empty(0)] * arch.num_layers
    delta = (2.0 / batch) * residual * _activate_derivative(arch.output_activation, pre[-1], post[-1])
    for i in range(last, -1, -1):
        grad_w[i] = delta.T @ post[i]
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params.weights[i]) * _activate_derivative(
                arch.hidden_activation, pre[i - 1], post[i]
            )
    return loss, NetworkParams(arch, tuple(grad_w), tuple(grad_b))


def loss_and_gradient(
    params: NetworkParams, batch: Sequence[tuple[Sequence[float], Sequence[float]]]
) -> tuple[float, NetworkParams]:
    """Loss and gradient for a batch of (input, target) pairs."""
    if len(batch) == 0:
        raise InputError("Cannot compute loss of an empty batch")
    inputs = np.array([np.asarray(x, dtype=np.float64).reshape(-1) for x, _ in batch])
    targets = np.array([np.asarray(t, dtype=np.float64).reshape(-1) for _, t in batch])
    return batch_loss_and_gradient(params, inputs, targets)
