"""Mini-batch Adam training with optional validation split.

TRAINING LOOP:
- The dataset is split once into training/validation sets by a seeded
  permutation (validation_fraction of the points, rounded, go to validation).
- Each epoch shuffles the training set and visits it in mini-batches; the
  last, smaller batch is included so every point is seen each epoch.
- After each epoch the full training loss (and validation loss, if any) is
  recorded in the history.
- ReduceOnPlateau multiplies the learning rate by ``factor`` whenever the
  monitored loss (validation if present, else training) has not improved for
  ``patience`` consecutive epochs, never going below ``min_lr``.
- A non-finite loss aborts training with TrainingDivergenceError.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from ..exceptions import ConfigurationError, TrainingDivergenceError
from .network import Architecture, NetworkParams, batch_loss_and_gradient, forward_batch, init_network
from .optim import DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPSILON, AdamState, adam_step

logger = logging.getLogger(__name__)

Dataset = Union[
    tuple[np.ndarray, np.ndarray],
    Sequence[tuple[Sequence[float], Sequence[float]]],
]


@dataclass(frozen=True)
class FixedSchedule:
    """Constant learning rate."""

    kind: str = "fixed"


@dataclass(frozen=True)
class ReduceOnPlateau:
    """Halve-on-stall learning-rate schedule.

    Attributes:
        patience: Epochs without improvement before reducing
        factor: Multiplier applied on reduction, 0 < factor < 1
        min_lr: Floor for the learning rate
    """

    patience: int = 50
    factor: float = 0.5
    min_lr: float = 1e-5
    kind: str = "reduce_on_plateau"


LRSchedule = Union[FixedSchedule, ReduceOnPlateau]


@dataclass(frozen=True)
class TrainingConfig:
    """Hyper-parameters of one training run."""

    epochs: int
    batch_size: int
    learning_rate: float
    adam_beta1: float = DEFAULT_BETA1
    adam_beta2: float = DEFAULT_BETA2
    adam_epsilon: float = DEFAULT_EPSILON
    validation_fraction: float = 0.0
    lr_schedule: LRSchedule = field(default_factory=FixedSchedule)
    shuffle_seed: int = 0

    def __post_init__(self) -> None:
        errors = []
        if self.epochs < 1:
            errors.append({"field": "epochs", "error": "must be >= 1"})
        if self.batch_size < 1:
            errors.append({"field": "batch_size", "error": "must be >= 1"})
        if not self.learning_rate > 0:
            errors.append({"field": "learning_rate", "error": "must be positive"})
        if not 0.0 <= self.validation_fraction < 1.0:
            errors.append({"field": "validation_fraction", "error": "must lie in [0, 1)"})
        if isinstance(self.lr_schedule, ReduceOnPlateau):
            if not 0.0 < self.lr_schedule.factor < 1.0:
                errors.append({"field": "lr_schedule.factor", "error": "must lie in (0, 1)"})
            if self.lr_schedule.patience < 1:
                errors.append({"field": "lr_schedule.patience", "error": "must be >= 1"})
        if errors:
            raise ConfigurationError("Invalid training configuration", {"errors": errors})

    def with_shuffle_seed(self, shuffle_seed: int) -> "TrainingConfig":
        return replace(self, shuffle_seed=shuffle_seed)


@dataclass
class TrainingHistory:
    """Per-epoch losses and learning rates."""

    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    learning_rate: list[float] = field(default_factory=list)

    @property
    def final_train_loss(self) -> float:
        return self.train_loss[-1] if self.train_loss else math.nan

    def to_dict(self) -> dict:
        return {
            "train_loss": list(self.train_loss),
            "val_loss": list(self.val_loss),
            "learning_rate": list(self.learning_rate),
        }


def as_arrays(dataset: Dataset, arch: Architecture) -> tuple[np.ndarray, np.ndarray]:
    """Normalize a dataset to (inputs (n, n_in), targets (n, n_out)) arrays."""
    if isinstance(dataset, tuple) and len(dataset) == 2 and isinstance(dataset[0], np.ndarray):
        inputs, targets = dataset
    else:
        inputs = [np.asarray(x, dtype=np.float64).reshape(-1) for x, _ in dataset]
        targets = [np.asarray(t, dtype=np.float64).reshape(-1) for _, t in dataset]
    x = np.asarray(inputs, dtype=np.float64).reshape(-1, arch.input_width)
    t = np.asarray(targets, dtype=np.float64).reshape(-1, arch.output_width)
    if x.shape[0] != t.shape[0]:
        raise ConfigurationError(
            "Inputs and targets differ in length",
            {"errors": [{"field": "dataset", "error": f"{x.shape[0]} inputs vs {t.shape[0]} targets"}]},
        )
    return x, t


def split_validation(n: int, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Seeded split of indices 0..n-1 into (train, validation)."""
    n_val = int(round(fraction * n))
    order = rng.permutation(n)
    return np.sort(order[n_val:]), np.sort(order[:n_val])


def _mse(params: NetworkParams, x: np.ndarray, t: np.ndarray) -> float:
    r = forward_batch(params, x) - t
    return float(np.sum(r * r) / x.shape[0])


def train(
    arch: Architecture,
    dataset: Dataset,
    cfg: TrainingConfig,
    seed: int,
) -> tuple[NetworkParams, TrainingHistory]:
    """Train a network from scratch by mini-batch Adam.

    Args:
        arch: Network architecture
        dataset: (input, target) pairs or an (inputs, targets) array tuple
        cfg: Training hyper-parameters (shuffle_seed drives split and shuffles)
        seed: Initialization seed

    Returns:
        (trained parameters, per-epoch history)

    Raises:
        ConfigurationError: If the training split is smaller than one batch
        TrainingDivergenceError: If any loss becomes non-finite
    """
    x, t = as_arrays(dataset, arch)
    n = x.shape[0]
    required = cfg.batch_size / (1.0 - cfg.validation_fraction)
    rng = np.random.Generator(np.random.Philox(cfg.shuffle_seed))
    train_idx, val_idx = split_validation(n, cfg.validation_fraction, rng)
    if n < required or train_idx.size < cfg.batch_size:
        raise ConfigurationError(
            "Dataset too small for batch size and validation split",
            {"errors": [{
                "field": "dataset",
                "error": f"{n} points < batch_size/(1-validation_fraction) = {required:.1f}",
            }]},
        )

    x_train, t_train = x[train_idx], t[train_idx]
    x_val, t_val = x[val_idx], t[val_idx]
    has_val = val_idx.size > 0

    params = init_network(arch, seed)
    state = AdamState.fresh(params)
    history = TrainingHistory()
    lr = cfg.learning_rate
    schedule = cfg.lr_schedule
    best = math.inf
    stall = 0

    for epoch in range(cfg.epochs):
        order = rng.permutation(train_idx.size)
        for start in range(0, order.size, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            loss, grads = batch_loss_and_gradient(params, x_train[batch], t_train[batch])
            if not math.isfinite(loss):
                raise TrainingDivergenceError(
                    f"Non-finite batch loss in epoch {epoch}", epoch=epoch, loss=loss
                )
            params, state = adam_step(
                params, state, grads, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon
            )

        train_loss = _mse(params, x_train, t_train)
        val_loss = _mse(params, x_val, t_val) if has_val else math.nan
        if not math.isfinite(train_loss) or (has_val and not math.isfinite(val_loss)):
            raise TrainingDivergenceError(
                f"Non-finite loss after epoch {epoch}",
                epoch=epoch,
                loss=train_loss if not math.isfinite(train_loss) else val_loss,
            )
        history.train_loss.append(train_loss)
        if has_val:
            history.val_loss.append(val_loss)
        history.learning_rate.append(lr)
        logger.debug("epoch %d: train %.3e val %.3e lr %.2e", epoch, train_loss, val_loss, lr)

        if isinstance(schedule, ReduceOnPlateau):
            monitored = val_loss if has_val else train_loss
            if monitored < best:
                best = monitored
                stall = 0
            else:
                stall += 1
                if stall >= schedule.patience:
                    new_lr = max(lr * schedule.factor, schedule.min_lr)
                    if new_lr < lr:
                        logger.info("epoch %d: reducing learning rate %.2e -> %.2e", epoch, lr, new_lr)
                    lr = new_lr
                    stall = 0

    return params, history
