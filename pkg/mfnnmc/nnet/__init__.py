"""From-scratch dense feedforward networks.

- network: Architecture, NetworkParams, init_network, forward, loss_and_gradient
- optim: AdamState, adam_step
- training: TrainingConfig, train
- checkpoint: portable bit-exact save/load
"""

from .network import (
    Activation,
    Architecture,
    NetworkParams,
    batch_loss_and_gradient,
    forward,
    forward_batch,
    init_network,
    loss_and_gradient,
)
from .optim import AdamState, adam_step
from .training import FixedSchedule, ReduceOnPlateau, TrainingConfig, TrainingHistory, train
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "Activation",
    "Architecture",
    "NetworkParams",
    "batch_loss_and_gradient",
    "forward",
    "forward_batch",
    "init_network",
    "loss_and_gradient",
    "AdamState",
    "adam_step",
    "FixedSchedule",
    "ReduceOnPlateau",
    "TrainingConfig",
    "TrainingHistory",
    "train",
    "load_checkpoint",
    "save_checkpoint",
]
