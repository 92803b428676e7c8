"""The MFNNMC algorithm and the HFMC baseline.

- types: SurrogateBundle, AugmentedDataset, EstimatorResult
- stages: fidelity data, NN1, augmentation, NN2
- estimators: MFNNMC / HFMC sample means
- campaign: full runs with artifacts
"""

from .campaign import CampaignRun, make_run, run_hfmc, run_mfnnmc
from .estimators import estimate_hfmc, estimate_mfnnmc, pairwise_sum, sample_mean_variance
from .stages import (
    augment_hf,
    evaluate_fidelity_data,
    evaluate_points,
    nn1_features,
    surrogate_predict,
    train_nn1,
    train_nn2,
)
from .types import AugmentedDataset, EstimatorResult, Method, Provenance, SurrogateBundle, fidelity_frame

__all__ = [
    "CampaignRun",
    "make_run",
    "run_hfmc",
    "run_mfnnmc",
    "estimate_hfmc",
    "estimate_mfnnmc",
    "pairwise_sum",
    "sample_mean_variance",
    "augment_hf",
    "evaluate_fidelity_data",
    "evaluate_points",
    "nn1_features",
    "surrogate_predict",
    "train_nn1",
    "train_nn2",
    "AugmentedDataset",
    "EstimatorResult",
    "Method",
    "Provenance",
    "SurrogateBundle",
    "fidelity_frame",
]
