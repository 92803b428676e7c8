"""Pytest fixtures for mfnnmc tests."""

import pytest

from mfnnmc.config import parse_config
from mfnnmc.design import build_design_1d, build_design_2d
from mfnnmc.host.environment import OUTPUT_ROOT_ENV
from mfnnmc.nnet.network import Architecture
from mfnnmc.nnet.training import TrainingConfig


@pytest.fixture(autouse=True)
def isolated_output_root(tmp_path, monkeypatch):
    """Point the output root at a per-test directory.

    Keeps campaign artifacts of one test from being reused by another and
    keeps ./runs clean.
    """
    root = tmp_path / "runs"
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(root))
    yield root


@pytest.fixture
def ode_design():
    """The 241-point ODE design (61 in Y_I, 180 in Y_II)."""
    return build_design_1d(241, [-1.0, 1.0])


@pytest.fixture
def small_ode_design():
    """A 21-point ODE design, small enough to train on in milliseconds."""
    return build_design_1d(21, [-1.0, 1.0])


@pytest.fixture
def small_wave_design():
    return build_design_2d(5, 9, [[10.0, 11.0], [4.0, 6.0]])


@pytest.fixture
def tiny_arch_1d():
    return Architecture(input_width=1, hidden_widths=(8, 8), output_width=1)


@pytest.fixture
def tiny_training():
    return TrainingConfig(epochs=5, batch_size=4, learning_rate=0.01)


def tiny_campaign_data(**overrides) -> dict:
    """Raw config mapping for a fast ODE campaign.

    Small networks, a coarse h_HF and a fixed N keep one run well under a
    second while still passing through every stage.
    """
    data = {
        "campaign": "tiny_ode",
        "model": "ode15",
        "error_mode": "relative",
        "master_seed": 7,
        "repetitions": 2,
        "grid_points": 11,
        "budget": {"theta": 0.5, "alpha": 0.01, "pilot_samples": 200, "hfmc_pilot_samples": 50},
        "nn1": {
            "hidden": [8, 8],
            "activation": "relu",
            "training": {"epochs": 3, "batch_size": 4, "learning_rate": 0.01},
        },
        "nn2": {
            "hidden": [8, 8],
            "activation": "relu",
            "training": {"epochs": 3, "batch_size": 8, "learning_rate": 0.01},
        },
        "tolerances": [
            {"tol": 0.1, "h_lf": 0.5, "h_hf": 0.25, "m": 21, "n_samples": 500},
            {"tol": 0.05, "h_lf": 0.5, "h_hf": 0.25, "m": 41, "n_samples": 1000},
        ],
    }
    data.update(overrides)
    return data


@pytest.fixture
def campaign_data():
    """Factory for raw tiny-campaign mappings with keyword overrides."""
    return tiny_campaign_data


@pytest.fixture
def tiny_config():
    return parse_config(tiny_campaign_data())
