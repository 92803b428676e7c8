"""Campaign configuration: TOML files validated by pydantic models.

A campaign config names the model, error mode, tolerance rows with their
numerical parameters, the two network setups, repetitions and master seed.
See ``mfnnmc/configs/*.toml`` for complete examples.

SCHEMA (top level):
    campaign      str, directory name below the output root
    model         "ode15" | "wave16"
    error_mode    "relative" | "absolute"
    master_seed   int
    repetitions   int >= 1
    moment        int >= 1 (default 1)
    output_dir    optional str
    grid_points   plotting-grid points per dimension (surrogate_grid.csv)
    [budget]      theta, alpha, pilot_samples, hfmc_pilot_samples,
                  calibration_draws, calibration_h
    [nn1], [nn2]  hidden, activation, [nnX.training]
    [[tolerances]] tol, h_lf, h_hf (float | "auto"), m | grid,
                   n_samples (int | "auto"), optional per-row epochs/batch
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .analysis.budget import ErrorMode
from .exceptions import ConfigurationError
from .host.filesystem import content_hash
from .models.catalog import BiFidelitySpec, ModelId, get_model
from .nnet.network import Activation, Architecture
from .nnet.training import FixedSchedule, ReduceOnPlateau, TrainingConfig

Auto = Literal["auto"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class TrainingSection(_Strict):
    epochs: int = Field(ge=1)
    batch_size: int = Field(ge=1)
    learning_rate: float = Field(gt=0)
    validation_fraction: float = Field(default=0.0, ge=0.0, lt=1.0)
    schedule: Literal["fixed", "reduce_on_plateau"] = "fixed"
    patience: int = Field(default=50, ge=1)
    factor: float = Field(default=0.5, gt=0.0, lt=1.0)
    min_lr: float = Field(default=1e-5, ge=0.0)


class NetworkConfig(_Strict):
    hidden: list[int] = Field(min_length=1)
    activation: Activation = Activation.RELU
    training: TrainingSection

    @field_validator("hidden")
    @classmethod
    def _positive_widths(cls, v: list[int]) -> list[int]:
        if any(w < 1 for w in v):
            raise ValueError("hidden widths must be >= 1")
        return v


class BudgetSection(_Strict):
    theta: float = Field(default=0.5, gt=0.0, lt=1.0)
    alpha: float = Field(default=0.01, gt=0.0, lt=1.0)
    pilot_samples: int = Field(default=10_000, ge=2)
    hfmc_pilot_samples: int = Field(default=1_000, ge=2)
    calibration_draws: int = Field(default=50, ge=1)
    calibration_h: Optional[list[float]] = None

    @field_validator("calibration_h")
    @classmethod
    def _calibration_pair(cls, v: Optional[list[float]]) -> Optional[list[float]]:
        if v is not None and (len(v) < 2 or any(h <= 0 for h in v)):
            raise ValueError("calibration_h needs at least two positive step sizes")
        return v


class ToleranceRow(_Strict):
    tol: float = Field(gt=0)
    h_lf: float = Field(gt=0)
    h_hf: Union[float, Auto] = "auto"
    m: Optional[int] = Field(default=None, ge=5)
    grid: Optional[tuple[int, int]] = None
    n_samples: Union[int, Auto] = "auto"
    all_high_fidelity: bool = False
    nn1_epochs: Optional[int] = Field(default=None, ge=1)
    nn1_batch: Optional[int] = Field(default=None, ge=1)
    nn2_epochs: Optional[int] = Field(default=None, ge=1)
    nn2_batch: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check(self) -> "ToleranceRow":
        if self.h_hf != "auto" and self.h_hf > self.h_lf:
            raise ValueError(f"h_hf={self.h_hf} must not exceed h_lf={self.h_lf}")
        if self.h_hf != "auto" and self.h_hf <= 0:
            raise ValueError("h_hf must be positive")
        if self.n_samples != "auto" and self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if self.m is None and self.grid is None:
            raise ValueError("either m (1D design) or grid (2D design) is required")
        if self.grid is not None and min(self.grid) < 3:
            raise ValueError("grid dimensions must be >= 3")
        return self


class CampaignConfig(_Strict):
    campaign: str = Field(min_length=1)
    model: ModelId
    error_mode: ErrorMode
    master_seed: int = Field(ge=0)
    repetitions: int = Field(default=1, ge=1)
    moment: int = Field(default=1, ge=1)
    output_dir: Optional[str] = None
    grid_points: int = Field(default=101, ge=2)
    budget: BudgetSection = BudgetSection()
    nn1: NetworkConfig
    nn2: NetworkConfig
    tolerances: list[ToleranceRow] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_designs(self) -> "CampaignConfig":
        dim = get_model(self.model).dim
        for i, row in enumerate(self.tolerances):
            if dim == 1 and row.m is None:
                raise ValueError(f"tolerances[{i}]: 1D model needs m")
            if dim == 2 and row.grid is None:
                raise ValueError(f"tolerances[{i}]: 2D model needs grid = [n1, n2]")
        tols = [row.tol for row in self.tolerances]
        if len(set(tols)) != len(tols):
            raise ValueError("tolerance values must be distinct")
        return self

    def row(self, tol: float) -> ToleranceRow:
        """Tolerance row matching ``tol`` (relative match to 1e-9)."""
        for r in self.tolerances:
            if abs(r.tol - tol) <= 1e-9 * max(r.tol, tol):
                return r
        raise ConfigurationError(
            f"No tolerance row for {tol:g}",
            {"errors": [{"field": "tol", "error": f"known: {[r.tol for r in self.tolerances]}"}]},
        )

    def architecture(self, which: Literal["nn1", "nn2"]) -> Architecture:
        net = self.nn1 if which == "nn1" else self.nn2
        dim = get_model(self.model).dim
        return Architecture(
            input_width=dim + 1 if which == "nn1" else dim,
            hidden_widths=tuple(net.hidden),
            output_width=1,
            hidden_activation=net.activation,
        )

    def training_config(
        self, which: Literal["nn1", "nn2"], row: ToleranceRow, shuffle_seed: int = 0
    ) -> TrainingConfig:
        t = (self.nn1 if which == "nn1" else self.nn2).training
        epochs = getattr(row, f"{which}_epochs") or t.epochs
        batch = getattr(row, f"{which}_batch") or t.batch_size
        schedule = (
            ReduceOnPlateau(patience=t.patience, factor=t.factor, min_lr=t.min_lr)
            if t.schedule == "reduce_on_plateau"
            else FixedSchedule()
        )
        return TrainingConfig(
            epochs=epochs,
            batch_size=batch,
            learning_rate=t.learning_rate,
            validation_fraction=t.validation_fraction,
            lr_schedule=schedule,
            shuffle_seed=shuffle_seed,
        )

    def bifidelity(self, row: ToleranceRow, h_hf: float) -> BiFidelitySpec:
        model = get_model(self.model)
        spec = BiFidelitySpec(h_lf=row.h_lf, h_hf=h_hf, model_id=self.model, order_q=model.order_q)
        model.check_h(spec.h_lf)
        model.check_h(spec.h_hf)
        return spec

    def echo(self) -> dict:
        """JSON-ready copy of the validated config."""
        return self.model_dump(mode="json")

    def content_hash(self) -> str:
        return content_hash(self.echo())


def _field_errors(error: ValidationError) -> list[dict]:
    return [
        {"field": ".".join(str(p) for p in e["loc"]) or "<root>", "error": e["msg"]}
        for e in error.errors()
    ]


def parse_config(data: dict) -> CampaignConfig:
    """Validate a config mapping.

    Raises:
        ConfigurationError: With one diagnostic per offending field
    """
    try:
        return CampaignConfig.model_validate(data)
    except ValidationError as e:
        errors = _field_errors(e)
        raise ConfigurationError(
            f"Invalid campaign config ({len(errors)} error(s))", {"errors": errors}
        ) from e


def loads_config(text: str) -> CampaignConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(
            "Config is not valid TOML", {"errors": [{"field": "<file>", "error": str(e)}]}
        ) from e
    return parse_config(data)


def load_config(path: str | Path) -> CampaignConfig:
    """Read and validate a TOML campaign config.

    Raises:
        ConfigurationError: If the file is unreadable, not TOML, or fails validation
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(
            f"Cannot read config {p}", {"errors": [{"field": "<file>", "error": str(e)}]}
        ) from e
    return loads_config(text)
