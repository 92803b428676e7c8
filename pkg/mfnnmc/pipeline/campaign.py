"""End-to-end MFNNMC and HFMC runs for one tolerance row and repetition.

MFNNMC STAGES (each failure is re-raised as StageError tagged with the stage):
    reference   quadrature E[Q^k] of the model
    select_h    h_HF from the config or by bias-constant calibration
    design      Y_I / Y_II, written to design.csv
    fidelity    Q_LF on all points, Q_HF on Y_I
    train_nn1   NN1 on Y_I (skipped when M_2 = 0), nn1.ckpt
    augment_hf  Q̂_HF on all points, fidelity.csv
    train_nn2   NN2 on the augmented set, nn2.ckpt
    select_n    N from the config or from a pilot of surrogate evaluations
    estimate    sample mean of Q_MFNN^k over N uniform draws
    artifacts   surrogate_grid.csv and result.json

ARTIFACTS:
    <output root>/<campaign>/<tol label>/rep_<k>/mfnnmc/
    <output root>/<campaign>/<tol label>/rep_<k>/hfmc/

CHECKPOINT REUSE:
    If nn2.ckpt and result.json exist and both carry the current config
    hash, the training stages are skipped and their ledger entries are taken
    from the previous result. Any config change, or a deleted checkpoint,
    forces a full run.

SEEDS:
    Repetition k of a campaign uses run seed master_seed + k, expanded into
    phase seeds by ``derive_seed``.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
import pandas as pd

from ..analysis.budget import (
    ErrorMode,
    ToleranceBudget,
    calibrate_bias_constant,
    select_h_hf,
    select_n_samples,
)
from ..analysis.cost import LedgerCounts, UnitCosts, build_ledger, per_unit
from ..analysis.quadrature import reference_mean
from ..config import CampaignConfig, ToleranceRow
from ..design import (
    PHASE_OFFSETS,
    SampleDesign,
    ScalingTransform,
    all_high_fidelity,
    as_domain,
    build_design_1d,
    build_design_2d,
    derive_seed,
    draw_mc_samples,
)
from ..exceptions import StageError
from ..host.environment import RunLayout, resolve_output_root, tolerance_label
from ..host.filesystem import ensure_dir, read_json, write_json
from ..host.time import PhaseTimer, now_iso
from ..models.catalog import BiFidelitySpec, ForwardModel, get_model
from ..nnet.checkpoint import load_checkpoint, load_checkpoint_extra, save_checkpoint
from ..nnet.training import TrainingHistory
from .estimators import estimate_hfmc, estimate_mfnnmc, sample_mean_variance
from .stages import (
    SOLVER_BLOCK_SIZE,
    augment_hf,
    evaluate_fidelity_data,
    evaluate_points,
    lf_scaling_for,
    surrogate_predict,
    train_nn1,
    train_nn2,
)
from .types import EstimatorResult, Method, SurrogateBundle, fidelity_frame, write_frame

logger = logging.getLogger(__name__)

DESIGN_FILE = "design.csv"
FIDELITY_FILE = "fidelity.csv"
NN1_FILE = "nn1.ckpt"
NN2_FILE = "nn2.ckpt"
RESULT_FILE = "result.json"
GRID_FILE = "surrogate_grid.csv"

MIN_SAMPLES = 2


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Tag any failure inside the block with the stage name."""
    logger.info("stage %s", name)
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, e) from e


@dataclass
class CampaignRun:
    """One (tolerance row, repetition) of a campaign.

    Attributes:
        config: Validated campaign config
        row: Tolerance row being run
        rep: Repetition index
        output_root: Resolved output root
        threads: Worker threads for point evaluations
        reuse: Allow checkpoint reuse when the config hash matches
    """

    config: CampaignConfig
    row: ToleranceRow
    rep: int = 0
    output_root: Path = field(default_factory=lambda: resolve_output_root())
    threads: int = 1
    reuse: bool = True

    @property
    def run_seed(self) -> int:
        return self.config.master_seed + self.rep

    def seed(self, phase: str) -> int:
        return derive_seed(self.run_seed, phase)

    def seeds(self) -> dict[str, int]:
        return {phase: self.seed(phase) for phase in PHASE_OFFSETS}

    @property
    def model(self) -> ForwardModel:
        return get_model(self.config.model)

    @property
    def budget(self) -> ToleranceBudget:
        b = self.config.budget
        return ToleranceBudget(
            tol=self.row.tol, theta=b.theta, alpha=b.alpha, error_mode=self.config.error_mode
        )

    def run_dir(self, method: Method) -> Path:
        layout = RunLayout(root=Path(self.output_root), campaign=self.config.campaign)
        return layout.run_dir(tolerance_label(self.row.tol), self.rep) / method.value.lower()


def make_run(
    config: CampaignConfig,
    tol: Optional[float] = None,
    rep: int = 0,
    output_root: Optional[str | Path] = None,
    threads: int = 1,
    reuse: bool = True,
) -> CampaignRun:
    """Build a CampaignRun; ``tol`` defaults to the first tolerance row."""
    row = config.row(tol) if tol is not None else config.tolerances[0]
    root = resolve_output_root(output_root, config.output_dir)
    return CampaignRun(config=config, row=row, rep=rep, output_root=root, threads=threads, reuse=reuse)


def _select_h(run: CampaignRun, reference: float) -> tuple[float, Optional[float]]:
    """(h_HF, calibrated bias constant or None)."""
    if run.row.h_hf != "auto":
        return float(run.row.h_hf), None
    model = run.model
    b = run.config.budget
    h_values = b.calibration_h or list(model.h_ladder[:2])
    constant = calibrate_bias_constant(model, h_values, b.calibration_draws, run.seed("calibration"))
    h = select_h_hf(run.budget, model.order_q, constant, model.h_ladder, reference)
    logger.info("selected h_HF=%g (bias constant %.4g)", h, constant)
    return h, constant


def _build_design(run: CampaignRun) -> SampleDesign:
    model = run.model
    if model.dim == 1:
        design = build_design_1d(run.row.m, model.domain)
    else:
        design = build_design_2d(run.row.grid[0], run.row.grid[1], model.domain)
    if run.row.all_high_fidelity:
        design = all_high_fidelity(design)
    return design


def _select_n(
    run: CampaignRun,
    evaluate,
    pilot_size: int,
    reference: Optional[float],
    timer: PhaseTimer,
) -> tuple[int, Optional[float]]:
    """(N, pilot variance or None). ``evaluate`` maps points to Q values."""
    if run.row.n_samples != "auto":
        return int(run.row.n_samples), None
    moment = run.config.moment
    pilot = draw_mc_samples(pilot_size, as_domain(run.model.domain), run.seed("pilot"))
    with timer.phase("pilot"):
        values = np.asarray(evaluate(pilot), dtype=np.float64) ** moment
    pilot_mean, variance = sample_mean_variance(values)
    magnitude = reference if reference is not None else pilot_mean
    n = max(MIN_SAMPLES, select_n_samples(run.budget, variance, magnitude))
    logger.info("pilot of %d: variance %.4e -> N=%d", pilot_size, variance, n)
    return n, variance


def _plot_grid(model: ForwardModel, points_per_dim: int) -> np.ndarray:
    d = as_domain(model.domain)
    axes = [np.linspace(lo, hi, points_per_dim) for lo, hi in d]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def _write_surrogate_grid(run: CampaignRun, bundle: SurrogateBundle, path: Path) -> None:
    model = run.model
    points = _plot_grid(model, run.config.grid_points)
    frame = pd.DataFrame({f"y{k + 1}": points[:, k] for k in range(model.dim)})
    frame["q_mfnn"] = surrogate_predict(bundle.nn2, bundle.scaling, points, run.threads)
    frame["q_exact"] = model.qoi_exact(points)
    write_frame(frame, path)


def _training_summary(cfg, history: Optional[TrainingHistory], seconds: float) -> dict:
    return {
        "epochs": cfg.epochs,
        "batch_size": cfg.batch_size,
        "learning_rate": cfg.learning_rate,
        "validation_fraction": cfg.validation_fraction,
        "final_train_loss": history.final_train_loss if history else None,
        "final_val_loss": history.val_loss[-1] if history and history.val_loss else None,
        "train_seconds": seconds,
    }


def _reusable(run: CampaignRun, run_dir: Path, config_hash: str) -> Optional[tuple[SurrogateBundle, dict]]:
    nn2_path, result_path = run_dir / NN2_FILE, run_dir / RESULT_FILE
    if not (run.reuse and nn2_path.exists() and result_path.exists()):
        return None
    prior = read_json(result_path)
    extra = load_checkpoint_extra(nn2_path)
    if prior.get("config_hash") != config_hash or extra.get("config_hash") != config_hash:
        logger.info("config hash changed since %s; retraining", run_dir)
        return None
    nn1_path = run_dir / NN1_FILE
    bundle = SurrogateBundle(
        nn1=load_checkpoint(nn1_path) if nn1_path.exists() else None,
        nn2=load_checkpoint(nn2_path),
        scaling=ScalingTransform.from_dict(extra["scaling"]),
        lf_scaling=ScalingTransform.from_dict(extra["lf_scaling"]) if extra.get("lf_scaling") else None,
    )
    logger.info("reusing checkpoints in %s", run_dir)
    return bundle, prior


def run_mfnnmc(run: CampaignRun) -> EstimatorResult:
    """Steps 1-8 of the MFNNMC algorithm for one tolerance row and repetition.

    Raises:
        StageError: Tagged with the failing stage
    """
    cfg = run.config
    run_dir = ensure_dir(run.run_dir(Method.MFNNMC))
    config_hash = cfg.content_hash()
    timer = PhaseTimer()
    model = run.model
    logger.info("MFNNMC %s tol=%g rep=%d -> %s", cfg.campaign, run.row.tol, run.rep, run_dir)

    with stage("reference"):
        reference = reference_mean(cfg.model, cfg.moment)

    reused = _reusable(run, run_dir, config_hash)
    nn1_cfg = cfg.training_config("nn1", run.row, run.seed("nn1_shuffle"))
    nn2_cfg = cfg.training_config("nn2", run.row, run.seed("nn2_shuffle"))

    if reused is not None:
        bundle, prior = reused
        prov = prior["provenance"]
        h_hf, bias_constant = prov["h_hf"], prov.get("bias_constant")
        counts = prior["cost"]["counts"]
        m, m1, m2 = counts["m"], counts["m1"], counts["m2"]
        units = UnitCosts(**prior["cost"]["units"])
        training = prov["training"]
    else:
        with stage("select_h"):
            h_hf, bias_constant = _select_h(run, reference)
            spec: BiFidelitySpec = cfg.bifidelity(run.row, h_hf)

        with stage("design"):
            design = _build_design(run)
            design.to_csv(run_dir / DESIGN_FILE)

        with stage("fidelity"):
            lf_all, hf_on_I = evaluate_fidelity_data(design, spec, run.threads, timer)

        nn1, nn1_history = None, None
        with stage("train_nn1"):
            if design.m2 > 0:
                with timer.phase("train_nn1"):
                    nn1, nn1_history = train_nn1(
                        design, lf_all, hf_on_I, cfg.architecture("nn1"), nn1_cfg, run.seed("nn1_init")
                    )
                save_checkpoint(nn1, run_dir / NN1_FILE, extra={"config_hash": config_hash})
            else:
                logger.warning("M_2 = 0: NN1 not trained")
                (run_dir / NN1_FILE).unlink(missing_ok=True)

        with stage("augment_hf"):
            augmented = augment_hf(nn1, design, lf_all, hf_on_I, run.threads, timer)
            write_frame(fidelity_frame(design, lf_all, hf_on_I, augmented), run_dir / FIDELITY_FILE)

        with stage("train_nn2"):
            with timer.phase("train_nn2"):
                nn2, nn2_history = train_nn2(augmented, cfg.architecture("nn2"), nn2_cfg, run.seed("nn2_init"))
            scaling = ScalingTransform.from_domain(design.domain)
            lf_scaling = lf_scaling_for(design, lf_all)
            bundle = SurrogateBundle(
                nn1=nn1, nn2=nn2, scaling=scaling, lf_scaling=lf_scaling,
                nn1_history=nn1_history, nn2_history=nn2_history,
            )
            save_checkpoint(
                nn2,
                run_dir / NN2_FILE,
                extra={
                    "config_hash": config_hash,
                    "scaling": scaling.to_dict(),
                    "lf_scaling": lf_scaling.to_dict(),
                },
            )

        m, m1, m2 = design.m, design.m1, design.m2
        units = UnitCosts(
            w_lf=per_unit(timer.get("lf_solves"), m),
            w_hf=per_unit(timer.get("hf_solves"), m1),
            w_t1=timer.get("train_nn1"),
            w_p1=per_unit(timer.get("predict_nn1"), m2),
            w_t2=timer.get("train_nn2"),
        )
        training = {
            "nn1": _training_summary(nn1_cfg, nn1_history, timer.get("train_nn1")) if nn1 else None,
            "nn2": _training_summary(nn2_cfg, nn2_history, timer.get("train_nn2")),
        }

    with stage("select_n"):
        n, pilot_variance = _select_n(
            run,
            lambda p: surrogate_predict(bundle.nn2, bundle.scaling, p, run.threads),
            cfg.budget.pilot_samples,
            reference,
            timer,
        )

    with stage("estimate"):
        samples = draw_mc_samples(n, as_domain(model.domain), run.seed("mc"))
        partial = estimate_mfnnmc(
            bundle.nn2, bundle.scaling, samples, cfg.moment, reference, run.threads, timer
        )
        ledger = build_ledger(
            LedgerCounts(m=m, m1=m1, m2=m2, n=n),
            replace(units, w_p2=partial.cost.units.w_p2),
        )

    with stage("artifacts"):
        provenance = {
            "campaign": cfg.campaign,
            "model": cfg.model.value,
            "error_mode": ErrorMode(cfg.error_mode).value,
            "tol": run.row.tol,
            "rep": run.rep,
            "threads": run.threads,
            "h_lf": run.row.h_lf,
            "h_hf": h_hf,
            "bias_constant": bias_constant,
            "pilot_variance": pilot_variance,
            "n_samples_source": "config" if run.row.n_samples != "auto" else "pilot",
            "training": training,
            "seeds": run.seeds(),
            "reused_checkpoints": reused is not None,
        }
        result = replace(partial, cost=ledger, provenance=provenance)
        _write_surrogate_grid(run, bundle, run_dir / GRID_FILE)
        write_json(run_dir / RESULT_FILE, _result_payload(result, cfg, config_hash, timer))

    logger.info(
        "MFNNMC done: estimate %.8g, reference %.8g, relative error %.3e",
        result.estimate, reference, result.error_rel,
    )
    return result


def run_hfmc(run: CampaignRun) -> EstimatorResult:
    """Classical high-fidelity MC for one tolerance row and repetition.

    Raises:
        StageError: Tagged with the failing stage
    """
    cfg = run.config
    run_dir = ensure_dir(run.run_dir(Method.HFMC))
    timer = PhaseTimer()
    model = run.model
    logger.info("HFMC %s tol=%g rep=%d -> %s", cfg.campaign, run.row.tol, run.rep, run_dir)

    with stage("reference"):
        reference = reference_mean(cfg.model, cfg.moment)

    with stage("select_h"):
        h_hf, bias_constant = _select_h(run, reference)
        spec = cfg.bifidelity(run.row, h_hf)

    with stage("select_n"):
        n, pilot_variance = _select_n(
            run,
            lambda p: evaluate_points(spec.q_hf, p, run.threads, SOLVER_BLOCK_SIZE, "pilot solve"),
            cfg.budget.hfmc_pilot_samples,
            reference,
            timer,
        )

    with stage("estimate"):
        samples = draw_mc_samples(n, as_domain(model.domain), run.seed("mc"))
        result = estimate_hfmc(spec, samples, cfg.moment, reference, run.threads, timer)

    with stage("artifacts"):
        provenance = {
            "campaign": cfg.campaign,
            "model": cfg.model.value,
            "error_mode": ErrorMode(cfg.error_mode).value,
            "tol": run.row.tol,
            "rep": run.rep,
            "threads": run.threads,
            "h_hf": h_hf,
            "bias_constant": bias_constant,
            "pilot_variance": pilot_variance,
            "n_samples_source": "config" if run.row.n_samples != "auto" else "pilot",
            "seeds": run.seeds(),
        }
        result = replace(result, provenance=provenance)
        write_json(run_dir / RESULT_FILE, _result_payload(result, cfg, cfg.content_hash(), timer))

    logger.info("HFMC done: estimate %.8g, reference %.8g", result.estimate, reference)
    return result


def _result_payload(result: EstimatorResult, cfg: CampaignConfig, config_hash: str, timer: PhaseTimer) -> dict:
    payload = result.to_dict()
    payload["config"] = cfg.echo()
    payload["config_hash"] = config_hash
    payload["created_at"] = now_iso()
    payload["process_seconds"] = dict(timer.seconds)
    return payload
