"""Campaign-level reports built from persisted ``result.json`` files.

REPORTS (written into the campaign directory):
- compliance.csv: one row per (method, tolerance) with the compliance verdict
- costs.csv: one row per (method, tolerance) with mean ledger terms and totals
- cost_points.csv: log-log cost points and fitted lines per cost series
- slopes.json: fitted cost-vs-tolerance slopes per cost series
- table<k>.csv: the run-parameter / training tables (1, 2 for the ODE,
  3, 4 for the wave equation)

Reports only read artifacts; nothing here runs a solver or a network.
"""

from __future__ import annotations

import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
import pandas as pd
from dateutil import parser as date_parser

from .analysis.budget import ToleranceBudget
from .analysis.compliance import ComplianceReport, check_tolerance_compliance
from .analysis.cost import LEDGER_TERMS, fit_cost_line
from .config import CampaignConfig
from .exceptions import ArtifactNotFound, InputError
from .host.environment import RunLayout, tolerance_label
from .host.filesystem import read_json, write_json
from .models.catalog import ModelId
from .pipeline.campaign import RESULT_FILE
from .pipeline.types import EstimatorResult, Method, write_frame

logger = logging.getLogger(__name__)

COMPLIANCE_FILE = "compliance.csv"
COSTS_FILE = "costs.csv"
COST_POINTS_FILE = "cost_points.csv"
SLOPES_FILE = "slopes.json"

TABLE_MODELS = {1: ModelId.ODE15, 2: ModelId.ODE15, 3: ModelId.WAVE16, 4: ModelId.WAVE16}

TABLE_COLUMNS = {
    "run": ["eps_tol", "N", "h_HF", "W_HF", "h_LF", "W_LF"],
    "training": [
        "eps_tol", "M_1", "M_2",
        "NN1_N_epoch", "NN1_N_batch", "W_T1", "W_P1",
        "NN2_N_epoch", "NN2_N_batch", "W_T2", "W_P2",
    ],
}


def find_results(campaign_dir: str | Path, method: Method) -> list[Path]:
    """All result files of one method below a campaign directory, sorted."""
    root = Path(campaign_dir)
    return sorted(root.glob(f"*/rep_*/{method.value.lower()}/{RESULT_FILE}"))


def missing_runs(campaign_dir: str | Path, config: CampaignConfig, method: Method) -> list[str]:
    """Expected run directories (tolerance × repetition) lacking a result file."""
    layout = RunLayout(root=Path(campaign_dir).parent, campaign=Path(campaign_dir).name)
    missing = []
    for row in config.tolerances:
        for rep in range(config.repetitions):
            path = layout.run_dir(tolerance_label(row.tol), rep) / method.value.lower() / RESULT_FILE
            if not path.exists():
                missing.append(str(path.parent))
    return missing


def _flatten(payload: dict, path: Path) -> dict:
    prov = payload.get("provenance", {})
    cost = payload.get("cost") or {}
    counts = cost.get("counts", {})
    units = cost.get("units", {})
    terms = cost.get("terms", {})
    training = prov.get("training") or {}
    nn1 = training.get("nn1") or {}
    nn2 = training.get("nn2") or {}
    created = payload.get("created_at")
    return {
        "method": payload["method"],
        "model": prov.get("model"),
        "error_mode": prov.get("error_mode"),
        "tol": prov.get("tol"),
        "rep": prov.get("rep"),
        "estimate": payload["estimate"],
        "sample_variance": payload["sample_variance"],
        "reference": payload.get("reference"),
        "error_abs": payload.get("error_abs"),
        "error_rel": payload.get("error_rel"),
        "n_samples": payload["n_samples"],
        "h_hf": prov.get("h_hf"),
        "h_lf": prov.get("h_lf"),
        "m": counts.get("m"),
        "m1": counts.get("m1"),
        "m2": counts.get("m2"),
        **units,
        **terms,
        "mfnnmc_total": cost.get("mfnnmc_total"),
        "hfmc_total": cost.get("hfmc_total"),
        "nn1_epochs": nn1.get("epochs"),
        "nn1_batch": nn1.get("batch_size"),
        "nn2_epochs": nn2.get("epochs"),
        "nn2_batch": nn2.get("batch_size"),
        "created_at": date_parser.isoparse(created) if created else pd.NaT,
        "config_hash": payload.get("config_hash"),
        "path": str(path.parent),
    }


def _created(payload: dict) -> datetime:
    created = payload.get("created_at")
    return date_parser.isoparse(created) if created else datetime.min.replace(tzinfo=timezone.utc)


def drop_stale(items: list[tuple[dict, Path]], campaign_dir: str | Path) -> list[tuple[dict, Path]]:
    """Keep the results written under the config of the newest result.

    A campaign directory can hold runs of an earlier edit of the same config;
    those carry a different config_hash and are skipped with a warning.
    """
    if not items:
        return items
    newest, _ = max(items, key=lambda item: _created(item[0]))
    current = newest.get("config_hash")
    kept = [item for item in items if item[0].get("config_hash") == current]
    if len(kept) < len(items):
        logger.warning(
            "skipping %d result(s) below %s written under another config (current hash %s)",
            len(items) - len(kept), campaign_dir, (current or "none")[:12],
        )
    return kept


def _load(campaign_dir: str | Path, methods: Iterable[Method]) -> list[tuple[dict, Path]]:
    items = [(read_json(p), p) for method in methods for p in find_results(campaign_dir, method)]
    return drop_stale(items, campaign_dir)


def collect_results(campaign_dir: str | Path, methods: Iterable[Method] = tuple(Method)) -> pd.DataFrame:
    """One row per persisted run, sorted by method, tolerance (descending) and repetition.

    Only results sharing the newest result's config hash are included.

    Raises:
        ArtifactNotFound: If no result file exists for any of the methods
    """
    rows = [_flatten(payload, p) for payload, p in _load(campaign_dir, methods)]
    if not rows:
        raise ArtifactNotFound(
            f"No run results below {campaign_dir}", missing=[str(campaign_dir)]
        )
    frame = pd.DataFrame(rows)
    return frame.sort_values(["method", "tol", "rep"], ascending=[True, False, True], ignore_index=True)


def compliance_reports(campaign_dir: str | Path) -> list[tuple[Method, ComplianceReport]]:
    """Compliance per (method, tolerance) with the budget echoed in each result."""
    reports = []
    payloads = _load(campaign_dir, Method)
    for method in Method:
        by_tol: dict[float, list[dict]] = {}
        for payload, _ in payloads:
            if payload["method"] == method.value:
                by_tol.setdefault(payload["provenance"]["tol"], []).append(payload)
        for tol in sorted(by_tol, reverse=True):
            group = by_tol[tol]
            echo = group[0]["config"]
            budget = ToleranceBudget(
                tol=tol,
                theta=echo["budget"]["theta"],
                alpha=echo["budget"]["alpha"],
                error_mode=echo["error_mode"],
            )
            results = [EstimatorResult.from_dict(p) for p in group]
            reports.append((method, check_tolerance_compliance(results, budget)))
    return reports


def write_compliance(campaign_dir: str | Path) -> Path:
    """compliance.csv for every (method, tolerance) with persisted runs.

    Raises:
        ArtifactNotFound: If the campaign has no results
    """
    reports = compliance_reports(campaign_dir)
    if not reports:
        raise ArtifactNotFound(f"No run results below {campaign_dir}", missing=[str(campaign_dir)])
    frame = pd.DataFrame([
        {"method": m.value, **{k: v for k, v in r.to_dict().items() if k != "errors"},
         "max_error": max(r.errors)}
        for m, r in reports
    ])
    for method, report in reports:
        logger.info(
            "%s tol=%g: %d/%d compliant (need %d) -> %s",
            method.value, report.tol, report.n_compliant, report.n_runs, report.required,
            "PASS" if report.passed else "FAIL",
        )
    return write_frame(frame, Path(campaign_dir) / COMPLIANCE_FILE)


def cost_summary(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean cost terms per (method, tolerance)."""
    value_cols = [c for c in (*LEDGER_TERMS, "mfnnmc_total", "hfmc_total", "n_samples") if c in frame]
    summary = (
        frame.groupby(["method", "tol"], sort=False)
        .agg(runs=("rep", "count"), first_run=("created_at", "min"), last_run=("created_at", "max"),
             **{c: (c, "mean") for c in value_cols})
        .reset_index()
    )
    return summary.sort_values(["method", "tol"], ascending=[True, False], ignore_index=True)


def cost_series(summary: pd.DataFrame) -> dict[str, list[tuple[float, float]]]:
    """(tol, cost) points per series.

    HFMC cost comes from HFMC runs when present, else from N·W_HF of the
    MFNNMC ledgers (same N, W_HF measured on the M_1 solves).
    """
    series: dict[str, list[tuple[float, float]]] = {}
    mf = summary[summary["method"] == Method.MFNNMC.value]
    hf = summary[summary["method"] == Method.HFMC.value]
    if not mf.empty:
        series["mfnnmc_total"] = list(zip(mf["tol"], mf["mfnnmc_total"]))
        series["mfnnmc_prediction"] = list(zip(mf["tol"], mf["predict_nn2"]))
        series["mfnnmc_training"] = list(zip(mf["tol"], mf["mfnnmc_total"] - mf["predict_nn2"]))
    if not hf.empty:
        series["hfmc_total"] = list(zip(hf["tol"], hf["hfmc_total"]))
    elif not mf.empty:
        series["hfmc_total"] = list(zip(mf["tol"], mf["hfmc_total"]))
    return {k: [(float(t), float(c)) for t, c in v] for k, v in series.items()}


def compare(campaign_dir: str | Path) -> dict[str, Optional[float]]:
    """Write costs.csv, cost_points.csv and slopes.json; return the slopes.

    Series with fewer than two tolerances or non-positive costs get no slope.

    Raises:
        ArtifactNotFound: If the campaign has no results
    """
    campaign_dir = Path(campaign_dir)
    summary = cost_summary(collect_results(campaign_dir))
    write_frame(summary, campaign_dir / COSTS_FILE)

    slopes: dict[str, Optional[float]] = {}
    point_rows = []
    for name, points in cost_series(summary).items():
        for tol, cost in points:
            point_rows.append(_point_row(name, "measured", tol, cost))
        try:
            slope, intercept = fit_cost_line(points)
        except InputError as e:
            logger.warning("no slope for %s: %s", name, e.message)
            slopes[name] = None
            continue
        slopes[name] = slope
        for tol, _ in points:
            point_rows.append(_point_row(name, "fit", tol, float(np.exp(intercept + slope * np.log(1.0 / tol)))))
        logger.info("cost slope %s: %.3f", name, slope)

    write_frame(pd.DataFrame(point_rows, columns=["series", "kind", "tol", "cost", "log_inv_tol", "log_cost"]),
                campaign_dir / COST_POINTS_FILE)
    write_json(campaign_dir / SLOPES_FILE, {"slopes": slopes})
    return slopes


def _point_row(series: str, kind: str, tol: float, cost: float) -> dict:
    return {
        "series": series,
        "kind": kind,
        "tol": tol,
        "cost": cost,
        "log_inv_tol": float(np.log(1.0 / tol)),
        "log_cost": float(np.log(cost)) if cost > 0 else float("nan"),
    }


def _table_frame(frame: pd.DataFrame, table_id: int) -> pd.DataFrame:
    grouped = frame.groupby("tol", sort=False)
    if table_id in (1, 3):
        out = grouped.agg(
            N=("n_samples", "mean"), h_HF=("h_hf", "first"), W_HF=("w_hf", "mean"),
            h_LF=("h_lf", "first"), W_LF=("w_lf", "mean"),
        )
        out["N"] = out["N"].round().astype(int)
    else:
        out = grouped.agg(
            M_1=("m1", "first"), M_2=("m2", "first"),
            NN1_N_epoch=("nn1_epochs", "first"), NN1_N_batch=("nn1_batch", "first"),
            W_T1=("w_t1", "mean"), W_P1=("w_p1", "mean"),
            NN2_N_epoch=("nn2_epochs", "first"), NN2_N_batch=("nn2_batch", "first"),
            W_T2=("w_t2", "mean"), W_P2=("w_p2", "mean"),
        )
    out = out.reset_index().rename(columns={"tol": "eps_tol"})
    kind = "run" if table_id in (1, 3) else "training"
    return out[TABLE_COLUMNS[kind]].sort_values("eps_tol", ascending=False, ignore_index=True)


def emit_table(
    campaign_dir: str | Path,
    table_id: int,
    config: Optional[CampaignConfig] = None,
) -> Path:
    """Write table<k>.csv from the MFNNMC runs of a campaign.

    Timing columns are machine-local measurements.

    Raises:
        InputError: If table_id is not 1-4 or the campaign ran a different model
        ArtifactNotFound: If runs are missing (all expected runs when a config
            is given); no CSV is written in that case
    """
    if table_id not in TABLE_MODELS:
        raise InputError(f"Unknown table id {table_id}", {"known": sorted(TABLE_MODELS)})
    campaign_dir = Path(campaign_dir)
    if config is not None:
        absent = missing_runs(campaign_dir, config, Method.MFNNMC)
        if absent:
            raise ArtifactNotFound(f"{len(absent)} run(s) missing below {campaign_dir}", missing=absent)
    frame = collect_results(campaign_dir, methods=(Method.MFNNMC,))
    models = set(frame["model"].dropna())
    expected = TABLE_MODELS[table_id].value
    if models != {expected}:
        raise InputError(
            f"Table {table_id} needs runs of model {expected!r}",
            {"found": sorted(models)},
        )
    return write_frame(_table_frame(frame, table_id), campaign_dir / f"table{table_id}.csv")
