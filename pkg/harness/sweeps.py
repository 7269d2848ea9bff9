"""
Barridos de ancho de banda σ o de α de la Beta, con líneas de referencia
ERM y mixup sobre las mismas semillas.
"""

import logging
import time
from dataclasses import replace
from typing import Any, Dict, List

import numpy as np

from storage.results import ExperimentResult
from .config import ExperimentConfig
from .tabular import run_tabular
from .theorems import POLICIES, run_theorem1, run_theorem3

logger = logging.getLogger(__name__)

# Destino -> (ejecutor, campo de TheoremConfig por parámetro, métrica por política, clave de orden)
_THEOREM_TARGETS = {
    "theorem1": (run_theorem1, {"sigma": "label_sigma", "alpha": "beta_alpha"}, "mse", "ordering_fraction"),
    "theorem3": (run_theorem3, {"sigma": "bandwidth_scale"}, "param_error", "ordering_fraction_param"),
}


def _mean_std(records: List[Dict[str, Any]], key: str = "test_rmse"):
    values = [r[key] for r in records if r.get("status") == "ok" and r.get(key) is not None]
    if not values:
        return None, None
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def run_sweep(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """
    Ejecuta run_tabular por punto de la grilla y emite una tabla lista para
    graficar (parámetro, media, desviación) con las referencias ERM y mixup.
    Con sweep.target theorem1 o theorem3 delega en _run_theorem_sweep.

    Los fallos de un punto se registran y el barrido continúa.
    """
    if cfg.sweep.target in _THEOREM_TARGETS:
        return _run_theorem_sweep(cfg, jobs)
    started = time.perf_counter()
    sweep = cfg.sweep
    parameter = "bandwidth_sigma" if sweep.parameter == "sigma" else "beta_alpha"

    reference_cfg = replace(cfg, kind="tabular-train", arms=("erm", "mixup"))
    reference = run_tabular(reference_cfg, jobs)
    erm_mean, erm_std = _mean_std([r for r in reference.records if r["arm"] == "erm"])
    mixup_mean, mixup_std = _mean_std([r for r in reference.records if r["arm"] == "mixup"])

    records: List[Dict[str, Any]] = []
    table: List[Dict[str, Any]] = []
    for value in sweep.grid:
        point_cfg = replace(cfg, kind="tabular-train", arms=(sweep.arm,),
                            mix=replace(cfg.mix, **{parameter: value}))
        try:
            point = run_tabular(point_cfg, jobs)
        except Exception as e:
            logger.warning("Barrido %s=%g falló: %s", sweep.parameter, value, e)
            records.append({"parameter": sweep.parameter, "value": value, "status": "failed", "error": str(e)})
            table.append({"parameter": sweep.parameter, "value": value, "mean_rmse": None, "std_rmse": None,
                          "erm_mean_rmse": erm_mean, "mixup_mean_rmse": mixup_mean})
            continue
        for r in point.records:
            records.append({**r, "parameter": sweep.parameter, "value": value})
        mean, std = _mean_std(point.records)
        table.append({"parameter": sweep.parameter, "value": value, "mean_rmse": mean, "std_rmse": std,
                      "erm_mean_rmse": erm_mean, "mixup_mean_rmse": mixup_mean})
        logger.info("Barrido %s=%g: RMSE %.4f", sweep.parameter, value, mean if mean is not None else float("nan"))

    for r in reference.records:
        records.append({**r, "parameter": "reference", "value": None})

    return ExperimentResult(
        kind=cfg.kind,
        config=cfg.to_dict(),
        seeds=sorted(cfg.seeds),
        records=records,
        aggregates={"erm": {"mean": erm_mean, "std": erm_std}, "mixup": {"mean": mixup_mean, "std": mixup_std}},
        summary={"parameter": sweep.parameter, "grid": list(sweep.grid), "failed_points": sum(
            1 for r in records if r.get("status") == "failed")},
        table=table,
        wall_clock_seconds=time.perf_counter() - started,
    )


def _run_theorem_sweep(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """
    Repite una simulación de ordenamiento por punto de la grilla.

    σ se traduce en label_sigma (theorem1) o bandwidth_scale (theorem3); α en
    beta_alpha. Cada fila de la tabla trae la fracción de semillas donde se
    cumple el orden y la media de la métrica por política.
    """
    started = time.perf_counter()
    sweep = cfg.sweep
    runner, fields_by_parameter, metric, ordering_key = _THEOREM_TARGETS[sweep.target]
    field_name = fields_by_parameter[sweep.parameter]

    records: List[Dict[str, Any]] = []
    table: List[Dict[str, Any]] = []
    for value in sweep.grid:
        point_cfg = replace(cfg, kind=sweep.target, theorem=replace(cfg.theorem, **{field_name: value}))
        row: Dict[str, Any] = {"parameter": sweep.parameter, "value": value, "ordering_fraction": None}
        row.update({f"mean_{metric}_{p}": None for p in POLICIES})
        try:
            point = runner(point_cfg, jobs)
        except Exception as e:
            logger.warning("Barrido %s %s=%g falló: %s", sweep.target, sweep.parameter, value, e)
            records.append({"parameter": sweep.parameter, "value": value, "status": "failed", "error": str(e)})
            table.append(row)
            continue
        for r in point.records:
            records.append({**r, "parameter": sweep.parameter, "value": value})
        row["ordering_fraction"] = point.summary[ordering_key]
        for policy in POLICIES:
            stats = point.aggregates.get(f"{metric}_{policy}") or {}
            row[f"mean_{metric}_{policy}"] = stats.get("mean")
        table.append(row)
        logger.info("Barrido %s %s=%g: orden en %.0f%% de las semillas", sweep.target, sweep.parameter,
                    value, 100.0 * row["ordering_fraction"])

    return ExperimentResult(
        kind=cfg.kind,
        config=cfg.to_dict(),
        seeds=sorted(cfg.seeds),
        records=records,
        aggregates={},
        summary={"parameter": sweep.parameter, "target": sweep.target, "grid": list(sweep.grid),
                 "failed_points": sum(1 for r in records if r.get("status") == "failed")},
        table=table,
        wall_clock_seconds=time.perf_counter() - started,
    )
