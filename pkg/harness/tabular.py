"""
Experimentos tabulares: entrenamiento por brazo con selección por la mejor
época de validación y robustez a ruido de etiquetas.
"""

import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from data import Dataset, inject_label_noise, load_csv, split
from data.preprocessing import FeatureScaler
from mixer import MixPolicy, build_pair_table
from models import DivergenceError, metrics
from storage.results import ExperimentResult, aggregate
from synthgen import CovariateShiftSpec, SingleIndexSpec, gen_covariate_shift, gen_single_index
from .config import ConfigError, ExperimentConfig, ExperimentError
from .parallel import run_seeds
from .trainer import arm_policy, train_fcn

logger = logging.getLogger(__name__)

# Fracción por defecto del experimento de ruido (30% de la desviación estándar)
DEFAULT_NOISE_FRACTION = 0.3

METRIC_KEYS = ("test_rmse", "test_mape", "best_val_rmse")


def load_source(cfg: ExperimentConfig, seed: int) -> Dataset:
    """Dataset completo desde disco o desde un generador sintético."""
    ds_cfg = cfg.dataset
    if ds_cfg.path is not None:
        return load_csv(cfg.dataset_path(), list(ds_cfg.label_columns), ds_cfg.domain_column)
    options = dict(ds_cfg.synthetic)
    generator = options.pop("generator")
    # Los datos sintéticos se fijan por la semilla propia del generador si se declara
    options.setdefault("seed", seed)
    try:
        if generator == "single-index":
            return gen_single_index(SingleIndexSpec(**options))[0]
        train, _, _ = gen_covariate_shift(CovariateShiftSpec(**options), flip_test=False)
        return train
    except TypeError as e:
        raise ConfigError(f"dataset.synthetic inválido: {e}")


def prepare_splits(cfg: ExperimentConfig, seed: int) -> Tuple[Dataset, Optional[Dataset], Optional[Dataset]]:
    """
    Carga, parte, inyecta ruido en el entrenamiento y normaliza features
    con min-max ajustado solo en entrenamiento.
    """
    ds_cfg = cfg.dataset
    full = load_source(cfg, seed)
    train, val, test = split(full, ds_cfg.split_spec(seed))
    if train is None:
        raise ConfigError("La partición de entrenamiento quedó vacía")

    fraction = ds_cfg.noise_std_fraction
    if cfg.kind == "noise-robustness" and fraction == 0:
        fraction = DEFAULT_NOISE_FRACTION
    if fraction > 0:
        train = inject_label_noise(train, fraction, seed)

    if ds_cfg.normalize_features:
        scaler = FeatureScaler.fit(train.features)
        train = scaler.transform(train)
        val = scaler.transform(val) if val is not None else None
        test = scaler.transform(test) if test is not None else None
    return train, val, test


def run_tabular_seed(cfg: ExperimentConfig, seed: int) -> List[Dict[str, Any]]:
    """Todos los brazos de una semilla sobre la misma partición."""
    train, val, test = prepare_splits(cfg, seed)
    records = []
    for arm in cfg.arms:
        record: Dict[str, Any] = {"seed": seed, "arm": arm}
        try:
            outcome = train_fcn(
                train, val, arm_policy(arm, cfg.mix), cfg.training, seed,
                standardize_labels=cfg.dataset.standardize_labels,
                pair_on_standardized_labels=cfg.dataset.pair_on_standardized_labels,
            )
        except DivergenceError as e:
            logger.warning("Semilla %d, brazo %s: divergencia en el paso %s", seed, arm, e.step)
            record.update({"status": "diverged", "error": str(e), "step": e.step})
            records.append(record)
            continue

        evaluation = test if test is not None else val
        report = metrics(outcome.predict(evaluation.features), evaluation.labels) if evaluation is not None else None
        record.update({
            "status": "ok",
            "test_rmse": report.rmse if report else None,
            "test_mape": report.mape if report else None,
            "mape_excluded": report.mape_excluded if report else 0,
            "best_epoch": outcome.best_epoch,
            "best_val_rmse": outcome.best_val_rmse,
            "train_losses": outcome.train_losses,
            "val_rmse": outcome.val_rmse,
        })
        logger.info(
            "Semilla %d, brazo %s: RMSE de prueba %.4f (época %d)",
            seed, arm, record["test_rmse"] if record["test_rmse"] is not None else float("nan"), outcome.best_epoch,
        )
        records.append(record)
    return records


def run_tabular(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """
    Entrena la red por brazo y semilla; reporta RMSE/MAPE de prueba en la
    mejor época de validación, por semilla y agregados por brazo.

    Los fallos por divergencia se registran y la corrida sigue con las
    demás semillas.

    Raises:
        ExperimentError: Todas las corridas (brazo, semilla) divergieron.
    """
    started = time.perf_counter()
    records = run_seeds(run_tabular_seed, cfg, cfg.seeds, jobs)
    if all(r["status"] == "diverged" for r in records):
        raise ExperimentError(f"Las {len(records)} corridas (brazo, semilla) divergieron; no hay resultados")
    aggregates = aggregate(records, METRIC_KEYS, group_by="arm")
    summary = {
        "diverged": sum(1 for r in records if r["status"] != "ok"),
        "mean_test_rmse": {arm: stats.get("test_rmse", {}).get("mean") for arm, stats in aggregates.items()},
    }
    return ExperimentResult(
        kind=cfg.kind,
        config=cfg.to_dict(),
        seeds=sorted(cfg.seeds),
        records=records,
        aggregates=aggregates,
        summary=summary,
        wall_clock_seconds=time.perf_counter() - started,
    )


def run_noise(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Mismo protocolo que run_tabular con ruido gaussiano en las etiquetas de entrenamiento."""
    return run_tabular(cfg, jobs)


def dump_pair_table(cfg: ExperimentConfig, path) -> Path:
    """
    Exporta la tabla de pares del primer brazo de C-Mixup (o de etiquetas por
    defecto) sobre el entrenamiento de la primera semilla.
    """
    train, _, _ = prepare_splits(cfg, cfg.seeds[0])
    policy = None
    for arm in cfg.arms:
        candidate = arm_policy(arm, cfg.mix)
        if candidate is not None and candidate.metric != "uniform" and not candidate.requires_representations:
            policy = candidate
            break
    if policy is None:
        policy = MixPolicy(metric="label", bandwidth_sigma=cfg.mix.bandwidth_sigma, beta_alpha=cfg.mix.beta_alpha)
    table = build_pair_table(train, policy, keep_distances=True)
    return table.to_csv(path)
