"""Experimento de meta-aprendizaje: MAML, MetaMix y MetaMix con C-Mixup."""

import logging
import time
from typing import Any, Dict, List

from metalearn import MetaConfig, MetaLearnError, meta_evaluate, meta_train
from models import DivergenceError
from storage.results import ExperimentResult, aggregate
from synthgen import GeneratorError, MetaTaskSpec, gen_meta_tasks
from .config import ConfigError, ExperimentConfig
from .parallel import run_seeds

logger = logging.getLogger(__name__)


def _meta_specs(cfg: ExperimentConfig, seed: int):
    try:
        spec = MetaTaskSpec(**{**cfg.meta.generator, "seed": seed})
        base = MetaConfig(**cfg.meta.maml)
    except (TypeError, GeneratorError, MetaLearnError) as e:
        raise ConfigError(f"meta inválido: {e}")
    return spec, base


def run_meta_seed(cfg: ExperimentConfig, seed: int) -> List[Dict[str, Any]]:
    spec, base = _meta_specs(cfg, seed)
    tasks = gen_meta_tasks(spec)
    records = []
    for pairing in cfg.meta.pairings:
        maml_cfg = base.with_changes(pairing=pairing, support_shots=spec.support_shots,
                                     query_shots=spec.query_shots)
        record: Dict[str, Any] = {"seed": seed, "pairing": pairing}
        try:
            trained = meta_train(tasks.train_tasks, maml_cfg, seed)
        except DivergenceError as e:
            logger.warning("Semilla %d, pairing %s: divergencia en la iteración %s", seed, pairing, e.step)
            record.update({"status": "diverged", "error": str(e)})
            records.append(record)
            continue
        evaluation = meta_evaluate(trained.model, tasks.target_tasks, maml_cfg)
        record.update({"status": "ok", **evaluation.to_dict(), "outer_losses": trained.outer_losses})
        logger.info("Meta, semilla %d, %s: MSE %.4f ± %.4f", seed, pairing, evaluation.mean_mse, evaluation.half_width)
        records.append(record)
    return records


def run_meta(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Entrena y evalúa una inicialización por modo de emparejamiento y semilla."""
    _meta_specs(cfg, cfg.seeds[0])
    started = time.perf_counter()
    records = run_seeds(run_meta_seed, cfg, cfg.seeds, jobs)
    aggregates = aggregate(records, ("mean_mse", "half_width"), group_by="pairing")
    summary = {"mean_mse": {p: s.get("mean_mse", {}).get("mean") for p, s in aggregates.items()}}
    return ExperimentResult(
        kind=cfg.kind,
        config=cfg.to_dict(),
        seeds=sorted(cfg.seeds),
        records=records,
        aggregates=aggregates,
        summary=summary,
        wall_clock_seconds=time.perf_counter() - started,
    )
