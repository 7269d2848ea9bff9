"""Orquestación de experimentos: configuración, entrenamiento, simulaciones y diagnósticos."""

from .config import ConfigError, ExperimentConfig, ExperimentError, KINDS, ARMS, config_from_dict, load_config
from .trainer import TrainOutcome, arm_policy, train_fcn
from .tabular import run_tabular, run_noise, dump_pair_table
from .theorems import run_theorem1, run_theorem3, validate_theorem3
from .invariance import InvarianceReport, invariance_score, run_invariance
from .sweeps import run_sweep
from .meta import run_meta

RUNNERS = {
    "tabular-train": run_tabular,
    "noise-robustness": run_noise,
    "theorem1": run_theorem1,
    "theorem3": run_theorem3,
    "meta": run_meta,
    "bandwidth-sweep": run_sweep,
    "alpha-sweep": run_sweep,
    "invariance": run_invariance,
}


def run_experiment(cfg: ExperimentConfig, jobs: int = 1):
    """Despacha la configuración a su ejecutor."""
    return RUNNERS[cfg.kind](cfg, jobs)


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentError",
    "KINDS",
    "ARMS",
    "config_from_dict",
    "load_config",
    "TrainOutcome",
    "arm_policy",
    "train_fcn",
    "run_tabular",
    "run_noise",
    "dump_pair_table",
    "run_theorem1",
    "run_theorem3",
    "validate_theorem3",
    "InvarianceReport",
    "invariance_score",
    "run_invariance",
    "run_sweep",
    "run_meta",
    "RUNNERS",
    "run_experiment",
]
