"""MAML de primer orden con aumento MetaMix y emparejamiento C-Mixup."""

from .config import MetaConfig, MetaLearnError, PAIRINGS
from .maml import (
    AugmentedQuery,
    MetaTrainResult,
    MetaEvaluation,
    inner_adapt,
    metamix_query,
    meta_train,
    meta_evaluate,
)

__all__ = [
    "MetaConfig",
    "MetaLearnError",
    "PAIRINGS",
    "AugmentedQuery",
    "MetaTrainResult",
    "MetaEvaluation",
    "inner_adapt",
    "metamix_query",
    "meta_train",
    "meta_evaluate",
]
