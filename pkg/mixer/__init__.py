"""Muestreo de pares por kernel, sorteo de λ e interpolación (mixup y C-Mixup)."""

from .policy import MixPolicy, MixerError, parse_site, METRICS, SCOPES
from .kernel import PairDistribution, pairwise_sq_distance, kernel_pmf, kernel_weights
from .pairing import PairTable, build_pair_table, metric_matrix, sample_partners
from .sampling import (
    MixedBatch,
    sample_beta,
    sample_beta_many,
    mix_pair,
    draw_mixed_batch,
    draw_mixed_batch_pairwise,
    pairwise_pmf,
)

__all__ = [
    "MixPolicy",
    "MixerError",
    "parse_site",
    "METRICS",
    "SCOPES",
    "PairDistribution",
    "pairwise_sq_distance",
    "kernel_pmf",
    "kernel_weights",
    "PairTable",
    "build_pair_table",
    "metric_matrix",
    "sample_partners",
    "MixedBatch",
    "sample_beta",
    "sample_beta_many",
    "mix_pair",
    "draw_mixed_batch",
    "draw_mixed_batch_pairwise",
    "pairwise_pmf",
]
