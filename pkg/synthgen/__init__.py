"""Generadores sintéticos con semilla para las simulaciones de ordenamiento de MSE."""

from .links import GeneratorError, SigmoidLink, CubicLink, LinearLink, TableLink, make_link, draw_task_link
from .seeding import spawn_rngs, spawn_seeds
from .single_index import (
    SingleIndexSpec,
    SingleIndexTruth,
    draw_sparse_theta,
    gen_single_index,
    sample_cluster_z,
    sample_single_index,
)
from .meta_tasks import MetaTaskSpec, MetaTask, MetaTaskSet, gen_meta_tasks
from .covariate_shift import (
    CovariateShiftSpec,
    CovariateShiftTruth,
    gen_covariate_shift,
    check_shift_regime,
    pairing_bandwidth,
    min_cross_label_gap,
)
from .export import export_dataset_csv

__all__ = [
    "GeneratorError",
    "SigmoidLink",
    "CubicLink",
    "LinearLink",
    "TableLink",
    "make_link",
    "draw_task_link",
    "spawn_rngs",
    "spawn_seeds",
    "SingleIndexSpec",
    "SingleIndexTruth",
    "gen_single_index",
    "sample_single_index",
    "draw_sparse_theta",
    "sample_cluster_z",
    "MetaTaskSpec",
    "MetaTask",
    "MetaTaskSet",
    "gen_meta_tasks",
    "CovariateShiftSpec",
    "CovariateShiftTruth",
    "gen_covariate_shift",
    "check_shift_regime",
    "pairing_bandwidth",
    "min_cross_label_gap",
]
