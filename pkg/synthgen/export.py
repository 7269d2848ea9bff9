"""Exportación CSV de datasets generados."""

import logging
from pathlib import Path
from typing import Union

import pandas as pd

from data.dataset import Dataset

logger = logging.getLogger(__name__)


def export_dataset_csv(ds: Dataset, path: Union[str, Path]) -> Path:
    """
    Escribe x_0..x_{d-1}, y_0..y_{k-1} y, si existe, domain.

    La salida es legible por data.loader.load_csv.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(ds.features, columns=ds.column_names or [f"x_{j}" for j in range(ds.d_x)])
    for j in range(ds.d_y):
        frame[f"y_{j}"] = ds.labels[:, j]
    if ds.domain_ids is not None:
        frame["domain"] = ds.domain_ids
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info("Dataset exportado a %s (%d filas)", path, ds.n)
    return path
