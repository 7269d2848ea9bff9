"""Métricas de evaluación: RMSE, MAPE, MSE y correlación de Pearson."""

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ModelError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricReport:
    """
    Attributes:
        rmse, mape, mse, r: Métricas.
        mape_excluded: Entradas con verdad 0 excluidas del MAPE.
        r_defined: False si algún vector es constante (r = NaN).
    """

    rmse: float
    mape: float
    mse: float
    r: float
    mape_excluded: int = 0
    r_defined: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def metrics(pred, truth) -> MetricReport:
    """
    Calcula las métricas sobre todas las entradas.

    Args:
        pred: Predicciones.
        truth: Valores reales (misma forma).

    Returns:
        MetricReport.

    Raises:
        ModelError: Formas distintas o arreglos vacíos.
    """
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape or pred.size == 0:
        raise ModelError(f"Formas incompatibles o vacías: {pred.shape} vs {truth.shape}")

    err = pred - truth
    mse = float(np.mean(err ** 2))

    nonzero = truth != 0
    excluded = int((~nonzero).sum())
    if excluded:
        logger.debug("MAPE: %d entradas con verdad 0 excluidas", excluded)
    mape = float(np.mean(np.abs(err[nonzero]) / np.abs(truth[nonzero]))) if nonzero.any() else float("nan")

    p, q = pred.reshape(-1), truth.reshape(-1)
    r_defined = p.size > 1 and np.ptp(p) > 0 and np.ptp(q) > 0
    r = float(np.corrcoef(p, q)[0, 1]) if r_defined else float("nan")

    return MetricReport(
        rmse=float(np.sqrt(mse)),
        mape=mape,
        mse=mse,
        r=r,
        mape_excluded=excluded,
        r_defined=bool(r_defined),
    )
