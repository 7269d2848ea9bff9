"""
Normalización de features (min-max) y estandarización opcional de etiquetas.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from data.dataset import Dataset


@dataclass(frozen=True, eq=False)
class FeatureScaler:
    """
    Registro min/max por columna de features.

    Se ajusta sobre entrenamiento y se aplica tal cual a validación y prueba;
    los valores fuera de rango se extrapolan (p. ej. 12 con min=0, max=10 → 1.2).
    """

    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "FeatureScaler":
        features = np.asarray(features, dtype=float)
        return cls(mins=features.min(axis=0), maxs=features.max(axis=0))

    def transform_features(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=float)
        span = self.maxs - self.mins
        constant = span <= 0
        safe_span = np.where(constant, 1.0, span)
        scaled = (features - self.mins) / safe_span
        # Columnas constantes → 0
        scaled[:, constant] = 0.0
        return scaled

    def transform(self, ds: Dataset) -> Dataset:
        return ds.with_features(self.transform_features(ds.features))

    def to_dict(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}


def normalize_minmax(ds: Dataset) -> Tuple[Dataset, FeatureScaler]:
    """
    Reescala cada columna de features a [0, 1]; las etiquetas no se tocan.

    Args:
        ds: Dataset de entrenamiento.

    Returns:
        (dataset normalizado, registro min/max para transformar otros splits)
    """
    scaler = FeatureScaler.fit(ds.features)
    return scaler.transform(ds), scaler


@dataclass(frozen=True, eq=False)
class LabelScaler:
    """Estandarización z de etiquetas; se invierte al calcular métricas."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, labels: np.ndarray) -> "LabelScaler":
        labels = np.asarray(labels, dtype=float)
        std = labels.std(axis=0)
        return cls(mean=labels.mean(axis=0), std=np.where(std > 0, std, 1.0))

    def transform_labels(self, labels: np.ndarray) -> np.ndarray:
        return (np.asarray(labels, dtype=float) - self.mean) / self.std

    def inverse_labels(self, labels: np.ndarray) -> np.ndarray:
        return np.asarray(labels, dtype=float) * self.std + self.mean

    def transform(self, ds: Dataset) -> Dataset:
        return ds.with_labels(self.transform_labels(ds.labels))


def standardize_labels(ds: Dataset) -> Tuple[Dataset, LabelScaler]:
    scaler = LabelScaler.fit(ds.labels)
    return scaler.transform(ds), scaler
