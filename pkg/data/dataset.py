"""
Tipo Dataset: filas de (features, labels, dominio opcional).
Es el universo que consumen todos los muestreadores y entrenadores.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np


class DataError(Exception):
    """Error relacionado con datasets."""
    pass


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Dataset inmutable de regresión.

    Attributes:
        features: Matriz n × d_x.
        labels: Matriz n × d_y (d_y >= 1).
        domain_ids: Identificadores enteros de dominio (longitud n) o None.
        column_names: Nombres de columnas de features (opcional).
    """

    features: np.ndarray
    labels: np.ndarray
    domain_ids: Optional[np.ndarray] = None
    column_names: Optional[List[str]] = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=float)

        if features.ndim == 1:
            features = features.reshape(-1, 1)
        if labels.ndim == 1:
            labels = labels.reshape(-1, 1)
        if features.ndim != 2 or labels.ndim != 2:
            raise DataError("features y labels deben ser matrices 2-D")
        if features.shape[0] != labels.shape[0]:
            raise DataError(
                f"Número de filas distinto: features={features.shape[0]}, labels={labels.shape[0]}"
            )
        if features.shape[0] < 1:
            raise DataError("El dataset debe tener al menos una fila")
        if labels.shape[1] < 1:
            raise DataError("Se requiere al menos una columna de etiquetas")
        if not (np.all(np.isfinite(features)) and np.all(np.isfinite(labels))):
            raise DataError("El dataset contiene valores NaN o infinitos")

        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "labels", _frozen(labels))

        if self.domain_ids is not None:
            domain_ids = np.asarray(self.domain_ids, dtype=int).reshape(-1)
            if domain_ids.shape[0] != features.shape[0]:
                raise DataError(
                    f"domain_ids tiene longitud {domain_ids.shape[0]}, se esperaba {features.shape[0]}"
                )
            domain_ids = domain_ids.copy()
            domain_ids.setflags(write=False)
            object.__setattr__(self, "domain_ids", domain_ids)

        if self.column_names is not None:
            object.__setattr__(self, "column_names", list(self.column_names))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d_x(self) -> int:
        return self.features.shape[1]

    @property
    def d_y(self) -> int:
        return self.labels.shape[1]

    def __len__(self) -> int:
        return self.n

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """
        Extrae las filas indicadas (en ese orden).

        Args:
            indices: Índices de fila.

        Returns:
            Dataset nuevo con las filas seleccionadas.
        """
        idx = np.asarray(indices, dtype=int)
        return Dataset(
            features=self.features[idx],
            labels=self.labels[idx],
            domain_ids=None if self.domain_ids is None else self.domain_ids[idx],
            column_names=self.column_names,
        )

    def with_labels(self, labels: np.ndarray) -> "Dataset":
        return Dataset(self.features, labels, self.domain_ids, self.column_names)

    def with_features(self, features: np.ndarray) -> "Dataset":
        return Dataset(features, self.labels, self.domain_ids, self.column_names)

    @staticmethod
    def concat(parts: Sequence["Dataset"]) -> "Dataset":
        """Concatena datasets por filas; los dominios se conservan solo si todos los tienen."""
        if not parts:
            raise DataError("No hay datasets para concatenar")
        has_domains = all(p.domain_ids is not None for p in parts)
        return Dataset(
            features=np.vstack([p.features for p in parts]),
            labels=np.vstack([p.labels for p in parts]),
            domain_ids=np.concatenate([p.domain_ids for p in parts]) if has_domains else None,
            column_names=parts[0].column_names,
        )
