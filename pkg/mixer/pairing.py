"""
Tabla de pares: una pmf por ancla calculada una vez antes de entrenar
(alcance "full") o por cada par de lotes (alcance "batch").
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

import numpy as np
import pandas as pd

from data.dataset import Dataset
from mixer.kernel import PairDistribution, kernel_weights, pairwise_sq_distance
from mixer.policy import MixerError, MixPolicy

logger = logging.getLogger(__name__)

# Filas de anclas procesadas por bloque al construir la tabla
_ROW_BLOCK = 512


def metric_matrix(ds: Dataset, metric: str, representations: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Matriz sobre la que se miden distancias según la métrica.

    Args:
        ds: Dataset.
        metric: Una de las métricas de MixPolicy.
        representations: Estados ocultos n × h (métricas "representation*").

    Returns:
        Matriz n × d de coordenadas; para "uniform", una columna de ceros.
    """
    if metric == "uniform":
        return np.zeros((ds.n, 1))
    if metric == "label":
        return ds.labels
    if metric == "feature":
        return ds.features
    if metric == "feature-concat-label":
        return np.hstack([ds.features, ds.labels])
    if representations is None:
        raise MixerError(f"La métrica {metric!r} requiere representaciones de un modelo entrenado")
    representations = np.asarray(representations, dtype=float)
    if representations.ndim != 2 or representations.shape[0] != ds.n:
        raise MixerError(
            f"Las representaciones deben tener {ds.n} filas, se recibió {representations.shape}"
        )
    if metric == "representation":
        return representations
    if metric == "representation-concat-label":
        return np.hstack([representations, ds.labels])
    raise MixerError(f"Métrica desconocida: {metric!r}")


@dataclass(frozen=True, eq=False)
class PairTable:
    """
    Tabla densa de pmfs: fila r = ancla anchor_indices[r], columna c =
    candidato candidate_indices[c]. Inmutable y compartible entre hilos.
    """

    anchor_indices: np.ndarray
    candidate_indices: np.ndarray
    pmf: np.ndarray
    distances: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("anchor_indices", "candidate_indices", "pmf", "distances"):
            value = getattr(self, name)
            if value is not None:
                value = np.array(value, copy=True)
                value.setflags(write=False)
                object.__setattr__(self, name, value)
        object.__setattr__(self, "_positions", {int(a): r for r, a in enumerate(self.anchor_indices)})

    def __len__(self) -> int:
        return len(self.anchor_indices)

    def __iter__(self) -> Iterator[PairDistribution]:
        for r in range(len(self)):
            yield self._row_at(r)

    def __getitem__(self, position: int) -> PairDistribution:
        return self._row_at(position)

    def _row_at(self, r: int) -> PairDistribution:
        keep = self.pmf[r] > 0
        return PairDistribution(
            anchor_index=int(self.anchor_indices[r]),
            candidate_indices=self.candidate_indices[keep],
            pmf=self.pmf[r][keep],
        )

    def row_position(self, anchor_index: int) -> int:
        """Fila de la tabla para un índice de ancla del dataset."""
        try:
            return self._positions[int(anchor_index)]
        except KeyError:
            raise MixerError(f"Ancla fuera de rango: {anchor_index}")

    def row(self, anchor_index: int) -> PairDistribution:
        return self._row_at(self.row_position(anchor_index))

    def sample(self, anchor_indices: Sequence[int], rng: np.random.Generator) -> np.ndarray:
        """
        Sortea un compañero por ancla mediante la CDF inversa de su fila.

        Args:
            anchor_indices: Índices de ancla (del dataset).
            rng: Generador; es lo único que se modifica.

        Returns:
            Índices (del dataset) de los compañeros.
        """
        rows = np.array([self.row_position(a) for a in np.asarray(anchor_indices, dtype=int).reshape(-1)], dtype=int)
        if rows.size == 0:
            return np.empty(0, dtype=int)
        cdf = np.cumsum(self.pmf[rows], axis=1)
        # u en (0, 1] para que un candidato de masa cero nunca quede elegido
        u = (1.0 - rng.random(rows.size)) * cdf[:, -1]
        picks = np.minimum((cdf < u[:, None]).sum(axis=1), self.pmf.shape[1] - 1)
        return self.candidate_indices[picks]

    def to_csv(self, path: Union[str, Path]) -> Path:
        """
        Exporta la tabla como CSV (anchor, candidate, distance, probability).

        Args:
            path: Archivo de salida.

        Returns:
            Path escrito.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        n_rows, n_cols = self.pmf.shape
        frame = pd.DataFrame({
            "anchor": np.repeat(self.anchor_indices, n_cols),
            "candidate": np.tile(self.candidate_indices, n_rows),
            "distance": np.nan if self.distances is None else self.distances.reshape(-1),
            "probability": self.pmf.reshape(-1),
        })
        frame.to_csv(path, index=False, float_format="%.17g")
        logger.info("Tabla de pares exportada a %s", path)
        return path


def build_pair_table(
    ds: Dataset,
    policy: MixPolicy,
    representations: Optional[np.ndarray] = None,
    anchor_indices: Optional[Sequence[int]] = None,
    candidate_indices: Optional[Sequence[int]] = None,
    exclude_self: Optional[bool] = None,
    keep_distances: bool = False,
) -> PairTable:
    """
    Calcula la pmf de mezcla de cada ancla.

    Args:
        ds: Dataset de entrenamiento.
        policy: Política de mezcla (métrica y σ).
        representations: Estados ocultos para las métricas "representation*".
        anchor_indices: Anclas (por defecto todas las filas).
        candidate_indices: Candidatos (por defecto todas las filas).
        exclude_self: Excluir el propio ancla; por defecto True en alcance "full".
        keep_distances: Conservar la matriz de distancias (para exportar).

    Returns:
        PairTable con una fila por ancla.

    Raises:
        MixerError: Representaciones faltantes o ancla sin candidatos.
    """
    coords = metric_matrix(ds, policy.metric, representations)
    anchors = np.arange(ds.n) if anchor_indices is None else np.asarray(anchor_indices, dtype=int)
    candidates = np.arange(ds.n) if candidate_indices is None else np.asarray(candidate_indices, dtype=int)
    if anchors.size and (anchors.min() < 0 or anchors.max() >= ds.n):
        raise MixerError("anchor_indices fuera de rango")
    if candidates.size == 0 or candidates.min() < 0 or candidates.max() >= ds.n:
        raise MixerError("candidate_indices vacío o fuera de rango")
    if exclude_self is None:
        exclude_self = policy.scope == "full"

    pmf = np.empty((anchors.size, candidates.size))
    distances = np.empty_like(pmf) if keep_distances else None
    for start in range(0, anchors.size, _ROW_BLOCK):
        block = anchors[start:start + _ROW_BLOCK]
        d = pairwise_sq_distance(coords[block], coords[candidates])
        mask = block[:, None] != candidates[None, :] if exclude_self else None
        # σ no influye con la métrica uniforme: todas las distancias son 0
        pmf[start:start + block.size] = kernel_weights(d, policy.bandwidth_sigma, mask)
        if keep_distances:
            distances[start:start + block.size] = d

    logger.debug(
        "Tabla de pares: %d anclas × %d candidatos (métrica=%s, σ=%g)",
        anchors.size, candidates.size, policy.metric, policy.bandwidth_sigma,
    )
    return PairTable(anchor_indices=anchors, candidate_indices=candidates, pmf=pmf, distances=distances)


def sample_partners(
    ds: Dataset,
    policy: MixPolicy,
    rng: np.random.Generator,
    representations: Optional[np.ndarray] = None,
    anchor_indices: Optional[Sequence[int]] = None,
    candidate_indices: Optional[Sequence[int]] = None,
    exclude_self: Optional[bool] = None,
) -> np.ndarray:
    """
    Un compañero por ancla sin materializar la tabla completa: las pmfs se
    calculan y se descartan bloque a bloque. Útil cuando n² no cabe en memoria.

    Returns:
        Índices (del dataset) de los compañeros, en el orden de las anclas.
    """
    anchors = np.arange(ds.n) if anchor_indices is None else np.asarray(anchor_indices, dtype=int)
    partners = np.empty(anchors.size, dtype=int)
    for start in range(0, anchors.size, _ROW_BLOCK):
        block = anchors[start:start + _ROW_BLOCK]
        table = build_pair_table(
            ds, policy, representations=representations, anchor_indices=np.unique(block),
            candidate_indices=candidate_indices, exclude_self=exclude_self,
        )
        partners[start:start + block.size] = table.sample(block, rng)
    return partners
