"""
Distancias euclidianas al cuadrado y kernel gaussiano de muestreo:
P(j | i) ∝ exp(-d(i, j) / (2σ²)).
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from mixer.policy import MixerError

# Límite de elementos n·m·d por bloque al calcular distancias
_CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True, eq=False)
class PairDistribution:
    """Función de masa sobre candidatos de mezcla para un ancla."""

    anchor_index: int
    candidate_indices: np.ndarray
    pmf: np.ndarray

    def __post_init__(self):
        if len(self.candidate_indices) != len(self.pmf) or len(self.pmf) < 1:
            raise MixerError("candidate_indices y pmf deben tener la misma longitud >= 1")


def pairwise_sq_distance(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """
    Distancia euclidiana al cuadrado entre cada fila de A y cada fila de B.

    Se calcula por diferencias explícitas (en bloques), de modo que el
    resultado es exactamente simétrico y con diagonal cero cuando A = B.

    Args:
        A: Matriz n × d.
        B: Matriz m × d.

    Returns:
        Matriz n × m.

    Raises:
        MixerError: Si el número de columnas no coincide.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if A.shape[1] != B.shape[1]:
        raise MixerError(f"Dimensiones incompatibles: {A.shape} vs {B.shape}")

    n, d = A.shape
    m = B.shape[0]
    out = np.empty((n, m), dtype=float)
    rows_per_chunk = max(1, _CHUNK_ELEMENTS // max(1, m * max(d, 1)))
    for start in range(0, n, rows_per_chunk):
        stop = min(n, start + rows_per_chunk)
        diff = A[start:stop, None, :] - B[None, :, :]
        out[start:stop] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def kernel_weights(distances: np.ndarray, sigma: float, mask: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Pesos normalizados del kernel gaussiano por fila.

    Args:
        distances: Matriz de distancias (filas = anclas).
        sigma: Ancho de banda (> 0).
        mask: Matriz booleana; False anula el candidato antes de normalizar.

    Returns:
        Matriz con filas que suman 1.

    Raises:
        MixerError: Si alguna fila queda sin candidatos.
    """
    if not sigma > 0:
        raise MixerError(f"sigma debe ser > 0, se recibió {sigma}")
    distances = np.atleast_2d(np.asarray(distances, dtype=float))
    if np.any(distances < 0):
        raise MixerError("Las distancias deben ser no negativas")
    allowed = np.ones(distances.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if not np.all(allowed.any(axis=1)):
        raise MixerError("Ancla degenerada: ningún candidato con peso positivo")

    # Restar el mínimo por fila evita que todo se anule con σ pequeño
    shifted = np.where(allowed, distances, np.inf)
    shifted = shifted - shifted.min(axis=1, keepdims=True)
    weights = np.exp(-shifted / (2.0 * sigma ** 2))
    weights[~allowed] = 0.0
    return weights / weights.sum(axis=1, keepdims=True)


def kernel_pmf(
    dist_row: Sequence[float],
    sigma: float,
    exclude_self: bool = False,
    self_index: Optional[int] = None,
) -> PairDistribution:
    """
    pmf de mezcla de un ancla a partir de su fila de distancias.

    Args:
        dist_row: n distancias no negativas.
        sigma: Ancho de banda (> 0).
        exclude_self: Si True, el candidato self_index queda fuera.
        self_index: Índice del ancla dentro de dist_row.

    Returns:
        PairDistribution sobre los candidatos restantes.

    Raises:
        MixerError: Si tras la exclusión no queda ningún candidato.
    """
    row = np.asarray(dist_row, dtype=float).reshape(-1)
    candidates = np.arange(row.shape[0])
    if exclude_self:
        if self_index is None or not 0 <= self_index < row.shape[0]:
            raise MixerError(f"self_index inválido: {self_index}")
        candidates = candidates[candidates != self_index]
        if candidates.size == 0:
            raise MixerError(f"Ancla degenerada {self_index}: no hay otros candidatos")
    pmf = kernel_weights(row[candidates][None, :], sigma)[0]
    anchor = -1 if self_index is None else int(self_index)
    return PairDistribution(anchor_index=anchor, candidate_indices=candidates, pmf=pmf)
