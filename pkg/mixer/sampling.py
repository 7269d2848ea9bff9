"""
Muestreo de λ ~ Beta(α, α), interpolación lineal de pares y armado de
lotes mezclados (tabla completa o por pares de lotes).
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from data.dataset import Dataset
from mixer.pairing import PairTable, build_pair_table
from mixer.policy import MixerError, MixPolicy

logger = logging.getLogger(__name__)


def sample_beta(alpha: float, rng: np.random.Generator) -> float:
    """
    Un sorteo de Beta(α, α) como cociente de dos Gamma(α, 1).

    Args:
        alpha: Forma (> 0).
        rng: Generador de numpy.

    Returns:
        float en [0, 1].
    """
    if not alpha > 0:
        raise MixerError(f"alpha debe ser > 0, se recibió {alpha}")
    g1 = rng.gamma(alpha)
    g2 = rng.gamma(alpha)
    total = g1 + g2
    if total <= 0.0:
        # Ambos sorteos se anularon (α muy pequeño): Beta(α, α) es casi Bernoulli(1/2)
        return float(rng.random() < 0.5)
    return float(g1 / total)


def sample_beta_many(alpha: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Versión vectorizada de sample_beta."""
    if not alpha > 0:
        raise MixerError(f"alpha debe ser > 0, se recibió {alpha}")
    g1 = rng.gamma(alpha, size=size)
    g2 = rng.gamma(alpha, size=size)
    total = g1 + g2
    out = np.empty(size)
    ok = total > 0
    out[ok] = g1[ok] / total[ok]
    if not ok.all():
        out[~ok] = (rng.random(int((~ok).sum())) < 0.5).astype(float)
    return out


def mix_pair(xi, yi, xj, yj, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Interpolación lineal de un par.

    Returns:
        (λ·xi + (1−λ)·xj, λ·yi + (1−λ)·yj)
    """
    xi, xj = np.asarray(xi, dtype=float), np.asarray(xj, dtype=float)
    yi, yj = np.asarray(yi, dtype=float), np.asarray(yj, dtype=float)
    if xi.shape != xj.shape or yi.shape != yj.shape:
        raise MixerError(f"Dimensiones incompatibles: x {xi.shape}/{xj.shape}, y {yi.shape}/{yj.shape}")
    return lam * xi + (1.0 - lam) * xj, lam * yi + (1.0 - lam) * yj


@dataclass(frozen=True, eq=False)
class MixedBatch:
    """
    Lote mezclado con el registro de pares y λ.

    x_anchor/x_partner se guardan por separado para que el entrenador pueda
    mezclar en una capa oculta en lugar de la entrada.
    """

    anchors: np.ndarray
    partners: np.ndarray
    lambdas: np.ndarray
    x_anchor: np.ndarray
    x_partner: np.ndarray
    y_mixed: np.ndarray

    def __len__(self) -> int:
        return len(self.anchors)

    @property
    def x_mixed(self) -> np.ndarray:
        lam = self.lambdas[:, None]
        return lam * self.x_anchor + (1.0 - lam) * self.x_partner

    def examples(self) -> List[Tuple[np.ndarray, np.ndarray, int, float]]:
        """Lista de (x̃, ỹ, índice del compañero, λ)."""
        x = self.x_mixed
        return [
            (x[r], self.y_mixed[r], int(self.partners[r]), float(self.lambdas[r]))
            for r in range(len(self))
        ]


def _assemble(ds: Dataset, anchors: np.ndarray, partners: np.ndarray, lambdas: np.ndarray) -> MixedBatch:
    lam = lambdas[:, None]
    y_mixed = lam * ds.labels[anchors] + (1.0 - lam) * ds.labels[partners]
    return MixedBatch(
        anchors=anchors,
        partners=partners,
        lambdas=lambdas,
        x_anchor=ds.features[anchors],
        x_partner=ds.features[partners],
        y_mixed=y_mixed,
    )


def draw_mixed_batch(
    batch_indices: Sequence[int],
    ds: Dataset,
    table: PairTable,
    policy: MixPolicy,
    rng: np.random.Generator,
) -> MixedBatch:
    """
    Un compañero y un λ por cada ancla del lote, usando la tabla precomputada.

    Args:
        batch_indices: Índices de ancla.
        ds: Dataset sobre el que se construyó la tabla.
        table: PairTable (alcance "full").
        policy: Política (aporta α).
        rng: Generador; el orden de sorteo es compañeros y luego λ.

    Returns:
        MixedBatch.

    Raises:
        MixerError: Índice de ancla fuera de rango.
    """
    anchors = np.asarray(batch_indices, dtype=int).reshape(-1)
    if anchors.size and (anchors.min() < 0 or anchors.max() >= ds.n):
        raise MixerError(f"Índice de ancla fuera de rango para n={ds.n}")
    partners = table.sample(anchors, rng)
    lambdas = sample_beta_many(policy.beta_alpha, anchors.size, rng)
    return _assemble(ds, anchors, partners, lambdas)


def pairwise_pmf(batch1: Sequence[int], batch2: Sequence[int], ds: Dataset, policy: MixPolicy,
                 representations: np.ndarray = None) -> PairTable:
    """
    Tabla de pares restringida a anclas de batch1 y candidatos de batch2,
    sin excluir el propio ancla.
    """
    b1 = np.asarray(batch1, dtype=int).reshape(-1)
    b2 = np.asarray(batch2, dtype=int).reshape(-1)
    if b1.size == 0 or b2.size == 0:
        raise MixerError("Los lotes no pueden estar vacíos")
    return build_pair_table(
        ds, policy, representations=representations,
        anchor_indices=np.unique(b1), candidate_indices=b2, exclude_self=False,
    )


def draw_mixed_batch_pairwise(
    batch1: Sequence[int],
    batch2: Sequence[int],
    ds: Dataset,
    policy: MixPolicy,
    rng: np.random.Generator,
    representations: np.ndarray = None,
) -> MixedBatch:
    """
    Variante por lotes: las distancias se calculan solo entre batch1 y batch2
    y cada ancla de batch1 elige compañero en batch2.

    Raises:
        MixerError: Si algún lote está vacío.
    """
    table = pairwise_pmf(batch1, batch2, ds, policy, representations)
    anchors = np.asarray(batch1, dtype=int).reshape(-1)
    partners = table.sample(anchors, rng)
    lambdas = sample_beta_many(policy.beta_alpha, anchors.size, rng)
    return _assemble(ds, anchors, partners, lambdas)
