"""
Particiones entrenamiento/validación/prueba.
Modos: aleatorio por fracciones, por dominio (dominios disjuntos) y conteos fijos.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from data.dataset import Dataset, DataError

logger = logging.getLogger(__name__)

SPLIT_MODES = ("random", "by-domain", "fixed-counts")


@dataclass(frozen=True)
class SplitSpec:
    """
    Especificación de partición.

    Attributes:
        train_fraction, val_fraction, test_fraction: Fracciones que suman 1.
        seed: Semilla de la permutación.
        mode: "random", "by-domain" o "fixed-counts".
        counts: (train, val, test) para el modo fixed-counts, p. ej. (1003, 300, 200).
    """

    train_fraction: float = 0.8
    val_fraction: float = 0.1
    test_fraction: float = 0.1
    seed: int = 0
    mode: str = "random"
    counts: Optional[Tuple[int, int, int]] = None

    def validate(self) -> None:
        if self.mode not in SPLIT_MODES:
            raise DataError(f"Modo de partición desconocido: {self.mode}")
        fractions = (self.train_fraction, self.val_fraction, self.test_fraction)
        if any(f < 0 or f > 1 for f in fractions):
            raise DataError(f"Las fracciones deben estar en [0, 1]: {fractions}")
        if self.mode != "fixed-counts" and abs(sum(fractions) - 1.0) > 1e-9:
            raise DataError(f"Las fracciones deben sumar 1: {fractions}")
        if self.mode == "fixed-counts":
            if self.counts is None or len(self.counts) != 3 or any(c < 0 for c in self.counts):
                raise DataError("El modo fixed-counts requiere counts=(train, val, test) no negativos")


def _fraction_sizes(total: int, spec: SplitSpec) -> Tuple[int, int, int]:
    n_train = int(round(total * spec.train_fraction))
    n_val = int(round(total * spec.val_fraction))
    n_train = min(n_train, total)
    n_val = min(n_val, total - n_train)
    return n_train, n_val, total - n_train - n_val


def _domain_sizes(n_domains: int, spec: SplitSpec) -> Tuple[int, int, int]:
    n_val = int(round(n_domains * spec.val_fraction))
    n_test = int(round(n_domains * spec.test_fraction))
    # Una fracción positiva recibe al menos un dominio
    if spec.val_fraction > 0:
        n_val = max(n_val, 1)
    if spec.test_fraction > 0:
        n_test = max(n_test, 1)
    n_train = n_domains - n_val - n_test
    if n_train < 1 and spec.train_fraction > 0:
        raise DataError(
            f"No hay suficientes dominios ({n_domains}) para fracciones "
            f"{(spec.train_fraction, spec.val_fraction, spec.test_fraction)}"
        )
    return n_train, n_val, n_test


def split(ds: Dataset, spec: SplitSpec) -> Tuple[Optional[Dataset], Optional[Dataset], Optional[Dataset]]:
    """
    Parte el dataset en (train, val, test) de forma determinista dada la semilla.

    Args:
        ds: Dataset completo.
        spec: Especificación de partición.

    Returns:
        Tupla (train, val, test). Los splits vacíos se devuelven como None.

    Raises:
        DataError: Especificación inválida, by-domain sin domain_ids o
            conteos fijos mayores que n.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)

    if spec.mode == "by-domain":
        if ds.domain_ids is None:
            raise DataError("El modo by-domain requiere domain_ids")
        domains = np.unique(ds.domain_ids)
        order = rng.permutation(domains)
        n_train, n_val, _ = _domain_sizes(len(domains), spec)
        groups = (order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:])
        parts = [np.flatnonzero(np.isin(ds.domain_ids, g)) for g in groups]
    else:
        if spec.mode == "fixed-counts":
            sizes = tuple(int(c) for c in spec.counts)
            if sum(sizes) > ds.n:
                raise DataError(f"Los conteos {sizes} exceden el tamaño del dataset ({ds.n})")
            if sum(sizes) < ds.n:
                # Las filas sobrantes van a entrenamiento para conservar la partición
                logger.warning("Conteos %s < n=%d: %d filas extra asignadas a entrenamiento", sizes, ds.n, ds.n - sum(sizes))
                sizes = (ds.n - sizes[1] - sizes[2], sizes[1], sizes[2])
        else:
            sizes = _fraction_sizes(ds.n, spec)
        perm = rng.permutation(ds.n)
        bounds = np.cumsum((0,) + sizes)
        parts = [perm[bounds[k]:bounds[k + 1]] for k in range(3)]

    return tuple(ds.subset(np.sort(p)) if len(p) else None for p in parts)
