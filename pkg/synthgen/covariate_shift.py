"""
Par de dominios con rasgos invariantes casi idénticos y rasgos espurios
opuestos: x = (z; a), x' = (z + ε'; −a + ε''), y = θᵀx + ε con las últimas
p2 coordenadas de θ iguales a cero.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Tuple

import numpy as np

from data.dataset import Dataset
from .links import GeneratorError
from .seeding import spawn_rngs

logger = logging.getLogger(__name__)

TEST_SHIFTS = ("flip", "scale")


@dataclass(frozen=True)
class CovariateShiftSpec:
    """
    Attributes:
        n: Número de pares.
        p1, p2: Dimensiones invariante y espuria.
        sigma_x, sigma_a, sigma_eps: Escalas de z, a y del ruido.
        theta: Coeficientes (p1 + p2), o None para sortear uno de norma 1.
        a_mean: Media del bloque espurio en el dominio 0 (el dominio 1 queda en −a_mean).
        test_shift: "flip" (a de prueba con signo invertido) o "scale".
        test_scale: Factor de "scale".
        n_test: Filas de prueba (por defecto 2·n).
    """

    n: int = 300
    p1: int = 40
    p2: int = 10
    sigma_x: float = 1.0
    sigma_a: float = 1.0
    sigma_eps: float = 1e-8
    theta: Optional[Tuple[float, ...]] = None
    a_mean: float = 0.0
    test_shift: str = "flip"
    test_scale: float = 2.0
    n_test: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.p1 < 1 or self.p2 < 0:
            raise GeneratorError("Se requiere n >= 1, p1 >= 1 y p2 >= 0")
        if min(self.sigma_x, self.sigma_a, self.sigma_eps) < 0:
            raise GeneratorError("Las desviaciones estándar deben ser >= 0")
        if self.test_shift not in TEST_SHIFTS:
            raise GeneratorError(f"test_shift desconocido: {self.test_shift!r}")
        if self.theta is not None:
            theta = np.asarray(self.theta, dtype=float)
            if theta.shape != (self.p1 + self.p2,):
                raise GeneratorError(f"theta debe tener {self.p1 + self.p2} coordenadas")
            if np.any(theta[self.p1:] != 0):
                raise GeneratorError("Las últimas p2 coordenadas de theta deben ser exactamente 0")

    @property
    def p(self) -> int:
        return self.p1 + self.p2

    def with_changes(self, **changes) -> "CovariateShiftSpec":
        return CovariateShiftSpec(**{**asdict(self), **changes})


@dataclass(frozen=True, eq=False)
class CovariateShiftTruth:
    theta: np.ndarray
    pair_of: np.ndarray


def _theta(spec: CovariateShiftSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.theta is not None:
        return np.asarray(spec.theta, dtype=float)
    theta = np.zeros(spec.p)
    invariant = rng.standard_normal(spec.p1)
    theta[:spec.p1] = invariant / np.linalg.norm(invariant)
    return theta


def gen_covariate_shift(spec: CovariateShiftSpec, flip_test: bool = True):
    """
    Genera el entrenamiento (dominios 0 y 1 intercalados) y la prueba.

    Args:
        spec: Especificación.
        flip_test: Si True, la prueba redibuja a con la distribución
            desplazada de spec.test_shift; si False, como el dominio 0.

    Returns:
        (train Dataset con domain_ids, test Dataset, CovariateShiftTruth).
        La fila 2i es x_i (dominio 0) y la fila 2i+1 es x_i'.
    """
    theta_rng, train_rng, test_rng = spawn_rngs(spec.seed, 3)
    theta = _theta(spec, theta_rng)
    n, p1, p2 = spec.n, spec.p1, spec.p2

    z = spec.sigma_x * train_rng.standard_normal((n, p1))
    a = spec.a_mean + spec.sigma_a * train_rng.standard_normal((n, p2))
    z_prime = z + spec.sigma_eps * train_rng.standard_normal((n, p1))
    a_prime = -a + spec.sigma_eps * train_rng.standard_normal((n, p2))
    x = np.hstack([z, a])
    x_prime = np.hstack([z_prime, a_prime])
    y = x @ theta + spec.sigma_eps * train_rng.standard_normal(n)
    y_prime = x_prime @ theta + spec.sigma_eps * train_rng.standard_normal(n)

    features = np.empty((2 * n, spec.p))
    features[0::2], features[1::2] = x, x_prime
    labels = np.empty(2 * n)
    labels[0::2], labels[1::2] = y, y_prime
    domains = np.tile([0, 1], n)
    pair_of = np.arange(2 * n) ^ 1

    n_test = spec.n_test or 2 * n
    z_test = spec.sigma_x * test_rng.standard_normal((n_test, p1))
    a_test = spec.a_mean + spec.sigma_a * test_rng.standard_normal((n_test, p2))
    if flip_test:
        a_test = -a_test if spec.test_shift == "flip" else spec.test_scale * a_test
    x_test = np.hstack([z_test, a_test])
    y_test = x_test @ theta + spec.sigma_eps * test_rng.standard_normal(n_test)

    train = Dataset(features=features, labels=labels, domain_ids=domains)
    test = Dataset(features=x_test, labels=y_test)
    logger.debug("gen_covariate_shift: n=%d, p1=%d, p2=%d, shift=%s", n, p1, p2, spec.test_shift if flip_test else "none")
    return train, test, CovariateShiftTruth(theta=theta, pair_of=pair_of)


def min_cross_label_gap(train: Dataset) -> float:
    """l = min_{i≠j} |y_i − y'_j| entre filas del dominio 0 y del dominio 1."""
    y0 = train.labels[train.domain_ids == 0, 0]
    y1 = train.labels[train.domain_ids == 1, 0]
    gap = np.abs(y0[:, None] - y1[None, :])
    if gap.shape[0] > 1:
        np.fill_diagonal(gap, np.inf)
    return float(gap.min())


def pairing_bandwidth(train: Dataset, p1: int, scale: float = 0.5) -> float:
    """Ancho de banda de etiquetas h = scale·l / sqrt(log(n²/p1))."""
    n = int((train.domain_ids == 0).sum())
    return scale * min_cross_label_gap(train) / math.sqrt(math.log(n ** 2 / p1))


def check_shift_regime(spec: CovariateShiftSpec, penalty_k: float, delta: float = 0.1,
                          theta_norm: Optional[float] = None) -> List[str]:
    """
    Evalúa numéricamente las desigualdades del régimen de desplazamiento de
    covariables con constantes universales iguales a 1.

    Returns:
        Lista de desigualdades que fallan (vacía si el régimen es válido).
    """
    n, p1, p2, p = spec.n, spec.p1, spec.p2, spec.p
    norm = theta_norm if theta_norm is not None else (
        float(np.linalg.norm(spec.theta)) if spec.theta is not None else 1.0
    )
    failures = []

    lower_delta = max(math.exp(-n), math.exp(-p1 ** 2 / (2 * n)))
    if not lower_delta < delta < 1:
        failures.append(f"max(exp(-n), exp(-p1²/2n)) = {lower_delta:.3g} < δ = {delta} < 1")
    if spec.sigma_a < spec.sigma_x:
        failures.append(f"σ_a = {spec.sigma_a} >= σ_x = {spec.sigma_x}")
    sigma_x_floor = max(n ** 2.5 / (norm * delta) * spec.sigma_eps, math.sqrt(p2) * norm / (math.sqrt(n) * p1))
    if spec.sigma_x < sigma_x_floor:
        failures.append(f"σ_x = {spec.sigma_x} >= {sigma_x_floor:.3g}")
    eps_ceiling = 1.0 / (p * n ** 1.5)
    if spec.sigma_eps ** 2 > eps_ceiling:
        failures.append(f"σ_ε² = {spec.sigma_eps ** 2:.3g} <= {eps_ceiling:.3g}")
    k_low = math.sqrt(p2 / p1) * n ** 0.25
    k_high = min(spec.sigma_x / norm * math.sqrt(p1 * n), n)
    if not k_low < penalty_k < k_high:
        failures.append(f"{k_low:.3g} < k = {penalty_k} < {k_high:.3g}")
    if not p1 < n < p1 ** 2:
        failures.append(f"p1 = {p1} < n = {n} < p1² = {p1 ** 2}")
    return failures
