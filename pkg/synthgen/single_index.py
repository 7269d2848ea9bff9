"""
Modelo de índice simple con error de medición:
z ~ (1/K) Σ_k N(μ_k, σ_z² I), μ_k = k·θ; x = z + ξ; y = g(θᵀz) + ε.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from data.dataset import Dataset
from .links import GeneratorError, make_link
from .seeding import spawn_rngs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SingleIndexSpec:
    p: int = 20
    s: int = 3
    K: int = 5
    sigma_z: float = 0.05
    sigma_xi: float = 0.05
    sigma_eps: float = 0.01
    link: str = "sigmoid-scaled"
    link_table: Optional[List[List[float]]] = None
    N: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.p < 1 or not 1 <= self.s <= self.p:
            raise GeneratorError(f"Se requiere 1 <= s <= p, se recibió s={self.s}, p={self.p}")
        if self.K < 1 or self.N < 1:
            raise GeneratorError("K y N deben ser >= 1")
        if min(self.sigma_z, self.sigma_xi, self.sigma_eps) < 0:
            raise GeneratorError("Las desviaciones estándar deben ser >= 0")
        make_link(self.link, self.link_table)

    def with_seed(self, seed: int) -> "SingleIndexSpec":
        return SingleIndexSpec(**{**asdict(self), "seed": int(seed)})


@dataclass(frozen=True, eq=False)
class SingleIndexTruth:
    """Verdad oculta, fuera del Dataset para que ningún entrenador la consuma."""

    theta: np.ndarray
    clusters: np.ndarray
    z: np.ndarray
    link: object = field(repr=False)


def draw_sparse_theta(p: int, s: int, rng: np.random.Generator) -> np.ndarray:
    """θ con s coordenadas no nulas y norma 1."""
    theta = np.zeros(p)
    support = rng.choice(p, size=s, replace=False)
    theta[support] = rng.standard_normal(s)
    norm = np.linalg.norm(theta)
    if norm == 0:
        theta[support[0]] = 1.0
        norm = 1.0
    return theta / norm


def sample_cluster_z(K: int, sigma_z: float, theta: np.ndarray, n: int, rng: np.random.Generator):
    """
    z ~ (1/K) Σ_k N(μ_k, σ_z² I) con μ_k = k·θ/‖θ‖.

    Returns:
        (clusters en 1..K, z de n × p)
    """
    clusters = rng.integers(1, K + 1, size=n)
    means = clusters[:, None] * theta[None, :] / np.linalg.norm(theta)
    z = means + sigma_z * rng.standard_normal((n, theta.size))
    return clusters, z


def sample_single_index(spec: SingleIndexSpec, theta: np.ndarray, n: int, rng: np.random.Generator):
    """Muestras (x, y, clusters, z) para un θ dado."""
    link = make_link(spec.link, spec.link_table)
    clusters, z = sample_cluster_z(spec.K, spec.sigma_z, theta, n, rng)
    x = z + spec.sigma_xi * rng.standard_normal((n, spec.p))
    y = link(z @ theta) + spec.sigma_eps * rng.standard_normal(n)
    return x, y, clusters, z


def gen_single_index(spec: SingleIndexSpec):
    """
    Genera un dataset del modelo de índice simple.

    Args:
        spec: Especificación (incluye la semilla).

    Returns:
        (Dataset, SingleIndexTruth)
    """
    theta_rng, sample_rng = spawn_rngs(spec.seed, 2)
    theta = draw_sparse_theta(spec.p, spec.s, theta_rng)
    x, y, clusters, z = sample_single_index(spec, theta, spec.N, sample_rng)
    logger.debug("gen_single_index: N=%d, p=%d, K=%d, seed=%d", spec.N, spec.p, spec.K, spec.seed)
    truth = SingleIndexTruth(theta=theta, clusters=clusters, z=z, link=make_link(spec.link, spec.link_table))
    return Dataset(features=x, labels=y), truth
