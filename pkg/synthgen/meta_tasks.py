"""
Tareas de meta-aprendizaje con representación compartida:
y^(m) = g_m(θᵀz) + ε, x^(m) = z + ξ, con un g_m monótono por tarea y z
de la mezcla de K grupos del modelo de índice simple.
"""

import logging
from dataclasses import asdict, dataclass
from typing import List

import numpy as np

from data.dataset import Dataset
from .links import GeneratorError, SigmoidLink, draw_task_link
from .seeding import spawn_rngs
from .single_index import draw_sparse_theta, sample_cluster_z

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetaTaskSpec:
    """
    Attributes:
        M: Tareas de entrenamiento.
        N_m: Ejemplos por tarea (el conjunto del que salen los episodios).
        p, s: Dimensión y dispersión de θ.
        K: Grupos de la mezcla de z (medias k·θ/‖θ‖).
        sigma_z, sigma_xi, sigma_eps: Escala de z, ruido de medición y ruido de etiqueta.
        support_shots, query_shots: Tamaños del soporte y la consulta.
        shared_link: Todas las tareas (incluidas las objetivo) usan el mismo g.
        n_target_tasks: Tareas objetivo retenidas.
    """

    M: int = 200
    N_m: int = 60
    p: int = 10
    s: int = 3
    K: int = 5
    sigma_z: float = 0.2
    sigma_xi: float = 0.1
    sigma_eps: float = 0.05
    support_shots: int = 15
    query_shots: int = 15
    shared_link: bool = False
    n_target_tasks: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.M < 1 or self.n_target_tasks < 1 or self.K < 1:
            raise GeneratorError("M, K y n_target_tasks deben ser >= 1")
        if self.support_shots < 1 or self.query_shots < 1:
            raise GeneratorError("support_shots y query_shots deben ser >= 1")
        if self.N_m < self.support_shots + self.query_shots:
            raise GeneratorError(
                f"N_m={self.N_m} no alcanza para {self.support_shots}+{self.query_shots} ejemplos disjuntos"
            )
        if not 1 <= self.s <= self.p:
            raise GeneratorError(f"Se requiere 1 <= s <= p, se recibió s={self.s}, p={self.p}")
        if min(self.sigma_z, self.sigma_xi, self.sigma_eps) < 0:
            raise GeneratorError("Las desviaciones estándar deben ser >= 0")

    def with_seed(self, seed: int) -> "MetaTaskSpec":
        return MetaTaskSpec(**{**asdict(self), "seed": int(seed)})


@dataclass(frozen=True, eq=False)
class MetaTask:
    """Una tarea: episodio inicial (soporte/consulta disjuntos) y el conjunto completo."""

    support: Dataset
    query: Dataset
    pool: Dataset
    link: SigmoidLink
    z: np.ndarray
    clusters: np.ndarray

    def episode(self, support_shots: int, query_shots: int, rng: np.random.Generator):
        """Nuevo par (soporte, consulta) disjunto muestreado del conjunto de la tarea."""
        order = rng.permutation(self.pool.n)
        return (
            self.pool.subset(order[:support_shots]),
            self.pool.subset(order[support_shots:support_shots + query_shots]),
        )


@dataclass(frozen=True, eq=False)
class MetaTaskSet:
    train_tasks: List[MetaTask]
    target_tasks: List[MetaTask]
    theta: np.ndarray


def _make_task(spec: MetaTaskSpec, theta: np.ndarray, link: SigmoidLink, rng: np.random.Generator) -> MetaTask:
    clusters, z = sample_cluster_z(spec.K, spec.sigma_z, theta, spec.N_m, rng)
    x = z + spec.sigma_xi * rng.standard_normal((spec.N_m, spec.p))
    y = link(z @ theta) + spec.sigma_eps * rng.standard_normal(spec.N_m)
    pool = Dataset(features=x, labels=y)
    order = rng.permutation(spec.N_m)
    support = pool.subset(order[:spec.support_shots])
    query = pool.subset(order[spec.support_shots:spec.support_shots + spec.query_shots])
    return MetaTask(support=support, query=query, pool=pool, link=link, z=z, clusters=clusters)


def gen_meta_tasks(spec: MetaTaskSpec) -> MetaTaskSet:
    """
    Genera M tareas de entrenamiento y n_target_tasks tareas objetivo que
    comparten θ y difieren en su enlace g_m.

    Args:
        spec: Especificación.

    Returns:
        MetaTaskSet.
    """
    theta_rng, link_rng, train_rng, target_rng = spawn_rngs(spec.seed, 4)
    theta = draw_sparse_theta(spec.p, spec.s, theta_rng)
    shared = draw_task_link(link_rng) if spec.shared_link else None

    def next_link():
        return shared if shared is not None else draw_task_link(link_rng)

    train = [_make_task(spec, theta, next_link(), train_rng) for _ in range(spec.M)]
    target = [_make_task(spec, theta, next_link(), target_rng) for _ in range(spec.n_target_tasks)]
    logger.debug("gen_meta_tasks: M=%d, objetivo=%d, seed=%d", spec.M, spec.n_target_tasks, spec.seed)
    return MetaTaskSet(train_tasks=train, target_tasks=target, theta=theta)
