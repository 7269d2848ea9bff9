"""
MAML de primer orden con aumento de la consulta (MetaMix) y emparejamiento
consulta-soporte por kernel de etiquetas (C-Mixup).

Los modelos siguen el protocolo de parámetros planos de models
(get_flat, with_flat, loss_and_gradient).
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from data.dataset import Dataset
from mixer import MixPolicy, build_pair_table, sample_beta_many
from models import AdamState, DivergenceError, adam_update, fcn_init
from .config import MetaConfig, MetaLearnError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AugmentedQuery:
    """Consulta aumentada con el registro de compañeros (índices del soporte) y λ."""

    dataset: Dataset
    partners: np.ndarray
    lambdas: np.ndarray


@dataclass(frozen=True, eq=False)
class MetaTrainResult:
    model: object
    outer_losses: List[float]


@dataclass(frozen=True)
class MetaEvaluation:
    """
    Attributes:
        mean_mse: MSE medio sobre las tareas objetivo.
        half_width: 1.96·std/√T (0 si T = 1).
        n_tasks: T.
        degenerate_interval: True cuando T = 1.
    """

    mean_mse: float
    half_width: float
    n_tasks: int
    degenerate_interval: bool
    task_mse: tuple = ()

    def to_dict(self) -> dict:
        return {
            "mean_mse": self.mean_mse,
            "half_width": self.half_width,
            "n_tasks": self.n_tasks,
            "degenerate_interval": self.degenerate_interval,
        }


def inner_adapt(theta, support: Dataset, cfg: MetaConfig):
    """
    Pasos de descenso por gradiente sobre el soporte, partiendo de θ.

    Args:
        theta: Modelo inicial (no se modifica).
        support: Soporte de la tarea (no vacío).
        cfg: Configuración (inner_lr, inner_steps).

    Returns:
        Modelo adaptado φ.

    Raises:
        DivergenceError: Pérdida no finita.
    """
    if support.n < 1:
        raise MetaLearnError("El soporte no puede estar vacío")
    flat = theta.get_flat()
    phi = theta
    for step in range(1, cfg.inner_steps + 1):
        loss, grad = phi.loss_and_gradient(support.features, support.labels)
        if not np.isfinite(loss):
            raise DivergenceError(f"Pérdida interna no finita en el paso {step}: {loss}", step=step, loss=loss)
        flat = flat - cfg.inner_lr * grad
        phi = theta.with_flat(flat)
    return phi


def metamix_query(support: Dataset, query: Dataset, cfg: MetaConfig, rng: np.random.Generator) -> AugmentedQuery:
    """
    Reemplaza cada ejemplo de consulta por λ·soporte_j + (1−λ)·consulta_i.

    El compañero j se sortea de forma uniforme ("uniform") o por el kernel
    gaussiano de distancias consulta-soporte ("feature", "label").
    Con pairing "none" la consulta se devuelve sin cambios.

    Args:
        support: Soporte de la tarea.
        query: Consulta de la tarea.
        cfg: Configuración.
        rng: Generador.

    Returns:
        AugmentedQuery (un ejemplo por ejemplo de consulta).
    """
    if support.n < 1 or query.n < 1:
        raise MetaLearnError("Soporte y consulta deben ser no vacíos")
    if cfg.pairing == "none":
        return AugmentedQuery(dataset=query, partners=np.full(query.n, -1), lambdas=np.zeros(query.n))

    # Consulta en las filas [0, q) y soporte en [q, q + s)
    pooled = Dataset.concat([query, support])
    policy = MixPolicy(metric=cfg.pairing, bandwidth_sigma=cfg.bandwidth_sigma, beta_alpha=cfg.beta_alpha, scope="batch")
    table = build_pair_table(
        pooled,
        policy,
        anchor_indices=np.arange(query.n),
        candidate_indices=np.arange(query.n, query.n + support.n),
        exclude_self=False,
    )
    partners = table.sample(np.arange(query.n), rng) - query.n
    lambdas = sample_beta_many(cfg.beta_alpha, query.n, rng)
    lam = lambdas[:, None]
    features = lam * support.features[partners] + (1.0 - lam) * query.features
    labels = lam * support.labels[partners] + (1.0 - lam) * query.labels
    return AugmentedQuery(dataset=Dataset(features, labels), partners=partners, lambdas=lambdas)


def _episode(task, cfg: MetaConfig, rng: np.random.Generator):
    if isinstance(task, tuple):
        return task
    if cfg.resample_episodes:
        return task.episode(cfg.support_shots, cfg.query_shots, rng)
    return task.support, task.query


def meta_train(tasks: Sequence, cfg: MetaConfig, seed: int, model=None) -> MetaTrainResult:
    """
    Entrena la inicialización compartida con MAML de primer orden.

    Cada iteración sortea un meta-lote de tareas, adapta en el soporte,
    aumenta la consulta y promedia el gradiente de la consulta en φ como
    dirección de actualización de θ (Adam).

    Args:
        tasks: MetaTask (con episodios re-muestreables) o tuplas (soporte, consulta).
        cfg: Configuración.
        seed: Semilla de inicialización y muestreo.
        model: Inicialización opcional (por defecto una red nueva).

    Returns:
        MetaTrainResult con el modelo y la pérdida externa por iteración.

    Raises:
        MetaLearnError: Sin tareas.
        DivergenceError: Pérdida no finita.
    """
    if not tasks:
        raise MetaLearnError("Se requiere al menos una tarea")
    init_rng, loop_rng = [np.random.default_rng(s) for s in np.random.SeedSequence(int(seed)).spawn(2)]
    if model is None:
        support, _ = _episode(tasks[0], cfg.with_changes(resample_episodes=False), init_rng)
        sizes = [support.d_x, *cfg.hidden_sizes, support.d_y]
        model = fcn_init(sizes, init_rng)

    flat = model.get_flat()
    state = AdamState.zeros(flat.size)
    losses: List[float] = []
    batch_size = min(cfg.meta_batch_size, len(tasks))

    for iteration in range(1, cfg.max_iterations + 1):
        chosen = np.sort(loop_rng.choice(len(tasks), size=batch_size, replace=False))
        total_grad = np.zeros_like(flat)
        total_loss = 0.0
        # Reducción en orden fijo de tareas
        for t in chosen:
            support, query = _episode(tasks[int(t)], cfg, loop_rng)
            phi = inner_adapt(model, support, cfg)
            augmented = metamix_query(support, query, cfg, loop_rng)
            loss, grad = phi.loss_and_gradient(augmented.dataset.features, augmented.dataset.labels)
            total_loss += loss
            total_grad += grad
        mean_loss = total_loss / batch_size
        if not np.isfinite(mean_loss):
            raise DivergenceError(f"Pérdida externa no finita en la iteración {iteration}", step=iteration, loss=mean_loss)
        flat, state = adam_update(flat, total_grad / batch_size, state, cfg.outer_lr)
        model = model.with_flat(flat)
        losses.append(float(mean_loss))
        if iteration % 100 == 0:
            logger.debug("meta_train iteración %d: pérdida %.5f", iteration, mean_loss)

    return MetaTrainResult(model=model, outer_losses=losses)


def meta_evaluate(theta, target_tasks: Sequence, cfg: MetaConfig) -> MetaEvaluation:
    """
    Adapta θ en el soporte de cada tarea objetivo y mide el MSE en su consulta.

    Returns:
        MetaEvaluation con media e intervalo del 95%.
    """
    if not target_tasks:
        raise MetaLearnError("Se requiere al menos una tarea objetivo")
    fixed = cfg.with_changes(resample_episodes=False)
    errors = []
    for task in target_tasks:
        support, query = _episode(task, fixed, None)
        phi = inner_adapt(theta, support, cfg)
        errors.append(float(np.mean((phi.predict(query.features) - query.labels) ** 2)))
    errors = np.asarray(errors)
    T = errors.size
    half_width = 0.0 if T == 1 else float(1.96 * errors.std(ddof=1) / np.sqrt(T))
    return MetaEvaluation(
        mean_mse=float(errors.mean()),
        half_width=half_width,
        n_tasks=T,
        degenerate_interval=T == 1,
        task_mse=tuple(errors.tolist()),
    )
