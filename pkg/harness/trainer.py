"""
Entrenamiento de la red totalmente conectada con los brazos ERM, mixup,
Manifold-Mixup y las variantes de C-Mixup.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from data.dataset import Dataset
from data.preprocessing import LabelScaler
from mixer import MixPolicy, PairTable, build_pair_table, draw_mixed_batch, pairwise_pmf
from models import AdamState, FcnModel, fcn_init, fcn_train_step, metrics
from .config import ConfigError, MixConfig, TrainingConfig

logger = logging.getLogger(__name__)

# Brazo -> (métrica, alcance, usa sitio de manifold)
_ARM_POLICIES = {
    "mixup": ("uniform", "full", False),
    "manifold-mixup": ("uniform", "full", True),
    "cmixup": ("label", "full", False),
    "cmixup-batch": ("label", "batch", False),
    "cmixup-feature": ("feature", "full", False),
    "cmixup-feature-label": ("feature-concat-label", "full", False),
    "cmixup-representation": ("representation", "full", False),
    "cmixup-representation-label": ("representation-concat-label", "full", False),
}


def arm_policy(arm: str, mix: MixConfig) -> Optional[MixPolicy]:
    """
    Política de mezcla de un brazo; None para ERM.

    Raises:
        ConfigError: Brazo desconocido.
    """
    if arm == "erm":
        return None
    if arm not in _ARM_POLICIES:
        raise ConfigError(f"Brazo desconocido: {arm!r}")
    metric, scope, manifold = _ARM_POLICIES[arm]
    return MixPolicy(
        metric=metric,
        bandwidth_sigma=mix.bandwidth_sigma,
        beta_alpha=mix.beta_alpha,
        site=mix.manifold_site if manifold else mix.site,
        scope=scope,
    )


@dataclass
class TrainOutcome:
    """
    Attributes:
        model: Modelo de la mejor época de validación (o de la última si no hay validación).
        label_scaler: Escalador de etiquetas usado (o None).
        train_losses: Pérdida media de entrenamiento por época (unidades estandarizadas).
        val_rmse: RMSE de validación por época (unidades originales).
        best_epoch: Época seleccionada (1-indexada).
    """

    model: FcnModel
    label_scaler: Optional[LabelScaler]
    train_losses: List[float] = field(default_factory=list)
    val_rmse: List[float] = field(default_factory=list)
    best_epoch: int = 0

    @property
    def best_val_rmse(self) -> Optional[float]:
        return self.val_rmse[self.best_epoch - 1] if self.val_rmse else None

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Predicción en las unidades originales de la etiqueta."""
        pred = self.model.predict(X)
        return self.label_scaler.inverse_labels(pred) if self.label_scaler is not None else pred


def _hidden_states(model: FcnModel, ds: Dataset) -> np.ndarray:
    return model.hidden(ds.features)


def train_fcn(
    train: Dataset,
    val: Optional[Dataset],
    policy: Optional[MixPolicy],
    training: TrainingConfig,
    seed: int,
    standardize_labels: bool = True,
    pair_on_standardized_labels: bool = False,
) -> TrainOutcome:
    """
    Entrena una red desde cero con la política de mezcla dada.

    Args:
        train: Entrenamiento (features ya normalizadas).
        val: Validación para seleccionar la mejor época (opcional).
        policy: MixPolicy o None (ERM).
        training: Hiperparámetros.
        seed: Semilla de inicialización, orden de lotes y sorteos.
        standardize_labels: Entrenar sobre etiquetas estandarizadas.
        pair_on_standardized_labels: Medir distancias de etiqueta tras estandarizar.

    Returns:
        TrainOutcome.

    Raises:
        DivergenceError: Pérdida no finita durante el entrenamiento.
    """
    rng = np.random.default_rng(seed)
    sizes = [train.d_x, *training.hidden_sizes, train.d_y]
    model = fcn_init(sizes, rng, training.activation)
    if policy is not None and policy.site > model.n_hidden:
        raise ConfigError(f"Sitio de mezcla {policy.site} fuera de rango para {model.n_hidden} capas ocultas")

    scaler = LabelScaler.fit(train.labels) if standardize_labels else None
    fit_ds = train.with_labels(scaler.transform_labels(train.labels)) if scaler else train
    pair_ds = fit_ds if pair_on_standardized_labels else train

    state = AdamState.zeros(model.n_params)
    outcome = TrainOutcome(model=model, label_scaler=scaler)
    best_rmse = np.inf
    best_model = model
    table: Optional[PairTable] = None
    representations = None

    for epoch in range(1, training.epochs + 1):
        if policy is not None:
            refresh = policy.requires_representations and (epoch - 1) % training.representation_refresh_epochs == 0
            if refresh:
                representations = _hidden_states(model, train)
            if policy.scope == "full" and (table is None or refresh):
                table = build_pair_table(pair_ds, policy, representations=representations)

        order = rng.permutation(train.n)
        batch_losses = []
        for start in range(0, train.n, training.batch_size):
            batch = order[start:start + training.batch_size]
            if policy is None:
                mixed = (fit_ds.features[batch], fit_ds.labels[batch])
            elif policy.scope == "full":
                mixed = draw_mixed_batch(batch, fit_ds, table, policy, rng)
            else:
                partner_batch = rng.permutation(train.n)[:batch.size]
                batch_table = pairwise_pmf(batch, partner_batch, pair_ds, policy, representations)
                mixed = draw_mixed_batch(batch, fit_ds, batch_table, policy, rng)
            site = 0 if policy is None else policy.site
            model, state, loss = fcn_train_step(model, mixed, state, training.lr, site=site,
                                                weight_decay=training.weight_decay)
            batch_losses.append(loss)
        outcome.train_losses.append(float(np.mean(batch_losses)))

        if val is not None:
            outcome.model = model
            rmse = metrics(outcome.predict(val.features), val.labels).rmse
            outcome.val_rmse.append(rmse)
            if rmse < best_rmse:
                best_rmse = rmse
                best_model = model
                outcome.best_epoch = epoch
        logger.debug(
            "época %d: pérdida %.5f%s", epoch, outcome.train_losses[-1],
            f", val RMSE {outcome.val_rmse[-1]:.5f}" if val is not None else "",
        )

    if val is not None and outcome.best_epoch == 0:
        # RMSE de validación NaN en todas las épocas
        outcome.model = model
        outcome.best_epoch = training.epochs
    elif val is not None:
        outcome.model = best_model
    else:
        outcome.model = model
        outcome.best_epoch = training.epochs
    return outcome
