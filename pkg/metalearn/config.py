"""Configuración de MAML con aumento MetaMix / C-Mixup."""

from dataclasses import asdict, dataclass, field
from typing import Tuple


class MetaLearnError(Exception):
    """Error en la configuración o ejecución del meta-aprendizaje."""
    pass


PAIRINGS = ("none", "uniform", "feature", "label")


@dataclass(frozen=True)
class MetaConfig:
    """
    Attributes:
        outer_lr: Tasa del meta-optimizador Adam (>= 0; 0 congela θ).
        inner_lr: Tasa de los pasos internos de descenso por gradiente.
        inner_steps: Pasos internos (>= 1).
        beta_alpha: α de Beta(α, α) para MetaMix.
        bandwidth_sigma: σ del kernel en el emparejamiento consulta-soporte.
        pairing: "none" (MAML), "uniform" (MetaMix), "feature" o "label" (C-Mixup).
        meta_batch_size: Tareas por iteración externa.
        support_shots, query_shots: Tamaños de episodio.
        max_iterations: Iteraciones externas.
        hidden_sizes: Capas ocultas de la red.
        resample_episodes: Sortear un episodio nuevo por tarea en cada iteración.
    """

    outer_lr: float = 1e-3
    inner_lr: float = 0.01
    inner_steps: int = 5
    beta_alpha: float = 0.5
    bandwidth_sigma: float = 1.0
    pairing: str = "label"
    meta_batch_size: int = 4
    support_shots: int = 15
    query_shots: int = 15
    max_iterations: int = 1000
    hidden_sizes: Tuple[int, ...] = (40, 40)
    resample_episodes: bool = True

    def __post_init__(self):
        if self.outer_lr < 0 or not self.inner_lr > 0:
            raise MetaLearnError(f"Tasas inválidas: outer_lr={self.outer_lr}, inner_lr={self.inner_lr}")
        if self.inner_steps < 1:
            raise MetaLearnError(f"inner_steps debe ser >= 1, se recibió {self.inner_steps}")
        if not self.beta_alpha > 0 or not self.bandwidth_sigma > 0:
            raise MetaLearnError("beta_alpha y bandwidth_sigma deben ser > 0")
        if self.pairing not in PAIRINGS:
            raise MetaLearnError(f"pairing desconocido: {self.pairing!r}; opciones: {PAIRINGS}")
        if min(self.meta_batch_size, self.support_shots, self.query_shots) < 1:
            raise MetaLearnError("meta_batch_size y los shots deben ser >= 1")
        if self.max_iterations < 0:
            raise MetaLearnError("max_iterations debe ser >= 0")
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))

    def with_changes(self, **changes) -> "MetaConfig":
        return MetaConfig(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        data = asdict(self)
        data["hidden_sizes"] = list(self.hidden_sizes)
        return data
