"""
Política de mezcla: métrica de distancia, ancho de banda, forma Beta,
sitio de mezcla (entrada o capa oculta) y alcance del emparejamiento.
"""

from dataclasses import dataclass, replace
from typing import Union


class MixerError(Exception):
    """Error en el muestreo de pares o en la interpolación."""
    pass


METRICS = (
    "label",
    "feature",
    "feature-concat-label",
    "representation",
    "representation-concat-label",
    "uniform",
)
SCOPES = ("full", "batch")


def parse_site(site: Union[str, int]) -> int:
    """
    Convierte el sitio de mezcla a un índice de capa.

    Args:
        site: "input", "hidden-k" o un entero (0 = entrada).

    Returns:
        int: 0 para la entrada, k >= 1 para la salida de la capa oculta k.
    """
    if isinstance(site, int):
        layer = site
    elif site == "input":
        layer = 0
    elif isinstance(site, str) and site.startswith("hidden-"):
        try:
            layer = int(site.split("-", 1)[1])
        except ValueError:
            raise MixerError(f"Sitio de mezcla inválido: {site!r}")
        if layer < 1:
            raise MixerError(f"La capa oculta debe ser >= 1: {site!r}")
    else:
        raise MixerError(f"Sitio de mezcla inválido: {site!r}")
    if layer < 0:
        raise MixerError(f"Sitio de mezcla inválido: {site!r}")
    return layer


@dataclass(frozen=True)
class MixPolicy:
    """
    Configuración de una variante de mixup.

    Attributes:
        metric: Métrica de distancia; "uniform" es mixup estándar.
        bandwidth_sigma: σ del kernel gaussiano (> 0, ignorado con "uniform").
        beta_alpha: α de Beta(α, α) (> 0).
        site: 0 = entrada; k >= 1 = activación tras la capa oculta k.
        scope: "full" (tabla precomputada) o "batch" (por pares de lotes).
    """

    metric: str = "label"
    bandwidth_sigma: float = 1.0
    beta_alpha: float = 2.0
    site: int = 0
    scope: str = "full"

    def __post_init__(self):
        if self.metric not in METRICS:
            raise MixerError(f"Métrica desconocida: {self.metric!r}; opciones: {METRICS}")
        if not self.bandwidth_sigma > 0:
            raise MixerError(f"bandwidth_sigma debe ser > 0, se recibió {self.bandwidth_sigma}")
        if not self.beta_alpha > 0:
            raise MixerError(f"beta_alpha debe ser > 0, se recibió {self.beta_alpha}")
        if self.scope not in SCOPES:
            raise MixerError(f"Alcance desconocido: {self.scope!r}; opciones: {SCOPES}")
        object.__setattr__(self, "site", parse_site(self.site))

    @property
    def requires_representations(self) -> bool:
        return self.metric.startswith("representation")

    @property
    def is_uniform(self) -> bool:
        return self.metric == "uniform"

    def with_changes(self, **changes) -> "MixPolicy":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "bandwidth_sigma": self.bandwidth_sigma,
            "beta_alpha": self.beta_alpha,
            "site": "input" if self.site == 0 else f"hidden-{self.site}",
            "scope": self.scope,
        }
