"""
Funciones de enlace monótonas g para los modelos de índice simple.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import expit


class GeneratorError(Exception):
    """Error en la especificación de un generador sintético."""
    pass


LINKS = ("sigmoid-scaled", "cubic-plus-linear", "table", "linear")


@dataclass(frozen=True)
class SigmoidLink:
    """g(t) = a·sigmoid(b·t) + c·t con a, b, c > 0."""

    a: float = 4.0
    b: float = 1.0
    c: float = 0.5

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0:
            raise GeneratorError(f"a, b y c deben ser > 0: {(self.a, self.b, self.c)}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.a * expit(self.b * t) + self.c * t


@dataclass(frozen=True)
class CubicLink:
    """g(t) = 0.05·t³ + t."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return 0.05 * t ** 3 + t


@dataclass(frozen=True)
class LinearLink:
    slope: float = 1.0

    def __call__(self, t):
        return self.slope * np.asarray(t, dtype=float)


@dataclass(frozen=True, eq=False)
class TableLink:
    """Interpolación lineal sobre nodos (t, g) estrictamente crecientes; constante fuera del rango."""

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if knots.size < 2 or knots.size != values.size:
            raise GeneratorError("La tabla requiere al menos dos nodos con valores")
        if np.any(np.diff(knots) <= 0) or np.any(np.diff(values) <= 0):
            raise GeneratorError("Los nodos y valores de la tabla deben ser estrictamente crecientes")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        return np.interp(np.asarray(t, dtype=float), self.knots, self.values)


def make_link(name: str, table: Optional[Sequence[Sequence[float]]] = None):
    """
    Construye una función de enlace por nombre.

    Args:
        name: "sigmoid-scaled", "cubic-plus-linear", "linear" o "table".
        table: Pares [t, g] para "table".

    Raises:
        GeneratorError: Nombre desconocido o tabla inválida.
    """
    if name == "sigmoid-scaled":
        return SigmoidLink()
    if name == "cubic-plus-linear":
        return CubicLink()
    if name == "linear":
        return LinearLink()
    if name == "table":
        if not table:
            raise GeneratorError("El enlace 'table' requiere la lista de nodos")
        pairs = np.asarray(table, dtype=float)
        return TableLink(knots=pairs[:, 0], values=pairs[:, 1])
    raise GeneratorError(f"Enlace desconocido: {name!r}; opciones: {LINKS}")


def draw_task_link(rng: np.random.Generator) -> SigmoidLink:
    """Enlace de una tarea: a ~ U(1, 5), b ~ U(0.5, 2), c ~ U(0.1, 1)."""
    return SigmoidLink(a=rng.uniform(1.0, 5.0), b=rng.uniform(0.5, 2.0), c=rng.uniform(0.1, 1.0))
