"""Errores del paquete de modelos."""

from typing import Optional


class ModelError(Exception):
    """Error relacionado con modelos (dimensiones, parámetros, ajuste)."""
    pass


class SingularSystemError(ModelError):
    """El sistema lineal de ridge no tiene solución única."""
    pass


class DivergenceError(ModelError):
    """
    La pérdida dejó de ser finita durante el entrenamiento.

    Attributes:
        step: Paso de optimización en el que se detectó.
        loss: Valor de la pérdida (NaN o infinito).
    """

    def __init__(self, message: str, step: Optional[int] = None, loss: Optional[float] = None):
        super().__init__(message)
        self.step = step
        self.loss = loss
