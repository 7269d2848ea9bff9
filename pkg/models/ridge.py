"""
Regresión ridge en forma cerrada: θ = (XᵀX + kI)⁻¹ XᵀY.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from .errors import ModelError, SingularSystemError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RidgeModel:
    """
    Estimador ridge lineal sin intercepto.

    Attributes:
        theta: Coeficientes d × d_y.
        penalty_k: Penalización k >= 0.
    """

    theta: np.ndarray
    penalty_k: float = 0.0

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float, copy=True)
        if theta.ndim == 1:
            theta = theta.reshape(-1, 1)
        if not np.all(np.isfinite(theta)):
            raise ModelError("theta contiene valores no finitos")
        if self.penalty_k < 0:
            raise ModelError(f"penalty_k debe ser >= 0, se recibió {self.penalty_k}")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @property
    def coef(self) -> np.ndarray:
        """Coeficientes como vector cuando d_y = 1."""
        return self.theta[:, 0] if self.theta.shape[1] == 1 else self.theta

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.theta.shape[0]:
            raise ModelError(f"X tiene {X.shape[1]} columnas, se esperaban {self.theta.shape[0]}")
        return X @ self.theta

    # Protocolo de parámetros planos (meta-aprendizaje)

    def get_flat(self) -> np.ndarray:
        return self.theta.reshape(-1).copy()

    def with_flat(self, flat: np.ndarray) -> "RidgeModel":
        return RidgeModel(theta=np.asarray(flat, dtype=float).reshape(self.theta.shape), penalty_k=self.penalty_k)

    def loss_and_gradient(self, X: np.ndarray, Y: np.ndarray) -> Tuple[float, np.ndarray]:
        """
        Pérdida MSE + (k/n)·‖θ‖² y su gradiente respecto a θ aplanado.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.asarray(Y, dtype=float).reshape(X.shape[0], -1)
        residual = self.predict(X) - Y
        n = X.shape[0]
        loss = float(np.mean(residual ** 2) + self.penalty_k / n * np.sum(self.theta ** 2))
        grad = 2.0 * X.T @ residual / residual.size + 2.0 * self.penalty_k / n * self.theta
        return loss, grad.reshape(-1)


def ridge_fit(X: np.ndarray, Y: np.ndarray, k: float = 0.0) -> RidgeModel:
    """
    Ajusta ridge resolviendo (XᵀX + kI)θ = XᵀY sin invertir la matriz.

    Se intenta Cholesky; si la factorización falla se usa un solver con
    pivoteo y se verifica que el sistema no sea singular.

    Args:
        X: Matriz n × d.
        Y: Vector n o matriz n × d_y.
        k: Penalización (>= 0).

    Returns:
        RidgeModel ajustado.

    Raises:
        ModelError: Dimensiones inválidas o k negativo.
        SingularSystemError: Sistema singular (k = 0 con X de rango deficiente).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if X.shape[0] < 1 or Y.shape[0] != X.shape[0]:
        raise ModelError(f"X e Y deben tener el mismo número de filas >= 1: {X.shape} vs {Y.shape}")
    if k < 0:
        raise ModelError(f"k debe ser >= 0, se recibió {k}")

    d = X.shape[1]
    gram = X.T @ X + k * np.eye(d)
    rhs = X.T @ Y
    try:
        factor = scipy.linalg.cho_factor(gram, lower=False, check_finite=True)
        theta = scipy.linalg.cho_solve(factor, rhs)
    except np.linalg.LinAlgError:
        logger.debug("Cholesky falló (k=%g); se usa solver con pivoteo", k)
        try:
            theta = scipy.linalg.solve(gram, rhs, assume_a="sym")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as e:
            raise SingularSystemError(f"Sistema ridge singular con k={k}: {e}")
        if np.linalg.matrix_rank(gram) < d:
            raise SingularSystemError(f"Sistema ridge singular con k={k}: rango {np.linalg.matrix_rank(gram)} < {d}")

    if not np.all(np.isfinite(theta)):
        raise SingularSystemError(f"Solución ridge no finita con k={k}")
    model = RidgeModel(theta=theta, penalty_k=float(k))
    logger.debug("ridge_fit: n=%d, d=%d, k=%g, ‖θ‖=%.4g", X.shape[0], d, k, float(np.linalg.norm(theta)))
    return model
