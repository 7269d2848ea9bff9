"""Optimizador Adam sobre vectores de parámetros planos."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ModelError


@dataclass(frozen=True, eq=False)
class AdamState:
    """Momentos de primer y segundo orden y contador de pasos."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n_params: int) -> "AdamState":
        return cls(m=np.zeros(n_params), v=np.zeros(n_params), t=0)


def adam_update(
    params: np.ndarray,
    grad: np.ndarray,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> Tuple[np.ndarray, AdamState]:
    """
    Un paso de Adam con corrección de sesgo.

    Args:
        params: Parámetros planos.
        grad: Gradiente de la misma forma.
        state: Estado previo.
        lr: Tasa de aprendizaje (>= 0).
        weight_decay: Término L2 sumado al gradiente.

    Returns:
        (parámetros nuevos, estado nuevo)
    """
    params = np.asarray(params, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if params.shape != grad.shape or state.m.shape != params.shape:
        raise ModelError(f"Formas incompatibles: params {params.shape}, grad {grad.shape}, estado {state.m.shape}")
    if lr < 0:
        raise ModelError(f"lr debe ser >= 0, se recibió {lr}")
    if weight_decay:
        grad = grad + weight_decay * params
    t = state.t + 1
    m = beta1 * state.m + (1.0 - beta1) * grad
    v = beta2 * state.v + (1.0 - beta2) * grad ** 2
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    new_params = params - lr * m_hat / (np.sqrt(v_hat) + eps)
    return new_params, AdamState(m=m, v=v, t=t)
