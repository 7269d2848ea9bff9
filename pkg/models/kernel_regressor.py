"""
Regresor de kernel Nadaraya-Watson en una dimensión:
ĝ(t) = Σ K(t_i, t)·y_i / Σ K(t_i, t).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ModelError

KERNELS = ("uniform", "gaussian")

# Posiciones evaluadas por bloque
_CHUNK = 512


@dataclass(frozen=True, eq=False)
class KernelRegressor:
    """
    Attributes:
        support_t: Posiciones t_i de los puntos de soporte.
        support_y: Etiquetas y_i.
        kernel: "uniform" (1{|t1−t2| < h}) o "gaussian" (exp(−|t1−t2|²/h²)).
        bandwidth_h: h > 0.
    """

    support_t: np.ndarray
    support_y: np.ndarray
    kernel: str = "gaussian"
    bandwidth_h: float = 1.0

    def __post_init__(self):
        t = np.array(self.support_t, dtype=float, copy=True).reshape(-1)
        y = np.array(self.support_y, dtype=float, copy=True).reshape(-1)
        if t.size < 1 or t.size != y.size:
            raise ModelError("Se requiere al menos un punto de soporte y longitudes iguales")
        if self.kernel not in KERNELS:
            raise ModelError(f"Kernel desconocido: {self.kernel!r}")
        if not self.bandwidth_h > 0:
            raise ModelError(f"bandwidth_h debe ser > 0, se recibió {self.bandwidth_h}")
        t.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "support_t", t)
        object.__setattr__(self, "support_y", y)

    @classmethod
    def fit(cls, t, y, kernel: str = "gaussian", bandwidth_h: float = 1.0) -> "KernelRegressor":
        return cls(support_t=t, support_y=y, kernel=kernel, bandwidth_h=bandwidth_h)

    def predict(self, t) -> np.ndarray:
        """Predicción vectorizada sobre un arreglo de posiciones."""
        t = np.asarray(t, dtype=float).reshape(-1)
        if t.size > _CHUNK:
            return np.concatenate([self._predict_block(t[i:i + _CHUNK]) for i in range(0, t.size, _CHUNK)])
        return self._predict_block(t)

    def _predict_block(self, t: np.ndarray) -> np.ndarray:
        gap = np.abs(t[:, None] - self.support_t[None, :])
        if self.kernel == "uniform":
            weights = (gap < self.bandwidth_h).astype(float)
        else:
            sq = (gap / self.bandwidth_h) ** 2
            weights = np.exp(-(sq - sq.min(axis=1, keepdims=True)))
        totals = weights.sum(axis=1)
        out = np.empty(t.size)
        inside = totals > 0
        out[inside] = weights[inside] @ self.support_y / totals[inside]
        if not inside.all():
            # Ventana vacía: etiqueta del soporte más cercano
            out[~inside] = self.support_y[np.argmin(gap[~inside], axis=1)]
        return out


def kernel_predict(reg: KernelRegressor, t: float) -> float:
    return float(reg.predict([t])[0])
