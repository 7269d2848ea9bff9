"""
Red totalmente conectada con gradientes explícitos.

Topología fija [d_x, h1, h2, ..., d_y]: capas afines con activación en las
ocultas y salida lineal. La mezcla puede inyectarse en la entrada o tras la
capa oculta k (manifold mixup).
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DivergenceError, ModelError
from .optim import adam_update

logger = logging.getLogger(__name__)

ACTIVATIONS = ("relu", "leaky-relu")
LEAKY_SLOPE = 0.01


@dataclass(frozen=True, eq=False)
class FcnModel:
    """
    Parámetros de la red. weights[l] tiene forma (in, out); biases[l], (out,).
    """

    layer_sizes: Tuple[int, ...]
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    activation: str = "leaky-relu"

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or min(sizes) < 1:
            raise ModelError(f"layer_sizes inválido: {self.layer_sizes}")
        if self.activation not in ACTIVATIONS:
            raise ModelError(f"Activación desconocida: {self.activation!r}")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ModelError("Número de capas inconsistente con layer_sizes")
        weights, biases = [], []
        for l, (W, b) in enumerate(zip(self.weights, self.biases)):
            W = np.array(W, dtype=float, copy=True)
            b = np.array(b, dtype=float, copy=True).reshape(-1)
            if W.shape != (sizes[l], sizes[l + 1]) or b.shape != (sizes[l + 1],):
                raise ModelError(
                    f"Capa {l}: forma {W.shape}/{b.shape}, se esperaba {(sizes[l], sizes[l + 1])}/{(sizes[l + 1],)}"
                )
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ModelError(f"Capa {l}: parámetros no finitos")
            W.setflags(write=False)
            b.setflags(write=False)
            weights.append(W)
            biases.append(b)
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "weights", tuple(weights))
        object.__setattr__(self, "biases", tuple(biases))

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def n_hidden(self) -> int:
        return self.n_layers - 1

    @property
    def n_params(self) -> int:
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return fcn_forward(self, X)[0]

    def hidden(self, X: np.ndarray, layer: Optional[int] = None) -> np.ndarray:
        """Activación tras la capa oculta indicada (por defecto la última)."""
        layer = self.n_hidden if layer is None else layer
        if not 1 <= layer <= self.n_hidden:
            raise ModelError(f"Capa oculta fuera de rango: {layer}")
        return fcn_forward(self, X, capture_hidden=True)[1][layer - 1]

    # Protocolo de parámetros planos

    def get_flat(self) -> np.ndarray:
        return np.concatenate([np.concatenate([W.reshape(-1), b]) for W, b in zip(self.weights, self.biases)])

    def with_flat(self, flat: np.ndarray) -> "FcnModel":
        flat = np.asarray(flat, dtype=float).reshape(-1)
        if flat.size != self.n_params:
            raise ModelError(f"Vector de parámetros de tamaño {flat.size}, se esperaba {self.n_params}")
        weights, biases, pos = [], [], 0
        for W, b in zip(self.weights, self.biases):
            weights.append(flat[pos:pos + W.size].reshape(W.shape))
            pos += W.size
            biases.append(flat[pos:pos + b.size])
            pos += b.size
        return FcnModel(self.layer_sizes, tuple(weights), tuple(biases), self.activation)

    def loss_and_gradient(self, X: np.ndarray, Y: np.ndarray) -> Tuple[float, np.ndarray]:
        grad = fcn_backward(self, X, Y)
        return grad.loss, grad.flat()


@dataclass(frozen=True, eq=False)
class FcnGradient:
    """Gradientes del MSE por capa y valor de la pérdida."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    loss: float

    def flat(self) -> np.ndarray:
        return np.concatenate([np.concatenate([W.reshape(-1), b]) for W, b in zip(self.weights, self.biases)])


def fcn_init(layer_sizes: Sequence[int], rng: np.random.Generator, activation: str = "leaky-relu") -> FcnModel:
    """
    Inicialización uniforme en ±sqrt(6 / (fan_in + fan_out)), sesgos en cero.
    """
    sizes = [int(s) for s in layer_sizes]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return FcnModel(tuple(sizes), tuple(weights), tuple(biases), activation)


def _act(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.maximum(z, 0.0)
    return np.where(z > 0, z, LEAKY_SLOPE * z)


def _act_grad(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.where(z > 0, 1.0, 0.0)
    return np.where(z > 0, 1.0, LEAKY_SLOPE)


def _as_batch(model: FcnModel, X: np.ndarray) -> Tuple[np.ndarray, bool]:
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = X.reshape(1, -1) if single else X
    if X.ndim != 2 or X.shape[1] != model.layer_sizes[0]:
        raise ModelError(f"Entrada con forma {X.shape}, se esperaban {model.layer_sizes[0]} columnas")
    return X, single


def _forward_layers(model: FcnModel, a: np.ndarray, start: int, stop: int):
    """Propaga las capas [start, stop) y guarda (entrada, preactivación) de cada una."""
    cache = []
    last = model.n_layers - 1
    for l in range(start, stop):
        z = a @ model.weights[l] + model.biases[l]
        cache.append((a, z))
        a = z if l == last else _act(z, model.activation)
    return a, cache


def _backward_layers(model: FcnModel, cache, grad_out: np.ndarray, start: int, gW, gb) -> np.ndarray:
    """Acumula gradientes de las capas cacheadas y devuelve el gradiente respecto a su entrada."""
    last = model.n_layers - 1
    for offset in range(len(cache) - 1, -1, -1):
        l = start + offset
        a_in, z = cache[offset]
        grad_z = grad_out if l == last else grad_out * _act_grad(z, model.activation)
        gW[l] += a_in.T @ grad_z
        gb[l] += grad_z.sum(axis=0)
        grad_out = grad_z @ model.weights[l].T
    return grad_out


def fcn_forward(model: FcnModel, x: np.ndarray, capture_hidden: bool = False):
    """
    Propagación hacia adelante.

    Args:
        model: Red.
        x: Vector de d_x entradas o matriz n × d_x.
        capture_hidden: Devolver las activaciones de cada capa oculta.

    Returns:
        (predicción, lista de activaciones ocultas o None). Conserva la
        dimensión de la entrada: un vector produce vectores.

    Raises:
        ModelError: Dimensión de entrada incorrecta.
    """
    X, single = _as_batch(model, x)
    a, cache = _forward_layers(model, X, 0, model.n_layers)
    hidden = None
    if capture_hidden:
        # Entrada de la capa l+1 = activación de la capa oculta l
        hidden = [cache[l][0] for l in range(1, model.n_layers)]
        if single:
            hidden = [h[0] for h in hidden]
    return (a[0] if single else a), hidden


def fcn_backward(
    model: FcnModel,
    X: np.ndarray,
    Y: np.ndarray,
    X_partner: Optional[np.ndarray] = None,
    lambdas: Optional[np.ndarray] = None,
    site: int = 0,
) -> FcnGradient:
    """
    Gradiente exacto del error cuadrático medio (media sobre todas las entradas).

    Sin X_partner es un lote normal (x, y). Con X_partner y lambdas, ambas
    ramas se propagan hasta la capa `site`, sus activaciones se combinan
    λ·h_a + (1−λ)·h_b y el resto de la red ve la mezcla; el gradiente de cada
    rama se escala por λ y (1−λ) y se suma.

    Args:
        model: Red.
        X: Entradas (o entradas ancla) n × d_x.
        Y: Objetivos n × d_y (ya mezclados si corresponde).
        X_partner: Entradas de los compañeros (opcional).
        lambdas: λ por ejemplo (requerido con X_partner).
        site: 0 = entrada; k >= 1 = tras la capa oculta k.

    Returns:
        FcnGradient.

    Raises:
        ModelError: Lote vacío, dimensiones o sitio inválidos.
    """
    X, _ = _as_batch(model, X)
    if X.shape[0] == 0:
        raise ModelError("El lote no puede estar vacío")
    Y = np.asarray(Y, dtype=float).reshape(X.shape[0], -1)
    if Y.shape[1] != model.layer_sizes[-1]:
        raise ModelError(f"Objetivos con {Y.shape[1]} columnas, se esperaban {model.layer_sizes[-1]}")
    if not 0 <= site <= model.n_hidden:
        raise ModelError(f"Sitio de mezcla {site} fuera de rango para {model.n_hidden} capas ocultas")

    gW = [np.zeros_like(W) for W in model.weights]
    gb = [np.zeros_like(b) for b in model.biases]

    if X_partner is None:
        pred, cache = _forward_layers(model, X, 0, model.n_layers)
        diff = pred - Y
        _backward_layers(model, cache, 2.0 * diff / diff.size, 0, gW, gb)
        return FcnGradient(gW, gb, float(np.mean(diff ** 2)))

    X_partner, _ = _as_batch(model, X_partner)
    if lambdas is None or X_partner.shape != X.shape:
        raise ModelError("La mezcla requiere X_partner con la forma de X y lambdas")
    lam = np.asarray(lambdas, dtype=float).reshape(-1, 1)

    h_a, cache_a = _forward_layers(model, X, 0, site)
    h_b, cache_b = _forward_layers(model, X_partner, 0, site)
    mixed = lam * h_a + (1.0 - lam) * h_b
    pred, cache_top = _forward_layers(model, mixed, site, model.n_layers)
    diff = pred - Y
    delta = _backward_layers(model, cache_top, 2.0 * diff / diff.size, site, gW, gb)
    if site > 0:
        _backward_layers(model, cache_a, lam * delta, 0, gW, gb)
        _backward_layers(model, cache_b, (1.0 - lam) * delta, 0, gW, gb)
    return FcnGradient(gW, gb, float(np.mean(diff ** 2)))


def fcn_train_step(model: FcnModel, batch, optimizer_state, lr: float, site: int = 0, weight_decay: float = 0.0):
    """
    Un paso de Adam sobre el MSE del lote mezclado.

    Args:
        model: Red actual.
        batch: MixedBatch (del mezclador) o tupla (X, Y) sin mezcla.
        optimizer_state: AdamState compatible con el número de parámetros.
        lr: Tasa de aprendizaje (lr = 0 deja el modelo intacto).
        site: Sitio de mezcla para MixedBatch.
        weight_decay: Penalización L2 sumada al gradiente.

    Returns:
        (modelo actualizado, estado actualizado, pérdida del lote).

    Raises:
        DivergenceError: Pérdida no finita.
    """
    if isinstance(batch, tuple):
        grad = fcn_backward(model, batch[0], batch[1])
    elif site == 0:
        grad = fcn_backward(model, batch.x_mixed, batch.y_mixed)
    else:
        grad = fcn_backward(model, batch.x_anchor, batch.y_mixed, batch.x_partner, batch.lambdas, site)

    step = optimizer_state.t + 1
    if not np.isfinite(grad.loss):
        raise DivergenceError(f"Pérdida no finita en el paso {step}: {grad.loss}", step=step, loss=grad.loss)
    params, state = adam_update(model.get_flat(), grad.flat(), optimizer_state, lr, weight_decay=weight_decay)
    if not np.all(np.isfinite(params)):
        raise DivergenceError(f"Parámetros no finitos tras el paso {step}", step=step, loss=grad.loss)
    return model.with_flat(params), state, grad.loss
