"""
Checkpoints de modelos en JSON.

Formato (format_version 1):
    {"format_version": 1, "kind": "fcn" | "ridge",
     "layer_sizes": [...], "activation": "...",   # solo fcn
     "penalty_k": k, "shape": [d, d_y],            # solo ridge
     "params": [...]}                               # parámetros planos
"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ModelError
from .fcn import FcnModel
from .ridge import RidgeModel

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def model_to_dict(model: Union[FcnModel, RidgeModel]) -> dict:
    if isinstance(model, FcnModel):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "fcn",
            "layer_sizes": list(model.layer_sizes),
            "activation": model.activation,
            "params": model.get_flat().tolist(),
        }
    if isinstance(model, RidgeModel):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "ridge",
            "penalty_k": model.penalty_k,
            "shape": list(model.theta.shape),
            "params": model.get_flat().tolist(),
        }
    raise ModelError(f"Tipo de modelo no soportado: {type(model).__name__}")


def model_from_dict(data: dict) -> Union[FcnModel, RidgeModel]:
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelError(f"Versión de checkpoint no soportada: {version}")
    try:
        params = np.asarray(data["params"], dtype=float)
        if data["kind"] == "fcn":
            sizes = [int(s) for s in data["layer_sizes"]]
            template = FcnModel(
                tuple(sizes),
                tuple(np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])),
                tuple(np.zeros(b) for b in sizes[1:]),
                data.get("activation", "leaky-relu"),
            )
            return template.with_flat(params)
        if data["kind"] == "ridge":
            return RidgeModel(theta=params.reshape(data["shape"]), penalty_k=float(data["penalty_k"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"Checkpoint malformado: {e}")
    raise ModelError(f"Tipo de checkpoint desconocido: {data.get('kind')!r}")


def save_checkpoint(model: Union[FcnModel, RidgeModel], path: Union[str, Path]) -> Path:
    """
    Guarda el modelo como JSON.

    Raises:
        ModelError: Si no se puede escribir el archivo.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(model_to_dict(model), f, indent=2, ensure_ascii=False)
    except OSError as e:
        raise ModelError(f"Error al guardar checkpoint en {path}: {e}")
    logger.info("Checkpoint guardado en %s", path)
    return path


def load_checkpoint(path: Union[str, Path]) -> Union[FcnModel, RidgeModel]:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ModelError(f"Error al leer checkpoint {path}: {e}")
    return model_from_dict(data)
