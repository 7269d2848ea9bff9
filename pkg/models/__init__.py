"""Ridge en forma cerrada, red totalmente conectada, Adam y regresor de kernel."""

from .errors import ModelError, SingularSystemError, DivergenceError
from .ridge import RidgeModel, ridge_fit
from .optim import AdamState, adam_update
from .fcn import FcnModel, FcnGradient, fcn_init, fcn_forward, fcn_backward, fcn_train_step
from .kernel_regressor import KernelRegressor, kernel_predict
from .metrics import MetricReport, metrics
from .checkpoint import save_checkpoint, load_checkpoint, model_to_dict, model_from_dict

__all__ = [
    "ModelError",
    "SingularSystemError",
    "DivergenceError",
    "RidgeModel",
    "ridge_fit",
    "AdamState",
    "adam_update",
    "FcnModel",
    "FcnGradient",
    "fcn_init",
    "fcn_forward",
    "fcn_backward",
    "fcn_train_step",
    "KernelRegressor",
    "kernel_predict",
    "MetricReport",
    "metrics",
    "save_checkpoint",
    "load_checkpoint",
    "model_to_dict",
    "model_from_dict",
]
