"""Representación de datasets, lectura de CSV, normalización y particiones."""

from .dataset import Dataset, DataError
from .loader import load_csv
from .preprocessing import FeatureScaler, LabelScaler, normalize_minmax, standardize_labels
from .splits import SplitSpec, split
from .noise import inject_label_noise

__all__ = [
    "Dataset",
    "DataError",
    "load_csv",
    "FeatureScaler",
    "LabelScaler",
    "normalize_minmax",
    "standardize_labels",
    "SplitSpec",
    "split",
    "inject_label_noise",
]
