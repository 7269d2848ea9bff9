"""Inyección de ruido gaussiano en etiquetas (robustez a ruido)."""

import numpy as np

from data.dataset import Dataset, DataError


def inject_label_noise(ds: Dataset, noise_std_fraction: float, seed: int) -> Dataset:
    """
    Suma ruido N(0, (fracción · std de la columna)²) a cada etiqueta.

    Args:
        ds: Dataset original (no se modifica).
        noise_std_fraction: Fracción de la desviación estándar por columna (>= 0).
        seed: Semilla; la misma semilla reproduce el ruido bit a bit.

    Returns:
        Dataset con etiquetas ruidosas y las mismas features.
    """
    if noise_std_fraction < 0:
        raise DataError(f"noise_std_fraction debe ser >= 0, se recibió {noise_std_fraction}")
    if noise_std_fraction == 0:
        return ds

    rng = np.random.default_rng(seed)
    # Con una sola fila la std es 0 y las etiquetas no cambian
    scale = noise_std_fraction * ds.labels.std(axis=0)
    noise = rng.standard_normal(ds.labels.shape) * scale
    return ds.with_labels(ds.labels + noise)
