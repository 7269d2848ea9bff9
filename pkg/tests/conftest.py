"""
Fixtures compartidos por los tests.
Ejecutar con: pytest tests/   (las corridas lentas: pytest -m slow)
"""

import numpy as np
import pytest

from data.dataset import Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_dataset():
    """Tres filas con etiquetas 0, 1, 2."""
    return Dataset(
        features=np.array([[0.0, 1.0], [1.0, 0.0], [2.0, 2.0]]),
        labels=np.array([0.0, 1.0, 2.0]),
    )


@pytest.fixture
def linear_dataset():
    """Regresión lineal con poco ruido (60 filas, 3 features)."""
    gen = np.random.default_rng(7)
    X = gen.uniform(-1.0, 1.0, size=(60, 3))
    y = X @ np.array([1.5, -2.0, 0.5]) + 0.01 * gen.standard_normal(60)
    return Dataset(features=X, labels=y)


@pytest.fixture
def write_csv(tmp_path):
    """Escribe un CSV de texto y devuelve su ruta."""

    def _write(text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
