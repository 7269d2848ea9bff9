"""
Derivación de semillas independientes.

Regla: SeedSequence(seed).spawn(n) genera n flujos hijos; el hijo i se usa
para la i-ésima componente (parámetros, muestras, prueba, ...). Dos llamadas
con la misma semilla producen los mismos flujos.
"""

from typing import List

import numpy as np


def spawn_rngs(seed: int, n: int) -> List[np.random.Generator]:
    return [np.random.default_rng(child) for child in np.random.SeedSequence(int(seed)).spawn(n)]


def spawn_seeds(seed: int, n: int) -> List[int]:
    """Semillas enteras para trabajos que solo aceptan un entero."""
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(int(seed)).spawn(n)]
