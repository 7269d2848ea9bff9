"""Ejecución de semillas como trabajos independientes."""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Sequence

logger = logging.getLogger(__name__)

SeedJob = Callable[[Any, int], List[Dict[str, Any]]]


def run_seeds(job: SeedJob, cfg: Any, seeds: Sequence[int], jobs: int = 1) -> List[Dict[str, Any]]:
    """
    Ejecuta job(cfg, seed) por semilla y concatena los registros ordenados por semilla.

    Args:
        job: Función de nivel de módulo (debe ser serializable con pickle).
        cfg: Configuración compartida (solo lectura).
        seeds: Semillas.
        jobs: Procesos; 1 ejecuta en el proceso actual.

    Returns:
        Registros de todas las semillas, en orden creciente de semilla.
    """
    ordered = sorted(int(s) for s in seeds)
    if jobs <= 1 or len(ordered) == 1:
        results = [job(cfg, seed) for seed in ordered]
    else:
        logger.info("Ejecutando %d semillas en %d procesos", len(ordered), jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(job, [cfg] * len(ordered), ordered))
    records: List[Dict[str, Any]] = []
    for seed_records in results:
        records.extend(seed_records)
    return records
