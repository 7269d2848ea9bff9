"""
Persistencia de resultados de experimentos.
Guarda un registro JSON legible (configuración, registros por semilla y
agregados) y un CSV plano para graficar.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from config.settings import settings

logger = logging.getLogger(__name__)

# Campos que cambian entre corridas idénticas y no forman parte del payload
VOLATILE_FIELDS = ("created_at", "wall_clock_seconds")


class StorageError(Exception):
    """Error relacionado con almacenamiento."""
    pass


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        # JSON estricto no admite NaN/inf
        return value if math.isfinite(value) else None
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    return value


def aggregate(records: Sequence[Dict[str, Any]], keys: Sequence[str], group_by: Optional[str] = None) -> Dict[str, Any]:
    """
    Media y desviación estándar (poblacional) de cada clave numérica.

    Args:
        records: Registros por semilla; solo cuentan los de status "ok".
        keys: Claves numéricas a agregar.
        group_by: Clave de agrupamiento (por ejemplo "arm").

    Returns:
        {grupo: {clave: {"mean", "std", "n"}}} o {clave: {...}} sin agrupar.
    """
    def summarize(rows):
        out = {}
        for key in keys:
            values = [r[key] for r in rows if r.get(key) is not None and np.isfinite(r[key])]
            if values:
                arr = np.asarray(values, dtype=float)
                out[key] = {"mean": float(arr.mean()), "std": float(arr.std()), "n": len(values)}
        return out

    ok = [r for r in records if r.get("status", "ok") == "ok"]
    if group_by is None:
        return summarize(ok)
    groups: Dict[str, List[Dict[str, Any]]] = {}
    for r in ok:
        groups.setdefault(str(r[group_by]), []).append(r)
    return {name: summarize(rows) for name, rows in sorted(groups.items())}


@dataclass
class ExperimentResult:
    """
    Resultado de un experimento.

    Attributes:
        kind: Tipo de experimento.
        config: Eco de la configuración.
        seeds: Semillas ejecutadas (ordenadas).
        records: Un registro por (semilla[, brazo]).
        aggregates: Media/desviación recalculables desde records.
        summary: Reporte específico del experimento (fracciones de orden, etc.).
        table: Filas del CSV plano (por defecto, las columnas escalares de records).
        wall_clock_seconds: Tiempo de reloj.
        version: Versión de la librería.
        created_at: Marca de tiempo ISO.
    """

    kind: str
    config: Dict[str, Any]
    seeds: List[int]
    records: List[Dict[str, Any]] = field(default_factory=list)
    aggregates: Dict[str, Any] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    table: Optional[List[Dict[str, Any]]] = None
    wall_clock_seconds: float = 0.0
    version: str = settings.VERSION
    created_at: str = field(default_factory=lambda: datetime.now().isoformat())

    def to_dict(self) -> Dict[str, Any]:
        return _jsonable({
            "kind": self.kind,
            "version": self.version,
            "created_at": self.created_at,
            "wall_clock_seconds": self.wall_clock_seconds,
            "seeds": list(self.seeds),
            "config": self.config,
            "summary": self.summary,
            "aggregates": self.aggregates,
            "records": self.records,
            "table": self.table,
        })

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentResult":
        try:
            return cls(
                kind=data["kind"],
                config=data["config"],
                seeds=list(data["seeds"]),
                records=list(data.get("records", [])),
                aggregates=dict(data.get("aggregates", {})),
                summary=dict(data.get("summary", {})),
                table=data.get("table"),
                wall_clock_seconds=float(data.get("wall_clock_seconds", 0.0)),
                version=data.get("version", settings.VERSION),
                created_at=data.get("created_at", ""),
            )
        except (KeyError, TypeError) as e:
            raise StorageError(f"Registro de resultado malformado: {e}")

    def csv_rows(self) -> List[Dict[str, Any]]:
        if self.table is not None:
            return self.table
        rows = []
        for record in self.records:
            rows.append({k: v for k, v in record.items() if not isinstance(v, (list, tuple, dict, np.ndarray))})
        return rows


def persist(result: ExperimentResult, path: Union[str, Path]) -> Dict[str, Path]:
    """
    Escribe <path>.json y <path>.csv.

    Args:
        result: Resultado a guardar.
        path: Ruta base (la extensión se reemplaza).

    Returns:
        {"json": Path, "csv": Path}

    Raises:
        StorageError: Si el directorio no se puede crear o escribir.
    """
    base = Path(path)
    json_path = base.with_suffix(".json")
    csv_path = base.with_suffix(".csv")
    try:
        json_path.parent.mkdir(parents=True, exist_ok=True)
        with open(json_path, "w", encoding="utf-8") as f:
            json.dump(result.to_dict(), f, indent=2, ensure_ascii=False)
        pd.DataFrame(_jsonable(result.csv_rows())).to_csv(csv_path, index=False)
    except OSError as e:
        raise StorageError(f"Error al guardar resultados en {json_path.parent}: {e}")
    logger.info("Resultados guardados en %s y %s", json_path, csv_path)
    return {"json": json_path, "csv": csv_path}


def load_result(path: Union[str, Path]) -> ExperimentResult:
    """
    Relee un resultado guardado por persist.

    Raises:
        StorageError: Archivo inexistente o JSON inválido.
    """
    json_path = Path(path).with_suffix(".json")
    try:
        with open(json_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise StorageError(f"Error al leer {json_path}: {e}")
    return ExperimentResult.from_dict(data)


def payload_equal(a: ExperimentResult, b: ExperimentResult) -> bool:
    """Compara dos resultados ignorando marcas de tiempo y tiempo de reloj."""
    da, db = a.to_dict(), b.to_dict()
    for key in VOLATILE_FIELDS:
        da.pop(key, None)
        db.pop(key, None)
    return da == db
