"""
Lectura de datasets tabulares desde CSV.
Los valores faltantes se rellenan con la media de su columna.
"""

import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from data.dataset import Dataset, DataError

logger = logging.getLogger(__name__)

# Los datasets UCI usan ambas convenciones
MISSING_TOKENS = {"", "?"}


def _read_header(path: Path) -> List[str]:
    try:
        header = pd.read_csv(path, nrows=0, sep=",", encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise DataError(f"El archivo {path} está vacío o no tiene encabezado")
    columns = [str(c).strip() for c in header.columns]
    if not columns:
        raise DataError(f"El archivo {path} no tiene encabezado")
    return columns


def _parse_cell(value: str, row: int, column: str, path: Path) -> float:
    token = value.strip()
    if token in MISSING_TOKENS:
        return np.nan
    try:
        parsed = float(token)
    except ValueError:
        raise DataError(
            f"Celda no numérica en {path}, fila {row}, columna '{column}': {value!r}"
        )
    if not np.isfinite(parsed):
        raise DataError(f"Valor no finito en {path}, fila {row}, columna '{column}'")
    return parsed


def load_csv(
    path: Union[str, Path],
    label_columns: List[str],
    domain_column: Optional[str] = None,
) -> Dataset:
    """
    Lee un CSV con encabezado y separador coma.

    Args:
        path: Ruta del archivo.
        label_columns: Columnas que forman la etiqueta (al menos una).
        domain_column: Columna con el identificador de dominio (opcional).

    Returns:
        Dataset con las columnas restantes como features.

    Raises:
        DataError: Archivo inexistente, fila con número de columnas incorrecto,
            celda no numérica o columna desconocida.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"Archivo no encontrado: {path}")
    if not label_columns:
        raise DataError("label_columns no puede estar vacío")

    columns = _read_header(path)
    unknown = [c for c in list(label_columns) + ([domain_column] if domain_column else []) if c not in columns]
    if unknown:
        raise DataError(f"Columnas desconocidas en {path}: {unknown}")

    # Una columna extra de centinela: filas largas la llenan, filas cortas dejan NaN al final
    n_cols = len(columns)
    try:
        raw = pd.read_csv(
            path,
            sep=",",
            header=None,
            skiprows=1,
            names=list(range(n_cols + 1)),
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.ParserError as e:
        raise DataError(f"Fila malformada en {path}: {e}")

    if len(raw) == 0:
        raise DataError(f"El archivo {path} no tiene filas de datos")

    for position, row in enumerate(raw.itertuples(index=False), start=2):
        values = list(row)
        if not pd.isna(values[n_cols]) or pd.isna(values[n_cols - 1]):
            found = sum(1 for v in values if not pd.isna(v))
            raise DataError(
                f"Fila malformada en {path}, línea {position}: {found} columnas, se esperaban {n_cols}"
            )

    table = np.empty((len(raw), n_cols), dtype=float)
    for j, column in enumerate(columns):
        if column == domain_column:
            continue
        for i, value in enumerate(raw[j].tolist()):
            table[i, j] = _parse_cell(value, i + 2, column, path)

    # Rellenar faltantes con la media de la columna
    for j, column in enumerate(columns):
        if column == domain_column:
            continue
        missing = np.isnan(table[:, j])
        if missing.any():
            if missing.all():
                raise DataError(f"La columna '{column}' no tiene valores numéricos")
            table[missing, j] = table[~missing, j].mean()
            logger.info("Columna '%s': %d valores faltantes rellenados con la media", column, int(missing.sum()))

    domain_ids = None
    if domain_column:
        j = columns.index(domain_column)
        codes, _ = pd.factorize(raw[j].str.strip(), sort=True)
        domain_ids = codes

    feature_columns = [c for c in columns if c not in label_columns and c != domain_column]
    feature_idx = [columns.index(c) for c in feature_columns]
    label_idx = [columns.index(c) for c in label_columns]

    dataset = Dataset(
        features=table[:, feature_idx],
        labels=table[:, label_idx],
        domain_ids=domain_ids,
        column_names=feature_columns,
    )
    logger.info("Dataset cargado desde %s: n=%d, d_x=%d, d_y=%d", path, dataset.n, dataset.d_x, dataset.d_y)
    return dataset
