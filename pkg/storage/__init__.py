"""Persistencia de resultados de experimentos."""

from .results import ExperimentResult, StorageError, aggregate, load_result, payload_equal, persist

__all__ = ["ExperimentResult", "StorageError", "aggregate", "load_result", "payload_equal", "persist"]
