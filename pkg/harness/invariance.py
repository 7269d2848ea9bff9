"""
Diagnóstico de invariancia de la representación:
Inv = Σ_c Σ_{e, e'} KL(P(h | c, e) ‖ P(h | c, e')) / (C·E²),
con h la proyección 1-D (primera componente principal) de la última capa
oculta y densidades estimadas por KDE gaussiano.
"""

import logging
import time
from dataclasses import dataclass, replace
from typing import Any, Dict, List

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import gaussian_kde

from data.preprocessing import FeatureScaler
from storage.results import ExperimentResult, aggregate
from models import DivergenceError
from synthgen import CovariateShiftSpec, GeneratorError, gen_covariate_shift
from .config import ConfigError, ExperimentConfig, ExperimentError
from .parallel import run_seeds
from .trainer import arm_policy, train_fcn

logger = logging.getLogger(__name__)

# Piso de densidad para evaluar log(p/q) en la grilla
_DENSITY_FLOOR = 1e-300


@dataclass(frozen=True)
class InvarianceReport:
    score: float
    n_bins: int
    n_domains: int
    skipped_groups: int
    evaluated_pairs: int

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "n_bins": self.n_bins,
            "n_domains": self.n_domains,
            "skipped_groups": self.skipped_groups,
            "evaluated_pairs": self.evaluated_pairs,
        }


def first_principal_projection(hidden: np.ndarray) -> np.ndarray:
    """Proyección de los estados ocultos centrados sobre su primera dirección principal."""
    hidden = np.asarray(hidden, dtype=float)
    if hidden.ndim == 1:
        return hidden - hidden.mean()
    centered = hidden - hidden.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    return centered @ vt[0]


def kl_on_grid(p: np.ndarray, q: np.ndarray, grid: np.ndarray) -> float:
    """KL(p ‖ q) por regla del trapecio con ambas densidades renormalizadas en la grilla."""
    p = np.maximum(p, _DENSITY_FLOOR)
    q = np.maximum(q, _DENSITY_FLOOR)
    p = p / trapezoid(p, grid)
    q = q / trapezoid(q, grid)
    return float(max(trapezoid(p * np.log(p / q), grid), 0.0))


def invariance_score(hidden: np.ndarray, labels: np.ndarray, domains: np.ndarray,
                     n_bins: int = 10, grid_points: int = 512) -> InvarianceReport:
    """
    Args:
        hidden: Estados ocultos n × h (o proyección 1-D).
        labels: Etiquetas (se ordena por la primera columna).
        domains: Identificador de dominio por fila.
        n_bins: C, número de intervalos de igual conteo.
        grid_points: Puntos de la grilla de evaluación (±4 desviaciones agrupadas).

    Returns:
        InvarianceReport; grupos (intervalo, dominio) con < 2 puntos o varianza
        nula se omiten y se cuentan.
    """
    projection = first_principal_projection(hidden)
    y = np.asarray(labels, dtype=float).reshape(len(projection), -1)[:, 0]
    domains = np.asarray(domains).reshape(-1)
    unique_domains = np.unique(domains)
    E = unique_domains.size

    center = projection.mean()
    spread = projection.std()
    spread = spread if spread > 0 else 1.0
    grid = np.linspace(center - 4 * spread, center + 4 * spread, grid_points)

    total = 0.0
    skipped = 0
    evaluated = 0
    bins = np.array_split(np.argsort(y, kind="stable"), n_bins)
    for members in bins:
        densities = {}
        for e in unique_domains:
            points = projection[members[domains[members] == e]]
            if points.size < 2 or np.ptp(points) == 0:
                skipped += 1
                continue
            densities[e] = gaussian_kde(points)(grid)
        for e in densities:
            for e_prime in densities:
                if e != e_prime:
                    total += kl_on_grid(densities[e], densities[e_prime], grid)
                    evaluated += 1

    score = total / (n_bins * E ** 2)
    return InvarianceReport(score=float(score), n_bins=n_bins, n_domains=int(E),
                            skipped_groups=skipped, evaluated_pairs=evaluated)


def run_invariance_seed(cfg: ExperimentConfig, seed: int) -> List[Dict[str, Any]]:
    inv = cfg.invariance
    try:
        spec = CovariateShiftSpec(**{**inv.generator, "seed": seed})
    except (TypeError, GeneratorError) as e:
        raise ConfigError(f"invariance.generator inválido: {e}")
    train, _, _ = gen_covariate_shift(spec, flip_test=False)

    # Validación: últimos pares completos, para no separar x_i de x_i'
    n_val_pairs = int(round(spec.n * inv.val_fraction))
    cut = 2 * (spec.n - n_val_pairs)
    fit_part = train.subset(np.arange(cut))
    val_part = train.subset(np.arange(cut, train.n)) if n_val_pairs else None
    scaler = FeatureScaler.fit(fit_part.features)
    fit_part = scaler.transform(fit_part)
    val_part = scaler.transform(val_part) if val_part is not None else None

    training = replace(cfg.training, weight_decay=inv.weight_decay)
    records = []
    for arm in cfg.arms:
        try:
            outcome = train_fcn(fit_part, val_part, arm_policy(arm, cfg.mix), training, seed)
        except DivergenceError as e:
            logger.warning("Invariancia, semilla %d, brazo %s: divergencia en el paso %s", seed, arm, e.step)
            records.append({"seed": seed, "arm": arm, "status": "diverged", "error": str(e), "step": e.step})
            continue
        hidden = outcome.model.hidden(fit_part.features)
        report = invariance_score(hidden, fit_part.labels, fit_part.domain_ids, inv.n_bins, inv.grid_points)
        records.append({"seed": seed, "arm": arm, "status": "ok", "inv": report.score,
                        "skipped_groups": report.skipped_groups, "best_epoch": outcome.best_epoch})
        logger.info("Invariancia, semilla %d, brazo %s: Inv = %.5f", seed, arm, report.score)
    return records


def run_invariance(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """
    Entrena cada brazo sobre el par de dominios sintético y calcula el
    puntaje de invariancia de la última capa oculta. Menor es más invariante.
    Las semillas donde ERM o C-Mixup divergieron no entran en la comparación.

    Raises:
        ExperimentError: Todas las corridas divergieron.
    """
    started = time.perf_counter()
    records = run_seeds(run_invariance_seed, cfg, cfg.seeds, jobs)
    if all(r["status"] == "diverged" for r in records):
        raise ExperimentError(f"Las {len(records)} corridas (brazo, semilla) divergieron; no hay puntajes")
    summary: Dict[str, Any] = {"n_seeds": len(cfg.seeds), "diverged": sum(1 for r in records if r["status"] != "ok")}
    if "erm" in cfg.arms and "cmixup" in cfg.arms:
        by_seed: Dict[int, Dict[str, float]] = {}
        for r in records:
            if r["status"] == "ok":
                by_seed.setdefault(r["seed"], {})[r["arm"]] = r["inv"]
        comparable = [v for v in by_seed.values() if "cmixup" in v and "erm" in v]
        summary["cmixup_below_erm_fraction"] = (
            float(np.mean([v["cmixup"] < v["erm"] for v in comparable])) if comparable else None
        )
    return ExperimentResult(
        kind=cfg.kind,
        config=cfg.to_dict(),
        seeds=sorted(cfg.seeds),
        records=records,
        aggregates=aggregate(records, ("inv",), group_by="arm"),
        summary=summary,
        wall_clock_seconds=time.perf_counter() - started,
    )
