"""
Simulaciones de Monte-Carlo del ordenamiento de MSE entre mixup estándar,
mixup por similitud de features y C-Mixup (etiquetas).
"""

import logging
import time
from typing import Any, Dict, List

import numpy as np

from mixer import MixPolicy, sample_beta_many, sample_partners
from models import KernelRegressor, ridge_fit
from storage.results import ExperimentResult, aggregate
from synthgen import (
    CovariateShiftSpec,
    GeneratorError,
    SingleIndexSpec,
    check_shift_regime,
    gen_covariate_shift,
    gen_single_index,
    pairing_bandwidth,
    sample_single_index,
    spawn_rngs,
)
from .config import ConfigError, ExperimentConfig
from .parallel import run_seeds

logger = logging.getLogger(__name__)

POLICIES = ("uniform", "feature", "label")


def _spec(cls, options: Dict[str, Any], seed: int):
    try:
        return cls(**{**options, "seed": seed})
    except (TypeError, GeneratorError) as e:
        raise ConfigError(f"theorem.generator inválido: {e}")


def _policies(cfg: ExperimentConfig, label_sigma: float) -> Dict[str, MixPolicy]:
    th = cfg.theorem
    return {
        "uniform": MixPolicy(metric="uniform", beta_alpha=th.beta_alpha),
        "feature": MixPolicy(metric="feature", bandwidth_sigma=th.feature_sigma, beta_alpha=th.beta_alpha),
        "label": MixPolicy(metric="label", bandwidth_sigma=label_sigma, beta_alpha=th.beta_alpha),
    }


def _ordering(values: Dict[str, float]) -> bool:
    return values["label"] < min(values["uniform"], values["feature"])


# Índice simple con error de medición

def run_theorem1_seed(cfg: ExperimentConfig, seed: int) -> List[Dict[str, Any]]:
    th = cfg.theorem
    spec = _spec(SingleIndexSpec, th.generator, seed)
    ds, truth = gen_single_index(spec)
    # Hijos 2 y 3: distintos de los usados por el generador
    test_rng, mix_rng = spawn_rngs(seed, 4)[2:]
    x_test, y_test, _, _ = sample_single_index(spec, truth.theta, th.n_test, test_rng)

    record: Dict[str, Any] = {"seed": seed, "status": "ok"}
    mse: Dict[str, float] = {}
    for name, policy in _policies(cfg, th.label_sigma).items():
        partners = sample_partners(ds, policy, mix_rng)
        lam = sample_beta_many(policy.beta_alpha, ds.n, mix_rng)[:, None]
        x_mix = lam * ds.features + (1.0 - lam) * ds.features[partners]
        y_mix = lam * ds.labels + (1.0 - lam) * ds.labels[partners]

        theta_hat = ridge_fit(x_mix, y_mix, k=0.0).coef
        theta_hat = theta_hat / max(np.linalg.norm(theta_hat), 1e-12)
        g_hat = KernelRegressor.fit(x_mix @ theta_hat, y_mix[:, 0], kernel=th.kernel, bandwidth_h=th.kernel_h)
        pred = g_hat.predict(x_test @ theta_hat)

        mse[name] = float(np.mean((y_test - pred) ** 2))
        record[f"mse_{name}"] = mse[name]
        record[f"same_cluster_{name}"] = float(np.mean(truth.clusters[partners] == truth.clusters))
        record[f"cosine_{name}"] = float(abs(theta_hat @ truth.theta))

    record["ordering_holds"] = _ordering(mse)
    logger.info("theorem1, semilla %d: %s", seed, {k: round(v, 5) for k, v in mse.items()})
    return [record]


def run_theorem1(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """
    Por semilla: genera datos, aumenta con cada política, estima θ̂ por mínimos
    cuadrados sobre los pares mezclados y ĝ con el regresor de kernel, y mide
    el MSE sobre una muestra de prueba nueva. Reporta la fracción de semillas
    en las que C-Mixup tiene el MSE estrictamente menor.
    """
    started = time.perf_counter()
    records = run_seeds(run_theorem1_seed, cfg, cfg.seeds, jobs)
    keys = [f"{m}_{p}" for m in ("mse", "same_cluster", "cosine") for p in POLICIES]
    summary = {
        "ordering_fraction": float(np.mean([r["ordering_holds"] for r in records])),
        "n_seeds": len(records),
    }
    return ExperimentResult(
        kind=cfg.kind,
        config=cfg.to_dict(),
        seeds=sorted(cfg.seeds),
        records=records,
        aggregates=aggregate(records, keys),
        summary=summary,
        wall_clock_seconds=time.perf_counter() - started,
    )


# Desplazamiento de covariables

def validate_theorem3(cfg: ExperimentConfig) -> None:
    """
    Rechaza la configuración si el régimen declarado viola las desigualdades.

    Raises:
        ConfigError: Con la lista de desigualdades fallidas.
    """
    th = cfg.theorem
    spec = _spec(CovariateShiftSpec, th.generator, cfg.seeds[0])
    failures = check_shift_regime(spec, th.penalty_k, th.delta)
    if failures and th.enforce_regime:
        raise ConfigError("Régimen inválido; fallan: " + "; ".join(failures))
    if failures:
        logger.warning("Régimen fuera de las hipótesis (enforce_regime=false): %s", failures)


def run_theorem3_seed(cfg: ExperimentConfig, seed: int) -> List[Dict[str, Any]]:
    th = cfg.theorem
    spec = _spec(CovariateShiftSpec, th.generator, seed)
    train, test_flip, truth = gen_covariate_shift(spec.with_changes(test_shift="flip"), flip_test=True)
    _, test_scale, _ = gen_covariate_shift(spec.with_changes(test_shift="scale"), flip_test=True)
    mix_rng = spawn_rngs(seed, 4)[3]

    anchors = np.flatnonzero(train.domain_ids == 0)
    candidates = np.flatnonzero(train.domain_ids == 1)
    h = pairing_bandwidth(train, spec.p1, th.bandwidth_scale)
    theta = truth.theta
    p1 = spec.p1

    record: Dict[str, Any] = {"seed": seed, "status": "ok", "label_bandwidth": h}
    param_error, mse_flip, mse_scale, a_norm = {}, {}, {}, {}
    for name, policy in _policies(cfg, h).items():
        partners = sample_partners(train, policy, mix_rng, anchor_indices=anchors,
                                   candidate_indices=candidates, exclude_self=False)
        lam = th.mix_lambda
        x_mix = lam * train.features[anchors] + (1.0 - lam) * train.features[partners]
        y_mix = lam * train.labels[anchors] + (1.0 - lam) * train.labels[partners]
        theta_hat = ridge_fit(x_mix, y_mix, k=th.penalty_k).coef

        param_error[name] = float(np.sum((theta_hat - theta) ** 2))
        mse_flip[name] = float(np.mean((test_flip.labels[:, 0] - test_flip.features @ theta_hat) ** 2))
        mse_scale[name] = float(np.mean((test_scale.labels[:, 0] - test_scale.features @ theta_hat) ** 2))
        a_norm[name] = float(np.mean(np.sum(x_mix[:, p1:] ** 2, axis=1))) if spec.p2 else 0.0
        record[f"param_error_{name}"] = param_error[name]
        record[f"mse_flip_{name}"] = mse_flip[name]
        record[f"mse_scale_{name}"] = mse_scale[name]
        record[f"a_block_sq_norm_{name}"] = a_norm[name]
        if name == "label":
            matched = int(np.sum(partners == truth.pair_of[anchors]))
            record["paired_count"] = matched
            record["pairing_bound_holds"] = bool(matched >= spec.n - spec.p1 / 2)

    record["a_block_ratio"] = a_norm["label"] / a_norm["uniform"] if a_norm["uniform"] > 0 else None
    record["ordering_param"] = _ordering(param_error)
    record["ordering_flip"] = _ordering(mse_flip)
    record["ordering_scale"] = _ordering(mse_scale)
    logger.info("theorem3, semilla %d: pares %d/%d, orden (flip, scale) = (%s, %s)", seed,
                record["paired_count"], spec.n, record["ordering_flip"], record["ordering_scale"])
    return [record]


def run_theorem3(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """
    Por semilla: genera el par de dominios, empareja cada fila del dominio 0
    con una del dominio 1 según cada política, mezcla con λ fijo, ajusta ridge
    con penalización k y mide el error de parámetros y el MSE de prueba bajo
    las dos variantes de desplazamiento.
    """
    validate_theorem3(cfg)
    started = time.perf_counter()
    records = run_seeds(run_theorem3_seed, cfg, cfg.seeds, jobs)
    keys = [f"{m}_{p}" for m in ("param_error", "mse_flip", "mse_scale", "a_block_sq_norm") for p in POLICIES]
    keys += ["paired_count", "a_block_ratio", "label_bandwidth"]
    summary = {
        "ordering_fraction_param": float(np.mean([r["ordering_param"] for r in records])),
        "ordering_fraction_flip": float(np.mean([r["ordering_flip"] for r in records])),
        "ordering_fraction_scale": float(np.mean([r["ordering_scale"] for r in records])),
        "pairing_bound_fraction": float(np.mean([r["pairing_bound_holds"] for r in records])),
        "n_seeds": len(records),
    }
    return ExperimentResult(
        kind=cfg.kind,
        config=cfg.to_dict(),
        seeds=sorted(cfg.seeds),
        records=records,
        aggregates=aggregate(records, keys),
        summary=summary,
        wall_clock_seconds=time.perf_counter() - started,
    )
