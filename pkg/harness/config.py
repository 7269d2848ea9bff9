"""
Configuración declarativa de experimentos (un archivo JSON por experimento).

Esquema (claves de primer nivel):

    kind        "tabular-train" | "theorem1" | "theorem3" | "meta" |
                "bandwidth-sweep" | "alpha-sweep" | "noise-robustness" | "invariance"
    seeds       lista no vacía de enteros
    output      ruta base de resultados (opcional; por defecto CMIXUP_OUTPUT_DIR/<kind>)
    arms        brazos de entrenamiento (tabular, noise, sweep, invariance)
    dataset     {path, label_columns, domain_column, normalize_features,
                 standardize_labels, pair_on_standardized_labels,
                 noise_std_fraction, split: {...}}  o  {synthetic: {generator, ...}}
    mix         {bandwidth_sigma, beta_alpha, site, manifold_site}
    training    {hidden_sizes, activation, lr, batch_size, epochs,
                 weight_decay, representation_refresh_epochs}
    theorem     parámetros de las simulaciones (ver TheoremConfig)
    meta        {generator: {...MetaTaskSpec}, maml: {...MetaConfig}, pairings}
    sweep       {parameter: "sigma" | "alpha", grid, arm, target: "tabular" | "theorem1" | "theorem3"}
    invariance  {generator: {...CovariateShiftSpec}, n_bins, grid_points, weight_decay, val_fraction}

Las claves desconocidas o los valores inválidos producen ConfigError.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from config.settings import settings
from data.splits import SplitSpec
from mixer.policy import MixerError, parse_site

logger = logging.getLogger(__name__)


class ConfigError(Exception):
    """Configuración inválida o régimen teórico violado."""
    pass


class ExperimentError(Exception):
    """Fallo durante la ejecución de un experimento."""
    pass


KINDS = (
    "tabular-train",
    "theorem1",
    "theorem3",
    "meta",
    "bandwidth-sweep",
    "alpha-sweep",
    "noise-robustness",
    "invariance",
)

ARMS = (
    "erm",
    "mixup",
    "manifold-mixup",
    "cmixup",
    "cmixup-batch",
    "cmixup-feature",
    "cmixup-feature-label",
    "cmixup-representation",
    "cmixup-representation-label",
)

GENERATORS = ("single-index", "covariate-shift")

SWEEP_TARGETS = ("tabular", "theorem1", "theorem3")


def _build(cls, data: Optional[Dict[str, Any]], section: str):
    """Instancia una dataclass desde un dict, rechazando claves desconocidas."""
    data = dict(data or {})
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"Claves desconocidas en '{section}': {unknown}")
    try:
        return cls(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Valor inválido en '{section}': {e}")


@dataclass(frozen=True)
class DatasetConfig:
    path: Optional[str] = None
    label_columns: Tuple[str, ...] = ()
    domain_column: Optional[str] = None
    synthetic: Optional[Dict[str, Any]] = None
    normalize_features: bool = True
    standardize_labels: bool = True
    pair_on_standardized_labels: bool = False
    noise_std_fraction: float = 0.0
    split: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "label_columns", tuple(self.label_columns))
        if (self.path is None) == (self.synthetic is None):
            raise ConfigError("dataset requiere exactamente uno de 'path' o 'synthetic'")
        if self.path is not None and not self.label_columns:
            raise ConfigError("dataset.label_columns no puede estar vacío")
        if self.synthetic is not None and self.synthetic.get("generator") not in GENERATORS:
            raise ConfigError(f"dataset.synthetic.generator debe ser uno de {GENERATORS}")
        if self.noise_std_fraction < 0:
            raise ConfigError("dataset.noise_std_fraction debe ser >= 0")
        spec = self.split_spec(0)
        try:
            spec.validate()
        except Exception as e:
            raise ConfigError(f"dataset.split inválido: {e}")

    def split_spec(self, seed: int) -> SplitSpec:
        """SplitSpec con la semilla de la corrida."""
        options = dict(self.split)
        unknown = sorted(set(options) - {f.name for f in fields(SplitSpec)} - {"seed"})
        if unknown:
            raise ConfigError(f"Claves desconocidas en 'dataset.split': {unknown}")
        options["seed"] = int(options.get("seed", seed))
        return SplitSpec(**options)


@dataclass(frozen=True)
class MixConfig:
    bandwidth_sigma: float = 1.0
    beta_alpha: float = 2.0
    site: Union[str, int] = "input"
    manifold_site: Union[str, int] = "hidden-1"

    def __post_init__(self):
        if not self.bandwidth_sigma > 0 or not self.beta_alpha > 0:
            raise ConfigError("mix.bandwidth_sigma y mix.beta_alpha deben ser > 0")
        try:
            parse_site(self.site)
            if parse_site(self.manifold_site) < 1:
                raise ConfigError("mix.manifold_site debe ser una capa oculta")
        except MixerError as e:
            raise ConfigError(f"mix: {e}")


@dataclass(frozen=True)
class TrainingConfig:
    hidden_sizes: Tuple[int, ...] = (128, 128)
    activation: str = "leaky-relu"
    lr: float = 1e-2
    batch_size: int = 32
    epochs: int = 100
    weight_decay: float = 0.0
    representation_refresh_epochs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if not self.hidden_sizes or min(self.hidden_sizes) < 1:
            raise ConfigError("training.hidden_sizes debe tener al menos una capa positiva")
        if self.lr < 0 or self.weight_decay < 0:
            raise ConfigError("training.lr y training.weight_decay deben ser >= 0")
        if self.batch_size < 1 or self.epochs < 1 or self.representation_refresh_epochs < 1:
            raise ConfigError("training.batch_size, epochs y representation_refresh_epochs deben ser >= 1")


@dataclass(frozen=True)
class TheoremConfig:
    """
    Parámetros de las simulaciones de ordenamiento de MSE.

    generator: campos de SingleIndexSpec (theorem1) o CovariateShiftSpec (theorem3).
    """

    generator: Dict[str, Any] = field(default_factory=dict)
    beta_alpha: float = 2.0
    feature_sigma: float = 1.0
    label_sigma: float = 0.1
    kernel: str = "gaussian"
    kernel_h: float = 0.05
    n_test: int = 2000
    penalty_k: float = 10.0
    delta: float = 0.1
    bandwidth_scale: float = 0.5
    mix_lambda: float = 0.5
    enforce_regime: bool = True

    def __post_init__(self):
        if min(self.beta_alpha, self.feature_sigma, self.label_sigma, self.kernel_h, self.bandwidth_scale) <= 0:
            raise ConfigError("theorem: anchos de banda, α y bandwidth_scale deben ser > 0")
        if self.penalty_k < 0 or self.n_test < 1:
            raise ConfigError("theorem.penalty_k debe ser >= 0 y n_test >= 1")
        if not 0.0 <= self.mix_lambda <= 1.0:
            raise ConfigError("theorem.mix_lambda debe estar en [0, 1]")


@dataclass(frozen=True)
class MetaExperimentConfig:
    generator: Dict[str, Any] = field(default_factory=dict)
    maml: Dict[str, Any] = field(default_factory=dict)
    pairings: Tuple[str, ...] = ("none", "uniform", "label")

    def __post_init__(self):
        object.__setattr__(self, "pairings", tuple(self.pairings))
        if not self.pairings:
            raise ConfigError("meta.pairings no puede estar vacío")


@dataclass(frozen=True)
class SweepConfig:
    parameter: str = "sigma"
    grid: Tuple[float, ...] = (0.01, 0.1, 1.0, 10.0, 100.0)
    arm: str = "cmixup"
    target: str = "tabular"

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        if self.parameter not in ("sigma", "alpha"):
            raise ConfigError(f"sweep.parameter debe ser 'sigma' o 'alpha', se recibió {self.parameter!r}")
        if not self.grid or min(self.grid) <= 0:
            raise ConfigError("sweep.grid debe ser no vacío y positivo")
        if self.arm not in ARMS:
            raise ConfigError(f"sweep.arm desconocido: {self.arm!r}")
        if self.target not in SWEEP_TARGETS:
            raise ConfigError(f"sweep.target debe ser uno de {SWEEP_TARGETS}, se recibió {self.target!r}")
        if self.target == "theorem3" and self.parameter == "alpha":
            # theorem3 mezcla con λ fijo: α no interviene
            raise ConfigError("sweep.parameter 'alpha' no aplica a theorem3 (λ fijo)")


@dataclass(frozen=True)
class InvarianceConfig:
    generator: Dict[str, Any] = field(default_factory=lambda: {"n": 300, "p1": 10, "p2": 5, "a_mean": 1.0})
    n_bins: int = 10
    grid_points: int = 512
    weight_decay: float = 1e-3
    val_fraction: float = 0.2

    def __post_init__(self):
        if self.n_bins < 1 or self.grid_points < 2:
            raise ConfigError("invariance.n_bins >= 1 y grid_points >= 2")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ConfigError("invariance.val_fraction debe estar en [0, 1)")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seeds: Tuple[int, ...]
    output: Optional[str] = None
    arms: Tuple[str, ...] = ("erm", "mixup", "cmixup")
    dataset: Optional[DatasetConfig] = None
    mix: MixConfig = field(default_factory=MixConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    theorem: TheoremConfig = field(default_factory=TheoremConfig)
    meta: MetaExperimentConfig = field(default_factory=MetaExperimentConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    invariance: InvarianceConfig = field(default_factory=InvarianceConfig)
    config_dir: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind desconocido: {self.kind!r}; opciones: {KINDS}")
        seeds = tuple(int(s) for s in self.seeds)
        if not seeds:
            raise ConfigError("seeds no puede estar vacío")
        object.__setattr__(self, "seeds", seeds)
        arms = tuple(self.arms)
        unknown = [a for a in arms if a not in ARMS]
        if unknown:
            raise ConfigError(f"Brazos desconocidos: {unknown}; opciones: {ARMS}")
        object.__setattr__(self, "arms", arms)
        needs_dataset = self.kind in ("tabular-train", "noise-robustness") or (
            self.kind in ("bandwidth-sweep", "alpha-sweep") and self.sweep.target == "tabular"
        )
        if needs_dataset and self.dataset is None:
            raise ConfigError(f"El experimento {self.kind!r} requiere la sección 'dataset'")

    def with_seeds(self, seeds) -> "ExperimentConfig":
        return replace(self, seeds=tuple(seeds))

    def output_path(self, override: Optional[str] = None) -> Path:
        if override:
            return Path(override)
        if self.output:
            return Path(self.output)
        return settings.OUTPUT_DIR / self.kind

    def dataset_path(self) -> Path:
        """Ruta resuelta del dataset (CMIXUP_DATA_DIR, luego el directorio de la configuración)."""
        if self.dataset is None or self.dataset.path is None:
            raise ConfigError("La configuración no declara un dataset en disco")
        path = settings.resolve_data_path(self.dataset.path, Path(self.config_dir) if self.config_dir else None)
        if not path.exists():
            raise ConfigError(f"dataset.path no existe: {path}")
        return path

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop("config_dir", None)
        return data


def config_from_dict(data: Dict[str, Any], config_dir: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """
    Construye ExperimentConfig desde un dict (JSON ya parseado).

    Raises:
        ConfigError: Claves desconocidas, faltantes o valores inválidos.
    """
    if not isinstance(data, dict):
        raise ConfigError("La configuración debe ser un objeto JSON")
    top = {f.name for f in fields(ExperimentConfig)} - {"config_dir"}
    unknown = sorted(set(data) - top)
    if unknown:
        raise ConfigError(f"Claves desconocidas: {unknown}")
    for required in ("kind", "seeds"):
        if required not in data:
            raise ConfigError(f"Falta la clave requerida '{required}'")

    try:
        return ExperimentConfig(
            kind=data["kind"],
            seeds=tuple(data["seeds"]),
            output=data.get("output"),
            arms=tuple(data.get("arms", ("erm", "mixup", "cmixup"))),
            dataset=_build(DatasetConfig, data["dataset"], "dataset") if data.get("dataset") is not None else None,
            mix=_build(MixConfig, data.get("mix"), "mix"),
            training=_build(TrainingConfig, data.get("training"), "training"),
            theorem=_build(TheoremConfig, data.get("theorem"), "theorem"),
            meta=_build(MetaExperimentConfig, data.get("meta"), "meta"),
            sweep=_build(SweepConfig, data.get("sweep"), "sweep"),
            invariance=_build(InvarianceConfig, data.get("invariance"), "invariance"),
            config_dir=str(config_dir) if config_dir is not None else None,
        )
    except TypeError as e:
        raise ConfigError(f"Valor inválido: {e}")


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Lee un archivo de configuración JSON.

    Raises:
        ConfigError: Archivo inexistente, JSON inválido o esquema violado.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Archivo de configuración no encontrado: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON inválido en {path}: {e}")
    cfg = config_from_dict(data, config_dir=path.parent)
    logger.info("Configuración cargada desde %s (kind=%s, semillas=%s)", path, cfg.kind, list(cfg.seeds))
    return cfg
