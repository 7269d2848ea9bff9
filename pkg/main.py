#!/usr/bin/env python3
"""
cmixup-lab - Punto de entrada principal.

Uso:
    python main.py train --config configs/airfoil.json       # Brazos ERM / mixup / C-Mixup
    python main.py theorem1 --config configs/theorem1.json   # Simulación de índice simple
    python main.py theorem3 --config configs/theorem3.json   # Simulación de desplazamiento de covariables
    python main.py meta --config configs/meta.json           # MAML / MetaMix / C-Mixup
    python main.py sweep --config configs/sweep_sigma.json   # Barrido de σ o α
    python main.py invariance --config configs/invariance.json
    python main.py noise --config configs/noise.json         # Robustez a ruido de etiquetas
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

# Consola de Windows en UTF-8 (σ, λ y acentos en la salida)
if sys.platform == "win32":
    try:
        sys.stdout.reconfigure(encoding="utf-8")
        sys.stderr.reconfigure(encoding="utf-8")
    except (AttributeError, OSError):
        pass

from config.settings import settings
from data.dataset import DataError
from harness import ConfigError, ExperimentError, dump_pair_table, load_config, run_experiment
from metalearn import MetaLearnError
from mixer import MixerError
from models import ModelError
from storage.results import StorageError, persist
from synthgen import GeneratorError

# Subcomando -> tipos de experimento aceptados
COMMANDS = {
    "train": ("tabular-train",),
    "theorem1": ("theorem1",),
    "theorem3": ("theorem3",),
    "meta": ("meta",),
    "sweep": ("bandwidth-sweep", "alpha-sweep"),
    "invariance": ("invariance",),
    "noise": ("noise-robustness",),
}

DEFAULT_CONFIGS = {
    "train": "configs/airfoil.json",
    "theorem1": "configs/theorem1.json",
    "theorem3": "configs/theorem3.json",
    "meta": "configs/meta.json",
    "sweep": "configs/sweep_sigma.json",
    "invariance": "configs/invariance.json",
    "noise": "configs/noise.json",
}

KNOWN_ERRORS = (DataError, MixerError, ModelError, GeneratorError, MetaLearnError, ExperimentError, StorageError)


def print_banner():
    """Imprime el banner del sistema."""
    banner = f"""
+---------------------------------------------------------------+
|                                                               |
|  cmixup-lab: C-Mixup para regresión                           |
|                                                               |
|  Version: {settings.VERSION:<52}|
|                                                               |
+---------------------------------------------------------------+
"""
    print(banner)


def report_failure(kind: str, message: str, exit_code: int) -> int:
    """
    Imprime el error y escribe en stderr un resumen JSON legible por máquina.

    Returns:
        El código de salida recibido.
    """
    print(f"\n[ERROR] {message}")
    summary = {"status": "error", "kind": kind, "message": message, "exit_code": exit_code}
    print(json.dumps(summary, ensure_ascii=False), file=sys.stderr)
    return exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="cmixup-lab: mixup ponderado por distancia de etiquetas para regresión",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Ejemplos de uso:
  python main.py train --config configs/airfoil.json --seed 0 --seed 1
  python main.py train --config configs/airfoil.json --dump-pair-table pares.csv
  python main.py theorem3 --config configs/theorem3.json --jobs 4
  python main.py sweep --config configs/sweep_alpha.json --out results/alpha
        """
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Logging a nivel DEBUG')
    subparsers = parser.add_subparsers(dest='command', required=True)

    for command, kinds in COMMANDS.items():
        sub = subparsers.add_parser(command, help=f"Experimento {' / '.join(kinds)}")
        sub.add_argument(
            '--config',
            type=str,
            default=DEFAULT_CONFIGS[command],
            help=f'Archivo JSON de configuración (por defecto {DEFAULT_CONFIGS[command]})'
        )
        sub.add_argument(
            '--seed',
            type=int,
            action='append',
            help='Semilla a ejecutar (repetible); reemplaza la lista de la configuración'
        )
        sub.add_argument(
            '--out',
            type=str,
            help='Ruta base de resultados (se escriben .json y .csv)'
        )
        sub.add_argument(
            '--jobs',
            type=int,
            default=settings.DEFAULT_JOBS,
            help='Procesos paralelos para las semillas'
        )
        if command == "train":
            sub.add_argument(
                '--dump-pair-table',
                metavar='FILE',
                type=str,
                help='Exportar la tabla de pares a CSV (anchor, candidate, distance, probability) y salir'
            )
    return parser


def run(args: argparse.Namespace) -> int:
    """Carga la configuración, ejecuta el experimento y guarda resultados."""
    cfg = load_config(args.config)
    if cfg.kind not in COMMANDS[args.command]:
        raise ConfigError(
            f"El subcomando '{args.command}' espera kind en {COMMANDS[args.command]}, la configuración declara '{cfg.kind}'"
        )
    if args.seed:
        cfg = cfg.with_seeds(args.seed)

    if getattr(args, "dump_pair_table", None):
        path = dump_pair_table(cfg, args.dump_pair_table)
        print(f"[OK] Tabla de pares exportada: {path}")
        return 0

    if not settings.validate():
        raise StorageError(f"Directorio de salida inutilizable: {settings.OUTPUT_DIR}")

    print(f"[INFO] Experimento {cfg.kind} con semillas {list(cfg.seeds)}")
    result = run_experiment(cfg, jobs=args.jobs)
    paths = persist(result, cfg.output_path(args.out))

    for key, value in result.summary.items():
        print(f"   {key}: {value}")
    print(f"[OK] Resultados: {paths['json']} y {paths['csv']}")
    print(f"[INFO] Tiempo total: {result.wall_clock_seconds:.1f} s")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Función principal del programa."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        format=settings.LOG_FORMAT,
        level=logging.DEBUG if args.verbose else getattr(logging, settings.LOG_LEVEL, logging.INFO),
    )

    print_banner()
    try:
        return run(args)
    except ConfigError as e:
        return report_failure("ConfigError", str(e), 2)
    except KNOWN_ERRORS as e:
        return report_failure(type(e).__name__, str(e), 1)
    except KeyboardInterrupt:
        print("\n\n[WARN] Interrumpido por el usuario")
        return 130


if __name__ == "__main__":
    sys.exit(main())
