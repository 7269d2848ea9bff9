"""
Configuración centralizada de cmixup-lab.
Carga variables de entorno desde .env y proporciona configuración global.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Cargar variables de entorno desde .env
BASE_DIR = Path(__file__).parent.parent
ENV_FILE = BASE_DIR / ".env"

if ENV_FILE.exists():
    load_dotenv(ENV_FILE)


class Settings:
    """Configuración global del sistema."""

    VERSION: str = "1.0.0"

    # Directorio de salida por defecto para resultados
    OUTPUT_DIR: Path = BASE_DIR / os.getenv("CMIXUP_OUTPUT_DIR", "results")

    # Raíz para resolver rutas relativas de datasets (Airfoil, NO2, ...)
    DATA_DIR: Path = BASE_DIR / os.getenv("CMIXUP_DATA_DIR", "data/raw")

    LOG_LEVEL: str = os.getenv("CMIXUP_LOG_LEVEL", "INFO").strip().upper()
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Procesos paralelos por defecto para correr semillas
    DEFAULT_JOBS: int = int(os.getenv("CMIXUP_JOBS", "1"))

    @classmethod
    def validate(cls) -> bool:
        """
        Valida que el directorio de salida exista o pueda crearse.

        Returns:
            bool: True si el directorio es utilizable, False en caso contrario.
        """
        try:
            cls.OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            print(f"[ERROR] No se puede crear el directorio de salida {cls.OUTPUT_DIR}: {e}")
            print("        Configura CMIXUP_OUTPUT_DIR en el archivo .env")
            return False
        return True

    @classmethod
    def resolve_data_path(cls, path: str, config_dir: Path = None) -> Path:
        """
        Resuelve la ruta de un dataset.

        Las rutas absolutas se respetan; las relativas se buscan primero en
        DATA_DIR y luego junto al archivo de configuración.

        Args:
            path: Ruta tal como aparece en la configuración.
            config_dir: Directorio del archivo de configuración (opcional).

        Returns:
            Path: Ruta resuelta (puede no existir).
        """
        candidate = Path(path)
        if candidate.is_absolute():
            return candidate
        in_data_dir = cls.DATA_DIR / candidate
        if in_data_dir.exists() or config_dir is None:
            return in_data_dir
        return Path(config_dir) / candidate


# Instancia global de configuración
settings = Settings()
