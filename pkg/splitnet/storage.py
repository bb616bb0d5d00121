#storage.py
from contextvars import ContextVar
from pathlib import Path
from typing import Optional

from .config import settings

DEFAULT_OUT_DIR = "out"

# Directorio de prueba (override)
out_dir_context: ContextVar[Optional[Path]] = ContextVar("out_dir_context", default=None)


def resolve_out_dir(cli_value: Optional[str] = None, config_value: Optional[str] = None) -> Path:
    """
    Directorio de salida con precedencia: override de pruebas > flag de la CLI >
    SPLITNET_OUT_DIR > archivo de configuración > `out/`.
    """
    override = out_dir_context.get()
    if override is not None:
        return Path(override)
    for candidate in (cli_value, settings.OUT_DIR, config_value):
        if candidate:
            return Path(candidate)
    return Path(DEFAULT_OUT_DIR)


def prepare_out_dir(path: Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
