#main_factory.py
import logging
from pathlib import Path
from typing import Optional

import typer
from rich.logging import RichHandler

from .commands import experiment_commands, run_commands, verify_commands
from .config import settings
from .storage import out_dir_context


def configure_logging(level: str = settings.LOG_LEVEL) -> None:
    """Registro raíz con RichHandler; se reconfigura en cada llamada"""
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True, show_path=False)],
        force=True,
    )


def create_app(out_dir_override: Optional[Path] = None) -> typer.Typer:
    """Factory para crear la aplicación de línea de comandos"""
    app = typer.Typer(
        name="splitnet",
        help="Crecimiento de redes por división de neuronas (splitting steepest descent)",
        no_args_is_help=True,
        add_completion=False,
    )
    configure_logging()

    # Directorio de salida de prueba si es necesario
    if out_dir_override is not None:
        logging.getLogger(__name__).debug("⚙️ Usando directorio de salida de prueba: %s", out_dir_override)
    out_dir_context.set(Path(out_dir_override) if out_dir_override is not None else None)

    app.command("run")(run_commands.run_experiment)
    app.command("verify")(verify_commands.verify)
    app.command("sweep-angle")(experiment_commands.sweep_angle)
    app.command("eigen-gain")(experiment_commands.eigen_gain)
    return app
