#__init__.py
"""Comandos de la CLI, un archivo por grupo"""
import functools
import logging
from typing import Callable

import typer
from rich.console import Console

from ..exceptions import SplitNetError

console = Console()
logger = logging.getLogger(__name__)


def handle_errors(func: Callable) -> Callable:
    """Convierte SplitNetError en un mensaje y su código de salida"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SplitNetError as exc:
            logger.debug("Comando abortado", exc_info=exc)
            console.print(f"❌ {exc.detail}", markup=False)
            raise typer.Exit(code=exc.exit_code)
    return wrapper


def set_verbose(verbose: bool) -> None:
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
