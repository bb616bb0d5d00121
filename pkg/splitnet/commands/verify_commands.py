#verify_commands.py
from typing import List, Optional

import typer

from ..storage import prepare_out_dir, resolve_out_dir
from ..verify.properties import PROPERTIES, run_properties
from ..verify.report import report
from . import console, handle_errors, set_verbose

UNKNOWN_PROPERTY = "Propiedad desconocida"


@handle_errors
def verify(
    full: bool = typer.Option(False, "--full", help="Incluye las propiedades a escala de experimento"),
    out: Optional[str] = typer.Option(None, "--out", help="Directorio del reporte"),
    only: Optional[List[str]] = typer.Option(None, "--only", help="Ejecuta solo las propiedades nombradas"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Chequeos numéricos de derivadas, teoremas de división e invariantes"""
    set_verbose(verbose)
    for name in only or []:
        if name not in PROPERTIES:
            console.print(f"❌ {UNKNOWN_PROPERTY}: {name}", markup=False)
            raise typer.Exit(code=2)
    out_dir = prepare_out_dir(resolve_out_dir(out))
    console.print(f"🔄 Verificando ({'completo' if full else 'rápido'})...")
    code = report(run_properties(full=full, names=only or None), out_dir, console)
    if code:
        raise typer.Exit(code=code)
