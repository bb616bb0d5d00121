#registry.py
"""
Registro de rutas analíticas y de los chequeos que las cubren.

Cada derivada analítica se marca con `@analytic_path(nombre)`; cada propiedad
de verificación declara qué rutas cubre. El reporte falla si alguna ruta
registrada no tiene su oráculo.
"""
from typing import Callable, Dict, Iterable, Set

ANALYTIC_PATHS: Set[str] = set()
COVERED_PATHS: Dict[str, str] = {}


def analytic_path(name: str) -> Callable:
    """Decorador que registra una derivada analítica"""
    def decorator(func: Callable) -> Callable:
        ANALYTIC_PATHS.add(name)
        return func
    return decorator


def mark_covered(paths: Iterable[str], property_name: str) -> None:
    """Asocia cada ruta con su único chequeo; dos chequeos para la misma ruta es un error"""
    for path in paths:
        owner = COVERED_PATHS.get(path)
        if owner is not None and owner != property_name:
            raise ValueError(f"La ruta '{path}' ya está cubierta por '{owner}'")
        COVERED_PATHS[path] = property_name


def uncovered_paths() -> Set[str]:
    """Rutas analíticas sin chequeo de diferencias finitas"""
    return ANALYTIC_PATHS - set(COVERED_PATHS)
