#exceptions.py
from typing import Optional


class SplitNetError(Exception):
    """Error base del proyecto, con detalle legible y código de salida para la CLI"""
    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ConfigError(SplitNetError):
    """Configuración inválida (clave desconocida, valor fuera de rango)"""
    exit_code = 2

    def __init__(self, detail: str, key: Optional[str] = None):
        super().__init__(detail)
        self.key = key


class NumericalError(SplitNetError):
    """Entrada con NaN/Inf o evaluación no finita"""
    exit_code = 3


class DimensionError(SplitNetError):
    """Dimensión de θ incompatible con el tipo de neurona"""
    exit_code = 3


class StaleCandidateError(SplitNetError):
    """El candidato de división ya no corresponde a la red actual"""
    exit_code = 3


class SweepRefusedError(SplitNetError):
    """Barrido de ángulos sin sentido (λ_min ≥ 0)"""
    exit_code = 3


class DivergenceError(NumericalError):
    """
    La pérdida se volvió NaN/Inf durante el descenso.

    Guarda el último estado finito y la traza para diagnóstico.
    """

    def __init__(self, detail: str, last_state=None, trace=None):
        super().__init__(detail)
        self.last_state = last_state
        self.trace = trace or []
