#oracles.py
"""
Oráculos numéricos independientes: diferencias finitas centrales, ajuste del
orden de Taylor y medición directa de la ganancia de una división.
"""
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from ..descent import descend
from ..exceptions import NumericalError, SplitNetError
from ..linalg import SymMatrix, as_vec
from ..loss import loss
from ..models import Dataset, LossKind, NetworkState, SplitCandidate
from ..schemas import ConvergenceSpec, FDSpec, OptimSpec
from ..splitting import split_along

RESIDUAL_FLOOR = 1e-13
MIN_EPSILONS = 4
MIN_DECADES = 1.5

NON_FINITE_EVAL = "Evaluación no finita durante diferencias finitas"


def _eval(f: Callable, theta: np.ndarray) -> float:
    value = float(f(theta))
    if not math.isfinite(value):
        raise NumericalError(NON_FINITE_EVAL)
    return value


def fd_grad(f: Callable[[np.ndarray], float], theta, spec: FDSpec = FDSpec()) -> np.ndarray:
    """Gradiente por diferencias centrales, una coordenada a la vez"""
    theta = as_vec(theta)
    h = spec.step
    grad = np.zeros_like(theta)
    for i in range(theta.shape[0]):
        e = np.zeros_like(theta)
        e[i] = h
        grad[i] = (_eval(f, theta + e) - _eval(f, theta - e)) / (2.0 * h)
    return grad


def fd_jacobian(g: Callable[[np.ndarray], np.ndarray], theta, spec: FDSpec = FDSpec()) -> np.ndarray:
    """Jacobiano (m, d) de una función vectorial por diferencias centrales"""
    theta = as_vec(theta)
    h = spec.step
    columns = []
    for i in range(theta.shape[0]):
        e = np.zeros_like(theta)
        e[i] = h
        plus = np.asarray(g(theta + e), dtype=float).reshape(-1)
        minus = np.asarray(g(theta - e), dtype=float).reshape(-1)
        if not (np.all(np.isfinite(plus)) and np.all(np.isfinite(minus))):
            raise NumericalError(NON_FINITE_EVAL)
        columns.append((plus - minus) / (2.0 * h))
    return np.column_stack(columns)


def fd_hessian(f: Callable[[np.ndarray], float], theta, spec: FDSpec = FDSpec()) -> SymMatrix:
    """
    Hessiano por segundas diferencias centrales, simetrizado.

    Diagonal: (f(θ+he_i) − 2f(θ) + f(θ−he_i))/h²
    Cruzados: (f(++) − f(+−) − f(−+) + f(−−))/(4h²)
    """
    theta = as_vec(theta)
    h = spec.step
    d = theta.shape[0]
    f0 = _eval(f, theta)
    H = np.zeros((d, d))
    basis = np.eye(d) * h
    for i in range(d):
        H[i, i] = (_eval(f, theta + basis[i]) - 2.0 * f0 + _eval(f, theta - basis[i])) / (h * h)
        for j in range(i + 1, d):
            H[i, j] = (
                _eval(f, theta + basis[i] + basis[j])
                - _eval(f, theta + basis[i] - basis[j])
                - _eval(f, theta - basis[i] + basis[j])
                + _eval(f, theta - basis[i] - basis[j])
            ) / (4.0 * h * h)
            H[j, i] = H[i, j]
    return SymMatrix(data=H)


def relative_error(measured, reference, floor: float = 1e-12) -> float:
    """‖measured − reference‖ / max(‖reference‖, floor)"""
    measured = np.asarray(measured, dtype=float)
    reference = np.asarray(reference, dtype=float)
    return float(np.linalg.norm(measured - reference) / max(np.linalg.norm(reference), floor))


class OrderFit(BaseModel):
    """Pendiente log-log del residuo frente a ε"""
    model_config = ConfigDict(frozen=True)

    epsilons: List[float]
    residuals: List[float]
    slope: Optional[float] = None

    @field_validator("epsilons")
    @classmethod
    def strictly_decreasing(cls, v):
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("Los ε deben ser estrictamente decrecientes")
        return v

    @field_validator("residuals")
    @classmethod
    def finite_nonnegative(cls, v):
        if any(not math.isfinite(r) or r < 0 for r in v):
            raise ValueError("Los residuos deben ser finitos y no negativos")
        return v

    @property
    def at_floor(self) -> bool:
        return self.slope is None

    def verdict(self, min_slope: float) -> str:
        if self.at_floor:
            return "PASS-BY-FLOOR"
        return "PASS" if self.slope >= min_slope else "FAIL"


def order_fit(measure: Callable[[float], float], epsilons: Sequence[float]) -> OrderFit:
    """
    Ajuste por mínimos cuadrados de log residuo vs log ε.

    Los residuos bajo 1e-13 quedan fuera del ajuste; si quedan menos de dos
    puntos la pendiente es None (PASS-BY-FLOOR).

    Raises:
        SplitNetError: Con menos de 4 valores de ε o menos de 1.5 décadas
    """
    eps = sorted((float(e) for e in epsilons), reverse=True)
    if len(eps) < MIN_EPSILONS or math.log10(eps[0] / eps[-1]) < MIN_DECADES:
        raise SplitNetError("order_fit requiere ≥ 4 valores de ε que abarquen ≥ 1.5 décadas")
    residuals = [abs(float(measure(e))) for e in eps]

    usable = [(e, r) for e, r in zip(eps, residuals) if r >= RESIDUAL_FLOOR]
    slope = None
    if len(usable) >= 2:
        x = np.log([e for e, _ in usable])
        y = np.log([r for _, r in usable])
        slope = float(np.polyfit(x, y, 1)[0])
    return OrderFit(epsilons=eps, residuals=residuals, slope=slope)


def measure_direction_gain(
    net: NetworkState,
    data: Dataset,
    kind: LossKind,
    index: int,
    direction,
    epsilon: float,
    retrain: Optional[OptimSpec] = None,
    conv: Optional[ConvergenceSpec] = None,
) -> float:
    """
    loss(antes) − loss(después de dividir `index` a lo largo de `direction`).

    Con `retrain` la red dividida vuelve a descender antes de medir; la red de
    entrada no cambia.
    """
    before = loss(net, data, kind)
    after_net = split_along(net, index, direction, epsilon)
    if retrain is not None:
        after_net, _ = descend(after_net, data, kind, retrain, conv or ConvergenceSpec(), rng=np.random.default_rng(0))
    return before - loss(after_net, data, kind)


def measure_split_gain(
    net: NetworkState,
    data: Dataset,
    kind: LossKind,
    candidate: SplitCandidate,
    epsilon: float,
    retrain: Optional[OptimSpec] = None,
    conv: Optional[ConvergenceSpec] = None,
) -> float:
    """Ganancia medida al dividir a lo largo del gradiente de división del candidato"""
    return measure_direction_gain(
        net, data, kind, candidate.neuron_index, candidate.splitting_gradient, epsilon, retrain, conv
    )
