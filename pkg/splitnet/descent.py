#descent.py
"""
Fase de descenso paramétrico: optimizadores de primer orden y detector de
convergencia que dispara la siguiente ronda de división.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import DivergenceError, NumericalError
from .loss import grad_norm, loss, param_grad, unweighted_gradients
from .models import Dataset, LossKind, LossTag, NetworkState, OptimMethod
from .schemas import ConvergenceSpec, OptimSpec, TraceRow

logger = logging.getLogger(__name__)

ADAGRAD_EPS = 1e-10
DIVERGED = "El descenso divergió (pérdida o parámetros no finitos)"


class Optimizer:
    """Actualiza una matriz de parámetros (n, d) a partir de su gradiente"""

    def __init__(self, lr: float):
        self.lr = lr

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class SGD(Optimizer):
    def step(self, params, grads):
        return params - self.lr * grads


class Momentum(Optimizer):
    """SGD con momento clásico: v ← μv + g, θ ← θ − lr·v"""

    def __init__(self, lr: float, momentum: float):
        super().__init__(lr)
        self.momentum = momentum
        self.velocity: Optional[np.ndarray] = None

    def step(self, params, grads):
        if self.velocity is None:
            self.velocity = np.zeros_like(params)
        self.velocity = self.momentum * self.velocity + grads
        return params - self.lr * self.velocity


class Adagrad(Optimizer):
    """Suma acumulada de g²; paso lr·g/(√suma + 1e-10)"""

    def __init__(self, lr: float):
        super().__init__(lr)
        self.state_sum: Optional[np.ndarray] = None

    def step(self, params, grads):
        if self.state_sum is None:
            self.state_sum = np.zeros_like(params)
        self.state_sum = self.state_sum + grads * grads
        return params - self.lr * grads / (np.sqrt(self.state_sum) + ADAGRAD_EPS)


def make_optimizer(spec: OptimSpec) -> Optimizer:
    """Optimizador nuevo, sin estado, para una fase de descenso"""
    if spec.method == OptimMethod.SGD_MOMENTUM:
        return Momentum(spec.learning_rate, spec.momentum)
    if spec.method == OptimMethod.ADAGRAD:
        return Adagrad(spec.learning_rate)
    return SGD(spec.learning_rate)


def _minibatch(data: Dataset, kind: LossKind, batch_size: Optional[int], rng) -> Tuple[Dataset, LossKind]:
    if batch_size is None:
        return data, kind
    if kind.tag == LossTag.MMD:
        size = kind.reference.shape[0]
        if batch_size >= size:
            return data, kind
        return data, kind.subset(rng.choice(size, batch_size, replace=False))
    if batch_size >= data.size:
        return data, kind
    return data.subset(rng.choice(data.size, batch_size, replace=False)), kind


def _masked(grads: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask[:, None], grads, 0.0)


def descend(
    net: NetworkState,
    data: Dataset,
    kind: LossKind,
    optim: OptimSpec,
    conv: ConvergenceSpec,
    rng: Optional[np.random.Generator] = None,
    trainable: Optional[np.ndarray] = None,
) -> Tuple[NetworkState, List[TraceRow]]:
    """
    Descenso de primer orden con arquitectura fija.

    Cada `check_every` iteraciones (incluida la 0) se evalúan la pérdida y la
    norma del gradiente con el lote completo; termina cuando √N·‖∇L‖ queda
    ≤ τ durante W chequeos consecutivos (N = tamaño del conjunto de datos) (y se alcanzó min_iters) o al llegar
    a max_iters. El estado de entrada no se modifica.

    Args:
        trainable: Máscara booleana (n,); las neuronas en False quedan congeladas

    Returns:
        (estado final, filas de traza (iter, loss, grad_norm))

    Raises:
        DivergenceError: Si la pérdida o los parámetros dejan de ser finitos;
            incluye el último estado finito y la traza
    """
    if net.n == 0:
        return net, [TraceRow(iter=0, loss=loss(net, data, kind), grad_norm=0.0)]

    mask = np.ones(net.n, dtype=bool) if trainable is None else np.asarray(trainable, dtype=bool)
    rng = rng if rng is not None else np.random.default_rng(0)
    optimizer = make_optimizer(optim)
    state = net
    params = net.neurons.copy()
    trace: List[TraceRow] = []
    small_checks = 0
    scale = math.sqrt(max(data.size, 1))
    it = 0

    def check() -> Tuple[TraceRow, np.ndarray]:
        value = loss(state, data, kind)
        grads = _masked(param_grad(state, data, kind), mask)
        return TraceRow(iter=it, loss=value, grad_norm=grad_norm(grads)), grads

    try:
        while True:
            checked = it % conv.check_every == 0
            full_grads = None
            if checked:
                row, full_grads = check()
                trace.append(row)
                logger.debug("iter %d: loss=%.10g ‖∇‖=%.3g", it, row.loss, row.grad_norm)
                small_checks = small_checks + 1 if row.grad_norm * scale <= conv.grad_norm_tol else 0
                if small_checks >= conv.window and it >= conv.min_iters:
                    logger.info("Convergencia en iter %d (loss=%.6g, n=%d)", it, row.loss, state.n)
                    break

            if it >= optim.max_iters:
                if not checked:
                    trace.append(check()[0])
                logger.info("max_iters=%d alcanzado (loss=%.6g, n=%d)", optim.max_iters, trace[-1].loss, state.n)
                break

            if full_grads is not None and optim.batch_size is None:
                grads = full_grads
            else:
                batch_data, batch_kind = _minibatch(data, kind, optim.batch_size, rng)
                grads = _masked(param_grad(state, batch_data, batch_kind), mask)

            params = optimizer.step(params, grads)
            if not np.all(np.isfinite(params)):
                raise DivergenceError(DIVERGED, last_state=state, trace=trace)
            state = state.replace(neurons=params)
            it += 1
    except DivergenceError:
        raise
    except NumericalError as exc:
        raise DivergenceError(DIVERGED, last_state=state, trace=trace) from exc

    return state, trace


def normalized_gradient_step(net: NetworkState, data: Dataset, kind: LossKind, epsilon: float) -> NetworkState:
    """
    Mueve cada neurona ε en la dirección −G(θ_ℓ)/‖G(θ_ℓ)‖.

    A primer orden la pérdida baja ε Σ_ℓ w_ℓ ‖G(θ_ℓ)‖.
    """
    G = unweighted_gradients(net, data, kind)
    norms = np.linalg.norm(G, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return net.replace(neurons=net.neurons - epsilon * G / safe[:, None])
