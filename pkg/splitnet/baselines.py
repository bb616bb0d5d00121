#baselines.py
"""
Métodos de crecimiento de comparación: división aleatoria, neurona nueva con
inicialización aleatoria, boosting por gradiente (Frank-Wolfe / herding) y la
red entrenada desde cero.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from .descent import descend
from .exceptions import SplitNetError
from .linalg import min_eigenpair
from .loss import loss
from .models import Dataset, DirectionMode, InitDistribution, LossKind, NetworkState, NeuronKind, NeuronTag, SplitEvent
from .schemas import ConvergenceSpec, InitSpec, OptimSpec
from .splitting import split_along, splitting_matrix

logger = logging.getLogger(__name__)

EMPTY_NETWORK = "La red no tiene neuronas para dividir"


def is_particle_system(kind: NeuronKind) -> bool:
    """Las partículas reparten siempre la masa total 1 en partes iguales"""
    return kind.tag == NeuronTag.KERNEL_PARTICLE


def sample_neurons(kind: NeuronKind, init: InitSpec, rng: np.random.Generator, count: int = 1) -> np.ndarray:
    """Parámetros iniciales (count, d) según la distribución configurada"""
    shape = (count, kind.dim)
    if init.distribution == InitDistribution.UNIFORM:
        return rng.uniform(init.low, init.high, size=shape)
    return rng.normal(init.mean, init.std, size=shape)


def _appended_weights(net: NetworkState, extra: int = 1) -> np.ndarray:
    if is_particle_system(net.kind):
        return np.full(net.n + extra, 1.0 / (net.n + extra))
    return np.concatenate([net.weights, np.ones(extra)])


def scratch_network(kind: NeuronKind, size: int, rng: np.random.Generator, init: InitSpec) -> NetworkState:
    """Red de tamaño final inicializada de una vez (línea base "desde cero")"""
    weights = np.full(size, 1.0 / size) if is_particle_system(kind) else np.ones(size)
    return NetworkState(kind=kind, neurons=sample_neurons(kind, init, rng, size), weights=weights)


def random_split(
    net: NetworkState,
    rng: np.random.Generator,
    epsilon: float = 1e-2,
    round: int = 0,
    mode: DirectionMode = DirectionMode.SPHERE,
    data: Optional[Dataset] = None,
    kind: Optional[LossKind] = None,
) -> Tuple[NetworkState, SplitEvent]:
    """
    Divide una neurona elegida al azar.

    SPHERE: dirección uniforme en la esfera unitaria.
    SPLITTING_GRADIENT: la neurona es aleatoria pero la dirección es su v_min
    (requiere `data` y `kind`).
    """
    if net.n == 0:
        raise SplitNetError(EMPTY_NETWORK)
    index = int(rng.integers(net.n))
    lambda_min = None
    if mode == DirectionMode.SPLITTING_GRADIENT:
        if data is None or kind is None:
            raise SplitNetError("SPLITTING_GRADIENT requiere datos y pérdida")
        pair = min_eigenpair(splitting_matrix(net, data, kind, index))
        direction, lambda_min = pair.vector, pair.value
    else:
        direction = rng.standard_normal(net.dim)
        direction = direction / np.linalg.norm(direction)

    new_net = split_along(net, index, direction, epsilon)
    event = SplitEvent(
        round=round,
        parent_index=index,
        lambda_min=lambda_min,
        epsilon=epsilon,
        children=(index, index + 1),
    )
    logger.info("División aleatoria ronda %d: neurona %d, n=%d", round, index, new_net.n)
    return new_net, event


def new_initialization(net: NetworkState, rng: np.random.Generator, init: InitSpec) -> NetworkState:
    """
    Agrega una neurona con parámetros aleatorios; las existentes no cambian.

    En sistemas de partículas todos los pesos pasan a 1/(n+1).
    """
    theta = sample_neurons(net.kind, init, rng, 1)
    return net.replace(neurons=np.vstack([net.neurons, theta]), weights=_appended_weights(net))


def gradient_boost_step(
    net: NetworkState,
    data: Dataset,
    kind: LossKind,
    inner_optim: OptimSpec,
    conv: ConvergenceSpec,
    rng: np.random.Generator,
    init: InitSpec,
    restarts: int = 5,
) -> Tuple[NetworkState, int]:
    """
    Agrega una neurona optimizada con las anteriores congeladas.

    Cada reinicio parte de un θ aleatorio y desciende solo sobre la neurona
    nueva; se queda el mejor por (pérdida, índice de reinicio). Los
    parámetros previos quedan idénticos bit a bit. El presupuesto
    `inner_optim.max_iters` se reparte entre los reinicios.

    Returns:
        (red con la neurona nueva, iteraciones gastadas en total)

    Raises:
        DivergenceError: Si el descenso interno diverge
    """
    weights = _appended_weights(net)
    mask = np.zeros(net.n + 1, dtype=bool)
    mask[-1] = True
    starts = sample_neurons(net.kind, init, rng, restarts)
    per_restart = inner_optim.model_copy(update={"max_iters": max(1, inner_optim.max_iters // restarts)})
    spent = 0

    best: Optional[Tuple[float, int, NetworkState]] = None
    for r in range(restarts):
        candidate = net.replace(neurons=np.vstack([net.neurons, starts[r][None, :]]), weights=weights)
        candidate, trace = descend(candidate, data, kind, per_restart, conv, rng=rng, trainable=mask)
        spent += trace[-1].iter
        value = loss(candidate, data, kind)
        logger.debug("Boosting reinicio %d: loss=%.10g", r, value)
        if best is None or (value, r) < (best[0], best[1]):
            best = (value, r, candidate)

    logger.info("Boosting: mejor reinicio %d, loss=%.6g, n=%d, %d iteraciones", best[1], best[0], best[2].n, spent)
    return best[2], spent
