#splitting.py
"""
Matrices de división por neurona, selección de neuronas y aplicación de
divisiones (pasos 2 a 4 del ciclo de crecimiento).
"""
import logging
from typing import Dict, List, Tuple

import numpy as np

from .exceptions import SplitNetError, StaleCandidateError
from .linalg import SymMatrix, as_vec, min_eigenpair
from .loss import hessian_T, outer_atoms
from .models import Dataset, LossKind, NetworkState, SplitCandidate, SplitEvent
from .neurons import hess_many
from .schemas import SplitPolicy
from .verify.registry import analytic_path

logger = logging.getLogger(__name__)

INDEX_OUT_OF_RANGE = "Índice de neurona fuera de rango"
STALE_CANDIDATE = "El candidato no corresponde al estado actual de la red"
ZERO_DIRECTION = "La dirección de división no puede ser nula"


def _check_index(net: NetworkState, index: int) -> None:
    if not 0 <= index < net.n:
        raise SplitNetError(f"{INDEX_OUT_OF_RANGE}: {index} (n={net.n})")


def _matrix_from_atoms(net: NetworkState, points: np.ndarray, coef: np.ndarray, index: int) -> SymMatrix:
    H = hess_many(net.kind, net.neurons[index][None, :], points)[0]     # (M, d, d)
    return SymMatrix(data=net.weights[index] * np.einsum("a,aij->ij", coef, H))


@analytic_path("splitting_matrix")
def splitting_matrix(net: NetworkState, data: Dataset, kind: LossKind, index: int) -> SymMatrix:
    """
    Matriz de división S^[ℓ] = w_ℓ E[Φ′ ∇²_θθσ(θ_ℓ, x)].

    Para MMD equivale a 2 w_ℓ (Σ_j w_j ∇²k(θ_ℓ, θ_j) − E[∇²k(θ_ℓ, θ*)]).

    Raises:
        SplitNetError: Si el índice está fuera de rango
    """
    _check_index(net, index)
    points, coef = outer_atoms(net, data, kind)
    return _matrix_from_atoms(net, points, coef, index)


def _candidate(net: NetworkState, matrix: SymMatrix, index: int) -> SplitCandidate:
    pair = min_eigenpair(matrix)
    return SplitCandidate(
        neuron_index=index,
        splitting_index=pair.value,
        splitting_gradient=pair.vector,
        matrix=matrix,
        theta=net.neurons[index].copy(),
        weight=float(net.weights[index]),
    )


def splitting_candidates(net: NetworkState, data: Dataset, kind: LossKind) -> List[SplitCandidate]:
    """Un candidato por neurona; cada matriz depende solo de su propia neurona"""
    if net.n == 0:
        return []
    points, coef = outer_atoms(net, data, kind)
    return [_candidate(net, _matrix_from_atoms(net, points, coef, i), i) for i in range(net.n)]


def select_splits(candidates: List[SplitCandidate], policy: SplitPolicy) -> List[SplitCandidate]:
    """
    Hasta m* candidatos con menor índice de división, filtrados a λ_min ≤ λ*.

    Empates por índice de neurona ascendente.
    """
    eligible = [c for c in candidates if c.splitting_index <= policy.threshold]
    eligible.sort(key=lambda c: (c.splitting_index, c.neuron_index))
    return eligible[: policy.max_splits]


def predicted_change(candidate: SplitCandidate, epsilon: float) -> float:
    """Cambio de pérdida de segundo orden ε²λ_min/2 (negativo si λ_min < 0)"""
    return 0.5 * epsilon * epsilon * candidate.splitting_index


def _split_arrays(net: NetworkState, index: int, direction: np.ndarray, epsilon: float) -> NetworkState:
    theta = net.neurons[index]
    half = 0.5 * net.weights[index]
    neurons = np.vstack([
        net.neurons[:index],
        (theta + epsilon * direction)[None, :],
        (theta - epsilon * direction)[None, :],
        net.neurons[index + 1:],
    ])
    weights = np.concatenate([net.weights[:index], [half, half], net.weights[index + 1:]])
    return net.replace(neurons=neurons, weights=weights)


def _unit(direction, dim: int) -> np.ndarray:
    vec = as_vec(direction)
    if vec.shape[0] != dim:
        raise SplitNetError(f"Dirección de dimensión {vec.shape[0]}, se esperaba {dim}")
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise SplitNetError(ZERO_DIRECTION)
    return vec / norm


def split_along(net: NetworkState, index: int, direction, epsilon: float) -> NetworkState:
    """
    Divide la neurona `index` en dos copias de peso w/2 en θ ± ε·u.

    `direction` se normaliza; las hijas ocupan las posiciones index e index+1.
    """
    _check_index(net, index)
    return _split_arrays(net, index, _unit(direction, net.dim), epsilon)


def split_many(net: NetworkState, directions: Dict[int, np.ndarray], epsilon: float) -> NetworkState:
    """Divisiones simultáneas; los índices se refieren a la red original"""
    for index in directions:
        _check_index(net, index)
    out = net
    for index in sorted(directions, reverse=True):
        out = _split_arrays(out, index, _unit(directions[index], net.dim), epsilon)
    return out


def apply_split(net: NetworkState, candidate: SplitCandidate, epsilon: float, round: int = 0) -> Tuple[NetworkState, SplitEvent]:
    """
    Aplica un candidato: θ₁ = θ + εv_min, θ₂ = θ − εv_min, pesos w/2 y w/2.

    Raises:
        StaleCandidateError: Si la neurona cambió desde que se calculó el candidato
    """
    index = candidate.neuron_index
    if (
        index >= net.n
        or not np.array_equal(net.neurons[index], candidate.theta)
        or net.weights[index] != candidate.weight
    ):
        raise StaleCandidateError(f"{STALE_CANDIDATE} (neurona {index})")

    new_net = _split_arrays(net, index, candidate.splitting_gradient, epsilon)
    event = SplitEvent(
        round=round,
        parent_index=index,
        lambda_min=candidate.splitting_index,
        epsilon=epsilon,
        children=(index, index + 1),
    )
    logger.info(
        "División ronda %d: neurona %d, λ_min=%.6g, ε=%g, n=%d",
        round, index, candidate.splitting_index, epsilon, new_net.n,
    )
    return new_net, event


def split_round(
    net: NetworkState,
    data: Dataset,
    kind: LossKind,
    policy: SplitPolicy,
    round: int = 0,
) -> Tuple[NetworkState, List[SplitEvent]]:
    """
    Candidatos, selección y aplicación secuencial, de λ_min más negativo a menos.

    Tras cada inserción los índices pendientes mayores que el padre se
    desplazan en uno; no se re-optimiza entre divisiones de la misma ronda.
    """
    selected = select_splits(splitting_candidates(net, data, kind), policy)
    if not selected:
        logger.info("Ronda %d: ninguna neurona con λ_min ≤ %g", round, policy.threshold)
        return net, []

    events: List[SplitEvent] = []
    shift = {c.neuron_index: c.neuron_index for c in selected}
    for candidate in selected:
        current = shift[candidate.neuron_index]
        net, event = apply_split(
            net, candidate.model_copy(update={"neuron_index": current}), policy.epsilon, round
        )
        events.append(event)
        for original, mapped in shift.items():
            if mapped > current:
                shift[original] = mapped + 1
    return net, events


@analytic_path("hessian_decomposition")
def assembled_hessian(net: NetworkState, data: Dataset, kind: LossKind) -> np.ndarray:
    """∇²L ensamblado como blockdiag(S^[1], …, S^[n]) + T, forma (n·d, n·d)"""
    d = net.dim
    H = hessian_T(net, data, kind)
    points, coef = outer_atoms(net, data, kind)
    for i in range(net.n):
        H[i * d:(i + 1) * d, i * d:(i + 1) * d] += _matrix_from_atoms(net, points, coef, i).data
    return H
