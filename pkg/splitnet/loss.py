#loss.py
"""
Funcionales de pérdida y sus derivadas exteriores.

Ambas pérdidas son, a primer orden, lineales en σ a través de una medida con
signo (puntos, coeficientes):

    SQUARED_ERROR: puntos = entradas x_p, coef_p = Φ′(x_p)/N = −2(y_p − f(x_p))/N
    MMD:           puntos = partículas θ_j y referencias θ*_r,
                   coef = (2w_j, −2/N_r)

de modo que ∇_{θ_ℓ}L = w_ℓ Σ_a coef_a ∇σ(θ_ℓ, a) y
S^[ℓ] = w_ℓ Σ_a coef_a ∇²σ(θ_ℓ, a).
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np

from .exceptions import DimensionError, NumericalError, SplitNetError
from .models import Dataset, LossKind, LossTag, NetworkState, NeuronTag
from .neurons import forward_batch, grad_many, hess_many
from .verify.registry import analytic_path

logger = logging.getLogger(__name__)

MISSING_TARGETS = "SQUARED_ERROR requiere objetivos y en el conjunto de datos"
MMD_NEEDS_PARTICLES = "MMD requiere neuronas de tipo KERNEL_PARTICLE"
NON_FINITE_LOSS = "La pérdida no es finita"
MEDIAN_SUBSAMPLE = 1000


def _check_compat(net: NetworkState, data: Dataset, kind: LossKind) -> None:
    if kind.tag == LossTag.SQUARED_ERROR:
        if data.targets is None:
            raise SplitNetError(MISSING_TARGETS)
        return
    if net.kind.tag != NeuronTag.KERNEL_PARTICLE:
        raise SplitNetError(MMD_NEEDS_PARTICLES)
    if kind.reference.shape[1] != net.kind.input_dim:
        raise DimensionError(
            f"Referencia de dimensión {kind.reference.shape[1]} para partículas de dimensión {net.kind.input_dim}"
        )


def _gram(bandwidth: float, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    diff = A[:, None, :] - B[None, :, :]
    return np.exp(-0.5 * np.sum(diff * diff, axis=2) / bandwidth ** 2)


def _reference_term(kind: LossKind, bandwidth: float) -> float:
    """E[k(θ*, θ*′)] sobre la referencia; no depende de la red y se guarda en caché"""
    key = ("self", bandwidth)
    if key not in kind._cache:
        kind._cache[key] = float(np.mean(_gram(bandwidth, kind.reference, kind.reference)))
    return kind._cache[key]


def mmd_of_measure(points: np.ndarray, weights: np.ndarray, kind: LossKind, bandwidth: float) -> float:
    """
    MMD² (estadístico V) entre la medida Σ w_j δ_{θ_j} y la referencia uniforme.

    Los pesos pueden tener cualquier signo, lo que permite perturbar la medida
    en direcciones arbitrarias.
    """
    points = np.asarray(points, dtype=float).reshape(-1, kind.reference.shape[1])
    weights = np.asarray(weights, dtype=float).reshape(-1)
    value = _reference_term(kind, bandwidth)
    if points.shape[0]:
        value += float(weights @ _gram(bandwidth, points, points) @ weights)
        value -= 2.0 * float(weights @ np.mean(_gram(bandwidth, points, kind.reference), axis=1))
    return value


def loss(net: NetworkState, data: Dataset, kind: LossKind) -> float:
    """
    Pérdida empírica exacta.

    SQUARED_ERROR: (1/N) Σ (y_p − f(x_p))²
    MMD: E[k(θ,θ′)] − 2E[k(θ,θ*)] + E[k(θ*,θ*′)] en forma cerrada; para MMD las
    partículas de referencia viven en `kind` y `data` no interviene.

    Raises:
        SplitNetError: Si la red, los datos y la pérdida no son compatibles
        NumericalError: Si el resultado no es finito
    """
    _check_compat(net, data, kind)
    if kind.tag == LossTag.SQUARED_ERROR:
        residual = data.targets - forward_batch(net, data.inputs)
        value = float(np.mean(residual * residual))
    else:
        value = mmd_of_measure(net.neurons, net.weights, kind, net.kind.bandwidth)
    if not math.isfinite(value):
        raise NumericalError(NON_FINITE_LOSS)
    return value


@analytic_path("outer_derivs")
def outer_derivs(net: NetworkState, x, kind: LossKind, target: Optional[float] = None) -> Tuple[float, float]:
    """
    Derivadas exteriores (Φ′, Φ″) en un punto.

    SQUARED_ERROR: Φ′ = −2(y − f(x)), Φ″ = 2; requiere `target`.
    MMD: derivada funcional de la pérdida respecto a la masa puesta en x,
    Φ′(x) = 2(Σ_j w_j k(x, θ_j) − E[k(x, θ*)]), Φ″ = 2.
    """
    if kind.tag == LossTag.SQUARED_ERROR:
        if target is None:
            raise SplitNetError(MISSING_TARGETS)
        f = float(forward_batch(net, np.asarray(x, dtype=float).reshape(1, -1))[0])
        return -2.0 * (float(target) - f), 2.0

    if net.kind.tag != NeuronTag.KERNEL_PARTICLE:
        raise SplitNetError(MMD_NEEDS_PARTICLES)
    point = np.asarray(x, dtype=float).reshape(1, -1)
    h = net.kind.bandwidth
    model_part = float(net.weights @ _gram(h, net.neurons, point)[:, 0]) if net.n else 0.0
    reference_part = float(np.mean(_gram(h, point, kind.reference)))
    return 2.0 * (model_part - reference_part), 2.0


def outer_atoms(net: NetworkState, data: Dataset, kind: LossKind) -> Tuple[np.ndarray, np.ndarray]:
    """
    Medida con signo (puntos, coeficientes) que linealiza la pérdida en σ.

    Returns:
        points: (M, p) puntos donde se evalúa σ(θ, ·)
        coef: (M,) coeficientes; Σ_a coef_a g(a) = E[Φ′ g]
    """
    _check_compat(net, data, kind)
    if kind.tag == LossTag.SQUARED_ERROR:
        X = np.asarray(data.inputs, dtype=float).reshape(data.size, -1)
        residual = data.targets - forward_batch(net, data.inputs)
        return X, -2.0 * residual / data.size
    ref = kind.reference
    points = np.vstack([net.neurons, ref])
    coef = np.concatenate([2.0 * net.weights, np.full(ref.shape[0], -2.0 / ref.shape[0])])
    return points, coef


def unweighted_gradients(net: NetworkState, data: Dataset, kind: LossKind) -> np.ndarray:
    """G(θ_ℓ) = E[Φ′ ∇σ(θ_ℓ, x)] por neurona, forma (n, d), sin el factor w_ℓ"""
    if net.n == 0:
        return np.zeros((0, net.dim))
    points, coef = outer_atoms(net, data, kind)
    return np.einsum("a,nad->nd", coef, grad_many(net.kind, net.neurons, points))


@analytic_path("param_grad")
def param_grad(net: NetworkState, data: Dataset, kind: LossKind) -> np.ndarray:
    """
    Gradiente de la pérdida respecto a cada θ_ℓ, incluido el factor w_ℓ.

    Returns:
        Matriz (n, d); la fila ℓ es ∇_{θ_ℓ}L
    """
    grads = net.weights[:, None] * unweighted_gradients(net, data, kind)
    if not np.all(np.isfinite(grads)):
        raise NumericalError("Gradiente no finito")
    return grads


def grad_norm(grads: np.ndarray) -> float:
    """(Σ_ℓ ‖∇_{θ_ℓ}L‖²)^{1/2}"""
    return float(np.sqrt(np.sum(grads * grads)))


def hessian_T(net: NetworkState, data: Dataset, kind: LossKind) -> np.ndarray:
    """
    Término T del hessiano completo, forma (n·d, n·d), con bloques cruzados.

    SQUARED_ERROR: T = (2/N) JᵀJ con J_p = (w_ℓ ∇σ(θ_ℓ, x_p))_ℓ.
    MMD: T[ℓ,m] = 2 w_ℓ w_m ∇₁∇₂ᵀk(θ_ℓ, θ_m) = −2 w_ℓ w_m ∇²₁k(θ_ℓ, θ_m).
    """
    _check_compat(net, data, kind)
    n, d = net.n, net.dim
    if kind.tag == LossTag.SQUARED_ERROR:
        G = grad_many(net.kind, net.neurons, data.inputs)          # (n, N, d)
        J = (net.weights[:, None, None] * G).transpose(1, 0, 2).reshape(data.size, n * d)
        return 2.0 * (J.T @ J) / data.size

    T = np.zeros((n * d, n * d))
    H = hess_many(net.kind, net.neurons, net.neurons)            # (n, n, d, d)
    for l in range(n):
        for m in range(n):
            T[l * d:(l + 1) * d, m * d:(m + 1) * d] = -2.0 * net.weights[l] * net.weights[m] * H[l, m]
    return 0.5 * (T + T.T)


def mmd_brute_force(net: NetworkState, reference) -> float:
    """Doble suma directa del MMD², punto por punto; oráculo independiente de `loss`"""
    ref = list(np.asarray(reference, dtype=float).reshape(len(reference), -1))
    parts = [np.asarray(t, dtype=float) for t in net.neurons]
    h2 = net.kind.bandwidth ** 2

    def k(a, b):
        return math.exp(-0.5 * sum((ai - bi) ** 2 for ai, bi in zip(a, b)) / h2)

    total = 0.0
    for i, ti in enumerate(parts):
        for j, tj in enumerate(parts):
            total += net.weights[i] * net.weights[j] * k(ti, tj)
    for i, ti in enumerate(parts):
        for r in ref:
            total -= 2.0 * net.weights[i] * k(ti, r) / len(ref)
    for r in ref:
        for s in ref:
            total += k(r, s) / (len(ref) ** 2)
    return float(total)


def median_bandwidth(reference, seed: int = 0) -> float:
    """
    Heurística de la mediana: mediana de las distancias euclidianas entre pares.

    Con más de 1000 puntos se usa una submuestra fija (semilla `seed`).
    """
    ref = np.asarray(reference, dtype=float)
    if ref.ndim == 1:
        ref = ref.reshape(-1, 1)
    if ref.shape[0] > MEDIAN_SUBSAMPLE:
        idx = np.random.default_rng(seed).choice(ref.shape[0], MEDIAN_SUBSAMPLE, replace=False)
        ref = ref[np.sort(idx)]
    diff = ref[:, None, :] - ref[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    upper = dist[np.triu_indices(ref.shape[0], k=1)]
    if upper.size == 0 or np.median(upper) <= 0:
        logger.warning("Heurística de la mediana degenerada; se usa h = 1")
        return 1.0
    return float(np.median(upper))
