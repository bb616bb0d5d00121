#neurons.py
"""
Neuronas diferenciables: σ(θ,x), ∇_θσ y ∇²_θθσ analíticos para cada tipo, y la
red como suma ponderada Σ w_i σ(θ_i, x).

Las funciones `*_many` evalúan todas las neuronas sobre todas las entradas a la
vez; las de una sola neurona y un solo punto son envoltorios sobre ellas.
"""
import numpy as np

from .exceptions import DimensionError
from .linalg import SymMatrix, as_vec
from .models import NetworkState, NeuronKind, NeuronTag
from .verify.registry import analytic_path


def _check_theta(kind: NeuronKind, theta: np.ndarray) -> np.ndarray:
    theta = as_vec(theta)
    if theta.shape[0] != kind.dim:
        raise DimensionError(
            f"θ de dimensión {theta.shape[0]} no corresponde a {kind.tag.value} (d={kind.dim})"
        )
    return theta


def _single(x) -> np.ndarray:
    """Una entrada como matriz de una fila"""
    return np.asarray(x, dtype=float).reshape(1, -1)


def _as_inputs(kind: NeuronKind, X) -> np.ndarray:
    """Entradas como matriz (N, p); p = 1 para RBF1D"""
    arr = np.asarray(X, dtype=float)
    if kind.tag == NeuronTag.RBF1D:
        return arr.reshape(-1, 1)
    if arr.ndim == 1 and kind.input_dim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] != kind.input_dim:
        raise DimensionError(
            f"Entradas de forma {arr.shape} no corresponden a input_dim={kind.input_dim}"
        )
    return arr

# ------------------------------------------
# Activaciones escalares φ(z), φ'(z), φ''(z)
# ------------------------------------------


def _bump(z):
    g = np.exp(-0.5 * z * z)
    return g, -z * g, (z * z - 1.0) * g


def _softplus(z, beta):
    bz = beta * z
    s = np.logaddexp(0.0, bz) / beta
    sig = np.exp(-np.logaddexp(0.0, -bz))
    return s, sig, beta * sig * (1.0 - sig)


def _activation(kind: NeuronKind, z):
    if kind.tag == NeuronTag.RBF1D:
        return _bump(z)
    return _softplus(z, kind.beta)

# ------------------------------------------
# Unidades con coeficiente exterior: σ = a·φ(wᵀu), u = (x, 1)
# ------------------------------------------


def _unit_parts(kind, thetas, X):
    U = np.hstack([X, np.ones((X.shape[0], 1))])        # (N, p+1)
    W = thetas[:, :-1]                                     # (n, p+1)
    a = thetas[:, -1]                                      # (n,)
    Z = W @ U.T                                            # (n, N)
    phi, dphi, d2phi = _activation(kind, Z)
    return U, a, phi, dphi, d2phi


def _unit_eval(kind, thetas, X):
    _, a, phi, _, _ = _unit_parts(kind, thetas, X)
    return a[:, None] * phi


def _unit_grad(kind, thetas, X):
    U, a, phi, dphi, _ = _unit_parts(kind, thetas, X)
    inner = (a[:, None] * dphi)[:, :, None] * U[None, :, :]
    return np.concatenate([inner, phi[:, :, None]], axis=2)


def _unit_hess(kind, thetas, X):
    U, a, _, dphi, d2phi = _unit_parts(kind, thetas, X)
    n, N = dphi.shape
    k = U.shape[1]
    H = np.zeros((n, N, k + 1, k + 1))
    H[:, :, :k, :k] = (a[:, None] * d2phi)[:, :, None, None] * (U[:, :, None] * U[:, None, :])[None]
    cross = dphi[:, :, None] * U[None, :, :]
    H[:, :, :k, k] = cross
    H[:, :, k, :k] = cross
    return H

# ------------------------------------------
# Partícula con kernel RBF: σ(θ,x) = exp(−‖θ−x‖²/(2h²))
# ------------------------------------------


def _kernel_eval(kind, thetas, X):
    h2 = kind.bandwidth ** 2
    diff = thetas[:, None, :] - X[None, :, :]
    return np.exp(-0.5 * np.sum(diff * diff, axis=2) / h2)


def _kernel_grad(kind, thetas, X):
    h2 = kind.bandwidth ** 2
    diff = thetas[:, None, :] - X[None, :, :]
    K = np.exp(-0.5 * np.sum(diff * diff, axis=2) / h2)
    return -K[:, :, None] * diff / h2


def _kernel_hess(kind, thetas, X):
    h2 = kind.bandwidth ** 2
    diff = thetas[:, None, :] - X[None, :, :]
    K = np.exp(-0.5 * np.sum(diff * diff, axis=2) / h2)
    d = thetas.shape[1]
    outer = diff[:, :, :, None] * diff[:, :, None, :] / (h2 * h2)
    return K[:, :, None, None] * (outer - np.eye(d)[None, None] / h2)

# ------------------------------------------
# API vectorizada
# ------------------------------------------


def eval_many(kind: NeuronKind, thetas: np.ndarray, X) -> np.ndarray:
    """σ(θ_i, x_j) para todas las neuronas y entradas, forma (n, N)"""
    X = _as_inputs(kind, X)
    thetas = np.atleast_2d(thetas)
    if kind.tag == NeuronTag.KERNEL_PARTICLE:
        return _kernel_eval(kind, thetas, X)
    return _unit_eval(kind, thetas, X)


def grad_many(kind: NeuronKind, thetas: np.ndarray, X) -> np.ndarray:
    """∇_θσ(θ_i, x_j), forma (n, N, d)"""
    X = _as_inputs(kind, X)
    thetas = np.atleast_2d(thetas)
    if kind.tag == NeuronTag.KERNEL_PARTICLE:
        return _kernel_grad(kind, thetas, X)
    return _unit_grad(kind, thetas, X)


def hess_many(kind: NeuronKind, thetas: np.ndarray, X) -> np.ndarray:
    """∇²_θθσ(θ_i, x_j), forma (n, N, d, d)"""
    X = _as_inputs(kind, X)
    thetas = np.atleast_2d(thetas)
    if kind.tag == NeuronTag.KERNEL_PARTICLE:
        return _kernel_hess(kind, thetas, X)
    return _unit_hess(kind, thetas, X)

# ------------------------------------------
# Operaciones de una neurona
# ------------------------------------------


def neuron_eval(kind: NeuronKind, theta, x) -> float:
    """
    Evalúa σ(θ, x).

    Args:
        kind: Tipo de neurona
        theta: Parámetros de la neurona (d,)
        x: Una entrada (escalar o vector)

    Returns:
        Valor finito de la neurona

    Raises:
        DimensionError: Si θ no coincide con la dimensión del tipo
    """
    theta = _check_theta(kind, theta)
    return float(eval_many(kind, theta[None, :], _single(x))[0, 0])


@analytic_path("neuron_grad")
def neuron_grad(kind: NeuronKind, theta, x) -> np.ndarray:
    """Gradiente analítico ∇_θσ(θ, x)"""
    theta = _check_theta(kind, theta)
    return grad_many(kind, theta[None, :], _single(x))[0, 0]


@analytic_path("neuron_hess")
def neuron_hess(kind: NeuronKind, theta, x) -> SymMatrix:
    """Hessiano analítico ∇²_θθσ(θ, x), simétrico por construcción"""
    theta = _check_theta(kind, theta)
    return SymMatrix(data=hess_many(kind, theta[None, :], _single(x))[0, 0])


def forward_batch(net: NetworkState, X) -> np.ndarray:
    """f(x_j) = Σ_i w_i σ(θ_i, x_j) para todas las entradas"""
    X = _as_inputs(net.kind, X)
    if net.n == 0:
        return np.zeros(X.shape[0])
    return net.weights @ eval_many(net.kind, net.neurons, X)


def forward(net: NetworkState, x) -> float:
    """Salida de la red en una entrada"""
    return float(forward_batch(net, _single(x))[0])
