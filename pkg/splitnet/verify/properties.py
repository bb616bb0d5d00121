#properties.py
"""
Propiedades verificables numéricamente.

Cada propiedad se registra con `@register`, indicando qué rutas analíticas
cruza con un oráculo de diferencias finitas y si pertenece al nivel rápido o
al nivel de experimentos (`verify --full`).
"""
import logging
import math
import tempfile
import time
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..baselines import is_particle_system, random_split
from ..descent import descend, normalized_gradient_step
from ..linalg import SymMatrix, eig_sym, reconstruct
from ..loss import loss, mmd_brute_force, mmd_of_measure, outer_atoms, outer_derivs, param_grad, unweighted_gradients, median_bandwidth
from ..models import Dataset, LossKind, Method, NetworkState, NeuronKind, NeuronTag
from ..neurons import forward, forward_batch, neuron_eval, neuron_grad, neuron_hess
from ..schemas import ConvergenceSpec, FDSpec, RunConfig, SplitPolicy
from ..splitting import assembled_hessian, split_along, split_many, split_round, splitting_candidates, splitting_matrix
from .oracles import fd_grad, fd_hessian, fd_jacobian, measure_split_gain, order_fit, relative_error
from .registry import mark_covered, uncovered_paths

logger = logging.getLogger(__name__)

EPSILON_GRID = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
DERIV_TOL = 1e-5
GRAD_TOL = 1e-6
HESSIAN_TOL = 1e-5
FD_FLOOR = 1.0
SPLIT_ORDER = 2.5
DESCENT_ORDER = 1.5
HESSIAN_FD = FDSpec(step=1e-4)


class Tier(str, Enum):
    QUICK = "QUICK"
    FULL = "FULL"


class Outcome(BaseModel):
    status: str
    measured: Optional[float] = None
    threshold: str = ""
    detail: str = ""


class PropertyResult(BaseModel):
    name: str
    tier: Tier
    covers: Tuple[str, ...] = ()
    status: str
    measured: Optional[float] = None
    threshold: str = ""
    detail: str = ""
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status in ("PASS", "PASS-BY-FLOOR")


class Property(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    tier: Tier
    covers: Tuple[str, ...] = ()
    check: Callable[[], Outcome]


PROPERTIES: Dict[str, Property] = {}


def register(name: str, covers: Tuple[str, ...] = (), tier: Tier = Tier.QUICK) -> Callable:
    """Registra una propiedad y las rutas analíticas que su oráculo cubre"""
    def decorator(func: Callable[[], Outcome]) -> Callable[[], Outcome]:
        PROPERTIES[name] = Property(name=name, tier=tier, covers=covers, check=func)
        mark_covered(covers, name)
        return func
    return decorator


def _verdict(passed: bool, measured: float, threshold: str, detail: str = "") -> Outcome:
    return Outcome(status="PASS" if passed else "FAIL", measured=measured, threshold=threshold, detail=detail)


def run_properties(full: bool = False, names: Optional[List[str]] = None) -> List[PropertyResult]:
    """
    Ejecuta las propiedades registradas; una excepción dentro de un chequeo
    cuenta como FAIL con su mensaje en el detalle.
    """
    results = []
    for prop in PROPERTIES.values():
        if names is not None and prop.name not in names:
            continue
        if prop.tier == Tier.FULL and not full and names is None:
            continue
        start = time.perf_counter()
        try:
            outcome = prop.check()
        except Exception as exc:
            logger.exception("La propiedad %s lanzó una excepción", prop.name)
            outcome = Outcome(status="FAIL", detail=f"{type(exc).__name__}: {exc}")
        elapsed = time.perf_counter() - start
        logger.info("%s: %s (%.2fs)", prop.name, outcome.status, elapsed)
        results.append(PropertyResult(
            name=prop.name, tier=prop.tier, covers=prop.covers, seconds=elapsed, **outcome.model_dump()
        ))
    return results


# ------------------------------------------
# Escenarios
# ------------------------------------------

def regression_problem(
    seed: int,
    tag: NeuronTag = NeuronTag.RBF1D,
    n_neurons: int = 3,
    n_points: int = 50,
) -> Tuple[NetworkState, Dataset, LossKind]:
    """Red aleatoria pequeña y datos de regresión sintéticos"""
    from ..experiments import synth_rbf_dataset, synth_softplus_dataset

    rng = np.random.default_rng(seed)
    if tag == NeuronTag.SOFTPLUS_UNIT:
        data, kind = synth_softplus_dataset(seed, n_points=n_points, true_std=1.0, x_low=-2.0, x_high=2.0)
    else:
        data, truth = synth_rbf_dataset(seed, n_points=n_points, x_low=-3.0, x_high=3.0)
        kind = truth.kind
    net = NetworkState(
        kind=kind,
        neurons=rng.normal(0.0, 1.0, size=(n_neurons, kind.dim)),
        weights=rng.uniform(0.3, 1.0, size=n_neurons),
    )
    return net, data, LossKind.squared_error()


def _converged(net, data, kind, iters: int = 20000) -> NetworkState:
    """Descenso con τ = 1e-8 y el optimizador por defecto de la red de juguete"""
    spec = RunConfig().optim.model_copy(update={"max_iters": iters})
    net, _ = descend(net, data, kind, spec, ConvergenceSpec(grad_norm_tol=1e-8))
    return net


def regression_optimum(seed: int, iters: int = 5000) -> Tuple[NetworkState, Dataset, LossKind]:
    """`regression_problem` llevado a un óptimo paramétrico"""
    net, data, kind = regression_problem(seed)
    return _converged(net, data, kind, iters), data, kind


def mmd_problem(seed: int, n_particles: int = 3, n_reference: int = 40) -> Tuple[NetworkState, Dataset, LossKind]:
    """Partículas 1D aleatorias contra una muestra pequeña de la mezcla gaussiana"""
    from ..experiments import synth_gmm_reference

    rng = np.random.default_rng(seed)
    reference = synth_gmm_reference(seed, n_reference)
    kind = NeuronKind(tag=NeuronTag.KERNEL_PARTICLE, bandwidth=median_bandwidth(reference), input_dim=1)
    weights = rng.uniform(0.5, 1.0, size=n_particles)
    net = NetworkState(
        kind=kind,
        neurons=rng.normal(0.5, 2.0, size=(n_particles, 1)),
        weights=weights / weights.sum(),
    )
    return net, Dataset(inputs=reference), LossKind.mmd(reference)


def twin_point_problem() -> Tuple[NetworkState, Dataset, LossKind]:
    """
    Una partícula en el origen entre dos referencias (±1, 0) con h = 2.

    Es un punto estacionario exacto con S = diag(≈ −0.169, ≈ −0.0588): el
    óptimo paramétrico más simple donde dividir todavía mejora.
    """
    reference = np.array([[1.0, 0.0], [-1.0, 0.0]])
    kind = NeuronKind(tag=NeuronTag.KERNEL_PARTICLE, bandwidth=2.0, input_dim=2)
    net = NetworkState(kind=kind, neurons=[[0.0, 0.0]], weights=[1.0])
    return net, Dataset(inputs=reference), LossKind.mmd(reference)


def repelled_particle_problem() -> Tuple[NetworkState, Dataset, LossKind]:
    """Partícula 0 sobre la única referencia, con otra partícula a 1.5h: λ_min > 0"""
    kind = NeuronKind(tag=NeuronTag.KERNEL_PARTICLE, bandwidth=1.0, input_dim=1)
    net = NetworkState(kind=kind, neurons=[[0.0], [1.5]], weights=[0.5, 0.5])
    reference = np.array([[0.0]])
    return net, Dataset(inputs=reference), LossKind.mmd(reference)


def _flat_loss(net: NetworkState, data: Dataset, kind: LossKind) -> Callable[[np.ndarray], float]:
    shape = net.neurons.shape
    return lambda flat: loss(net.replace(neurons=flat.reshape(shape)), data, kind)


def _all_problems(seed: int):
    yield regression_problem(seed, NeuronTag.RBF1D)
    yield regression_problem(seed, NeuronTag.SOFTPLUS_UNIT)
    yield mmd_problem(seed)


# ------------------------------------------
# Oráculos de derivadas
# ------------------------------------------

@register("neuron_derivatives", covers=("neuron_grad", "neuron_hess"))
def neuron_derivatives() -> Outcome:
    """∇σ y ∇²σ analíticos contra diferencias centrales, 100 sorteos por tipo"""
    kinds = [
        NeuronKind(tag=NeuronTag.RBF1D),
        NeuronKind(tag=NeuronTag.SOFTPLUS_UNIT, beta=10.0, input_dim=2),
        NeuronKind(tag=NeuronTag.KERNEL_PARTICLE, bandwidth=1.0, input_dim=2),
    ]
    rng = np.random.default_rng(0)
    worst = 0.0
    for kind in kinds:
        for _ in range(100):
            theta = rng.normal(0.0, 1.0, size=kind.dim)
            x = rng.uniform(-2.0, 2.0, size=kind.input_dim)
            g = neuron_grad(kind, theta, x)
            worst = max(worst, relative_error(g, fd_grad(lambda t: neuron_eval(kind, t, x), theta), FD_FLOOR))
            H = neuron_hess(kind, theta, x).data
            H_fd = fd_jacobian(lambda t: neuron_grad(kind, t, x), theta)
            worst = max(worst, relative_error(H, 0.5 * (H_fd + H_fd.T), FD_FLOOR))
    return _verdict(worst <= DERIV_TOL, worst, f"≤ {DERIV_TOL:g}")


@register("outer_derivs_fd", covers=("outer_derivs",))
def outer_derivs_fd() -> Outcome:
    """Φ′ y Φ″ contra la derivada de la pérdida al agregar masa t en un punto"""
    worst = 0.0
    net, _, kind = regression_problem(3)
    x, y = 0.7, 1.3
    f = forward(net, x)
    phi1, phi2 = outer_derivs(net, x, kind, target=y)
    pointwise = lambda t: (y - f - t[0]) ** 2
    worst = max(worst, relative_error(phi1, fd_grad(pointwise, [0.0])[0]))
    worst = max(worst, relative_error(phi2, fd_hessian(pointwise, [0.0], FDSpec(step=1e-2)).data[0, 0]))

    net, _, kind = mmd_problem(3)
    h = net.kind.bandwidth
    x = np.array([0.4])
    phi1, phi2 = outer_derivs(net, x, kind)
    points = np.vstack([net.neurons, x[None, :]])
    mass = lambda t: mmd_of_measure(points, np.concatenate([net.weights, t]), kind, h)
    worst = max(worst, relative_error(phi1, fd_grad(mass, [0.0])[0]))
    # k(x, x) = 1, así que d²L/dt² = Φ″
    worst = max(worst, relative_error(phi2, fd_hessian(mass, [0.0], FDSpec(step=1e-2)).data[0, 0]))
    return _verdict(worst <= GRAD_TOL, worst, f"≤ {GRAD_TOL:g}")


@register("param_grad_fd", covers=("param_grad",))
def param_grad_fd() -> Outcome:
    """∇_θL por neurona contra diferencias centrales de la pérdida, 50 configuraciones por tipo"""
    worst = 0.0
    for seed in range(50):
        for net, data, kind in _all_problems(seed):
            analytic = param_grad(net, data, kind).reshape(-1)
            numeric = fd_grad(_flat_loss(net, data, kind), net.neurons.reshape(-1))
            worst = max(worst, relative_error(analytic, numeric, FD_FLOOR))
    return _verdict(worst <= GRAD_TOL, worst, f"≤ {GRAD_TOL:g}")


@register("splitting_matrix_fd", covers=("splitting_matrix",))
def splitting_matrix_fd() -> Outcome:
    """S^[ℓ] contra w_ℓ Σ_a coef_a · (Jacobiano por diferencias de ∇σ) con Φ′ exacto"""
    worst = 0.0
    cases = []
    net, data, kind = regression_problem(7)
    cases.append((net, data.subset(np.array([0])), kind))
    for seed in range(10):
        cases.extend(_all_problems(seed))

    for net, data, kind in cases:
        points, coef = outer_atoms(net, data, kind)
        for index in range(net.n):
            theta = net.neurons[index]
            S_fd = np.zeros((net.dim, net.dim))
            for a in range(points.shape[0]):
                J = fd_jacobian(lambda t: neuron_grad(net.kind, t, points[a]), theta)
                S_fd += coef[a] * 0.5 * (J + J.T)
            S_fd *= net.weights[index]
            worst = max(worst, relative_error(splitting_matrix(net, data, kind, index).data, S_fd, FD_FLOOR))
    return _verdict(worst <= GRAD_TOL, worst, f"≤ {GRAD_TOL:g}")


@register("hessian_decomposition", covers=("hessian_decomposition",))
def hessian_decomposition() -> Outcome:
    """∇²L por diferencias de la pérdida contra blockdiag(S) + T (3 neuronas RBF, 50 puntos; y MMD)"""
    worst = 0.0
    for net, data, kind in (regression_problem(11), mmd_problem(11)):
        H_fd = fd_hessian(_flat_loss(net, data, kind), net.neurons.reshape(-1), HESSIAN_FD).data
        H = assembled_hessian(net, data, kind)
        worst = max(worst, float(np.linalg.norm(H_fd - H) / np.linalg.norm(H_fd)))
    return _verdict(worst <= HESSIAN_TOL, worst, f"≤ {HESSIAN_TOL:g}")


@register("oracle_registry")
def oracle_registry() -> Outcome:
    """Toda ruta analítica registrada tiene exactamente un chequeo"""
    missing = sorted(uncovered_paths())
    return Outcome(
        status="PASS" if not missing else "FAIL",
        measured=float(len(missing)),
        threshold="0 rutas sin oráculo",
        detail=", ".join(missing),
    )


# ------------------------------------------
# Álgebra lineal y ajuste de orden
# ------------------------------------------

@register("eigensolver")
def eigensolver() -> Outcome:
    """Residuo, reconstrucción, orden ascendente y determinismo de eig_sym"""
    rng = np.random.default_rng(0)
    worst = 0.0
    ok = True
    for d in (2, 3, 5, 8, 16, 32, 64):
        B = rng.standard_normal((d, d))
        A = SymMatrix(data=B + B.T)
        norm = A.frobenius()
        pairs = eig_sym(A)
        for p in pairs:
            worst = max(worst, float(np.linalg.norm(A.data @ p.vector - p.value * p.vector)) / norm)
            ok &= abs(np.linalg.norm(p.vector) - 1.0) <= 1e-12
        ok &= all(a.value <= b.value for a, b in zip(pairs, pairs[1:]))
        ok &= float(np.linalg.norm(reconstruct(pairs) - A.data)) <= 1e-9 * (1.0 + norm)
        again = eig_sym(A)
        ok &= all(a.value == b.value and np.array_equal(a.vector, b.vector) for a, b in zip(pairs, again))
    return _verdict(ok and worst <= 1e-9, worst, "residuo ≤ 1e-9·‖A‖_F")


@register("order_fit_selftest")
def order_fit_selftest() -> Outcome:
    cubic = order_fit(lambda e: e ** 3, EPSILON_GRID).slope
    quadratic = order_fit(lambda e: e ** 2, EPSILON_GRID).slope
    error = max(abs(cubic - 3.0), abs(quadratic - 2.0))
    return _verdict(error <= 1e-2, error, "|pendiente − exacta| ≤ 1e-2")


# ------------------------------------------
# Teoremas de división y descenso
# ------------------------------------------

def _fit_outcome(fit, min_slope: float, detail: str = "") -> Outcome:
    status = fit.verdict(min_slope)
    return Outcome(status=status, measured=fit.slope, threshold=f"pendiente ≥ {min_slope:g}", detail=detail)


def _split_gain_outcome(net, data, kind, candidate) -> Outcome:
    """ΔL frente a ε²λ_min/2: residuo de orden ≥ 2.5 y error relativo ≤ 10% en ε = 1e-2"""
    lam = candidate.splitting_index

    def delta(e):
        return -measure_split_gain(net, data, kind, candidate, e)

    fit = order_fit(lambda e: delta(e) - 0.5 * e * e * lam, EPSILON_GRID)
    predicted = 0.5 * 1e-2 ** 2 * lam
    rel = abs(delta(1e-2) - predicted) / abs(predicted)
    outcome = _fit_outcome(fit, SPLIT_ORDER, detail=f"λ_min={lam:.6g}, error relativo en ε=1e-2: {rel:.3g}")
    if lam >= 0 or rel > 0.1:
        outcome = outcome.model_copy(update={"status": "FAIL"})
    return outcome


@register("split_decomposition")
def split_decomposition() -> Outcome:
    """División simétrica θ ± εv con μ = 0 en un óptimo: ΔL − ε²vᵀSv/2 = O(ε³) o mejor"""
    net, data, kind = regression_optimum(1)
    v = np.random.default_rng(1).standard_normal(net.dim)
    v /= np.linalg.norm(v)
    S = splitting_matrix(net, data, kind, 0)
    base = loss(net, data, kind)
    fit = order_fit(
        lambda e: loss(split_along(net, 0, v, e), data, kind) - base - 0.5 * e * e * S.quad(v),
        EPSILON_GRID,
    )
    return _fit_outcome(fit, SPLIT_ORDER)


@register("optimal_split_gain")
def optimal_split_gain() -> Outcome:
    """En un óptimo con λ_min < 0: ΔL ≈ ε²λ_min/2, residuo de orden ≥ 2.5 y error ≤ 10% en ε = 1e-2"""
    net, data, kind = twin_point_problem()
    candidate = splitting_candidates(net, data, kind)[0]
    return _split_gain_outcome(net, data, kind, candidate)


@register("positive_index_no_gain")
def positive_index_no_gain() -> Outcome:
    """Neurona con λ_min > 0: dividirla no baja la pérdida"""
    net, data, kind = repelled_particle_problem()
    candidate = splitting_candidates(net, data, kind)[0]
    gain = measure_split_gain(net, data, kind, candidate, 1e-2)
    return _verdict(candidate.splitting_index > 0 and gain <= 0, gain, "ganancia ≤ 0 con λ_min > 0",
                    f"λ_min={candidate.splitting_index:.6g}")


@register("split_additivity")
def split_additivity() -> Outcome:
    """Dos divisiones simultáneas en un óptimo cambian la pérdida en la suma de los términos individuales"""
    net, data, kind = regression_optimum(2)
    candidates = splitting_candidates(net, data, kind)[:2]
    directions = {c.neuron_index: c.splitting_gradient for c in candidates}
    total = sum(c.splitting_index for c in candidates)
    base = loss(net, data, kind)
    fit = order_fit(
        lambda e: loss(split_many(net, directions, e), data, kind) - base - 0.5 * e * e * total,
        EPSILON_GRID,
    )
    return _fit_outcome(fit, SPLIT_ORDER)


@register("split_all_rate")
def split_all_rate() -> Outcome:
    """Dividir toda neurona con λ_min < 0 cambia la pérdida en (ε²/2) Σ min(λ_min, 0)"""
    for seed in range(4, 40):
        net, data, kind = regression_problem(seed)
        candidates = [c for c in splitting_candidates(net, data, kind) if c.splitting_index < 0]
        if candidates:
            break
    else:
        return Outcome(status="FAIL", detail="ninguna neurona con λ_min < 0 en los escenarios")
    directions = {c.neuron_index: c.splitting_gradient for c in candidates}
    total = sum(c.splitting_index for c in candidates)
    base = loss(net, data, kind)
    fit = order_fit(
        lambda e: loss(split_many(net, directions, e), data, kind) - base - 0.5 * e * e * total,
        EPSILON_GRID,
    )
    return _fit_outcome(fit, SPLIT_ORDER, detail=f"{len(candidates)} neuronas divididas")


@register("descent_rate")
def descent_rate() -> Outcome:
    """Paso normalizado de tamaño ε: ΔL = −ε Σ w‖G‖ + O(ε²)"""
    net, data, kind = regression_problem(5)
    G = unweighted_gradients(net, data, kind)
    rate = float(np.sum(net.weights * np.linalg.norm(G, axis=1)))
    base = loss(net, data, kind)
    fit = order_fit(
        lambda e: loss(normalized_gradient_step(net, data, kind, e), data, kind) - base + e * rate,
        EPSILON_GRID,
    )
    return _fit_outcome(fit, DESCENT_ORDER)


@register("direction_optimality")
def direction_optimality() -> Outcome:
    """La ganancia sin reentrenar es máxima en φ ∈ {0, π} y simétrica en φ ↔ 2π − φ"""
    from ..experiments import angle_sweep

    net, data, kind = twin_point_problem()
    rows = angle_sweep(net, data, kind, 0, 1e-2, 72)
    gains = np.array([r[1] for r in rows])
    best = int(np.argmax(gains))
    asym = max(abs(gains[k] - gains[(72 - k) % 72]) for k in range(72))
    ok = best in (0, 36) and asym <= 1e-12 + 1e-6 * float(np.max(np.abs(gains)))
    return _verdict(ok, float(asym), "argmax ∈ {0, π}; asimetría ≈ 0", f"argmax en φ={rows[best][0]:.4f}")


# ------------------------------------------
# Invariantes
# ------------------------------------------

@register("split_invariance")
def split_invariance() -> Outcome:
    """Dividir con ε = 0 no cambia ni la salida ni la pérdida"""
    worst = 0.0
    grid = np.linspace(-3.0, 3.0, 61)
    for net, data, kind in _all_problems(8):
        twin = split_along(net, 0, np.eye(net.dim)[0], 0.0)
        worst = max(worst, abs(loss(twin, data, kind) - loss(net, data, kind)))
        if not is_particle_system(net.kind):
            worst = max(worst, float(np.max(np.abs(forward_batch(twin, grid) - forward_batch(net, grid)))))
    return _verdict(worst <= 1e-12, worst, "≤ 1e-12")


@register("weight_conservation")
def weight_conservation() -> Outcome:
    """Σ w se conserva exactamente bajo cualquier número de divisiones"""
    net, data, kind = mmd_problem(9, n_particles=1)
    net = net.replace(weights=[1.0])
    rng = np.random.default_rng(9)
    ok = True
    for r in range(6):
        net, _ = random_split(net, rng, 1e-2, r)
        ok &= net.total_weight() == 1.0
        net, _ = split_round(net, data, kind, SplitPolicy(max_splits=2, threshold=0.0), r)
        ok &= net.total_weight() == 1.0
    return _verdict(ok, net.total_weight(), "Σw = 1 exacto", f"n={net.n}")


@register("mmd_nonnegative")
def mmd_nonnegative() -> Outcome:
    lowest = math.inf
    for seed in range(100):
        net, data, kind = mmd_problem(seed, n_particles=1 + seed % 5)
        lowest = min(lowest, loss(net, data, kind))
    net, data, kind = mmd_problem(0)
    same = net.replace(neurons=kind.reference, weights=np.full(kind.reference.shape[0], 1.0 / kind.reference.shape[0]))
    lowest = min(lowest, loss(same, data, kind))
    return _verdict(lowest >= -1e-12, lowest, "≥ −1e-12")


@register("mmd_closed_form")
def mmd_closed_form() -> Outcome:
    """Forma cerrada del MMD contra la doble suma directa, y MMD(ρ*, ρ*) = 0"""
    worst = 0.0
    for seed in range(20):
        net, data, kind = mmd_problem(seed, n_particles=2 + seed % 2, n_reference=3 + seed % 4)
        worst = max(worst, abs(loss(net, data, kind) - mmd_brute_force(net, kind.reference)))
    net, data, kind = mmd_problem(1)
    same = net.replace(neurons=kind.reference, weights=np.full(kind.reference.shape[0], 1.0 / kind.reference.shape[0]))
    zero = abs(loss(same, data, kind))
    return _verdict(worst <= 1e-10 and zero <= 1e-12, worst, "≤ 1e-10", f"MMD(ρ*, ρ*)={zero:.3g}")


@register("permutation_invariance")
def permutation_invariance() -> Outcome:
    worst = 0.0
    rng = np.random.default_rng(12)
    for net, data, kind in _all_problems(12):
        perm = rng.permutation(net.n)
        shuffled = net.replace(neurons=net.neurons[perm], weights=net.weights[perm])
        base = loss(net, data, kind)
        worst = max(worst, abs(loss(shuffled, data, kind) - base) / max(1.0, abs(base)))
    return _verdict(worst <= 1e-12, worst, "≤ 1e-12 relativo")


def tiny_config(experiment: str = "RBF_TOY", method: str = "OPTIMAL_SPLIT", seed: int = 0) -> RunConfig:
    """Configuración reducida para chequeos de extremo a extremo rápidos"""
    return RunConfig.model_validate({
        "run": {"experiment": experiment, "method": method, "seed": seed, "target_neurons": 3},
        "data": {"n_points": 80},
        "optim": {"max_iters": 200},
        "convergence": {"check_every": 20},
    })


@register("determinism")
def determinism() -> Outcome:
    """Misma configuración y semilla: CSV idénticos byte a byte"""
    from ..experiments import run

    files = ("run.csv", "splits.csv", "final_model.csv", "config.echo")
    ok = True
    with tempfile.TemporaryDirectory() as tmp:
        for experiment in ("RBF_TOY", "MMD_COMPRESS"):
            config = tiny_config(experiment)
            first, second = Path(tmp) / f"{experiment}_a", Path(tmp) / f"{experiment}_b"
            run(config, first)
            run(config, second)
            ok &= all((first / f).read_bytes() == (second / f).read_bytes() for f in files)
    return _verdict(ok, 1.0 if ok else 0.0, "bytes idénticos")


# ------------------------------------------
# Nivel de experimentos (verify --full)
# ------------------------------------------

@register("optimal_split_gain_rbf", tier=Tier.FULL)
def optimal_split_gain_rbf() -> Outcome:
    """Fórmula ε²λ_min/2 en un óptimo de la red RBF de juguete (descenso con τ = 1e-8)"""
    from ..experiments import build_problem, grow_network

    config = RunConfig.model_validate({"run": {"target_neurons": 3}, "data": {"n_points": 300}})
    problem = build_problem(config)
    net, _ = grow_network(config, problem)
    net = _converged(net, problem.data, problem.loss_kind)
    candidate = min(splitting_candidates(net, problem.data, problem.loss_kind), key=lambda c: c.splitting_index)
    if candidate.splitting_index >= 0:
        return Outcome(status="FAIL", detail="el óptimo encontrado es estable (λ_min ≥ 0)")
    return _split_gain_outcome(net, problem.data, problem.loss_kind, candidate)


@register("angle_sweep_shape", tier=Tier.FULL)
def angle_sweep_shape() -> Outcome:
    """RBF con m = 7: máximo en φ ∈ {0, π} y ganancia en π/2 ≤ 25% del máximo"""
    from ..experiments import angle_sweep, optimum_for

    config = RunConfig.model_validate({"run": {"experiment": "ANGLE_SWEEP"}})
    net, problem = optimum_for(config)
    candidate = min(splitting_candidates(net, problem.data, problem.loss_kind),
                    key=lambda c: (c.splitting_index, c.neuron_index))
    rows = angle_sweep(net, problem.data, problem.loss_kind, candidate.neuron_index, config.policy.epsilon, 72)
    gains = np.array([r[1] for r in rows])
    best = int(np.argmax(gains))
    ratio = float(gains[18] / gains[best]) if gains[best] > 0 else math.inf
    return _verdict(best in (0, 36) and ratio <= 0.25, ratio, "argmax ∈ {0, π}; ganancia(π/2)/máx ≤ 0.25",
                    f"argmax en k={best}")


@register("eigen_gain_correlation", tier=Tier.FULL)
def eigen_gain_correlation() -> Outcome:
    """Correlación de Pearson entre −λ_min y la ganancia reentrenada, mediana de 5 semillas ≥ 0.8"""
    from ..experiments import _retrain_spec, eigen_vs_gain, optimum_for

    correlations = []
    for seed in range(5):
        config = RunConfig.model_validate({"run": {"experiment": "EIGEN_VS_GAIN", "seed": seed},
                                           "sweep": {"retrain": True}})
        net, problem = optimum_for(config)
        rows = eigen_vs_gain(net, problem.data, problem.loss_kind, config.policy.epsilon,
                             _retrain_spec(config), config.convergence)
        lam = np.array([r[1] for r in rows])
        gain = np.array([r[2] for r in rows])
        correlations.append(float(np.corrcoef(-lam, gain)[0, 1]))
    median = float(np.median(correlations))
    return _verdict(median >= 0.8, median, "mediana ≥ 0.8", ", ".join(f"{c:.3f}" for c in correlations))


@register("rbf_method_ordering", tier=Tier.FULL)
def rbf_method_ordering() -> Outcome:
    """m: 1→8, el MSE final de OPTIMAL_SPLIT no supera a ninguna línea base en ≥ 4 de 5 semillas"""
    from ..experiments import run

    wins = 0
    with tempfile.TemporaryDirectory() as tmp:
        for seed in range(5):
            finals = {}
            for method in Method:
                config = RunConfig.model_validate({"run": {"seed": seed, "method": method.value}})
                finals[method] = run(config, Path(tmp) / f"{seed}_{method.value}").final_loss
            ours = finals.pop(Method.OPTIMAL_SPLIT)
            wins += all(ours <= other for other in finals.values())
    return _verdict(wins >= 4, float(wins), "≥ 4 de 5 semillas")


def mmd_round_discrepancy(config: RunConfig, out_dir: Path):
    """
    Corre el experimento MMD y compara la forma cerrada con la doble suma en
    cada fin de ronda.

    Returns:
        (resumen de la corrida, máxima |cerrada − doble suma| entre rondas)
    """
    from ..experiments import build_problem, run

    problem = build_problem(config)
    reference = problem.loss_kind.reference
    gaps: List[float] = []

    def compare(round: int, net: NetworkState) -> None:
        gaps.append(abs(loss(net, problem.data, problem.loss_kind) - mmd_brute_force(net, reference)))

    summary = run(config, out_dir, on_round=compare)
    return summary, max(gaps)


@register("mmd_method_ordering", tier=Tier.FULL)
def mmd_method_ordering() -> Outcome:
    """Partículas 1→5: log-MMD final de OPTIMAL_SPLIT < RANDOM_SPLIT en ≥ 4 de 5 semillas; cerrada = doble suma por ronda"""
    wins = 0
    worst = 0.0
    with tempfile.TemporaryDirectory() as tmp:
        for seed in range(5):
            finals = {}
            for method in (Method.OPTIMAL_SPLIT, Method.RANDOM_SPLIT):
                config = RunConfig.model_validate({"run": {"experiment": "MMD_COMPRESS", "seed": seed,
                                                           "method": method.value}})
                summary, gap = mmd_round_discrepancy(config, Path(tmp) / f"{seed}_{method.value}")
                worst = max(worst, gap)
                finals[method] = math.log(max(summary.final_loss, 1e-300))
            wins += finals[Method.OPTIMAL_SPLIT] < finals[Method.RANDOM_SPLIT]
    return _verdict(wins >= 4 and worst <= 1e-10, float(wins), "≥ 4 de 5 semillas; |cerrada − doble suma| ≤ 1e-10",
                    f"máx. diferencia {worst:.3g}")
