#experiments.py
"""
Experimentos: síntesis de datos, el ciclo de crecimiento (descenso y división
alternados, o una línea base) y las mediciones de barrido de ángulos y de
autovalor frente a ganancia.
"""
import logging
import math
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .baselines import gradient_boost_step, is_particle_system, new_initialization, random_split, sample_neurons, scratch_network
from .csvlog import ExperimentLog, config_hash, write_table
from .descent import descend
from .exceptions import DivergenceError, SplitNetError, SweepRefusedError
from .linalg import eig_sym
from .loss import grad_norm, loss, median_bandwidth, param_grad
from .models import Dataset, Experiment, LossKind, Method, NetworkState, NeuronKind, NeuronTag
from .neurons import forward_batch
from .schemas import ConvergenceSpec, OptimSpec, RunConfig, SplitPolicy, TraceRow
from .splitting import split_round, splitting_candidates
from .verify.oracles import measure_direction_gain, measure_split_gain

logger = logging.getLogger(__name__)

GMM_WEIGHTS = (0.2, 0.3, 0.5)
GMM_MEANS = (-2.0, 1.0, 3.0)
GMM_STD = 0.5

SWEEP_HEADER = ["angle", "loss_decrease", "predicted"]
EIGEN_GAIN_HEADER = ["seed", "neuron", "lambda_min", "gain"]


class Problem(BaseModel):
    """Datos, pérdida y tipo de neurona de un experimento"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: Dataset
    loss_kind: LossKind
    neuron_kind: NeuronKind
    truth: Optional[NetworkState] = None


class RunSummary(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    final_loss: float
    neuron_count: int
    rounds: int
    out_dir: Path
    network: NetworkState


def _streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """Generadores independientes para los datos y para el aprendiz"""
    data_seq, learner_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(data_seq), np.random.default_rng(learner_seq)


# ------------------------------------------
# Síntesis de datos
# ------------------------------------------

def synth_rbf_dataset(
    seed: int,
    n_points: int = 1000,
    n_true: int = 15,
    true_std: float = 3.0,
    x_low: float = -5.0,
    x_high: float = 5.0,
) -> Tuple[Dataset, NetworkState]:
    """
    Regresión RBF sin ruido: 15 neuronas verdaderas θ ~ N(0, 3²) y entradas
    x ~ U[−5, 5]; los objetivos son exactamente la salida de la red verdadera.
    """
    rng = np.random.default_rng(seed)
    truth = NetworkState(
        kind=NeuronKind(tag=NeuronTag.RBF1D),
        neurons=rng.normal(0.0, true_std, size=(n_true, 3)),
        weights=np.ones(n_true),
    )
    x = rng.uniform(x_low, x_high, size=n_points)
    return Dataset(inputs=x, targets=forward_batch(truth, x)), truth


def synth_softplus_dataset(
    seed: int,
    beta: float = 10.0,
    n_points: int = 1000,
    n_true: int = 15,
    true_std: float = 3.0,
    x_low: float = -5.0,
    x_high: float = 5.0,
) -> Tuple[Dataset, NeuronKind]:
    """Objetivos Σ v_j relu(w_j x + b_j) de 15 unidades ReLU, para aprendices softplus"""
    rng = np.random.default_rng(seed)
    params = rng.normal(0.0, true_std, size=(n_true, 3))
    x = rng.uniform(x_low, x_high, size=n_points)
    pre = np.outer(x, params[:, 0]) + params[:, 1]
    y = np.maximum(pre, 0.0) @ params[:, 2]
    return Dataset(inputs=x, targets=y), NeuronKind(tag=NeuronTag.SOFTPLUS_UNIT, beta=beta)


def synth_gmm_reference(seed: int, n: int = 1000) -> np.ndarray:
    """Muestra (n, 1) de 0.2N(−2, 0.5²) + 0.3N(1, 0.5²) + 0.5N(3, 0.5²)"""
    rng = np.random.default_rng(seed)
    component = rng.choice(len(GMM_WEIGHTS), size=n, p=GMM_WEIGHTS)
    means = np.asarray(GMM_MEANS)[component]
    return (means + GMM_STD * rng.standard_normal(n)).reshape(-1, 1)


def build_problem(config: RunConfig) -> Problem:
    """Datos y pérdida del experimento configurado, deterministas por semilla"""
    seed = config.run.seed
    data_cfg = config.data
    if config.run.experiment == Experiment.MMD_COMPRESS:
        reference = synth_gmm_reference(seed, data_cfg.n_points)
        bandwidth = config.model.bandwidth or median_bandwidth(reference, seed)
        logger.info("MMD: %d partículas de referencia, h=%.6g", reference.shape[0], bandwidth)
        return Problem(
            data=Dataset(inputs=reference),
            loss_kind=LossKind.mmd(reference),
            neuron_kind=NeuronKind(tag=NeuronTag.KERNEL_PARTICLE, bandwidth=bandwidth, input_dim=1),
        )

    ranges = dict(n_points=data_cfg.n_points, n_true=data_cfg.n_true, true_std=data_cfg.true_std,
                  x_low=data_cfg.x_low, x_high=data_cfg.x_high)
    if config.model.kind == NeuronTag.SOFTPLUS_UNIT:
        data, kind = synth_softplus_dataset(seed, beta=config.model.softplus_beta, **ranges)
        return Problem(data=data, loss_kind=LossKind.squared_error(), neuron_kind=kind)
    if config.model.kind != NeuronTag.RBF1D:
        raise SplitNetError(f"El experimento {config.run.experiment.value} no admite neuronas {config.model.kind.value}")
    data, truth = synth_rbf_dataset(seed, **ranges)
    return Problem(data=data, loss_kind=LossKind.squared_error(), neuron_kind=truth.kind, truth=truth)


def initial_network(config: RunConfig, problem: Problem, rng: np.random.Generator) -> NetworkState:
    """Aprendiz inicial; las partículas arrancan todas desde un mismo punto"""
    kind = problem.neuron_kind
    count = config.run.initial_neurons
    if is_particle_system(kind):
        start = sample_neurons(kind, config.init, rng, 1)
        return NetworkState(kind=kind, neurons=np.repeat(start, count, axis=0), weights=np.full(count, 1.0 / count))
    return NetworkState(kind=kind, neurons=sample_neurons(kind, config.init, rng, count), weights=np.ones(count))


# ------------------------------------------
# Ciclo de crecimiento
# ------------------------------------------

def _grow(
    config: RunConfig,
    problem: Problem,
    net: NetworkState,
    budget: int,
    round: int,
    rng: np.random.Generator,
    log: Optional[ExperimentLog],
) -> NetworkState:
    method = config.run.method
    data, kind = problem.data, problem.loss_kind
    eps = config.policy.epsilon

    if method == Method.OPTIMAL_SPLIT:
        policy = SplitPolicy(max_splits=min(config.policy.max_splits, budget),
                             threshold=config.policy.threshold, epsilon=eps)
        net, events = split_round(net, data, kind, policy, round)
        for event in events:
            if log:
                log.log_split(event, method.value)
        return net

    for _ in range(min(max(config.policy.max_splits, 1), budget)):
        if method == Method.RANDOM_SPLIT:
            net, event = random_split(net, rng, eps, round, config.baselines.random_direction, data, kind)
            if log:
                log.log_split(event, method.value)
        elif method == Method.NEW_INIT:
            net = new_initialization(net, rng, config.init)
        elif method == Method.GRADIENT_BOOST:
            net, spent = gradient_boost_step(net, data, kind, config.optim, config.convergence, rng,
                                             config.init, config.baselines.restarts)
            if log:
                log.iter += spent
                log.log_row(round, log.iter, net.n, loss(net, data, kind),
                            grad_norm(param_grad(net, data, kind)), "boost")
    return net


RoundCallback = Callable[[int, NetworkState], None]


def grow_network(
    config: RunConfig,
    problem: Problem,
    log: Optional[ExperimentLog] = None,
    target: Optional[int] = None,
    on_round: Optional[RoundCallback] = None,
) -> Tuple[NetworkState, int]:
    """
    Descenso y crecimiento alternados hasta `target` neuronas, terminando con
    un descenso. SCRATCH entrena la red final desde el inicio con el
    presupuesto de todas las fases. GRADIENT_BOOST solo desciende en la
    ronda 0; después cada ronda es un paso de boosting con las neuronas
    previas congeladas.

    Args:
        on_round: Se llama con (ronda, red) en cada fin de ronda

    Returns:
        (red final, número de rondas)
    """
    target = target or config.run.target_neurons
    _, rng = _streams(config.run.seed)
    data, kind = problem.data, problem.loss_kind

    if config.run.method == Method.SCRATCH:
        phases = target - config.run.initial_neurons + 1
        optim = config.optim.model_copy(update={"max_iters": config.optim.max_iters * phases})
        net = scratch_network(problem.neuron_kind, target, rng, config.init)
        net, trace = descend(net, data, kind, optim, config.convergence, rng=rng)
        if log:
            log.log_trace(0, net.n, trace)
            log.log_row(0, log.iter, net.n, trace[-1].loss, trace[-1].grad_norm, "round_end")
        if on_round:
            on_round(0, net)
        return net, 1

    net = initial_network(config, problem, rng)
    frozen = False
    round = 0
    while True:
        if frozen:
            end = TraceRow(iter=0, loss=loss(net, data, kind), grad_norm=grad_norm(param_grad(net, data, kind)))
        else:
            try:
                net, trace = descend(net, data, kind, config.optim, config.convergence, rng=rng)
            except DivergenceError as exc:
                if log and exc.trace:
                    log.log_trace(round, net.n, exc.trace)
                raise
            if log:
                log.log_trace(round, net.n, trace)
            end = trace[-1]
        if log:
            log.log_row(round, log.iter, net.n, end.loss, end.grad_norm, "round_end")
        logger.info("Ronda %d: n=%d, loss=%.6g", round, net.n, end.loss)
        if on_round:
            on_round(round, net)
        if net.n >= target:
            break

        grown = _grow(config, problem, net, target - net.n, round, rng, log)
        if grown.n == net.n:
            logger.warning("Ronda %d: ninguna neurona cumple λ_min ≤ λ*; el crecimiento se detiene en n=%d",
                           round, net.n)
            break
        net = grown
        frozen = config.run.method == Method.GRADIENT_BOOST
        round += 1
    return net, round + 1


def run(config: RunConfig, out_dir: Path, on_round: Optional[RoundCallback] = None) -> RunSummary:
    """
    Ejecuta un experimento y escribe run.csv, splits.csv, final_model.csv y
    config.echo en `out_dir`. Ante divergencia, lo ya registrado queda en disco.
    """
    problem = build_problem(config)
    with ExperimentLog(out_dir, config) as log:
        net, rounds = grow_network(config, problem, log, on_round=on_round)
        log.write_final_model(net)
    final = loss(net, problem.data, problem.loss_kind)
    logger.info("Corrida terminada: n=%d, loss=%.10g, salida en %s", net.n, final, out_dir)
    return RunSummary(final_loss=final, neuron_count=net.n, rounds=rounds, out_dir=Path(out_dir), network=net)


# ------------------------------------------
# Barrido de ángulos y autovalor vs ganancia
# ------------------------------------------

def _retrain_spec(config: RunConfig) -> Optional[OptimSpec]:
    if not config.sweep.retrain:
        return None
    return config.optim.model_copy(update={"max_iters": config.sweep.retrain_iters, "batch_size": None})


def angle_sweep(
    net: NetworkState,
    data: Dataset,
    kind: LossKind,
    neuron: int,
    epsilon: float,
    n_angles: int = 72,
    retrain: Optional[OptimSpec] = None,
    conv: Optional[ConvergenceSpec] = None,
) -> List[Tuple[float, float, float]]:
    """
    Ganancia al dividir a lo largo de u(φ) = cos φ·v_min + sin φ·v₂, con v₂ el
    segundo autovector de S, para φ en una grilla uniforme de [0, 2π).

    Returns:
        Filas (φ, ganancia medida, ganancia predicha −ε² u(φ)ᵀSu(φ)/2)

    Raises:
        SweepRefusedError: Si λ_min ≥ 0 o la neurona tiene un solo parámetro
    """
    candidate = splitting_candidates(net, data, kind)[neuron]
    if candidate.splitting_index >= 0:
        raise SweepRefusedError(
            f"λ_min = {candidate.splitting_index:.6g} ≥ 0 en la neurona {neuron}; el barrido no tiene sentido"
        )
    pairs = eig_sym(candidate.matrix)
    if len(pairs) < 2:
        raise SweepRefusedError("Se necesitan al menos dos parámetros para definir el plano del barrido")
    v_min, v_two = pairs[0].vector, pairs[1].vector

    conv = conv or ConvergenceSpec()
    rows = []
    for k in range(n_angles):
        phi = 2.0 * math.pi * k / n_angles
        u = math.cos(phi) * v_min + math.sin(phi) * v_two
        gain = measure_direction_gain(net, data, kind, neuron, u, epsilon, retrain, conv)
        predicted = -0.5 * epsilon * epsilon * candidate.matrix.quad(u / np.linalg.norm(u))
        rows.append((phi, gain, predicted))
    return rows


def eigen_vs_gain(
    net: NetworkState,
    data: Dataset,
    kind: LossKind,
    epsilon: float,
    retrain: Optional[OptimSpec] = None,
    conv: Optional[ConvergenceSpec] = None,
) -> List[Tuple[int, float, float]]:
    """(neurona, λ_min, ganancia medida) para cada neurona, ordenado por λ_min"""
    rows = [
        (c.neuron_index, c.splitting_index, measure_split_gain(net, data, kind, c, epsilon, retrain, conv))
        for c in splitting_candidates(net, data, kind)
    ]
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows


def optimum_for(config: RunConfig) -> Tuple[NetworkState, Problem]:
    """Red en un óptimo paramétrico con target_neurons neuronas (OPTIMAL_SPLIT)"""
    problem = build_problem(config)
    cfg = config.model_copy(update={"run": config.run.model_copy(update={"method": Method.OPTIMAL_SPLIT})})
    net, _ = grow_network(cfg, problem)
    return net, problem


def run_angle_sweep(config: RunConfig, out_dir: Path) -> Path:
    net, problem = optimum_for(config)
    neuron = config.sweep.neuron
    if neuron is None:
        candidates = splitting_candidates(net, problem.data, problem.loss_kind)
        neuron = min(candidates, key=lambda c: (c.splitting_index, c.neuron_index)).neuron_index
    if neuron >= net.n:
        raise SplitNetError(f"sweep.neuron={neuron} fuera de rango (n={net.n})")
    rows = angle_sweep(net, problem.data, problem.loss_kind, neuron, config.policy.epsilon,
                       config.sweep.n_angles, _retrain_spec(config), config.convergence)
    return write_table(Path(out_dir) / "angle_sweep.csv", SWEEP_HEADER, rows, config_hash(config))


def run_eigen_gain(config: RunConfig, out_dir: Path) -> Path:
    net, problem = optimum_for(config)
    rows = eigen_vs_gain(net, problem.data, problem.loss_kind, config.policy.epsilon,
                         _retrain_spec(config), config.convergence)
    seeded = [(config.run.seed,) + row for row in rows]
    return write_table(Path(out_dir) / "eigen_gain.csv", EIGEN_GAIN_HEADER, seeded, config_hash(config))
