#schemas.py
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .models import DirectionMode, Experiment, InitDistribution, Method, NeuronTag, OptimMethod

# ------------------------------------------
# Esquemas del algoritmo
# ------------------------------------------

class SplitPolicy(BaseModel):
    """Presupuesto m*, umbral λ* y paso ε de cada ronda de división"""
    model_config = ConfigDict(extra="forbid")

    max_splits: int = Field(1, ge=0, description="m*: máximo de neuronas divididas por ronda")
    threshold: float = Field(-1e-6, le=0, description="λ*: solo se divide si λ_min ≤ λ*")
    epsilon: float = Field(1e-2, gt=0, description="ε: paso de división")


class OptimSpec(BaseModel):
    """Optimizador de la fase de descenso paramétrico"""
    model_config = ConfigDict(extra="forbid")

    method: OptimMethod = OptimMethod.SGD
    learning_rate: float = Field(0.05, gt=0)
    momentum: float = Field(0.9, ge=0, lt=1)
    batch_size: Optional[int] = Field(None, ge=1, description="None = lote completo (FULL)")
    max_iters: int = Field(10000, ge=0)

    @field_validator("batch_size", mode="before")
    @classmethod
    def parse_full(cls, v):
        if isinstance(v, str) and v.strip().upper() in ("FULL", "NONE", ""):
            return None
        return v


class ConvergenceSpec(BaseModel):
    """Criterio de convergencia: √N·‖∇‖ ≤ τ durante W chequeos consecutivos (N = tamaño de los datos)"""
    model_config = ConfigDict(extra="forbid")

    grad_norm_tol: float = Field(1e-4, gt=0)
    window: int = Field(5, ge=1)
    check_every: int = Field(50, ge=1)
    min_iters: int = Field(0, ge=0)


class InitSpec(BaseModel):
    """Distribución de inicialización de neuronas nuevas"""
    model_config = ConfigDict(extra="forbid")

    distribution: InitDistribution = InitDistribution.NORMAL
    mean: float = 0.0
    std: float = Field(3.0, gt=0)
    low: float = -5.0
    high: float = -3.0

    @model_validator(mode="after")
    def check_bounds(self):
        if self.distribution == InitDistribution.UNIFORM and not self.low < self.high:
            raise ValueError("init.low debe ser menor que init.high")
        return self


class FDSpec(BaseModel):
    """Diferencias finitas centrales"""
    step: float = Field(1e-5, gt=0)
    scheme: Literal["CENTRAL"] = "CENTRAL"


# ------------------------------------------
# Esquemas de configuración de corridas
# ------------------------------------------

class RunSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    experiment: Experiment = Experiment.RBF_TOY
    seed: int = Field(0, ge=0)
    method: Method = Method.OPTIMAL_SPLIT
    initial_neurons: int = Field(1, ge=1)
    target_neurons: int = Field(8, ge=1)
    out_dir: Optional[str] = None

    @model_validator(mode="after")
    def check_sizes(self):
        if self.target_neurons < self.initial_neurons:
            raise ValueError("target_neurons debe ser ≥ initial_neurons")
        return self


class ModelSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: NeuronTag = NeuronTag.RBF1D
    softplus_beta: float = Field(10.0, gt=0)
    bandwidth: Optional[float] = Field(None, gt=0, description="None = heurística de la mediana")
    input_dim: int = Field(1, ge=1)


class DataSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_points: int = Field(1000, ge=1)
    n_true: int = Field(15, ge=1)
    true_std: float = Field(3.0, gt=0)
    x_low: float = -5.0
    x_high: float = 5.0

    @model_validator(mode="after")
    def check_range(self):
        if not self.x_low < self.x_high:
            raise ValueError("data.x_low debe ser menor que data.x_high")
        return self


class SweepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_angles: int = Field(72, ge=4)
    neuron: Optional[int] = Field(None, ge=0, description="None = neurona con menor λ_min")
    retrain: bool = False
    retrain_iters: int = Field(2000, ge=0)


class BaselineSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    restarts: int = Field(5, ge=1)
    random_direction: DirectionMode = DirectionMode.SPHERE


# Valores por defecto que dependen del experimento
RBF_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "optim": {"method": "SGD_MOMENTUM", "learning_rate": 0.01, "momentum": 0.9, "max_iters": 5000},
    "init": {"distribution": "NORMAL", "mean": 0.0, "std": 3.0},
    "run": {"target_neurons": 8},
    "model": {"kind": "RBF1D"},
}
MMD_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "optim": {"method": "ADAGRAD", "learning_rate": 0.01, "max_iters": 10000},
    "init": {"distribution": "UNIFORM", "low": -5.0, "high": -3.0},
    "run": {"target_neurons": 5},
    "model": {"kind": "KERNEL_PARTICLE"},
    "data": {"n_points": 1000},
    "baselines": {"random_direction": "SPLITTING_GRADIENT"},
}
SWEEP_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "run": {"target_neurons": 7},
}
SOFTPLUS_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "run": {"target_neurons": 6},
}


class RunConfig(BaseModel):
    """Configuración completa de una corrida; cada sección valida sus invariantes"""
    model_config = ConfigDict(extra="forbid")

    run: RunSection = Field(default_factory=RunSection)
    model: ModelSection = Field(default_factory=ModelSection)
    data: DataSection = Field(default_factory=DataSection)
    policy: SplitPolicy = Field(default_factory=SplitPolicy)
    optim: OptimSpec = Field(default_factory=OptimSpec)
    convergence: ConvergenceSpec = Field(default_factory=ConvergenceSpec)
    init: InitSpec = Field(default_factory=InitSpec)
    sweep: SweepSection = Field(default_factory=SweepSection)
    baselines: BaselineSection = Field(default_factory=BaselineSection)

    @model_validator(mode="before")
    @classmethod
    def experiment_defaults(cls, data: Any):
        if not isinstance(data, dict):
            return data
        run = data.get("run") or {}
        if isinstance(run, BaseModel):
            return data
        experiment = str(run.get("experiment", Experiment.RBF_TOY.value)).upper()
        layers = [RBF_DEFAULTS]
        if experiment == Experiment.MMD_COMPRESS.value:
            layers = [MMD_DEFAULTS]
        elif experiment in (Experiment.ANGLE_SWEEP.value, Experiment.EIGEN_VS_GAIN.value):
            layers = [RBF_DEFAULTS, SWEEP_DEFAULTS]
        model = data.get("model") or {}
        if isinstance(model, dict) and str(model.get("kind", "")).upper() == NeuronTag.SOFTPLUS_UNIT.value:
            layers.append(SOFTPLUS_DEFAULTS)

        defaults: Dict[str, Dict[str, Any]] = {}
        for layer in layers:
            for section, values in layer.items():
                defaults.setdefault(section, {}).update(values)

        merged = dict(data)
        for section, values in defaults.items():
            current = merged.get(section) or {}
            if isinstance(current, BaseModel):
                continue
            section_values = dict(values)
            section_values.update(current)
            merged[section] = section_values
        return merged


# ------------------------------------------
# Esquemas de filas CSV
# ------------------------------------------

class TraceRow(BaseModel):
    """Un chequeo de convergencia del descenso"""
    iter: int
    loss: float
    grad_norm: float
