#models.py
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator, ValidationInfo

from .exceptions import DimensionError, NumericalError
from .linalg import SymMatrix

UNIT_TOL = 1e-9


# Enumeradores para tipos predefinidos
class NeuronTag(str, Enum):
    """Tipos de neurona con derivadas analíticas"""
    RBF1D = "RBF1D"
    SOFTPLUS_UNIT = "SOFTPLUS_UNIT"
    KERNEL_PARTICLE = "KERNEL_PARTICLE"

class LossTag(str, Enum):
    """Funcionales de pérdida disponibles"""
    SQUARED_ERROR = "SQUARED_ERROR"
    MMD = "MMD"

class OptimMethod(str, Enum):
    SGD = "SGD"
    SGD_MOMENTUM = "SGD_MOMENTUM"
    ADAGRAD = "ADAGRAD"

class Method(str, Enum):
    """Métodos de crecimiento comparados"""
    OPTIMAL_SPLIT = "OPTIMAL_SPLIT"
    RANDOM_SPLIT = "RANDOM_SPLIT"
    NEW_INIT = "NEW_INIT"
    GRADIENT_BOOST = "GRADIENT_BOOST"
    SCRATCH = "SCRATCH"

class Experiment(str, Enum):
    RBF_TOY = "RBF_TOY"
    ANGLE_SWEEP = "ANGLE_SWEEP"
    EIGEN_VS_GAIN = "EIGEN_VS_GAIN"
    MMD_COMPRESS = "MMD_COMPRESS"
    VERIFY_ALL = "VERIFY_ALL"

class InitDistribution(str, Enum):
    NORMAL = "NORMAL"
    UNIFORM = "UNIFORM"

class DirectionMode(str, Enum):
    """Dirección usada por la división aleatoria"""
    SPHERE = "SPHERE"
    SPLITTING_GRADIENT = "SPLITTING_GRADIENT"


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if ndim == 2 and arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != ndim:
        raise ValueError(f"{name} debe tener {ndim} dimensiones, llegó forma {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} contiene valores no finitos")
    arr.setflags(write=False)
    return arr


# Tipo de neurona #
class NeuronKind(BaseModel):
    """
    Tipo de neurona y sus hiperparámetros.

    RBF1D: σ(θ,x) = θ₃·exp(−(θ₁x+θ₂)²/2), d = 3
    SOFTPLUS_UNIT: σ(θ,x) = a·softplus_β(wᵀx + b), θ = (w, b, a), d = input_dim + 2
    KERNEL_PARTICLE: σ(θ,x) = exp(−‖θ−x‖²/(2h²)), d = input_dim
    """
    model_config = ConfigDict(frozen=True)

    tag: NeuronTag
    beta: float = Field(10.0, gt=0, description="Nitidez de la softplus")
    bandwidth: Optional[float] = Field(None, gt=0, description="Ancho de banda h del kernel RBF")
    input_dim: int = Field(1, ge=1, description="Dimensión de la entrada (softplus) o de la partícula (kernel)")

    @model_validator(mode="after")
    def check_bandwidth(self):
        if self.tag == NeuronTag.KERNEL_PARTICLE and self.bandwidth is None:
            raise ValueError("KERNEL_PARTICLE requiere bandwidth (h > 0)")
        if self.tag == NeuronTag.RBF1D and self.input_dim != 1:
            raise ValueError("RBF1D solo admite entradas escalares")
        return self

    @property
    def dim(self) -> int:
        if self.tag == NeuronTag.RBF1D:
            return 3
        if self.tag == NeuronTag.SOFTPLUS_UNIT:
            return self.input_dim + 2
        return self.input_dim


# Estado de la red #
class NetworkState(BaseModel):
    """Red como suma ponderada Σ w_i σ(θ_i, x); filas de `neurons` son los θ_i"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: NeuronKind
    neurons: np.ndarray
    weights: np.ndarray

    @field_validator("neurons", mode="before")
    @classmethod
    def validate_neurons(cls, v, info: ValidationInfo):
        arr = _frozen_array(v, 2, "neurons")
        kind = info.data.get("kind")
        if kind is not None and arr.shape[0] > 0 and arr.shape[1] != kind.dim:
            raise DimensionError(
                f"θ de dimensión {arr.shape[1]} no corresponde a {kind.tag.value} (d={kind.dim})"
            )
        if kind is not None and arr.shape[0] == 0:
            arr = np.zeros((0, kind.dim))
            arr.setflags(write=False)
        return arr

    @field_validator("weights", mode="before")
    @classmethod
    def validate_weights(cls, v, info: ValidationInfo):
        arr = _frozen_array(v, 1, "weights")
        neurons = info.data.get("neurons")
        if neurons is not None and arr.shape[0] != neurons.shape[0]:
            raise ValueError("neurons y weights deben tener la misma longitud")
        if np.any(arr <= 0):
            raise ValueError("Todos los pesos deben ser positivos")
        return arr

    @property
    def n(self) -> int:
        return self.neurons.shape[0]

    @property
    def dim(self) -> int:
        return self.kind.dim

    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def replace(self, neurons=None, weights=None) -> "NetworkState":
        """Nuevo estado validado con neuronas y/o pesos reemplazados"""
        return NetworkState(
            kind=self.kind,
            neurons=self.neurons if neurons is None else neurons,
            weights=self.weights if weights is None else weights,
        )


# Conjunto de datos #
class Dataset(BaseModel):
    """Entradas x (escalares o vectores) y objetivos y; sin objetivos para MMD"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    inputs: np.ndarray
    targets: Optional[np.ndarray] = None

    @field_validator("inputs", mode="before")
    @classmethod
    def validate_inputs(cls, v):
        arr = np.array(v, dtype=float)
        if arr.shape[0] == 0:
            raise ValueError("El conjunto de datos no puede estar vacío")
        if not np.all(np.isfinite(arr)):
            raise NumericalError("Entradas con valores no finitos")
        arr.setflags(write=False)
        return arr

    @field_validator("targets", mode="before")
    @classmethod
    def validate_targets(cls, v, info: ValidationInfo):
        if v is None:
            return None
        arr = _frozen_array(v, 1, "targets")
        inputs = info.data.get("inputs")
        if inputs is not None and arr.shape[0] != inputs.shape[0]:
            raise ValueError("inputs y targets deben tener la misma longitud")
        return arr

    @property
    def size(self) -> int:
        return self.inputs.shape[0]

    def subset(self, idx: np.ndarray) -> "Dataset":
        return Dataset(
            inputs=self.inputs[idx],
            targets=None if self.targets is None else self.targets[idx],
        )


# Tipo de pérdida #
class LossKind(BaseModel):
    """Pérdida cuadrática o MMD contra un conjunto de partículas de referencia"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tag: LossTag
    reference: Optional[np.ndarray] = None

    _cache: dict = PrivateAttr(default_factory=dict)

    @field_validator("reference", mode="before")
    @classmethod
    def validate_reference(cls, v):
        if v is None:
            return None
        arr = np.array(v, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.shape[0] == 0:
            raise ValueError("El conjunto de referencia MMD no puede estar vacío")
        if not np.all(np.isfinite(arr)):
            raise NumericalError("Referencia MMD con valores no finitos")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def check_reference(self):
        if self.tag == LossTag.MMD and self.reference is None:
            raise ValueError("MMD requiere partículas de referencia")
        return self

    @classmethod
    def squared_error(cls) -> "LossKind":
        return cls(tag=LossTag.SQUARED_ERROR)

    @classmethod
    def mmd(cls, reference) -> "LossKind":
        return cls(tag=LossTag.MMD, reference=reference)

    def subset(self, idx: np.ndarray) -> "LossKind":
        if self.reference is None:
            return self
        return LossKind(tag=self.tag, reference=self.reference[idx])


# Registro de decisiones de división #
class SplitCandidate(BaseModel):
    """Índice de división λ_min y gradiente de división v_min de una neurona"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    neuron_index: int = Field(..., ge=0)
    splitting_index: float
    splitting_gradient: np.ndarray
    matrix: SymMatrix
    theta: np.ndarray = Field(..., description="θ del padre al momento del cálculo")
    weight: float = Field(..., gt=0)

    @field_validator("splitting_gradient", mode="before")
    @classmethod
    def validate_unit(cls, v):
        arr = np.array(v, dtype=float)
        if abs(np.linalg.norm(arr) - 1.0) > UNIT_TOL:
            raise ValueError("El gradiente de división debe ser unitario")
        return arr


class SplitEvent(BaseModel):
    """Una división aplicada (una fila de splits.csv)"""
    model_config = ConfigDict(frozen=True)

    round: int = Field(..., ge=0)
    parent_index: int = Field(..., ge=0)
    lambda_min: Optional[float] = None
    epsilon: float = Field(..., ge=0)
    children: Tuple[int, int]
