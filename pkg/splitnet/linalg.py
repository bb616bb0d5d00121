#linalg.py
"""
Vectores y matrices simétricas densas con un eigensolver de Jacobi cíclico.

Pensado para la dimensión de parámetros de una neurona (d ≤ ~200), donde un
método cúbico es suficiente.
"""
import math
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from .exceptions import NumericalError

MAX_SWEEPS = 100
OFF_TOL = 1e-12
SIGN_TOL = 1e-12

NON_FINITE_MATRIX = "La matriz contiene entradas no finitas (NaN/Inf)"
NON_FINITE_VECTOR = "El vector contiene entradas no finitas (NaN/Inf)"


def as_vec(values) -> np.ndarray:
    """Convierte a vector float 1D y rechaza NaN/Inf"""
    vec = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(vec)):
        raise NumericalError(NON_FINITE_VECTOR)
    return vec


class SymMatrix(BaseModel):
    """Matriz simétrica d×d; la simetría se impone al construirla"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray

    @field_validator("data", mode="before")
    @classmethod
    def symmetrize(cls, v):
        arr = np.array(v, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"Se esperaba una matriz cuadrada, llegó forma {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NumericalError(NON_FINITE_MATRIX)
        return 0.5 * (arr + arr.T)

    @classmethod
    def zeros(cls, d: int) -> "SymMatrix":
        return cls(data=np.zeros((d, d)))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.data, "fro"))

    def quad(self, v: np.ndarray) -> float:
        """vᵀ A v"""
        return float(v @ self.data @ v)

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix(data=self.data + other.data)


class EigenPair(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float
    vector: np.ndarray


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # primera componente no nula positiva
    for comp in v:
        if abs(comp) > SIGN_TOL:
            return v if comp > 0 else -v
    return v


def _jacobi(a: np.ndarray):
    """Rotaciones de Jacobi cíclicas; devuelve (diagonal, V) sin ordenar"""
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a, "fro")
    if scale == 0.0:
        return np.zeros(n), v

    for _ in range(MAX_SWEEPS):
        off = math.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
        if off <= OFF_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = float(a[p, q])
                if apq == 0.0:
                    continue
                h = float(a[q, q] - a[p, p])
                # apq despreciable frente a h: t ≈ apq/h sin formar θ²
                if abs(h) + 100.0 * abs(apq) == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    return np.diag(a).copy(), v


def eig_sym(A: SymMatrix) -> List[EigenPair]:
    """
    Espectro completo de una matriz simétrica.

    Args:
        A: Matriz simétrica finita

    Returns:
        Pares (valor, vector unitario) en orden ascendente; empates ordenados
        por índice de pivote y signo fijado (primera componente no nula > 0)
    """
    values, vectors = _jacobi(A.data)
    order = np.argsort(values, kind="stable")
    pairs = []
    for idx in order:
        vec = vectors[:, idx]
        vec = _fix_sign(vec / np.linalg.norm(vec))
        pairs.append(EigenPair(value=float(values[idx]), vector=vec))
    return pairs


def min_eigenpair(A: SymMatrix) -> EigenPair:
    """Par propio mínimo (λ_min, v_min); punto de entrada estable para un solver iterativo futuro"""
    return eig_sym(A)[0]


def reconstruct(pairs: List[EigenPair]) -> np.ndarray:
    """V Λ Vᵀ a partir de los pares propios"""
    vecs = np.column_stack([p.vector for p in pairs])
    vals = np.array([p.value for p in pairs])
    return (vecs * vals) @ vecs.T
