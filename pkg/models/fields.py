"""
Grid and coefficient data types shared by all services
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


def _frozen_array(values, width: int, what: str) -> np.ndarray:
    """Copy values into a read-only float array of shape (rows, width)"""
    array = np.array(values, dtype=float)
    if array.ndim != 2 or array.shape[1] != width:
        raise ValueError(f"{what} must have shape (rows, {width}), got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{what} contains non-finite entries")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Basis:
    """
    Neumann-Laplacian eigenbasis on (0,1) sampled on a uniform grid

    Mode k is e_0 = 1 and e_k = sqrt(2) cos(k pi x) for k >= 1 with
    eigenvalue (k pi)^2. Rows of the tables are modes, columns grid nodes.
    """
    n_modes: int
    grid: np.ndarray  # x_j = j / M, j = 0..M
    weights: np.ndarray  # composite trapezoid weights
    eigenfunctions: np.ndarray  # (n_modes, M + 1)
    eigenvalues: np.ndarray  # (n_modes,)
    derivative_table: np.ndarray  # (n_modes, M + 1)
    analysis: np.ndarray = field(repr=False)  # eigenfunctions * weights

    @property
    def grid_points(self) -> int:
        """Number of grid intervals M"""
        return len(self.grid) - 1


@dataclass(frozen=True)
class VectorField:
    """
    R^3-valued field sampled on the M + 1 grid nodes

    `constrained` marks fields expected to be sphere-valued (|v| = 1).
    """
    values: np.ndarray
    constrained: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, 3, "VectorField values"))

    @property
    def grid_size(self) -> int:
        """Number of grid intervals M"""
        return self.values.shape[0] - 1

    def scaled(self, factor: float) -> "VectorField":
        """Return factor * self (the constraint flag is dropped)"""
        return VectorField(self.values * factor)

    @classmethod
    def constant(cls, vector, grid_size: int) -> "VectorField":
        """Field equal to `vector` at every node"""
        vec = np.asarray(vector, dtype=float)
        return cls(np.tile(vec, (grid_size + 1, 1)))


@dataclass(frozen=True)
class GalerkinState:
    """
    Coefficients of m in span{e_0, ..., e_{n-1}}, one R^3 row per mode
    """
    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", _frozen_array(self.coefficients, 3, "GalerkinState coefficients")
        )

    @property
    def n_modes(self) -> int:
        return self.coefficients.shape[0]

    def l2_norm(self) -> float:
        """L2 norm via Parseval (the basis is orthonormal)"""
        return float(np.sqrt(np.sum(self.coefficients ** 2)))

    def padded(self, n_modes: int) -> np.ndarray:
        """Coefficient array extended with zero modes (or truncated) to n_modes rows"""
        out = np.zeros((n_modes, 3))
        keep = min(n_modes, self.n_modes)
        out[:keep] = self.coefficients[:keep]
        return out


@dataclass(frozen=True)
class FieldNorms:
    """Norms and energies of one field"""
    l2: float
    h1: float
    linf: float
    l4_of_gradient: float
    gradient_method: str  # "spectral" or "finite_difference"
    gradient_l2: Optional[float] = None
