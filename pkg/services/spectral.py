"""
Spectral layer
Neumann-Laplacian eigenbasis on (0,1), projection P_n, synthesis and
spectral differentiation. Transforms are direct matrix products.
"""
import logging

import numpy as np

from models.errors import BasisSizingError, GridMismatchError
from models.fields import Basis, GalerkinState, VectorField

logger = logging.getLogger(__name__)

# Grid points per mode required to keep products of two fields resolved
ALIASING_FACTOR = 4

ALLOWED_BETAS = (0.0, 0.5, 1.0)


def trapezoid_weights(grid_points: int) -> np.ndarray:
    """Composite trapezoid weights on the uniform grid x_j = j / M"""
    weights = np.full(grid_points + 1, 1.0 / grid_points)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return weights


def build_basis(n_modes: int, grid_points: int) -> Basis:
    """
    Build the cosine eigenbasis of the Neumann Laplacian

    Args:
        n_modes: Number of modes n (indices 0..n-1)
        grid_points: Number of grid intervals M

    Returns:
        Basis with eigenfunctions, eigenvalues and derivatives on the grid

    Raises:
        BasisSizingError: If n < 1 or M < 4n
    """
    if n_modes < 1:
        raise BasisSizingError(f"n_modes must be >= 1, got {n_modes}")
    if grid_points < ALIASING_FACTOR * n_modes:
        raise BasisSizingError(
            f"grid_points M={grid_points} is below {ALIASING_FACTOR}*n_modes={ALIASING_FACTOR * n_modes}"
        )

    grid = np.arange(grid_points + 1) / grid_points
    k = np.arange(n_modes)
    angles = np.pi * np.outer(k, grid)

    eigenfunctions = np.sqrt(2.0) * np.cos(angles)
    eigenfunctions[0, :] = 1.0
    derivative_table = -np.sqrt(2.0) * np.pi * k[:, None] * np.sin(angles)
    # Neumann condition holds exactly at both ends
    derivative_table[:, 0] = 0.0
    derivative_table[:, -1] = 0.0

    eigenvalues = (np.pi * k) ** 2
    weights = trapezoid_weights(grid_points)
    analysis = eigenfunctions * weights

    for array in (grid, weights, eigenfunctions, eigenvalues, derivative_table, analysis):
        array.setflags(write=False)

    logger.debug(f"Built basis with n={n_modes}, M={grid_points}")
    return Basis(
        n_modes=n_modes,
        grid=grid,
        weights=weights,
        eigenfunctions=eigenfunctions,
        eigenvalues=eigenvalues,
        derivative_table=derivative_table,
        analysis=analysis,
    )


def _check_grid(values: np.ndarray, basis: Basis) -> None:
    if values.shape[0] != basis.grid_points + 1:
        raise GridMismatchError(
            f"field has {values.shape[0]} nodes, basis grid has {basis.grid_points + 1}"
        )


def _check_modes(coefficients: np.ndarray, basis: Basis) -> None:
    if coefficients.shape[0] > basis.n_modes:
        raise GridMismatchError(
            f"state has {coefficients.shape[0]} modes, basis has only {basis.n_modes}"
        )


def project(v: VectorField, basis: Basis) -> GalerkinState:
    """
    Orthogonal projection P_n by trapezoid quadrature: c_k = <v, e_k>

    Raises:
        GridMismatchError: If v is not sampled on the basis grid
    """
    _check_grid(v.values, basis)
    return GalerkinState(basis.analysis @ v.values)


def synthesize(state: GalerkinState, basis: Basis) -> VectorField:
    """Evaluate sum_k c_k e_k(x_j) on the grid"""
    _check_modes(state.coefficients, basis)
    n = state.n_modes
    return VectorField(basis.eigenfunctions[:n].T @ state.coefficients)


def laplacian(state: GalerkinState, basis: Basis) -> GalerkinState:
    """Delta = -A in coefficient space: c_k -> -lambda_k c_k"""
    _check_modes(state.coefficients, basis)
    n = state.n_modes
    return GalerkinState(-basis.eigenvalues[:n, None] * state.coefficients)


def spatial_derivative(state: GalerkinState, basis: Basis) -> VectorField:
    """Evaluate sum_k c_k e_k'(x_j) on the grid"""
    _check_modes(state.coefficients, basis)
    n = state.n_modes
    return VectorField(basis.derivative_table[:n].T @ state.coefficients)


def x_beta_norm(state: GalerkinState, basis: Basis, beta: float) -> float:
    """
    Norm of X^beta = dom(A_1^beta), A_1 = I + A

    beta = 0 is the L2 norm, 1/2 the H1 norm and 1 the graph norm of A_1.
    """
    if float(beta) not in ALLOWED_BETAS:
        raise ValueError(f"beta must be one of {ALLOWED_BETAS}, got {beta}")
    _check_modes(state.coefficients, basis)
    n = state.n_modes
    factors = (1.0 + basis.eigenvalues[:n]) ** beta
    return float(np.sqrt(np.sum((factors[:, None] * state.coefficients) ** 2)))


def quadrature_gram_error(basis: Basis) -> float:
    """max_jk |<e_j, e_k>_quad - delta_jk|"""
    gram = basis.analysis @ basis.eigenfunctions.T
    return float(np.max(np.abs(gram - np.eye(basis.n_modes))))
