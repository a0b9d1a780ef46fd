"""
Pointwise R^3 algebra and the norms/energies used by the estimates

All L^p integrals use the trapezoid weights of the shared grid. Gradients
come from the Galerkin coefficients when a state is supplied (spectral) and
from second-order centered differences otherwise.
"""
import logging
from typing import Optional

import numpy as np

from models.errors import GridMismatchError
from models.fields import Basis, FieldNorms, GalerkinState, VectorField

logger = logging.getLogger(__name__)


def _same_grid(a: VectorField, b: VectorField) -> None:
    if a.values.shape != b.values.shape:
        raise GridMismatchError(f"grid mismatch: {a.values.shape} vs {b.values.shape}")


def pointwise_inner(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """<a(x_j), b(x_j)> for every node"""
    return np.einsum("ij,ij->i", a, b)


def cross(a: VectorField, b: VectorField) -> VectorField:
    """Pointwise a(x_j) x b(x_j)"""
    _same_grid(a, b)
    return VectorField(np.cross(a.values, b.values))


def l2_norm(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sqrt(weights @ pointwise_inner(values, values)))


def gradient_values(v: VectorField, basis: Basis, state: Optional[GalerkinState] = None):
    """
    Derivative of v on the grid and the method that produced it

    Returns:
        Tuple of (derivative values, "spectral" | "finite_difference")
    """
    if state is not None:
        n = state.n_modes
        return basis.derivative_table[:n].T @ state.coefficients, "spectral"
    spacing = 1.0 / v.grid_size
    return np.gradient(v.values, spacing, axis=0, edge_order=2), "finite_difference"


def norms(v: VectorField, basis: Basis, state: Optional[GalerkinState] = None) -> FieldNorms:
    """
    L2, H1, L-infinity norms and the L4 norm of the gradient

    Args:
        v: Field sampled on the basis grid
        basis: Basis providing the quadrature grid
        state: Galerkin coefficients of v; enables the spectral gradient

    Returns:
        FieldNorms with the gradient path recorded
    """
    if v.grid_size != basis.grid_points:
        raise GridMismatchError(f"field grid M={v.grid_size} vs basis M={basis.grid_points}")
    weights = basis.weights
    derivative, method = gradient_values(v, basis, state)

    l2_sq = float(weights @ pointwise_inner(v.values, v.values))
    grad_sq_pointwise = pointwise_inner(derivative, derivative)
    grad_l2_sq = float(weights @ grad_sq_pointwise)
    l4_grad = float((weights @ grad_sq_pointwise ** 2) ** 0.25)
    linf = float(np.max(np.linalg.norm(v.values, axis=1)))

    return FieldNorms(
        l2=float(np.sqrt(l2_sq)),
        h1=float(np.sqrt(l2_sq + grad_l2_sq)),
        linf=linf,
        l4_of_gradient=l4_grad,
        gradient_method=method,
        gradient_l2=float(np.sqrt(grad_l2_sq)),
    )


def exchange_energy(m: GalerkinState, basis: Basis) -> float:
    """Exchange energy 1/2 |d_x m|^2_{L2} with unit exchange constant"""
    derivative = basis.derivative_table[: m.n_modes].T @ m.coefficients
    return 0.5 * float(basis.weights @ pointwise_inner(derivative, derivative))


def sphere_deviation(m: VectorField) -> float:
    """max_j | |m(x_j)| - 1 |"""
    return float(np.max(np.abs(np.linalg.norm(m.values, axis=1) - 1.0)))


def lagrange_identity_residual(a: VectorField, b: VectorField) -> float:
    """max_j | |a x b|^2 + <a,b>^2 - |a|^2 |b|^2 |"""
    _same_grid(a, b)
    axb = np.cross(a.values, b.values)
    lhs = pointwise_inner(axb, axb) + pointwise_inner(a.values, b.values) ** 2
    rhs = pointwise_inner(a.values, a.values) * pointwise_inner(b.values, b.values)
    return float(np.max(np.abs(lhs - rhs)))


def winding_field(grid: np.ndarray, amplitude: float) -> VectorField:
    """m = (cos f, sin f, 0) with f = amplitude * cos(pi x); exactly sphere-valued"""
    phase = amplitude * np.cos(np.pi * grid)
    values = np.stack([np.cos(phase), np.sin(phase), np.zeros_like(phase)], axis=1)
    return VectorField(values, constrained=True)


def normalize_pointwise(values: np.ndarray) -> np.ndarray:
    """m / |m| at every node; zero vectors are left untouched"""
    lengths = np.linalg.norm(values, axis=1, keepdims=True)
    safe = np.where(lengths > 0.0, lengths, 1.0)
    return values / safe
