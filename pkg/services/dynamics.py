"""
LLG right-hand side for the Galerkin system

Noise operator G(m) = m x h - alpha m x (m x h), its Frechet derivative,
the Stratonovich-to-Ito correction DG_n(m)(G_n(m)), the cut-off psi_n and
the drifts of the truncated Galerkin equation. Products are formed on the
grid and projected back (pseudo-spectral).
"""
import logging
from typing import Optional, Tuple

import numpy as np

from models.errors import GridMismatchError
from models.fields import Basis, GalerkinState, VectorField
from models.params import LlgParams
from services.fields import pointwise_inner

logger = logging.getLogger(__name__)


def smoothstep_cutoff(r: float, plateau: float) -> float:
    """
    C^1 bump psi_0: 1 on [0, plateau], 0 on [plateau + 1, inf)

    The transition is the quintic smoothstep, so psi_0(plateau + 1/2) = 1/2.
    """
    s = min(max(r - plateau, 0.0), 1.0)
    return 1.0 - s ** 3 * (10.0 - 15.0 * s + 6.0 * s ** 2)


def _max_norm(values: np.ndarray) -> float:
    return float(np.max(np.sqrt(pointwise_inner(values, values))))


def triple_product_residual(state: GalerkinState, basis: Basis) -> float:
    """
    L2 norm of m x (m x Delta m) + Delta m + |grad m|^2 m on the grid

    Vanishes for sphere-valued m; off the sphere it is O(1).
    """
    n = state.n_modes
    c = state.coefficients
    m = basis.eigenfunctions[:n].T @ c
    lap = basis.eigenfunctions[:n].T @ (-basis.eigenvalues[:n, None] * c)
    grad = basis.derivative_table[:n].T @ c
    residual = (
        np.cross(m, np.cross(m, lap))
        + lap
        + pointwise_inner(grad, grad)[:, None] * m
    )
    return float(np.sqrt(basis.weights @ pointwise_inner(residual, residual)))


class LlgDynamics:
    """
    Coefficient-space right-hand side of the truncated Galerkin SDE

    Typed operations (g_apply, correction, drift_ito, ...) work on
    VectorField/GalerkinState values; `evaluate` is the array-level path the
    integrators call once per stage.
    """

    def __init__(self, params: LlgParams):
        """
        Initialize the right-hand side for one parameter set

        Args:
            params: Damping, noise direction, cut-off flag and basis
        """
        self.params = params
        self.basis = params.basis
        self.alpha = float(params.alpha)
        self._h = params.h.values
        self._synthesis = params.basis.eigenfunctions.T
        self._analysis = params.basis.analysis
        self._neg_eigenvalues = -params.basis.eigenvalues[:, None]
        self._plateau = params.h_sup + 1.0
        logger.info(
            f"LLG dynamics initialized: n={self.basis.n_modes}, M={self.basis.grid_points}, "
            f"alpha={self.alpha}, cutoff={'on' if params.cutoff_enabled else 'off'}"
        )

    # -- grid algebra -------------------------------------------------------

    def _check_field(self, *fields: VectorField) -> None:
        for f in fields:
            if f.grid_size != self.basis.grid_points:
                raise GridMismatchError(
                    f"field grid M={f.grid_size} vs basis M={self.basis.grid_points}"
                )

    def _check_state(self, state: GalerkinState) -> None:
        if state.n_modes != self.basis.n_modes:
            raise GridMismatchError(
                f"state has {state.n_modes} modes, dynamics basis has {self.basis.n_modes}"
            )

    def _g(self, v: np.ndarray, k: np.ndarray) -> np.ndarray:
        vk = np.cross(v, k)
        return vk - self.alpha * np.cross(v, vk)

    def _dg(self, v: np.ndarray, w: np.ndarray, k: np.ndarray) -> np.ndarray:
        wk = np.cross(w, k)
        return wk - self.alpha * (np.cross(v, wk) + np.cross(w, np.cross(v, k)))

    def g_apply(self, v: VectorField, k: VectorField) -> VectorField:
        """Pointwise v x k - alpha v x (v x k)"""
        self._check_field(v, k)
        return VectorField(self._g(v.values, k.values))

    def dg_apply(self, v: VectorField, w: VectorField) -> VectorField:
        """Frechet derivative DG(v)(w)h = w x h - alpha [v x (w x h) + w x (v x h)]"""
        self._check_field(v, w)
        return VectorField(self._dg(v.values, w.values, self._h))

    def lipschitz_ratio(self, v1: VectorField, v2: VectorField) -> float:
        """|G(v1) - G(v2)|_{L2} / |v1 - v2|_{L2} with k = h"""
        self._check_field(v1, v2)
        weights = self.basis.weights
        diff_g = self._g(v1.values, self._h) - self._g(v2.values, self._h)
        diff_v = v1.values - v2.values
        num = np.sqrt(weights @ pointwise_inner(diff_g, diff_g))
        den = np.sqrt(weights @ pointwise_inner(diff_v, diff_v))
        return float(num / den)

    def lipschitz_bound(self, radius: float) -> float:
        """Lipschitz constant |h|_inf (1 + 2 alpha R) of G on the L-infinity ball of radius R"""
        return self.params.h_sup * (1.0 + 2.0 * self.alpha * radius)

    # -- cut-off ------------------------------------------------------------

    def _psi_from_grid(self, m: np.ndarray, proj_mh: np.ndarray, proj_mmh: np.ndarray) -> float:
        return (
            smoothstep_cutoff(_max_norm(m), self._plateau)
            * smoothstep_cutoff(_max_norm(proj_mh), self._plateau)
            * smoothstep_cutoff(_max_norm(proj_mmh), self._plateau)
        )

    def psi_cutoff(self, v: VectorField) -> float:
        """
        psi_n(v) = psi_0(|v|_inf) psi_0(|P_n(v x h)|_inf) psi_0(|P_n(v x (v x h))|_inf)

        Evaluated regardless of the cut-off flag.
        """
        self._check_field(v)
        vh = np.cross(v.values, self._h)
        vvh = np.cross(v.values, vh)
        proj_vh = self._synthesis @ (self._analysis @ vh)
        proj_vvh = self._synthesis @ (self._analysis @ vvh)
        return self._psi_from_grid(v.values, proj_vh, proj_vvh)

    # -- array-level right-hand side ---------------------------------------

    def evaluate(
        self,
        c: np.ndarray,
        u_coefficients: Optional[np.ndarray] = None,
        with_correction: bool = True,
    ) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
        """
        Stratonovich drift, noise coefficient and correction in one pass

        Args:
            c: Coefficients (n, 3) of m
            u_coefficients: Coefficients (n, 3) of u_n = P_n u, or None for u = 0
            with_correction: Whether to assemble psi^2 DG_n(m)(G_n(m))

        Returns:
            Tuple of (drift without correction, psi P_n G(m), correction or None)
        """
        alpha = self.alpha
        h = self._h
        m = self._synthesis @ c
        mh = np.cross(m, h)
        mmh = np.cross(m, mh)

        psi = 1.0
        proj_mh = proj_mmh = None
        if self.params.cutoff_enabled or with_correction:
            proj_mh = self._synthesis @ (self._analysis @ mh)
            proj_mmh = self._synthesis @ (self._analysis @ mmh)
            if self.params.cutoff_enabled:
                psi = self._psi_from_grid(m, proj_mh, proj_mmh)

        noise = psi * (self._analysis @ (mh - alpha * mmh))

        lap = self._synthesis @ (self._neg_eigenvalues * c)
        m_lap = np.cross(m, lap)
        drift_grid = m_lap - alpha * np.cross(m, m_lap)
        if u_coefficients is not None:
            u = self._synthesis @ u_coefficients
            m_u = np.cross(m, u)
            drift_grid = drift_grid + m_u - alpha * psi * np.cross(m, m_u)
        drift = self._analysis @ drift_grid

        correction = None
        if with_correction:
            correction = psi ** 2 * self._expanded_correction(m, mh, proj_mh, proj_mmh)
        return drift, noise, correction

    def _expanded_correction(self, m, mh, proj_mh, proj_mmh) -> np.ndarray:
        """
        DG_n(m)(G_n(m)) term by term with the nested projections kept

        With a = P_n(m x h) and b = P_n(m x (m x h)):
          P(a x h) - alpha P(b x h) - alpha P(a x (m x h)) - alpha P(m x (a x h))
          + alpha^2 P(b x (m x h)) + alpha^2 P(m x (b x h))
        """
        alpha = self.alpha
        h = self._h
        a_h = np.cross(proj_mh, h)
        b_h = np.cross(proj_mmh, h)
        terms = np.stack([
            a_h,
            b_h,
            np.cross(proj_mh, mh),
            np.cross(m, a_h),
            np.cross(proj_mmh, mh),
            np.cross(m, b_h),
        ])
        projected = np.matmul(self._analysis, terms)
        signs = np.array([1.0, -alpha, -alpha, -alpha, alpha ** 2, alpha ** 2])
        return np.tensordot(signs, projected, axes=1)

    # -- typed operations ---------------------------------------------------

    def _u_coefficients(self, u_slice: Optional[VectorField]) -> Optional[np.ndarray]:
        if u_slice is None:
            return None
        self._check_field(u_slice)
        return self._analysis @ u_slice.values

    def correction(self, state: GalerkinState) -> GalerkinState:
        """psi^2 DG_n(m)(G_n(m)) by the six-term expansion (the 1/2 is not included)"""
        self._check_state(state)
        _, _, corr = self.evaluate(state.coefficients, None, with_correction=True)
        return GalerkinState(corr)

    def correction_composed(self, state: GalerkinState) -> GalerkinState:
        """psi^2 P_n[DG(m)(P_n G(m))], the composed evaluation of the same term"""
        self._check_state(state)
        c = state.coefficients
        m = self._synthesis @ c
        g_projected = self._synthesis @ (self._analysis @ self._g(m, self._h))
        psi = self.psi_cutoff(VectorField(m)) if self.params.cutoff_enabled else 1.0
        return GalerkinState(psi ** 2 * (self._analysis @ self._dg(m, g_projected, self._h)))

    def noise_coefficient(self, state: GalerkinState) -> GalerkinState:
        """psi P_n G(m), the diffusion coefficient of the Galerkin SDE"""
        self._check_state(state)
        _, noise, _ = self.evaluate(state.coefficients, None, with_correction=False)
        return GalerkinState(noise)

    def stratonovich_drift(self, state: GalerkinState, u_slice: Optional[VectorField] = None) -> GalerkinState:
        """Drift terms 1-4 (exchange, damping, control, damped control)"""
        self._check_state(state)
        drift, _, _ = self.evaluate(state.coefficients, self._u_coefficients(u_slice), with_correction=False)
        return GalerkinState(drift)

    def drift_ito(self, state: GalerkinState, u_slice: Optional[VectorField] = None) -> GalerkinState:
        """
        Ito drift of the truncated Galerkin equation

        P_n(m x Dm) - alpha P_n[m x (m x Dm)] + P_n(m x u_n)
        - alpha psi P_n[m x (m x u_n)] + 1/2 psi^2 DG_n(m)(G_n(m))
        """
        self._check_state(state)
        drift, _, corr = self.evaluate(state.coefficients, self._u_coefficients(u_slice), with_correction=True)
        return GalerkinState(drift + 0.5 * corr)

    def drift_terms(self, state: GalerkinState, u_slice: Optional[VectorField] = None):
        """
        The four cross-product drift terms separately projected

        Returns:
            List of four GalerkinState values in equation order
        """
        self._check_state(state)
        c = state.coefficients
        u_coefficients = self._u_coefficients(u_slice)
        u_values = np.zeros_like(self._h) if u_coefficients is None else self._synthesis @ u_coefficients
        m = self._synthesis @ c
        lap = self._synthesis @ (self._neg_eigenvalues * c)
        psi = self.psi_cutoff(VectorField(m)) if self.params.cutoff_enabled else 1.0
        m_lap = np.cross(m, lap)
        m_u = np.cross(m, u_values)
        grids = [
            m_lap,
            -self.alpha * np.cross(m, m_lap),
            m_u,
            -self.alpha * psi * np.cross(m, m_u),
        ]
        return [GalerkinState(self._analysis @ g) for g in grids]
