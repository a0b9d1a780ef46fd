"""
Physical parameters of the controlled stochastic LLG equation
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from models.fields import Basis, VectorField

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.1
DEFAULT_H = (0.0, 0.0, 1.0)


@dataclass(frozen=True)
class LlgParams:
    """
    Damping, noise direction and cut-off switch for one basis

    Simulations require alpha > 0 (no smallness is assumed); alpha = 0 is
    accepted for evaluating the undamped algebra only. h is constant in time.
    """
    alpha: float
    h: VectorField
    basis: Basis
    cutoff_enabled: bool = False
    h_sup: float = field(init=False)

    def __post_init__(self):
        if not self.alpha >= 0.0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.alpha == 0.0:
            logger.warning("alpha = 0: undamped parameters, not valid for simulation")
        if self.h.grid_size != self.basis.grid_points:
            raise ValueError(
                f"h sampled on M={self.h.grid_size}, basis grid is M={self.basis.grid_points}"
            )
        object.__setattr__(self, "h_sup", float(np.max(np.linalg.norm(self.h.values, axis=1))))

    @classmethod
    def with_constant_h(cls, basis: Basis, alpha: float = DEFAULT_ALPHA, h=DEFAULT_H,
                        cutoff_enabled: bool = False) -> "LlgParams":
        """Parameters with a spatially constant noise direction"""
        return cls(
            alpha=alpha,
            h=VectorField.constant(h, basis.grid_points),
            basis=basis,
            cutoff_enabled=cutoff_enabled,
        )
