"""
Seeded Wiener increments

Increments come from numpy's PCG64 bit generator. Per-path seeds are derived
from (master_seed, path_index) by the splitmix64 finalizer applied to
master_seed + (path_index + 1) * 0x9E3779B97F4A7C15 (mod 2^64), so paths are
independent of how many other paths are drawn and in which order.
"""
import logging
import math

import numpy as np

from models.errors import PathRefinementError
from models.trajectory import WienerPath

logger = logging.getLogger(__name__)

MASK_64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """splitmix64 finalizer on a 64-bit integer"""
    z = value & MASK_64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK_64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK_64
    return z ^ (z >> 31)


def mix_seed(master_seed: int, path_index: int) -> int:
    """Per-path seed for common-random-number ensembles"""
    return splitmix64((master_seed + (path_index + 1) * GOLDEN_GAMMA) & MASK_64)


def generate_wiener(seed: int, n_steps: int, dt: float) -> WienerPath:
    """
    Draw n_steps i.i.d. N(0, dt) increments

    Args:
        seed: 64-bit seed of the PCG64 generator
        n_steps: Number of increments (>= 1)
        dt: Time step (> 0)

    Returns:
        WienerPath; identical arguments give bit-identical increments
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    generator = np.random.Generator(np.random.PCG64(seed & MASK_64))
    increments = generator.standard_normal(n_steps) * math.sqrt(dt)
    return WienerPath(dt=dt, increments=increments, seed=seed)


def path_for(master_seed: int, path_index: int, n_steps: int, dt: float) -> WienerPath:
    """Wiener path of one ensemble member; n_steps = 0 gives the empty path of a T = 0 run"""
    seed = mix_seed(master_seed, path_index)
    if n_steps == 0:
        return WienerPath(dt=dt, increments=np.zeros(0), seed=seed)
    return generate_wiener(seed, n_steps, dt)


def refinement_factor(coarse_dt: float, fine_dt: float) -> int:
    """
    Integer k with coarse_dt = k * fine_dt

    Raises:
        PathRefinementError: If the ratio is not an integer >= 1
    """
    ratio = coarse_dt / fine_dt
    factor = int(round(ratio))
    if factor < 1 or abs(ratio - factor) > 1e-9 * max(1.0, ratio):
        raise PathRefinementError(
            f"dt={coarse_dt} is not an integer multiple of the finest dt={fine_dt}"
        )
    return factor


def coarsen_path(path: WienerPath, factor: int) -> WienerPath:
    """
    Sum consecutive blocks of `factor` increments

    The coarse path is the same Brownian motion sampled on a coarser grid.
    """
    if factor < 1:
        raise PathRefinementError(f"coarsening factor must be >= 1, got {factor}")
    if path.n_steps % factor != 0:
        raise PathRefinementError(
            f"{path.n_steps} increments cannot be grouped in blocks of {factor}"
        )
    if factor == 1:
        return path
    blocks = path.increments.reshape(-1, factor).sum(axis=1)
    return WienerPath(dt=path.dt * factor, increments=blocks, seed=path.seed)


def steps_for(horizon: float, dt: float) -> int:
    """
    Number of steps covering [0, T] exactly

    Raises:
        PathRefinementError: If T is not an integer multiple of dt
    """
    if horizon == 0.0:
        return 0
    return refinement_factor(horizon, dt)
