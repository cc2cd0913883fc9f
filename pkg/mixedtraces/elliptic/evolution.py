# mixedtraces/elliptic/evolution.py

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import ZeroForcing
from mixedtraces.extension.grid_function import GridFunction

from .spectrum import Spectrum

logger = logging.getLogger(__name__)

Forcing = Union[np.ndarray, GridFunction, Sequence[GridFunction]]


@dataclass(eq=False)
class Trajectory:
    """u(t_i) on free nodes at t_i = i·T/steps, together with the forcing used."""

    times: np.ndarray
    states: np.ndarray
    forcing: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, "norm": np.linalg.norm(self.states, axis=1)})


def forcing_samples(spec: Spectrum, forcing: Forcing, steps: int) -> np.ndarray:
    """(steps, n) array of piecewise-constant forcing values on [t_i, t_{i+1})."""
    if isinstance(forcing, GridFunction):
        return np.tile(spec.vector(forcing), (steps, 1))
    if isinstance(forcing, np.ndarray):
        arr = np.asarray(forcing, dtype=float)
        if arr.ndim == 1:
            return np.tile(arr, (steps, 1))
        if arr.shape[0] != steps:
            raise ValueError(f"forcing has {arr.shape[0]} samples for {steps} steps")
        return arr
    rows = [spec.vector(f) for f in forcing]
    if len(rows) != steps:
        raise ValueError(f"forcing has {len(rows)} samples for {steps} steps")
    return np.array(rows)


def mild_solution(
    spec: Spectrum,
    forcing: Forcing,
    T: Optional[float] = None,
    steps: Optional[int] = None,
) -> Trajectory:
    """u(t) = ∫₀ᵗ e^{−(t−τ)L} f(τ) dτ with u(0) = 0, integrated exactly per mode.

    On each step the forcing is constant, so every mode follows
    c ↦ e^{−λΔt} c + (1 − e^{−λΔt})/λ · f̂.

    Args:
        spec: Spectrum of L_D
        forcing: One vector or grid function (constant in time), or one per step
        T: Horizon
        steps: Number of time steps

    Returns:
        Trajectory with steps + 1 states
    """
    T = float(resolve("mr_horizon", T))
    steps = int(resolve("mr_steps", steps))
    if not T > 0 or steps < 1:
        raise ValueError(f"need T > 0 and at least one step, got T={T}, steps={steps}")
    f = forcing_samples(spec, forcing, steps)
    V = spec.eigenvectors
    lam = spec.eigenvalues
    dt = T / steps
    decay = np.exp(-lam * dt)
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = np.where(lam > 0, -np.expm1(-lam * dt) / lam, dt)
    modes = f @ V
    coeff = np.zeros((steps + 1, len(lam)))
    for i in range(steps):
        coeff[i + 1] = decay * coeff[i] + gain * modes[i]
    states = coeff @ V.T
    return Trajectory(times=np.linspace(0.0, T, steps + 1), states=states, forcing=f)


def _bochner(values: np.ndarray, p: float, dt: float, h: float) -> float:
    """Discrete ‖·‖ of L^p([0, T); L^p(Ω)) for right-endpoint samples."""
    return float(((np.abs(values) ** p).sum() * h * h * dt) ** (1.0 / p))


def max_regularity_ratio(
    spec: Spectrum,
    forcing: Union[Forcing, Trajectory],
    p: float = 2.0,
    T: Optional[float] = None,
    steps: Optional[int] = None,
) -> float:
    """(‖u_t‖ + ‖Lu‖) / ‖f‖ in L^p([0, T); L^p(Ω)) for the mild solution u.

    Samples are taken at the right endpoints t_{i+1}, with u_t = f_i − L u(t_{i+1}).

    Args:
        spec: Spectrum of L_D
        forcing: Forcing, or a trajectory already solved for it
        p: Exponent
        T: Horizon
        steps: Number of time steps

    Returns:
        The ratio

    Raises:
        ZeroForcing
    """
    traj = forcing if isinstance(forcing, Trajectory) else mild_solution(spec, forcing, T, steps)
    h = spec.operator.h if spec.operator is not None else 1.0
    dt = traj.dt
    V = spec.eigenvectors
    u = traj.states[1:]
    Lu = ((u @ V) * spec.eigenvalues) @ V.T
    ut = traj.forcing - Lu
    f_norm = _bochner(traj.forcing, p, dt, h)
    if f_norm == 0:
        raise ZeroForcing("forcing vanishes on [0, T)")
    ratio = (_bochner(ut, p, dt, h) + _bochner(Lu, p, dt, h)) / f_norm
    logger.debug("Maximal-regularity ratio at p=%g: %.6g", p, ratio)
    return float(ratio)
