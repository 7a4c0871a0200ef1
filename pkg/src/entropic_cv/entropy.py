"""Differential entropy and variance of gridded densities, in nats."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import xlogy

from .distributions import CLAMP, GriddedDensity1D, _trapz_mass
from .errors import ConvergenceError, InvalidInputError

CONVERGENCE_TOL = 1e-4
MAX_POINTS = 8192
NORMALIZATION_TOL = 1e-6


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    grid_points: int
    refinement_delta: Optional[float] = None

    @property
    def converged(self) -> bool:
        return self.refinement_delta is not None and self.refinement_delta < CONVERGENCE_TOL


def _entropy_value(d: GriddedDensity1D) -> float:
    if abs(d.integral() - 1.0) > NORMALIZATION_TOL:
        raise InvalidInputError(f"density integrates to {d.integral():.8f}, expected 1")
    rho = np.where(d.density < CLAMP, 0.0, d.density)
    return float(-_trapz_mass(xlogy(rho, rho), d.spacing))


def differential_entropy(d: GriddedDensity1D,
                         companion: Optional[GriddedDensity1D] = None) -> EntropyEstimate:
    """-integral rho ln rho by the trapezoid rule, with 0 ln 0 = 0.

    Pass the same density at doubled resolution as ``companion`` to get a
    refinement delta; the returned value is then the finer estimate.
    """
    h = _entropy_value(d)
    if companion is None:
        return EntropyEstimate(h, d.grid.size)
    h2 = _entropy_value(companion)
    return EntropyEstimate(h2, companion.grid.size, abs(h2 - h))


def variance(d: GriddedDensity1D) -> float:
    x = d.grid
    w = d.density
    m = float(_trapz_mass(x * w, d.spacing))
    return float(_trapz_mass(x * x * w, d.spacing)) - m * m


def gaussian_entropy(var: float) -> float:
    """ln sqrt(2 pi e var), the maximum entropy at a given variance."""
    return 0.5 * np.log(2 * np.pi * np.e * var)


def converged_entropy(producer: Callable[[int], GriddedDensity1D], start_points: int = 128,
                      tol: float = CONVERGENCE_TOL, max_points: int = MAX_POINTS) -> EntropyEstimate:
    """Double the resolution until successive entropies agree within ``tol``.

    ``producer(points)`` must return the normalized density sampled with
    ``points`` grid points.  Raises ConvergenceError once ``max_points`` is
    reached without agreement.
    """
    if start_points < 2:
        raise InvalidInputError("start_points must be >= 2")
    points = int(start_points)
    previous = EntropyEstimate(_entropy_value(producer(points)), points)
    while points * 2 <= max_points:
        points *= 2
        value = _entropy_value(producer(points))
        delta = abs(value - previous.value)
        current = EntropyEstimate(value, points, delta)
        if delta < tol:
            return current
        previous = current
    raise ConvergenceError(
        f"entropy did not settle within {tol:g} nats by {points} points",
        estimates=(previous,))
