"""Quadrature probability densities on uniform grids.

Joint densities come from Fock coefficients (or closed-form fields) at the
local angles (theta1, theta2).  Marginals of a1 r1 +- a2 r2 are line
integrals through the joint grid.  Distributions of s_j are obtained from
the same pipeline at theta_j + pi/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import (GridCoverageError, InvalidInputError, UnsupportedAngleError)
from .fock import FockState2, hermite_basis, position_wavefunction, rotate_modes
from .states import AnalyticPureState, Ensemble

DEFAULT_POINTS = 1024
COVERAGE_TOL = 1e-4
COMBO_COVERAGE_TOL = 1e-3
CLAMP = 1e-300
_ANGLE_EPS = 1e-12


def _trapz_mass(values: np.ndarray, h: float, axis=None) -> np.ndarray:
    """Trapezoid integral on a uniform grid."""
    v = np.asarray(values)
    if axis is None:
        return h * (v.sum() - 0.5 * (v[0] + v[-1]))
    total = v.sum(axis=axis)
    first = np.take(v, 0, axis=axis)
    last = np.take(v, -1, axis=axis)
    return h * (total - 0.5 * (first + last))


def _spacing(grid: np.ndarray) -> float:
    return float(grid[1] - grid[0])


def _check_uniform(grid: np.ndarray, name: str = "grid") -> None:
    if grid.ndim != 1 or grid.size < 3:
        raise InvalidInputError(f"{name} must be 1D with at least 3 points")
    d = np.diff(grid)
    if np.any(d <= 0) or np.ptp(d) > 1e-9 * d[0]:
        raise InvalidInputError(f"{name} must be uniform and increasing")


@dataclass(frozen=True, eq=False)
class GriddedDensity1D:
    """Probability density on a uniform grid, renormalized on construction.

    ``defect`` is the integral's distance from 1 before renormalization.
    """

    grid: np.ndarray
    density: np.ndarray
    defect: float = 0.0

    @classmethod
    def from_values(cls, grid, values, tol: float = np.inf) -> "GriddedDensity1D":
        grid = np.asarray(grid, float)
        _check_uniform(grid)
        rho = np.asarray(values, float).copy()
        if rho.shape != grid.shape:
            raise InvalidInputError("density and grid differ in length")
        rho[rho < CLAMP] = 0.0
        mass = float(_trapz_mass(rho, _spacing(grid)))
        if mass <= 0:
            raise GridCoverageError("density has no mass on the grid")
        defect = mass - 1.0
        if abs(defect) > tol:
            raise GridCoverageError(f"density integrates to {mass:.8f} on the grid")
        rho /= mass
        grid.setflags(write=False)
        rho.setflags(write=False)
        return cls(grid, rho, defect)

    @property
    def spacing(self) -> float:
        return _spacing(self.grid)

    def integral(self) -> float:
        return float(_trapz_mass(self.density, self.spacing))


@dataclass(frozen=True, eq=False)
class GriddedDensity2D:
    """Joint density P(r1, r2) with ``density[i, j]`` at (grid1[i], grid2[j])."""

    grid1: np.ndarray
    grid2: np.ndarray
    density: np.ndarray
    defect: float = 0.0

    @classmethod
    def from_values(cls, grid1, grid2, values, tol: float = COVERAGE_TOL) -> "GriddedDensity2D":
        g1 = np.asarray(grid1, float)
        g2 = np.asarray(grid2, float)
        _check_uniform(g1, "grid1")
        _check_uniform(g2, "grid2")
        rho = np.asarray(values, float).copy()
        if rho.shape != (g1.size, g2.size):
            raise InvalidInputError("density shape does not match the grids")
        rho[rho < CLAMP] = 0.0
        h1, h2 = _spacing(g1), _spacing(g2)
        mass = float(_trapz_mass(_trapz_mass(rho, h2, axis=1), h1))
        defect = mass - 1.0
        if abs(defect) > tol:
            raise GridCoverageError(
                f"joint density integrates to {mass:.8f}; the grid does not cover the state")
        rho /= mass
        for a in (g1, g2, rho):
            a.setflags(write=False)
        return cls(g1, g2, rho, defect)

    def transposed(self) -> "GriddedDensity2D":
        return GriddedDensity2D(self.grid2, self.grid1, self.density.T, self.defect)


@dataclass(frozen=True)
class MeasurementSettings:
    """Local angles, squeezing weights and the (R, S) pairing.

    ``sign=+1`` pairs R'_+ with S'_-, ``sign=-1`` pairs R'_- with S'_+.
    """

    theta1: float = 0.0
    theta2: float = 0.0
    a1: float = 1.0
    a2: float = 1.0
    sign: int = 1

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0):
            raise InvalidInputError("squeezing weights a1, a2 must be positive")
        if self.sign not in (1, -1):
            raise InvalidInputError("sign must be +1 or -1")

    def as_dict(self) -> dict:
        return {"theta1": self.theta1, "theta2": self.theta2, "a1": self.a1,
                "a2": self.a2, "sign": self.sign}


def default_span(n_max: int) -> float:
    """Half-width L of the symmetric grid for a Fock cutoff n_max."""
    return max(10.0, 4.0 * np.sqrt(2 * n_max + 1))


def make_grid(points: int, span: float) -> np.ndarray:
    if points < 3:
        raise InvalidInputError("a grid needs at least 3 points")
    return np.linspace(-span, span, int(points))


def state_span(state) -> float:
    if isinstance(state, FockState2):
        return default_span(max(state.cutoffs))
    if isinstance(state, AnalyticPureState):
        return float(state.span)
    if isinstance(state, Ensemble):
        return max(state_span(s) for s in state.states)
    raise InvalidInputError(f"unsupported state type {type(state).__name__}")


def reduce_angle(theta: float) -> tuple[float, bool]:
    """Split theta into a representative in [0, pi) and a reflection flag.

    The quadrature at theta + pi is the reflection of the one at theta.
    """
    k = np.floor(theta / np.pi + _ANGLE_EPS)
    base = theta - k * np.pi
    if base < 0 or base >= np.pi - _ANGLE_EPS:
        base = 0.0
    return float(base), bool(int(k) % 2)


class JointSampler:
    """Joint quadrature densities of one state on a fixed grid pair.

    Results are cached per angle pair modulo pi; angles shifted by pi reuse
    the cached array with the corresponding axis reflected.
    """

    def __init__(self, state, points: int = DEFAULT_POINTS, span: Optional[float] = None,
                 grids: Optional[tuple] = None):
        self.state = state
        if grids is None:
            span = state_span(state) if span is None else float(span)
            g = make_grid(points, span)
            grids = (g, g)
        self.grid1 = np.asarray(grids[0], float)
        self.grid2 = np.asarray(grids[1], float)
        _check_uniform(self.grid1, "grid1")
        _check_uniform(self.grid2, "grid2")
        self.points = self.grid1.size
        self._cache: dict = {}
        self._tables: dict = {}

    def _table(self, which: int, n_max: int):
        grid = self.grid1 if which == 1 else self.grid2
        key = (which, n_max)
        t = self._tables.get(key)
        if t is None or t.n_max < n_max:
            t = hermite_basis(n_max, grid)
            self._tables[key] = t
        return t

    def _pure_density(self, state, theta1: float, theta2: float) -> np.ndarray:
        if isinstance(state, FockState2):
            rot = rotate_modes(state, theta1, theta2)
            n1, n2 = state.cutoffs
            psi = position_wavefunction(rot, self._table(1, n1), self._table(2, n2), check=False)
            return psi.real ** 2 + psi.imag ** 2
        if isinstance(state, AnalyticPureState):
            if abs(theta1 - theta2) > _ANGLE_EPS or not any(
                    abs(theta1 - a) < 1e-9 for a in state.supported_angles):
                raise UnsupportedAngleError(
                    f"closed-form state supports equal angles in "
                    f"{sorted(state.supported_angles)}, got ({theta1}, {theta2})")
            x1, x2 = np.meshgrid(self.grid1, self.grid2, indexing="ij")
            field = (state.position_wavefunction if theta1 < 1e-9
                     else state.momentum_wavefunction)(x1, x2)
            return np.abs(field) ** 2
        raise InvalidInputError(f"unsupported state type {type(state).__name__}")

    def _base(self, theta1: float, theta2: float) -> GriddedDensity2D:
        key = (round(theta1, 12), round(theta2, 12))
        joint = self._cache.get(key)
        if joint is None:
            if isinstance(self.state, Ensemble):
                rho = sum(w * self._pure_density(s, theta1, theta2)
                          for w, s in self.state.members)
            else:
                rho = self._pure_density(self.state, theta1, theta2)
            joint = GriddedDensity2D.from_values(self.grid1, self.grid2, rho)
            self._cache[key] = joint
        return joint

    def joint(self, theta1: float, theta2: float) -> GriddedDensity2D:
        b1, f1 = reduce_angle(theta1)
        b2, f2 = reduce_angle(theta2)
        joint = self._base(b1, b2)
        if not (f1 or f2):
            return joint
        rho = joint.density
        if f1:
            rho = rho[::-1, :]
        if f2:
            rho = rho[:, ::-1]
        # reflection about 0 maps the symmetric grid onto itself
        return GriddedDensity2D(joint.grid1, joint.grid2, rho, joint.defect)


def joint_density(state, theta1: float = 0.0, theta2: float = 0.0,
                  grids: Optional[tuple] = None, points: int = DEFAULT_POINTS,
                  span: Optional[float] = None) -> GriddedDensity2D:
    """Joint distribution of the local quadratures at (theta1, theta2).

    Ensembles give the weighted sum of member densities.  Raises
    GridCoverageError when more than 1e-4 of the probability falls off the grid.
    """
    return JointSampler(state, points=points, span=span, grids=grids).joint(theta1, theta2)


def mode_marginals(joint: GriddedDensity2D) -> tuple[GriddedDensity1D, GriddedDensity1D]:
    h1, h2 = _spacing(joint.grid1), _spacing(joint.grid2)
    r1 = _trapz_mass(joint.density, h2, axis=1)
    r2 = _trapz_mass(joint.density, h1, axis=0)
    return (GriddedDensity1D.from_values(joint.grid1, r1),
            GriddedDensity1D.from_values(joint.grid2, r2))


def _combo_grid(joint: GriddedDensity2D, a1: float, a2: float) -> tuple[np.ndarray, float]:
    h1, h2 = _spacing(joint.grid1), _spacing(joint.grid2)
    hu = min(a1 * h1, a2 * h2)
    half = a1 * max(abs(joint.grid1[0]), joint.grid1[-1]) + a2 * max(abs(joint.grid2[0]), joint.grid2[-1])
    n = int(np.ceil(2 * half / hu - 1e-9)) + 1
    return -half + hu * np.arange(n), hu


def _aligned(joint: GriddedDensity2D, a1: float, a2: float) -> bool:
    h1, h2 = _spacing(joint.grid1), _spacing(joint.grid2)
    symmetric = all(abs(g[0] + g[-1]) <= 1e-12 * abs(g[0]) for g in (joint.grid1, joint.grid2))
    return (symmetric and abs(a1 * h1 - a2 * h2) <= 1e-12 * a1 * h1
            and joint.grid1.size == joint.grid2.size)


def combo_marginal(joint: GriddedDensity2D, a1: float = 1.0, a2: float = 1.0,
                   sign: int = 1) -> GriddedDensity1D:
    """Density of u = a1 r1 + sign * a2 r2.

    Each joint node carries mass P_ij h1 h2 to u_ij = a1 r1_i + sign a2 r2_j.
    When a1 h1 == a2 h2 every u_ij is a node of the u grid and the marginal
    is a plain diagonal sum.  Otherwise each mass is spread over the four
    nearest u nodes with cubic Lagrange weights, which reproduce polynomials
    up to degree 3: the first three moments are kept exactly and the
    density error is O(h^4).
    """
    if not (a1 > 0 and a2 > 0):
        raise InvalidInputError("a1 and a2 must be positive")
    if sign not in (1, -1):
        raise InvalidInputError("sign must be +1 or -1")
    u, hu = _combo_grid(joint, a1, a2)
    P = joint.density
    g1, g2 = joint.grid1, joint.grid2
    h1, h2 = _spacing(g1), _spacing(g2)

    if _aligned(joint, a1, a2):
        n = g1.size
        # line integral over r1 on nodes: dr1 = h1, Jacobian 1/a2
        vals = np.bincount(_diagonal_index(n, sign), weights=P.ravel(),
                           minlength=2 * n - 1) * h1 / a2
        if vals.size != u.size:
            raise RuntimeError("aligned combo grid size mismatch")
    else:
        vals = _deposit(P.ravel() * (h1 * h2),
                        (a1 * g1[:, None] + sign * a2 * g2[None, :]).ravel(), u[0], hu, u.size) / hu

    out = GriddedDensity1D.from_values(u, np.maximum(vals, 0.0))
    if abs(out.defect) > COMBO_COVERAGE_TOL:
        raise GridCoverageError(
            f"combination marginal lost {out.defect:+.2e} of its mass; widen the joint grid")
    return out


@lru_cache(maxsize=16)
def _diagonal_index(n: int, sign: int) -> np.ndarray:
    i = np.arange(n)
    idx = i[:, None] + i[None, :] if sign == 1 else i[:, None] - i[None, :] + (n - 1)
    idx = idx.ravel()
    idx.setflags(write=False)
    return idx


def _deposit(mass: np.ndarray, pos: np.ndarray, start: float, h: float, n: int) -> np.ndarray:
    """Spread point masses onto a uniform grid with four-point cubic weights.

    Masses whose stencil reaches past the grid lose that share; positions
    themselves must lie within one step of the grid.
    """
    f = (pos - start) / h
    j0 = np.floor(f)
    t = f - j0
    tm1, tp1, tm2 = t - 1, t + 1, t - 2
    # shift by one so the stencil of a node at either end stays non-negative
    j = j0.astype(np.int64) + 1
    out = np.zeros(n + 3)
    for offset, w in enumerate((-t * tm1 * tm2 / 6, tp1 * tm1 * tm2 / 2,
                                -tp1 * t * tm2 / 2, tp1 * t * tm1 / 6)):
        idx = np.clip(j + offset - 1, 0, n + 2)
        out += np.bincount(idx, weights=w * mass, minlength=n + 3)
    return out[1:n + 1]
