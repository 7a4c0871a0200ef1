"""Truncated Fock-basis representation of one- and two-mode pure states.

Units are hbar = 1 with [x, p] = i, so the vacuum quadrature variance is 1/2.
A phase rotation ``c_n -> c_n exp(-i n theta)`` turns the position
representation into the distribution of ``cos(theta) x + sin(theta) p``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import CapacityError, GridCoverageError, InvalidInputError

NORM_TOL = 1e-10
DEFAULT_TAIL_TOL = 1e-10
MAX_CUTOFF = 512


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HermiteTable:
    """Harmonic-oscillator eigenfunctions phi_n(x) sampled on a grid.

    ``values[n]`` holds phi_n on ``grid``.
    """

    grid: np.ndarray
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return self.values.shape[0] - 1


def hermite_basis(n_max: int, grid) -> HermiteTable:
    """Evaluate phi_0 .. phi_{n_max} with the normalized three-term recurrence.

    The recurrence never forms Hermite polynomials or factorials, so it stays
    stable for cutoffs in the hundreds.
    """
    if n_max < 0:
        raise InvalidInputError(f"n_max must be >= 0, got {n_max}")
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InvalidInputError("grid must be a 1D array with at least two points")
    if np.any(np.diff(x) <= 0):
        raise InvalidInputError("grid must be strictly increasing")
    if not np.allclose(x, -x[::-1], rtol=0, atol=1e-12 * max(1.0, abs(x[-1]))):
        raise InvalidInputError("grid must be symmetric about 0")

    values = np.empty((n_max + 1, x.size))
    values[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        values[1] = np.sqrt(2.0) * x * values[0]
    for n in range(1, n_max):
        values[n + 1] = (np.sqrt(2.0 / (n + 1)) * x * values[n]
                         - np.sqrt(n / (n + 1)) * values[n - 1])
    return HermiteTable(grid=_frozen(x), values=_frozen(values))


@dataclass(frozen=True, eq=False)
class ModeCoefficients:
    """Single-mode Fock amplitudes c_0 .. c_cutoff."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(np.asarray(self.coeffs, dtype=complex)))

    @property
    def cutoff(self) -> int:
        return self.coeffs.size - 1


def _poisson_cutoff(mean: float, tail_tol: float, max_cutoff: int) -> int:
    if mean == 0.0:
        return 0
    n = int(np.floor(mean))
    while stats.poisson.sf(n, mean) >= tail_tol:
        n += 1
        if n > max_cutoff:
            raise CapacityError(
                f"coherent amplitude |alpha|^2={mean:g} needs a cutoff above {max_cutoff}")
    # walk back down in case floor(mean) already overshot
    while n > 0 and stats.poisson.sf(n - 1, mean) < tail_tol:
        n -= 1
    return n


def coherent_coefficients(alpha: complex, tail_tol: float = DEFAULT_TAIL_TOL,
                          max_cutoff: int = MAX_CUTOFF) -> ModeCoefficients:
    """Fock amplitudes of the coherent state |alpha>, truncated and renormalized.

    The cutoff is the smallest N whose discarded Poisson tail is below ``tail_tol``.
    """
    if not 0 < tail_tol <= 1e-4:
        raise InvalidInputError(f"tail_tol must lie in (0, 1e-4], got {tail_tol}")
    alpha = complex(alpha)
    cutoff = _poisson_cutoff(abs(alpha) ** 2, tail_tol, max_cutoff)
    n = np.arange(cutoff + 1)
    if alpha == 0:
        return ModeCoefficients(np.array([1.0 + 0j]))
    # log-space magnitudes avoid overflow in alpha**n / sqrt(n!)
    mag = n * np.log(abs(alpha)) - 0.5 * np.cumsum(np.log(np.maximum(n, 1)))
    c = np.exp(mag - 0.5 * abs(alpha) ** 2) * np.exp(1j * n * np.angle(alpha))
    return ModeCoefficients(c / np.linalg.norm(c))


@dataclass(frozen=True, eq=False)
class FockState2:
    """Two-mode pure state sum_nm C_nm |n, m> with a finite cutoff per mode.

    Construction checks that the coefficients are normalized; use
    :meth:`normalized` to build from unnormalized amplitudes.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
            raise InvalidInputError(f"coefficient matrix must be 2D and non-empty, got {c.shape}")
        norm = float(np.sum(np.abs(c) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidInputError(f"state norm is {norm!r}, expected 1")
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def normalized(cls, coeffs) -> "FockState2":
        c = np.asarray(coeffs, dtype=complex)
        norm = np.linalg.norm(c)
        if norm == 0:
            raise InvalidInputError("cannot normalize the zero vector")
        return cls(c / norm)

    @property
    def dims(self) -> tuple[int, int]:
        return self.coeffs.shape

    @property
    def cutoffs(self) -> tuple[int, int]:
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    def norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def photon_populations(self) -> tuple[np.ndarray, np.ndarray]:
        """Reduced photon-number distributions of mode 1 and mode 2."""
        p = np.abs(self.coeffs) ** 2
        return p.sum(axis=1), p.sum(axis=0)

    def schmidt_coefficients(self) -> np.ndarray:
        return np.linalg.svd(self.coeffs, compute_uv=False) ** 2

    def entanglement_entropy(self) -> float:
        lam = self.schmidt_coefficients()
        lam = lam[lam > 1e-300]
        return float(-np.sum(lam * np.log(lam)))

    def inner(self, other: "FockState2") -> complex:
        """<self|other>, zero-padding to a common cutoff."""
        shape = tuple(max(a, b) for a, b in zip(self.dims, other.dims))
        a = np.zeros(shape, complex)
        b = np.zeros(shape, complex)
        a[: self.dims[0], : self.dims[1]] = self.coeffs
        b[: other.dims[0], : other.dims[1]] = other.coeffs
        return complex(np.vdot(a, b))


def product_state(mode1, mode2) -> FockState2:
    c1 = mode1.coeffs if isinstance(mode1, ModeCoefficients) else np.asarray(mode1, complex)
    c2 = mode2.coeffs if isinstance(mode2, ModeCoefficients) else np.asarray(mode2, complex)
    return FockState2.normalized(np.outer(c1, c2))


def rotate_modes(state: FockState2, theta1: float, theta2: float) -> FockState2:
    """Apply local phase rotations; the result's position wavefunction is the
    quadrature-(theta1, theta2) wavefunction of ``state``."""
    n1, n2 = state.dims
    ph1 = np.exp(-1j * theta1 * np.arange(n1))
    ph2 = np.exp(-1j * theta2 * np.arange(n2))
    c = state.coeffs * ph1[:, None] * ph2[None, :]
    return FockState2(c)


def position_wavefunction(state: FockState2, table1: HermiteTable,
                          table2: HermiteTable, check: bool = True) -> np.ndarray:
    """Psi(r1, r2) = sum_nm C_nm phi_n(r1) phi_m(r2) on the product grid."""
    n1, n2 = state.dims
    if table1.n_max < n1 - 1 or table2.n_max < n2 - 1:
        raise InvalidInputError("Hermite tables do not reach the state's cutoffs")
    phi1 = table1.values[:n1]
    phi2 = table2.values[:n2]
    c = state.coeffs
    psi = phi1.T @ c.real @ phi2 + 1j * (phi1.T @ c.imag @ phi2)
    if check:
        h1 = table1.grid[1] - table1.grid[0]
        h2 = table2.grid[1] - table2.grid[0]
        mass = float(np.sum(psi.real ** 2 + psi.imag ** 2) * h1 * h2)
        if abs(mass - 1.0) > 1e-6:
            raise GridCoverageError(f"wavefunction norm on grid is {mass:.9f}; widen the grid")
    return psi


def random_haar_state(D: int, seed: int, index: int = 0) -> FockState2:
    """Haar-uniform pure state on span{|n, m> : n, m <= D}.

    Each ``(seed, D, index)`` triple owns an independent generator substream,
    so a batch gives the same states whatever order they are drawn in.
    """
    if D < 1:
        raise InvalidInputError(f"D must be >= 1, got {D}")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(D, index)))
    z = rng.standard_normal((D + 1, D + 1)) + 1j * rng.standard_normal((D + 1, D + 1))
    return FockState2.normalized(z)


def random_haar_mode(D: int, seed: int, index: int = 0) -> ModeCoefficients:
    """Haar-uniform single-mode state with cutoff D."""
    if D < 0:
        raise InvalidInputError(f"D must be >= 0, got {D}")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(D, index)))
    z = rng.standard_normal(D + 1) + 1j * rng.standard_normal(D + 1)
    return ModeCoefficients(z / np.linalg.norm(z))


def conjugate_mode(state: FockState2, mode: int) -> FockState2:
    """Complex-conjugate the amplitudes of one mode.

    For product states only the chosen factor is conjugated, with the other
    factor's global phase fixed so the result is well defined.  Entangled
    states have no factor to conjugate; their whole coefficient matrix is
    conjugated instead.
    """
    if mode not in (1, 2):
        raise InvalidInputError(f"mode must be 1 or 2, got {mode}")
    c = state.coeffs
    u, s, vh = np.linalg.svd(c)
    if s.size > 1 and s[1] > 1e-12 * s[0]:
        return FockState2(np.conj(c))
    f1 = u[:, 0] * s[0]
    f2 = vh[0]
    if mode == 1:
        k = np.argmax(np.abs(f2))
        ph = f2[k] / abs(f2[k])
        f1, f2 = np.conj(f1 * ph), f2 / ph
    else:
        k = np.argmax(np.abs(f1))
        ph = f1[k] / abs(f1[k])
        f1, f2 = f1 / ph, np.conj(f2 * ph)
    out = np.outer(f1, f2)
    return FockState2(out / np.linalg.norm(out))
