"""Constructors for the states analyzed by the toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import CapacityError, InvalidInputError
from .fock import (DEFAULT_TAIL_TOL, MAX_CUTOFF, FockState2, coherent_coefficients,
                   product_state)


@dataclass(frozen=True, eq=False)
class AnalyticPureState:
    """Pure two-mode state known through closed-form wavefunctions.

    ``position_wavefunction(r1, r2)`` and ``momentum_wavefunction(s1, s2)``
    broadcast over numpy arrays.  Only the quadrature angles in
    ``supported_angles`` (applied to both modes alike) can be sampled.
    """

    position_wavefunction: Callable[[np.ndarray, np.ndarray], np.ndarray]
    momentum_wavefunction: Callable[[np.ndarray, np.ndarray], np.ndarray]
    supported_angles: frozenset = frozenset({0.0, np.pi / 2})
    span: float = 10.0
    params: dict = field(default_factory=dict)


State = Union[FockState2, AnalyticPureState, "Ensemble"]


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Convex mixture sum_k w_k |psi_k><psi_k| of pure states."""

    members: tuple

    def __post_init__(self):
        members = tuple((float(w), s) for w, s in self.members)
        if not members:
            raise InvalidInputError("an ensemble needs at least one member")
        weights = np.array([w for w, _ in members])
        if np.any(weights < 0):
            raise InvalidInputError("ensemble weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidInputError(f"ensemble weights sum to {weights.sum()!r}, expected 1")
        for _, s in members:
            if not isinstance(s, (FockState2, AnalyticPureState)):
                raise InvalidInputError(f"ensemble members must be pure states, got {type(s)}")
        object.__setattr__(self, "members", members)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.members])

    @property
    def states(self) -> list:
        return [s for _, s in self.members]

    def density_matrix(self) -> np.ndarray:
        """Dense density matrix over the flattened |n, m> basis (Fock members only)."""
        dims = [s.dims for s in self.states]
        shape = (max(d[0] for d in dims), max(d[1] for d in dims))
        rho = np.zeros((shape[0] * shape[1],) * 2, complex)
        for w, s in self.members:
            c = np.zeros(shape, complex)
            c[: s.dims[0], : s.dims[1]] = s.coeffs
            v = c.ravel()
            rho += w * np.outer(v, v.conj())
        return rho


def eta_state(sigma_plus: float, sigma_minus: float) -> AnalyticPureState:
    """Non-Gaussian state whose amplitude is odd in r1 + r2 and Gaussian in r1 - r2.

    eta(r1, r2) = (r1 + r2) exp(-(r1+r2)^2 / 4 sp^2 - (r1-r2)^2 / 4 sm^2) / sqrt(pi sm sp^3)

    Its Fourier transform is again polynomial times Gaussian:
    eta~(s1, s2) = -i (s1 + s2) sp^{3/2} sm^{1/2} / sqrt(pi)
                   * exp(-sp^2 (s1+s2)^2 / 4 - sm^2 (s1-s2)^2 / 4).
    """
    sp, sm = float(sigma_plus), float(sigma_minus)
    if not (sp > 0 and sm > 0):
        raise InvalidInputError(f"widths must be positive, got sigma_plus={sp}, sigma_minus={sm}")
    norm_x = 1.0 / np.sqrt(np.pi * sm * sp ** 3)
    norm_p = sp ** 1.5 * sm ** 0.5 / np.sqrt(np.pi)

    def position(r1, r2):
        u = np.asarray(r1) + np.asarray(r2)
        v = np.asarray(r1) - np.asarray(r2)
        return (norm_x * u * np.exp(-u * u / (4 * sp * sp) - v * v / (4 * sm * sm))).astype(complex)

    def momentum(s1, s2):
        u = np.asarray(s1) + np.asarray(s2)
        v = np.asarray(s1) - np.asarray(s2)
        return -1j * norm_p * u * np.exp(-sp * sp * u * u / 4 - sm * sm * v * v / 4)

    # position marginals reach ~ sqrt(3) max(sp, sm); momenta ~ sqrt(3) / min(sp, sm)
    reach = np.sqrt(3.0) * max(sp, sm, 1.0 / sp, 1.0 / sm)
    return AnalyticPureState(position, momentum, span=max(10.0, 7.0 * reach),
                             params={"sigma_plus": sp, "sigma_minus": sm})


def vacuum() -> FockState2:
    return FockState2(np.ones((1, 1), complex))


def coherent_product(alpha1: complex, alpha2: complex,
                     tail_tol: float = DEFAULT_TAIL_TOL) -> FockState2:
    return product_state(coherent_coefficients(alpha1, tail_tol),
                         coherent_coefficients(alpha2, tail_tol))


def noon_state(N: int) -> FockState2:
    """(|N, 0> + |0, N>) / sqrt(2)."""
    if N < 1:
        raise InvalidInputError(f"N must be >= 1, got {N}")
    if N > MAX_CUTOFF:
        raise CapacityError(f"N={N} exceeds the cutoff cap {MAX_CUTOFF}")
    c = np.zeros((N + 1, N + 1), complex)
    c[N, 0] = c[0, N] = 1 / np.sqrt(2)
    return FockState2(c)


def phi_state() -> FockState2:
    """|0,0>/sqrt(2) + |2,0>/2 + |0,2>/2, invisible to second-moment tests."""
    c = np.zeros((3, 3), complex)
    c[0, 0] = 1 / np.sqrt(2)
    c[2, 0] = c[0, 2] = 0.5
    return FockState2(c)


def cat_ensemble(alpha: float, p: float, tail_tol: float = DEFAULT_TAIL_TOL,
                 parity: int = 1) -> Ensemble:
    """Dephased two-mode cat state as a mixture of its two eigenvectors.

    The operator |a><a| + |b><b| + parity (1 - p)(|a><b| + |b><a|), with
    a = |alpha, alpha> and b = |-alpha, -alpha>, is diagonal in the even/odd
    cat basis (|a> +- |b>).  With k = exp(-4 alpha^2) the unnormalized
    weights are (1 + k)(1 + parity q) and (1 - k)(1 - parity q), q = 1 - p.
    ``parity=+1`` makes p = 0 the even cat, which tends to the vacuum as
    alpha -> 0; ``parity=-1`` makes it the odd cat.  alpha = 0 is returned as
    the vacuum.
    """
    alpha = float(alpha)
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"p must lie in [0, 1], got {p}")
    if alpha < 0:
        raise InvalidInputError(f"alpha must be >= 0, got {alpha}")
    if parity not in (1, -1):
        raise InvalidInputError(f"parity must be +1 or -1, got {parity}")
    if alpha == 0.0:
        return Ensemble(((1.0, vacuum()),))

    kappa = np.exp(-4 * alpha * alpha)
    q = 1.0 - p
    w_even = (1 + kappa) * (1 + parity * q)
    w_odd = (1 - kappa) * (1 - parity * q)
    total = w_even + w_odd

    c = coherent_coefficients(alpha, tail_tol).coeffs
    cm = coherent_coefficients(-alpha, tail_tol).coeffs
    a = np.outer(c, c)
    b = np.outer(cm, cm)
    members = [(w / total, FockState2.normalized(coeffs))
               for w, coeffs in ((w_even, a + b), (w_odd, a - b)) if w > 0.0]
    # renormalize against rounding in w / total
    s = sum(w for w, _ in members)
    return Ensemble(tuple((w / s, st) for w, st in members))


def two_mode_squeezed(r: float, tail_tol: float = DEFAULT_TAIL_TOL,
                      max_cutoff: int = MAX_CUTOFF) -> FockState2:
    """Two-mode squeezed vacuum sum_n tanh(r)^n / cosh(r) |n, n>.

    Positions correlate and momenta anticorrelate: Var(x1 - x2) = Var(p1 + p2) = exp(-2r).
    """
    if r < 0:
        raise InvalidInputError(f"r must be >= 0, got {r}")
    t = np.tanh(r)
    if t == 0.0:
        return vacuum()
    # discarded probability beyond cutoff N is t^(2(N+1))
    cutoff = max(0, int(np.ceil(np.log(tail_tol) / (2 * np.log(t)))) - 1)
    while t ** (2 * (cutoff + 1)) >= tail_tol:
        cutoff += 1
    if cutoff > max_cutoff:
        raise CapacityError(f"squeezing r={r} needs a cutoff above {max_cutoff}")
    n = np.arange(cutoff + 1)
    return FockState2.normalized(np.diag(t ** n / np.cosh(r)).astype(complex))
