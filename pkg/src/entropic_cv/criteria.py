"""Separability tests and the scan over measurement settings.

Every test returns a :class:`CriterionReport`.  A report only claims a
violation when its margin clears a 1e-6 dead-band *and* the quantities
behind it have been re-evaluated on a doubled grid with a change below
1e-4, so an "entangled" verdict never rests on an unrefined grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from .distributions import (DEFAULT_POINTS, JointSampler, MeasurementSettings, combo_marginal,
                            mode_marginals, reduce_angle)
from .entropy import CONVERGENCE_TOL, differential_entropy, variance
from .errors import (ConvergenceError, EntropicCVError, NumericalConsistencyError,
                     UnsupportedStateError)
from .fock import FockState2
from .states import AnalyticPureState, Ensemble

LN_2PIE = math.log(2 * math.pi * math.e)
LN_PIE = math.log(math.pi * math.e)
DEAD_BAND = 1e-6
MAX_JOINT_POINTS = 4096
CRITERIA = ("strong", "weak", "mgvt", "simon")


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of one separability test at one measurement setting.

    ``margin`` is positive when the separable bound is broken: rhs - lhs for
    the entropic tests, 1 - sigma*delta for MGVT and 1/2 - nu for Simon.
    """

    criterion: str
    settings: Optional[MeasurementSettings]
    lhs: float
    rhs: float
    margin: float
    violated: bool
    entropies: dict = field(default_factory=dict)
    variances: dict = field(default_factory=dict)
    refinement_delta: Optional[float] = None
    grid_points: int = 0

    def as_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "settings": None if self.settings is None else self.settings.as_dict(),
            "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
            "violated": self.violated,
            "entropies": dict(self.entropies), "variances": dict(self.variances),
            "refinement_delta": self.refinement_delta, "grid_points": self.grid_points,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CriterionReport":
        settings = None if d["settings"] is None else MeasurementSettings(**d["settings"])
        return cls(d["criterion"], settings, d["lhs"], d["rhs"], d["margin"], d["violated"],
                   dict(d["entropies"]), dict(d["variances"]), d["refinement_delta"],
                   d["grid_points"])


@dataclass
class ScanResult:
    best: dict
    grid: list
    errors: list = field(default_factory=list)

    def violated(self, criterion: str) -> bool:
        return any(r.violated for r in self.grid if r.criterion == criterion)

    def reports(self, criterion: str) -> list:
        return [r for r in self.grid if r.criterion == criterion]


def _is_pure(state) -> bool:
    if isinstance(state, (FockState2, AnalyticPureState)):
        return True
    return isinstance(state, Ensemble) and len(state.members) == 1


class _Evaluator:
    """Entropies and variances of one state at one grid resolution, cached."""

    def __init__(self, state, points: int, span: Optional[float]):
        self.sampler = JointSampler(state, points=points, span=span)
        self.points = points
        self._modes: dict = {}
        self._combos: dict = {}

    def _mode_pair(self, theta1: float, theta2: float) -> dict:
        """Entropies and variances of the single-mode marginals of one joint.

        Reflections leave both unchanged, so angles are reduced modulo pi.
        """
        key = (reduce_angle(theta1)[0], reduce_angle(theta2)[0])
        out = self._modes.get(key)
        if out is None:
            out = {}
            for j, d in enumerate(mode_marginals(self.sampler.joint(*key)), start=1):
                out[j] = (differential_entropy(d).value, variance(d))
            self._modes[key] = out
        return out

    def mode_stats(self, theta1: float, theta2: float) -> dict:
        r = self._mode_pair(theta1, theta2)
        s = self._mode_pair(theta1 + np.pi / 2, theta2 + np.pi / 2)
        return {"H_R1": r[1][0], "H_R2": r[2][0], "H_S1": s[1][0], "H_S2": s[2][0],
                "var_R1": r[1][1], "var_R2": r[2][1], "var_S1": s[1][1], "var_S2": s[2][1]}

    def combo_stats(self, theta1, theta2, a1, a2, sign, quadrature: str) -> tuple[float, float]:
        """Entropy and variance of a1 q1 + sign a2 q2 (S uses weights 1/a1, 1/a2)."""
        if quadrature == "S":
            theta1, theta2, a1, a2 = theta1 + np.pi / 2, theta2 + np.pi / 2, 1.0 / a1, 1.0 / a2
        b1, f1 = reduce_angle(theta1)
        b2, f2 = reduce_angle(theta2)
        # reflecting one mode turns the combination into the reflected opposite-sign one
        if f1 != f2:
            sign = -sign
        key = (b1, b2, a1, a2, sign)
        out = self._combos.get(key)
        if out is None:
            d = combo_marginal(self.sampler.joint(b1, b2), a1, a2, sign)
            out = (differential_entropy(d).value, variance(d))
            self._combos[key] = out
        return out

    def pair(self, s: MeasurementSettings) -> dict:
        """Entropies and variances of R'_sign and S'_-sign plus the single modes."""
        h_r, v_r = self.combo_stats(s.theta1, s.theta2, s.a1, s.a2, s.sign, "R")
        h_s, v_s = self.combo_stats(s.theta1, s.theta2, s.a1, s.a2, -s.sign, "S")
        stats = dict(self.mode_stats(s.theta1, s.theta2))
        stats.update(H_R=h_r, H_S=h_s, var_R=v_r, var_S=v_s)
        return stats


class _Workspace:
    """Evaluators for one state at successive grid doublings."""

    def __init__(self, state, points: Optional[int] = None, span: Optional[float] = None):
        self.state = state
        self.points = DEFAULT_POINTS if points is None else int(points)
        self.span = span
        self._evaluators: dict = {}

    def at(self, points: int) -> _Evaluator:
        ev = self._evaluators.get(points)
        if ev is None:
            ev = _Evaluator(self.state, points, self.span)
            self._evaluators[points] = ev
        return ev

    @property
    def base(self) -> _Evaluator:
        return self.at(self.points)


def _entropic_values(criterion: str, st: dict, s: MeasurementSettings) -> tuple[float, float]:
    lhs = st["H_R"] + st["H_S"]
    if criterion == "weak":
        return lhs, LN_2PIE
    a = (s.a1, s.a2)
    hr = (st["H_R1"], st["H_R2"])
    hs = (st["H_S1"], st["H_S2"])
    terms = [2 * hr[i] + 2 * hs[j] + 2 * math.log(a[i] / a[j]) for i in range(2) for j in range(2)]
    top = max(terms)
    return lhs, 0.5 * (top + math.log(sum(math.exp(t - top) for t in terms)))


def _raw_report(criterion: str, ev: _Evaluator, s: MeasurementSettings) -> CriterionReport:
    st = ev.pair(s)
    entropies = {k[2:]: v for k, v in st.items() if k.startswith("H_")}
    variances = {"R": st["var_R"], "S": st["var_S"]}
    if criterion in ("weak", "strong"):
        lhs, rhs = _entropic_values(criterion, st, s)
        margin = rhs - lhs
    elif criterion == "mgvt":
        lhs = math.sqrt(st["var_R"] * st["var_S"])
        rhs = 1.0
        margin = 1.0 - lhs
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    return CriterionReport(criterion, s, lhs, rhs, margin, False, entropies, variances,
                           None, ev.points)


def _delta(criterion: str, coarse: CriterionReport, fine: CriterionReport) -> float:
    if criterion == "mgvt":
        return abs(fine.lhs - coarse.lhs)
    keys = ("R", "S") if criterion == "weak" else ("R", "S", "R1", "R2", "S1", "S2")
    return max(abs(fine.entropies[k] - coarse.entropies[k]) for k in keys)


def _certify(criterion: str, ws: _Workspace, report: CriterionReport,
             tol: float = CONVERGENCE_TOL) -> CriterionReport:
    """Re-evaluate on doubled grids until the report's inputs settle."""
    coarse = report
    points = report.grid_points
    while points * 2 <= MAX_JOINT_POINTS:
        points *= 2
        fine = _raw_report(criterion, ws.at(points), report.settings)
        delta = _delta(criterion, coarse, fine)
        if delta < tol:
            return replace(fine, refinement_delta=delta, violated=fine.margin > DEAD_BAND)
        coarse = fine
    raise ConvergenceError(
        f"{criterion} test did not converge by {points} grid points", estimates=(coarse,))


def _run(criterion: str, state, settings: MeasurementSettings, points, span, refine,
         ws: Optional[_Workspace] = None) -> CriterionReport:
    ws = ws or _Workspace(state, points, span)
    report = _raw_report(criterion, ws.base, settings)
    if refine and report.margin > DEAD_BAND:
        report = _certify(criterion, ws, report)
    return report


def weak_entropic_test(state, settings: MeasurementSettings = MeasurementSettings(),
                       points: Optional[int] = None, span: Optional[float] = None,
                       refine: bool = True) -> CriterionReport:
    """H[R'_+-] + H[S'_-+] >= ln(2 pi e), valid for pure and mixed separable states."""
    return _run("weak", state, settings, points, span, refine)


def strong_entropic_test(state, settings: MeasurementSettings = MeasurementSettings(),
                         points: Optional[int] = None, span: Optional[float] = None,
                         refine: bool = True) -> CriterionReport:
    """Pure-state bound built from the single-mode entropies at the same angles."""
    if not _is_pure(state):
        raise UnsupportedStateError("the strong entropic bound only holds for pure states")
    return _run("strong", state, settings, points, span, refine)


def mgvt_test(state, settings: MeasurementSettings = MeasurementSettings(),
              points: Optional[int] = None, span: Optional[float] = None,
              refine: bool = True) -> CriterionReport:
    """Variance product sigma(R'_+-) * sigma(S'_-+) >= 1."""
    return _run("mgvt", state, settings, points, span, refine)


def sandwich_check(report: CriterionReport, tol: float = 1e-4) -> bool:
    """Maximum-entropy cross-check: ln(2 pi e sigma delta) >= H[R'] + H[S']."""
    v_r, v_s = report.variances["R"], report.variances["S"]
    upper = math.log(2 * math.pi * math.e * math.sqrt(v_r * v_s))
    return upper >= report.entropies["R"] + report.entropies["S"] - tol


def uncertainty_check(report: CriterionReport, tol: float = 1e-4) -> bool:
    """Single-mode entropic uncertainty H[R_j] + H[S_j] >= ln(pi e) for both modes."""
    e = report.entropies
    return all(e[f"R{j}"] + e[f"S{j}"] >= LN_PIE - tol for j in (1, 2))


# -- Simon PPT ---------------------------------------------------------------

_OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a 4x4 covariance matrix ordered (x1, p1, x2, p2)."""
    ev = np.abs(np.linalg.eigvals(1j * _OMEGA @ cov))
    return np.sort(ev)[::2]


def partial_transpose_cov(cov: np.ndarray) -> np.ndarray:
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return flip @ cov @ flip


def simon_invariant(cov: np.ndarray) -> float:
    """det A det B + (1/4 - |det C|)^2 - tr(AJCJBJC^TJ) - (det A + det B)/4.

    Negative values signal a non-PPT covariance matrix.
    """
    a, b, c = cov[:2, :2], cov[2:, 2:], cov[:2, 2:]
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    da, db, dc = np.linalg.det(a), np.linalg.det(b), np.linalg.det(c)
    return float(da * db + (0.25 - abs(dc)) ** 2 - np.trace(a @ j @ c @ j @ b @ j @ c.T @ j)
                 - 0.25 * (da + db))


def _current_covariances(sampler: JointSampler) -> np.ndarray:
    """x_i-p_j block from the probability current Im(Psi* dPsi/dx_j).

    Used for closed-form states, whose fields are only available at angles 0 and pi/2.
    """
    state = sampler.state
    g1, g2 = sampler.grid1, sampler.grid2
    h1, h2 = g1[1] - g1[0], g2[1] - g2[0]
    x1, x2 = np.meshgrid(g1, g2, indexing="ij")
    members = state.members if isinstance(state, Ensemble) else ((1.0, state),)
    second = np.zeros((2, 2))
    mx = np.zeros(2)
    mp = np.zeros(2)
    for w, s in members:
        psi = s.position_wavefunction(x1, x2)
        rho = np.abs(psi) ** 2
        mass = rho.sum() * h1 * h2
        d1 = np.gradient(psi, h1, axis=0)
        d2 = np.gradient(psi, h2, axis=1)
        j = [np.imag(np.conj(psi) * d) / mass for d in (d1, d2)]
        xs = (x1, x2)
        for a in range(2):
            mx[a] += w * np.sum(xs[a] * rho) * h1 * h2 / mass
            mp[a] += w * np.sum(j[a]) * h1 * h2
            for b in range(2):
                second[a, b] += w * np.sum(xs[a] * j[b]) * h1 * h2
    return second - np.outer(mx, mp)


def _covariance(ev: _Evaluator) -> np.ndarray:
    state = ev.sampler.state
    cov = np.zeros((4, 4))
    x = {1: 0, 2: 2}
    p = {1: 1, 2: 3}
    m00 = ev.mode_stats(0.0, 0.0)
    cov[0, 0], cov[2, 2] = m00["var_R1"], m00["var_R2"]
    cov[1, 1], cov[3, 3] = m00["var_S1"], m00["var_S2"]
    idx = {0.0: x, np.pi / 2: p}
    analytic = isinstance(state, AnalyticPureState) or (
        isinstance(state, Ensemble) and any(isinstance(s, AnalyticPureState) for s in state.states))
    if analytic:
        # x-x and p-p cross terms from the (0, 0) and (pi/2, pi/2) joints
        for t in (0.0, np.pi / 2):
            v_sum = ev.combo_stats(t, t, 1.0, 1.0, 1, "R")[1]
            i, j = idx[t][1], idx[t][2]
            cov[i, j] = cov[j, i] = 0.5 * (v_sum - cov[i, i] - cov[j, j])
        xp = _current_covariances(ev.sampler)
        for a in (1, 2):
            for b in (1, 2):
                cov[x[a], p[b]] = cov[p[b], x[a]] = xp[a - 1, b - 1]
        return cov
    # rotated-variance tomography
    m45 = ev.mode_stats(np.pi / 4, np.pi / 4)
    for j, key in ((1, "var_R1"), (2, "var_R2")):
        cov[x[j], p[j]] = cov[p[j], x[j]] = m45[key] - 0.5 * (cov[x[j], x[j]] + cov[p[j], p[j]])
    for t1 in (0.0, np.pi / 2):
        for t2 in (0.0, np.pi / 2):
            v_sum = ev.combo_stats(t1, t2, 1.0, 1.0, 1, "R")[1]
            i, j = idx[t1][1], idx[t2][2]
            cov[i, j] = cov[j, i] = 0.5 * (v_sum - cov[i, i] - cov[j, j])
    return cov


def covariance_matrix(state, points: Optional[int] = None,
                      span: Optional[float] = None) -> np.ndarray:
    """Symmetrized covariance matrix of (x1, p1, x2, p2), vacuum = I/2."""
    return _covariance(_Workspace(state, points, span).base)


def _simon_raw(ev: _Evaluator) -> CriterionReport:
    cov = _covariance(ev)
    nu = symplectic_eigenvalues(cov)
    if nu[0] < 0.5 - 1e-6:
        raise NumericalConsistencyError(
            f"reconstructed covariance violates the uncertainty principle (nu_min={nu[0]:.9f})")
    nu_pt = symplectic_eigenvalues(partial_transpose_cov(cov))[0]
    variances = {k: float(cov[i, j]) for k, (i, j) in {
        "x1x1": (0, 0), "p1p1": (1, 1), "x2x2": (2, 2), "p2p2": (3, 3), "x1p1": (0, 1),
        "x2p2": (2, 3), "x1x2": (0, 2), "x1p2": (0, 3), "p1x2": (1, 2), "p1p2": (1, 3)}.items()}
    return CriterionReport("simon", None, float(nu_pt), 0.5, 0.5 - float(nu_pt), False,
                           {}, variances, None, ev.points)


def _simon(ws: _Workspace, refine: bool = True) -> CriterionReport:
    report = _simon_raw(ws.base)
    if not refine or report.margin <= DEAD_BAND:
        return report
    coarse = report
    points = report.grid_points
    while points * 2 <= MAX_JOINT_POINTS:
        points *= 2
        fine = _simon_raw(ws.at(points))
        delta = abs(fine.lhs - coarse.lhs)
        if delta < CONVERGENCE_TOL:
            return replace(fine, refinement_delta=delta, violated=fine.margin > DEAD_BAND)
        coarse = fine
    raise ConvergenceError(f"simon test did not converge by {points} grid points",
                           estimates=(coarse,))


def simon_ppt_test(state, points: Optional[int] = None, span: Optional[float] = None,
                   refine: bool = True) -> CriterionReport:
    """Simon's PPT test on the second moments.

    ``lhs`` is the smallest symplectic eigenvalue of the partially transposed
    covariance matrix; separable states keep it at or above 1/2.
    """
    return _simon(_Workspace(state, points, span), refine)


# -- settings scan -----------------------------------------------------------

def scan_angles(theta_step: float) -> np.ndarray:
    k = math.pi / theta_step
    if theta_step <= 0 or abs(k - round(k)) > 1e-9:
        raise ValueError(f"theta_step must divide pi, got {theta_step}")
    return np.arange(int(round(k))) * theta_step


def scan_settings(state, criteria: Iterable[str] = CRITERIA, theta_step: float = math.pi / 4,
                  a_values: Iterable[float] = (1.0,), points: Optional[int] = None,
                  span: Optional[float] = None, max_refinements: int = 3) -> ScanResult:
    """Evaluate the requested criteria over theta1, theta2 in [0, pi).

    Both (R, S) pairings are tried at every angle pair; the squeezing weights
    a1, a2 range over ``a_values`` for the entropic tests only.  Failures at
    single points are collected in ``errors`` and the scan carries on.  The
    best violations found are re-evaluated on doubled grids before they are
    reported as violated; at most ``max_refinements`` candidates are refined
    per criterion.
    """
    requested = set(criteria)
    unknown = requested - set(CRITERIA)
    if unknown:
        raise ValueError(f"unknown criteria {sorted(unknown)}")
    criteria = [c for c in CRITERIA if c in requested]
    angles = scan_angles(theta_step)
    a_values = [float(a) for a in a_values]
    ws = _Workspace(state, points, span)
    grid: list = []
    errors: list = []

    for criterion in criteria:
        if criterion == "simon":
            try:
                grid.append(_simon(ws, refine=False))
            except EntropicCVError as exc:
                errors.append((criterion, None, str(exc)))
            continue
        if criterion == "strong" and not _is_pure(state):
            errors.append((criterion, None, "the strong entropic bound only holds for pure states"))
            continue
        a_grid = a_values if criterion in ("strong", "weak") else [1.0]
        for t1 in angles:
            for t2 in angles:
                for a1 in a_grid:
                    for a2 in a_grid:
                        for sign in (1, -1):
                            s = MeasurementSettings(float(t1), float(t2), a1, a2, sign)
                            try:
                                grid.append(_raw_report(criterion, ws.base, s))
                            except EntropicCVError as exc:
                                errors.append((criterion, s, str(exc)))

    # certify the most promising candidates of each criterion
    for criterion in criteria:
        order = sorted((i for i, r in enumerate(grid)
                        if r.criterion == criterion and r.margin > DEAD_BAND),
                       key=lambda i: -grid[i].margin)
        for i in order[:max_refinements]:
            try:
                if criterion == "simon":
                    grid[i] = _simon(ws)
                else:
                    grid[i] = _certify(criterion, ws, grid[i])
            except EntropicCVError as exc:
                errors.append((criterion, grid[i].settings, str(exc)))
                continue
            if grid[i].violated:
                break

    best = {}
    for criterion in criteria:
        reports = [r for r in grid if r.criterion == criterion]
        if reports:
            # certified violations outrank uncertified candidates whose margin only
            # differs by rounding; among equals the first (smallest setting) wins
            best[criterion] = max(reports, key=lambda r: (r.violated, r.margin))
    return ScanResult(best, grid, errors)
