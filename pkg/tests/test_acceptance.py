"""Acceptance runs, one test per criterion, each printing a pass/fail line."""

import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from entropic_cv import (MeasurementSettings, eta_state, mgvt_test, noon_state, phi_state,
                         product_state, random_haar_mode, random_haar_state, sandwich_check,
                         scan_settings, simon_ppt_test, strong_entropic_test, two_mode_squeezed,
                         uncertainty_check, vacuum, weak_entropic_test)
from entropic_cv.criteria import LN_2PIE, scan_angles
from entropic_cv.experiments import PAPER_TABLE_ROWS, cat_surface, default_jobs, random_table

EULER_GAMMA = 0.5772156649015329
MINUS = MeasurementSettings(sign=-1)  # pairs R- with S+
PLUS = MeasurementSettings(sign=1)  # pairs R+ with S-


def _keep(certified, reports):
    certified.extend(r.refinement_delta for r in reports if r.violated)


def test_criterion_01_eta_closed_form(record_criterion, certified):
    start = time.perf_counter()
    worst = 0.0
    for ratio in (0.5, 0.763, 1.0, 1.732):
        state = eta_state(1.0, ratio)
        minus = weak_entropic_test(state, MINUS)
        plus = weak_entropic_test(state, PLUS)
        _keep(certified, (minus, plus))
        # H[R-] + H[S+] grows with sigma-/sigma+, H[R+] + H[S-] with its inverse
        worst = max(worst,
                    abs(minus.lhs - math.log(4 * math.pi * math.exp(EULER_GAMMA) * ratio)),
                    abs(plus.lhs - math.log(4 * math.pi * math.exp(EULER_GAMMA) / ratio)))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-3 and elapsed < 5.0
    assert record_criterion(1, ok, f"max |error| = {worst:.2e} nats (tol 1e-3), {elapsed:.2f} s (< 5 s)")


def test_criterion_02_entropic_thresholds(record_criterion):
    def gap(settings):
        return lambda r: weak_entropic_test(eta_state(1.0, r), settings, refine=False).lhs - LN_2PIE

    low = brentq(gap(MINUS), 0.6, 0.9, xtol=1e-7)
    high = brentq(gap(PLUS), 1.1, 1.6, xtol=1e-7)
    low_ref = math.exp(1 - EULER_GAMMA) / 2
    high_ref = 2 / math.exp(1 - EULER_GAMMA)
    ok = abs(low - low_ref) < 1e-3 and abs(high - high_ref) < 2e-3
    assert record_criterion(2, ok, f"boundaries {low:.6f} (ref {low_ref:.6f}, tol 1e-3), "
                                   f"{high:.6f} (ref {high_ref:.6f}, tol 2e-3)")


def test_criterion_03_second_order_thresholds(record_criterion):
    def mgvt(settings):
        return lambda r: mgvt_test(eta_state(1.0, r), settings, refine=False).lhs - 1.0

    def simon(r):
        return simon_ppt_test(eta_state(1.0, r), refine=False).lhs - 0.5

    found = {
        "mgvt low": brentq(mgvt(MINUS), 0.3, 0.9, xtol=1e-6),
        "mgvt high": brentq(mgvt(PLUS), 1.2, 2.5, xtol=1e-6),
        "simon low": brentq(simon, 0.3, 0.9, xtol=1e-6),
        "simon high": brentq(simon, 1.2, 2.5, xtol=1e-6),
    }
    refs = {"low": 1 / math.sqrt(3), "high": math.sqrt(3)}
    errors = {k: abs(v - refs[k.split()[1]]) for k, v in found.items()}
    ok = max(errors.values()) < 1e-2
    detail = ", ".join(f"{k} {v:.5f}" for k, v in found.items())
    assert record_criterion(3, ok, f"{detail} (refs 0.57735 / 1.73205, tol 1e-2)")


def test_criterion_04_noon_ladder(record_criterion, certified):
    start = time.perf_counter()
    strong, weak, simon = {}, {}, {}
    for n in range(1, 8):
        res = scan_settings(noon_state(n), ("strong", "weak", "simon"))
        assert not res.errors, res.errors
        strong[n], weak[n], simon[n] = (res.violated(c) for c in ("strong", "weak", "simon"))
        _keep(certified, res.grid)
    pinned = strong_entropic_test(noon_state(2), MeasurementSettings(0.0, math.pi / 2))
    _keep(certified, [pinned])
    elapsed = time.perf_counter() - start
    ok = (all(strong[n] for n in range(1, 6)) and not strong[6] and not strong[7]
          and not any(weak.values()) and not any(simon.values()) and pinned.violated
          and elapsed < 120)
    detected = [n for n in strong if strong[n]]
    assert record_criterion(4, ok, f"strong detects N = {detected}; N=2 at (0, pi/2) "
                                   f"margin {pinned.margin:+.4f}; weak {sum(weak.values())}, "
                                   f"simon {sum(simon.values())} detections; {elapsed:.0f} s (< 120 s)")


def test_criterion_05_phi_state(record_criterion, certified):
    state = phi_state()
    reports = [strong_entropic_test(state, MeasurementSettings(3 * math.pi / 4, math.pi / 4, sign=s))
               for s in (1, -1)]
    _keep(certified, reports)
    hit = max(reports, key=lambda r: r.margin)
    res = scan_settings(state, ("mgvt", "simon"))
    ok = hit.violated and not res.violated("mgvt") and not res.violated("simon") and not res.errors
    assert record_criterion(5, ok, f"strong at (3pi/4, pi/4) sign {hit.settings.sign:+d} margin "
                                   f"{hit.margin:+.4f}; best mgvt margin {res.best['mgvt'].margin:+.4f}, "
                                   f"simon margin {res.best['simon'].margin:+.4f}")


TABLE_REFERENCE = {2: (74.4, 17.3, 9.9), 3: (86.3, 0.5, 0.2), 4: (84.9, 0.0, 0.0),
                   5: (81.0, 0.0, 0.0), 7: (62.5, 0.0, 0.0)}


def test_criterion_06_random_state_table(record_criterion, certified):
    jobs = default_jobs()
    parts, ok = [], True
    for dim, count in PAPER_TABLE_ROWS:
        start = time.perf_counter()
        row = random_table([(dim, count)], seed=2009, points=256, jobs=jobs)[0]
        elapsed = time.perf_counter() - start
        got = (row["n_strong"], row["n_weak"], row["n_mgvt"])
        ref = TABLE_REFERENCE[dim]
        row_ok = all(abs(g - r) <= 5.0 for g, r in zip(got, ref)) and got[0] >= got[1] >= got[2]
        if dim == 2:
            row_ok &= elapsed < 15 * 60
        ok &= row_ok
        if row["max_refinement_delta"] > 0:
            certified.append(row["max_refinement_delta"])
        parts.append(f"D={dim}: {got[0]:.1f}/{got[1]:.1f}/{got[2]:.1f} "
                     f"(ref {ref[0]}/{ref[1]}/{ref[2]}, {elapsed:.0f} s)")
    assert record_criterion(6, ok, "; ".join(parts))


def test_criterion_07_cat_surface(record_criterion, certified):
    alphas = np.round(np.arange(0.0, 2.51, 0.25), 10)
    p1 = cat_surface(alphas, [1.0])
    p0 = cat_surface(np.round(np.arange(0.5, 1.51, 0.125), 10), [0.0])
    edge = cat_surface([0.0], [0.0, 0.5, 1.0])
    for rows in (p1, p0):
        certified.extend(r["refinement_delta"] for r in rows if r["detected"])
    worst_p1 = min(r["lhs_minus_rhs"] for r in p1)
    worst_p0 = max(r["lhs_minus_rhs"] for r in p0)
    worst_edge = max(abs(r["lhs_minus_rhs"]) for r in edge)
    ok = (worst_p1 >= -1e-6 and not any(r["detected"] for r in p1)
          and worst_p0 < 0 and all(r["detected"] for r in p0) and worst_edge < 1e-3)
    assert record_criterion(7, ok, f"p=1 min LHS-RHS {worst_p1:+.2e}; p=0, alpha in [0.5, 1.5] "
                                   f"max LHS-RHS {worst_p0:+.4f}; alpha=0 |LHS-RHS| {worst_edge:.1e}")


def test_criterion_08_soundness_suite(record_criterion):
    violations = sandwich_fail = uncertainty_fail = errors = evaluations = 0
    for i in range(500):
        d1, d2 = i % 6, (i // 6) % 6
        state = product_state(random_haar_mode(d1, 2024, 2 * i), random_haar_mode(d2, 2024, 2 * i + 1))
        res = scan_settings(state, a_values=(0.5, 1.0, 2.0), points=256)
        errors += len(res.errors)
        for r in res.grid:
            evaluations += 1
            violations += r.violated
            if r.criterion in ("strong", "weak"):
                sandwich_fail += not sandwich_check(r)
                uncertainty_fail += not uncertainty_check(r)
    ok = violations == 0 and sandwich_fail == 0 and uncertainty_fail == 0 and errors == 0
    assert record_criterion(8, ok, f"500 product states, {evaluations} evaluations: "
                                   f"{violations} violations, {sandwich_fail} sandwich and "
                                   f"{uncertainty_fail} uncertainty failures, {errors} errors")


def test_criterion_09_gaussian_saturation(record_criterion, certified):
    weak_vac = weak_entropic_test(vacuum())
    mgvt_vac = mgvt_test(vacuum())
    tmsv = weak_entropic_test(two_mode_squeezed(0.5), MINUS)
    _keep(certified, [tmsv])
    ok = (abs(weak_vac.lhs - LN_2PIE) < 1e-3 and abs(mgvt_vac.lhs - 1.0) < 1e-4
          and abs(tmsv.lhs - (LN_2PIE - 1.0)) < 1e-3)
    assert record_criterion(9, ok, f"vacuum weak lhs - ln 2pi e = {weak_vac.lhs - LN_2PIE:+.1e}, "
                                   f"MGVT - 1 = {mgvt_vac.lhs - 1:+.1e}; TMSV r=0.5 lhs - (ln 2pi e - 1) = "
                                   f"{tmsv.lhs - LN_2PIE + 1:+.1e}")


def test_criterion_10_equal_squeezing_invariance(record_criterion):
    worst = 0.0
    angles = scan_angles(math.pi / 4)
    for i in range(20):
        state = random_haar_state(2, 77, i)
        for t1 in angles:
            for t2 in angles:
                for sign in (1, -1):
                    base = weak_entropic_test(state, MeasurementSettings(t1, t2, 1, 1, sign),
                                              points=256, refine=False).lhs
                    for a in (0.5, 2.0):
                        sq = weak_entropic_test(state, MeasurementSettings(t1, t2, a, a, sign),
                                                points=256, refine=False).lhs
                        worst = max(worst, abs(sq - base))
    assert record_criterion(10, worst < 1e-5, f"max |lhs(a,a) - lhs(1,1)| = {worst:.1e} (tol 1e-5) "
                                              f"over 20 states x 32 settings")


def test_criterion_11_convergence_gate(record_criterion, certified):
    worst = max(certified) if certified else float("nan")
    ok = bool(certified) and all(d is not None and d < 1e-4 for d in certified)
    assert record_criterion(11, ok, f"{len(certified)} certified violations, "
                                    f"max refinement delta {worst:.1e} (tol 1e-4)")
