"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest -v tests/test_acceptance.py`` (add ``-s`` to see the
per-criterion lines also for passing tests).
"""

import time

import numpy as np
import pytest

from gaussdiv import (
    GaussianMap,
    PiecewiseConstantRates,
    QbmParams,
    amplification_windows,
    check_intermediate_cp,
    check_intermediate_p_one_mode,
    classify_process,
    damping_profile,
    canonical_variance_product,
    is_cp,
    is_physical,
    is_positive_one_mode,
    phase_insensitive_process,
    physicality_eigenvalues,
    physicality_integrals,
    qbm_process,
    random_gaussian_map,
    trajectory,
    verify_theorem1,
)

T_STAR = 1.0 + 0.5 * np.log(3.0)


def report(criterion, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_01_quantum_limit_boundary():
    """CP flips exactly at the quantum-limit noise y = (g^2 - 1)/2."""
    start = time.time()
    worst = 0.0
    for g in (1.1, np.sqrt(2.0), 2.0):
        boundary = 0.5 * (g * g - 1.0)
        ok_at, margin_at = is_cp(GaussianMap.amplifier(g, boundary))
        ok_below, _ = is_cp(GaussianMap.amplifier(g, boundary - 1e-6))
        ok_above, _ = is_cp(GaussianMap.amplifier(g, boundary + 1e-6))
        assert ok_at and ok_above and not ok_below
        worst = max(worst, abs(margin_at))
    elapsed = time.time() - start
    report(1, worst <= 1e-9 and elapsed < 1.0,
           f"boundary margin {worst:.2e}, runtime {elapsed:.2f}s")


def test_criterion_02_theorem1_equivalence():
    """500 seeded maps: the closed-form CP test and the one-ancilla falsifier
    never disagree, and no map is falsified only with two ancillas."""
    start = time.time()
    inconsistent = 0
    k2_only = 0
    tested = 0
    for seed in range(500):
        m = random_gaussian_map(1, 2.0, seed)
        check = verify_theorem1(m, samples=200, seed=0)
        if check.status == "skipped":
            continue
        tested += 1
        if check.status == "inconsistent":
            inconsistent += 1
        if check.falsified_k2 and not check.falsified_k1:
            k2_only += 1
    elapsed = time.time() - start
    report(2, inconsistent == 0 and k2_only == 0 and elapsed < 60.0,
           f"{tested} maps tested, {inconsistent} inconsistent, "
           f"{k2_only} k2-only, runtime {elapsed:.1f}s")


def test_criterion_03_transposition_class():
    """Transposition: cp margin -1 within 1e-9, scan margin >= -1e-6."""
    m = GaussianMap.transposition()
    _, cp_margin = is_cp(m)
    positive, p_margin, _ = is_positive_one_mode(m)
    report(3, abs(cp_margin + 1.0) <= 1e-9 and positive and p_margin >= -1e-6,
           f"cp margin {cp_margin!r}, scan margin {p_margin:.2e}")


def _rate_direct_agreement(proc, grid, tau=1e-4):
    """Compare region labels with the direct intermediate-map checks."""
    checked = disagreements = 0
    for point in trajectory(proc, grid=grid):
        d_cp = point.mu - abs(point.eps)
        if abs(d_cp) > 1e-3:
            _, margin = check_intermediate_cp(proc, point.t, tau)
            checked += 1
            if (margin >= -1e-9) != (d_cp > 0):
                disagreements += 1
        d_p = 2.0 * point.mu - (abs(point.eps) - point.eps)
        if abs(d_p) > 1e-3:
            ok, _ = check_intermediate_p_one_mode(proc, point.t, tau)
            checked += 1
            if ok != (d_p > 0):
                disagreements += 1
    return checked, disagreements


def test_criterion_04_rates_vs_direct_divisibility():
    """Rate-plane labels match the direct CP/positivity checks at tau = 1e-4
    on the damping, two-phase, and Brownian motion models."""
    damping = phase_insensitive_process(damping_profile(0.7, 0.5, 10.0))
    two_phase = phase_insensitive_process(
        PiecewiseConstantRates([(0, 1, 0.0, 1.0), (1, 2, 1.0, 0.0)])
    )
    # Stronger coupling spreads the Brownian rates past the 1e-3 band while
    # max |gamma| stays well below omega0.
    qbm = qbm_process(QbmParams(omega0=1.0, omega_c=0.5, alpha=0.6))
    total = bad = 0
    for proc in (damping, two_phase, qbm):
        checked, disagreements = _rate_direct_agreement(proc, grid=200)
        total += checked
        bad += disagreements
    report(4, bad == 0 and total > 100,
           f"{total} point comparisons, {bad} disagreements")


def _random_segments(seed, count=5):
    rng = np.random.default_rng(seed)
    edges = np.concatenate([[0.0], np.cumsum(rng.uniform(0.2, 0.8, count))])
    return PiecewiseConstantRates([
        (edges[i], edges[i + 1], rng.uniform(-2, 2), rng.uniform(-2, 2))
        for i in range(count)
    ])


def test_criterion_05_integral_vs_eigenvalue_physicality():
    """On 100 random piecewise-constant profiles the integral conditions and
    the direct eigenvalues agree within 1e-8 at every grid point."""
    worst = 0.0
    for seed in range(100):
        rates = _random_segments(seed)
        ts = np.linspace(0.0, rates.horizon, 101)[1:]
        lam_p, lam_m = physicality_eigenvalues(rates, ts)
        int_p, int_m = physicality_integrals(rates, ts)
        scale = np.exp(2.0 * np.asarray(rates.log_gain(ts)))
        for lam, integral in ((lam_p, int_p), (lam_m, int_m)):
            diff = np.abs(lam - scale * integral) / (1.0 + np.abs(lam))
            worst = max(worst, float(diff.max()))
            # Sign agreement outside the tolerance band.
            assert not ((lam < -1e-8) & (integral > 1e-8)).any()
            assert not ((lam > 1e-8) & (integral < -1e-8)).any()
    report(5, worst <= 1e-8, f"worst rescaled deviation {worst:.2e}")


def test_criterion_06_weak_class_with_sub_limit_amplification():
    """The two-phase profile: physical, weakly non-Markovian with the
    crossing at t = 1, and a sub-quantum-limit amplification window (1, 2]."""
    rates = PiecewiseConstantRates([(0, 1, 0.0, 1.0), (1, 2, 1.0, 0.0)])
    proc = phase_insensitive_process(rates)

    phys = is_physical(rates, grid=400)
    rep = classify_process(proc, grid=400)
    windows = amplification_windows(rates, grid=400)

    # The + integral condition settles to 1/2 as the gain phase extends, and
    # the - branch stays strictly positive past t = 0.
    long_rates = PiecewiseConstantRates([(0, 1, 0.0, 1.0), (1, 9, 1.0, 0.0)])
    tail_plus = float(physicality_integrals(long_rates, np.array([9.0]))[0][0])
    ts = np.linspace(0.0, 9.0, 400)[1:]
    lam_minus_floor = float(physicality_eigenvalues(long_rates, ts)[1].min())

    ok = (
        phys.physical
        and rep.klass == "weak"
        and len(rep.crossings) == 1
        and abs(rep.crossings[0].t - 1.0) <= 0.005
        and len(windows) == 1
        and abs(windows[0].t_start - 1.0) <= 0.005
        and windows[0].t_end == 2.0
        and abs(windows[0].max_gap - 1.0) <= 1e-6
        and abs(tail_plus - 0.5) <= 1e-6
        and lam_minus_floor > 0.0
    )
    report(6, ok,
           f"class {rep.klass}, crossing {rep.crossings[0].t:.4f}, window "
           f"({windows[0].t_start:.4f}, {windows[0].t_end}], gap "
           f"{windows[0].max_gap!r}, + tail {tail_plus:.8f}")


def test_criterion_07_strong_class_and_physicality_horizon():
    """The contraction profile is physical exactly up to 1 + ln(3)/2 and is
    strongly non-Markovian on [0, 1.5]."""
    over = PiecewiseConstantRates([(0, 1, 0.0, 1.0), (1, 1.6, -1.0, 0.0)])
    result = is_physical(over, grid=400)
    within = PiecewiseConstantRates([(0, 1, 0.0, 1.0), (1, 1.5, -1.0, 0.0)])
    rep = classify_process(phase_insensitive_process(within), grid=300)
    ok = (
        not result.physical
        and abs(result.violation_time - T_STAR) <= 1e-3
        and is_physical(within, grid=400).physical
        and rep.klass == "strong"
    )
    report(7, ok,
           f"violation at {result.violation_time!r} (target {T_STAR:.6f}), "
           f"class on [0, 1.5] = {rep.klass}")


def test_criterion_08_purity_on_the_border():
    """Damping toward vacuum keeps a pure state at product 1/4; noiseless
    contraction violates uncertainty at every positive time."""
    gamma = 0.7
    border = damping_profile(gamma, 0.5, horizon=10.0 / gamma)
    worst = 0.0
    for t in np.linspace(0.0, 10.0 / gamma, 41):
        value, violated = canonical_variance_product(border, 0.5, float(t))
        worst = max(worst, abs(value - 0.25))
        assert not violated
    contraction = PiecewiseConstantRates([(0, 10.0, -gamma, 0.0)])
    flags = [
        canonical_variance_product(contraction, 0.5, float(t))[1]
        for t in np.linspace(0.01, 10.0, 41)
    ]
    report(8, worst <= 1e-8 and all(flags),
           f"max |product - 1/4| = {worst:.2e}, contraction flagged "
           f"{sum(flags)}/{len(flags)}")


def test_criterion_09_qbm_qualitative():
    """Zero-temperature Ohmic bath at omega_c = omega0/2: the trajectory
    starts in the CP region, later enters NP, and the strong verdict is
    stable under grid refinement."""
    proc = qbm_process(QbmParams(omega0=1.0, omega_c=0.5, alpha=0.1))
    rep200 = classify_process(proc, grid=200)
    rep800 = classify_process(proc, grid=800)
    first = rep200.samples[0]
    regions = [s.region for s in rep200.samples]
    ok = (
        first.rates.mu >= abs(first.rates.eps) - 1e-6
        and regions[0] == "CP"
        and "NP" in regions
        and rep200.klass == "strong"
        and rep800.klass == "strong"
    )
    report(9, ok,
           f"first region {regions[0]}, NP entered {'NP' in regions}, "
           f"class N=200 {rep200.klass}, N=800 {rep800.klass}")


def test_criterion_10_initial_condition_no_go():
    """50 random profiles starting with mu_0 < |eps_0| are all unphysical,
    with the violation time shrinking to zero under grid refinement."""
    failures = 0
    for seed in range(50):
        rng = np.random.default_rng((10, seed))
        eps0 = float(rng.uniform(0.3, 2.0) * rng.choice([-1.0, 1.0]))
        mu0 = abs(eps0) - float(rng.uniform(0.1, 1.0))
        rates = _random_segments(seed)
        segs = rates.segments
        segs[0] = (segs[0][0], segs[0][1], eps0, mu0)
        rates = PiecewiseConstantRates(segs)
        previous = np.inf
        for grid in (100, 400, 1600):
            result = is_physical(rates, grid=grid)
            if result.physical or result.violation_time > rates.horizon / grid:
                failures += 1
                break
            assert result.violation_time <= previous + 1e-9
            previous = result.violation_time
    report(10, failures == 0,
           f"{50 - failures}/50 profiles rejected with vanishing onset")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
