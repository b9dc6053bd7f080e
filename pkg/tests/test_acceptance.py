"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records its outcome in ``conftest.ACCEPTANCE_RESULTS``; the
terminal summary prints one PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import ACCEPTANCE_RESULTS, FOUR_MODES, R0, synth
from fibertaper import beats as bt
from fibertaper import waveguide as wg
from fibertaper.analysis import detect_cutoffs, extract_ridges, fit_hot_zone, identify_modes, spectrogram
from fibertaper.taper import TaperProfile, lengthening_for_waist, radius_at, total_volume, waist_at
from fibertaper.waveguide import WaveguideSpec
from oracles import bessel_zero

SPEC = WaveguideSpec()
UM, MM, NM = 1e-6, 1e-3, 1e-9
H = 3.05 * MM


def cold():
    """Drop solver caches so each timed criterion pays its own setup cost."""
    wg.cutoff_radius.cache_clear()
    bt.dispersion_curve.cache_clear()


def record(number, checks, elapsed, budget):
    """Store the outcome; ``checks`` maps a short label to (ok, detail)."""
    in_time = elapsed < budget
    ok = in_time and all(c for c, _ in checks.values())
    parts = [f"{k}={'ok' if c else 'FAIL'} ({d})" for k, (c, d) in checks.items()]
    parts.append(f"runtime {elapsed:.2f}s < {budget:g}s {'ok' if in_time else 'FAIL'}")
    ACCEPTANCE_RESULTS[number] = (ok, "; ".join(parts))
    assert ok, ACCEPTANCE_RESULTS[number][1]


def test_criterion_1_he12_cutoff():
    cold()
    t = time.perf_counter()
    rc = wg.cutoff_radius(WaveguideSpec(), "HE12")
    elapsed = time.perf_counter() - t
    record(1, {"HE12 cutoff in [435, 485] nm": (435 * NM <= rc <= 485 * NM, f"{rc / NM:.2f} nm")},
           elapsed, 1.0)


def test_criterion_2_single_mode_bound():
    cold()
    t = time.perf_counter()
    spec = WaveguideSpec()
    rc = {m: wg.cutoff_radius(spec, m) for m in ("HE21", "TE01")}
    largest = max(rc.values())
    closed = bessel_zero(0, 1) / (spec.k0 * spec.numerical_aperture)
    elapsed = time.perf_counter() - t
    record(2, {
        "max(HE21, TE01) cutoff < 300 nm": (largest < 300 * NM,
                                            f"HE21 {rc['HE21'] / NM:.2f} nm, TE01 {rc['TE01'] / NM:.2f} nm"),
        "TE01 vs V = j01 within 0.1 nm": (abs(rc["TE01"] - closed) <= 0.1 * NM,
                                          f"diff {abs(rc['TE01'] - closed) / NM:.2e} nm"),
    }, elapsed, 1.0)


def test_criterion_3_table_one():
    cases = [((0.22, 0.16), ["HE21", "TE01"], 0.40 * UM),
             ((0.35, 0.30), ["HE12", "EH11"], 0.51 * UM),
             ((0.26, 0.40), ["HE12", "HE22"], 0.68 * UM)]
    cold()
    t = time.perf_counter()
    checks = {}
    for i, (dn, modes, radius) in enumerate(cases, 1):
        res = identify_modes(dn, WaveguideSpec(wavelength=775e-9))
        got = [str(m) for m in res.modes]
        ok = got == modes and abs(res.inferred_radius / radius - 1) <= 0.1
        checks[f"scan {i}"] = (ok, f"{'+'.join(got)} r={res.inferred_radius / UM:.4f} um")
    record(3, checks, time.perf_counter() - t, 30.0)


def test_criterion_4_phase_frequency_consistency():
    pair = ("HE11", "HE12")
    cold()
    t = time.perf_counter()
    worst = 0.0
    for w in np.linspace(0.5 * UM, 2 * UM, 10):
        L = float(lengthening_for_waist(R0, H, w))
        phi = [bt.beat_phase(SPEC, TaperProfile(R0, H, L + s), pair) for s in (-1 * UM, 1 * UM)]
        k = bt.beat_frequency(SPEC, w, pair)
        worst = max(worst, abs(k - (phi[1] - phi[0]) / (2 * UM)) / k)
    rc = wg.cutoff_radius(SPEC, "HE12")
    ws = np.geomspace(rc * 1.0005, 3 * UM, 600)
    k = bt.beat_frequency(SPEC, ws, pair, normalized=True)
    top = int(np.argmax(k))
    dip = 0 < top < ws.size - 1 and k[0] < k[top]
    record(4, {
        "max rel |K - dPhi/dL| < 1e-3": (worst < 1e-3, f"{worst:.2e}"),
        "pre-cutoff decrease": (dip, f"K peak {k[top]:.4f} at w={ws[top] / NM:.0f} nm, "
                                     f"{k[0]:.4f} at cutoff"),
    }, time.perf_counter() - t, 30.0)


@pytest.fixture(scope="module")
def acceptance_trace():
    cold()
    t = time.perf_counter()
    trace = synth(H, FOUR_MODES, 36 * MM)
    return trace, time.perf_counter() - t


def test_criterion_5_hot_zone_round_trip(acceptance_trace):
    trace, t_synth = acceptance_trace
    t = time.perf_counter()
    ridges = extract_ridges(spectrogram(trace, 0.25 * MM, SPEC))
    fit = fit_hot_zone(ridges, SPEC, R0, ["HE12", "HE21", "TE01"])
    elapsed = t_synth + time.perf_counter() - t
    record(5, {
        "h within 2%": (abs(fit.h / H - 1) <= 0.02, f"h={fit.h / MM:.5f} mm"),
        "dominant ridge HE11-HE12": (fit.assignment[0] == "HE11-HE12", fit.assignment[0]),
    }, elapsed, 60.0)


def test_criterion_6_cutoff_detection(acceptance_trace):
    trace, _ = acceptance_trace
    t = time.perf_counter()
    events = detect_cutoffs(trace)
    elapsed = time.perf_counter() - t
    modes = ("HE12", "HE21", "TE01")
    waists = waist_at(R0, H, [e.L_drop for e in events])
    checks = {"three drops": (len(events) == 3, f"{len(events)} events")}
    if len(events) == 3:
        for mode, w in zip(modes, waists):
            rc = wg.cutoff_radius(SPEC, mode)
            checks[mode] = (abs(w / rc - 1) <= 0.1, f"waist {w / NM:.1f} nm vs cutoff {rc / NM:.1f} nm")
        tail = trace.T[trace.L >= events[-1].L_drop]
        checks["flat after last"] = (np.ptp(tail) < 1e-12, f"ptp {np.ptp(tail):.1e}")
    record(6, checks, elapsed, 30.0)


def test_criterion_7_volume_conservation():
    rng = np.random.default_rng(7)
    t = time.perf_counter()
    worst_closed = worst_quad = 0.0
    for _ in range(100):
        p = TaperProfile(rng.uniform(5, 100) * UM, rng.uniform(1, 10) * MM, rng.uniform(0, 50) * MM)
        ref = math.pi * p.r0**2 * p.h
        worst_closed = max(worst_closed, abs(total_volume(p) / ref - 1))
        f = lambda z: math.pi * radius_at(p, z) ** 2  # noqa: E731
        pieces = [0.0, p.L / 2, (p.L + p.h) / 2, p.L / 2 + p.h, p.length]
        num = sum(quad(f, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
                  for a, b in zip(pieces[:-1], pieces[1:]) if b > a)
        worst_quad = max(worst_quad, abs(num / total_volume(p) - 1))
    record(7, {
        "closed form = pi r0^2 h (1e-12)": (worst_closed <= 1e-12, f"max rel {worst_closed:.1e}"),
        "quadrature oracle (1e-9)": (worst_quad <= 1e-9, f"max rel {worst_quad:.1e}"),
    }, time.perf_counter() - t, 5.0)


def test_criterion_8_note():
    # experimental traces are not reproducible; criteria 5-7 and the module
    # invariant suites stand in for them
    ACCEPTANCE_RESULTS[8] = (None, "no executable check: measured data replaced by criteria 5-7")
