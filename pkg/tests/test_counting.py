"""Counting functions: jump series against closed forms, window
moments against exact integrals, exponent fits against synthetic
series, and the 3-dimensional brute force against radius doubling and
the embedded 2-dimensional class list."""

import math
import warnings

import numpy as np
import pytest

from geolab.counting import (
    MAIN_TERMS,
    PsiSeries,
    build_psi,
    error_at,
    fit_error_exponent,
    main_term,
    psi3_bruteforce,
    second_moment,
    short_interval_diff,
)
from geolab.geodesics import enumerate_classes


# ------------------------------------------------------------ main terms


def test_main_term_worked_values():
    # [TRIVIAL] x^s/s at s = 1, 3/4, 4/3 on arguments with exact powers
    assert main_term(100.0, "trivial") == pytest.approx(100.0, rel=1e-15)
    assert main_term(16.0, "theta") == pytest.approx(32.0 / 3.0, rel=1e-15)
    assert main_term(8.0, "kubota") == pytest.approx(12.0, rel=1e-15)


def test_main_term_rejects():
    with pytest.raises(ValueError):
        main_term(10.0, "cubic")
    with pytest.raises(ValueError):
        main_term(0.5, "trivial")


# ------------------------------------------------------------- series


def test_trivial_series_single_event():
    # [DERIVED: Pell fundamental solutions] the only norm <= 10 comes
    # from trace 3, with norm (7 + 3 sqrt 5)/2 and weight log of it
    s = build_psi(10.0)
    lam = math.log((7 + 3 * math.sqrt(5)) / 2)
    assert len(s) == 1
    assert s.value_at(10.0) == pytest.approx(lam, rel=1e-12)
    assert s.value_at(6.8) == 0j
    assert error_at(s, 10.0) == pytest.approx(lam - 10.0, rel=1e-12)


def test_series_empty_below_first_norm():
    s = build_psi(6.0)
    assert len(s) == 0
    assert s.value_at(6.0) == 0j
    assert error_at(s, 6.0) == pytest.approx(-6.0)


def test_theta_series_closed_forms():
    # [DERIVED: multiplier traces of the first classes] odd traces
    # carry trace 0; traces 4 and 6 contribute sqrt(2) * lam and
    # (1 + sqrt(2)) * lam respectively
    s = build_psi(50.0, "theta")
    lam4 = math.log(7 + 4 * math.sqrt(3))
    lam6 = math.log(17 + 12 * math.sqrt(2))
    assert s.value_at(10.0) == pytest.approx(0.0, abs=1e-12)
    assert s.value_at(20.0) == pytest.approx(math.sqrt(2) * lam4, rel=1e-12)
    assert s.value_at(50.0) == pytest.approx(
        math.sqrt(2) * lam4 + (1 + math.sqrt(2)) * lam6, rel=1e-12
    )


def test_build_psi_rejects():
    with pytest.raises(ValueError):
        build_psi(100.0, "kubota")  # the cubic system is 3-dimensional
    with pytest.raises(ValueError):
        build_psi(0.5)


def test_error_at_range_check():
    s = build_psi(10.0)
    with pytest.raises(ValueError):
        error_at(s, 11.0)
    with pytest.raises(ValueError):
        error_at(s, 0.5)


# -------------------------------------------------------- second moment


def test_second_moment_closed_form():
    # [DERIVED: exact window integral] one jump of weight 5 at norm 3:
    # on [4, 9] the error is 5 - x, and the mean square integrates to
    # ((5-X)^3 - (5-X-Y)^3) / (3 Y)
    syn = PsiSeries.from_events("trivial", [(3.0, 5.0)], 9.0)
    exact = math.sqrt(((5 - 4) ** 3 - (5 - 9) ** 3) / (3 * 5))
    assert second_moment(syn, 4.0, 5.0, nodes=16) == pytest.approx(exact, rel=1e-12)


def test_second_moment_node_doubling():
    s = build_psi(100.0)
    m16 = second_moment(s, 20.0, 30.0, nodes=16)
    m32 = second_moment(s, 20.0, 30.0, nodes=32)
    assert m16 == pytest.approx(m32, rel=1e-9)


def test_second_moment_window_rejects():
    s = build_psi(50.0)
    with pytest.raises(ValueError):
        second_moment(s, 1.0, 5.0)
    with pytest.raises(ValueError):
        second_moment(s, 10.0, 0.0)
    with pytest.raises(ValueError):
        second_moment(s, 10.0, 45.0)


# ------------------------------------------------------- short intervals


def test_short_interval_zero_window():
    s = build_psi(50.0)
    assert short_interval_diff(s, 10.0, 0.0) == (0j, 0.0)


def test_short_interval_trivial_main_diff_is_exactly_y():
    # the binomial expansion of (x+y) - x terminates after one term
    s = build_psi(50.0)
    lhs, rhs = short_interval_diff(s, 9.0, 8.0)
    assert rhs == 8.0
    assert lhs == s.value_at(17.0) - s.value_at(9.0)


def test_short_interval_warns_outside_window():
    s = build_psi(50.0)
    with pytest.warns(RuntimeWarning):
        short_interval_diff(s, 25.0, 1.0)  # below sqrt(x)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        short_interval_diff(s, 25.0, 10.0)  # admissible, no warning


def test_short_interval_rejects():
    s = build_psi(50.0)
    with pytest.raises(ValueError):
        short_interval_diff(s, 10.0, -1.0)
    with pytest.raises(ValueError):
        short_interval_diff(s, 45.0, 10.0)


# -------------------------------------------------------- exponent fits


def _series_through(xs, target):
    events = [(float(xs[0]), float(target[0]))]
    for i in range(1, len(xs)):
        events.append((float(xs[i]), float(target[i] - target[i - 1])))
    return PsiSeries.from_events("trivial", events, float(xs[-1]))


def test_fit_recovers_pure_power():
    # [DERIVED: synthetic series] jumps placed on the sample grid so
    # the error is exactly x^0.6 there
    xs = np.geomspace(100.0, 10000.0, 32)
    ser = _series_through(xs, xs + xs ** 0.6)
    slope, stderr = fit_error_exponent(ser, 100.0, 10000.0, 32)
    assert slope == pytest.approx(0.6, abs=1e-9)
    assert stderr < 1e-9


def test_fit_oscillatory_stays_in_band():
    # [DERIVED: measured band] a half-power envelope with a log-periodic
    # wobble fits to 0.50 +- 0.02 over four decades
    xs = np.geomspace(1e2, 1e6, 64)
    ser = _series_through(xs, xs + np.sqrt(xs) * (2 + np.cos(np.log(xs))))
    slope, _ = fit_error_exponent(ser, 1e2, 1e6, 64)
    assert 0.45 <= slope <= 0.55


def test_fit_rejects_short_and_degenerate_input():
    xs = np.geomspace(100.0, 10000.0, 32)
    ser = _series_through(xs, xs + xs ** 0.6)
    with pytest.raises(ValueError):
        fit_error_exponent(ser, 100.0, 10000.0, 8)
    exact = _series_through(xs, xs.copy())  # error identically zero
    with pytest.raises(ValueError):
        fit_error_exponent(exact, 100.0, 10000.0, 32)


# ------------------------------------------------------- 3-dimensional


def test_psi3_below_smallest_norm():
    # [TRIVIAL] the shortest loxodromic norm is about 2.37
    r = psi3_bruteforce(2.0, radius=3)
    assert r.value == 0j
    assert r.stable
    assert len(r.classes) == 0


def test_psi3_trivial_radius_doubling():
    # [DERIVED: radius-doubling oracle] frozen after the class list
    # agreed between coefficient heights 3, 6, and 12
    r = psi3_bruteforce(20.0, radius=3)
    assert r.stable
    assert not r.notes
    assert len(r.classes) == 87
    assert r.value.imag == pytest.approx(0.0, abs=1e-9)
    assert r.value.real == pytest.approx(194.27473931117373, rel=1e-9)


def test_psi3_kubota_splitting():
    # [DERIVED: finite-quotient splitting over the stable full-group
    # run] the cubic twist is exactly real and its character histogram
    # is symmetric under conjugation, as the entrywise Galois map forces
    r = psi3_bruteforce(20.0, "kubota", radius=3)
    assert r.stable
    assert not r.notes
    assert len(r.classes) == 57
    assert r.value.imag == pytest.approx(0.0, abs=1e-9)
    assert r.value.real == pytest.approx(31.05196659583419, rel=1e-9)
    hist: dict = {}
    for c in r.classes:
        assert abs(c.character) == pytest.approx(1.0, rel=1e-12)
        assert c.character ** 3 == pytest.approx(1.0, rel=1e-9)
        key = (round(c.lam, 9), round(c.character.imag, 6))
        hist[key] = hist.get(key, 0) + 1
    for (lam, im), n in hist.items():
        assert hist.get((lam, -im), 0) == n


def test_psi3_real_trace_subfamily_contains_embedded_classes():
    # [DERIVED: 2-dimensional class list] every rational class embeds
    # with its trace, norm, and lam; trace 4 also picks up a third
    # class with no rational representative, so this is a containment,
    # not a bijection
    r = psi3_bruteforce(20.0, radius=3)
    three_d = sorted(
        (c.trace[0], round(c.norm, 6), round(c.lam, 6))
        for c in r.real_trace_classes()
    )
    two_d = sorted(
        (c.trace, round(c.norm_float, 6), round(c.lam, 6))
        for c in enumerate_classes(20.0, include_powers=True)
    )
    remaining = list(three_d)
    for item in two_d:
        assert item in remaining
        remaining.remove(item)
    assert len(two_d) == 3
    assert sum(1 for t, _, _ in three_d if t == 4) == 3
    assert sum(1 for t, _, _ in two_d if t == 4) == 2


def test_psi3_rejects():
    with pytest.raises(ValueError):
        psi3_bruteforce(10.0, "cubic")
    with pytest.raises(ValueError):
        psi3_bruteforce(2000.0)
    with pytest.raises(ValueError):
        psi3_bruteforce(0.0)
    with pytest.raises(ValueError):
        psi3_bruteforce(10.0, radius=1)


def test_psi3_raw_weights_track_the_universal_main_term():
    # [TRIVIAL] dropping the character recovers an untwisted subgroup
    # count, which shares the x^2/2 main term with the full group; at
    # x = 20 both sit within a factor 1.3 of it and of each other
    r_full = psi3_bruteforce(20.0, radius=3)
    r_sub = psi3_bruteforce(20.0, "kubota", radius=3)
    untwisted = sum(c.lam for c in r_sub.classes)
    assert 0.7 <= untwisted / r_full.value.real <= 1.3
    assert 0.7 <= untwisted / (20.0 ** 2 / 2) <= 1.3
