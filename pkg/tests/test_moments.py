import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zml import moments, zeta
from zml.errors import ConvergenceError, DomainError, SpecError
from zml.moments import MomentSpec, conjecture_ratio, regime_classify, shift_geometry, shifted_moment

import oracles


def test_shift_geometry_examples():
    g = shift_geometry(MomentSpec(1e5, 1))
    assert (g.gamma_plus, g.gamma_minus, g.delta) == (0.0, 0.0, 0.0)
    assert g.f_value == pytest.approx(11.5129, abs=1e-4)
    assert shift_geometry(MomentSpec(1e5, 1, 0, 1)).f_value == pytest.approx(math.log(3))
    assert shift_geometry(MomentSpec(1e5, 1, 0, 0.001)).f_value == pytest.approx(math.log(1e5))


@given(st.floats(-100, 100), st.floats(-100, 100))
def test_shift_geometry_invariants(a1, a2):
    g = shift_geometry(MomentSpec(1e4, 1, a1, a2))
    assert g.gamma_plus == 0.5 * (a1 + a2)
    assert g.gamma_minus == 0.5 * (a1 - a2)
    assert g.delta == abs(a1 - a2) == pytest.approx(2 * abs(g.gamma_minus))
    assert g.f_value > 0


def test_spec_validation():
    with pytest.raises(SpecError):
        MomentSpec(1.0, 1)
    with pytest.raises(SpecError):
        MomentSpec(2e7, 1)
    with pytest.raises(SpecError):
        MomentSpec(100, 0.5)
    MomentSpec(100, 0.5, permissive=True)
    with pytest.raises(SpecError):
        MomentSpec(100, -0.1, permissive=True)
    with pytest.raises(SpecError):
        MomentSpec(100, 1, 51, 0)
    with pytest.raises(SpecError):
        MomentSpec(1e4, 1, 4000, 4000)  # |a1 + a2| > T^0.6
    with pytest.raises(SpecError):
        MomentSpec(100, 1, range="everything")
    with pytest.raises(DomainError):
        shifted_moment(MomentSpec(100, 1), tol=0)


def test_k_zero_limit():
    spec = MomentSpec(1234.5, 0, 3.0, -2.0, permissive=True)
    est = shifted_moment(spec)
    assert abs(est.value - 1234.5) < 1e-10
    assert conjecture_ratio(spec) == 1.0
    spec2 = MomentSpec(500, 0, range="T_to_2T", permissive=True)
    assert shifted_moment(spec2).value == 500


def test_translation_equal_shifts():
    alpha = 3.7
    T = 300.0
    est = shifted_moment(MomentSpec(T, 1, alpha, alpha), tol=1e-10)
    # independent: composite Simpson of Z^2 on [alpha, T + alpha] with pointwise Z
    n = 600000
    t = np.linspace(alpha, T + alpha, n + 1)
    y = zeta.hardy_z_array(t) ** 2
    h = T / n
    simpson = h / 3 * (y[0] + y[-1] + 4 * math.fsum(y[1:-1:2]) + 2 * math.fsum(y[2:-1:2]))
    assert abs(est.value - simpson) < 1e-8 * simpson


def test_translation_k2():
    alpha = -1.25
    T = 200.0
    est = shifted_moment(MomentSpec(T, 2, alpha, alpha), tol=1e-10)
    t = np.linspace(alpha, T + alpha, 400001)
    y = zeta.hardy_z_array(t) ** 4
    h = T / 400000
    simpson = h / 3 * (y[0] + y[-1] + 4 * math.fsum(y[1:-1:2]) + 2 * math.fsum(y[2:-1:2]))
    assert abs(est.value - simpson) < 1e-6 * simpson


def test_second_moment_against_riemann_sum():
    # step 1e-3 midpoint oracle at T = 1e4 (1e7 pointwise evaluations)
    T = 1e4
    est = shifted_moment(MomentSpec(T, 1))
    ref = oracles.riemann_sum_moment(T, 1e-3, zeta.hardy_z_array)
    assert abs(est.value - ref) < 1e-3 * ref
    assert abs(est.value / oracles.second_moment_main_terms(T) - 1) < 0.02
    assert moments.second_moment_reference(T) == pytest.approx(oracles.second_moment_main_terms(T), rel=1e-14)


@settings(max_examples=10)
@given(st.floats(-5, 5), st.floats(-5, 5), st.sampled_from([1.0, 1.5, 2.0]))
def test_symmetry_in_shifts(a1, a2, k):
    v12 = shifted_moment(MomentSpec(200, k, a1, a2), tol=1e-5).value
    v21 = shifted_moment(MomentSpec(200, k, a2, a1), tol=1e-5).value
    assert v12 >= 0
    assert v12 == v21


def test_determinism():
    spec = MomentSpec(2000, 1.5, 0.3, -0.2)
    a = shifted_moment(spec, tol=1e-7)
    b = shifted_moment(spec, tol=1e-7)
    assert a.value == b.value and a.history == b.history


def test_error_estimate_decreases_with_level():
    spec = MomentSpec(400, 1)
    with pytest.raises(ConvergenceError) as info:
        shifted_moment(spec, tol=1e-300, panel_length=8.0, max_level=3)
    best = info.value.best
    h = best.history
    diffs = [abs(b - a) for a, b in zip(h, h[1:])]
    assert all(d2 < d1 for d1, d2 in zip(diffs, diffs[1:]))
    assert best.error_estimate == diffs[-1]
    assert best.refinement_level == 3


def test_convergence_error_carries_estimate():
    with pytest.raises(ConvergenceError) as info:
        shifted_moment(MomentSpec(300, 1, 0, 0.5), tol=1e-15, max_level=1)
    assert info.value.best.value > 0


def test_permissive_half_moment():
    spec = MomentSpec(300, 0.5, permissive=True)
    est = shifted_moment(spec, tol=1e-6, max_level=6)
    t = np.linspace(0, 300, 3_000_001)
    y = np.abs(zeta.hardy_z_array(t))
    ref = 1e-4 * (math.fsum(y) - 0.5 * (y[0] + y[-1]))
    assert abs(est.value - ref) < 1e-6 * ref


def test_t_to_2t_range():
    spec = MomentSpec(500, 1, range="T_to_2T")
    est = shifted_moment(spec, tol=1e-9)
    whole = shifted_moment(MomentSpec(1000, 1), tol=1e-9).value
    first = shifted_moment(MomentSpec(500, 1), tol=1e-9).value
    assert abs(est.value - (whole - first)) < 1e-8 * whole
    assert moments.conjecture_denominator(spec) == 500 * math.log(500)


def test_multi_matches_single():
    specs = [MomentSpec(800, 1, 0, a) for a in (0, 0.5, 2)]
    multi = moments.shifted_moment_multi(specs, 1e-6)
    for s, m in zip(specs, multi):
        single = shifted_moment(s, 1e-6, min_level=m.refinement_level, max_level=m.refinement_level)
        assert single.value == m.value
    with pytest.raises(DomainError):
        moments.shifted_moment_multi([MomentSpec(800, 1), MomentSpec(900, 1)])


def test_regime_examples():
    T = 1e5
    assert regime_classify(MomentSpec(T, 1)) == "coalescing"
    assert regime_classify(MomentSpec(T, 1, 0, 1 / math.log(T))) == "critical"
    assert regime_classify(MomentSpec(T, 1, 0, 1)) == "separated"
    assert regime_classify(MomentSpec(T, 1, 0, 1), thresholds=(0.1, 20)) == "critical"


def test_conjecture_ratio_definition():
    spec = MomentSpec(1000, 2, 0, 0.3)
    est = shifted_moment(spec)
    g = shift_geometry(spec)
    expected = est.value / (1000 * (math.log(1000) * g.f_value) ** 2)
    assert conjecture_ratio(spec, estimate=est) == expected
