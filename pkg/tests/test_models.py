import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionwave import ParameterError
from actionwave.models import (
    Burgers,
    FisherKPP,
    KdV,
    admissible_speed,
    boundary_limits,
    closed_form_profile,
    eval_profile,
    make_model,
)

from conftest import central_difference


def test_make_model_valid():
    assert make_model("kdv", A=1) == KdV(A=1.0)
    assert make_model("burgers", D=1, u1=0, u2=1) == Burgers(1.0, 0.0, 1.0)
    assert make_model("Sine-Gordon").name == "sg"


@pytest.mark.parametrize(
    "name, params, message",
    [
        ("kpp", {"D": 1, "k": -2}, "k must be > 0"),
        ("kpp", {"D": 0, "k": 1}, "D must be > 0"),
        ("kdv", {"A": 0}, "A must be nonzero"),
        ("burgers", {"D": 1, "u1": 1, "u2": 1}, "u1 must be < u2"),
        ("burgers", {"D": -1}, "D must be > 0"),
        ("kdv", {"D": 1}, "unknown parameter"),
        ("nls", {}, "unknown model"),
    ],
)
def test_make_model_rejects(name, params, message):
    with pytest.raises(ParameterError, match=message):
        make_model(name, **params)


def test_admissible_speed_forced():
    assert admissible_speed(FisherKPP(D=1, k=6), "auto") == pytest.approx(5.0, rel=1e-15)
    assert admissible_speed(FisherKPP(D=1, k=6), -5.0) == pytest.approx(-5.0, rel=1e-15)
    assert admissible_speed(Burgers(D=1, u1=0, u2=2)) == 1.0
    with pytest.raises(ParameterError, match="speed is determined by parameters"):
        admissible_speed(FisherKPP(D=1, k=6), 4.0)
    with pytest.raises(ParameterError, match="speed is determined by parameters"):
        admissible_speed(Burgers(D=1, u1=0, u2=2), 0.7)


def test_admissible_speed_free():
    assert admissible_speed(KdV(), 2.5) == 2.5
    assert admissible_speed(make_model("sg"), -0.3) == -0.3
    with pytest.raises(ParameterError, match="singular reduction"):
        admissible_speed(make_model("sg"), 1.0)
    with pytest.raises(ParameterError, match="singular reduction"):
        admissible_speed(make_model("sg"), 2.0)
    with pytest.raises(ParameterError, match="not real-valued"):
        admissible_speed(KdV(), -1.0)
    with pytest.raises(ParameterError, match="not real-valued"):
        admissible_speed(KdV(), 0.0)


def test_profile_examples(kdv, sg, burgers, kpp):
    u, du = eval_profile(closed_form_profile(kdv, 1.0), 0.0)
    assert (u, du) == (3.0, 0.0)
    assert eval_profile(closed_form_profile(sg, 0.0, branch="kink"), 0.0)[0] == pytest.approx(math.pi, abs=1e-15)
    assert eval_profile(closed_form_profile(burgers), 0.0)[0] == 0.5
    u, du = eval_profile(closed_form_profile(kpp), 0.0)
    assert u == pytest.approx(0.25, abs=1e-15)
    assert du == pytest.approx(-0.25, abs=1e-15)
    # independent check of the KPP slope against the printed formula
    f = lambda z: (1.0 + np.exp(z)) ** -2
    assert du == pytest.approx(central_difference(f, 0.0), abs=1e-9)
    u, du = eval_profile(closed_form_profile(sg, 0.0), 40.0)
    assert u == pytest.approx(2 * math.pi, abs=1e-15)
    assert abs(du) < 1e-16


def test_boundary_limits(kdv, sg, kpp, burgers):
    assert boundary_limits(closed_form_profile(kdv, 1.0)) == (0.0, 0.0)
    assert boundary_limits(closed_form_profile(sg, 0.0, branch="kink")) == (0.0, 2 * math.pi)
    assert boundary_limits(closed_form_profile(sg, 0.0, branch="antikink")) == (2 * math.pi, 0.0)
    assert boundary_limits(closed_form_profile(burgers)) == (1.0, 0.0)
    assert boundary_limits(closed_form_profile(kpp)) == (1.0, 0.0)
    assert boundary_limits(closed_form_profile(kpp, branch="increasing")) == (0.0, 1.0)


def test_kpp_branch_selection(kpp):
    down = closed_form_profile(kpp)
    up = closed_form_profile(kpp, branch="increasing")
    assert down.branch == "decreasing" and down.v > 0
    assert up.v == -down.v
    assert closed_form_profile(kpp, -5.0).branch == "increasing"
    with pytest.raises(ParameterError, match="sign"):
        closed_form_profile(kpp, 5.0, branch="increasing")
    with pytest.raises(ParameterError, match="unknown branch"):
        closed_form_profile(kpp, branch="kink")


def test_no_overflow_far_tails(kdv, sg, kpp, burgers):
    z = np.array([-1e6, -800.0, 800.0, 1e6])
    for m in (kdv, sg, kpp, burgers):
        for branch in (None,):
            w = closed_form_profile(m, "auto", branch=branch)
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                u, du = eval_profile(w, z)
            assert np.all(np.isfinite(u)) and np.all(np.isfinite(du))


def _wave_grid():
    waves = []
    for A in (1.0, -0.5, 3.0):
        for v in (0.3, 1.0, 2.5):
            waves.append(closed_form_profile(make_model("kdv", A=A), v))
    for v in (0.0, 0.5, -0.8):
        for b in ("kink", "antikink"):
            waves.append(closed_form_profile(make_model("sg"), v, branch=b))
    for D, k in ((1.0, 6.0), (0.5, 2.0), (2.0, 0.3)):
        for b in ("decreasing", "increasing"):
            waves.append(closed_form_profile(make_model("kpp", D=D, k=k), branch=b))
    for D, u1, u2 in ((1.0, 0.0, 1.0), (0.5, -1.0, 2.0), (2.0, 1.0, 1.5)):
        waves.append(closed_form_profile(make_model("burgers", D=D, u1=u1, u2=u2)))
    return waves


WAVES = _wave_grid()


@pytest.mark.parametrize("wave", WAVES, ids=lambda w: f"{w.model.name}-{w.branch}-{w.v:.3g}")
def test_tails_reach_boundary_limits(wave):
    left, right = boundary_limits(wave)
    reach = 50.0 / wave.decay_rate
    u_left = eval_profile(wave, wave.z0 - reach)[0]
    u_right = eval_profile(wave, wave.z0 + reach)[0]
    tol = 1e-10 * wave.amplitude_range
    assert abs(u_left - left) <= tol
    assert abs(u_right - right) <= tol


@pytest.mark.parametrize("wave", WAVES, ids=lambda w: f"{w.model.name}-{w.branch}-{w.v:.3g}")
def test_derivative_matches_central_difference(wave):
    rng = np.random.default_rng(7)
    z = rng.uniform(-20.0, 20.0, 100)
    du = eval_profile(wave, z)[1]
    fd = central_difference(lambda s: eval_profile(wave, s)[0], z)
    # FD roundoff scales with the amplitude; the tolerance is stated for O(1) amplitudes
    assert np.max(np.abs(du - fd)) <= 1e-6 * max(1.0, wave.amplitude_range)


@pytest.mark.parametrize("wave", WAVES[:3] + WAVES[9:11], ids=str)
def test_higher_derivatives_match_finite_differences(wave):
    z = np.linspace(-6.0, 6.0, 41)
    u, d1, d2, d3 = wave.derivatives(z, 3)
    h = 1e-4
    fd2 = central_difference(lambda s: wave.derivatives(s, 1)[1], z, h)
    fd3 = central_difference(lambda s: wave.derivatives(s, 2)[2], z, h)
    scale = max(1.0, wave.amplitude_range) * max(1.0, wave.decay_rate) ** 3
    assert np.max(np.abs(d2 - fd2)) <= 1e-6 * scale
    assert np.max(np.abs(d3 - fd3)) <= 1e-6 * scale


@settings(max_examples=60, deadline=None)
@given(
    idx=st.integers(0, len(WAVES) - 1),
    c=st.floats(-30, 30, allow_nan=False),
    z=st.floats(-60, 60, allow_nan=False),
)
def test_translation_covariance(idx, c, z):
    base = WAVES[idx]
    shifted = closed_form_profile(base.model, base.v, z0=c, branch=base.branch)
    assert eval_profile(shifted, z) == eval_profile(base, z - c)


@pytest.mark.parametrize("A, v", [(1.0, 1.0), (-2.0, 0.4), (0.3, 3.0)])
def test_kdv_even(A, v):
    s = np.linspace(0.0, 30.0, 301)
    w = closed_form_profile(make_model("kdv", A=A), v)
    assert np.array_equal(eval_profile(w, s)[0], eval_profile(w, -s)[0])
    shifted = closed_form_profile(make_model("kdv", A=A), v, z0=1.25)
    right, left = eval_profile(shifted, 1.25 + s)[0], eval_profile(shifted, 1.25 - s)[0]
    assert np.allclose(right, left, rtol=1e-13, atol=0.0)


@pytest.mark.parametrize("wave", [w for w in WAVES if w.model.name != "kdv"],
                         ids=lambda w: f"{w.model.name}-{w.branch}")
def test_fronts_strictly_monotone(wave):
    z = np.linspace(-8.0, 8.0, 2001) / wave.decay_rate
    u = eval_profile(wave, z)[0]
    du = np.diff(u)
    increasing = wave.branch in ("kink", "increasing")
    assert np.all(du > 0) if increasing else np.all(du < 0)


@settings(max_examples=80, deadline=None)
@given(D=st.floats(1e-3, 1e3), k=st.floats(1e-3, 1e3), up=st.booleans())
def test_kpp_branch_consistency(D, k, up):
    w = closed_form_profile(FisherKPP(D=D, k=k), branch="increasing" if up else "decreasing")
    a = w.kpp_a
    assert math.copysign(1.0, w.v) == math.copysign(1.0, a)
    assert abs(a) == pytest.approx(math.sqrt(k / (6 * D)), rel=1e-12)
    assert abs(w.v) == pytest.approx(math.sqrt(25 * k * D / 6), rel=1e-12)
    assert w.v == pytest.approx(5 * a * D, rel=1e-14)
