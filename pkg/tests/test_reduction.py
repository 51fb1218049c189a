import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionwave import NumericalError, ParameterError
from actionwave.models import (
    Burgers,
    FisherKPP,
    KdV,
    SineGordon,
    boundary_limits,
    closed_form_profile,
    eval_profile,
)
from actionwave.reduction import (
    PhasePoint,
    equilibria,
    hamiltonian,
    integrate_orbit,
    is_hamiltonian,
    trace_separatrix,
    tw_ode_rhs,
)


def test_rhs_examples():
    assert tw_ode_rhs(KdV(A=1), 1.0, PhasePoint(2.0, 0.0)) == (0.0, 0.0)
    du, dp = tw_ode_rhs(SineGordon(), 0.0, PhasePoint(math.pi / 2, 0.0))
    assert du == 0.0 and dp == 1.0
    du, dp = tw_ode_rhs(FisherKPP(D=1, k=6), 5.0, PhasePoint(0.5, 0.0))
    assert dp == pytest.approx(-1.5, abs=1e-15)
    du, dp = tw_ode_rhs(Burgers(D=1, u1=0, u2=1), 0.5, PhasePoint(0.75, 2.0))
    assert (du, dp) == (2.0, 0.5)


def test_rhs_rejects_singular_sg():
    with pytest.raises(ParameterError, match="singular reduction"):
        tw_ode_rhs(SineGordon(), -1.0, PhasePoint(0.0, 0.0))


def test_hamiltonian_examples():
    assert hamiltonian(KdV(A=1), 1.0, PhasePoint(0.0, 0.0)) == 0.0
    assert hamiltonian(SineGordon(), 0.0, PhasePoint(0.0, 0.0)) == 1.0
    assert is_hamiltonian(KdV()) and is_hamiltonian(SineGordon())
    assert not is_hamiltonian(FisherKPP()) and not is_hamiltonian(Burgers())
    with pytest.raises(ParameterError, match="not Hamiltonian"):
        hamiltonian(FisherKPP(D=1, k=6), 5.0, PhasePoint(0.1, 0.0))
    with pytest.raises(ParameterError, match="not Hamiltonian"):
        hamiltonian(Burgers(), 0.5, PhasePoint(0.1, 0.0))


def test_equilibria_kdv():
    eqs = equilibria(KdV(A=1), 1.0, (-1.0, 3.0))
    assert [(e.point.u, e.kind) for e in eqs] == [(0.0, "saddle"), (2.0, "center")]


def test_equilibria_sg_static():
    eqs = equilibria(SineGordon(), 0.0, (-0.5, 7.0))
    assert [e.kind for e in eqs] == ["saddle", "center", "saddle"]
    assert [e.point.u for e in eqs] == pytest.approx([0.0, math.pi, 2 * math.pi], abs=1e-15)


def test_equilibria_sg_superluminal_swaps_roles():
    eqs = equilibria(SineGordon(), 2.0, (-0.5, 3.5))
    assert [e.kind for e in eqs] == ["center", "saddle"]


def test_equilibria_kpp_and_burgers():
    kpp = equilibria(FisherKPP(D=1, k=6), 5.0, (-1.0, 2.0))
    assert [(e.point.u, e.kind) for e in kpp] == [(0.0, "stable-node/focus"), (1.0, "saddle")]
    bur = equilibria(Burgers(D=1, u1=0, u2=1), 0.5, (-1.0, 2.0))
    assert [e.point.u for e in bur] == [0.0, 1.0]
    # on the other side of the fixed-point window nothing is reported
    assert equilibria(KdV(A=1), 1.0, (5.0, 9.0)) == []


def _param_grid():
    return [
        (KdV(A=1.0), 1.0), (KdV(A=-2.0), 0.5), (KdV(A=0.5), 3.0),
        (SineGordon(), 0.0), (SineGordon(), 0.6), (SineGordon(), 1.7),
        (FisherKPP(D=1.0, k=6.0), 5.0), (FisherKPP(D=2.0, k=0.5), -math.sqrt(25 * 0.5 * 2.0 / 6)),
        (Burgers(D=1.0, u1=0.0, u2=1.0), 0.5), (Burgers(D=0.3, u1=-1.0, u2=2.0), 0.5),
    ]


@pytest.mark.parametrize("model, v", _param_grid())
def test_equilibria_are_zeros_of_f(model, v):
    for e in equilibria(model, v, (-10.0, 10.0)):
        assert abs(tw_ode_rhs(model, v, e.point)[1]) <= 1e-12


@pytest.mark.parametrize("model, v", _param_grid())
def test_equilibrium_start_stays_fixed(model, v):
    for e in equilibria(model, v, (-10.0, 10.0)):
        # saddles amplify the O(1e-16) residual of sin(n pi) like exp(lambda z); keep z modest
        orb = integrate_orbit(model, v, e.point, (0.0, 10.0), n_samples=101)
        assert np.max(np.abs(orb.u - e.point.u)) <= 1e-10
        assert np.max(np.abs(orb.p)) <= 1e-10


@pytest.mark.parametrize(
    "model, v, start",
    [
        (KdV(A=1.0), 1.0, PhasePoint(1.0, 0.0)),
        (KdV(A=-1.0), 2.0, PhasePoint(-3.0, 0.5)),
        (SineGordon(), 0.0, PhasePoint(2.0, 0.3)),
        (SineGordon(), 0.5, PhasePoint(math.pi, 2.0)),
        (SineGordon(), 2.0, PhasePoint(0.5, 0.1)),
    ],
)
def test_energy_conserved_over_long_runs(model, v, start):
    orb = integrate_orbit(model, v, start, (0.0, 100.0))
    H = orb.energies()
    assert not orb.escaped
    assert np.max(np.abs(H - H[0])) <= 1e-8


@pytest.mark.parametrize(
    "model, v, start, span",
    [
        (KdV(A=1.0), 1.0, PhasePoint(1.0, 0.2), 10.0),
        (SineGordon(), 0.0, PhasePoint(2.0, 0.3), 10.0),
        # dissipative flows contract forward, so the backward leg amplifies error; shorter span
        (FisherKPP(D=1.0, k=6.0), 5.0, PhasePoint(0.5, -0.1), 2.0),
        (Burgers(D=1.0, u1=0.0, u2=1.0), 0.5, PhasePoint(0.6, -0.05), 10.0),
    ],
)
def test_forward_backward_reversibility(model, v, start, span):
    fwd = integrate_orbit(model, v, start, (0.0, span), n_samples=11)
    back = integrate_orbit(model, v, fwd.end, (span, 0.0), n_samples=11)
    assert back.z[0] == 0.0 and back.z[-1] == span
    assert abs(back.u[0] - start.u) <= 1e-6
    assert abs(back.p[0] - start.p) <= 1e-6


def test_integrate_orbit_flags_escape():
    orb = integrate_orbit(KdV(A=1.0), 1.0, PhasePoint(3.5, 0.0), (0.0, 50.0), bound=100.0)
    assert orb.escaped


def test_integrate_orbit_rejects_empty_span():
    with pytest.raises(ParameterError):
        integrate_orbit(KdV(), 1.0, PhasePoint(1.0, 0.0), (2.0, 2.0))


@settings(max_examples=25, deadline=None)
@given(
    u=st.floats(0.2, 2.8),
    p=st.floats(-0.3, 0.3),
    span=st.floats(1.0, 30.0),
)
def test_kdv_energy_conservation_property(u, p, span):
    model = KdV(A=1.0)
    start = PhasePoint(u, p)
    if hamiltonian(model, 1.0, start) >= 0.0:
        return  # outside the saddle loop orbits are unbounded
    orb = integrate_orbit(model, 1.0, start, (0.0, span), n_samples=201)
    H = orb.energies()
    assert np.max(np.abs(H - H[0])) <= 1e-8


def test_separatrix_kdv_crest():
    orb = trace_separatrix(KdV(A=1.0), 1.0)
    assert orb.closed
    assert orb.u.max() == pytest.approx(3.0, abs=1e-4)
    assert np.max(np.abs(orb.energies())) <= 1e-6


def test_separatrix_sg_top_halfloop():
    orb = trace_separatrix(SineGordon(), 0.5, "top")
    assert np.abs(orb.p).max() == pytest.approx(4.0 / math.sqrt(3.0), abs=1e-4)
    assert orb.u[0] == pytest.approx(0.0, abs=1e-6)
    assert orb.u[-1] == pytest.approx(2 * math.pi, abs=1e-4)
    H0 = hamiltonian(SineGordon(), 0.5, PhasePoint(0.0, 0.0))
    assert np.max(np.abs(orb.energies() - H0)) <= 1e-6


def test_separatrix_sg_bottom_is_mirror():
    top = trace_separatrix(SineGordon(), 0.0, "top")
    bottom = trace_separatrix(SineGordon(), 0.0, "bottom")
    assert np.all(bottom.p <= 1e-9)
    assert np.max(np.abs(bottom.p)) == pytest.approx(np.max(np.abs(top.p)), rel=1e-6)


def test_separatrix_failure_is_reported():
    with pytest.raises(NumericalError, match="separatrix not closed") as info:
        trace_separatrix(KdV(A=1.0), 1.0, z_budget=5.0)
    assert "min_distance_to_target" in info.value.details


def test_separatrix_rejects_bad_selector():
    with pytest.raises(ParameterError):
        trace_separatrix(KdV(A=1.0), 1.0, "top")


def _closed_form_gap(model, v, loop=None):
    """Max |u_orbit - u_exact| after aligning the orbit's centre with the profile's."""
    orb = trace_separatrix(model, v, loop)
    wave = closed_form_profile(model, v, branch=orb.info["branch"])
    if isinstance(model, KdV):
        # crest: p changes sign from + to -
        i = int(np.argmax(np.abs(orb.u)))
        j = i if orb.p[i] * orb.p[i - 1] <= 0 else i + 1
        z_star = orb.z[j - 1] - orb.p[j - 1] * (orb.z[j] - orb.z[j - 1]) / (orb.p[j] - orb.p[j - 1])
        u_mid = wave.derivatives(0.0, 0)[0]
    else:
        left, right = boundary_limits(wave)
        u_mid = float(eval_profile(wave, 0.0)[0])
        s = (orb.u - u_mid) * math.copysign(1.0, right - left)
        j = int(np.argmax(s > 0))
        z_star = orb.z[j - 1] - s[j - 1] * (orb.z[j] - orb.z[j - 1]) / (s[j] - s[j - 1])
    u_exact, p_exact = eval_profile(wave, orb.z - z_star)
    scale = wave.amplitude_range
    return (np.max(np.abs(orb.u - u_exact)) / scale, np.max(np.abs(orb.p - p_exact)) / scale)


@pytest.mark.parametrize(
    "model, v, loop",
    [
        (KdV(A=1.0), 1.0, None),
        (KdV(A=-0.5), 2.0, None),
        (SineGordon(), 0.0, "top"),
        (SineGordon(), -0.7, "bottom"),
        (FisherKPP(D=1.0, k=6.0), "auto", "decreasing"),
        (FisherKPP(D=1.0, k=6.0), "auto", "increasing"),
        (Burgers(D=1.0, u1=0.0, u2=1.0), "auto", None),
        (Burgers(D=0.5, u1=-1.0, u2=2.0), "auto", None),
    ],
)
def test_separatrix_matches_closed_form(model, v, loop):
    du, dp = _closed_form_gap(model, v, loop)
    assert du <= 1e-5
    assert dp <= 1e-5


def test_orbit_csv_columns(tmp_path):
    orb = integrate_orbit(KdV(), 1.0, PhasePoint(1.0, 0.0), (0.0, 1.0), n_samples=5)
    path = tmp_path / "o.csv"
    orb.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "z,u,p,H"
    assert len(lines) == 6
    orb2 = integrate_orbit(FisherKPP(), 5.0, PhasePoint(0.5, 0.0), (0.0, 1.0), n_samples=5)
    orb2.to_csv(path)
    assert path.read_text().splitlines()[0] == "z,u,p"
