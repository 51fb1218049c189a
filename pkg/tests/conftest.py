import math

import numpy as np
import pytest

from actionwave.models import make_model


def trapezoid_action(du_dz, half_width=40.0, nodes=10**6 + 1):
    """Brute-force oracle: (1/2pi) * trapezoid of du_dz(z)**2 on a uniform grid."""
    z = np.linspace(-half_width, half_width, nodes)
    g = du_dz(z) ** 2
    return float(np.trapezoid(g, z)) / (2.0 * math.pi)


def central_difference(f, z, h=1e-6):
    return (f(z + h) - f(z - h)) / (2.0 * h)


@pytest.fixture
def kdv():
    return make_model("kdv", A=1.0)


@pytest.fixture
def sg():
    return make_model("sg")


@pytest.fixture
def kpp():
    return make_model("kpp", D=1.0, k=6.0)


@pytest.fixture
def burgers():
    return make_model("burgers", D=1.0, u1=0.0, u2=1.0)


_VERIFY_CACHE = {}


def default_verify(name):
    """Default-grid verification run of the acceptance wave for ``name`` (cached per session)."""
    from actionwave.models import closed_form_profile
    from actionwave.pde_verify import verify_wave

    if name not in _VERIFY_CACHE:
        model = {
            "kdv": make_model("kdv", A=1.0),
            "sg": make_model("sg"),
            "kpp": make_model("kpp", D=1.0, k=6.0),
            "burgers": make_model("burgers", D=1.0, u1=0.0, u2=1.0),
        }[name]
        v = {"kdv": 1.0, "sg": 0.5}.get(name, "auto")
        _VERIFY_CACHE[name] = verify_wave(closed_form_profile(model, v))
    return _VERIFY_CACHE[name]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
