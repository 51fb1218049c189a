"""Action of solitary waves and of closed phase-plane orbits, plus the action-angle flow.

For a solitary wave the action is the profile integral

    I = (1/2 pi) * integral over the real line of (du/dz)^2 dz,

and for a closed orbit of a Hamiltonian reduction it is (1/2 pi) times the
loop integral of p du, i.e. the enclosed phase-plane area over 2 pi.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from shapely.geometry import LinearRing

from actionwave import defaults
from actionwave.errors import NumericalError, ParameterError
from actionwave.models import (
    Burgers,
    FisherKPP,
    KdV,
    ModelSpec,
    SineGordon,
    TravelingWave,
    admissible_speed,
)
from actionwave.reduction import Orbit

INV_TWO_PI = 1.0 / (2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureEstimate:
    value: float
    abs_error_estimate: float
    half_width: float
    nodes: int
    truncation_error: float = 0.0
    discretization_error: float = 0.0


@dataclass(frozen=True)
class ActionAngle:
    I: float
    theta: float
    rate: float


@dataclass(frozen=True)
class ClosedOrbitAction:
    I: float
    period: float
    omega0: float
    I_area: float
    discrepancy: float


def _slope_squared(wave: TravelingWave):
    def g(z):
        du = wave.derivatives(z, 1)[1]
        return du * du

    return g


def action_profile(
    wave: TravelingWave,
    *,
    abs_tol: float = defaults.QUAD_ABS_TOL,
    rel_tol: float = defaults.QUAD_REL_TOL,
    tail_rel: float = defaults.QUAD_TAIL_REL,
    limit: int = defaults.QUAD_MAX_SUBINTERVALS,
) -> QuadratureEstimate:
    """Action of a solitary wave by adaptive quadrature on a truncated window.

    The window ``[z0 - L, z0 + L]`` grows until the exponential tail bound
    ``(u'(+-L))^2 / (2 * decay_rate)`` drops below ``tail_rel`` times the
    running value.
    """
    g = _slope_squared(wave)
    rate = wave.decay_rate
    c = wave.z0
    half = defaults.QUAD_INITIAL_HALF_WIDTH / rate
    nodes = 0
    for _ in range(60):
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                val, err, info = quad(g, c - half, c + half, points=[c], epsabs=abs_tol * 2 * math.pi,
                                      epsrel=rel_tol, limit=limit, full_output=True)
            except IntegrationWarning as exc:
                raise NumericalError("quadrature did not converge", detail=str(exc), half_width=half) from exc
        nodes = int(info["neval"])
        tail = (float(g(c - half)) + float(g(c + half))) / (2.0 * rate)
        if tail <= tail_rel * abs(val):
            break
        half *= 1.5
    else:
        raise NumericalError("tail did not decay below tolerance", half_width=half, tail=tail)

    value = val * INV_TWO_PI
    err_d = err * INV_TWO_PI
    err_t = tail * INV_TWO_PI
    total = err_d + err_t
    if total > max(abs_tol, rel_tol * abs(value)):
        raise NumericalError(
            "quadrature error estimate above tolerance",
            value=value,
            abs_error_estimate=total,
            abs_tol=abs_tol,
            nodes=nodes,
        )
    return QuadratureEstimate(
        value=value,
        abs_error_estimate=total,
        half_width=half,
        nodes=nodes,
        truncation_error=err_t,
        discretization_error=err_d,
    )


def action_reference(model: ModelSpec, v: float | str = "auto") -> float:
    """Closed-form action of the solitary wave.

    KdV ``12 v^(5/2) / (5 pi A^2)``, SG ``4 / (pi sqrt(1 - v^2))``,
    KPP ``|a| / (10 pi)`` and Burgers ``(u2 - u1)^3 / (24 pi D)``.
    """
    v = admissible_speed(model, v)
    if isinstance(model, KdV):
        return 12.0 * v**2.5 / (5.0 * math.pi * model.A**2)
    if isinstance(model, SineGordon):
        return 4.0 / (math.pi * math.sqrt(1.0 - v * v))
    if isinstance(model, FisherKPP):
        return abs(v / (5.0 * model.D)) / (10.0 * math.pi)
    if isinstance(model, Burgers):
        return (model.u2 - model.u1) ** 3 / (24.0 * math.pi * model.D)
    raise ParameterError(f"not a model: {model!r}")


def _shoelace(u: np.ndarray, p: np.ndarray) -> float:
    return 0.5 * float(np.dot(u, np.roll(p, -1)) - np.dot(np.roll(u, -1), p))


def action_closed_orbit(orbit: Orbit, *, check_simple: bool = True) -> ClosedOrbitAction:
    """Action, period and angular frequency of one circuit of a closed orbit.

    The returned ``I`` is the loop integral of p du taken along the samples
    in their z parametrisation (p du = p^2 dz); ``I_area`` is the shoelace
    area of the sample polygon over 2 pi. Their difference is reported as
    ``discrepancy``.
    """
    if not orbit.closed:
        raise ParameterError("orbit is not closed", closure_gap=orbit.info.get("closure_gap"))
    z, u, p = orbit.z, orbit.u, orbit.p
    period = float(z[-1] - z[0])
    omega0 = 2.0 * math.pi / period if period > 0.0 else math.inf
    if np.ptp(u) == 0.0 and np.ptp(p) == 0.0:
        return ClosedOrbitAction(0.0, period, omega0, 0.0, 0.0)

    line = float(np.trapezoid(p * p, z)) * INV_TWO_PI

    uu, pp = u, p
    scale = max(np.ptp(u), np.ptp(p))
    if math.hypot(u[-1] - u[0], p[-1] - p[0]) <= 1e-7 * scale:
        uu, pp = u[:-1], p[:-1]
    # traversal with z increasing is clockwise, so the signed area is negative
    area = -_shoelace(uu, pp) * INV_TWO_PI
    if check_simple and not LinearRing(np.column_stack([uu, pp])).is_simple:
        raise NumericalError("orbit sample polygon self-intersects", samples=len(uu))
    return ClosedOrbitAction(
        I=line,
        period=period,
        omega0=omega0,
        I_area=area,
        discrepancy=abs(line - area),
    )


def action_angle_flow(I: float, v: float, z0: float, z: float) -> ActionAngle:
    """Linear flow dI/dz = 0, d(theta)/dz = v with theta(z0) = 0."""
    for name, x in (("I", I), ("v", v), ("z0", z0), ("z", z)):
        if not math.isfinite(x):
            raise ParameterError(f"{name} must be finite", **{name: x})
    if I < 0.0:
        raise ParameterError("action must be >= 0", I=I)
    return ActionAngle(I=float(I), theta=float(v) * (float(z) - float(z0)), rate=float(v))


def action_report(wave: TravelingWave, estimate: QuadratureEstimate | None = None) -> dict:
    """JSON-ready record comparing the numerical and closed-form action."""
    if estimate is None:
        estimate = action_profile(wave)
    ref = action_reference(wave.model, wave.v)
    abs_err = abs(estimate.value - ref)
    return {
        "model": wave.model.name,
        "params": wave.model.params(),
        "v": wave.v,
        "z0": wave.z0,
        "branch": wave.branch,
        "I_numeric": estimate.value,
        "I_reference": ref,
        "abs_error": abs_err,
        "rel_error": abs_err / ref,
        "error_estimate": estimate.abs_error_estimate,
        "L": estimate.half_width,
        "nodes": estimate.nodes,
    }
