"""Traveling-wave reductions as first-order systems in the phase plane (u, p = du/dz).

With z = x - v t each PDE becomes u'' = f(u, p):

    KdV      f = v u - (A/2) u^2
    SG       f = -sin(u) / (v^2 - 1)
    KPP      f = -(v p + k u (1 - u)) / D
    Burgers  f = (u - v) p / D

KdV and SG are Hamiltonian; the solitary waves are the homoclinic loop
(KdV) and the heteroclinic halfloops (SG, KPP, Burgers) through saddles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np
from scipy.integrate import solve_ivp

from actionwave import defaults
from actionwave.errors import NumericalError, ParameterError
from actionwave.io import write_csv
from actionwave.models import (
    Burgers,
    FisherKPP,
    KdV,
    ModelSpec,
    SineGordon,
    boundary_limits,
    closed_form_profile,
)


@dataclass(frozen=True)
class PhasePoint:
    u: float
    p: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.u) and math.isfinite(self.p)):
            raise ParameterError("phase point must be finite", u=self.u, p=self.p)

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.p], dtype=float)


@dataclass(frozen=True)
class Equilibrium:
    point: PhasePoint
    kind: str
    eigenvalues: tuple[complex, complex]


@dataclass(frozen=True, eq=False)
class Orbit:
    """Phase-plane trajectory sampled at strictly increasing z."""

    model: ModelSpec
    v: float
    z: np.ndarray
    u: np.ndarray
    p: np.ndarray
    closed: bool = False
    energy: float | None = None
    escaped: bool = False
    info: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.z)

    @property
    def start(self) -> PhasePoint:
        return PhasePoint(float(self.u[0]), float(self.p[0]))

    @property
    def end(self) -> PhasePoint:
        return PhasePoint(float(self.u[-1]), float(self.p[-1]))

    def energies(self) -> np.ndarray | None:
        if not is_hamiltonian(self.model):
            return None
        return hamiltonian(self.model, self.v, self.u, self.p)

    def to_csv(self, target: str | Path | IO[str]) -> None:
        cols = [self.z, self.u, self.p]
        header = ["z", "u", "p"]
        h = self.energies()
        if h is not None:
            cols.append(h)
            header.append("H")
        write_csv(target, header, cols)


def _check_reduction(model: ModelSpec, v: float) -> float:
    v = float(v)
    if not math.isfinite(v):
        raise ParameterError("v must be finite", v=v)
    if isinstance(model, SineGordon) and v * v == 1.0:
        raise ParameterError("singular reduction: sine-Gordon needs v^2 != 1", v=v)
    return v


def _f(model: ModelSpec, v: float, u, p):
    if isinstance(model, KdV):
        return v * u - 0.5 * model.A * u * u
    if isinstance(model, SineGordon):
        return -np.sin(u) / (v * v - 1.0)
    if isinstance(model, FisherKPP):
        return -(v * p + model.k * u * (1.0 - u)) / model.D
    if isinstance(model, Burgers):
        return (u - v) * p / model.D
    raise ParameterError(f"not a model: {model!r}")


def tw_ode_rhs(model: ModelSpec, v: float, s: PhasePoint | np.ndarray) -> tuple:
    """Right-hand side ``(du/dz, dp/dz)`` of the reduced system at ``s``."""
    v = _check_reduction(model, v)
    if isinstance(s, PhasePoint):
        u, p = s.u, s.p
    else:
        u, p = np.asarray(s, dtype=float)
    return p, _f(model, v, u, p)


def is_hamiltonian(model: ModelSpec) -> bool:
    return isinstance(model, (KdV, SineGordon))


def hamiltonian(model: ModelSpec, v: float, u, p=None):
    """Conserved energy of the KdV or SG reduction.

    Called as ``hamiltonian(model, v, PhasePoint)`` or with separate ``u, p``
    arrays.
    """
    if isinstance(u, PhasePoint):
        u, p = u.u, u.p
    v = _check_reduction(model, v)
    if isinstance(model, KdV):
        return 0.5 * (p * p - v * u * u + model.A * u**3 / 3.0)
    if isinstance(model, SineGordon):
        return 0.5 * p * p - np.cos(u) / (v * v - 1.0)
    raise ParameterError(
        f"not Hamiltonian: the {model.name} reduction has a first-derivative term",
        model=model.name,
    )


def jacobian(model: ModelSpec, v: float, u: float, p: float = 0.0) -> np.ndarray:
    v = _check_reduction(model, v)
    if isinstance(model, KdV):
        fu, fp = v - model.A * u, 0.0
    elif isinstance(model, SineGordon):
        fu, fp = -math.cos(u) / (v * v - 1.0), 0.0
    elif isinstance(model, FisherKPP):
        fu, fp = -model.k * (1.0 - 2.0 * u) / model.D, -v / model.D
    else:
        fu, fp = p / model.D, (u - v) / model.D
    return np.array([[0.0, 1.0], [fu, fp]])


def classify(eigenvalues: np.ndarray) -> str:
    re = eigenvalues.real
    im = eigenvalues.imag
    tol = defaults.CENTER_RE_TOL
    if np.all(np.abs(re) < tol) and np.any(im != 0.0):
        return "center"
    if np.all(im == 0.0) and re.min() < 0.0 < re.max():
        return "saddle"
    if re.max() <= tol and re.min() < 0.0:
        return "stable-node/focus"
    return "unstable-node/focus"


def _equilibrium_u(model: ModelSpec, v: float, lo: float, hi: float) -> list[float]:
    if isinstance(model, KdV):
        roots = [0.0, 2.0 * v / model.A]
    elif isinstance(model, SineGordon):
        roots = [n * math.pi for n in range(math.ceil(lo / math.pi), math.floor(hi / math.pi) + 1)]
    elif isinstance(model, FisherKPP):
        roots = [0.0, 1.0]
    else:
        # p = 0 is a whole line of rest points; the front's end states are the ones reported
        roots = [model.u1, model.u2]
    return sorted({r for r in roots if lo <= r <= hi})


def equilibria(model: ModelSpec, v: float, window: tuple[float, float]) -> list[Equilibrium]:
    """Rest points ``(u*, 0)`` with ``u*`` in ``window``, classified by their Jacobian."""
    v = _check_reduction(model, v)
    lo, hi = sorted(float(w) for w in window)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ParameterError("window must be finite", window=window)
    out = []
    for u in _equilibrium_u(model, v, lo, hi):
        lam = np.linalg.eigvals(jacobian(model, v, u))
        lam = np.sort_complex(lam)
        out.append(
            Equilibrium(
                point=PhasePoint(u, 0.0),
                kind=classify(lam),
                eigenvalues=(complex(lam[0]), complex(lam[1])),
            )
        )
    return out


def amplitude_scale(model: ModelSpec, v: float) -> float:
    if isinstance(model, KdV):
        return max(1.0, abs(3.0 * v / model.A))
    if isinstance(model, SineGordon):
        return 2.0 * math.pi
    if isinstance(model, Burgers):
        return max(1.0, abs(model.u1), abs(model.u2))
    return 1.0


def _system(model: ModelSpec, v: float):
    def rhs(_z, y):
        return [y[1], _f(model, v, y[0], y[1])]

    return rhs


def _blowup_event(bound: float):
    def event(_z, y):
        return bound - max(abs(y[0]), abs(y[1]))

    event.terminal = True
    event.direction = -1
    return event


def _solve(model, v, y0, z_span, rtol, atol, events=(), max_step=np.inf):
    sol = solve_ivp(
        _system(model, v),
        z_span,
        np.asarray(y0, dtype=float),
        method=defaults.ODE_METHOD,
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=list(events) or None,
        max_step=max_step,
    )
    if sol.status < 0:
        raise NumericalError(f"ODE integration failed: {sol.message}", z=float(sol.t[-1]))
    return sol


def _sample(sol, z_from: float, z_to: float, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    z = np.linspace(z_from, z_to, n)
    y = sol.sol(z)
    return z, y[0], y[1]


def integrate_orbit(
    model: ModelSpec,
    v: float,
    start: PhasePoint,
    z_span: tuple[float, float] = (0.0, 40.0),
    *,
    rtol: float = defaults.ODE_RTOL,
    atol: float = defaults.ODE_ATOL,
    bound: float | None = None,
    n_samples: int = defaults.ORBIT_SAMPLES,
) -> Orbit:
    """Integrate the reduction from ``start`` over ``z_span`` (may run backwards).

    Samples are resampled from the dense output onto a uniform grid in z and
    returned with z increasing. Leaving the box ``max(|u|, |p|) <= bound``
    truncates the run and sets ``escaped``.
    """
    v = _check_reduction(model, v)
    if bound is None:
        bound = defaults.BLOWUP_FACTOR * amplitude_scale(model, v)
    z0, z1 = map(float, z_span)
    if z0 == z1:
        raise ParameterError("z span must be non-empty", z_span=z_span)
    sol = _solve(model, v, start.as_array(), (z0, z1), rtol, atol, events=[_blowup_event(bound)])
    escaped = bool(sol.t_events[0].size)
    z_end = float(sol.t[-1])
    z, u, p = _sample(sol, z0, z_end, n_samples)
    if z_end < z0:
        z, u, p = z[::-1], u[::-1], p[::-1]
    energy = float(hamiltonian(model, v, start)) if is_hamiltonian(model) else None
    return Orbit(model, v, z, u, p, closed=False, energy=energy, escaped=escaped,
                 info={"z_end": z_end, "nfev": int(sol.nfev)})


def _nearest_center(model: ModelSpec, v: float, u: float) -> Equilibrium:
    centers = [e for e in equilibria(model, v, (u - 10.0, u + 10.0)) if e.kind == "center"]
    if not centers:
        raise ParameterError("no center equilibrium near the start point", u=u)
    return min(centers, key=lambda e: abs(e.point.u - u))


def periodic_orbit(
    model: ModelSpec,
    v: float,
    start: PhasePoint,
    *,
    z_max: float = 1000.0,
    rtol: float = defaults.CLOSED_ORBIT_RTOL,
    atol: float = defaults.CLOSED_ORBIT_ATOL,
    n_samples: int = defaults.CLOSED_ORBIT_SAMPLES,
    closure_tol: float = 1e-7,
) -> Orbit:
    """One full circuit of the closed orbit through ``start`` around a center.

    The circuit runs between two successive upward crossings of the vertical
    line through the center, so the returned samples begin there rather than
    at ``start`` itself.
    """
    v = _check_reduction(model, v)
    center = _nearest_center(model, v, start.u)
    uc = center.point.u
    omega_lin = abs(center.eigenvalues[0].imag)
    y0 = start.as_array()
    if np.hypot(y0[0] - uc, y0[1]) == 0.0:
        period = 2.0 * math.pi / omega_lin
        z = np.linspace(0.0, period, n_samples)
        u = np.full_like(z, uc)
        p = np.zeros_like(z)
        return Orbit(model, v, z, u, p, closed=True,
                     energy=float(hamiltonian(model, v, center.point)), info={"center": uc})

    def section(_z, y):
        return y[0] - uc

    section.terminal = 2
    section.direction = 1
    sol = _solve(model, v, y0, (0.0, z_max), rtol, atol,
                 events=[section, _blowup_event(defaults.BLOWUP_FACTOR * amplitude_scale(model, v))])
    hits = sol.t_events[0]
    if hits.size < 2:
        raise NumericalError("orbit not closed within the z budget", z_max=z_max, crossings=int(hits.size))
    z, u, p = _sample(sol, float(hits[0]), float(hits[1]), n_samples)
    gap = math.hypot(u[-1] - u[0], p[-1] - p[0])
    return Orbit(model, v, z - z[0], u, p, closed=gap <= closure_tol,
                 energy=float(hamiltonian(model, v, start)),
                 info={"center": uc, "closure_gap": gap})


def _loop_branch(model: ModelSpec, loop: str | None) -> str | None:
    if loop is None or loop in ("auto", "loop"):
        return None
    if isinstance(model, SineGordon):
        names = {"top": "kink", "kink": "kink", "bottom": "antikink", "antikink": "antikink"}
        if loop not in names:
            raise ParameterError(f"unknown loop selector {loop!r}", loop=loop)
        return names[loop]
    if isinstance(model, FisherKPP) and loop in ("decreasing", "increasing"):
        return loop
    raise ParameterError(f"loop selector {loop!r} does not apply to {model.name}", loop=loop)


def _unit_eigvec(model, v, u, want_sign: int, toward: float) -> tuple[float, np.ndarray]:
    """Eigenpair at (u, 0) with real eigenvalue of sign ``want_sign``, oriented toward ``toward``."""
    lam, vecs = np.linalg.eig(jacobian(model, v, u))
    cands = [i for i in range(2) if abs(lam[i].imag) == 0.0 and np.sign(lam[i].real) == want_sign]
    if not cands:
        raise NumericalError("no saddle found", u=u, eigenvalues=[complex(x) for x in lam])
    i = max(cands, key=lambda j: abs(lam[j].real))
    vec = np.real(vecs[:, i])
    vec /= np.linalg.norm(vec)
    if vec[0] * (toward - u) < 0.0:
        vec = -vec
    return float(lam[i].real), vec


def trace_separatrix(
    model: ModelSpec,
    v: float | str = "auto",
    loop: str | None = None,
    *,
    radius: float = defaults.SEPARATRIX_RADIUS,
    z_budget: float | None = None,
    rtol: float = defaults.SEPARATRIX_RTOL,
    atol: float = defaults.SEPARATRIX_ATOL,
    n_samples: int = defaults.ORBIT_SAMPLES,
) -> Orbit:
    """Shoot along a saddle's unstable (or stable) manifold to trace the solitary-wave orbit.

    KdV gives the homoclinic loop returning to the saddle at the origin;
    SG, KPP and Burgers give the halfloop between the two end states. When
    the end state at z -> -inf is not a saddle (the KPP front with a < 0)
    the stable manifold of the far saddle is integrated backwards instead.
    """
    wave = closed_form_profile(model, v, branch=_loop_branch(model, loop))
    v = wave.v
    source, target = boundary_limits(wave)
    homoclinic = source == target
    toward = 3.0 * v / model.A if homoclinic else target

    src_kind = classify(np.linalg.eigvals(jacobian(model, v, source)))
    tgt_kind = classify(np.linalg.eigvals(jacobian(model, v, target)))
    # prefer a saddle endpoint; Burgers has none and leaves its degenerate source node
    if src_kind == "saddle" or (src_kind == "unstable-node/focus" and tgt_kind != "saddle"):
        anchor, goal, sign, direction = source, target, 1, 1.0
        seed_toward = toward
    elif tgt_kind == "saddle":
        anchor, goal, sign, direction = target, source, -1, -1.0
        seed_toward = source
    else:
        raise NumericalError("no saddle found", source=source, target=target)

    _, vec = _unit_eigvec(model, v, anchor, sign, seed_toward)
    delta = defaults.SEPARATRIX_DELTA * max(1.0, abs(anchor))
    y0 = np.array([anchor, 0.0]) + delta * vec

    if z_budget is None:
        z_budget = defaults.SEPARATRIX_BUDGET_DECAY_LENGTHS * wave.decay_length

    def arrive(_z, y):
        return math.hypot(y[0] - goal, y[1]) - radius

    arrive.terminal = True
    arrive.direction = -1
    bound = defaults.BLOWUP_FACTOR * amplitude_scale(model, v)
    sol = _solve(model, v, y0, (0.0, direction * z_budget), rtol, atol,
                 events=[arrive, _blowup_event(bound)])
    if not sol.t_events[0].size:
        y_end = sol.y[:, -1]
        dist = np.hypot(sol.y[0] - goal, sol.y[1])
        raise NumericalError(
            "separatrix not closed",
            model=model.name,
            v=v,
            z_reached=float(sol.t[-1]),
            min_distance_to_target=float(dist.min()),
            end_point=[float(y_end[0]), float(y_end[1])],
            escaped=bool(sol.t_events[1].size),
        )
    z_end = float(sol.t_events[0][0])
    z, u, p = _sample(sol, 0.0, z_end, n_samples)
    if direction < 0:
        z, u, p = z[::-1] - z_end, u[::-1], p[::-1]
    energy = None
    if is_hamiltonian(model):
        energy = float(hamiltonian(model, v, anchor, 0.0))
    gap = math.hypot(u[-1] - u[0], p[-1] - p[0])
    return Orbit(
        model, v, z, u, p,
        closed=homoclinic and gap <= radius + 2.0 * delta,
        energy=energy,
        info={"branch": wave.branch, "source": source, "target": target,
              "delta": delta, "radius": radius, "closure_gap": gap},
    )
