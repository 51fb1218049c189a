"""Direct PDE evolution of the closed-form waves.

A run starts from the closed-form profile, evolves the full equation and
checks that the wave translates rigidly at its speed with constant action.

Schemes
-------
KdV      periodic; 4th-order central differences, classical RK4
SG       clamped edges; 2nd-order Laplacian, leapfrog (velocity Verlet form)
KPP      clamped edges; 2nd-order central differences, RK4
Burgers  clamped edges; 2nd-order central differences, RK4
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from actionwave import defaults
from actionwave.action import action_reference
from actionwave.errors import NumericalError, ParameterError
from actionwave.io import write_csv, write_json
from actionwave.models import (
    Burgers,
    FisherKPP,
    KdV,
    ModelSpec,
    SineGordon,
    TravelingWave,
    boundary_limits,
)

# Spectral radii (times dx^n) of the 4th-order periodic first/third-derivative stencils.
_D1_RADIUS = 1.3722219796173216
_D3_RADIUS = 4.608742208219353
_RK4_IMAG_LIMIT = 2.0 * math.sqrt(2.0)
_RK4_REAL_LIMIT = 2.785


@dataclass(frozen=True, eq=False)
class Field1D:
    """Samples of u (and u_t for sine-Gordon) on x = x0 + i*dx at time t."""

    u: np.ndarray
    dx: float
    x0: float = 0.0
    t: float = 0.0
    bc: str = "periodic"
    ut: np.ndarray | None = None
    limits: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "u", u)
        if u.ndim != 1 or u.size < 16:
            raise ParameterError("field needs at least 16 samples", n=int(u.size))
        if not (self.dx > 0.0 and math.isfinite(self.dx)):
            raise ParameterError("dx must be > 0", dx=self.dx)
        if not np.all(np.isfinite(u)):
            raise ParameterError("field has non-finite samples")
        if self.bc not in ("periodic", "clamped"):
            raise ParameterError(f"unknown boundary condition {self.bc!r}")
        if self.ut is not None:
            ut = np.asarray(self.ut, dtype=float)
            if ut.shape != u.shape or not np.all(np.isfinite(ut)):
                raise ParameterError("u_t must be finite and match u")
            object.__setattr__(self, "ut", ut)
        if self.bc == "clamped":
            if self.limits is None:
                raise ParameterError("clamped field needs boundary limits")
            lo, hi = self.limits
            if abs(u[0] - lo) > 1e-8 or abs(u[-1] - hi) > 1e-8:
                raise ParameterError(
                    "clamped field does not hold its boundary limits",
                    edges=[float(u[0]), float(u[-1])],
                    limits=[lo, hi],
                )

    @property
    def n(self) -> int:
        return self.u.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def length(self) -> float:
        return self.n * self.dx if self.bc == "periodic" else (self.n - 1) * self.dx


@dataclass(frozen=True)
class SpeedMeasurement:
    v_measured: float
    method: str
    fit_residual: float
    positions: tuple[float, ...] = ()
    times: tuple[float, ...] = ()


@dataclass(frozen=True)
class ActionSeries:
    t: np.ndarray
    I: np.ndarray
    drift: float
    relative: bool = True


@dataclass(frozen=True)
class EvolveResult:
    final: Field1D
    snapshots: list[Field1D]
    dt: float
    steps: int


# --- exact-solution residual ---------------------------------------------------


def residual_check(wave: TravelingWave, x, t, v: float | None = None) -> float:
    """Max |PDE left-hand side| of u(x, t) = U(x - v t) built from the closed form.

    ``v`` defaults to the wave's own speed; passing another value checks a
    mis-specified claim against the same shape.
    """
    vc = wave.v if v is None else float(v)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    u, u1, u2, u3 = wave.derivatives(np.asarray(x - vc * t), 3)
    m = wave.model
    if isinstance(m, KdV):
        r = -vc * u1 + m.A * u * u1 + u3
    elif isinstance(m, SineGordon):
        r = vc * vc * u2 + np.sin(u) - u2
    elif isinstance(m, FisherKPP):
        r = -vc * u1 - m.D * u2 - m.k * u * (1.0 - u)
    else:
        r = -vc * u1 + u * u1 - m.D * u2
    return float(np.max(np.abs(r)))


# --- spatial operators -----------------------------------------------------------


def _pad_periodic(u: np.ndarray, w: int) -> np.ndarray:
    return np.concatenate((u[-w:], u, u[:w]))


def d1_periodic(f: np.ndarray, dx: float) -> np.ndarray:
    g = _pad_periodic(f, 2)
    return (g[:-4] - 8.0 * g[1:-3] + 8.0 * g[3:-1] - g[4:]) / (12.0 * dx)


def d3_periodic(f: np.ndarray, dx: float) -> np.ndarray:
    g = _pad_periodic(f, 3)
    return (
        g[:-6] - 8.0 * g[1:-5] + 13.0 * g[2:-4] - 13.0 * g[4:-2] + 8.0 * g[5:-1] - g[6:]
    ) / (8.0 * dx**3)


def _laplacian_interior(u: np.ndarray, dx: float) -> np.ndarray:
    out = np.zeros_like(u)
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (dx * dx)
    return out


def _ddx_interior(f: np.ndarray, dx: float) -> np.ndarray:
    out = np.zeros_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    return out


def _rhs(model: ModelSpec, dx: float):
    if isinstance(model, KdV):
        half_a = 0.5 * model.A

        def rhs(u):
            return -d1_periodic(half_a * u * u, dx) - d3_periodic(u, dx)

    elif isinstance(model, FisherKPP):
        D, k = model.D, model.k

        def rhs(u):
            r = D * _laplacian_interior(u, dx)
            r[1:-1] += k * u[1:-1] * (1.0 - u[1:-1])
            return r

    elif isinstance(model, Burgers):
        D = model.D

        def rhs(u):
            return D * _laplacian_interior(u, dx) - _ddx_interior(0.5 * u * u, dx)

    else:
        raise ParameterError(f"{model.name} is not integrated with RK4")
    return rhs


# --- stability -------------------------------------------------------------------


def stable_dt(model: ModelSpec, dx: float, umax: float) -> float:
    """Largest time step the model's scheme accepts at spacing ``dx``."""
    umax = abs(umax)
    if isinstance(model, KdV):
        return _RK4_IMAG_LIMIT / (_D3_RADIUS / dx**3 + abs(model.A) * umax * _D1_RADIUS / dx)
    if isinstance(model, SineGordon):
        return dx / math.sqrt(1.0 + 0.25 * dx * dx)
    if isinstance(model, FisherKPP):
        return min(dx * dx / (2.0 * model.D), _RK4_REAL_LIMIT / (model.k * max(1.0, 2.0 * umax - 1.0)))
    return min(dx * dx / (2.0 * model.D), 2.0 * dx / umax if umax > 0 else math.inf)


# --- evolution -------------------------------------------------------------------


def _check_field(model: ModelSpec, field: Field1D) -> None:
    if isinstance(model, KdV) and field.bc != "periodic":
        raise ParameterError("KdV runs use a periodic domain")
    if not isinstance(model, KdV) and field.bc != "clamped":
        raise ParameterError(f"{model.name} runs use clamped edges")
    if isinstance(model, SineGordon) and field.ut is None:
        raise ParameterError("sine-Gordon field needs u_t samples")


def evolve(
    model: ModelSpec,
    field: Field1D,
    dt: float,
    T: float,
    n_snapshots: int = defaults.PDE_SNAPSHOTS,
) -> EvolveResult:
    """Advance ``field`` by time ``T`` and return the final state plus snapshots.

    ``dt`` is shrunk so that ``n_snapshots`` equally spaced snapshots (both
    ends included) land on step boundaries. Exceeding the scheme's stability
    bound is rejected before any step is taken.
    """
    _check_field(model, field)
    if not (T > 0.0 and math.isfinite(T)):
        raise ParameterError("T must be > 0", T=T)
    if n_snapshots < 2:
        raise ParameterError("need at least 2 snapshots", n_snapshots=n_snapshots)
    u0 = field.u
    bound = stable_dt(model, field.dx, float(np.max(np.abs(u0))))
    if not dt > 0.0:
        raise ParameterError("dt must be > 0", dt=dt)
    if dt > bound:
        raise ParameterError("CFL violation: dt exceeds the stability bound", dt=dt, dt_max=bound)

    intervals = n_snapshots - 1
    per = max(1, math.ceil(T / (dt * intervals)))
    steps = per * intervals
    h = T / steps
    scale = max(float(np.ptp(u0)), float(np.max(np.abs(u0))))
    limit = defaults.PDE_INSTABILITY_FACTOR * scale

    snaps = [field]
    if isinstance(model, SineGordon):
        stepper = _leapfrog(field, h)
    else:
        stepper = _rk4(model, field, h)
    u = u0
    ut = field.ut
    for j in range(1, intervals + 1):
        # blow-up is caught below, so overflow inside a step is not an error in itself
        with np.errstate(over="ignore", invalid="ignore"):
            u, ut = stepper(per)
        amax = float(np.max(np.abs(u)))
        if not math.isfinite(amax) or amax > limit:
            raise NumericalError(
                "instability: field grew beyond the allowed range",
                t=field.t + j * per * h,
                max_abs=amax,
                limit=limit,
                dt=h,
            )
        snaps.append(replace(field, u=u.copy(), t=field.t + T * j / intervals,
                             ut=None if ut is None else ut.copy()))
    return EvolveResult(final=snaps[-1], snapshots=snaps, dt=h, steps=steps)


def _rk4(model: ModelSpec, field: Field1D, h: float):
    rhs = _rhs(model, field.dx)
    u = field.u.copy()

    def advance(nsteps: int):
        nonlocal u
        for _ in range(nsteps):
            k1 = rhs(u)
            k2 = rhs(u + 0.5 * h * k1)
            k3 = rhs(u + 0.5 * h * k2)
            k4 = rhs(u + h * k3)
            u = u + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        return u, None

    return advance


def _leapfrog(field: Field1D, h: float):
    dx = field.dx
    u = field.u.copy()
    ut = field.ut.copy()

    def accel(w):
        a = _laplacian_interior(w, dx)
        a[1:-1] -= np.sin(w[1:-1])
        return a

    a = accel(u)

    def advance(nsteps: int):
        nonlocal u, ut, a
        for _ in range(nsteps):
            ut = ut + 0.5 * h * a
            u = u + h * ut
            a = accel(u)
            ut = ut + 0.5 * h * a
        return u, ut

    return advance


# --- diagnostics -----------------------------------------------------------------


def _front_position(f: Field1D, mid: float) -> float:
    d = f.u - mid
    idx = np.nonzero(np.signbit(d[:-1]) != np.signbit(d[1:]))[0]
    if idx.size == 0:
        raise NumericalError("feature not trackable: no mid-level crossing", t=f.t, level=mid)
    # the crossing nearest the centre of mass of |u'| is the front
    slope = np.abs(np.diff(f.u))
    centre = np.sum(slope * np.arange(slope.size)) / np.sum(slope)
    i = int(idx[np.argmin(np.abs(idx - centre))])
    frac = d[i] / (d[i] - d[i + 1])
    return f.x0 + (i + frac) * f.dx


def _pulse_position(f: Field1D, background: float) -> float:
    w = (f.u - background) ** 2
    total = float(np.sum(w))
    if total == 0.0 or total < 1e-24 * f.n:
        raise NumericalError("feature not trackable: flat field", t=f.t)
    x = f.x
    if f.bc == "periodic":
        L = f.length
        phase = np.angle(np.sum(w * np.exp(2j * np.pi * (x - f.x0) / L)))
        return f.x0 + (phase % (2.0 * np.pi)) * L / (2.0 * np.pi)
    return float(np.sum(w * x) / total)


def measure_speed(snapshots: list[Field1D], model: ModelSpec) -> SpeedMeasurement:
    """Least-squares speed of the tracked feature across ``snapshots``.

    KdV tracks the centroid of (u - u_inf)^2 (with periodic unwrapping);
    the fronts track where u crosses the mean of the two edge values.
    """
    if len(snapshots) < 3:
        raise ParameterError("need at least 3 snapshots", n=len(snapshots))
    t = np.array([s.t for s in snapshots])
    if isinstance(model, KdV):
        method = "energy-centroid"
        xs = np.array([_pulse_position(s, 0.0) for s in snapshots])
        if snapshots[0].bc == "periodic":
            L = snapshots[0].length
            xs = xs[0] + np.concatenate(([0.0], np.cumsum((np.diff(xs) + 0.5 * L) % L - 0.5 * L)))
    else:
        method = "level-crossing"
        xs = np.array([_front_position(s, 0.5 * (s.u[0] + s.u[-1])) for s in snapshots])
    slope, icept = np.polyfit(t, xs, 1)
    resid = xs - (slope * t + icept)
    return SpeedMeasurement(
        v_measured=float(slope),
        method=method,
        fit_residual=float(np.sqrt(np.mean(resid * resid))),
        positions=tuple(float(p) for p in xs),
        times=tuple(float(s) for s in t),
    )


def discrete_action(f: Field1D) -> float:
    """(1/2 pi) * sum of squared central-difference slopes * dx; clamped edges excluded."""
    if f.bc == "periodic":
        s = (np.roll(f.u, -1) - np.roll(f.u, 1)) / (2.0 * f.dx)
    else:
        s = (f.u[2:] - f.u[:-2]) / (2.0 * f.dx)
    return float(np.sum(s * s) * f.dx / (2.0 * math.pi))


def action_timeseries(snapshots: list[Field1D], model: ModelSpec | None = None) -> ActionSeries:
    """Discrete action per snapshot and its maximum drift from the first value."""
    base = snapshots[0]
    for s in snapshots[1:]:
        if s.n != base.n or s.dx != base.dx or s.x0 != base.x0:
            raise ParameterError("snapshots must share one grid")
    t = np.array([s.t for s in snapshots])
    I = np.array([discrete_action(s) for s in snapshots])
    dev = float(np.max(np.abs(I - I[0])))
    if I[0] == 0.0:
        return ActionSeries(t, I, dev, relative=False)
    return ActionSeries(t, I, dev / I[0], relative=True)


def translation_error(f: Field1D, wave: TravelingWave) -> float:
    """Max |u - U(x - v t)| over the grid, relative to the wave's amplitude range."""
    exact = wave.derivatives(f.x - wave.v * f.t, 0)[0]
    return float(np.max(np.abs(f.u - exact))) / wave.amplitude_range


# --- run setup ---------------------------------------------------------------------


def initial_field(wave: TravelingWave, x0: float, dx: float, n: int, bc: str) -> Field1D:
    x = x0 + dx * np.arange(n)
    u, du = wave.derivatives(x, 1)
    u = np.array(u, dtype=float)
    limits = None
    if bc == "clamped":
        limits = boundary_limits(wave)
        u[0], u[-1] = limits
    ut = None
    if isinstance(wave.model, SineGordon):
        ut = -wave.v * np.array(du, dtype=float)
        if bc == "clamped":
            ut[0] = ut[-1] = 0.0
    return Field1D(u=u, dx=dx, x0=x0, t=0.0, bc=bc, ut=ut, limits=limits)


@dataclass(frozen=True)
class RunPlan:
    wave: TravelingWave
    field: Field1D
    T: float
    dt: float
    travel: float


def plan_run(
    wave: TravelingWave,
    dx: float | None = None,
    dt: float | None = None,
    travel_decay_lengths: float = defaults.PDE_TRAVEL_DECAY_LENGTHS,
    T: float | None = None,
) -> RunPlan:
    """Default grid, duration and step for a verification run of ``wave``.

    The run lasts long enough to travel ``travel_decay_lengths`` decay
    lengths (static waves run for the same time as a unit-speed wave).
    """
    m = wave.model
    ell = wave.decay_length
    if dx is None:
        dx = defaults.PDE_DX[m.name]
    if T is None:
        speed = abs(wave.v) if wave.v != 0.0 else 1.0
        T = travel_decay_lengths * ell / speed
    shift = wave.v * T
    if isinstance(m, KdV):
        half = max(defaults.PDE_KDV_HALF_WIDTH_DECAY_LENGTHS * ell, abs(shift) + 20.0 * ell)
        n = int(round(2.0 * half / dx))
        dx = 2.0 * half / n
        wave = replace(wave, z0=-0.5 * shift)
        f = initial_field(wave, -half, dx, n, "periodic")
    else:
        margin = defaults.PDE_EDGE_MARGIN_DECAY_LENGTHS * ell
        lo = min(0.0, shift) - margin
        hi = max(0.0, shift) + margin
        n = int(round((hi - lo) / dx)) + 1
        dx = (hi - lo) / (n - 1)
        wave = replace(wave, z0=0.0)
        f = initial_field(wave, lo, dx, n, "clamped")
    bound = stable_dt(m, dx, float(np.max(np.abs(f.u))))
    if dt is None:
        dt = defaults.PDE_DT_SAFETY * bound
    return RunPlan(wave=wave, field=f, T=float(T), dt=float(dt), travel=abs(shift))


@dataclass
class VerifyResult:
    wave: TravelingWave
    plan: RunPlan
    run: EvolveResult
    speed: SpeedMeasurement
    action: ActionSeries
    report: dict = field(default_factory=dict)


def verify_wave(
    wave: TravelingWave,
    *,
    dx: float | None = None,
    dt: float | None = None,
    T: float | None = None,
    n_snapshots: int = defaults.PDE_SNAPSHOTS,
    v_claimed: float | None = None,
    speed_tol: float = defaults.VERIFY_SPEED_REL_TOL,
    drift_tol: float = defaults.VERIFY_ACTION_DRIFT_TOL,
    residual_tol: float = defaults.VERIFY_RESIDUAL_TOL,
) -> VerifyResult:
    """Evolve ``wave`` and compare its measured speed and action with the claims."""
    plan = plan_run(wave, dx=dx, dt=dt, T=T)
    run = evolve(wave.model, plan.field, plan.dt, plan.T, n_snapshots)
    speed = measure_speed(run.snapshots, wave.model)
    series = action_timeseries(run.snapshots, wave.model)
    claim = wave.v if v_claimed is None else float(v_claimed)
    # the run's initial profile, translated at the claimed speed
    start_wave = plan.wave
    x = plan.field.x
    residual = max(residual_check(start_wave, x, s.t, v=claim) for s in run.snapshots)
    denom = abs(claim) if claim != 0.0 else 1.0
    speed_error = abs(speed.v_measured - claim) / denom
    I_ref = action_reference(wave.model, wave.v)
    checks = {
        "speed": speed_error <= speed_tol,
        "action_drift": series.drift <= drift_tol,
        "residual": residual <= residual_tol,
    }
    report = {
        "model": wave.model.name,
        "params": wave.model.params(),
        "branch": wave.branch,
        "v_claimed": claim,
        "v_profile": wave.v,
        "v_measured": speed.v_measured,
        "speed_error": speed_error,
        "speed_method": speed.method,
        "fit_residual": speed.fit_residual,
        "action_drift": series.drift,
        "action_drift_relative": series.relative,
        "I_reference": I_ref,
        "I_initial": float(series.I[0]),
        "residual_max": residual,
        "translation_error": translation_error(run.final, start_wave),
        "dx": plan.field.dx,
        "dt": run.dt,
        "T": plan.T,
        "steps": run.steps,
        "n_points": plan.field.n,
        "thresholds": {"speed_rel": speed_tol, "action_drift": drift_tol, "residual": residual_tol},
        "checks": checks,
        "pass": all(checks.values()),
    }
    return VerifyResult(wave=start_wave, plan=plan, run=run, speed=speed, action=series, report=report)


def dump_snapshots(result: VerifyResult, directory: str | Path) -> Path:
    """Write one CSV per snapshot plus ``manifest.json``; returns the manifest path."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i, s in enumerate(result.run.snapshots):
        name = f"snapshot_{i:03d}.csv"
        cols = [s.x, s.u]
        header = ["x", "u"]
        if s.ut is not None:
            cols.append(s.ut)
            header.append("u_t")
        write_csv(out / name, header, cols)
        files.append(name)
    wave = result.wave
    manifest = {
        "model": wave.model.name,
        "params": wave.model.params(),
        "v": wave.v,
        "dx": result.plan.field.dx,
        "dt": result.run.dt,
        "times": [s.t for s in result.run.snapshots],
        "files": files,
        "bc": result.plan.field.bc,
    }
    path = out / "manifest.json"
    write_json(path, manifest)
    return path
