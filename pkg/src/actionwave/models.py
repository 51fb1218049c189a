"""The four wave equations, their solitary traveling-wave profiles and speed rules.

Every profile is written in the comoving coordinate ``z = x - v t`` and is
evaluated in a numerically stable form: fronts go through the logistic
function and sech is built from ``exp(-|w|)``, so neither tail overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import expit

from actionwave.errors import ParameterError

TWO_PI = 2.0 * math.pi

# Relative tolerance for accepting an explicit speed equal to a forced one.
_FORCED_SPEED_RTOL = 1e-9


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite", parameter=name, value=value)
    return value


@dataclass(frozen=True)
class KdV:
    """u_t + A u u_x + u_xxx = 0."""

    A: float = 1.0
    name: ClassVar[str] = "kdv"

    def __post_init__(self) -> None:
        a = _require_finite("A", self.A)
        if a == 0.0:
            raise ParameterError("A must be nonzero", parameter="A", value=a)
        object.__setattr__(self, "A", a)

    def params(self) -> dict[str, float]:
        return {"A": self.A}


@dataclass(frozen=True)
class SineGordon:
    """u_tt + sin u = u_xx."""

    name: ClassVar[str] = "sg"

    def params(self) -> dict[str, float]:
        return {}


@dataclass(frozen=True)
class FisherKPP:
    """u_t = D u_xx + k u (1 - u)."""

    D: float = 1.0
    k: float = 6.0
    name: ClassVar[str] = "kpp"

    def __post_init__(self) -> None:
        d = _require_finite("D", self.D)
        k = _require_finite("k", self.k)
        if d <= 0.0:
            raise ParameterError("D must be > 0", parameter="D", value=d)
        if k <= 0.0:
            raise ParameterError("k must be > 0", parameter="k", value=k)
        object.__setattr__(self, "D", d)
        object.__setattr__(self, "k", k)

    @property
    def forced_speed(self) -> float:
        """Magnitude of the speed fixed by the parameters, sqrt(25 k D / 6)."""
        return 5.0 * math.sqrt(self.k / (6.0 * self.D)) * self.D

    def params(self) -> dict[str, float]:
        return {"D": self.D, "k": self.k}


@dataclass(frozen=True)
class Burgers:
    """u_t + u u_x = D u_xx with u -> u2 on the left and u -> u1 on the right."""

    D: float = 1.0
    u1: float = 0.0
    u2: float = 1.0
    name: ClassVar[str] = "burgers"

    def __post_init__(self) -> None:
        d = _require_finite("D", self.D)
        u1 = _require_finite("u1", self.u1)
        u2 = _require_finite("u2", self.u2)
        if d <= 0.0:
            raise ParameterError("D must be > 0", parameter="D", value=d)
        if not u1 < u2:
            raise ParameterError("u1 must be < u2", parameter="u1", value=u1, u2=u2)
        object.__setattr__(self, "D", d)
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)

    @property
    def forced_speed(self) -> float:
        return 0.5 * (self.u1 + self.u2)

    def params(self) -> dict[str, float]:
        return {"D": self.D, "u1": self.u1, "u2": self.u2}


ModelSpec = Union[KdV, SineGordon, FisherKPP, Burgers]

MODEL_TYPES: dict[str, type] = {m.name: m for m in (KdV, SineGordon, FisherKPP, Burgers)}
_ALIASES = {
    "kdv": "kdv",
    "korteweg-de-vries": "kdv",
    "sg": "sg",
    "sine-gordon": "sg",
    "sinegordon": "sg",
    "kpp": "kpp",
    "fisher-kpp": "kpp",
    "fisher": "kpp",
    "burgers": "burgers",
}

# Speed used when "auto" is requested for a model that leaves the speed free.
DEFAULT_FREE_SPEED = {"kdv": 1.0, "sg": 0.0}


def canonical_name(name: str) -> str:
    key = _ALIASES.get(str(name).strip().lower())
    if key is None:
        raise ParameterError(f"unknown model {name!r}", model=name, known=sorted(MODEL_TYPES))
    return key


def make_model(name: str, **params: float) -> ModelSpec:
    """Build a validated model from its name and raw numeric parameters.

    >>> make_model("kpp", D=1, k=6)
    FisherKPP(D=1.0, k=6.0)
    """
    key = canonical_name(name)
    cls = MODEL_TYPES[key]
    allowed = set(cls.__dataclass_fields__)
    unknown = sorted(set(params) - allowed)
    if unknown:
        raise ParameterError(
            f"unknown parameter(s) for {key}: {', '.join(unknown)}",
            model=key,
            unknown=unknown,
        )
    try:
        return cls(**{k: float(v) for k, v in params.items()})
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(str(exc), model=key) from exc


def admissible_speed(model: ModelSpec, v: float | str | None = "auto") -> float:
    """Return the wave speed for ``model``.

    KdV and sine-Gordon leave the speed free, so the requested value is
    checked and returned. KPP and Burgers fix it; ``"auto"`` then picks the
    forced value (the positive KPP branch), and an explicit value must match.
    """
    auto = v is None or (isinstance(v, str) and v.strip().lower() == "auto")
    if not auto:
        v = _require_finite("v", float(v))

    if isinstance(model, KdV):
        if auto:
            return DEFAULT_FREE_SPEED["kdv"]
        if v <= 0.0:
            raise ParameterError("profile not real-valued: KdV soliton needs v > 0", v=v)
        return v
    if isinstance(model, SineGordon):
        if auto:
            return DEFAULT_FREE_SPEED["sg"]
        if v * v >= 1.0:
            raise ParameterError("singular reduction: sine-Gordon needs v^2 < 1", v=v)
        return v
    if isinstance(model, FisherKPP):
        speed = model.forced_speed
        if auto:
            return speed
        if math.isclose(abs(v), speed, rel_tol=_FORCED_SPEED_RTOL):
            return math.copysign(speed, v)
        raise ParameterError(
            "speed is determined by parameters",
            v=v,
            allowed=[speed, -speed],
        )
    if isinstance(model, Burgers):
        speed = model.forced_speed
        if auto:
            return speed
        if math.isclose(v, speed, rel_tol=_FORCED_SPEED_RTOL, abs_tol=1e-12):
            return speed
        raise ParameterError("speed is determined by parameters", v=v, allowed=[speed])
    raise ParameterError(f"not a model: {model!r}")


# d/dw of a polynomial in s = 1/(1 + e^w) is P'(s) * (s^2 - s).
_LOGISTIC_CHAIN = Polynomial([0.0, -1.0, 1.0])


def _logistic_derivative_polys(p0: Polynomial, order: int) -> list[Polynomial]:
    polys = [p0]
    for _ in range(order):
        polys.append(polys[-1].deriv() * _LOGISTIC_CHAIN)
    return polys


_KPP_POLYS = _logistic_derivative_polys(Polynomial([0.0, 0.0, 1.0]), 3)
_BURGERS_POLYS = _logistic_derivative_polys(Polynomial([0.0, 1.0]), 3)

_BRANCHES = {
    "kdv": ("soliton",),
    "sg": ("kink", "antikink"),
    "kpp": ("decreasing", "increasing"),
    "burgers": ("front",),
}


@dataclass(frozen=True)
class TravelingWave:
    """A closed-form solitary wave u(z - z0) with its speed and branch."""

    model: ModelSpec
    v: float
    z0: float = 0.0
    branch: str = field(default="")

    @property
    def decay_rate(self) -> float:
        """Exponent of the profile tails (inverse decay length)."""
        m = self.model
        if isinstance(m, KdV):
            return math.sqrt(self.v)
        if isinstance(m, SineGordon):
            return 1.0 / math.sqrt(1.0 - self.v * self.v)
        if isinstance(m, FisherKPP):
            return abs(self.kpp_a)
        return (m.u2 - m.u1) / (2.0 * m.D)

    @property
    def decay_length(self) -> float:
        return 1.0 / self.decay_rate

    @property
    def kpp_a(self) -> float:
        """Signed exponent a = v / (5 D) of the KPP front."""
        return self.v / (5.0 * self.model.D)

    @property
    def amplitude_range(self) -> float:
        m = self.model
        if isinstance(m, KdV):
            return abs(3.0 * self.v / m.A)
        if isinstance(m, SineGordon):
            return TWO_PI
        if isinstance(m, FisherKPP):
            return 1.0
        return m.u2 - m.u1

    def derivatives(self, z, order: int = 1) -> tuple:
        """Values of u and its first ``order`` z-derivatives at ``z`` (order <= 3)."""
        if not 0 <= order <= 3:
            raise ValueError("order must be between 0 and 3")
        s = np.asarray(z, dtype=float) - self.z0
        out = _derivatives(self, s, order)
        return tuple(a[()] for a in out)

    def __call__(self, z) -> tuple:
        return self.derivatives(z, 1)


def _sech_tanh(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e = np.exp(-2.0 * np.abs(w))
    sech = 2.0 * np.sqrt(e) / (1.0 + e)
    return sech, np.tanh(w)


def _derivatives(wave: TravelingWave, s: np.ndarray, order: int) -> list[np.ndarray]:
    m = wave.model
    v = wave.v
    if isinstance(m, KdV):
        rv = math.sqrt(v)
        c = 3.0 * v / m.A
        sech, t = _sech_tanh(0.5 * rv * s)
        s2 = sech * sech
        terms = [
            c * s2,
            -c * rv * s2 * t,
            -0.5 * c * v * s2 * (1.0 - 3.0 * t * t),
            c * v * rv * s2 * t * (2.0 - 3.0 * t * t),
        ]
        return terms[: order + 1]

    if isinstance(m, SineGordon):
        g = 1.0 / math.sqrt(1.0 - v * v)
        sign = 1.0 if wave.branch != "antikink" else -1.0
        w = sign * g * s
        e = np.exp(-np.abs(w))
        u = np.where(w <= 0.0, 4.0 * np.arctan(e), TWO_PI - 4.0 * np.arctan(e))
        sech, t = _sech_tanh(w)
        terms = [
            u,
            sign * 2.0 * g * sech,
            -2.0 * g * g * sech * t,
            sign * 2.0 * g**3 * sech * (t * t - sech * sech),
        ]
        return terms[: order + 1]

    if isinstance(m, FisherKPP):
        a = wave.kpp_a
        sig = expit(-a * s)
        return [a**n * _KPP_POLYS[n](sig) for n in range(order + 1)]

    b = (m.u2 - m.u1) / (2.0 * m.D)
    du = m.u2 - m.u1
    sig = expit(-b * s)
    out = [m.u1 + du * sig]
    out += [du * b**n * _BURGERS_POLYS[n](sig) for n in range(1, order + 1)]
    return out


def closed_form_profile(
    model: ModelSpec,
    v: float | str | None = "auto",
    z0: float = 0.0,
    branch: str | None = None,
) -> TravelingWave:
    """Solitary-wave profile of ``model`` moving at ``v``, shifted by ``z0``.

    ``branch`` selects the sine-Gordon kink or antikink and the KPP front
    orientation ("decreasing" for a > 0, "increasing" for a < 0). A KPP branch
    given without an explicit speed picks the matching sign of v.
    """
    z0 = _require_finite("z0", z0)
    allowed = _BRANCHES[model.name]
    if branch is not None and branch not in allowed:
        raise ParameterError(
            f"unknown branch {branch!r} for {model.name}", branch=branch, allowed=list(allowed)
        )
    speed = admissible_speed(model, v)
    if isinstance(model, FisherKPP):
        auto = v is None or isinstance(v, str)
        if branch is None:
            branch = "decreasing" if speed > 0 else "increasing"
        elif auto:
            speed = model.forced_speed if branch == "decreasing" else -model.forced_speed
        elif (branch == "decreasing") != (speed > 0):
            raise ParameterError(
                "KPP branch and speed sign disagree (sign(v) must equal sign(a))",
                branch=branch,
                v=speed,
            )
    elif branch is None:
        branch = allowed[0]
    return TravelingWave(model=model, v=speed, z0=z0, branch=branch)


def eval_profile(wave: TravelingWave, z):
    """Return ``(u, du/dz)`` at ``z``; accepts scalars or arrays."""
    return wave.derivatives(z, 1)


def boundary_limits(wave: TravelingWave) -> tuple[float, float]:
    """Exact ``(u(-inf), u(+inf))`` for the wave's model and branch."""
    m = wave.model
    if isinstance(m, KdV):
        return (0.0, 0.0)
    if isinstance(m, SineGordon):
        return (TWO_PI, 0.0) if wave.branch == "antikink" else (0.0, TWO_PI)
    if isinstance(m, FisherKPP):
        return (1.0, 0.0) if wave.kpp_a > 0 else (0.0, 1.0)
    return (m.u2, m.u1)
