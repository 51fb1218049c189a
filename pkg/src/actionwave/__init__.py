"""Solitary traveling waves of KdV, sine-Gordon, Fisher-KPP and Burgers in action-angle form."""

from actionwave.errors import ActionWaveError, NumericalError, ParameterError
from actionwave.models import (
    Burgers,
    FisherKPP,
    KdV,
    SineGordon,
    TravelingWave,
    admissible_speed,
    boundary_limits,
    closed_form_profile,
    eval_profile,
    make_model,
)

__version__ = "0.1.0"

__all__ = [
    "ActionWaveError",
    "Burgers",
    "FisherKPP",
    "KdV",
    "NumericalError",
    "ParameterError",
    "SineGordon",
    "TravelingWave",
    "admissible_speed",
    "boundary_limits",
    "closed_form_profile",
    "eval_profile",
    "make_model",
]
