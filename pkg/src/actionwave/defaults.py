"""Single table of numerical defaults (tolerances, grids, thresholds).

Acceptance runs and bare CLI commands use exactly these values.
"""

from __future__ import annotations

# --- models -----------------------------------------------------------------
DEFAULT_PARAMS = {
    "kdv": {"A": 1.0},
    "sg": {},
    "kpp": {"D": 1.0, "k": 6.0},
    "burgers": {"D": 1.0, "u1": 0.0, "u2": 1.0},
}

# --- reduction --------------------------------------------------------------
ODE_METHOD = "DOP853"  # explicit adaptive Runge-Kutta 8(5,3)
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12
ORBIT_SAMPLES = 20001
BLOWUP_FACTOR = 1e6  # escape bound = factor * amplitude scale
CENTER_RE_TOL = 1e-10

SEPARATRIX_DELTA = 1e-8  # seed offset, scaled by max(1, |u_saddle|)
SEPARATRIX_RADIUS = 1e-5  # arrival ball around the target equilibrium
SEPARATRIX_BUDGET_DECAY_LENGTHS = 200.0
SEPARATRIX_RTOL = 1e-12
SEPARATRIX_ATOL = 1e-14

CLOSED_ORBIT_RTOL = 1e-12
CLOSED_ORBIT_ATOL = 1e-14
CLOSED_ORBIT_SAMPLES = 20001

# --- action -----------------------------------------------------------------
QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-12
QUAD_TAIL_REL = 1e-12  # neglected tail / running value
QUAD_MAX_SUBINTERVALS = 500
QUAD_INITIAL_HALF_WIDTH = 10.0  # decay lengths

# --- pde verification -------------------------------------------------------
PDE_DX = {"kdv": 0.05, "sg": 0.05, "kpp": 0.05, "burgers": 0.05}
PDE_DT_SAFETY = 0.8  # fraction of the stability bound used when dt is not given
PDE_TRAVEL_DECAY_LENGTHS = 5.0
PDE_EDGE_MARGIN_DECAY_LENGTHS = 25.0  # clamped runs: distance from wave to each edge
PDE_KDV_HALF_WIDTH_DECAY_LENGTHS = 40.0  # periodic KdV box is [-40, 40] decay lengths
PDE_SNAPSHOTS = 21
PDE_INSTABILITY_FACTOR = 10.0

VERIFY_SPEED_REL_TOL = 0.01
VERIFY_ACTION_DRIFT_TOL = 0.01
VERIFY_RESIDUAL_TOL = 1e-9
