"""Central tolerance configuration.

All hard numeric thresholds used across the toolkit live here so that the
geometry, measure and solver layers stay consistent with each other.
"""

from dataclasses import dataclass

# geometry tolerances (double precision round-off never false-triggers these)
UNIT_NORM_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-12
ANTIPODAL_TOL = 1e-9
DEGENERATE_DIRECTION_TOL = 1e-12
LINEAR_INDEPENDENCE_TOL = 1e-10
ADMISSIBLE_TOL = 1e-10

# weight / measure layer
NORMALIZATION_TOL = 1e-11          # tolerance used when computing Z
DEFAULT_MEASURE_TOL = 1e-9
GRAM_QUADRATURE_TOL = 1e-11
GRAM_RESIDUAL_MAX = 1e-9
GRAM_COND_MAX = 1e12

# partition layer
POLE_EXCLUSION = 1e-6              # quadrature nodes keep this distance from dilation poles
HYPOTHESIS_RADIUS_EXP = -1.0       # default hypothesis radius 10**(HYPOTHESIS_RADIUS_EXP * d)
MAX_WEDGES = 12

# cubature layer
SEED_DELTA = 0.25
SEPARATION_FLOOR_FACTOR = 0.05
MIRROR_TOL = 1e-6
DEFAULT_RESIDUAL_TARGET = 1e-9
DEFAULT_AUTO_N_MULTIPLIER = 4.0

# per-ambient-dimension degree caps for weighted bases
DEGREE_CAP = {2: 64, 3: 24, 4: 12}


@dataclass(frozen=True)
class TolProfile:
    """Bundle of the three tolerances every pipeline command honours."""

    name: str
    measure: float
    residual: float
    integrality: float


PROFILES = {
    "fast": TolProfile("fast", 1e-7, 1e-7, 1e-4),
    "default": TolProfile("default", 1e-9, 1e-9, 1e-6),
    "strict": TolProfile("strict", 1e-11, 1e-10, 1e-8),
}


def profile(name="default"):
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {name!r}") from None
