"""1D compressible fluid + kinetic particle phase coupled by drag, on the
periodic torus: conservative finite volumes in x, an unconditionally positive
exponential-fitting solve in v, and diagnostics for every conserved quantity,
the entropy balance, and the approach to global equilibrium."""

__version__ = "0.1.0"

from .core import (Grid, ModelParams, FluidState, KineticState,  # noqa: F401
                   EquilibriumState, VACUUM_FLOOR, pressure, viscosity,
                   drag_coefficient, velocity_from_state,
                   equilibrium_from_initial, sample_maxwellian)
from .coupling import (SimulationState, SchemeConfigs, CouplingConfig,  # noqa: F401
                       drag_moments, coupled_drag_substep, full_step,
                       step_dt_bound)
from .errors import (SimulationError, ConfigError, DegenerateInputError,  # noqa: F401
                     StepRejectedError, NumericalBlowupError)
from .fluid import FluidSchemeConfig, fluid_substep, stable_dt  # noqa: F401
from .kinetic import (KineticSchemeConfig, transport_substep,  # noqa: F401
                      fokker_planck_substep, transport_stable_dt,
                      max_principle_bound, chang_cooper_delta)
