"""gffv: finite-volume solver for nonlocal nonlinear continuity equations
with gradient-flow structure,

    rho_t = div( rho grad( H'(rho) + V(x) + W * rho ) ),

on uniform 1D/2D boxes with no-flux boundaries.  The scheme preserves
nonnegativity of the cell averages under an explicit CFL bound and
dissipates a discrete free energy; both properties are enforced and tested,
which is what makes long-time runs to steady states trustworthy.
"""

from .errors import ConfigurationError, NumericsError
from .mesh import (BoxIndicator, Field, Grid1D, Grid2D, build_grid, coarsen,
                   normalize_mass, project_initial_data, total_mass)
from .models import (ExponentialKernel, ExternalPotential, Gaussian2DKernel,
                     GaussianKernel, InternalEnergy, Kernel, Model,
                     MorseKernel, PowerLawKernel, QuasiMorseKernel,
                     TentKernel, WeightedSumKernel, bessel_k0,
                     internal_energy_derivative, internal_energy_value,
                     external_potential_value, kernel_cell_average_1d,
                     kernel_value)
from .interaction import (ConvolutionOperator, QuadratureRule, WeightTable,
                          assemble_xi, build_weight_table, convolve_direct,
                          convolve_fft)
from .reconstruct import (LimiterParams, ReconstructedStates, minmod,
                          reconstruct_states)
from .fluxes import (FluxField, InterfaceVelocities, RhsEval, SpatialOperator,
                     interface_velocities, rhs, upwind_fluxes)
from .stepping import (BlowUpSignal, RunStatus, StepControl, cfl_max_dt,
                       classify_state, forward_euler_step, ssp_rk3_step)
from .diagnostics import (DiagnosticsRecord, discrete_dissipation,
                          discrete_entropy, entropy_production, error_norms,
                          fit_exponential_rate, observed_order,
                          support_components, xi_flatness)
from . import core

__version__ = "0.1.0"
