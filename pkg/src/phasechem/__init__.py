"""Structure-preserving 2D simulator for an incompressible two-phase flow
coupled to a soluble chemical species.

The package discretizes the coupled system

    rho(phi) dv/dt + ((rho(phi) v + J) . grad) v
        = div(2 nu(phi) D v) - grad P + (mu - beta'(phi) sigma) grad phi,
    div v = 0,
    dphi/dt + v . grad phi = div(m(phi) grad mu),
    mu = -eps Lap(phi) + psi'(phi)/eps + beta'(phi) sigma,
    dsigma/dt + v . grad sigma = Lap(sigma) + div(beta'(phi) sigma grad phi),

with a logarithmic mixing potential and zero-flux/no-slip boundaries, and it
verifies at runtime the structure the model guarantees: conservation of both
masses, dissipation of the total energy, nonnegativity of the concentration,
and boundedness of the phase field.
"""

__version__ = "0.1.0"

from .coeffs import (FloryHuggins, ModelParams, PotentialEval,
                     RegularizedPotential, validate_hypotheses, young_pair)
from .errors import (ConfigError, InvariantViolation, SolvabilityError,
                     SolverFailure)
from .grid import BcMode, Grid, MacVelocity, ScalarField
from .elliptic import (SolveReport, helmholtz_solve, neumann_solve,
                       pressure_solve, var_coeff_solve)
from .sigma import cfl_sigma, entropy, sigma_step, sigma_sup_norm
from .cahn_hilliard import (ch_step, compute_mu, free_energy,
                            separation_margin)
from .momentum import (capillary_force, cfl_ns, kinetic_energy, ns_step,
                       relative_flux)
from .simulation import (DiagnosticsLedger, DiagnosticsRecord,
                         NumericsOptions, SimState, advance,
                         continuous_dependence_probe,
                         energy_inequality_residual, run_steps,
                         solution_distance, total_dissipation, total_energy)
from .config import (RunConfig, config_hash, load_config, parse_config,
                     serialize_config)
from .initial import generate_ic

__all__ = [name for name in dir() if not name.startswith("_")]
