"""becflow: structure-preserving simulator for a degenerate fourth-order
condensation model, with blow-up detection and inequality oracles."""

from .config import ConfigError, RunConfig, parse_config, serialize_config
from .diagnostics import (
    DiagnosticsRecord,
    GronwallInputs,
    gronwall_bound,
    gronwall_ode_oracle,
    moment_inequality_monitor,
    oracle_lemma20,
    oracle_lemma50,
    oracle_lemma51,
    oracle_lemma99,
    record,
)
from .initial import (
    Profile,
    RegularizationError,
    RegularizationSchedule,
    concentration_family,
    field_from_profile,
    regularize_initial_data,
    standard_bump,
)
from .mesh import Field, Grid, build_grid, diff_ops, weighted_integral
from .params import (
    AdmissibilityReport,
    ModelParameters,
    check_admissibility,
    compute_nstar,
    kappa_upper_bound,
)
from .solver import (
    BlowupEvent,
    Discretization,
    RunResult,
    State,
    StepOutcome,
    flux_J,
    implicit_step,
    rhs,
    run,
)
from .weights import WeightProfiles, g_eps, z_eps, zeta_eps

__version__ = "0.1.0"
