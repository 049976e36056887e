"""Cavity-EIT cooling of a single trapped atom.

Simulation and analysis of ground-state cooling through a three-photon
(cavity-EIT) resonance: dressed-state spectra, atom/cavity excitation
spectra, first-order Lamb-Dicke heating and cooling rates, phonon-ladder
dynamics, parameter sweeps, and a full Lindblad master-equation oracle for
non-perturbative validation.
"""

from .dynamics import PhononDistribution, evolve, mean_m_closed_form
from .errors import (
    CeitcoolError,
    DimensionError,
    FitError,
    HeatingError,
    HeatingWarning,
    IntegrationError,
    NoRootError,
    ParameterFileError,
    PoleError,
    PreconditionError,
    TruncationError,
)
from .oracle import (
    CoolingFit,
    Liouvillian,
    OracleConfig,
    OracleTrajectory,
    build_generator,
    evolve_master,
    extract_cooling_rate,
    run_validation,
    validation_points,
)
from .params import (
    DerivedParams,
    SystemParams,
    ValidationReport,
    derive,
    load_params_file,
    validate,
)
from .rates import (
    AmplitudeSet,
    RateSet,
    SteadyState,
    amplitudes,
    cavity_dominated_rates,
    closed_form_limits,
    closed_form_tpr,
    diffusion,
    optimal_detunings,
    steady_state,
    transition_rates,
)
from .resolvent import (
    DarkStateWeights,
    DressedSpectrum,
    ResolventBlock,
    char_poly,
    dark_state_weights,
    dressed_states,
    manifold_matrix,
    resolvent_block,
)
from .scan import AxisSpec, ScanResult, ScanSpec, run_scan
from .spectra import (
    DarkFeature,
    excitation_spectrum,
    locate_dark_features,
    response_gamma,
    response_kappa,
)

__version__ = "0.1.0"
