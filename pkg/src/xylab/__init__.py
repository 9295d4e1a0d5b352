"""Numerical laboratory for the periodic spin-1/2 XY chain in a transverse
field: free-fermion spectra, exact diagonalization, geometric measure of
entanglement, and thermal entanglement threshold temperatures."""

from .errors import (
    CapacityError,
    ConvergenceError,
    MixedParityError,
    ParameterError,
    RangeError,
    StateFileError,
    XYLabError,
)
from .free_fermion import (
    GapInfo,
    ModelParams,
    Sector,
    SectorModes,
    SectorSpectrum,
    bogoliubov_angle,
    eta_sign_map,
    gap_bound_delta,
    gap_info,
    momentum_grid,
    quasiparticle_energy,
    sector_modes,
    sector_spectrum,
    vline_overlap,
)
from .exact_diag import (
    CorrelationSet,
    SpectrumResult,
    build_hamiltonian,
    c_line_states,
    correlations,
    full_spectrum,
    ground_space,
    load_state,
    parity_of,
    product_state,
    save_state,
)
from .geometric_measure import (
    GMResult,
    GroundSupport,
    ProductState,
    geometric_measure,
    gm_of_ground_state,
    ground_support,
    objective,
    robustness_lower_bound,
    site_sweep,
)
from .thermal import (
    PopulationModel,
    ThresholdResult,
    WStateModel,
    gapped_threshold,
    ground_population,
    log_partition_function,
    partition_function,
    population_exponent,
    population_exponent_bounds,
    threshold_temperature,
    wstate_gapped_threshold,
    wstate_gapped_threshold_tdl,
    wstate_gm,
    wstate_population,
)

__version__ = "0.1.0"
