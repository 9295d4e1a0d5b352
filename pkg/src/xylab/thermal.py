"""Thermal populations and entanglement threshold temperatures, k_B = 1.

Two interchangeable population backends are provided: summing a dense
exact-diagonalization spectrum (n <= 12) and parity-projected products over
free-fermion modes (n up to 10^6).  They must agree to 1e-10 relative, which
is the gate that pins down the odd-sector mode bookkeeping.

The threshold temperature solves p0(T) = 2^(-g) for the single-state ground
population p0; below it a thermal state is certainly entangled whenever g is
the geometric measure of the ground support.  The gapped variant solves
(1 - exp(-Delta/T)) p0(T) = 2^(-g) and always lies below the plain one.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import exact_diag, free_fermion
from .errors import ParameterError, RangeError
from .free_fermion import GapInfo, ModelParams, Sector

__all__ = [
    "PopulationModel",
    "ThresholdResult",
    "WStateModel",
    "partition_function",
    "log_partition_function",
    "ground_population",
    "population_exponent",
    "population_exponent_bounds",
    "threshold_temperature",
    "gapped_threshold",
    "wstate_population",
    "wstate_gm",
    "wstate_gapped_threshold",
    "wstate_gapped_threshold_tdl",
]

METHOD_DENSE = "dense-ed"
METHOD_FREE_FERMION = "free-fermion"

_BRACKET_LO = 1e-6
_BRACKET_HI = 1.0
_BRACKET_MAX = 1e6
_BRACKET_FLOOR = 1e-30


@dataclass(frozen=True)
class PopulationModel:
    """Cached spectral data for thermal sums at fixed chain parameters."""

    params: ModelParams
    method: str
    gap: GapInfo
    energies: np.ndarray | None = None
    modes: tuple | None = None

    @classmethod
    def build(cls, params: ModelParams, method: str = METHOD_FREE_FERMION,
              tol_deg: float | None = None) -> "PopulationModel":
        gap = free_fermion.gap_info(params, tol_deg)
        if method == METHOD_DENSE:
            spectrum = exact_diag.full_spectrum(params)
            return cls(params=params, method=method, gap=gap,
                       energies=spectrum.eigenvalues)
        if method == METHOD_FREE_FERMION:
            modes = (free_fermion.sector_modes(params, Sector.PLUS),
                     free_fermion.sector_modes(params, Sector.MINUS))
            return cls(params=params, method=method, gap=gap, modes=modes)
        raise ParameterError(f"unknown population method {method!r}")

    @property
    def e0(self) -> float:
        return self.gap.e0

    @property
    def d0(self) -> int:
        return self.gap.d0


def _check_temperature(temperature: float):
    if not (np.isfinite(temperature) and temperature > 0.0):
        raise ParameterError(f"temperature must be finite and > 0, got {temperature}")


def _log_sector_sum(modes, temperature: float) -> float:
    """log of the parity-projected excitation sum of one sector.

    With x_k = exp(-eps_k/T), the sum over excitation subsets of allowed
    cardinality parity is (prod(1+x) + s*prod(1-x))/2 with s = +-1; the two
    products are combined in log space so that neither overflow at large n
    nor the near-cancellation at low temperature loses the leading term.
    """
    x = -modes.epsilons / temperature
    with np.errstate(divide="ignore"):
        log_a = float(np.sum(np.log1p(np.exp(x))))
        log_b = float(np.sum(np.log1p(-np.exp(x))))  # -inf if some eps == 0
    t = log_b - log_a
    if modes.subset_parity == 0:
        combined = log_a + math.log1p(math.exp(t)) if t > -745.0 else log_a
    else:
        if t == 0.0:
            return -math.inf
        combined = log_a + math.log(-math.expm1(t))
    return combined - math.log(2.0) - modes.vacuum_energy / temperature


def log_partition_function(model: PopulationModel, temperature: float) -> float:
    """log Z(T), overflow-safe (computed with a ground-energy shift)."""
    _check_temperature(temperature)
    if model.method == METHOD_DENSE:
        shifted = -(model.energies - model.energies[0]) / temperature
        return float(-model.energies[0] / temperature
                     + np.log(np.sum(np.exp(shifted))))
    zp = _log_sector_sum(model.modes[0], temperature)
    zm = _log_sector_sum(model.modes[1], temperature)
    return float(np.logaddexp(zp, zm))


def partition_function(model: PopulationModel, temperature: float) -> float:
    """Z(T) = sum_i exp(-E_i/T).  May overflow to inf at very low T; use
    :func:`log_partition_function` for large systems."""
    return math.exp(log_partition_function(model, temperature))


def ground_population(model: PopulationModel, temperature: float) -> float:
    """Single-state Boltzmann weight of the ground level,
    p0(T) = exp(-E0/T)/Z(T); the ground space carries total weight d0*p0."""
    _check_temperature(temperature)
    log_z = log_partition_function(model, temperature)
    return math.exp(-model.e0 / temperature - log_z)


def population_exponent(model: PopulationModel, temperature: float) -> float:
    """Decay exponent mu(T) = -log2(p0)/n of the ground population."""
    log_z = log_partition_function(model, temperature)
    return (model.e0 / temperature + log_z) / (model.params.n * math.log(2.0))


def population_exponent_bounds(h: float, eta: float, temperature: float,
                               n: int | None = None):
    """Analytic sandwich for the population exponent.

    Every quasiparticle energy lies in [2*delta, 2*(h+1)] with delta the
    dispersion minimum (:func:`free_fermion.gap_bound_delta`), giving
    log2(1+e^(-2(h+1)/T)) <= mu <= log2(1+e^(-2 delta/T)) up to parity
    projection bookkeeping worth at most 1/n (lower) and 2/n (upper),
    included when ``n`` is given.
    """
    _check_temperature(temperature)
    delta = free_fermion.gap_bound_delta(h, eta)
    lo = math.log2(1.0 + math.exp(-2.0 * (h + 1.0) / temperature))
    hi = math.log2(1.0 + math.exp(-2.0 * delta / temperature))
    if n is not None:
        lo -= 1.0 / n
        hi += 2.0 / n
    return lo, hi


@dataclass(frozen=True)
class ThresholdResult:
    """Solved threshold temperature with solver diagnostics."""

    t_th: float
    g_bits: float
    d0: int
    residual: float
    bracket: tuple
    iterations: int
    kind: str
    vacuous: bool


def _bisect_decreasing(func, residual_tol: float):
    """Root of a strictly decreasing scalar function via bracketed bisection.

    The bracket starts at [1e-6, 1] and is grown geometrically upward (and
    shrunk downward if needed).  Returns (root, residual, bracket, iters);
    raises RangeError if no sign change is found below 1e6, and returns
    None when the function is negative all the way to the lower floor
    (the target is unreachable from above).
    """
    lo, hi = _BRACKET_LO, _BRACKET_HI
    f_lo = func(lo)
    while f_lo < 0.0 and lo > _BRACKET_FLOOR:
        lo /= 8.0
        f_lo = func(lo)
    if f_lo < 0.0:
        return None
    f_hi = func(hi)
    while f_hi > 0.0:
        hi *= 2.0
        if hi > _BRACKET_MAX:
            raise RangeError(
                f"no sign change below T = {_BRACKET_MAX:g}; target unreachable")
        f_hi = func(hi)
    bracket = (lo, hi)
    best_t, best_f = (lo, f_lo) if abs(f_lo) < abs(f_hi) else (hi, f_hi)
    iterations = 0
    while iterations < 200:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = func(mid)
        iterations += 1
        if abs(f_mid) < abs(best_f):
            best_t, best_f = mid, f_mid
        if abs(f_mid) <= residual_tol:
            break
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    return best_t, abs(best_f), bracket, iterations


def _solve_threshold(model: PopulationModel, g_bits: float, kind: str, func):
    if g_bits < 0.0 or not np.isfinite(g_bits):
        raise ParameterError(f"g_bits must be finite and >= 0, got {g_bits}")
    if g_bits == 0.0:
        return ThresholdResult(t_th=0.0, g_bits=0.0, d0=model.d0, residual=0.0,
                               bracket=(0.0, 0.0), iterations=0, kind=kind,
                               vacuous=False)
    target = 2.0 ** (-g_bits)
    low_t_limit = 1.0 / model.d0
    if model.d0 >= 2 and target >= low_t_limit - 1e-15:
        # the witness cannot beat the zero-temperature population; keep
        # sweeps total by reporting T = 0 with a flag instead of failing
        return ThresholdResult(t_th=0.0, g_bits=g_bits, d0=model.d0,
                               residual=abs(low_t_limit - target),
                               bracket=(0.0, 0.0), iterations=0, kind=kind,
                               vacuous=True)
    solved = _bisect_decreasing(func, residual_tol=1e-12 * target)
    if solved is None:
        return ThresholdResult(t_th=0.0, g_bits=g_bits, d0=model.d0,
                               residual=math.nan, bracket=(0.0, 0.0),
                               iterations=0, kind=kind, vacuous=True)
    root, residual, bracket, iterations = solved
    return ThresholdResult(t_th=root, g_bits=g_bits, d0=model.d0,
                           residual=residual, bracket=bracket,
                           iterations=iterations, kind=kind, vacuous=False)


def threshold_temperature(model: PopulationModel, g_bits: float) -> ThresholdResult:
    """Solve p0(T) = 2^(-g_bits) for T.

    p0 decreases strictly from its zero-temperature value 1/d0, so the root
    is unique whenever the target lies below that; otherwise the result is
    T = 0 with the vacuous-witness flag set.  g_bits = 0 returns T = 0.
    """
    target = 2.0 ** (-g_bits) if g_bits > 0 else 1.0

    def func(temperature):
        return ground_population(model, temperature) - target

    return _solve_threshold(model, g_bits, "plain", func)


def gapped_threshold(model: PopulationModel, g_bits: float,
                     delta: float) -> ThresholdResult:
    """Solve (1 - exp(-delta/T)) p0(T) = 2^(-g_bits) for T.

    The left side is a product of strictly decreasing positive factors, so
    the root is unique; it always lies below the plain threshold.
    """
    if not (np.isfinite(delta) and delta > 0.0):
        raise ParameterError(f"delta must be finite and > 0, got {delta}")
    target = 2.0 ** (-g_bits) if g_bits > 0 else 1.0

    def func(temperature):
        occupancy = -math.expm1(-delta / temperature)
        return occupancy * ground_population(model, temperature) - target

    return _solve_threshold(model, g_bits, "gapped", func)


@dataclass(frozen=True)
class WStateModel:
    """Single-excitation (W) ground state over m spins with equally spaced
    spectrum of spacing delta and first gap kappa*delta."""

    m: int
    delta: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 2):
            raise ParameterError(f"m must be an integer >= 2, got {self.m}")
        if not (np.isfinite(self.delta) and self.delta > 0.0):
            raise ParameterError(f"delta must be > 0, got {self.delta}")
        if not (np.isfinite(self.kappa) and self.kappa > 0.0):
            raise ParameterError(f"kappa must be > 0, got {self.kappa}")

    @property
    def d_total(self) -> int:
        return 2 ** self.m


def wstate_population(model: WStateModel, temperature: float) -> float:
    """p0(T) = (1 - e^(-delta/T)) / (1 - e^(-D delta/T)) with D = 2^m."""
    _check_temperature(temperature)
    num = -math.expm1(-model.delta / temperature)
    d_total = math.inf if model.m >= 1024 else float(model.d_total)
    den = -math.expm1(-d_total * model.delta / temperature)
    return num / den


def wstate_gm(m: int) -> float:
    """Geometric measure of the m-spin W state, (m-1) log2(m/(m-1)) bits."""
    if not (isinstance(m, (int, np.integer)) and m >= 2):
        raise ParameterError(f"m must be an integer >= 2, got {m}")
    return (m - 1) * math.log2(m / (m - 1))


def wstate_gapped_threshold(model: WStateModel) -> float:
    """Gapped threshold temperature of the finite-m W-state model: root of
    (1 - e^(-kappa delta/T)) p0(T) = 2^(-g) with g the W-state measure."""
    target = 2.0 ** (-wstate_gm(model.m))

    def func(temperature):
        occupancy = -math.expm1(-model.kappa * model.delta / temperature)
        return occupancy * wstate_population(model, temperature) - target

    solved = _bisect_decreasing(func, residual_tol=1e-12 * target)
    if solved is None:
        return 0.0
    return solved[0]


def wstate_gapped_threshold_tdl(kappa: float, delta: float = 1.0) -> float:
    """Many-spin limit of the W-model gapped threshold: root of
    (1 - e^(-kappa delta/T))(1 - e^(-delta/T)) = 1/e.

    The limit target 1/e is built in: the squared product overlap
    ((m-1)/m)^(m-1) tends to 1/e as m grows.  Strictly increasing in kappa
    and saturating at delta / ln(e/(e-1)) as kappa -> inf.
    """
    if not (np.isfinite(kappa) and kappa > 0.0):
        raise ParameterError(f"kappa must be > 0, got {kappa}")
    if not (np.isfinite(delta) and delta > 0.0):
        raise ParameterError(f"delta must be > 0, got {delta}")
    target = 1.0 / math.e

    def func(temperature):
        return (math.expm1(-kappa * delta / temperature)
                * math.expm1(-delta / temperature) - target)

    solved = _bisect_decreasing(func, residual_tol=1e-14)
    if solved is None:
        return 0.0
    return solved[0]
