"""Closed-form free-fermion solution of the periodic spin-1/2 XY chain.

The chain of ``n`` spins with transverse field ``h`` and anisotropy ``eta``
maps to free fermions on one of two momentum grids, selected by the spin-flip
parity of the state (even / odd number of up spins).  This module provides
everything that follows from that mapping in closed form: momentum grids,
Bogoliubov rotation angles, quasiparticle energies, parity-sector ground
energies, the spectral gap, the symmetry map ``eta -> -eta``, and the overlap
of ground states across the critical field ``h = 1``.

All functions are pure; the thermal and sweep front ends build on the
per-sector mode data returned by :func:`sector_modes`.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "Sector",
    "ModelParams",
    "SectorSpectrum",
    "SectorModes",
    "GapInfo",
    "momentum_grid",
    "bogoliubov_angle",
    "quasiparticle_energy",
    "sector_spectrum",
    "sector_modes",
    "gap_info",
    "gap_bound_delta",
    "eta_sign_map",
    "vline_overlap",
    "default_degeneracy_tol",
]


class Sector(enum.Enum):
    """Spin-flip parity sector: PLUS holds even numbers of up spins."""

    PLUS = "plus"
    MINUS = "minus"


def _as_sector(sector) -> "Sector":
    if isinstance(sector, Sector):
        return sector
    try:
        return Sector(str(sector).lower())
    except ValueError:
        raise ParameterError(f"unknown parity sector {sector!r}") from None


@dataclass(frozen=True)
class ModelParams:
    """Chain parameters: field h >= 0, anisotropy eta in [-1, 1], even n >= 4.

    n = 2 is rejected: the periodic boundary would double-count the single
    bond, which none of the closed forms account for.
    """

    h: float
    eta: float
    n: int

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and not isinstance(self.n, bool)):
            raise ParameterError(f"n must be an integer, got {self.n!r}")
        if self.n < 4 or self.n % 2 != 0:
            raise ParameterError(f"n must be an even integer >= 4, got {self.n}")
        _check_field_anisotropy(self.h, self.eta)


def _check_field_anisotropy(h, eta):
    if not np.isfinite(h) or h < 0.0:
        raise ParameterError(f"field h must be finite and >= 0, got {h}")
    if not np.isfinite(eta) or abs(eta) > 1.0:
        raise ParameterError(f"anisotropy eta must lie in [-1, 1], got {eta}")


@dataclass(frozen=True)
class SectorSpectrum:
    """Momentum grid, Bogoliubov angles, quasiparticle energies and the
    sector ground energy for one parity sector."""

    sector: Sector
    thetas: np.ndarray
    phis: np.ndarray
    epsilons: np.ndarray
    ground_energy: float


@dataclass(frozen=True)
class SectorModes:
    """Quasiparticle mode data underlying one parity sector.

    ``vacuum_energy`` is the energy with every quasiparticle mode empty,
    ``-(1/2) sum(epsilons)``.  Physical sector states carry excitation
    subsets whose cardinality is constrained to ``subset_parity`` (mod 2);
    the constraint encodes which occupation pattern of the two decoupled
    momenta (theta = pi and theta = 2*pi) belongs to the odd-parity sector.
    """

    sector: Sector
    epsilons: np.ndarray
    vacuum_energy: float
    subset_parity: int

    @property
    def ground_energy(self) -> float:
        if self.subset_parity == 0:
            return self.vacuum_energy
        return self.vacuum_energy + float(np.min(self.epsilons))

    @property
    def first_excitation(self) -> float:
        """Energy of the lowest sector level above the sector ground."""
        eps = np.sort(self.epsilons)
        if self.subset_parity == 0:
            return self.vacuum_energy + float(eps[0] + eps[1])
        return self.vacuum_energy + float(eps[1])


@dataclass(frozen=True)
class GapInfo:
    """Global ground energy, degeneracy under tolerance, and first gap."""

    e0: float
    d0: int
    delta: float
    tol_deg: float


def momentum_grid(params: ModelParams, sector) -> np.ndarray:
    """Grid angles theta_k, k = 1..n: (2k-1)*pi/n (plus) or 2k*pi/n (minus)."""
    sector = _as_sector(sector)
    k = np.arange(1, params.n + 1)
    if sector is Sector.PLUS:
        num = 2 * k - 1
    else:
        num = 2 * k
    return np.pi * num / params.n


def _grid_trig(n: int, sector: Sector):
    """(sin, cos) of the grid angles, exact at multiples of pi/2.

    Exactness matters at the decoupled momenta: it makes eps(pi) equal
    2*|h-1| to the last bit, which the gap and parity bookkeeping rely on.
    """
    k = np.arange(1, n + 1)
    num = (2 * k - 1) if sector is Sector.PLUS else 2 * k
    frac = (num % (2 * n)) / n  # theta / pi, exact rational in [0, 2)
    s = np.sin(np.pi * frac)
    c = np.cos(np.pi * frac)
    for val, (sv, cv) in ((0.0, (0.0, 1.0)), (0.5, (1.0, 0.0)),
                          (1.0, (0.0, -1.0)), (1.5, (-1.0, 0.0))):
        mask = frac == val
        if np.any(mask):
            s[mask] = sv
            c[mask] = cv
    return s, c


def _angles_from_trig(s, c, h, eta):
    """Bogoliubov angles phi in [0, pi/2] from (sin theta, cos theta) arrays.

    For eta*sin(theta) >= 0 the pair (phi, theta) satisfies both defining
    conditions: eta*sin*cos(2phi) + (h+cos)*sin(2phi) = 0 and
    eta*sin*sin(2phi) - (h+cos)*cos(2phi) >= 0.  On the mirror half of the
    grid (eta*sin < 0) those two cannot hold together inside [0, pi/2]; the
    branch with sin(2phi) >= 0 is returned there, which is the angle of the
    momentum-reversed partner mode.  At the doubly singular point
    (h + cos = 0 and eta*sin = 0) the limit along increasing theta is used.
    """
    a = np.asarray(eta * s, dtype=float) + 0.0  # squash -0.0, it misroutes atan2
    b = np.asarray(h + c, dtype=float) + 0.0
    flip = a < 0.0
    two_phi = np.where(flip, np.arctan2(-a, b), np.arctan2(a, -b))
    singular = (a == 0.0) & (b == 0.0)
    if np.any(singular):
        if eta == 0.0:
            # b = h + cos decreases through 0 on (0, pi), increases on (pi, 2pi)
            two_phi = np.where(singular & (np.asarray(s) >= 0.0), np.pi, two_phi)
            two_phi = np.where(singular & (np.asarray(s) < 0.0), 0.0, two_phi)
        else:
            two_phi = np.where(singular, 0.5 * np.pi, two_phi)
    return 0.5 * two_phi


def _energies_from_trig(s, c, h, eta):
    """Quasiparticle energies 2*sqrt((h+cos)^2 + eta^2 sin^2) from trig arrays."""
    if eta * eta == 1.0:
        # algebraically identical and exact where (h+cos)^2 + sin^2 collapses
        val = 1.0 + h * (h + 2.0 * np.asarray(c, dtype=float))
        return 2.0 * np.sqrt(np.maximum(val, 0.0))
    return 2.0 * np.hypot(h + np.asarray(c, dtype=float), eta * np.asarray(s, dtype=float))


def bogoliubov_angle(theta: float, h: float, eta: float) -> float:
    """Bogoliubov rotation angle phi(theta) in [0, pi/2].

    Solves tan(2 phi) = -eta sin(theta) / (h + cos(theta)) on the branch
    with sin(2 phi) >= 0; see :func:`_angles_from_trig` for the convention
    at the singular point and on the mirror half-grid.
    """
    _check_field_anisotropy(h, eta)
    s, c = math.sin(theta), math.cos(theta)
    return float(_angles_from_trig(np.array([s]), np.array([c]), h, eta)[0])


def quasiparticle_energy(theta: float, h: float, eta: float) -> float:
    """Quasiparticle energy 2*sqrt((h + cos theta)^2 + eta^2 sin^2 theta)."""
    _check_field_anisotropy(h, eta)
    s, c = math.sin(theta), math.cos(theta)
    return float(_energies_from_trig(np.array([s]), np.array([c]), h, eta)[0])


def sector_modes(params: ModelParams, sector) -> SectorModes:
    """Quasiparticle energies, vacuum energy and excitation-count parity.

    The plus-sector vacuum always has even spin-flip parity, so excitation
    subsets are even.  In the minus sector the two decoupled momenta fix the
    physical (odd) parity: for h <= 1 the filled mode at theta = 2*pi alone
    makes the vacuum odd (even subsets), while for h > 1 the theta = pi mode
    joins it, the vacuum turns even, and one quasiparticle must be added
    (odd subsets).  The cheapest such flip is the theta = pi mode with energy
    2*(h-1), which reproduces the sector ground-energy correction.
    """
    sector = _as_sector(sector)
    s, c = _grid_trig(params.n, sector)
    eps = _energies_from_trig(s, c, params.h, params.eta)
    vac = -0.5 * float(np.sum(eps))
    if sector is Sector.PLUS:
        q = 0
    else:
        q = 0 if params.h <= 1.0 else 1
    return SectorModes(sector=sector, epsilons=eps, vacuum_energy=vac, subset_parity=q)


def sector_spectrum(params: ModelParams, sector) -> SectorSpectrum:
    """Full per-sector data: grid, angles, energies, sector ground energy."""
    sector = _as_sector(sector)
    thetas = momentum_grid(params, sector)
    s, c = _grid_trig(params.n, sector)
    phis = _angles_from_trig(s, c, params.h, params.eta)
    modes = sector_modes(params, sector)
    return SectorSpectrum(
        sector=sector,
        thetas=thetas,
        phis=phis,
        epsilons=modes.epsilons,
        ground_energy=modes.ground_energy,
    )


def default_degeneracy_tol(e0: float) -> float:
    """Default tolerance deciding ground degeneracy, 1e-8 * max(1, |e0|).

    The sector splitting for h < 1 shrinks exponentially with n while |e0|
    grows linearly, so a fixed absolute tolerance misclassifies near h = 1.
    """
    return 1e-8 * max(1.0, abs(e0))


def gap_info(params: ModelParams, tol_deg: float | None = None) -> GapInfo:
    """Ground energy, degeneracy under ``tol_deg`` and the first gap.

    The gap is the distance from the ground space (one or both sector
    grounds, per ``tol_deg``) to the cheapest excitation drawn from either
    sector's quasiparticle occupancy rules.
    """
    mp = sector_modes(params, Sector.PLUS)
    mm = sector_modes(params, Sector.MINUS)
    e0p, e0m = mp.ground_energy, mm.ground_energy
    e0 = min(e0p, e0m)
    if tol_deg is None:
        tol_deg = default_degeneracy_tol(e0)
    elif tol_deg <= 0.0:
        raise ParameterError(f"tol_deg must be > 0, got {tol_deg}")
    split = abs(e0p - e0m)
    d0 = 2 if split < tol_deg else 1
    candidates = [mp.first_excitation, mm.first_excitation]
    if d0 == 1:
        candidates.append(max(e0p, e0m))
    delta = min(candidates) - e0
    return GapInfo(e0=e0, d0=d0, delta=max(delta, 0.0), tol_deg=tol_deg)


def gap_bound_delta(h: float, eta: float) -> float:
    """min over theta of sqrt((h+cos)^2 + eta^2 sin^2): |h-1| for
    h >= 1-eta^2, else eta*sqrt(1-eta^2-h^2)/sqrt(1-eta^2)."""
    _check_field_anisotropy(h, eta)
    e = abs(eta)
    if h >= 1.0 - e * e:
        return abs(h - 1.0)
    return e * math.sqrt(1.0 - e * e - h * h) / math.sqrt(1.0 - e * e)


def eta_sign_map(params: ModelParams) -> ModelParams:
    """Map eta -> -eta.

    The two chains are related by the on-site unitary (I + i sigma^Z)/sqrt(2)
    applied at every site, so all spectra coincide exactly and every
    entanglement quantity is unchanged.
    """
    return ModelParams(h=params.h, eta=-params.eta, n=params.n)


def vline_overlap(eta: float, dh: float, n: int, sector) -> float:
    """Overlap of the sector ground states at fields 1-dh and 1+dh.

    Equals the product over the first n/2 (plus) or n/2 - 1 (minus) grid
    momenta of cos(phi_k(1+dh) - phi_k(1-dh)); it tends to 0 as n grows
    because the angle difference at the grid point nearest theta = pi
    approaches pi/2.
    """
    sector = _as_sector(sector)
    if not (0.0 < dh < 1.0):
        raise ParameterError(f"dh must lie in (0, 1), got {dh}")
    _check_field_anisotropy(1.0 + dh, eta)
    if n < 4 or n % 2 != 0:
        raise ParameterError(f"n must be an even integer >= 4, got {n}")
    m = n // 2 if sector is Sector.PLUS else n // 2 - 1
    s, c = _grid_trig(n, sector)
    s, c = s[:m], c[:m]
    phi_hi = _angles_from_trig(s, c, 1.0 + dh, eta)
    phi_lo = _angles_from_trig(s, c, 1.0 - dh, eta)
    return float(np.prod(np.cos(phi_hi - phi_lo)))
