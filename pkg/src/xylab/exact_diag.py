"""Exact diagonalization of the spin-1/2 XY chain in the full spin basis.

This is the numerical oracle against which every closed-form result is
validated, and the producer of explicit ground-state vectors for the
entanglement optimizer.  Basis convention, fixed globally: site 1 is the
most significant bit of the basis index, an up spin is bit value 1, and
sigma^Z has eigenvalue +1 on up.  Dense spectra are limited to n <= 12
and iterative ground-space extraction to n <= 20.
"""

import struct
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    CapacityError,
    ConvergenceError,
    MixedParityError,
    ParameterError,
    StateFileError,
)
from .free_fermion import ModelParams

__all__ = [
    "DENSE_LIMIT",
    "SPARSE_LIMIT",
    "SpectrumResult",
    "CorrelationSet",
    "build_hamiltonian",
    "hamiltonian_operator",
    "full_spectrum",
    "ground_space",
    "parity_of",
    "parity_signs",
    "correlations",
    "c_line_states",
    "product_state",
    "save_state",
    "load_state",
]

DENSE_LIMIT = 12
SPARSE_LIMIT = 20

_STATE_MAGIC = b"XYSV"
_STATE_VERSION = 1


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues in ascending order with spin-flip parity labels.

    ``eigenvectors`` (optional) holds one state per column, matching the
    eigenvalue order.  ``residuals`` is populated by the iterative solver.
    """

    eigenvalues: np.ndarray
    parities: np.ndarray
    eigenvectors: np.ndarray | None = None
    residuals: np.ndarray | None = None


@dataclass(frozen=True)
class CorrelationSet:
    """Two-point correlators C^alpha(r) for r = 1..n/2 (index r-1) and the
    Z magnetization per site."""

    cx: np.ndarray
    cy: np.ndarray
    cz: np.ndarray
    m_z: float


def _check_capacity(n: int, limit: int, what: str):
    if n > limit:
        raise CapacityError(f"{what} supports n <= {limit}, got n = {n}")


def _popcounts(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    pops = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        pops += (idx >> bit) & 1
    return pops


def _field_diagonal(n: int, h: float) -> np.ndarray:
    """Diagonal of -h sum_j sigma^Z_j: a function of the up-spin count only."""
    return -h * (2.0 * _popcounts(n) - n)


def build_hamiltonian(params: ModelParams) -> sp.csr_matrix:
    """Sparse XY Hamiltonian: -sum_j [(1+eta)/2 XX + (1-eta)/2 YY + h Z].

    Periodic boundary (site n+1 = site 1).  The combined XX+YY bond term has
    exactly one off-diagonal element per row: flipping both bond spins with
    amplitude -1 when they differ and -eta when they agree.
    """
    _check_capacity(params.n, SPARSE_LIMIT, "build_hamiltonian")
    n, h, eta = params.n, params.h, params.eta
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    diag = _field_diagonal(n, h)

    rows = [idx]
    cols = [idx]
    vals = [diag]
    for site in range(1, n + 1):
        nxt = site % n + 1
        b1 = (idx >> (n - site)) & 1
        b2 = (idx >> (n - nxt)) & 1
        mask = (1 << (n - site)) | (1 << (n - nxt))
        rows.append(idx)
        cols.append(idx ^ mask)
        vals.append(np.where(b1 != b2, -1.0, -eta))

    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return mat.tocsr()


def hamiltonian_operator(params: ModelParams) -> spla.LinearOperator:
    """Matrix-free Hamiltonian as a LinearOperator (for iterative solvers)."""
    _check_capacity(params.n, SPARSE_LIMIT, "hamiltonian_operator")
    n, h, eta = params.n, params.h, params.eta
    dim = 1 << n
    diag = _field_diagonal(n, h)
    coeff = np.array([[-eta, -1.0], [-1.0, -eta]])

    def matvec(v):
        v = np.ascontiguousarray(v).reshape(dim)
        out = diag * v
        t = v.reshape((2,) * n)
        o = out.reshape((2,) * n)
        for site in range(1, n):
            dl = 1 << (site - 1)
            dr = 1 << (n - site - 1)
            blk = t.reshape(dl, 2, 2, dr)
            o.reshape(dl, 2, 2, dr)[...] += coeff[None, :, :, None] * blk[:, ::-1, ::-1, :]
        # boundary bond couples site n (LSB) with site 1 (MSB)
        blk = t.reshape(2, dim >> 2, 2)
        o.reshape(2, dim >> 2, 2)[...] += coeff[:, None, :] * blk[::-1, :, ::-1]
        return out

    return spla.LinearOperator((dim, dim), matvec=matvec, dtype=np.float64)


def parity_signs(n: int) -> np.ndarray:
    """(-1)^(number of up spins) for every basis index."""
    return 1 - 2 * (_popcounts(n) & 1)


def parity_of(state: np.ndarray) -> int:
    """Spin-flip parity of a state: +1 (even up spins) or -1 (odd).

    Raises :class:`MixedParityError` when the expectation value is not
    within 1e-8 of +-1, which signals that a degenerate subspace still
    needs rotating to parity eigenstates.
    """
    state = np.asarray(state)
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ParameterError(f"state length {dim} is not a power of two")
    nrm = float(np.vdot(state, state).real)
    if abs(nrm - 1.0) > 1e-10:
        raise ParameterError(f"state is not normalized (norm^2 = {nrm})")
    expect = float(np.sum(parity_signs(n) * np.abs(state) ** 2))
    if expect > 1.0 - 1e-8:
        return 1
    if expect < -1.0 + 1e-8:
        return -1
    raise MixedParityError(f"state has indefinite parity (<P> = {expect:.6f})")


def _parity_partition(n: int):
    signs = parity_signs(n)
    even = np.nonzero(signs == 1)[0]
    odd = np.nonzero(signs == -1)[0]
    return even, odd


def full_spectrum(params: ModelParams, want_vectors: bool = False) -> SpectrumResult:
    """All 2^n eigenvalues with parity labels, via dense per-parity blocks.

    Diagonalizing each parity block separately keeps every returned
    eigenvector an exact parity eigenstate even inside degenerate clusters.
    """
    _check_capacity(params.n, DENSE_LIMIT, "full_spectrum")
    n = params.n
    ham = build_hamiltonian(params)
    vals_all = []
    pars_all = []
    vecs_all = []
    for label, pick in zip((1, -1), _parity_partition(n)):
        block = ham[pick][:, pick].toarray()
        if want_vectors:
            vals, vecs = np.linalg.eigh(block)
            full = np.zeros((1 << n, len(pick)))
            full[pick, :] = vecs
            vecs_all.append(full)
        else:
            vals = np.linalg.eigvalsh(block)
        vals_all.append(vals)
        pars_all.append(np.full(len(pick), label, dtype=np.int64))
    vals = np.concatenate(vals_all)
    pars = np.concatenate(pars_all)
    order = np.argsort(vals, kind="stable")
    vectors = None
    if want_vectors:
        vectors = np.concatenate(vecs_all, axis=1)[:, order]
    return SpectrumResult(eigenvalues=vals[order], parities=pars[order], eigenvectors=vectors)


def _canonical_sign(vec: np.ndarray) -> np.ndarray:
    pivot = np.argmax(np.abs(vec))
    if vec[pivot].real < 0:
        return -vec
    return vec


def ground_space(params: ModelParams, k: int = 2, tol: float = 1e-8,
                 seed=0) -> SpectrumResult:
    """Lowest-k eigenpairs from a seeded Lanczos run, parity-resolved.

    Near-degenerate clusters returned by the solver are rotated to definite
    spin-flip parity (the physical label; the raw solver basis of a
    degenerate cluster is an arbitrary rotation).  Deterministic for a fixed
    seed.  Raises :class:`ConvergenceError` if the solver does not converge
    or a residual exceeds ``tol``.
    """
    _check_capacity(params.n, SPARSE_LIMIT, "ground_space")
    if not 1 <= k <= 8:
        raise ParameterError(f"k must lie in 1..8, got {k}")
    n = params.n
    dim = 1 << n
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    v0 /= np.linalg.norm(v0)
    op = hamiltonian_operator(params)
    try:
        vals, vecs = spla.eigsh(op, k=k, which="SA", v0=v0, tol=0,
                                maxiter=max(2000, min(10 * dim, 100000)))
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(
            f"Lanczos did not converge for n={n}, h={params.h}, eta={params.eta}: {exc}"
        ) from exc
    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]

    # rotate near-degenerate clusters to parity eigenstates; resolved pairs
    # already come out parity-definite, so only genuine mixing triggers
    signs = parity_signs(n)
    group_tol = 1e-8 * max(1.0, abs(float(vals[0])))
    start = 0
    while start < k:
        stop = start + 1
        while stop < k and vals[stop] - vals[stop - 1] < group_tol:
            stop += 1
        if stop - start > 1:
            block = vecs[:, start:stop]
            pmat = block.T @ (signs[:, None] * block)
            if np.max(np.abs(pmat - np.diag(np.diag(pmat)))) > 1e-4:
                _, rot = np.linalg.eigh(pmat)
                block = block @ rot
                rayleigh = np.array([float(b @ op.matvec(b)) for b in block.T])
                order2 = np.argsort(rayleigh, kind="stable")
                vecs[:, start:stop] = block[:, order2]
                vals[start:stop] = rayleigh[order2]
        start = stop

    for j in range(k):
        vecs[:, j] = _canonical_sign(vecs[:, j])

    residuals = np.empty(k)
    pars = np.empty(k, dtype=np.int64)
    for j in range(k):
        residuals[j] = np.linalg.norm(op.matvec(vecs[:, j]) - vals[j] * vecs[:, j])
        pars[j] = parity_of(vecs[:, j])
    if np.any(residuals >= tol):
        raise ConvergenceError(
            f"eigenpair residuals {residuals} exceed tol={tol} "
            f"for n={n}, h={params.h}, eta={params.eta}"
        )
    return SpectrumResult(eigenvalues=vals, parities=pars,
                          eigenvectors=vecs, residuals=residuals)


def _two_point(state: np.ndarray, alpha: str, i: int, j: int, n: int) -> float:
    """<sigma^alpha_i sigma^alpha_j> for a normalized state, 1-based sites."""
    t = state.reshape((2,) * n)
    u = np.moveaxis(t, (i - 1, j - 1), (0, 1)).reshape(2, 2, -1)
    if alpha == "z":
        za = np.array([-1.0, 1.0])
        val = np.einsum("abr,a,b->", np.abs(u) ** 2, za, za)
        return float(val.real)
    w = u[::-1, ::-1, :]
    if alpha == "y":
        sign = np.array([[-1.0, 1.0], [1.0, -1.0]])  # -1 when bond bits agree
        w = sign[:, :, None] * w
    return float(np.einsum("abr,abr->", np.conj(u), w).real)


def correlations(support, params: ModelParams) -> CorrelationSet:
    """C^alpha(r) = <sigma^alpha_1 sigma^alpha_{r+1}> for r = 1..n/2.

    ``support`` is a single state vector or an iterable of orthonormal
    states; for a rank-2 ground space the correlators are averaged over the
    support, i.e. evaluated in the uniformly mixed state.
    """
    n = params.n
    states = np.atleast_2d(np.asarray(support))
    if states.shape[1] != 1 << n:
        raise ParameterError(
            f"state length {states.shape[1]} does not match n = {n}")
    rmax = n // 2
    cx = np.zeros(rmax)
    cy = np.zeros(rmax)
    cz = np.zeros(rmax)
    for state in states:
        for r in range(1, rmax + 1):
            cx[r - 1] += _two_point(state, "x", 1, r + 1, n)
            cy[r - 1] += _two_point(state, "y", 1, r + 1, n)
            cz[r - 1] += _two_point(state, "z", 1, r + 1, n)
    d = states.shape[0]
    cx /= d
    cy /= d
    cz /= d
    zdiag = 2.0 * _popcounts(n) - n
    m_z = float(np.mean([np.sum(zdiag * np.abs(s) ** 2) for s in states]).real) / n
    return CorrelationSet(cx=cx, cy=cy, cz=cz, m_z=m_z)


def product_state(spinors) -> np.ndarray:
    """Full state vector of a product state; spinors[j] = (down, up) at site j+1."""
    vec = np.array([1.0])
    for s in spinors:
        vec = np.kron(vec, np.asarray(s))
    return vec


def c_line_states(eta: float, n: int):
    """The two product ground states on the circle h^2 + eta^2 = 1 and the
    orthogonal complement of the first inside their span.

    Returns (theta_plus, theta_minus, theta_perp) where the product states
    use per-site spinors (cos(T/2) up +- sin(T/2) down) with
    cos(T) = sqrt((1-eta)/(1+eta)).  eta = 0 is rejected: the two states
    coincide and the complement cannot be normalized.
    """
    if not (0.0 < eta <= 1.0):
        raise ParameterError(f"c_line_states requires 0 < eta <= 1, got {eta}")
    if n < 4 or n % 2 != 0:
        raise ParameterError(f"n must be an even integer >= 4, got {n}")
    cos_t = np.sqrt((1.0 - eta) / (1.0 + eta))
    half = 0.5 * np.arccos(cos_t)
    up, down = np.cos(half), np.sin(half)
    plus = product_state([(down, up)] * n)
    minus = product_state([(-down, up)] * n)
    overlap = cos_t ** n
    perp = (minus - overlap * plus) / np.sqrt(1.0 - cos_t ** (2 * n))
    return plus, minus, perp


def save_state(path, state: np.ndarray) -> None:
    """Write a state vector: 16-byte header (magic XYSV, version, n) then
    2^n little-endian complex doubles."""
    state = np.asarray(state)
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ParameterError(f"state length {dim} is not a power of two")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIII", _STATE_MAGIC, _STATE_VERSION, n, 0))
        fh.write(np.ascontiguousarray(state, dtype="<c16").tobytes())


def load_state(path) -> np.ndarray:
    """Read a state vector written by :func:`save_state`."""
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise StateFileError(f"{path}: truncated header")
        magic, version, n, _ = struct.unpack("<4sIII", header)
        if magic != _STATE_MAGIC:
            raise StateFileError(f"{path}: bad magic {magic!r}")
        if version != _STATE_VERSION:
            raise StateFileError(f"{path}: unsupported version {version}")
        payload = fh.read()
    expected = (1 << n) * 16
    if len(payload) != expected:
        raise StateFileError(
            f"{path}: payload has {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype="<c16").astype(np.complex128)
