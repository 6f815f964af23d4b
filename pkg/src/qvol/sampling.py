"""Random bipartite density matrices.

States are drawn as ``rho = U diag(lam) U^H`` with ``U`` Haar-distributed on
U(N) and ``lam`` uniform (Lebesgue) on the probability simplex.  Rank-r states
use a uniform point of the (r-1)-simplex padded with N - r zeros.

Every sample owns an independent random stream keyed by ``(seed,
sample_index)``, so any partition of a survey into index ranges reproduces
the same states bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .errors import DimensionMismatch, SamplingError, SingularInput
from .linalg import (
    HERMITIAN_TOL,
    MAX_SWEEPS,
    BipartiteDims,
    _eigvals_desc,
    _gram_schmidt_qr,
    _partial_trace_into,
    _partial_transpose_b_into,
    eigh,
    hermiticity_error,
    make_spectrum,
)

HAAR_RETRIES = 3
_MASK64 = (1 << 64) - 1


def rng_stream(seed: int, sample_index: int) -> np.random.Generator:
    """Counter-based stream for one sample.

    A Philox4x64 generator whose 128-bit key is ``(seed, sample_index)``;
    distinct keys give independent streams regardless of which thread or
    process asks for them.
    """
    key = np.array([seed & _MASK64, sample_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=0, key=key))


# --------------------------------------------------------------------------
# compiled pieces

@nb.njit(cache=True, nogil=True)
def _ginibre_from_uniforms(u, n):
    """Box-Muller: 2 n^2 uniforms in [0, 1) -> n x n standard complex Gaussians."""
    g = np.empty((n, n), dtype=np.complex128)
    for k in range(n * n):
        r = np.sqrt(-np.log(1.0 - u[2 * k]))
        phi = 2.0 * np.pi * u[2 * k + 1]
        g[k // n, k % n] = complex(r * np.cos(phi), r * np.sin(phi))
    return g


@nb.njit(cache=True, nogil=True)
def _simplex_from_uniforms(u, n, rank):
    """Sorted-uniform spacings -> descending spectrum with n - rank trailing zeros."""
    cuts = np.sort(u[: rank - 1])
    lam = np.zeros(n)
    prev = 0.0
    for k in range(rank - 1):
        lam[k] = cuts[k] - prev
        prev = cuts[k]
    lam[rank - 1] = 1.0 - prev
    head = np.sort(lam[:rank])[::-1]
    for k in range(rank):
        lam[k] = head[k]
    return lam


@nb.njit(cache=True, nogil=True)
def _compose(u, lam, rank):
    n = u.shape[0]
    rho = np.zeros((n, n), dtype=np.complex128)
    for k in range(rank):
        lk = lam[k]
        for i in range(n):
            ui = lk * u[i, k]
            for j in range(i, n):
                rho[i, j] += ui * u[j, k].conjugate()
    for i in range(n):
        rho[i, i] = rho[i, i].real
        for j in range(i + 1, n):
            rho[j, i] = rho[i, j].conjugate()
    return rho


@nb.njit(cache=True, nogil=True)
def _features_kernel(haar_u, simplex_u, n1, n2, rank, want_pt, lab, la, lb, ptmin, status):
    """Per-sample spectra for a block of pre-drawn uniforms.

    status: 0 ok, 1 singular Ginibre draw, 2 eigensolver failure.
    """
    n = n1 * n2
    m = haar_u.shape[0]
    rho_a = np.empty((n1, n1), dtype=np.complex128)
    rho_b = np.empty((n2, n2), dtype=np.complex128)
    pt = np.empty((n, n), dtype=np.complex128)
    wpt = np.empty(n)
    for s in range(m):
        g = _ginibre_from_uniforms(haar_u[s], n)
        u, ok = _gram_schmidt_qr(g)
        if not ok:
            status[s] = 1
            continue
        lam = _simplex_from_uniforms(simplex_u[s], n, rank)
        rho = _compose(u, lam, rank)
        lab[s, :] = lam
        _partial_trace_into(rho, n1, n2, True, rho_a)
        _partial_trace_into(rho, n1, n2, False, rho_b)
        good = _eigvals_desc(rho_a, MAX_SWEEPS, la[s])
        good = good and _eigvals_desc(rho_b, MAX_SWEEPS, lb[s])
        if want_pt:
            _partial_transpose_b_into(rho, n1, n2, pt)
            good = good and _eigvals_desc(pt, MAX_SWEEPS, wpt)
            ptmin[s] = wpt[n - 1]
        status[s] = 0 if good else 2


@nb.njit(cache=True, nogil=True)
def _states_kernel(haar_u, simplex_u, n, rank, out, status):
    for s in range(haar_u.shape[0]):
        g = _ginibre_from_uniforms(haar_u[s], n)
        u, ok = _gram_schmidt_qr(g)
        if not ok:
            status[s] = 1
            continue
        out[s] = _compose(u, _simplex_from_uniforms(simplex_u[s], n, rank), rank)
        status[s] = 0


# --------------------------------------------------------------------------
# single-sample API

@dataclass(frozen=True)
class SampleSpec:
    dims: BipartiteDims
    rank: int
    seed: int = 0
    sample_index: int = 0

    def __post_init__(self):
        if not 1 <= self.rank <= self.dims.n:
            raise ValueError(f"rank {self.rank} outside [1, {self.dims.n}]")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A bipartite state with its cached, descending, clamped spectrum."""

    dims: BipartiteDims
    matrix: np.ndarray = field(repr=False)
    spectrum: np.ndarray

    @property
    def n(self) -> int:
        return self.dims.n

    @classmethod
    def from_matrix(cls, matrix, dims: BipartiteDims, *, trace_tol: float = 1e-12,
                    hermitian_tol: float = HERMITIAN_TOL) -> "DensityMatrix":
        """Validate an arbitrary matrix and attach its spectrum.

        Raises `NonHermitianInput`, `NonPositiveInput` or `ValueError` (trace).
        """
        m = np.array(matrix, dtype=np.complex128)
        if m.shape != (dims.n, dims.n):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match dims {dims}")
        tr = np.trace(m)
        if abs(tr - 1) > trace_tol:
            raise ValueError(f"trace {tr:.12g} differs from 1 by more than {trace_tol:g}")
        w, _ = eigh(m, tol=hermitian_tol)
        m = 0.5 * (m + m.conj().T)
        return cls(dims, m, make_spectrum(w))


def _draw_unitary(n: int, stream: np.random.Generator) -> np.ndarray:
    u, ok = _gram_schmidt_qr(_ginibre_from_uniforms(stream.random(2 * n * n), n))
    if not ok:
        raise SingularInput("singular Ginibre draw")
    return u


def sample_haar_unitary(n: int, stream: np.random.Generator) -> np.ndarray:
    """Haar-random ``n x n`` unitary from phase-fixed QR of a Ginibre matrix."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for attempt in range(HAAR_RETRIES + 1):
        try:
            return _draw_unitary(n, stream)
        except SingularInput:
            if attempt == HAAR_RETRIES:
                raise
    raise AssertionError("unreachable")


def sample_simplex(n: int, rank: int, stream: np.random.Generator) -> np.ndarray:
    """Uniform point of the (rank-1)-simplex, descending, zero-padded to length n."""
    if not 1 <= rank <= n:
        raise ValueError(f"rank {rank} outside [1, {n}]")
    return _simplex_from_uniforms(stream.random(rank - 1), n, rank)


def sample_state(spec: SampleSpec) -> DensityMatrix:
    stream = rng_stream(spec.seed, spec.sample_index)
    n = spec.dims.n
    u = sample_haar_unitary(n, stream)
    lam = sample_simplex(n, spec.rank, stream)
    return DensityMatrix(spec.dims, _compose(u, lam, spec.rank), lam)


# --------------------------------------------------------------------------
# block API used by the survey driver

@dataclass(frozen=True)
class Features:
    """Spectra of a block of consecutive samples.

    ``joint`` (M, N), ``reduced_a`` (M, N1), ``reduced_b`` (M, N2) are clamped
    and descending.  ``pt_min`` holds the smallest eigenvalue of the partial
    transpose (unclamped), or NaN when it was not requested.
    """

    start: int
    joint: np.ndarray
    reduced_a: np.ndarray
    reduced_b: np.ndarray
    pt_min: np.ndarray

    def __len__(self):
        return self.joint.shape[0]


def _draw_block(seed: int, start: int, stop: int, n: int, rank: int):
    m = stop - start
    haar_u = np.empty((m, 2 * n * n))
    simplex_u = np.empty((m, max(rank - 1, 1)))
    for s in range(m):
        stream = rng_stream(seed, start + s)
        haar_u[s] = stream.random(2 * n * n)
        simplex_u[s, : rank - 1] = stream.random(rank - 1)
    return haar_u, simplex_u


def _single_features(dims: BipartiteDims, rank: int, seed: int, index: int, want_pt: bool):
    from .linalg import eigvalsh, partial_trace, partial_transpose

    rho = sample_state(SampleSpec(dims, rank, seed, index))
    la = eigvalsh(partial_trace(rho.matrix, dims, "A"))
    lb = eigvalsh(partial_trace(rho.matrix, dims, "B"))
    pt = eigvalsh(partial_transpose(rho.matrix, dims, "B"))[-1] if want_pt else np.nan
    return rho.spectrum, la, lb, pt


def sample_features(dims: BipartiteDims, rank: int, seed: int, start: int, stop: int,
                    *, want_pt: bool = True) -> Features:
    """Spectra of samples ``start .. stop-1``; identical to per-sample `sample_state`."""
    n = dims.n
    m = stop - start
    haar_u, simplex_u = _draw_block(seed, start, stop, n, rank)
    lab = np.empty((m, n))
    la = np.empty((m, dims.n1))
    lb = np.empty((m, dims.n2))
    ptmin = np.full(m, np.nan)
    status = np.zeros(m, dtype=np.int8)
    _features_kernel(haar_u, simplex_u, dims.n1, dims.n2, rank, want_pt,
                     lab, la, lb, ptmin, status)
    for s in np.flatnonzero(status):
        # rare: singular first draw, redo on the retrying scalar path
        try:
            lab[s], la[s], lb[s], ptmin[s] = _single_features(dims, rank, seed, start + s, want_pt)
        except Exception as exc:
            raise SamplingError(start + int(s), exc) from exc
    try:
        la = make_spectrum(la, normalize=False)
        lb = make_spectrum(lb, normalize=False)
    except Exception as exc:
        bad = int(np.flatnonzero((la < -1e-10).any(1) | (lb < -1e-10).any(1))[0])
        raise SamplingError(start + bad, exc) from exc
    return Features(start, lab, la, lb, ptmin)


def sample_matrices(dims: BipartiteDims, rank: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Stack ``(M, N, N)`` of the density matrices for samples ``start .. stop-1``."""
    n = dims.n
    m = stop - start
    haar_u, simplex_u = _draw_block(seed, start, stop, n, rank)
    out = np.empty((m, n, n), dtype=np.complex128)
    status = np.zeros(m, dtype=np.int8)
    _states_kernel(haar_u, simplex_u, n, rank, out, status)
    for s in np.flatnonzero(status):
        out[s] = sample_state(SampleSpec(dims, rank, seed, start + s)).matrix
    return out


def is_valid_state(rho: DensityMatrix, tol: float = 1e-12) -> bool:
    return (hermiticity_error(rho.matrix) <= tol
            and abs(np.trace(rho.matrix) - 1) <= tol
            and abs(rho.spectrum.sum() - 1) <= 1e-9)
