"""Dense complex linear algebra on small bipartite operators.

Everything here works on plain ``numpy`` arrays.  The eigensolver is a cyclic
complex Jacobi iteration compiled with numba; it is accurate to machine
precision for the matrix sizes the toolkit uses (n <= 64) and, unlike a LAPACK
call, can be invoked from inside other compiled kernels without the GIL.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numba as nb
import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NonHermitianInput,
    NonPositiveInput,
    SingularInput,
)

Subsystem = Literal["A", "B"]

HERMITIAN_TOL = 1e-12
CLAMP_TOL = 1e-10
MAX_SWEEPS = 30
MAX_DIM = 64
SINGULAR_PIVOT = 1e-300


@dataclass(frozen=True)
class BipartiteDims:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError(f"subsystem dimensions must be >= 2, got {self.n1}x{self.n2}")

    @property
    def n(self) -> int:
        return self.n1 * self.n2

    @classmethod
    def parse(cls, text: str) -> "BipartiteDims":
        """Parse ``"2x3"`` style strings."""
        try:
            a, b = text.lower().split("x")
            return cls(int(a), int(b))
        except ValueError as exc:
            raise ValueError(f"bad dims {text!r}; expected N1xN2") from exc

    def __str__(self):
        return f"{self.n1}x{self.n2}"


# --------------------------------------------------------------------------
# compiled kernels

@nb.njit(cache=True, nogil=True)
def _jacobi(a, want_vectors, max_sweeps):
    """Cyclic Jacobi on a Hermitian matrix.

    Returns ``(w, v, sweeps)``; ``sweeps == -1`` signals non-convergence.
    Eigenvalues come back unsorted.
    """
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    frob = 0.0
    for i in range(n):
        for j in range(n):
            frob += a[i, j].real ** 2 + a[i, j].imag ** 2
    frob = np.sqrt(frob)
    tol = 1e-12 * n * max(frob, 1e-300)

    sweeps = -1
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q].real ** 2 + a[p, q].imag ** 2
        if np.sqrt(2.0 * off) <= tol:
            sweeps = sweep
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                e = apq / mag
                ec = e.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # A <- A G with G = diag(1, conj(e)) @ [[c, s], [-s, c]]
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * ec * akq
                    a[k, q] = s * akp + c * ec * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * e * aqk
                    a[q, k] = s * apk + c * e * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if want_vectors:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = c * vkp - s * ec * vkq
                        v[k, q] = s * vkp + c * ec * vkq

    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v, sweeps


@nb.njit(cache=True, nogil=True)
def _eigvals_desc(a, max_sweeps, out):
    """Write descending eigenvalues of ``a`` into ``out``; False on non-convergence."""
    w, _, sweeps = _jacobi(a, False, max_sweeps)
    w = np.sort(w)[::-1]
    for i in range(w.shape[0]):
        out[i] = w[i]
    return sweeps >= 0


@nb.njit(cache=True, nogil=True)
def _gram_schmidt_qr(g):
    """Q factor of ``g`` with positive real diag(R).

    Modified Gram-Schmidt with one reorthogonalisation pass.  Second return
    value is False when a pivot underflows.
    """
    n = g.shape[0]
    q = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        v = g[:, j].copy()
        for _ in range(2):
            for i in range(j):
                h = 0j
                for k in range(n):
                    h += q[k, i].conjugate() * v[k]
                for k in range(n):
                    v[k] -= h * q[k, i]
        nrm = 0.0
        for k in range(n):
            nrm += v[k].real ** 2 + v[k].imag ** 2
        nrm = np.sqrt(nrm)
        if nrm < SINGULAR_PIVOT:
            return q, False
        for k in range(n):
            q[k, j] = v[k] / nrm
    return q, True


@nb.njit(cache=True, nogil=True)
def _partial_trace_into(rho, n1, n2, keep_a, out):
    if keep_a:
        for i in range(n1):
            for k in range(n1):
                acc = 0j
                for j in range(n2):
                    acc += rho[i * n2 + j, k * n2 + j]
                out[i, k] = acc
    else:
        for j in range(n2):
            for l in range(n2):
                acc = 0j
                for i in range(n1):
                    acc += rho[i * n2 + j, i * n2 + l]
                out[j, l] = acc


@nb.njit(cache=True, nogil=True)
def _partial_transpose_b_into(rho, n1, n2, out):
    for i in range(n1):
        for j in range(n2):
            for k in range(n1):
                for l in range(n2):
                    out[i * n2 + j, k * n2 + l] = rho[i * n2 + l, k * n2 + j]


# --------------------------------------------------------------------------
# public API

def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def eigh(m: np.ndarray, *, tol: float = HERMITIAN_TOL,
         max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : (n, n) complex array
        Must be Hermitian to within ``tol`` (max abs entrywise).

    Returns
    -------
    w : (n,) float array, descending
    v : (n, n) complex array whose columns are the matching eigenvectors,
        so that ``m == v @ diag(w) @ v.conj().T``.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise DimensionMismatch(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
    err = hermiticity_error(m)
    if err > tol:
        raise NonHermitianInput(f"max |M - M^H| = {err:.3g} > {tol:g}")
    m = 0.5 * (m + m.conj().T)
    w, v, sweeps = _jacobi(m, True, max_sweeps)
    if sweeps < 0:
        raise ConvergenceFailure(f"Jacobi did not converge in {max_sweeps} sweeps")
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(m: np.ndarray) -> np.ndarray:
    """Descending eigenvalues only; skips the Hermitian check and vector accumulation."""
    m = np.ascontiguousarray(m, dtype=np.complex128)
    out = np.empty(m.shape[0])
    if not _eigvals_desc(0.5 * (m + m.conj().T), MAX_SWEEPS, out):
        raise ConvergenceFailure(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    return out


def qr_unitary(g: np.ndarray) -> np.ndarray:
    """Unitary QR factor of a square matrix, normalised so diag(R) > 0.

    With this phase convention the factor of a Ginibre matrix is Haar
    distributed.  Raises `SingularInput` when a pivot falls below 1e-300.
    """
    g = np.ascontiguousarray(g, dtype=np.complex128)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {g.shape}")
    q, ok = _gram_schmidt_qr(g)
    if not ok:
        raise SingularInput("pivot magnitude below 1e-300")
    return q


def make_spectrum(values, *, normalize: bool = True, tol: float = CLAMP_TOL) -> np.ndarray:
    """Clamp, optionally renormalise and sort eigenvalues into a probability spectrum.

    Works on the last axis, so a stack of spectra can be processed at once.
    Entries in ``[-tol, 0)`` are set to zero; anything more negative raises
    `NonPositiveInput`.
    """
    s = np.array(values, dtype=float)
    if np.any(s < -tol):
        raise NonPositiveInput(f"eigenvalue {s.min():.3g} below -{tol:g}")
    s[s < 0] = 0.0
    if normalize:
        s /= s.sum(axis=-1, keepdims=True)
    return -np.sort(-s, axis=-1)


def _check(rho: np.ndarray, dims: BipartiteDims) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape[-2:] != (dims.n, dims.n):
        raise DimensionMismatch(f"matrix shape {rho.shape} does not match dims {dims}")
    return rho


def partial_trace(rho: np.ndarray, dims: BipartiteDims, keep: Subsystem) -> np.ndarray:
    """Reduced operator on subsystem ``keep``.

    Accepts a single matrix or a stack ``(..., n, n)``.

    >>> bell = np.zeros((4, 4)); bell[np.ix_([0, 3], [0, 3])] = 0.5
    >>> partial_trace(bell, BipartiteDims(2, 2), "B").real
    array([[0.5, 0. ],
           [0. , 0.5]])
    """
    rho = _check(rho, dims)
    r = rho.reshape(rho.shape[:-2] + (dims.n1, dims.n2, dims.n1, dims.n2))
    if keep == "A":
        return np.einsum("...ijkj->...ik", r)
    if keep == "B":
        return np.einsum("...ijil->...jl", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(rho: np.ndarray, dims: BipartiteDims, on: Subsystem = "B") -> np.ndarray:
    """Transpose the indices of subsystem ``on``; an exact index permutation."""
    rho = _check(rho, dims)
    lead = rho.shape[:-2]
    r = rho.reshape(lead + (dims.n1, dims.n2, dims.n1, dims.n2))
    k = len(lead)
    axes = list(range(k))
    if on == "B":
        axes += [k, k + 3, k + 2, k + 1]
    elif on == "A":
        axes += [k + 2, k + 1, k, k + 3]
    else:
        raise ValueError(f"on must be 'A' or 'B', got {on!r}")
    return r.transpose(axes).reshape(rho.shape)
