"""Small dense complex Hermitian linear algebra.

Matrices are plain ``numpy`` complex128 arrays that are marked read-only
on the way out of every public function, so nothing here mutates its
arguments or hands back a buffer a caller could later alter in place.

The eigensolver is a cyclic complex Jacobi iteration. The dimensions met
in practice are 2 and 4, where Jacobi is accurate to the last bit and,
run on Python complex scalars, fast enough.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .errors import ConvergenceError, DimensionError, UnphysicalStateError

ComplexMatrix = npt.NDArray[np.complex128]

HERMITIAN_TOL = 1e-10
NEGATIVE_EIG_TOL = 1e-10
JACOBI_RTOL = 1e-13
MAX_SWEEPS = 100


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_scalar(z) -> complex:
    """Coerce to a finite Python ``complex``."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"complex scalar must be finite, got {z!r}")
    return z


def as_matrix(data) -> ComplexMatrix:
    """Validated, read-only complex128 copy of a square finite matrix."""
    a = np.array(data, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return _frozen(a)


def identity(n: int) -> ComplexMatrix:
    return _frozen(np.eye(n, dtype=np.complex128))


def diag(*values) -> ComplexMatrix:
    return _frozen(np.diag(np.asarray(values, dtype=np.complex128)))


def adjoint(m) -> ComplexMatrix:
    """Conjugate transpose."""
    return _frozen(np.conj(as_matrix(m)).T.copy())


def matmul(a, b) -> ComplexMatrix:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return _frozen(a @ b)


def trace(m) -> complex:
    return complex(np.trace(np.asarray(m)))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - np.conj(m.T)), initial=0.0) <= tol)


def hermitian_part(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return (M + M†)/2, refusing inputs further than ``tol`` from Hermitian."""
    m = as_matrix(m)
    dev = float(np.max(np.abs(m - np.conj(m.T))))
    if dev > tol:
        raise UnphysicalStateError(
            f"matrix is not Hermitian: max |M - M^dagger| = {dev:.3e} > {tol:.0e}"
        )
    return 0.5 * (m + np.conj(m.T))


class EigenDecomposition(NamedTuple):
    values: np.ndarray  # real, descending
    vectors: ComplexMatrix  # columns are the eigenvectors

    def reconstruct(self) -> ComplexMatrix:
        v = self.vectors
        return _frozen((v * self.values) @ np.conj(v.T))


def _offdiag_norm(a: list[list[complex]]) -> float:
    n = len(a)
    off = [abs(a[i][j]) for i in range(n) for j in range(n) if i != j]
    big = max(off, default=0.0)
    if big == 0.0:
        return 0.0
    return big * math.sqrt(math.fsum((x / big) ** 2 for x in off))


def _jacobi_rotate(a: list[list[complex]], v: list[list[complex]], p: int, q: int) -> None:
    apq = a[p][q]
    mag = abs(apq)
    if mag == 0.0:
        return
    # componentwise: complex division loses subnormal off-diagonals to nan
    phase = complex(apq.real / mag, apq.imag / mag)
    theta = (a[q][q].real - a[p][p].real) / (2.0 * mag)
    if abs(theta) > 1e150:
        t = 0.5 / abs(theta)
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] in the (p, q) plane;
    # A <- J^dagger A J, V <- V J
    cp = phase.conjugate()
    scp, ccp = s * cp, c * cp
    scp_c, ccp_c = scp.conjugate(), ccp.conjugate()
    for row in a:
        x, y = row[p], row[q]
        row[p] = c * x - scp * y
        row[q] = s * x + ccp * y
    for row in v:
        x, y = row[p], row[q]
        row[p] = c * x - scp * y
        row[q] = s * x + ccp * y
    rp, rq = a[p], a[q]
    for k in range(len(rp)):
        x, y = rp[k], rq[k]
        rp[k] = c * x - scp_c * y
        rq[k] = s * x + ccp_c * y
    rp[q] = rq[p] = 0j
    rp[p] = complex(rp[p].real)
    rq[q] = complex(rq[q].real)


def hermitian_eig(h) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Inputs within ``HERMITIAN_TOL`` of Hermitian are symmetrized first;
    anything further off raises :class:`UnphysicalStateError`. Iteration
    stops once the off-diagonal Frobenius norm drops below
    ``JACOBI_RTOL`` times the input norm, and raises
    :class:`ConvergenceError` after ``MAX_SWEEPS`` sweeps.
    """
    herm = hermitian_part(h)
    n = herm.shape[0]
    big = float(np.max(np.abs(herm)))
    target = JACOBI_RTOL * big * float(np.linalg.norm(herm / big)) if big else 0.0
    # plain Python complex arithmetic beats numpy call overhead at n <= 4
    a = herm.tolist()
    v = np.eye(n, dtype=np.complex128).tolist()
    for _ in range(MAX_SWEEPS):
        if _offdiag_norm(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, v, p, q)
    else:
        if _offdiag_norm(a) > target:
            raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    values = np.array([a[i][i].real for i in range(n)])
    vectors = np.array(v, dtype=np.complex128)
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(_frozen(values[order]), _frozen(vectors[:, order].copy()))


def eigvalsh(h) -> np.ndarray:
    return hermitian_eig(h).values


def roundoff_floor(values: np.ndarray) -> float:
    """Magnitude below which a computed eigenvalue is indistinguishable from zero."""
    scale = float(np.max(np.abs(values), initial=0.0))
    return 8.0 * len(values) * np.finfo(float).eps * scale


def clamp_spectrum(values: np.ndarray, tol: float = NEGATIVE_EIG_TOL) -> np.ndarray:
    """Zero out round-off-sized and slightly negative eigenvalues of a PSD matrix.

    Eigenvalues below ``-tol`` raise. Values within the round-off floor are
    snapped to exactly zero, because any square root taken later would
    otherwise turn 1e-17 of noise into 3e-9 of error.
    """
    lowest = float(np.min(values))
    if lowest < -tol:
        raise UnphysicalStateError(
            f"matrix has eigenvalue {lowest:.3e} below -{tol:.0e}; not positive semidefinite"
        )
    floor = roundoff_floor(values)
    return np.where(values <= floor, 0.0, values)


def _spectral_function(eig: EigenDecomposition, fvalues: np.ndarray) -> ComplexMatrix:
    v = eig.vectors
    out = (v * fvalues) @ np.conj(v.T)
    return _frozen(0.5 * (out + np.conj(out.T)))


def matrix_sqrt_psd(h) -> ComplexMatrix:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    eig = hermitian_eig(h)
    return _spectral_function(eig, np.sqrt(clamp_spectrum(eig.values)))


def matrix_abs(h) -> ComplexMatrix:
    """|H|: same eigenvectors as ``h``, eigenvalues replaced by their magnitudes."""
    eig = hermitian_eig(h)
    return _spectral_function(eig, np.abs(eig.values))
