"""Dense complex matrix kernel.

The Hermitian eigensolver is a cyclic Jacobi iteration with a fixed
row-major sweep order, so repeated calls on the same input produce
bit-identical output.  Unitary operators are diagonalized by reducing to
the Hermitian problem through a fixed linear combination of U and its
adjoint; the resulting vectors are verified against U directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, DimensionMismatchError, NotHermitianError

HERMITIAN_ATOL = 1e-12
UNITARY_ATOL = 1e-10
EIGENVECTOR_RESIDUAL_TOL = 1e-8

# arbitrary fixed phase for the unitary-to-Hermitian reduction; doubled on
# retry when two distinct unitary eigenvalues land on the same real part
_BASE_PHASE = 0.5371
_MAX_RETRIES = 3


@dataclass(frozen=True)
class HermitianEig:
    """Spectral decomposition: eigenvalues descending, eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square_complex(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError("matrix contains non-finite entries")
    return A


def _check_hermitian(A: np.ndarray) -> np.ndarray:
    A = _as_square_complex(A)
    dev = np.abs(A - A.conj().T).max() if A.size else 0.0
    if dev > HERMITIAN_ATOL:
        raise NotHermitianError(f"max |A - A^H| = {dev:.3e} exceeds {HERMITIAN_ATOL:.1e}")
    return A


def hermitian_eig(A: np.ndarray, tol_factor: float = 1e-13, max_sweeps: int = 60) -> HermitianEig:
    """Full spectral decomposition of a Hermitian matrix by cyclic Jacobi.

    Each sweep visits the strict upper triangle in row-major order and
    applies a complex plane rotation annihilating the pivot entry.
    Rotations below the absolute threshold are skipped; the sweep loop
    stops when every off-diagonal entry is below it.

    Raises
    ------
    NotHermitianError
        If ``max |A - A^H|`` exceeds 1e-12.
    """
    A = _check_hermitian(A).copy()
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    if n <= 1:
        w = A.real.reshape(-1).copy() if n else np.zeros(0)
        return HermitianEig(w, V)

    scale = max(1.0, float(np.abs(A).max()))
    tol = tol_factor * scale
    sqrt = np.sqrt
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                apq = A[i, j]
                r = abs(apq)
                if r <= tol:
                    continue
                rotated = True
                app = A[i, i].real
                aqq = A[j, j].real
                phase = apq / r
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                spc = np.conj(sp)
                cpc = c * np.conj(phase)
                cp = c * phase
                ai = A[:, i].copy()
                aj = A[:, j]
                A[:, i] = c * ai - spc * aj
                A[:, j] = s * ai + cpc * aj
                ri = A[i].copy()
                rj = A[j]
                A[i] = c * ri - sp * rj
                A[j] = s * ri + cp * rj
                vi = V[:, i].copy()
                vj = V[:, j]
                V[:, i] = c * vi - spc * vj
                V[:, j] = s * vi + cpc * vj
                A[i, j] = 0.0
                A[j, i] = 0.0
                A[i, i] = A[i, i].real
                A[j, j] = A[j, j].real
        if not rotated:
            break
    else:
        raise RuntimeError("Jacobi iteration did not converge; input may be pathological")

    w = np.diag(A).real.copy()
    order = np.argsort(-w, kind="stable")
    return HermitianEig(w[order], np.ascontiguousarray(V[:, order]))


def op_norm(A: np.ndarray) -> float:
    """Operator norm of a Hermitian matrix: max |eigenvalue|."""
    eig = hermitian_eig(A)
    return float(np.abs(eig.eigenvalues).max()) if eig.eigenvalues.size else 0.0


def trace_power(A: np.ndarray, k: int) -> float:
    """Tr(A^k) of a Hermitian matrix, computed through its eigenvalues."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    eig = hermitian_eig(A)
    return float(np.sum(eig.eigenvalues**k))


def gram(vectors: np.ndarray) -> np.ndarray:
    """Gram matrix G_ij = <v_i, v_j> = sum_t v_i(t) * conj(v_j(t)).

    ``vectors`` holds the vectors as columns.  The result is Hermitian by
    construction.
    """
    V = np.asarray(vectors, dtype=np.complex128)
    if V.ndim != 2:
        raise DimensionMismatchError("expected a 2-D array with vectors as columns")
    return V.T @ V.conj()


def anchor_index(v: np.ndarray, rtol: float = 1e-9) -> int:
    """Lowest index whose magnitude ties the maximum within a relative window.

    The window makes the choice stable for flat-magnitude vectors, where
    exact argmax would land on rounding noise.
    """
    mags = np.abs(v)
    return int(np.argmax(mags >= mags.max() * (1.0 - rtol)))


def phase_normalize(v: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-magnitude entry is real and positive.

    Ties in magnitude resolve to the lowest index.  The chosen entry is
    set to its modulus exactly.
    """
    v = np.asarray(v, dtype=np.complex128).copy()
    k = anchor_index(v)
    m = abs(v[k])
    if m == 0.0:
        return v
    v *= np.conj(v[k]) / m
    v[k] = m
    return v


def unitary_eigenbasis(U: np.ndarray) -> np.ndarray:
    """Orthonormal eigenbasis of a unitary matrix with distinct eigenvalues.

    Diagonalizes H = alpha*U + conj(alpha)*U^H for a fixed phase alpha and
    checks every resulting vector against U itself.  When two distinct
    unitary eigenvalues collapse onto one real part of H, the phase is
    doubled and the reduction retried (at most 3 retries).  Columns are
    phase-normalized; their order follows the Hermitian solver output.

    Raises
    ------
    DegenerateSpectrumError
        If some vector still fails the eigenvector residual check after
        all retries.
    """
    U = _as_square_complex(U)
    n = U.shape[0]
    dev = np.abs(U.conj().T @ U - np.eye(n)).max() if n else 0.0
    if dev > UNITARY_ATOL:
        raise ValueError(f"matrix is not unitary: max |U^H U - I| = {dev:.3e}")

    Uh = U.conj().T
    worst = None
    for attempt in range(_MAX_RETRIES + 1):
        alpha = np.exp(1j * _BASE_PHASE * (2**attempt))
        H = alpha * U + np.conj(alpha) * Uh
        vecs = hermitian_eig(H).eigenvectors
        lam = np.einsum("ij,ik,kj->j", vecs.conj(), U, vecs)
        resid = np.abs(U @ vecs - vecs * lam).max(axis=0)
        worst = float(resid.max())
        if worst <= EIGENVECTOR_RESIDUAL_TOL:
            out = np.empty_like(vecs)
            for col in range(n):
                out[:, col] = phase_normalize(vecs[:, col])
            return out
    raise DegenerateSpectrumError(
        f"eigenvector residual {worst:.3e} exceeds {EIGENVECTOR_RESIDUAL_TOL:.1e} "
        f"after {_MAX_RETRIES} retries; spectrum may be degenerate"
    )
