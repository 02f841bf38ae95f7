"""Small dense complex linear algebra used by every other module.

Matrices and vectors are plain ``numpy`` arrays of ``complex128``.  All
routines are pure functions; eigenvalues are always returned in descending
order (by value for Hermitian input, by modulus otherwise) so that report
files are stable across runs.
"""

from __future__ import annotations

import numpy as np

from .errors import CapExceededError, NumericalContractError

# Largest matrix dimension kron() will produce. 2**14 covers every dense
# operator the package builds (n <= 14 qubits).
MAX_KRON_DIM = 1 << 14

HERMITIAN_TOL = 1e-10
GENERAL_EIG_MAX_DIM = 16


def as_cmatrix(m) -> np.ndarray:
    """Coerce to a 2-D complex array and reject non-finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise NumericalContractError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise NumericalContractError("matrix has non-finite entries")
    return a


def as_cvector(v) -> np.ndarray:
    """Coerce to a 1-D complex array and reject non-finite entries."""
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1:
        raise NumericalContractError(f"expected a vector, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise NumericalContractError("vector has non-finite entries")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product with a guard against runaway dimensions."""
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if max(rows, cols) > MAX_KRON_DIM:
        raise CapExceededError(
            f"kron result {rows}x{cols} exceeds the {MAX_KRON_DIM} dimension cap"
        )
    return np.kron(a, b)


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(values, vectors)`` with real eigenvalues in descending order
    and orthonormal eigenvectors as the columns of ``vectors``.  Raises
    :class:`NumericalContractError` if the input is not Hermitian within
    ``tol`` (max absolute deviation).
    """
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise NumericalContractError("eig_hermitian requires a square matrix")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise NumericalContractError(f"matrix is not Hermitian (deviation {dev:.3e})")
    values, vectors = np.linalg.eigh(m)
    order = np.argsort(values)[::-1]
    return values[order].real, vectors[:, order]


def eig_general_small(m) -> np.ndarray:
    """All eigenvalues of a small general matrix, descending by modulus.

    A 2x2 input goes through the closed-form quadratic; anything larger
    (up to dimension 16) is handed to the QR-based solver.
    """
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise NumericalContractError("eig_general_small requires a square matrix")
    dim = m.shape[0]
    if dim > GENERAL_EIG_MAX_DIM:
        raise CapExceededError(
            f"dimension {dim} exceeds eig_general_small cap {GENERAL_EIG_MAX_DIM}"
        )
    if dim == 2:
        tr = m[0, 0] + m[1, 1]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        disc = np.sqrt(tr * tr - 4.0 * det + 0j)
        values = np.array([(tr + disc) / 2.0, (tr - disc) / 2.0])
    else:
        values = np.linalg.eigvals(m)
    order = np.argsort(-np.abs(values), kind="stable")
    return values[order]


def state_fidelity(u, v) -> float:
    """|<u|v>|^2 / (|u|^2 |v|^2); invariant under global phase and scale."""
    u = as_cvector(u)
    v = as_cvector(v)
    if u.shape != v.shape:
        raise NumericalContractError("state_fidelity requires equal dimensions")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise NumericalContractError("state_fidelity is undefined for a zero vector")
    overlap = np.vdot(u, v)
    return float(abs(overlap) ** 2 / (nu**2 * nv**2))


def phase_align(v, reference) -> np.ndarray:
    """Rotate ``v`` by the phase of its largest-modulus entry against ``reference``.

    After alignment two vectors that agree up to a global phase compare
    entrywise.
    """
    v = as_cvector(v)
    reference = as_cvector(reference)
    idx = int(np.argmax(np.abs(reference)))
    if abs(v[idx]) == 0.0 or abs(reference[idx]) == 0.0:
        idx = int(np.argmax(np.abs(v) * np.abs(reference)))
    phase = reference[idx] / v[idx]
    phase /= abs(phase)
    return v * phase
