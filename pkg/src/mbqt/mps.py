"""Matrix-product-state data model, dense expansion, and transfer analysis.

A state over n qubits is stored as per-site matrix pairs (B0, B1) together
with a left boundary column vector and a right boundary row vector.  The
amplitude of the bitstring i_1 ... i_n is

    <R| B[i_n] ... B[i_1] |L>

Dense amplitude indexing is little-endian: bit k-1 of the integer index is
the value of physical qubit k.  Qubit numbering is 1-based throughout.

States are kept unnormalized; ``DenseState.norm`` and
``DenseState.normalized()`` give access to the normalized vector on demand.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceededError, ConfigError, NumericalContractError
from .linalg import eig_general_small

DEFAULT_MAX_DENSE_N = 14
XI_ZERO_TOL = 1e-12
XI_DIVERGING_TOL = 1e-12


def max_dense_n() -> int:
    """Dense-vector site cap; override with the MBQT_MAX_DENSE_N env var."""
    raw = os.environ.get("MBQT_MAX_DENSE_N")
    if raw is None:
        return DEFAULT_MAX_DENSE_N
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"MBQT_MAX_DENSE_N={raw!r} is not an integer") from exc


@dataclass(frozen=True)
class MpsState:
    """Per-site matrix pairs plus boundary vectors.

    ``sites[k]`` is the pair (B0, B1) of site k+1, each of shape
    (D_out, D_in); ``left`` is |L> (dim = D_in of site 1) and ``right``
    holds the components of <R| (dim = D_out of site n), contracted
    without conjugation.
    """

    sites: tuple[tuple[np.ndarray, np.ndarray], ...]
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        if len(self.sites) < 1:
            raise ConfigError("MpsState needs at least one site")
        d_in = self.sites[0][0].shape[1]
        if self.left.shape != (d_in,):
            raise ConfigError("left boundary dimension does not match site 1")
        for k, (b0, b1) in enumerate(self.sites):
            if b0.shape != b1.shape or b0.ndim != 2:
                raise ConfigError(f"site {k + 1} matrices have mismatched shapes")
            if b0.shape[1] != d_in:
                raise ConfigError(f"bond dimension mismatch entering site {k + 1}")
            d_in = b0.shape[0]
        if self.right.shape != (d_in,):
            raise ConfigError("right boundary dimension does not match site n")

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def bond_dim(self) -> int:
        return int(self.sites[0][0].shape[0])

    def site(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Matrices (B0, B1) of 1-based site k."""
        if not 1 <= k <= self.n:
            raise ConfigError(f"site {k} outside 1..{self.n}")
        return self.sites[k - 1]

    def is_uniform(self, tol: float = 1e-12) -> bool:
        b0, b1 = self.sites[0]
        return all(
            np.max(np.abs(c0 - b0)) <= tol and np.max(np.abs(c1 - b1)) <= tol
            for c0, c1 in self.sites[1:]
        )


@dataclass(frozen=True)
class DenseState:
    """Unnormalized 2^n amplitude vector with little-endian bit convention."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (2**self.n,):
            raise ConfigError("amplitude vector length is not 2^n")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> np.ndarray:
        nrm = self.norm
        if nrm == 0.0:
            raise NumericalContractError("cannot normalize the zero state")
        return self.amplitudes / nrm


@dataclass(frozen=True)
class TransferAnalysis:
    """Transfer-matrix spectrum and derived correlation length."""

    eigenvalues: np.ndarray
    lambda1: complex
    xi: float
    diverging: bool = False


@dataclass(frozen=True)
class CanonicalReport:
    """Per-site residuals of the left-canonical condition sum_i B[i]^+ B[i] = I."""

    residuals: tuple[float, ...]
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", all(r <= self.tol for r in self.residuals))


def amplitude(m: MpsState, bits) -> complex:
    """<R| B[i_n] ... B[i_1] |L> for the given bit sequence (qubit 1 first)."""
    bits = _as_bits(bits, m.n)
    v = m.left
    for k, b in enumerate(bits):
        v = m.sites[k][b] @ v
    return complex(m.right @ v)


def _as_bits(bits, n: int) -> list[int]:
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    bits = list(bits)
    if len(bits) != n:
        raise ConfigError(f"bitstring length {len(bits)} != site count {n}")
    if any(b not in (0, 1) for b in bits):
        raise ConfigError("bits must be 0 or 1")
    return bits


def to_dense(m: MpsState) -> DenseState:
    """Expand to the full 2^n amplitude vector (little-endian indexing)."""
    cap = max_dense_n()
    if m.n > cap:
        raise CapExceededError(f"n={m.n} exceeds the dense cap {cap}")
    # vectors[i] after site k holds B[i_k]...B[i_1]|L> for the k low bits i.
    vectors = m.left[np.newaxis, :]
    for b0, b1 in m.sites:
        vectors = np.concatenate([vectors @ b0.T, vectors @ b1.T], axis=0)
    return DenseState(m.n, vectors @ m.right)


def check_left_canonical(m: MpsState, tol: float = 1e-12) -> CanonicalReport:
    """Frobenius residual of sum_i B[i]^+ B[i] - I at every site."""
    residuals = []
    for b0, b1 in m.sites:
        gram = b0.conj().T @ b0 + b1.conj().T @ b1
        residuals.append(float(np.linalg.norm(gram - np.eye(gram.shape[0]))))
    return CanonicalReport(tuple(residuals), tol)


def transfer_matrix(m: MpsState, k: int = 1) -> np.ndarray:
    """T_k = sum_i conj(B[i]) (x) B[i] of site k (D^2 x D^2)."""
    b0, b1 = m.site(k)
    return np.kron(b0.conj(), b0) + np.kron(b1.conj(), b1)


def correlation_length(m: MpsState) -> TransferAnalysis:
    """Correlation length -1/ln|lambda_1| of a translationally invariant MPS.

    Returns xi = 0 when the subleading transfer eigenvalue vanishes and sets
    the diverging flag when |lambda_1| reaches 1.
    """
    if not m.is_uniform():
        raise ConfigError("correlation length is undefined for site-dependent matrices")
    values = eig_general_small(transfer_matrix(m, 1))
    lambda1 = complex(values[1]) if len(values) > 1 else 0.0j
    mod = abs(lambda1)
    if mod >= 1.0 - XI_DIVERGING_TOL:
        return TransferAnalysis(values, lambda1, float("inf"), diverging=True)
    if mod < XI_ZERO_TOL:
        return TransferAnalysis(values, lambda1, 0.0)
    return TransferAnalysis(values, lambda1, float(-1.0 / np.log(mod)))


def apply_local(amps: np.ndarray, n: int, matrix: np.ndarray, first_site: int) -> np.ndarray:
    """Apply a w-qubit operator to qubits first_site..first_site+w-1.

    The operator matrix is indexed little-endian over its span: local bit b
    corresponds to qubit first_site + b.
    """
    dim = matrix.shape[0]
    w = dim.bit_length() - 1
    if matrix.shape != (dim, dim) or 2**w != dim:
        raise ConfigError("operator matrix must be square with power-of-2 dimension")
    if not 1 <= first_site <= n - w + 1:
        raise ConfigError(f"span {first_site}..{first_site + w - 1} outside 1..{n}")
    psi = amps.reshape([2] * n)  # axis a holds qubit n - a
    op = matrix.reshape([2] * (2 * w))
    # Input index bit b of the operator sits at tensor position w + (w-1-b);
    # qubit q lives on state axis n - q.
    in_positions = [w + (w - 1 - b) for b in range(w)]
    state_axes = [n - (first_site + b) for b in range(w)]
    out = np.tensordot(op, psi, axes=(in_positions, state_axes))
    # tensordot output: operator out-axes (bit w-1 first) then untouched axes.
    dest = [n - (first_site + w - 1 - t) for t in range(w)]
    out = np.moveaxis(out, list(range(w)), dest)
    return out.reshape(-1)


def embed_operator(matrix: np.ndarray, n: int, first_site: int) -> np.ndarray:
    """Dense 2^n x 2^n embedding of a local operator (little-endian span)."""
    dim = matrix.shape[0]
    w = dim.bit_length() - 1
    low = first_site - 1
    high = n - (first_site + w - 1)
    if low < 0 or high < 0:
        raise ConfigError("span outside the chain")
    full = matrix
    if low:
        full = np.kron(full, np.eye(2**low, dtype=complex))
    if high:
        full = np.kron(np.eye(2**high, dtype=complex), full)
    return full


def expectation(state: DenseState, matrix: np.ndarray, first_site: int) -> complex:
    """<psi|O|psi> on the normalized state."""
    psi = state.normalized()
    return complex(np.vdot(psi, apply_local(psi, state.n, matrix, first_site)))


def two_point_correlator(state: DenseState, op_a, op_b) -> complex:
    """Connected correlator <O_a O_b> - <O_a><O_b> of two local operators.

    ``op_a`` and ``op_b`` carry their own spans (LocalOperator) and must not
    overlap.
    """
    span_a = set(op_a.sites)
    span_b = set(op_b.sites)
    if span_a & span_b:
        raise ConfigError("correlator operators must act on disjoint sites")
    psi = state.normalized()
    n = state.n
    a_psi = apply_local(psi, n, op_a.matrix, op_a.sites[0])
    b_psi = apply_local(psi, n, op_b.matrix, op_b.sites[0])
    ab = np.vdot(psi, apply_local(b_psi, n, op_a.matrix, op_a.sites[0]))
    return complex(ab - np.vdot(psi, a_psi) * np.vdot(psi, b_psi))


def mps_to_json_dict(m: MpsState) -> dict:
    """JSON-ready dict: complex entries become [re, im] pairs."""

    def cplx(a):
        a = np.asarray(a, dtype=complex)
        return np.stack([a.real, a.imag], axis=-1).tolist()

    return {
        "n": m.n,
        "bond_dim": m.bond_dim,
        "sites": [{"B0": cplx(b0), "B1": cplx(b1)} for b0, b1 in m.sites],
        "left": cplx(m.left),
        "right": cplx(m.right),
    }


def mps_from_json_dict(data: dict) -> MpsState:
    """Inverse of :func:`mps_to_json_dict`."""

    def decomplex(a):
        arr = np.asarray(a, dtype=float)
        return arr[..., 0] + 1j * arr[..., 1]

    required = {"n", "bond_dim", "sites", "left", "right"}
    unknown = set(data) - required
    if unknown:
        raise ConfigError(f"unknown MPS JSON keys: {sorted(unknown)}")
    sites = tuple(
        (decomplex(site["B0"]), decomplex(site["B1"])) for site in data["sites"]
    )
    state = MpsState(sites, decomplex(data["left"]), decomplex(data["right"]))
    if state.n != data["n"]:
        raise ConfigError("MPS JSON 'n' does not match the site list")
    return state
