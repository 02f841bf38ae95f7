"""Entanglement spectrum across a cut, via three independent routes.

1. Boundary-contracted covariance matrices V^L and V^R whose product's
   eigenvalues are the nonzero reduced-density-matrix spectrum.  Both are
   built by transfer-style contraction from the chain ends (cost linear in
   n), never by enumerating bitstrings.
2. A closed form for the one-angle family on bulk cuts, in terms of the
   boundary imbalances alpha and beta.
3. A dense reduced-density-matrix oracle for small chains.

Boundary vectors are normalized internally, so all three routes report the
spectrum of the normalized state; ``raw_eigenvalues`` keeps the unnormalized
pair whose sum is (1 + alpha beta cos 2 t_cut) / 2 on bulk cuts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, ConfigError, NumericalContractError
from .families import ThetaFamilySpec
from .linalg import eig_general_small
from .mps import DenseState, MpsState, max_dense_n

PSD_TOL = 1e-10


@dataclass(frozen=True)
class CovariancePair:
    """Left/right covariance matrices for one bipartition."""

    vl: np.ndarray
    vr: np.ndarray
    cut: int


@dataclass(frozen=True)
class SpectrumResult:
    """Entanglement spectrum with optional closed-form diagnostics."""

    raw_eigenvalues: tuple[float, ...]
    normalized: tuple[float, ...]
    gap: float
    alpha: float | None = None
    beta: float | None = None


def _check_psd(mat: np.ndarray, label: str) -> np.ndarray:
    dev = float(np.max(np.abs(mat - mat.conj().T)))
    if dev > PSD_TOL:
        raise NumericalContractError(f"{label} is not Hermitian (deviation {dev:.3e})")
    mat = (mat + mat.conj().T) / 2.0
    low = float(np.min(np.linalg.eigvalsh(mat)))
    if low < -PSD_TOL:
        raise NumericalContractError(f"{label} has negative eigenvalue {low:.3e}")
    return mat


def covariance_matrices(m: MpsState, cut: int) -> CovariancePair:
    """V^L and V^R for the bipartition with ``cut`` qubits on the left.

    V^L accumulates B . B^+ from the left boundary through site ``cut``;
    V^R accumulates B^+ . B from the right boundary down to site cut + 1.
    """
    if not 1 <= cut <= m.n - 1:
        raise ConfigError(f"cut must lie in 1..{m.n - 1}")
    left = m.left / np.linalg.norm(m.left)
    right = m.right / np.linalg.norm(m.right)

    vl = np.outer(left, left.conj())
    for k in range(1, cut + 1):
        b0, b1 = m.site(k)
        vl = b0 @ vl @ b0.conj().T + b1 @ vl @ b1.conj().T

    r = right.conj()
    vr = np.outer(r, r.conj())
    for k in range(m.n, cut, -1):
        b0, b1 = m.site(k)
        vr = b0.conj().T @ vr @ b0 + b1.conj().T @ vr @ b1

    return CovariancePair(_check_psd(vl, "V^L"), _check_psd(vr, "V^R"), cut)


def _spectrum_from_raw(raw: np.ndarray) -> SpectrumResult:
    real = raw.real
    worst_imag = float(np.max(np.abs(raw.imag))) if raw.size else 0.0
    if worst_imag > PSD_TOL:
        raise NumericalContractError(
            f"spectrum has imaginary part {worst_imag:.3e}"
        )
    if float(np.min(real)) < -PSD_TOL:
        raise NumericalContractError(
            f"spectrum has negative value {float(np.min(real)):.3e}"
        )
    real = np.clip(real, 0.0, None)
    order = np.argsort(real)[::-1]
    real = real[order]
    total = float(np.sum(real))
    if total <= 0.0:
        raise NumericalContractError("spectrum sums to zero")
    normalized = real / total
    gap = float((real[0] - real[1]) / real[0]) if len(real) > 1 and real[0] > 0 else 0.0
    return SpectrumResult(tuple(real.tolist()), tuple(normalized.tolist()), gap)


def es_from_covariance(pair: CovariancePair) -> SpectrumResult:
    """Eigenvalues of V^R V^L, clamped and normalized to probabilities."""
    product = pair.vr @ pair.vl
    return _spectrum_from_raw(eig_general_small(product))


def closed_form_alpha_beta(spec: ThetaFamilySpec, cut: int) -> tuple[float, float]:
    """Boundary imbalances alpha (right) and beta (left) for a bulk cut."""
    a_l, b_l = (complex(c) for c in spec.left)
    norm_l = abs(a_l) ** 2 + abs(b_l) ** 2
    a_r, b_r = (complex(c) for c in spec.right)
    norm_r = abs(a_r) ** 2 + abs(b_r) ** 2
    c, s = np.cos(spec.thetas[-1]), np.sin(spec.thetas[-1])
    x1 = a_r * c + b_r * s
    x2 = a_r * s - b_r * c
    alpha = (abs(x1) ** 2 - abs(x2) ** 2) / norm_r
    beta = (abs(a_l) ** 2 - abs(b_l) ** 2) / norm_l
    for k in range(cut + 1, spec.n):  # sites cut+1 .. n-1
        alpha *= np.cos(2.0 * spec.thetas[k - 1])
    for k in range(1, cut):  # sites 1 .. cut-1
        beta *= np.cos(2.0 * spec.thetas[k - 1])
    return float(alpha), float(beta)


def closed_form_spectrum(spec: ThetaFamilySpec, cut: int) -> SpectrumResult:
    """Bulk-cut spectrum of the one-angle family from alpha and beta.

    The raw pair is
        (1/4) [1 + a b c +- sqrt((1 + a b c)^2 - (1 - a^2)(1 - b^2))]
    with c = cos(2 t_cut).  Defined for bulk cuts 2 < cut < n - 1.
    """
    if not 2 < cut < spec.n - 1:
        raise ConfigError(f"closed form needs a bulk cut 2 < cut < {spec.n - 1}")
    alpha, beta = closed_form_alpha_beta(spec, cut)
    c_cut = float(np.cos(2.0 * spec.thetas[cut - 1]))
    trace_term = 1.0 + alpha * beta * c_cut
    radicand = trace_term**2 - (1.0 - alpha**2) * (1.0 - beta**2)
    if radicand < -PSD_TOL:
        raise NumericalContractError(f"negative radicand {radicand:.3e}")
    root = np.sqrt(max(radicand, 0.0))
    raw = np.array([(trace_term + root) / 4.0, (trace_term - root) / 4.0])
    result = _spectrum_from_raw(raw)
    return SpectrumResult(
        result.raw_eigenvalues, result.normalized, result.gap, alpha, beta
    )


def dense_rdm_spectrum(state: DenseState, cut: int) -> np.ndarray:
    """Descending eigenvalues of the left-block reduced density matrix.

    The Gram matrix is formed on the smaller side of the cut; the left-block
    spectrum is the nonzero part padded with exact zeros up to 2^cut.
    """
    n = state.n
    cap = max_dense_n()
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the dense cap {cap}")
    if not 1 <= cut <= n - 1:
        raise ConfigError(f"cut must lie in 1..{n - 1}")
    psi = state.normalized().reshape(2 ** (n - cut), 2**cut)
    if cut <= n - cut:
        rho = psi.T @ psi.conj()
    else:
        rho = psi @ psi.conj().T
    rho = (rho + rho.conj().T) / 2.0
    values = np.linalg.eigvalsh(rho)[::-1]
    values = np.clip(values.real, 0.0, None)
    full = np.zeros(2**cut)
    full[: len(values)] = values
    return full


def degeneracy_gap(spec: ThetaFamilySpec, cut: int) -> float:
    """Relative splitting (l+ - l-) / l+ of the bulk-cut closed form."""
    return closed_form_spectrum(spec, cut).gap
