"""Correlation-space measurement engine.

Measuring the leftmost unmeasured qubit in the basis defined by
(vartheta, phi1, phi2) applies one of two operators to the left boundary
vector:

    B[phi_0] = e^{i phi1} cos(vartheta) B[0] + e^{i phi2} sin(vartheta) B[1]
    B[phi_1] = e^{-i phi2} sin(vartheta) B[0] - e^{-i phi1} cos(vartheta) B[1]

The protocol basis (vartheta = pi/4, phi2 = -phi1) turns the built-in
families into gate teleporters: the cluster family applies X^m H R_Z(phi),
and the one-angle family applies Z R_Y(theta) R_Z(phi) (outcome 0) or that
gate times a trailing Z (outcome 1).

Branch probabilities are the correlation-space weights
|B[phi_m] v|^2 / sum_m |B[phi_m] v|^2; for the built-in resources the
measurement operators are proportional to unitaries, so these coincide with
the physical Born probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import gates
from .errors import ConfigError, NumericalContractError
from .families import (
    SumFamilySpec,
    ThetaFamilySpec,
    family_mps,
)
from .linalg import state_fidelity
from .mps import DenseState, MpsState, to_dense

PROTOCOL_VARTHETA = np.pi / 4.0
CLUSTER_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class MeasurementBasis:
    """Measurement basis parameters; (vartheta, phi1, phi2) are real angles."""

    vartheta: float
    phi1: float
    phi2: float

    @classmethod
    def protocol(cls, phi: float) -> "MeasurementBasis":
        """The gate-teleportation basis: vartheta = pi/4, phi2 = -phi1 = -phi."""
        return cls(PROTOCOL_VARTHETA, float(phi), -float(phi))

    def ket(self, outcome: int) -> np.ndarray:
        """Basis vector |phi_m> as a 2-component column."""
        c, s = np.cos(self.vartheta), np.sin(self.vartheta)
        if outcome == 0:
            return np.array(
                [np.exp(-1j * self.phi1) * c, np.exp(-1j * self.phi2) * s]
            )
        if outcome == 1:
            return np.array(
                [np.exp(1j * self.phi2) * s, -np.exp(1j * self.phi1) * c]
            )
        raise ConfigError("outcome must be 0 or 1")


@dataclass(frozen=True)
class CorrelationState:
    """Unnormalized vector in the D-dimensional correlation space."""

    vector: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.vector.shape[0])

    def normalized(self) -> np.ndarray:
        nrm = np.linalg.norm(self.vector)
        if nrm == 0.0:
            raise NumericalContractError("correlation state collapsed to zero")
        return self.vector / nrm


def extract_logical(state: CorrelationState) -> tuple[np.ndarray, np.ndarray]:
    """Split a D=4 correlation vector into its logical and junk halves."""
    if state.dim != 4:
        raise ConfigError("logical/junk split requires a D=4 correlation state")
    return state.vector[:2].copy(), state.vector[2:].copy()


@dataclass(frozen=True)
class TeleportStep:
    basis: MeasurementBasis
    outcome: int
    probability: float
    applied: np.ndarray


@dataclass
class TeleportRecord:
    """Step log plus the ordered operator product and the tracked Pauli frame.

    ``accumulated`` is applied_k ... applied_1.  With feed-forward on (or all
    outcomes 0) the compiled protocol gate factorizes as
    X^x_power Z^z_power times the ideal product of H R_Z(phi_k) gates.
    """

    steps: list[TeleportStep] = field(default_factory=list)
    accumulated: np.ndarray | None = None
    x_power: int = 0
    z_power: int = 0

    @property
    def outcomes(self) -> tuple[int, ...]:
        return tuple(s.outcome for s in self.steps)

    @property
    def byproduct_exponents(self) -> tuple[int, int]:
        return (self.x_power, self.z_power)


def measurement_operators(
    basis: MeasurementBasis, site: tuple[np.ndarray, np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """The pair (B[phi_0], B[phi_1]) for one site's matrices."""
    b0, b1 = site
    c, s = np.cos(basis.vartheta), np.sin(basis.vartheta)
    op0 = np.exp(1j * basis.phi1) * c * b0 + np.exp(1j * basis.phi2) * s * b1
    op1 = np.exp(-1j * basis.phi2) * s * b0 - np.exp(-1j * basis.phi1) * c * b1
    return op0, op1


def step(
    state: CorrelationState,
    ops: tuple[np.ndarray, np.ndarray],
    outcome: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[CorrelationState, int, float]:
    """One measurement: returns (new state, outcome, branch probability).

    ``outcome`` forces the branch; otherwise it is sampled from ``rng``.
    """
    v = state.vector
    branch0 = ops[0] @ v
    branch1 = ops[1] @ v
    w0 = float(np.linalg.norm(branch0) ** 2)
    w1 = float(np.linalg.norm(branch1) ** 2)
    total = w0 + w1
    if total <= 0.0:
        raise NumericalContractError("both measurement branches annihilate the state")
    p0 = w0 / total
    if outcome is None:
        if rng is None:
            raise ConfigError("sampling an outcome requires an rng")
        outcome = 0 if rng.random() < p0 else 1
    if outcome not in (0, 1):
        raise ConfigError("outcome must be 0 or 1")
    prob = p0 if outcome == 0 else 1.0 - p0
    new = CorrelationState(branch0 if outcome == 0 else branch1)
    return new, int(outcome), prob


def feedforward_frame(outcomes) -> tuple[int, int]:
    """Pauli frame (x_power, z_power) after the given protocol outcomes."""
    x, z = 0, 0
    for m in outcomes:
        x, z = (int(m) + z) % 2, x
    return x, z


def feedforward_plan(target_angles, outcomes_so_far) -> float:
    """Adapted angle for the next measurement.

    The sign rule phi' = (-1)^sigma phi, with sigma the X power of the
    current Pauli frame, keeps the compiled gate equal to the ideal product
    of H R_Z(phi_k) gates up to the tracked frame.
    """
    k = len(outcomes_so_far)
    if k >= len(target_angles):
        raise ConfigError("no target angle left to adapt")
    x, _ = feedforward_frame(outcomes_so_far)
    return float((-1) ** x * target_angles[k])


def _supports_feedforward(spec) -> bool:
    if isinstance(spec, SumFamilySpec):
        return True
    if isinstance(spec, ThetaFamilySpec):
        return all(abs(t - np.pi / 4) <= CLUSTER_ANGLE_TOL for t in spec.thetas)
    return False


def run_protocol(
    spec,
    angles,
    outcomes=None,
    seed: int | None = None,
    feedforward: bool = False,
    _mps: MpsState | None = None,
) -> tuple[TeleportRecord, CorrelationState]:
    """Measure the first len(angles) qubits in the protocol basis.

    ``outcomes`` forces the branch sequence; otherwise outcomes are sampled
    reproducibly from ``seed``.  With ``feedforward`` the angles are adapted
    so the compiled gate is outcome-independent up to the tracked Pauli
    frame; this is only available for resources whose byproducts are Pauli
    (the cluster point and the direct-sum family).
    """
    mps = _mps if _mps is not None else family_mps(spec)
    angles = [float(a) for a in angles]
    if len(angles) > mps.n:
        raise ConfigError("angle schedule longer than the chain")
    if outcomes is not None:
        outcomes = [int(m) for m in outcomes]
        if len(outcomes) != len(angles):
            raise ConfigError("outcomes and angles must have equal length")
    if feedforward and not _supports_feedforward(spec):
        raise ConfigError(
            "no deterministic feed-forward plan exists for this resource"
        )
    rng = np.random.default_rng(seed) if outcomes is None else None
    return _run(mps, angles, outcomes, rng, adapt=feedforward)


def _run(mps, angles, outcomes, rng, adapt: bool) -> tuple[TeleportRecord, CorrelationState]:
    record = TeleportRecord()
    state = CorrelationState(mps.left.copy())
    accumulated = np.eye(mps.bond_dim, dtype=complex)
    for k, phi in enumerate(angles):
        adapted = ((-1) ** record.x_power * phi) if adapt else phi
        basis = MeasurementBasis.protocol(adapted)
        ops = measurement_operators(basis, mps.site(k + 1))
        forced = outcomes[k] if outcomes is not None else None
        state, outcome, prob = step(state, ops, forced, rng)
        applied = ops[outcome]
        accumulated = applied @ accumulated
        record.steps.append(TeleportStep(basis, outcome, prob, applied))
        record.x_power, record.z_power = (
            (outcome + record.z_power) % 2,
            record.x_power,
        )
    record.accumulated = accumulated
    return record, state


def ideal_protocol_gate(angles) -> np.ndarray:
    """The target single-qubit gate prod_k H R_Z(phi_k) (latest leftmost)."""
    gate = np.eye(2, dtype=complex)
    for phi in angles:
        gate = gates.H @ gates.rotation_z(phi) @ gate
    return gate


def gate_infidelity(a: np.ndarray, b: np.ndarray) -> float:
    """1 - |tr(a^+ b)|^2 / (|a|_F^2 |b|_F^2); zero iff b is proportional to a."""
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise NumericalContractError("gate_infidelity is undefined for a zero matrix")
    overlap = abs(np.trace(a.conj().T @ b)) ** 2 / (na**2 * nb**2)
    return float(max(0.0, 1.0 - overlap))


def byproduct_discrepancy(theta: float, phi: float) -> float:
    """Spectral norm of R_Y(-t)R_Z(p)R_Y(t) - R_Y(t)R_Z(p)R_Y(-t)."""
    left = gates.rotation_y(-theta) @ gates.rotation_z(phi) @ gates.rotation_y(theta)
    right = gates.rotation_y(theta) @ gates.rotation_z(phi) @ gates.rotation_y(-theta)
    return float(np.linalg.norm(left - right, ord=2))


def _logical_block(record: TeleportRecord, spec) -> np.ndarray:
    acc = record.accumulated
    if isinstance(spec, SumFamilySpec):
        return acc[:2, :2]
    return acc


def enumerate_branch_records(spec, angles, feedforward: bool):
    """Run every forced-outcome branch; yields (outcomes, record, final state)."""
    k = len(angles)
    mps = family_mps(spec)
    for branch in product((0, 1), repeat=k):
        record, state = run_protocol(
            spec, angles, outcomes=branch, feedforward=feedforward, _mps=mps
        )
        yield branch, record, state


def certify_deterministic(spec, angles) -> float:
    """Max infidelity, over all outcome branches, of the frame-corrected
    logical gate against the ideal protocol gate (feed-forward on)."""
    ideal = ideal_protocol_gate(angles)
    worst = 0.0
    for _, record, _ in enumerate_branch_records(spec, angles, feedforward=True):
        logical = _logical_block(record, spec)
        corrected = gates.pauli_power(record.x_power, record.z_power) @ logical
        worst = max(worst, gate_infidelity(ideal, corrected))
    return worst


_PAULI_OPTIONS = tuple(gates.PAULIS.values())


def certify_nondeterministic_margin(spec: ThetaFamilySpec, angles) -> float:
    """How far the branches are from Pauli-equivalent, with adaptation applied.

    Runs every outcome branch with the cluster angle-adaptation rule, then
    for each branch searches all 16 left/right Pauli dressings of the
    all-zero-outcome branch gate.  Returns the largest per-branch minimum
    infidelity; a resource with Pauli byproducts yields 0.
    """
    records = [
        (branch, rec)
        for branch, rec, _ in _enumerate_adapted_branches(spec, angles)
    ]
    reference = records[0][1].accumulated
    worst = 0.0
    for _, rec in records[1:]:
        best = min(
            gate_infidelity(rec.accumulated, p @ reference @ q)
            for p in _PAULI_OPTIONS
            for q in _PAULI_OPTIONS
        )
        worst = max(worst, best)
    return worst


def _enumerate_adapted_branches(spec, angles):
    """Branch enumeration with the adaptation rule applied regardless of the
    resource (used to certify that adaptation fails off the cluster point)."""
    mps = family_mps(spec)
    for branch in product((0, 1), repeat=len(angles)):
        record, state = _run(mps, list(angles), list(branch), None, adapt=True)
        yield branch, record, state


def project_dense(state: DenseState, basis: MeasurementBasis, outcome: int) -> DenseState:
    """Project the first remaining qubit onto <phi_m| and drop it."""
    bra = basis.ket(outcome).conj()
    resh = state.amplitudes.reshape(-1, 2)
    return DenseState(state.n - 1, resh[:, 0] * bra[0] + resh[:, 1] * bra[1])


def protocol_oracle_fidelities(spec, record: TeleportRecord) -> list[float]:
    """Dense-projection oracle for a finished run.

    Replays the recorded bases/outcomes on the full dense state and compares,
    after every prefix, against the MPS prediction (remaining chain with the
    transformed left boundary).  Returns one fidelity per prefix.
    """
    mps = family_mps(spec)
    dense = to_dense(mps)
    boundary = mps.left.copy()
    fidelities = []
    for step_entry in record.steps:
        dense = project_dense(dense, step_entry.basis, step_entry.outcome)
        boundary = step_entry.applied @ boundary
        rest = mps.sites[len(fidelities) + 1 :]
        if rest:
            predicted = to_dense(MpsState(rest, boundary, mps.right)).amplitudes
        else:
            predicted = np.array([mps.right @ boundary])
        fidelities.append(state_fidelity(dense.amplitudes, predicted))
    return fidelities
