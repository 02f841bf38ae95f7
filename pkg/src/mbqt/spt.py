"""Generalized stabilizers, Z2 x Z2 symmetry operators, and their algebra.

The one-angle family is stabilized by non-unitary, non-Hermitian operators
built from the diagonal two-qubit factor P(t) = diag(cot t, tan t, tan t,
cot t) dressed with Pauli gates:

    bulk   S at qubit j:  P(t_{j-1}) on (j-1, j) . P(t_j) on (j, j+1) . Z X Z
    left   S:             P(t_1) on (1, 2) . X_1 Z_2
    right  S:             P(t_{n-1}) on (n-1, n) . Z_{n-1} X_n

Each P factor carries the entangler angle of its own span; for the state
built from angles t_1 .. t_n the final span (n-1, n) carries t_{n-1}.

The global operators are odd/even products of these stabilizers (even n).
Every operator here has exactly one nonzero entry per row, so they are kept
as a bit-flip mask plus a diagonal coefficient vector and only materialized
densely on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import gates
from .errors import ConfigError, NumericalContractError
from .families import LocalOperator, local_entangler, theta_site_matrices
from .mps import DenseState, MpsState

SIGN_TOL = 1e-10
AGREEMENT_TOL = 1e-10
SYMMETRY_MAX_N = 12

GROUP = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class FlipDiagOperator:
    """Operator with one nonzero per row: (M psi)(i) = diag[i] * psi(i ^ mask)."""

    n: int
    mask: int
    diag: np.ndarray

    @classmethod
    def identity(cls, n: int) -> "FlipDiagOperator":
        return cls(n, 0, np.ones(2**n, dtype=complex))

    @classmethod
    def diagonal(cls, n: int, table: np.ndarray, first_site: int) -> "FlipDiagOperator":
        """Embed a diagonal local operator (little-endian span table)."""
        w = len(table).bit_length() - 1
        idx = np.arange(2**n)
        local = (idx >> (first_site - 1)) & ((1 << w) - 1)
        return cls(n, 0, np.asarray(table, dtype=complex)[local])

    @classmethod
    def x_gate(cls, n: int, site: int) -> "FlipDiagOperator":
        return cls(n, 1 << (site - 1), np.ones(2**n, dtype=complex))

    @classmethod
    def z_gate(cls, n: int, site: int) -> "FlipDiagOperator":
        idx = np.arange(2**n)
        return cls(n, 0, 1.0 - 2.0 * ((idx >> (site - 1)) & 1).astype(complex))

    def __matmul__(self, other: "FlipDiagOperator") -> "FlipDiagOperator":
        if self.n != other.n:
            raise ConfigError("operator size mismatch")
        idx = np.arange(2**self.n)
        return FlipDiagOperator(
            self.n, self.mask ^ other.mask, self.diag * other.diag[idx ^ self.mask]
        )

    def apply(self, psi: np.ndarray) -> np.ndarray:
        idx = np.arange(2**self.n)
        return self.diag * psi[idx ^ self.mask]

    def to_matrix(self) -> np.ndarray:
        dim = 2**self.n
        m = np.zeros((dim, dim), dtype=complex)
        idx = np.arange(dim)
        m[idx, idx ^ self.mask] = self.diag
        return m


def _compose(factors) -> FlipDiagOperator:
    """Product of factors written left to right (rightmost acts first)."""
    total = None
    for f in factors:
        total = f if total is None else total @ f
    return total


def _pauli_span_matrix(labels: str) -> np.ndarray:
    """Little-endian span matrix of a Pauli string; labels[b] acts on span bit b."""
    m = np.eye(1, dtype=complex)
    for ch in labels:  # kron builds high bits last
        m = np.kron(gates.PAULIS[ch], m)
    return m


def generalized_stabilizer(thetas, position, n: int | None = None) -> LocalOperator:
    """One stabilizer as a dense local operator.

    ``position`` is the 1-based qubit carrying the X gate for a bulk
    stabilizer (span (j-1, j+1), ``thetas`` = the two span angles), or
    'left' / 'right' for the boundary operators (``thetas`` = one span
    angle; 'right' also needs the chain length ``n``).
    """
    if position == "left":
        p = local_entangler("p_theta", float(np.atleast_1d(thetas)[0]), (1, 2)).matrix
        return LocalOperator((1, 2), p @ _pauli_span_matrix("XZ"))
    if position == "right":
        if n is None:
            raise ConfigError("right boundary stabilizer needs the chain length")
        p = local_entangler("p_theta", float(np.atleast_1d(thetas)[0]), (n - 1, n)).matrix
        return LocalOperator((n - 1, n), p @ _pauli_span_matrix("ZX"))
    j = int(position)
    if j < 2:
        raise ConfigError("bulk stabilizer position must be >= 2")
    t_left, t_right = (float(t) for t in thetas)
    p_left = np.kron(
        np.eye(2, dtype=complex), local_entangler("p_theta", t_left, (j - 1, j)).matrix
    )
    p_right = np.kron(
        local_entangler("p_theta", t_right, (j, j + 1)).matrix, np.eye(2, dtype=complex)
    )
    return LocalOperator(
        (j - 1, j, j + 1), p_left @ p_right @ _pauli_span_matrix("ZXZ")
    )


@dataclass(frozen=True)
class StabilizerSet:
    """Left boundary, bulk, and right boundary stabilizers of a family state."""

    left: LocalOperator
    bulk: tuple[LocalOperator, ...]
    right: LocalOperator

    def labeled(self):
        yield "S_left", self.left
        for k, op in enumerate(self.bulk, start=2):
            yield f"S_bulk[{k}]", op
        yield "S_right", self.right


def stabilizer_set(thetas, n: int | None = None) -> StabilizerSet:
    """All generalized stabilizers for a chain with entangler angles t_1..t_n."""
    thetas = [float(t) for t in thetas]
    if n is None:
        n = len(thetas)
    if n < 3:
        raise ConfigError("stabilizer set needs n >= 3")
    bulk = tuple(
        generalized_stabilizer((thetas[j - 2], thetas[j - 1]), j) for j in range(2, n)
    )
    return StabilizerSet(
        left=generalized_stabilizer(thetas[0], "left"),
        bulk=bulk,
        right=generalized_stabilizer(thetas[n - 2], "right", n),
    )


@dataclass(frozen=True)
class InvarianceReport:
    entries: tuple[tuple[str, float], ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for _, r in self.entries)

    @property
    def max_residual(self) -> float:
        return max(r for _, r in self.entries)


def verify_stabilizer_invariance(
    state: DenseState, sset: StabilizerSet, tol: float = 1e-10
) -> InvarianceReport:
    """Residual |S psi - psi| / |psi| for every stabilizer."""
    from .mps import apply_local  # local import to avoid cycle at module load

    psi = state.amplitudes
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise NumericalContractError("cannot verify invariance of the zero state")
    entries = []
    for name, op in sset.labeled():
        if op.sites[-1] > state.n:
            raise ConfigError(f"stabilizer {name} exceeds the chain")
        out = apply_local(psi, state.n, op.matrix, op.sites[0])
        entries.append((name, float(np.linalg.norm(out - psi) / nrm)))
    return InvarianceReport(tuple(entries), tol)


def _p_factor(n: int, theta: float, left_site: int) -> FlipDiagOperator:
    table = np.diag(local_entangler("p_theta", theta, (left_site, left_site + 1)).matrix)
    return FlipDiagOperator.diagonal(n, table, left_site)


def _x_odd(thetas, n: int, edge_z: bool = True) -> FlipDiagOperator:
    factors = [_p_factor(n, thetas[0], 1), FlipDiagOperator.x_gate(n, 1)]
    for j in range(1, (n - 2) // 2 + 1):
        factors.append(_p_factor(n, thetas[2 * j - 1], 2 * j))
        factors.append(_p_factor(n, thetas[2 * j], 2 * j + 1))
        factors.append(FlipDiagOperator.x_gate(n, 2 * j + 1))
    if edge_z:
        factors.append(FlipDiagOperator.z_gate(n, n))
    return _compose(factors)


def _x_even(thetas, n: int, edge_z: bool = True) -> FlipDiagOperator:
    factors = [FlipDiagOperator.z_gate(n, 1)] if edge_z else []
    for j in range(1, (n - 2) // 2 + 1):
        factors.append(_p_factor(n, thetas[2 * j - 2], 2 * j - 1))
        factors.append(_p_factor(n, thetas[2 * j - 1], 2 * j))
        factors.append(FlipDiagOperator.x_gate(n, 2 * j))
    factors.append(_p_factor(n, thetas[n - 2], n - 1))
    factors.append(FlipDiagOperator.x_gate(n, n))
    return _compose(factors)


def _stabilizer_flipdiag(n: int, thetas, x_site: int) -> FlipDiagOperator:
    if x_site == 1:
        return _compose(
            [
                _p_factor(n, thetas[0], 1),
                FlipDiagOperator.x_gate(n, 1),
                FlipDiagOperator.z_gate(n, 2),
            ]
        )
    if x_site == n:
        return _compose(
            [
                _p_factor(n, thetas[n - 2], n - 1),
                FlipDiagOperator.z_gate(n, n - 1),
                FlipDiagOperator.x_gate(n, n),
            ]
        )
    return _compose(
        [
            _p_factor(n, thetas[x_site - 2], x_site - 1),
            _p_factor(n, thetas[x_site - 1], x_site),
            FlipDiagOperator.z_gate(n, x_site - 1),
            FlipDiagOperator.x_gate(n, x_site),
            FlipDiagOperator.z_gate(n, x_site + 1),
        ]
    )


def symmetry_flipdiag(
    g: tuple[int, int], thetas, n: int, construction: str = "direct"
) -> FlipDiagOperator:
    """O(g) = X_odd^g1 X_even^g2 in flip-diagonal form.

    ``construction`` 'direct' assembles the P/X/Z factor strings;
    'stabilizers' multiplies generalized stabilizers (odd positions for
    X_odd, even for X_even).  Both must agree.
    """
    thetas = [float(t) for t in thetas]
    if n % 2:
        raise ConfigError("symmetry operators are defined for even n")
    if len(thetas) < n:
        raise ConfigError("need at least n angles")
    g1, g2 = (int(g[0]) % 2, int(g[1]) % 2)
    total = FlipDiagOperator.identity(n)
    if construction == "direct":
        if g1:
            total = total @ _x_odd(thetas, n)
        if g2:
            total = total @ _x_even(thetas, n)
        return total
    if construction == "stabilizers":
        if g1:
            for x_site in range(1, n, 2):
                total = total @ _stabilizer_flipdiag(n, thetas, x_site)
        if g2:
            for x_site in range(2, n + 1, 2):
                total = total @ _stabilizer_flipdiag(n, thetas, x_site)
        return total
    raise ConfigError(f"unknown construction {construction!r}")


def symmetry_operator(g: tuple[int, int], thetas, n: int) -> np.ndarray:
    """Dense 2^n x 2^n symmetry operator (n <= 12, even n).

    Builds the operator both directly and as a product of generalized
    stabilizers and demands agreement before returning the dense matrix.
    """
    if n > SYMMETRY_MAX_N:
        raise ConfigError(f"dense symmetry operator capped at n={SYMMETRY_MAX_N}")
    direct = symmetry_flipdiag(g, thetas, n, "direct")
    alt = symmetry_flipdiag(g, thetas, n, "stabilizers")
    if direct.mask != alt.mask:
        raise NumericalContractError("symmetry constructions disagree on the flip pattern")
    dev = float(np.max(np.abs(direct.diag - alt.diag)))
    if dev > AGREEMENT_TOL * max(1.0, float(np.max(np.abs(direct.diag)))):
        raise NumericalContractError(
            f"symmetry constructions disagree (max deviation {dev:.3e})"
        )
    return direct.to_matrix()


def symmetry_square_residual(g, thetas, n: int) -> float:
    """Max deviation of O(g)^2 from the identity."""
    op = symmetry_flipdiag(g, thetas, n)
    sq = op @ op
    if sq.mask != 0:
        raise NumericalContractError("O(g)^2 is not diagonal")
    return float(np.max(np.abs(sq.diag - 1.0)))


def effective_boundary_paulis(thetas, n: int, side: str) -> tuple[FlipDiagOperator, FlipDiagOperator]:
    """The dressed boundary operators (Zbar, Xbar) for one chain end."""
    thetas = [float(t) for t in thetas]
    if side == "left":
        zbar = FlipDiagOperator.z_gate(n, 1)
        xbar = _compose(
            [
                _p_factor(n, thetas[0], 1),
                FlipDiagOperator.x_gate(n, 1),
                FlipDiagOperator.z_gate(n, 2),
            ]
        )
    elif side == "right":
        zbar = FlipDiagOperator.z_gate(n, n)
        xbar = _compose(
            [
                _p_factor(n, thetas[n - 2], n - 1),
                FlipDiagOperator.z_gate(n, n - 1),
                FlipDiagOperator.x_gate(n, n),
            ]
        )
    else:
        raise ConfigError("side must be 'left' or 'right'")
    return zbar, xbar


def _commutation_sign(a: FlipDiagOperator, b: FlipDiagOperator) -> int:
    """Sign s with a b = s b a; raises if no exact +-1 works."""
    ab = a @ b
    ba = b @ a
    if ab.mask != ba.mask:
        raise NumericalContractError("operators do not commute up to sign")
    ratio = ab.diag / ba.diag
    sign = np.sign(ratio[0].real)
    if sign == 0 or np.max(np.abs(ratio - sign)) > SIGN_TOL:
        raise NumericalContractError("operators do not commute up to a +-1 sign")
    return int(sign)


def effective_pauli_signs(thetas, g: tuple[int, int], side: str, n: int) -> tuple[int, int]:
    """Signs (sZ, sX) with O(g) Zbar = sZ Zbar O(g) and likewise for Xbar.

    The conjugating operator is the symmetry string with the examined edge's
    trailing Z factor peeled off; that edge factor is itself part of the
    boundary representation, and peeling it exposes the projective action of
    the bulk string on the dressed edge operators.  The identities are exact
    in the flip-diagonal algebra; failure to resolve to +-1 signals a
    construction bug.
    """
    thetas = [float(t) for t in thetas]
    if n % 2:
        raise ConfigError("symmetry operators are defined for even n")
    g1, g2 = (int(g[0]) % 2, int(g[1]) % 2)
    if side not in ("left", "right"):
        raise ConfigError("side must be 'left' or 'right'")
    op = FlipDiagOperator.identity(n)
    if g1:
        op = op @ _x_odd(thetas, n, edge_z=(side != "right"))
    if g2:
        op = op @ _x_even(thetas, n, edge_z=(side != "left"))
    zbar, xbar = effective_boundary_paulis(thetas, n, side)
    return _commutation_sign(op, zbar), _commutation_sign(op, xbar)


@dataclass(frozen=True)
class CocycleTable:
    """2-cocycle omega(g, h) of the boundary projective representation."""

    values: np.ndarray  # shape (2, 2, 2, 2), entries +-1

    def omega(self, g, h) -> int:
        return int(self.values[g[0], g[1], h[0], h[1]])

    def check_consistency(self) -> bool:
        """omega(g,h) omega(g+h,k) == omega(h,k) omega(g,h+k) for all triples."""
        for g, h, k in product(GROUP, GROUP, GROUP):
            gh = ((g[0] + h[0]) % 2, (g[1] + h[1]) % 2)
            hk = ((h[0] + k[0]) % 2, (h[1] + k[1]) % 2)
            if self.omega(g, h) * self.omega(gh, k) != self.omega(h, k) * self.omega(g, hk):
                return False
        return True

    def commutator_phase(self, g, h) -> int:
        """omega(g,h) / omega(h,g); -1 flags an anticommuting pair."""
        return self.omega(g, h) * self.omega(h, g)


def cocycle_table(theta: float = 0.6, tol: float = 1e-10) -> CocycleTable:
    """Boundary 2-cocycle computed from products of the effective operators.

    U_eff(g) = Xbar^g1 Zbar^g2 on the two left-edge qubits; omega(g, h) is
    read off from U_eff(g) U_eff(h) U_eff(g+h)^-1, which must be a +-1
    multiple of the identity.
    """
    p = local_entangler("p_theta", theta, (1, 2)).matrix
    xbar = p @ _pauli_span_matrix("XZ")
    zbar = _pauli_span_matrix("ZI")

    def u_eff(g):
        m = np.eye(4, dtype=complex)
        if g[0]:
            m = m @ xbar
        if g[1]:
            m = m @ zbar
        return m

    values = np.zeros((2, 2, 2, 2), dtype=int)
    for g, h in product(GROUP, GROUP):
        gh = ((g[0] + h[0]) % 2, (g[1] + h[1]) % 2)
        m = u_eff(g) @ u_eff(h) @ np.linalg.inv(u_eff(gh))
        omega = m[0, 0]
        if np.max(np.abs(m - omega * np.eye(4))) > tol or abs(abs(omega) - 1.0) > tol:
            raise NumericalContractError("cocycle product is not a phase times identity")
        sign = int(np.sign(omega.real))
        if abs(omega - sign) > tol:
            raise NumericalContractError("cocycle phase is not +-1")
        values[g[0], g[1], h[0], h[1]] = sign
    table = CocycleTable(values)
    if not table.check_consistency():
        raise NumericalContractError("cocycle consistency condition failed")
    return table


@dataclass(frozen=True)
class OnsiteCheckResult:
    onsite: bool
    violation: float
    v_label: str | None = None
    v_matrix: np.ndarray | None = None
    phase: float | None = None


def _uniform_theta(m: MpsState, tol: float = 1e-10) -> float:
    """Extract the single angle of a uniform one-angle-family MPS."""
    if not m.is_uniform(tol):
        raise ConfigError("onsite check expects a translationally invariant MPS")
    b0, b1 = m.sites[0]
    if b0.shape != (2, 2):
        raise ConfigError("onsite check expects bond dimension 2")
    theta = float(np.arctan2(b0[1, 0].real, b0[0, 0].real))
    ref0, ref1 = theta_site_matrices(theta)
    if np.max(np.abs(b0 - ref0)) > tol or np.max(np.abs(b1 - ref1)) > tol:
        raise ConfigError("onsite check expects one-angle-family site matrices")
    return theta


_PAULI_LABELS = ("I", "X", "Y", "Z")


def onsite_symmetry_check(m: MpsState, g: tuple[int, int], tol: float = 1e-10) -> OnsiteCheckResult:
    """Can the symmetry be pushed onto 2-site blocks of the MPS matrices?

    Success requires two things: the global symmetry operator's nonzero
    entries all have unit modulus (otherwise no tensor product of block
    unitaries can reproduce it; the reported violation is
    max_i ||O(g)_{i, i xor g}| - 1|), and a 2-qubit Pauli product V with a
    phase satisfying, for all two-bit blocks i,

        A[i xor g] = e^{i phase} V A[i] V^+,   A[i1 i2] = B[i1] (x) B[i2].
    """
    theta = _uniform_theta(m)
    n = m.n
    if n % 2:
        raise ConfigError("onsite check needs an even number of sites")
    g = (int(g[0]) % 2, int(g[1]) % 2)
    if g == (0, 0):
        return OnsiteCheckResult(True, 0.0, "I(x)I", np.eye(4, dtype=complex), 0.0)

    op = symmetry_flipdiag(g, [theta] * n, n)
    violation = float(np.max(np.abs(np.abs(op.diag) - 1.0)))

    b = theta_site_matrices(theta)
    blocked = {
        (i1, i2): np.kron(b[i1], b[i2]) for i1, i2 in product((0, 1), repeat=2)
    }
    found = None
    for l1, l2 in product(_PAULI_LABELS, repeat=2):
        v = np.kron(gates.PAULIS[l1], gates.PAULIS[l2])
        phase = None
        ok = True
        for i1, i2 in product((0, 1), repeat=2):
            lhs = blocked[(i1 ^ g[0], i2 ^ g[1])]
            rhs = v @ blocked[(i1, i2)] @ v.conj().T
            if phase is None:
                k = np.unravel_index(int(np.argmax(np.abs(rhs))), rhs.shape)
                if abs(rhs[k]) < tol:
                    ok = False
                    break
                phase = lhs[k] / rhs[k]
                if abs(abs(phase) - 1.0) > tol:
                    ok = False
                    break
            if np.max(np.abs(lhs - phase * rhs)) > tol:
                ok = False
                break
        if ok and phase is not None:
            found = (f"{l1}(x){l2}", v, float(np.angle(phase)))
            break

    if violation <= tol and found is not None:
        return OnsiteCheckResult(True, violation, *found)
    return OnsiteCheckResult(False, violation)


def symmetry_report(thetas, n: int, tol: float = 1e-10) -> list[dict]:
    """Full check battery for one chain; returns CLI/JSON-ready rows.

    The state is built with the symmetry-compatible boundaries (balanced
    left weights, right boundary rotated so the endpoint weights match);
    with generic boundaries the boundary stabilizers do not fix the state.
    """
    from .families import ThetaFamilySpec, symmetric_right_boundary, theta_family_mps
    from .mps import embed_operator, to_dense

    thetas = [float(t) for t in thetas]
    spec = ThetaFamilySpec(
        n, tuple(thetas), left=(1.0, 1.0), right=symmetric_right_boundary(thetas[-1])
    )
    state = to_dense(theta_family_mps(spec))
    checks: list[dict] = []

    def add(name: str, residual: float, check_tol: float = tol):
        checks.append(
            {
                "name": name,
                "residual": float(residual),
                "tol": check_tol,
                "pass": bool(residual <= check_tol),
            }
        )

    sset = stabilizer_set(thetas, n)
    inv = verify_stabilizer_invariance(state, sset, tol)
    for name, residual in inv.entries:
        add(f"{name} fixes state", residual)
    dense_ops = []
    for name, op in sset.labeled():
        eye = np.eye(op.matrix.shape[0])
        add(f"{name}^2 = I", float(np.max(np.abs(op.matrix @ op.matrix - eye))), 1e-12)
        dense_ops.append((name, embed_operator(op.matrix, n, op.sites[0])))
    worst_comm = 0.0
    for i, (_, a) in enumerate(dense_ops):
        for _, b in dense_ops[i + 1 :]:
            worst_comm = max(worst_comm, float(np.max(np.abs(a @ b - b @ a))))
    add("stabilizers commute", worst_comm, 1e-12)

    psi = state.amplitudes
    nrm = np.linalg.norm(psi)
    for g in GROUP:
        op = symmetry_flipdiag(g, thetas, n)
        alt = symmetry_flipdiag(g, thetas, n, "stabilizers")
        add(
            f"O{g} constructions agree",
            float(np.max(np.abs(op.diag - alt.diag))) if op.mask == alt.mask else np.inf,
        )
        add(f"O{g} fixes state", float(np.linalg.norm(op.apply(psi) - psi) / nrm))
        add(f"O{g}^2 = I", symmetry_square_residual(g, thetas, n))

    sign_dev = 0.0
    for g in GROUP:
        got_l = effective_pauli_signs(thetas, g, "left", n)
        got_r = effective_pauli_signs(thetas, g, "right", n)
        sign_dev = max(
            sign_dev,
            float(got_l != ((-1) ** g[0], (-1) ** g[1])),
            float(got_r != ((-1) ** g[1], (-1) ** g[0])),
        )
    add("boundary sign tables", sign_dev, 0.0)

    table = cocycle_table()
    cocycle_dev = float(
        any(table.omega(g, h) != (-1) ** (g[1] * h[0]) for g in GROUP for h in GROUP)
        or not table.check_consistency()
    )
    add("cocycle (-1)^(g2 h1) + consistency", cocycle_dev, 0.0)

    if len(set(thetas)) == 1:
        mps = theta_family_mps(spec)
        at_cluster_point = abs(abs(np.tan(thetas[0])) - 1.0) <= 1e-12
        for g in GROUP:
            result = onsite_symmetry_check(mps, g, tol)
            expected = at_cluster_point or g in ((0, 0), (1, 1))
            checks.append(
                {
                    "name": f"onsite{g} (expect {'onsite' if expected else 'violation'})",
                    "residual": float(result.violation),
                    "tol": tol,
                    "pass": bool(result.onsite == expected),
                }
            )
    return checks
