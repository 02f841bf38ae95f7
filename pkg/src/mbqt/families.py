"""Constructors for the built-in MPS families and their dense reference states.

Three families are provided:

* the cluster state (bond dimension 2, the usual C_Z-on-plus construction),
* a bond-dimension-2 family parameterized by one angle per site that passes
  through the cluster state at angle pi/4, and
* a bond-dimension-4 direct-sum family whose upper block is the cluster
  family at pi/4 and whose lower "junk" block carries two angles per site.

``build_dense_reference`` rebuilds each family's dense state through an
independent route: a product state acted on by diagonal two-qubit
entanglers.  It shares no contraction code with ``mps.to_dense`` and serves
as the cross-check oracle for the MPS path.

Local operator matrices are indexed little-endian over their span: local
bit b corresponds to qubit ``sites[0] + b``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, ConfigError, SingularAngleError
from .mps import DenseState, MpsState, max_dense_n

SINGULAR_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class LocalOperator:
    """Dense operator on a contiguous run of qubits (1-based, inclusive)."""

    sites: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        if list(self.sites) != list(range(self.sites[0], self.sites[-1] + 1)):
            raise ConfigError("LocalOperator span must be contiguous")
        if self.matrix.shape != (2 ** len(self.sites),) * 2:
            raise ConfigError("operator matrix does not match span width")


@dataclass(frozen=True)
class ThetaFamilySpec:
    """Bond-dimension-2 family: one angle per site plus 2-component boundaries."""

    n: int
    thetas: tuple[float, ...]
    left: tuple[complex, complex] = (1.0, 1.0)
    right: tuple[complex, complex] = (1.0, 0.0)

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("family states need n >= 2")
        if len(self.thetas) != self.n:
            raise ConfigError("need one angle per site")
        if not any(self.left) or not any(self.right):
            raise ConfigError("boundary vectors must be nonzero")

    @classmethod
    def uniform(cls, n: int, theta: float, **kwargs) -> "ThetaFamilySpec":
        return cls(n, (float(theta),) * n, **kwargs)


@dataclass(frozen=True)
class SumFamilySpec:
    """Bond-dimension-4 direct-sum family (cluster block fixed at pi/4).

    ``left`` is (a_L, b_L, c_L, d_L) and ``right`` is (a_R, b_R, c_R, d_R);
    the first two components of each address the cluster block, the last two
    the junk block.
    """

    n: int
    gammas: tuple[float, ...]
    deltas: tuple[float, ...]
    left: tuple[complex, complex, complex, complex] = (1.0, 1.0, 1.0, 0.0)
    right: tuple[complex, complex, complex, complex] = (1.0, 0.0, 1.0, 0.0)

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("family states need n >= 2")
        if len(self.gammas) != self.n or len(self.deltas) != self.n:
            raise ConfigError("need one (gamma, delta) pair per site")
        if not any(self.left) or not any(self.right):
            raise ConfigError("boundary vectors must be nonzero")

    @classmethod
    def uniform(cls, n: int, gamma: float, delta: float, **kwargs) -> "SumFamilySpec":
        return cls(n, (float(gamma),) * n, (float(delta),) * n, **kwargs)


def theta_site_matrices(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Site pair B[0] = [[c,0],[s,0]], B[1] = [[0,s],[0,-c]]."""
    c, s = np.cos(theta), np.sin(theta)
    b0 = np.array([[c, 0.0], [s, 0.0]], dtype=complex)
    b1 = np.array([[0.0, s], [0.0, -c]], dtype=complex)
    return b0, b1


def cluster_mps(n: int) -> MpsState:
    """Open-boundary cluster state: B[0] = |+><0|, B[1] = |-><1|,
    <R| = <0|, |L> = sqrt(2)|+>."""
    if n < 2:
        raise ConfigError("cluster state needs n >= 2")
    inv = 1.0 / np.sqrt(2.0)
    b0 = np.array([[inv, 0.0], [inv, 0.0]], dtype=complex)
    b1 = np.array([[0.0, inv], [0.0, -inv]], dtype=complex)
    left = np.array([1.0, 1.0], dtype=complex)
    right = np.array([1.0, 0.0], dtype=complex)
    return MpsState(((b0, b1),) * n, left, right)


def theta_family_mps(spec: ThetaFamilySpec) -> MpsState:
    sites = tuple(theta_site_matrices(t) for t in spec.thetas)
    return MpsState(sites, np.asarray(spec.left, dtype=complex), np.asarray(spec.right, dtype=complex))


def direct_sum_mps(spec: SumFamilySpec) -> MpsState:
    """D=4 family: cluster block at pi/4 direct-summed with the junk block."""
    inv = 1.0 / np.sqrt(2.0)
    sites = []
    for gamma, delta in zip(spec.gammas, spec.deltas):
        b0 = np.zeros((4, 4), dtype=complex)
        b1 = np.zeros((4, 4), dtype=complex)
        b0[0, 0], b0[1, 0] = inv, inv
        b1[0, 1], b1[1, 1] = inv, -inv
        b0[2, 2], b0[3, 2] = np.cos(gamma), np.sin(gamma)
        b1[2, 3], b1[3, 3] = np.sin(delta), np.cos(delta)
        sites.append((b0, b1))
    return MpsState(tuple(sites), np.asarray(spec.left, dtype=complex), np.asarray(spec.right, dtype=complex))


def _pair_sites(sites: tuple[int, int]) -> tuple[int, int]:
    j, j1 = sites
    if j1 != j + 1:
        raise ConfigError("entanglers act on adjacent qubits (j, j+1)")
    return j, j1


def local_entangler(kind: str, angles, sites: tuple[int, int]) -> LocalOperator:
    """Diagonal two-qubit operator on (j, j+1).

    kind 'c_theta'        sqrt(2) diag(cos t, sin t, sin t, -cos t)
    kind 'c_gamma_delta'  sqrt(2) diag(cos g, sin d, sin g, cos d)
    kind 'p_theta'        diag(cot t, tan t, tan t, cot t)

    Diagonal order is little-endian over the span, i.e. entry index
    i_j + 2 i_{j+1}.
    """
    j, j1 = _pair_sites(sites)
    if kind == "c_theta":
        t = float(angles)
        c, s = np.cos(t), np.sin(t)
        diag = np.sqrt(2.0) * np.array([c, s, s, -c], dtype=complex)
    elif kind == "c_gamma_delta":
        g, d = (float(a) for a in angles)
        diag = np.sqrt(2.0) * np.array(
            [np.cos(g), np.sin(d), np.sin(g), np.cos(d)], dtype=complex
        )
    elif kind == "p_theta":
        t = float(angles)
        c, s = np.cos(t), np.sin(t)
        if min(abs(c), abs(s)) < SINGULAR_ANGLE_TOL:
            raise SingularAngleError(
                f"p_theta undefined at theta={t!r} (cot/tan pole)"
            )
        diag = np.array([c / s, s / c, s / c, c / s], dtype=complex)
    else:
        raise ConfigError(f"unknown entangler kind {kind!r}")
    return LocalOperator((j, j1), np.diag(diag))


def _entangler_diag_table(kind: str, angles) -> np.ndarray:
    return np.diag(local_entangler(kind, angles, (1, 2)).matrix)


def _product_state(first: np.ndarray, middle_count: int, last: np.ndarray) -> np.ndarray:
    """Little-endian product vector: ``first`` on qubit 1, plus states in the
    middle, ``last`` on qubit n."""
    plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    vec = first
    for _ in range(middle_count):
        vec = np.kron(plus, vec)
    return np.kron(last, vec)


def _apply_diagonal_pairs(amps: np.ndarray, n: int, tables) -> np.ndarray:
    """Multiply in diagonal two-qubit factors; tables[j-1] covers (j, j+1)."""
    idx = np.arange(2**n)
    out = amps.copy()
    for j, table in enumerate(tables, start=1):
        local = ((idx >> (j - 1)) & 1) + 2 * ((idx >> j) & 1)
        out *= table[local]
    return out


def theta_endpoint_weights(spec: ThetaFamilySpec) -> tuple[complex, complex]:
    """Final-qubit weights (x1, x2) = rotation of the right boundary by theta_n."""
    a_r, b_r = spec.right
    c, s = np.cos(spec.thetas[-1]), np.sin(spec.thetas[-1])
    return a_r * c + b_r * s, a_r * s - b_r * c


def sum_endpoint_weights(spec: SumFamilySpec) -> tuple[complex, complex, complex, complex]:
    """Cluster-sector (x1, x2) and junk-sector (x3, x4) final-qubit weights."""
    a_r, b_r, c_r, d_r = spec.right
    x1, x2 = a_r + b_r, a_r - b_r
    g, d = spec.gammas[-1], spec.deltas[-1]
    x3 = np.sqrt(2.0) * (c_r * np.cos(g) + d_r * np.sin(g))
    x4 = np.sqrt(2.0) * (c_r * np.sin(d) + d_r * np.cos(d))
    return x1, x2, x3, x4


def symmetric_right_boundary(theta_n: float) -> tuple[float, float]:
    """Right boundary making the endpoint weights equal (x1 = x2 = 1/sqrt 2).

    With the left boundary proportional to (1, 1) this is the boundary
    choice under which the generalized stabilizers and the Z2 x Z2 symmetry
    operators leave the family state exactly invariant.
    """
    c, s = np.cos(theta_n), np.sin(theta_n)
    return (c + s) / np.sqrt(2.0), (s - c) / np.sqrt(2.0)


def build_dense_reference(spec) -> DenseState:
    """Dense state via diagonal entanglers on a boundary-weighted product state.

    Theta family: apply C(theta_j) on (j, j+1) for j = 1..n-1 to
    (a_L, b_L) on qubit 1, plus states in the bulk, and (x1, x2) on qubit n.
    Direct-sum family: superpose the pi/4 cluster sector and the
    (gamma, delta) junk sector built the same way.
    """
    n = spec.n
    cap = max_dense_n()
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the dense cap {cap}")
    if isinstance(spec, ThetaFamilySpec):
        x1, x2 = theta_endpoint_weights(spec)
        pre = _product_state(
            np.asarray(spec.left, dtype=complex), n - 2, np.array([x1, x2])
        )
        tables = [_entangler_diag_table("c_theta", t) for t in spec.thetas[:-1]]
        return DenseState(n, _apply_diagonal_pairs(pre, n, tables))
    if isinstance(spec, SumFamilySpec):
        x1, x2, x3, x4 = sum_endpoint_weights(spec)
        a_l, b_l, c_l, d_l = spec.left
        cluster_pre = _product_state(np.array([a_l, b_l]), n - 2, np.array([x1, x2]))
        cluster_tables = [np.array([1.0, 1.0, 1.0, -1.0], dtype=complex)] * (n - 1)
        cluster_part = _apply_diagonal_pairs(cluster_pre, n, cluster_tables)
        junk_pre = _product_state(np.array([c_l, d_l]), n - 2, np.array([x3, x4]))
        junk_tables = [
            _entangler_diag_table("c_gamma_delta", (g, d))
            for g, d in zip(spec.gammas[:-1], spec.deltas[:-1])
        ]
        junk_part = _apply_diagonal_pairs(junk_pre, n, junk_tables)
        return DenseState(n, cluster_part + junk_part)
    raise ConfigError(f"unsupported family spec type {type(spec).__name__}")


def family_mps(spec) -> MpsState:
    """Dispatch a family spec to its MPS constructor."""
    if isinstance(spec, ThetaFamilySpec):
        return theta_family_mps(spec)
    if isinstance(spec, SumFamilySpec):
        return direct_sum_mps(spec)
    raise ConfigError(f"unsupported family spec type {type(spec).__name__}")


def spec_from_json_dict(data: dict):
    """Family spec from its JSON form; unknown keys are rejected."""
    if "family" not in data:
        raise ConfigError("family spec needs a 'family' key")
    kind = data["family"]
    if kind == "cluster":
        allowed = {"family", "n"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown keys for cluster spec: {sorted(unknown)}")
        return ThetaFamilySpec.uniform(int(data["n"]), np.pi / 4)
    if kind == "theta":
        allowed = {"family", "n", "thetas", "left", "right"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown keys for theta spec: {sorted(unknown)}")
        n = int(data["n"])
        thetas = data.get("thetas")
        if isinstance(thetas, (int, float)):
            thetas = [float(thetas)] * n
        if thetas is None or len(thetas) != n:
            raise ConfigError("theta spec needs 'thetas' (one angle per site or a scalar)")
        kwargs = {}
        if "left" in data:
            kwargs["left"] = tuple(complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in data["left"])
        if "right" in data:
            kwargs["right"] = tuple(complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in data["right"])
        return ThetaFamilySpec(n, tuple(float(t) for t in thetas), **kwargs)
    if kind == "direct_sum":
        allowed = {"family", "n", "gammas", "deltas", "left", "right"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown keys for direct_sum spec: {sorted(unknown)}")
        n = int(data["n"])
        gammas = data.get("gammas")
        deltas = data.get("deltas")
        if isinstance(gammas, (int, float)):
            gammas = [float(gammas)] * n
        if isinstance(deltas, (int, float)):
            deltas = [float(deltas)] * n
        if gammas is None or deltas is None or len(gammas) != n or len(deltas) != n:
            raise ConfigError("direct_sum spec needs 'gammas' and 'deltas' per site")
        kwargs = {}
        if "left" in data:
            kwargs["left"] = tuple(complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in data["left"])
        if "right" in data:
            kwargs["right"] = tuple(complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in data["right"])
        return SumFamilySpec(n, tuple(float(g) for g in gammas), tuple(float(d) for d in deltas), **kwargs)
    raise ConfigError(f"unknown family kind {kind!r}")
