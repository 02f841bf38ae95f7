"""Single-qubit gate constants and rotation generators.

Rotation convention: R_a(t) = exp(i t a) for a Pauli axis ``a``, so
R_Z(t) = diag(e^{it}, e^{-it}).
"""

from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def rotation_z(angle: float) -> np.ndarray:
    return np.array([[np.exp(1j * angle), 0], [0, np.exp(-1j * angle)]], dtype=complex)


def rotation_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]], dtype=complex)


def pauli_power(x_power: int, z_power: int) -> np.ndarray:
    """X^x Z^z for bit-valued powers (the tracked byproduct frame)."""
    m = I2.copy()
    if z_power % 2:
        m = Z @ m
    if x_power % 2:
        m = X @ m
    return m
