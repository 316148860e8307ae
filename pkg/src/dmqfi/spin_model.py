"""Pauli algebra, the XX + DM Hamiltonian, collective spin, and the two-spin eigensystem.

Basis convention: computational basis with site 1 as the most significant
bit, so for two spins the order is |00>, |01>, |10>, |11>, and
sigma_z|0> = +|0>.  Energy units have k = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import reduce

import numpy as np

SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
AXES = ("x", "y", "z")

X_HAT = np.array([1.0, 0.0, 0.0])
Y_HAT = np.array([0.0, 1.0, 0.0])
Z_HAT = np.array([0.0, 0.0, 1.0])
AXIS_VECTORS = {"x": X_HAT, "y": Y_HAT, "z": Z_HAT}

FERRO_J = -1.0
ANTIFERRO_J = 1.0

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Physical knobs of one scenario.

    J is the exchange coupling, B the homogeneous field, b the inhomogeneous
    (staggered) field, D the z-oriented DM strength, T the temperature and N
    the number of spins.  Defaults are the ferromagnetic chain at T = 0.7.
    """

    J: float = FERRO_J
    B: float = 0.0
    b: float = 0.0
    D: float = 0.0
    T: float = 0.7
    N: int = 2

    def __post_init__(self) -> None:
        for name in ("J", "B", "b", "D", "T"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise ValueError(f"parameter {name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {"J": self.J, "B": self.B, "b": self.b, "D": self.D, "T": self.T, "N": self.N}

    @property
    def gamma(self) -> float:
        return math.sqrt(self.b**2 + self.J**2 * (1.0 + self.D**2))


def direction(n) -> np.ndarray:
    """Validate a unit 3-vector and return it as a float array."""
    v = np.asarray(n, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"direction must be a 3-vector, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be a unit vector, |n| = {np.linalg.norm(v)!r}")
    return v


def pauli_site(axis: str, site: int, n_sites: int) -> np.ndarray:
    """Pauli matrix on one site of an ``n_sites`` register (sites are 1-based)."""
    if axis not in SIGMA:
        raise ValueError(f"unknown axis {axis!r}")
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} out of range 1..{n_sites}")
    factors = [np.eye(2, dtype=complex)] * n_sites
    factors[site - 1] = SIGMA[axis]
    return reduce(np.kron, factors)


def _bond(axis1: str, axis2: str, i: int, n_sites: int) -> np.ndarray:
    return pauli_site(axis1, i, n_sites) @ pauli_site(axis2, i + 1, n_sites)


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """XX exchange with z-axis DM interaction and z fields on an open chain.

        H = 1/2 sum_{i<N} J [sx_i sx_{i+1} + sy_i sy_{i+1} + D (sx_i sy_{i+1} - sy_i sx_{i+1})]
          + 1/2 sum_i h_i sz_i,    h_i = B + b (odd i), B - b (even i)

    For N = 2 this is the usual two-spin H_DM.
    """
    n = params.N
    dim = 2**n
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(1, n):
        h += params.J * (_bond("x", "x", i, n) + _bond("y", "y", i, n))
        h += params.J * params.D * (_bond("x", "y", i, n) - _bond("y", "x", i, n))
    for i in range(1, n + 1):
        field = params.B + params.b if i % 2 == 1 else params.B - params.b
        h += field * pauli_site("z", i, n)
    h *= 0.5
    return 0.5 * (h + h.conj().T)


def collective_operator(n, n_sites: int) -> np.ndarray:
    """J_n = 1/2 sum_i (n_x sx_i + n_y sy_i + n_z sz_i)."""
    v = direction(n)
    dim = 2**n_sites
    out = np.zeros((dim, dim), dtype=complex)
    for site in range(1, n_sites + 1):
        for comp, axis in zip(v, AXES):
            if comp != 0.0:
                out += comp * pauli_site(axis, site, n_sites)
    return 0.5 * out


def total_sz(n_sites: int) -> np.ndarray:
    return sum(pauli_site("z", i, n_sites) for i in range(1, n_sites + 1))


@dataclass(frozen=True)
class AnalyticSpectrum:
    """Closed-form eigensystem of the two-spin Hamiltonian.

    ``energies`` and the columns of ``vectors`` follow the order
    (-B, B, -gamma, gamma) with eigenvectors |11>, |00> and the two
    middle-block states.  ``norm1``/``norm2`` are the normalization
    constants of the middle-block vectors (1 on the J = 0 branch).
    """

    gamma: float
    energies: np.ndarray
    vectors: np.ndarray
    norm1: float
    norm2: float

    def pairs(self):
        return [(float(self.energies[k]), self.vectors[:, k]) for k in range(4)]


def analytic_spectrum(params: ModelParams) -> AnalyticSpectrum:
    if params.N != 2:
        raise ValueError("the analytic spectrum exists only for N = 2")
    J, B, b, D = params.J, params.B, params.b, params.D
    gamma = params.gamma
    energies = np.array([-B, B, -gamma, gamma])
    vectors = np.zeros((4, 4), dtype=complex)
    vectors[3, 0] = 1.0
    vectors[0, 1] = 1.0

    if J == 0.0:
        # middle block is diag(b, -b) on |01>, |10>
        low, high = (2, 1) if b >= 0 else (1, 2)
        vectors[low, 2] = 1.0
        vectors[high, 3] = 1.0
        return AnalyticSpectrum(gamma, energies, vectors, 1.0, 1.0)

    # gamma -/+ b rewritten to avoid cancellation when |b| dominates
    jd2 = J * J * (1.0 + D * D)
    gm = jd2 / (gamma + b) if b > 0 else gamma - b
    gp = jd2 / (gamma - b) if b < 0 else gamma + b
    denom = J * (1j + D)
    a1 = -1j * gm / denom
    a2 = 1j * gp / denom
    norm1 = math.sqrt(1.0 + abs(gm / denom) ** 2)
    norm2 = math.sqrt(1.0 + abs(gp / denom) ** 2)
    vectors[1, 2], vectors[2, 2] = a1 / norm1, 1.0 / norm1
    vectors[1, 3], vectors[2, 3] = a2 / norm2, 1.0 / norm2
    return AnalyticSpectrum(gamma, energies, vectors, norm1, norm2)
