"""Quantum Fisher information of collective-spin rotations.

The C matrix is

    C_kl = sum_{i != j} (p_i - p_j)^2 / (p_i + p_j)
           [<i|J_k|j><j|J_l|i> + <i|J_l|j><j|J_k|i>]

over the spectral decomposition {p_i, |i>} of the state, so that for a unit
direction n the Fisher information of exp(-i phi J_n) is n.C.n.  The reported
QFI is the largest eigenvalue of C divided by the particle number.

Two independent estimates back the C-matrix route: a brute-force maximum over
directions sampled on the sphere, and a Bures-distance finite difference
built from the Uhlmann fidelity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import fidelity, max_eig_sym3, unitary_exp
from .spin_model import AXES, AXIS_VECTORS, ModelParams, build_hamiltonian, collective_operator, direction
from .thermal import DensityMatrix, closed_form_state, gibbs_state, ground_state_limit

PAIR_CUTOFF = 1e-12
DEFAULT_STEP = 1e-3
MAX_STEP = 1e-2
HL_SLACK = 1e-9

WeightFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def sld_weights(pi: np.ndarray, pj: np.ndarray) -> np.ndarray:
    """(p_i - p_j)^2 / (p_i + p_j), zero where p_i + p_j < PAIR_CUTOFF."""
    s = pi + pj
    out = np.zeros(np.broadcast(pi, pj).shape)
    ok = s >= PAIR_CUTOFF
    out[ok] = ((pi - pj) ** 2)[ok] / s[ok]
    return out


def _pair_weights(state: DensityMatrix, weight: WeightFn | None) -> np.ndarray:
    p = state.populations
    w = (weight or sld_weights)(p[:, None], p[None, :])
    np.fill_diagonal(w, 0.0)
    return w


def _eigenbasis_generators(state: DensityMatrix, n_sites: int) -> np.ndarray:
    """<psi_i|J_k|psi_j> for k = x, y, z, shape (3, dim, dim)."""
    v = state.spectrum.vectors
    return np.stack([v.conj().T @ collective_operator(AXIS_VECTORS[a], n_sites) @ v for a in AXES])


def _check_dim(state: DensityMatrix, n_sites: int) -> None:
    if state.dim != 2**n_sites:
        raise ValueError(f"state dimension {state.dim} does not match N={n_sites}")


def c_matrix(state: DensityMatrix, n_sites: int, *, weight: WeightFn | None = None) -> np.ndarray:
    """The real symmetric 3x3 C matrix of ``state`` for an ``n_sites`` register."""
    _check_dim(state, n_sites)
    w = _pair_weights(state, weight)
    a = _eigenbasis_generators(state, n_sites)
    c = np.empty((3, 3))
    for k in range(3):
        for l in range(k, 3):
            term = a[k] * a[l].T + a[l] * a[k].T
            c[k, l] = c[l, k] = float(np.sum(w * term).real)
    return c


def fisher_in_directions(state: DensityMatrix, dirs: np.ndarray, n_sites: int) -> np.ndarray:
    """Per-particle Fisher information for each row of ``dirs``.

    Evaluates 2 sum_{i != j} w_ij |<i|J_n|j>|^2 / N straight from the spectral
    sum, never forming the C matrix.
    """
    _check_dim(state, n_sites)
    w = _pair_weights(state, None)
    a = _eigenbasis_generators(state, n_sites)
    gen = np.einsum("dk,kij->dij", np.atleast_2d(dirs), a)
    return 2.0 * np.einsum("ij,dij->d", w, np.abs(gen) ** 2) / n_sites


def fisher_in_direction(state: DensityMatrix, n, n_sites: int) -> float:
    """Per-particle Fisher information for rotations about the unit axis ``n``."""
    return float(fisher_in_directions(state, direction(n)[None, :], n_sites)[0])


@dataclass(frozen=True)
class QfiResult:
    c: np.ndarray
    c_max: float
    qfi_per_particle: float
    n_opt: np.ndarray
    params_echo: ModelParams

    def __post_init__(self) -> None:
        n = self.params_echo.N
        if not -HL_SLACK <= self.qfi_per_particle <= n + HL_SLACK:
            raise ValueError(
                f"per-particle QFI {self.qfi_per_particle!r} outside [0, N={n}] for {self.params_echo}"
            )

    @property
    def total_fisher(self) -> float:
        return self.c_max

    @property
    def useful(self) -> bool:
        return is_useful(self.qfi_per_particle)


def is_useful(qfi_per_particle: float) -> bool:
    """Per-particle QFI above the shot-noise level witnesses entanglement."""
    return qfi_per_particle > 1.0


def thermal_state(params: ModelParams, *, zero_temperature: bool = False) -> DensityMatrix:
    if zero_temperature:
        return ground_state_limit(params)
    if params.N == 2:
        return closed_form_state(params)
    return gibbs_state(build_hamiltonian(params), params.T)


def qfi_of_state(
    state: DensityMatrix, params: ModelParams, *, weight: WeightFn | None = None
) -> QfiResult:
    c = c_matrix(state, params.N, weight=weight)
    c_max, n_opt = max_eig_sym3(c)
    return QfiResult(c, c_max, c_max / params.N, n_opt, params)


def qfi(
    params: ModelParams, *, zero_temperature: bool = False, weight: WeightFn | None = None
) -> QfiResult:
    """Direction-optimized per-particle QFI of the model's thermal state."""
    return qfi_of_state(thermal_state(params, zero_temperature=zero_temperature), params, weight=weight)


def _bures_fisher(state: DensityMatrix, jn: np.ndarray, phi: float, n_sites: int) -> float:
    rotated = state.transformed(unitary_exp(jn, phi))
    root_f = math.sqrt(min(max(fidelity(state, rotated), 0.0), 1.0))
    return 8.0 * (1.0 - root_f) / (phi * phi) / n_sites


def fidelity_qfi_oracle(
    state: DensityMatrix,
    n,
    n_sites: int,
    step: float = DEFAULT_STEP,
    *,
    richardson: bool = False,
) -> float:
    """Per-particle Fisher information from the fidelity with a rotated copy.

    F ~ 8 (1 - sqrt(fid(rho, rho_phi))) / phi^2 with
    rho_phi = exp(-i phi J_n) rho exp(i phi J_n).  ``richardson`` combines
    steps phi and phi/2 to cancel the O(phi^2) truncation term.
    """
    if not 0 < step <= MAX_STEP:
        raise ValueError(f"step must lie in (0, {MAX_STEP}], got {step!r}")
    _check_dim(state, n_sites)
    jn = collective_operator(n, n_sites)
    coarse = _bures_fisher(state, jn, step, n_sites)
    if not richardson:
        return coarse
    fine = _bures_fisher(state, jn, 0.5 * step, n_sites)
    return (4.0 * fine - coarse) / 3.0


def fibonacci_sphere(count: int) -> np.ndarray:
    """``count`` nearly uniform unit vectors (golden-angle spiral)."""
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    r = np.sqrt(1.0 - z * z)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * k
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def direction_grid_max(state: DensityMatrix, n_sites: int, resolution: int = 128) -> tuple[float, np.ndarray]:
    """Brute-force maximum of the per-particle Fisher information over the sphere.

    Samples resolution**2 Fibonacci directions.
    """
    if resolution < 16:
        raise ValueError(f"resolution must be >= 16, got {resolution}")
    dirs = fibonacci_sphere(resolution * resolution)
    values = fisher_in_directions(state, dirs, n_sites)
    best = int(np.argmax(values))
    return float(values[best]), dirs[best] / np.linalg.norm(dirs[best])


class UnboundedUncertainty(ArithmeticError):
    """Zero Fisher information: no finite phase uncertainty bound exists."""


@dataclass(frozen=True)
class EstimationSetup:
    total_fisher: float
    n_measurements: int = 1
    phase: float = field(default=0.0)

    def __post_init__(self) -> None:
        if self.total_fisher < 0:
            raise ValueError(f"total Fisher information must be >= 0, got {self.total_fisher!r}")
        if int(self.n_measurements) != self.n_measurements or self.n_measurements < 1:
            raise ValueError(f"n_measurements must be a positive integer, got {self.n_measurements!r}")

    @classmethod
    def from_result(cls, result: QfiResult, n_measurements: int = 1) -> "EstimationSetup":
        return cls(max(result.total_fisher, 0.0), n_measurements)


def cramer_rao(setup: EstimationSetup) -> float:
    """Quantum Cramer-Rao bound 1 / sqrt(N_m F_q)."""
    if setup.total_fisher == 0:
        raise UnboundedUncertainty("Fisher information is zero; the phase is not estimable")
    return 1.0 / math.sqrt(setup.n_measurements * setup.total_fisher)
