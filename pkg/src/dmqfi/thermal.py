"""Thermal (Gibbs) states: generic matrix exponential and the two-spin closed form."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import EigenSystem, clamp_psd, eigh, hermitian, mat_func
from .spin_model import ModelParams, build_hamiltonian

TRACE_TOL = 1e-10
GROUND_DEGENERACY_TOL = 1e-10

# cosh/sinh overflow just past 710
_EXP_SAFE = 700.0


@dataclass(frozen=True)
class DensityMatrix:
    """A trace-one PSD Hermitian matrix with its cached spectral decomposition.

    ``spectrum.values`` are the populations p_i (clamped at zero and summing
    to one) and ``spectrum.vectors`` the matching eigenvectors psi_i.
    """

    matrix: np.ndarray
    spectrum: EigenSystem

    @classmethod
    def from_matrix(cls, m) -> "DensityMatrix":
        a = hermitian(m, tol=1e-10)
        tr = np.trace(a).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix must have unit trace, got {tr!r}")
        es = eigh(a)
        p = clamp_psd(es.values)
        p = p / p.sum()
        a.setflags(write=False)
        return cls(a, EigenSystem(p, es.vectors.copy()))

    @classmethod
    def from_spectrum(cls, populations, vectors) -> "DensityMatrix":
        """Build from populations and orthonormal eigenvector columns."""
        p = clamp_psd(np.asarray(populations, dtype=float))
        p = p / p.sum()
        v = np.array(vectors, dtype=complex)
        order = np.argsort(p, kind="stable")
        p, v = p[order], v[:, order]
        m = (v * p) @ v.conj().T
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        return cls(m, EigenSystem(p, v))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return self.spectrum.values

    def transformed(self, u: np.ndarray) -> "DensityMatrix":
        """``U rho U^H`` for unitary ``U``, reusing the known populations."""
        return DensityMatrix.from_spectrum(self.spectrum.values, u @ self.spectrum.vectors)


def _require_temperature(T: float) -> None:
    if not T > 0:
        raise ValueError(f"temperature must be positive, got T={T!r}; use ground_state_limit for T = 0")


def gibbs_state(h, T: float) -> DensityMatrix:
    """exp(-H/T) / Tr exp(-H/T), shifted by the ground energy to avoid overflow."""
    _require_temperature(T)
    es = eigh(h)
    e0 = es.values[0]
    rho = mat_func(es, lambda e: math.exp(-(e - e0) / T))
    return DensityMatrix.from_matrix(rho / np.trace(rho).real)


@dataclass(frozen=True)
class ClosedFormFactors:
    """cosh(gamma/T), sinh(gamma/T) and Z = 2 cosh(B/T) + 2 cosh(gamma/T)."""

    gamma: float
    gamma_c: float
    gamma_s: float
    Z: float


def closed_form_factors(params: ModelParams) -> ClosedFormFactors:
    _require_temperature(params.T)
    g = params.gamma
    with np.errstate(over="ignore"):
        gc = float(np.cosh(g / params.T))
        gs = float(np.sinh(g / params.T))
        z = float(2.0 * np.cosh(params.B / params.T) + 2.0 * gc)
    return ClosedFormFactors(g, gc, gs, z)


def _scaled_cosh(x: float, shift: float) -> float:
    # cosh(x) * exp(-shift) without overflow for shift >= |x|
    if abs(x) < _EXP_SAFE:
        return math.cosh(x) * math.exp(-shift)
    return 0.5 * (math.exp(abs(x) - shift) + math.exp(-abs(x) - shift))


def _scaled_sinh(x: float, shift: float) -> float:
    if abs(x) < _EXP_SAFE:
        return math.sinh(x) * math.exp(-shift)
    return math.copysign(0.5 * (math.exp(abs(x) - shift) - math.exp(-abs(x) - shift)), x)


def closed_form_state(params: ModelParams) -> DensityMatrix:
    """Two-spin thermal state written out entry by entry.

    With gc = cosh(gamma/T), gs = sinh(gamma/T) and W = 2 (cosh(B/T) + gc):

        rho_11 = exp(-B/T) / W           rho_44 = exp(B/T) / W
        rho_22 = (gc - b gs/gamma) / W   rho_33 = (gc + b gs/gamma) / W
        rho_23 = i(i - D) J gs / (gamma W)
        rho_32 = i(i + D) J gs / (gamma W)

    rho_11 is the same number as 1 / (1 + e^{2B/T} + 2 e^{B/T} gc).  All
    hyperbolic factors are evaluated pre-scaled by exp(-max(|B|, gamma)/T)
    so large field-to-temperature ratios do not overflow.  At gamma = 0 the
    ratio gs/gamma takes its limit 1/T.
    """
    if params.N != 2:
        raise ValueError("the closed-form state exists only for N = 2")
    _require_temperature(params.T)
    J, B, b, D, T = params.J, params.B, params.b, params.D, params.T
    g = params.gamma
    xb, xg = B / T, g / T
    shift = max(abs(xb), xg)
    gc = _scaled_cosh(xg, shift)
    gs_over_g = math.exp(-shift) / T if g == 0.0 else _scaled_sinh(xg, shift) / g
    w = 2.0 * (_scaled_cosh(xb, shift) + gc)

    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = math.exp(-xb - shift) / w
    rho[3, 3] = math.exp(xb - shift) / w
    rho[1, 1] = (gc - b * gs_over_g) / w
    rho[2, 2] = (gc + b * gs_over_g) / w
    rho[1, 2] = 1j * (1j - D) * J * gs_over_g / w
    rho[2, 1] = 1j * (1j + D) * J * gs_over_g / w
    return DensityMatrix.from_matrix(rho)


def ground_state_limit(params: ModelParams) -> DensityMatrix:
    """T -> 0 limit: equal mixture over the lowest-energy eigenspace."""
    es = eigh(build_hamiltonian(params))
    e0 = es.values[0]
    ground = es.values - e0 <= GROUND_DEGENERACY_TOL
    p = np.where(ground, 1.0, 0.0)
    return DensityMatrix.from_spectrum(p, es.vectors)
