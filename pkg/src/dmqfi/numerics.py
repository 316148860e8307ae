"""Dense Hermitian linear algebra: Jacobi eigensolver, matrix functions, fidelity.

Everything here works on plain numpy arrays. Matrices are symmetrized on the
way in, so callers may pass anything that is Hermitian up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

# Above this dimension the cyclic Jacobi kernel is too slow in Python and the
# LAPACK driver is used instead; output post-processing is shared.
JACOBI_MAX_DIM = 64

PSD_CLAMP = 1e-12
HERMITIAN_TOL = 1e-13

_PHASE_TOL = 1e-10
_TIE_TOL = 1e-12


class EigenConvergenceError(RuntimeError):
    """Jacobi sweeps hit the cap without reaching the off-diagonal tolerance."""


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self) -> None:
        self.values.setflags(write=False)
        self.vectors.setflags(write=False)

    @property
    def dim(self) -> int:
        return len(self.values)

    def vector(self, k: int) -> np.ndarray:
        return self.vectors[:, k]

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values) @ v.conj().T


def hermitian(m, tol: float | None = None) -> np.ndarray:
    """Return a Hermitian copy of ``m`` (symmetrized ``(m + m^H) / 2``).

    With ``tol`` given, raise ``ValueError`` when ``m`` deviates from its
    adjoint by more than ``tol`` in any entry.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if tol is not None:
        dev = np.max(np.abs(a - a.conj().T))
        if dev > tol:
            raise ValueError(f"matrix is not Hermitian (max |M - M^H| = {dev:.3e})")
    return 0.5 * (a + a.conj().T)


def symmetric3(c) -> np.ndarray:
    """Real symmetric 3x3 copy of ``c``."""
    a = np.array(c, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    return 0.5 * (a + a.T)


def _rotation(app: float, aqq: float, apq):
    """2x2 unitary block zeroing the (p, q) entry of a Hermitian matrix.

    The pivot is first made real by a phase on column q, then annihilated by
    a real Givens rotation (Numerical Recipes sign conventions).
    """
    r = abs(apq)
    ph = apq / r
    theta = (aqq - app) / (2.0 * r)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    phc = np.conj(ph)
    return np.array([[c, s], [-s * phc, c * phc]])


def jacobi_eigh(m: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Raw cyclic Jacobi diagonalization of a Hermitian (or real symmetric) matrix.

    Returns unsorted ``(values, vectors)``. Real input stays real throughout.
    """
    a = np.array(m, dtype=complex if np.iscomplexobj(m) else float)
    n = a.shape[0]
    v = np.eye(n, dtype=a.dtype)
    scale = np.linalg.norm(a)
    for _ in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0:
                    continue
                u = _rotation(a[p, p].real, a[q, q].real, apq)
                if a.dtype == float:
                    u = u.real
                pq = [p, q]
                a[:, pq] = a[:, pq] @ u
                a[pq, :] = u.conj().T @ a[pq, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, pq] = v[:, pq] @ u
    raise EigenConvergenceError(
        f"Jacobi did not converge in {max_sweeps} sweeps (dim {n}, off-norm {off:.3e})"
    )


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    big = np.flatnonzero(np.abs(vec) > _PHASE_TOL)
    if len(big) == 0:
        return vec
    z = vec[big[0]]
    return vec * (abs(z) / z)


def _lex_key(vec: np.ndarray) -> tuple:
    return tuple(x for z in vec for x in (round(float(z.real), 12), round(float(z.imag), 12)))


def _canonical(values: np.ndarray, vectors: np.ndarray, scale: float) -> EigenSystem:
    vectors = np.column_stack([_fix_phase(vectors[:, k]) for k in range(len(values))])
    order = list(np.argsort(values, kind="stable"))
    tie = _TIE_TOL * max(1.0, scale)
    out: list[int] = []
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and values[order[j]] - values[order[j - 1]] <= tie:
            j += 1
        out.extend(sorted(order[i:j], key=lambda k: _lex_key(vectors[:, k])))
        i = j
    return EigenSystem(values[out].copy(), vectors[:, out].copy())


def eigh(m) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix with deterministic output.

    Eigenvalues come back ascending. Each eigenvector is phase-fixed so its
    first non-negligible component is real positive, and exactly (or nearly)
    degenerate eigenvalues are ordered by the lexicographic order of their
    eigenvectors' (re, im) entries.

    Real symmetric input yields real eigenvectors.
    """
    if np.isrealobj(m):
        a = np.array(m, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        a = 0.5 * (a + a.T)
    else:
        a = hermitian(m)
    if a.shape[0] > JACOBI_MAX_DIM:
        values, vectors = np.linalg.eigh(a)
    else:
        values, vectors = jacobi_eigh(a)
    return _canonical(values, vectors, float(np.linalg.norm(a)))


def mat_func(m, f: Callable[[float], float]) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix: ``V f(L) V^H``.

    Raises ``ValueError`` when ``f`` is undefined (non-finite) at any
    eigenvalue.
    """
    es = m if isinstance(m, EigenSystem) else eigh(m)
    fv = np.empty(es.dim)
    for k, x in enumerate(es.values):
        try:
            with np.errstate(invalid="raise", divide="raise", over="raise"):
                fv[k] = f(float(x))
        except (ValueError, OverflowError, ZeroDivisionError, FloatingPointError) as exc:
            raise ValueError(f"function undefined at eigenvalue {x!r}: {exc}") from exc
        if not math.isfinite(fv[k]):
            raise ValueError(f"function undefined at eigenvalue {x!r}")
    out = (es.vectors * fv) @ es.vectors.conj().T
    return 0.5 * (out + out.conj().T)


def clamp_psd(values: np.ndarray, tol: float = PSD_CLAMP) -> np.ndarray:
    """Zero eigenvalues in (-tol, 0); reject anything more negative."""
    values = np.asarray(values, dtype=float)
    if np.any(values <= -tol):
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {values.min():.3e})")
    return np.where(values < 0.0, 0.0, values)


def sqrtm_psd(m) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    es = m if isinstance(m, EigenSystem) else eigh(m)
    return mat_func(EigenSystem(clamp_psd(es.values), es.vectors.copy()), math.sqrt)


def expm_hermitian(m, t: float = 1.0) -> np.ndarray:
    """``exp(t M)`` for Hermitian ``M`` and real ``t``."""
    return mat_func(m, lambda x: math.exp(t * x))


def unitary_exp(m, phi: float) -> np.ndarray:
    """``exp(-i phi M)`` for Hermitian ``M``."""
    es = m if isinstance(m, EigenSystem) else eigh(m)
    return (es.vectors * np.exp(-1j * phi * es.values)) @ es.vectors.conj().T


def _spectrum_of(state) -> EigenSystem:
    spectrum = getattr(state, "spectrum", None)
    if spectrum is not None:
        return spectrum
    return eigh(state)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Accepts arrays or objects carrying a cached ``spectrum``. The trace norm
    is evaluated as the sum of singular values of ``sqrt(rho) sqrt(sigma)``,
    which keeps near-pure states accurate (no square root of tiny, noisy
    eigenvalues of the product).
    """
    a = _spectrum_of(rho)
    b = _spectrum_of(sigma)
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    root_a = sqrtm_psd(a)
    root_b = sqrtm_psd(b)
    sv = np.linalg.svd(root_a @ root_b, compute_uv=False)
    return float(np.sum(sv) ** 2)


def max_eig_sym3(c) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of a real symmetric 3x3 matrix and a unit eigenvector.

    When the top eigenspace contains the x axis (the common case for an x-y
    degenerate matrix) the direction (1, 0, 0) is returned.
    """
    c = symmetric3(c)
    es = eigh(c)
    c_max = float(es.values[-1])
    x_hat = np.array([1.0, 0.0, 0.0])
    if np.linalg.norm(c @ x_hat - c_max * x_hat) < 1e-10:
        return c_max, x_hat
    n = np.real(es.vectors[:, -1]).astype(float)
    return c_max, n / np.linalg.norm(n)
