import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmqfi.numerics import (
    EigenConvergenceError,
    eigh,
    expm_hermitian,
    fidelity,
    jacobi_eigh,
    mat_func,
    max_eig_sym3,
    sqrtm_psd,
)
from dmqfi.qfi import fibonacci_sphere
from dmqfi.spin_model import ModelParams, build_hamiltonian


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def random_density(rng, n, rank=None):
    g = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def test_eigh_diagonal():
    es = eigh(np.diag([3.0, -1.0]))
    assert es.values.tolist() == [-1.0, 3.0]
    np.testing.assert_array_equal(es.vectors, [[0, 1], [1, 0]])


def test_eigh_two_spin_xx_spectrum():
    es = eigh(build_hamiltonian(ModelParams(J=1.0)))
    np.testing.assert_allclose(es.values, [-1, 0, 0, 1], atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 8, 16, 32])
def test_eigh_reconstruction_and_orthonormality(n):
    rng = np.random.default_rng(n)
    m = random_hermitian(rng, n)
    es = eigh(m)
    v = es.vectors
    scale = np.linalg.norm(m)
    assert np.linalg.norm(m @ v - v * es.values) / scale < 1e-12
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) < 1e-11
    assert np.max(np.abs(es.reconstruct() - m)) < 1e-11 * scale
    assert np.all(np.diff(es.values) >= 0)


def test_eigh_matches_lapack_eigenvalues():
    rng = np.random.default_rng(7)
    m = random_hermitian(rng, 16)
    np.testing.assert_allclose(eigh(m).values, np.linalg.eigvalsh(m), atol=1e-12)


def test_eigh_is_deterministic():
    rng = np.random.default_rng(3)
    m = random_hermitian(rng, 8)
    a, b = eigh(m), eigh(m.copy())
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.vectors, b.vectors)


def test_eigh_phase_convention():
    rng = np.random.default_rng(11)
    es = eigh(random_hermitian(rng, 6))
    for k in range(6):
        v = es.vector(k)
        first = v[np.flatnonzero(np.abs(v) > 1e-10)[0]]
        assert first.imag == pytest.approx(0.0, abs=1e-15)
        assert first.real > 0


def test_eigh_degenerate_ties_are_ordered():
    es = eigh(np.zeros((3, 3)))
    # lexicographically ascending columns
    np.testing.assert_array_equal(es.vectors, np.eye(3)[:, ::-1])


def test_real_input_stays_real():
    es = eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.isrealobj(es.vectors)
    np.testing.assert_allclose(es.values, [1, 3])


def test_large_dimension_falls_back_and_stays_canonical():
    rng = np.random.default_rng(5)
    m = random_hermitian(rng, 128)
    es = eigh(m)
    assert np.linalg.norm(m @ es.vectors - es.vectors * es.values) / np.linalg.norm(m) < 1e-12


def test_jacobi_sweep_cap():
    rng = np.random.default_rng(0)
    with pytest.raises(EigenConvergenceError):
        jacobi_eigh(random_hermitian(rng, 6), max_sweeps=1)


def test_eigh_rejects_non_square():
    with pytest.raises(ValueError):
        eigh(np.zeros((2, 3), dtype=complex))


def test_mat_func_exp_of_zero_is_identity():
    np.testing.assert_allclose(mat_func(np.zeros((4, 4)), math.exp), np.eye(4), atol=1e-15)


def test_mat_func_sqrt_diag():
    np.testing.assert_allclose(mat_func(np.diag([4.0, 9.0]), math.sqrt), np.diag([2.0, 3.0]), atol=1e-15)


def test_mat_func_boltzmann_trace():
    # sum of exp(-E) over the spectrum {1, 0, 0, -1}
    expected = math.exp(-1) + 1 + 1 + math.exp(1)
    assert expected == pytest.approx(2 + 2 * math.cosh(1), rel=1e-15)
    h = build_hamiltonian(ModelParams(J=1.0))
    out = expm_hermitian(h, -1.0)
    assert np.trace(out).real == pytest.approx(expected, rel=1e-12)


def test_mat_func_trace_identity_random():
    rng = np.random.default_rng(9)
    m = random_hermitian(rng, 8) / 4
    lam = np.linalg.eigvalsh(m)
    assert np.trace(mat_func(m, math.exp)).real == pytest.approx(np.exp(lam).sum(), rel=1e-11)


def test_mat_func_undefined():
    with pytest.raises(ValueError):
        mat_func(np.diag([1.0, -1.0]), math.sqrt)
    with pytest.raises(ValueError):
        mat_func(np.diag([1.0, 0.0]), math.log)


def test_sqrtm_clamps_tiny_negatives():
    r = sqrtm_psd(np.diag([1.0, -1e-14]))
    np.testing.assert_allclose(r, np.diag([1.0, 0.0]), atol=1e-15)
    with pytest.raises(ValueError):
        sqrtm_psd(np.diag([1.0, -1e-6]))


def test_fidelity_anchors():
    rng = np.random.default_rng(1)
    rho = random_density(rng, 4)
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)
    ket00 = np.diag([1.0, 0, 0, 0])
    ket11 = np.diag([0, 0, 0, 1.0])
    assert fidelity(ket00, ket11) == pytest.approx(0.0, abs=1e-15)
    psi = np.array([np.cos(0.3), np.exp(0.7j) * np.sin(0.3)])
    pure = np.outer(psi, psi.conj())
    assert fidelity(np.eye(2) / 2, pure) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_pure_states_is_overlap():
    rng = np.random.default_rng(2)
    a = rng.normal(size=4) + 1j * rng.normal(size=4)
    b = rng.normal(size=4) + 1j * rng.normal(size=4)
    a /= np.linalg.norm(a)
    b /= np.linalg.norm(b)
    expected = abs(np.vdot(a, b)) ** 2
    assert fidelity(np.outer(a, a.conj()), np.outer(b, b.conj())) == pytest.approx(expected, abs=1e-12)


def test_fidelity_commuting_states_is_classical():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    q = np.array([0.4, 0.3, 0.2, 0.1])
    expected = np.sum(np.sqrt(p * q)) ** 2
    assert fidelity(np.diag(p), np.diag(q)) == pytest.approx(expected, abs=1e-14)


def test_fidelity_dimension_mismatch():
    with pytest.raises(ValueError):
        fidelity(np.eye(2) / 2, np.eye(4) / 4)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_fidelity_symmetric_and_bounded(seed, rank):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 4, rank)
    sigma = random_density(rng, 4)
    f1, f2 = fidelity(rho, sigma), fidelity(sigma, rho)
    assert abs(f1 - f2) < 1e-10
    assert -1e-12 <= f1 <= 1 + 1e-10


def test_max_eig_sym3_anchors():
    c_max, n = max_eig_sym3(np.diag([4.0, 4.0, 0.0]))
    assert c_max == 4.0
    np.testing.assert_array_equal(n, [1.0, 0.0, 0.0])
    c_max, n = max_eig_sym3(np.zeros((3, 3)))
    assert c_max == 0.0
    assert np.linalg.norm(n) == pytest.approx(1.0, abs=1e-12)


def test_max_eig_sym3_non_x_direction():
    c_max, n = max_eig_sym3(np.diag([0.0, 1.0, 5.0]))
    assert c_max == pytest.approx(5.0)
    np.testing.assert_allclose(n, [0, 0, 1], atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_max_eig_sym3_matches_direction_grid(seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(3, 3))
    c = c + c.T
    c /= np.ptp(np.linalg.eigvalsh(c))  # unit eigenvalue spread
    c_max, n = max_eig_sym3(c)
    dirs = fibonacci_sphere(10_000)
    rayleigh = np.einsum("di,ij,dj->d", dirs, c, dirs)
    assert rayleigh.max() <= c_max + 1e-10
    assert rayleigh.max() == pytest.approx(c_max, abs=1e-3)
    assert n @ c @ n == pytest.approx(c_max, abs=1e-10)
    assert np.linalg.norm(n) == pytest.approx(1.0, abs=1e-12)
