import numpy as np
import pytest

from tempcorr.errors import NonHermitianInput
from tempcorr.matcore import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    eig_hermitian,
    expm_antihermitian,
    identity,
    is_positive_semidefinite,
    is_unitary,
    min_eigenvalue,
    sqrtm_psd,
)

from conftest import random_hermitian


class TestExpmAntihermitian:
    def test_zero_generator_gives_identity(self):
        u = expm_antihermitian(np.zeros((3, 3), dtype=complex), 1.7)
        np.testing.assert_allclose(u, identity(3), atol=1e-12)

    def test_half_rabi_period_flips_z(self):
        """exp(-i sx pi/2) sends sz to -sz; phrased via conjugation so the
        global phase drops out."""
        omega = 2.3
        u = expm_antihermitian(0.5 * omega * SIGMA_X, np.pi / omega)
        np.testing.assert_allclose(u.conj().T @ SIGMA_Z @ u, -SIGMA_Z, atol=1e-12)

    def test_heisenberg_rotation_of_sigma_x(self):
        """For H = -(omega/2) sz: U = diag(e^{i wt/2}, e^{-i wt/2}), so
        U^dag sx U = sx cos(wt) + sy sin(wt). The diagonal-phase matrix is
        the independent oracle here."""
        rng = np.random.default_rng(7)
        omega = 1.3
        for t in rng.uniform(0.0, 10.0, size=20):
            u = expm_antihermitian(-0.5 * omega * SIGMA_Z, t)
            direct = np.diag([np.exp(0.5j * omega * t), np.exp(-0.5j * omega * t)])
            np.testing.assert_allclose(u, direct, atol=1e-12)
            rotated = SIGMA_X * np.cos(omega * t) + SIGMA_Y * np.sin(omega * t)
            np.testing.assert_allclose(u.conj().T @ SIGMA_X @ u, rotated, atol=1e-12)

    def test_semigroup(self, rng):
        for _ in range(10):
            h = random_hermitian(rng, 4)
            t, s = rng.uniform(0.0, 3.0, size=2)
            left = expm_antihermitian(h, t) @ expm_antihermitian(h, s)
            np.testing.assert_allclose(left, expm_antihermitian(h, t + s), atol=1e-10)

    def test_unitarity(self, rng):
        for _ in range(10):
            u = expm_antihermitian(random_hermitian(rng, 3), rng.uniform(0.0, 5.0))
            assert is_unitary(u, 1e-12)

    def test_hbar_scale(self, rng):
        h = random_hermitian(rng)
        np.testing.assert_allclose(
            expm_antihermitian(h, 1.0, hbar_scale=2.0), expm_antihermitian(h, 0.5), atol=1e-12
        )

    def test_rejects_nonhermitian(self):
        with pytest.raises(NonHermitianInput):
            expm_antihermitian(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


class TestEigHermitian:
    def test_sigma_z_spectrum(self):
        w, v = eig_hermitian(SIGMA_Z)
        np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-14)
        # ascending order puts |1> first, |0> second (up to phase)
        np.testing.assert_allclose(np.abs(v[:, 0]), [0.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(np.abs(v[:, 1]), [1.0, 0.0], atol=1e-14)

    def test_rotated_observable_has_unit_spectrum(self, rng):
        for theta in rng.uniform(0.0, 2.0 * np.pi, size=10):
            q = np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X
            np.testing.assert_allclose(eig_hermitian(q)[0], [-1.0, 1.0], atol=1e-12)

    def test_symmetric_pauli_combination_boundary(self):
        """(1 + eta (sx+sy+sz))/8 has eigenvalues (1 +/- eta sqrt(3))/8;
        at eta = 1/sqrt(3) the lower one is exactly zero."""
        eta = 1.0 / np.sqrt(3.0)
        m = (identity(2) + eta * (SIGMA_X + SIGMA_Y + SIGMA_Z)) / 8.0
        assert abs(min_eigenvalue(m)) <= 1e-12

    def test_reconstruction(self, rng):
        for _ in range(10):
            m = random_hermitian(rng, 5)
            w, v = eig_hermitian(m)
            np.testing.assert_allclose((v * w) @ v.conj().T, m, atol=1e-10)

    def test_orthonormal_eigenvectors(self, rng):
        _, v = eig_hermitian(random_hermitian(rng, 6))
        np.testing.assert_allclose(v.conj().T @ v, identity(6), atol=1e-10)

    def test_rejects_nonhermitian(self):
        with pytest.raises(NonHermitianInput):
            eig_hermitian(np.array([[0.0, 1.0], [2.0, 0.0]]))


class TestMinEigenvalue:
    def test_half_identity(self):
        assert min_eigenvalue(identity(2) / 2.0) == pytest.approx(0.5, abs=1e-14)

    def test_rank_one_projector(self):
        proj = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
        assert min_eigenvalue(proj) == pytest.approx(0.0, abs=1e-14)

    def test_global_povm_element_above_boundary(self):
        m = (identity(2) + 0.6 * (SIGMA_X + SIGMA_Y + SIGMA_Z)) / 8.0
        expected = (1.0 - 0.6 * np.sqrt(3.0)) / 8.0
        assert min_eigenvalue(m) == pytest.approx(expected, abs=1e-14)
        assert min_eigenvalue(m) == pytest.approx(-0.00490, abs=5e-6)
        assert not is_positive_semidefinite(m)


class TestSqrtmPsd:
    def test_squares_back(self, rng):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = g @ g.conj().T
        root = sqrtm_psd(m)
        np.testing.assert_allclose(root @ root, m, atol=1e-10)

    def test_clips_roundoff_negatives(self):
        m = np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)  # rank one, one zero eigenvalue
        root = sqrtm_psd(m)
        np.testing.assert_allclose(root @ root, m, atol=1e-12)
