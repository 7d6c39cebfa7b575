import numpy as np
import pytest

from barrenbench.errors import ValidationError
from barrenbench.unitary import (
    HaarSplitSite,
    ParamUnitarySite,
    build_unitary,
    derivative_factors,
    expm_hermitian,
    haar_batch,
    haar_sample,
    hermitian_basis,
    random_param_site,
)
from barrenbench.validation import is_unitary

from conftest import pauli


class TestHaarSample:
    def test_n1_is_phase(self, rng):
        u = haar_sample(1, rng)
        assert u.shape == (1, 1)
        assert abs(abs(u[0, 0]) - 1) < 1e-12

    def test_unitary(self, rng):
        for N in (2, 3, 4, 7):
            u = haar_sample(N, rng)
            np.testing.assert_allclose(u @ u.conj().T, np.eye(N), atol=1e-10)

    def test_zero_dimension(self, rng):
        with pytest.raises(ValueError):
            haar_sample(0, rng)

    def test_first_moment(self, rng):
        u = haar_batch(4, 100_000, rng)
        x = np.abs(u[:, 0, 0]) ** 2
        se = x.std() / np.sqrt(len(x))
        assert abs(x.mean() - 0.25) < 3 * se

    def test_left_invariance(self, rng):
        v = haar_sample(3, rng)
        u = haar_batch(3, 10_000, rng)
        a = np.trace(u, axis1=1, axis2=2)
        b = np.trace(v @ u, axis1=1, axis2=2)
        for x in (a, b):
            assert abs(x.mean()) < 4 * x.std() / np.sqrt(len(x))
        m2a, m2b = np.abs(a) ** 2, np.abs(b) ** 2
        se = np.sqrt(m2a.var() / len(a) + m2b.var() / len(b))
        assert abs(m2a.mean() - m2b.mean()) < 4 * se

    def test_phase_correction_matters(self, rng):
        # plain QR gives a real positive R diagonal; corrected samples have uniform phases
        u = haar_batch(2, 20_000, rng)
        phases = np.angle(u[:, 0, 0])
        assert abs(np.mean(np.exp(1j * phases))) < 0.03


class TestHermitianBasis:
    def test_pauli(self):
        x, y, z = pauli()
        basis = hermitian_basis(2)
        for got, want in zip(basis, (x, y, z, np.eye(2))):
            np.testing.assert_allclose(got, want)

    def test_orthonormal(self):
        for N in (2, 3, 4):
            basis = hermitian_basis(N)[:-1]
            gram = np.array([[np.trace(a @ b) for b in basis] for a in basis])
            np.testing.assert_allclose(gram, 2 * np.eye(N * N - 1), atol=1e-12)

    def test_traceless_n3(self):
        basis = hermitian_basis(3)
        assert len(basis) == 9
        for g in basis[:-1]:
            assert abs(np.trace(g)) < 1e-12
            np.testing.assert_allclose(g, g.conj().T)

    def test_n1_rejected(self):
        with pytest.raises(ValueError):
            hermitian_basis(1)


class TestBuildUnitary:
    def test_zero_angles_identity(self):
        site = ParamUnitarySite(tuple(hermitian_basis(4)), (0.0,) * 16, 8)
        np.testing.assert_allclose(build_unitary(site), np.eye(4), atol=1e-15)

    def test_diagonal_exponential(self):
        _, _, z = pauli()
        u = build_unitary(ParamUnitarySite((z,), (np.pi / 2,), 1))
        np.testing.assert_allclose(u, np.diag([1j, -1j]), atol=1e-15)

    def test_taylor_second_order(self):
        x, y, _ = pauli()
        errs = []
        for th in (1e-2, 1e-3):
            u = build_unitary(ParamUnitarySite((x, y), (th, 2 * th), 1))
            approx = (np.eye(2) + 1j * th * x) @ (np.eye(2) + 2j * th * y)
            errs.append(np.linalg.norm(u - approx))
        assert errs[1] < errs[0] / 50  # O(theta^2)

    def test_unitary_random_draws(self, rng):
        for _ in range(100):
            assert is_unitary(build_unitary(random_param_site(4, rng)))

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValidationError):
            ParamUnitarySite((np.array([[0, 1], [0, 0]]),), (0.1,), 1)

    def test_split_range(self):
        x, y, z = pauli()
        with pytest.raises(ValidationError):
            ParamUnitarySite((x, y, z), (0, 0, 0), 3)

    def test_halves(self, rng):
        site = random_param_site(4, rng)
        um, up = site.halves()
        np.testing.assert_allclose(um @ up, build_unitary(site), atol=1e-12)

    def test_expm_batched(self):
        _, _, z = pauli()
        out = expm_hermitian(z, np.array([0.0, np.pi]))
        np.testing.assert_allclose(out[1], -np.eye(2), atol=1e-15)


class TestDerivativeFactors:
    def test_single_generator_at_zero(self):
        x, _, _ = pauli()
        left, g, right = derivative_factors(ParamUnitarySite((x,), (0.0,), 1), 1)
        np.testing.assert_allclose(1j * left @ g @ right, 1j * x, atol=1e-15)

    def test_reassembly(self, rng):
        site = random_param_site(4, rng)
        for k in (1, 7, 16):
            left, _, right = derivative_factors(site, k)
            np.testing.assert_allclose(left @ right, build_unitary(site), atol=1e-12)

    def test_finite_differences(self, rng):
        site = random_param_site(4, rng)
        h = 1e-5
        for k in range(1, 17):
            left, g, right = derivative_factors(site, k)
            up = build_unitary(site.with_angle(k - 1, site.angles[k - 1] + h))
            dn = build_unitary(site.with_angle(k - 1, site.angles[k - 1] - h))
            np.testing.assert_allclose(1j * left @ g @ right, (up - dn) / (2 * h), atol=1e-8)

    def test_three_generator_second_order(self, rng):
        x, y, z = pauli()
        site = ParamUnitarySite((x, y, z), tuple(rng.uniform(-np.pi, np.pi, 3)), 1)
        for k in (1, 2, 3):
            left, g, right = derivative_factors(site, k)
            exact = 1j * left @ g @ right
            errs = []
            for h in (1e-2, 1e-3):
                up = build_unitary(site.with_angle(k - 1, site.angles[k - 1] + h))
                dn = build_unitary(site.with_angle(k - 1, site.angles[k - 1] - h))
                errs.append(np.abs((up - dn) / (2 * h) - exact).max())
            assert errs[1] < errs[0] / 50

    def test_out_of_range(self, rng):
        with pytest.raises(ValidationError):
            derivative_factors(random_param_site(2, rng), 5)


class TestHaarSplitSite:
    def test_derivative(self, rng):
        um, up = haar_sample(4, rng), haar_sample(4, rng)
        g = hermitian_basis(4)[0]
        site = HaarSplitSite(um, up, g)
        h = 1e-5
        fd = (site.unitary(h) - site.unitary(-h)) / (2 * h)
        np.testing.assert_allclose(site.derivative(), fd, atol=1e-9)
        np.testing.assert_allclose(site.unitary(), um @ up, atol=1e-14)

    def test_rejects_non_unitary(self, rng):
        with pytest.raises(ValidationError):
            HaarSplitSite(2 * np.eye(2), np.eye(2), pauli()[0])
