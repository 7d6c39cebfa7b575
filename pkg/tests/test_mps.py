import numpy as np
import pytest

from barrenbench.errors import DegenerateStateError, DimensionError, SizeGuardError, ValidationError
from barrenbench.mps import (
    LocalObservable,
    MpsState,
    embed_unitary_mps,
    inner_product,
    local_expectation,
    norm_sq,
    random_raw_mps,
    site_from_unitary,
    to_statevector,
)
from barrenbench.unitary import haar_batch

from conftest import brute_statevector, pauli, site_operator


def identity_state(n, d=2, D=2):
    return embed_unitary_mps([np.eye(d * D)] * n, d, D)


class TestEmbedding:
    def test_identity_sites(self):
        psi = identity_state(3)
        for a in psi.sites:
            np.testing.assert_array_equal(a[0], np.eye(2))
            np.testing.assert_array_equal(a[1], np.zeros((2, 2)))
        v = to_statevector(psi)
        assert v[0] == 2 and np.count_nonzero(v) == 1

    def test_index_convention(self, rng):
        u = haar_batch(4, 1, rng)[0]
        a = site_from_unitary(u, 2, 2)
        for j in range(2):
            for l in range(2):
                for r in range(2):
                    assert a[j, l, r] == u[j * 2 + r, l]

    def test_norm_vs_dense(self, rng):
        psi = embed_unitary_mps(haar_batch(4, 2, rng), 2, 2)
        dense = brute_statevector(psi.sites)
        assert abs(norm_sq(psi) - np.vdot(dense, dense).real) < 1e-10

    def test_haar_norm_near_one(self, rng):
        vals = [norm_sq(embed_unitary_mps(haar_batch(4, 8, rng), 2, 2)) for _ in range(200)]
        assert abs(np.mean(vals) - 1) < 0.1

    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError):
            embed_unitary_mps([2 * np.eye(4)], 2, 2)

    def test_rejects_wrong_size(self):
        with pytest.raises(DimensionError):
            embed_unitary_mps([np.eye(6)], 2, 2)

    def test_origin(self, rng):
        assert identity_state(2).origin == "embedded"
        assert random_raw_mps(2, 2, 2, rng).origin == "raw"

    def test_norm_variance_shrinks(self, rng):
        spreads = []
        for n in (4, 6, 8, 10):
            vals = [norm_sq(embed_unitary_mps(haar_batch(4, n, rng), 2, 2)) for _ in range(500)]
            spreads.append(np.var(vals))
        assert sum(b < a for a, b in zip(spreads, spreads[1:])) >= 3


class TestInnerProduct:
    def test_positive_real(self, rng):
        psi = random_raw_mps(5, 2, 3, rng)
        z = inner_product(psi, psi)
        assert z.real > 0 and abs(z.imag) < 1e-12 * z.real

    def test_product_state_unit(self):
        psi = identity_state(4).scaled(0.5)
        assert abs(norm_sq(psi) - 1) < 1e-14

    def test_vs_dense(self, rng):
        psi, phi = random_raw_mps(5, 2, 2, rng), random_raw_mps(5, 2, 2, rng)
        ref = np.vdot(brute_statevector(phi.sites), brute_statevector(psi.sites))
        assert abs(inner_product(psi, phi) - ref) < 1e-10 * abs(ref)

    def test_conjugate_symmetry(self, rng):
        psi, phi = random_raw_mps(4, 3, 2, rng), random_raw_mps(4, 3, 2, rng)
        assert abs(inner_product(psi, phi) - np.conj(inner_product(phi, psi))) < 1e-12

    def test_dense_consistency(self, rng):
        for _ in range(20):
            psi, phi = random_raw_mps(4, 2, 2, rng), random_raw_mps(4, 2, 2, rng)
            ref = np.vdot(to_statevector(phi), to_statevector(psi))
            assert abs(inner_product(psi, phi) - ref) < 1e-12

    def test_mixed_bond_dimension(self, rng):
        psi, phi = random_raw_mps(4, 2, 3, rng), random_raw_mps(4, 2, 1, rng)
        ref = np.vdot(brute_statevector(phi.sites), brute_statevector(psi.sites))
        assert abs(inner_product(psi, phi) - ref) < 1e-12

    def test_shape_mismatch(self, rng):
        with pytest.raises(DimensionError):
            inner_product(random_raw_mps(3, 2, 2, rng), random_raw_mps(4, 2, 2, rng))


class TestNorm:
    def test_identity_embedding(self):
        assert norm_sq(identity_state(3)) == pytest.approx(4.0, abs=1e-14)

    def test_scaling(self, rng):
        psi = random_raw_mps(4, 2, 2, rng)
        c = 0.7 - 0.2j
        scaled = psi.replace_site(3, psi.sites[2] * c)
        assert norm_sq(scaled) == pytest.approx(abs(c) ** 2 * norm_sq(psi), rel=1e-12)


class TestLocalExpectation:
    def test_z_eigenstate(self):
        _, _, z = pauli()
        psi = identity_state(4)
        for m in range(1, 5):
            assert local_expectation(psi, LocalObservable(z, m)) == pytest.approx(1.0)

    def test_x_on_basis_state(self):
        x, _, _ = pauli()
        assert abs(local_expectation(identity_state(4), LocalObservable(x, 2))) < 1e-15

    def test_vs_dense(self, rng):
        x, _, _ = pauli()
        psi = random_raw_mps(5, 2, 2, rng)
        v = brute_statevector(psi.sites)
        ref = np.vdot(v, site_operator(x, 3, 5) @ v).real / np.vdot(v, v).real
        assert abs(local_expectation(psi, LocalObservable(x, 3)) - ref) < 1e-10

    def test_identity_shift(self, rng):
        x, _, _ = pauli()
        psi = random_raw_mps(5, 2, 2, rng)
        base = local_expectation(psi, LocalObservable(x, 2))
        shifted = local_expectation(psi, LocalObservable(x + 0.37 * np.eye(2), 2))
        assert shifted - base == pytest.approx(0.37, abs=1e-10)

    def test_site_out_of_range(self, rng):
        with pytest.raises(ValidationError):
            local_expectation(random_raw_mps(3, 2, 2, rng), LocalObservable(pauli()[0], 4))

    def test_degenerate(self):
        psi = MpsState(tuple(np.zeros((2, 2, 2)) for _ in range(3)))
        with pytest.raises(DegenerateStateError):
            local_expectation(psi, LocalObservable(pauli()[0], 1))

    def test_traceless_flag(self):
        x, _, _ = pauli()
        assert LocalObservable(x, 1).traceless
        assert not LocalObservable(np.eye(2), 1).traceless

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValidationError):
            LocalObservable(np.array([[0, 1], [0, 0]]), 1)


class TestStatevector:
    def test_single_site(self):
        a = np.array([[[0.3]], [[-1.2j]]])
        np.testing.assert_allclose(to_statevector(MpsState((a,))), [0.3, -1.2j])

    def test_ghz(self):
        a = np.zeros((2, 2, 2))
        a[0, 0, 0] = a[1, 1, 1] = 1
        v = to_statevector(MpsState((a,) * 3))
        assert set(np.flatnonzero(v)) == {0, 7}

    def test_matches_brute_force(self, rng):
        psi = random_raw_mps(4, 3, 2, rng)
        np.testing.assert_allclose(to_statevector(psi), brute_statevector(psi.sites), atol=1e-14)

    def test_size_guard(self):
        a = np.ones((2, 1, 1))
        with pytest.raises(SizeGuardError):
            to_statevector(MpsState((a,) * 21))


class TestMpsState:
    def test_shape_checks(self):
        with pytest.raises(DimensionError):
            MpsState((np.zeros((2, 2, 2)), np.zeros((2, 3, 3))))
        with pytest.raises(ValidationError):
            MpsState(())

    def test_raw_entries_range(self, rng):
        psi = random_raw_mps(50, 2, 2, rng)
        arr = psi.as_array()
        assert np.all(np.abs(arr.real) <= 0.5) and np.all(np.abs(arr.imag) <= 0.5)
        assert np.all(random_raw_mps(3, 2, 2, rng, complex_entries=False).as_array().imag == 0)
