import numpy as np
import pytest

from barrenbench.errors import DegenerateStateError, DimensionError, DivergenceError, ValidationError
from barrenbench.loss import (
    Loss,
    TargetState,
    global_fidelity_loss,
    kl_loss,
    local_numerator,
    normalized_global_loss,
    overlap,
    uniform_target,
)
from barrenbench.mps import LocalObservable, MpsState, embed_unitary_mps, random_raw_mps, to_statevector

from conftest import brute_statevector, pauli, site_operator


def dense_losses(psi, phi_vec, obs_dense):
    v = brute_statevector(psi.sites)
    z = np.vdot(v, v).real
    ov = np.vdot(phi_vec, v)
    return {
        "fidelity": 1 - abs(ov) ** 2,
        "normalized": 1 - abs(ov) ** 2 / z,
        "kl": -np.log(abs(ov) / (np.sqrt(z) * np.linalg.norm(phi_vec))),
        "local": np.vdot(v, obs_dense @ v).real / z,
        "local_numerator": np.vdot(v, obs_dense @ v).real,
    }


class TestTarget:
    def test_uniform_is_normalized(self):
        phi = uniform_target(4, 2)
        assert phi.norm == pytest.approx(1.0)
        np.testing.assert_allclose(to_statevector(phi.mps), np.full(16, 0.25))

    def test_unnormalized(self):
        assert uniform_target(3, 2, normalize=False).norm == pytest.approx(np.sqrt(8))

    def test_vector_target(self, rng):
        psi = random_raw_mps(3, 2, 2, rng)
        v = rng.standard_normal(8) + 0j
        phi = TargetState(vector=v)
        ref = np.vdot(v / np.linalg.norm(v), brute_statevector(psi.sites))
        assert abs(overlap(psi, phi) - ref) < 1e-12

    def test_vector_shape_checked(self, rng):
        with pytest.raises(DimensionError):
            overlap(random_raw_mps(3, 2, 2, rng), TargetState(vector=np.ones(4)))

    def test_exactly_one_form(self):
        with pytest.raises(ValidationError):
            TargetState()

    def test_zero_target(self):
        with pytest.raises(DegenerateStateError):
            TargetState(mps=MpsState((np.zeros((2, 1, 1)),)))


class TestLossValues:
    @pytest.mark.parametrize("kind", ["fidelity", "normalized", "kl", "local", "local_numerator"])
    def test_against_dense(self, rng, kind):
        x, _, _ = pauli()
        phi = uniform_target(4, 2)
        obs = LocalObservable(x, 2)
        loss = Loss(kind, target=phi, observable=obs)
        for _ in range(5):
            psi = random_raw_mps(4, 2, 2, rng)
            ref = dense_losses(psi, to_statevector(phi.mps), site_operator(x, 2, 4))[kind]
            assert loss(psi) == pytest.approx(ref, rel=1e-10, abs=1e-12)

    def test_perfect_match(self):
        phi = uniform_target(3, 2)
        psi = phi.mps
        assert global_fidelity_loss(psi, phi) == pytest.approx(0.0, abs=1e-14)
        assert normalized_global_loss(psi.scaled(3.0), phi) == pytest.approx(0.0, abs=1e-14)
        assert kl_loss(psi.scaled(0.2), phi) == pytest.approx(0.0, abs=1e-14)

    def test_normalized_scale_invariant(self, rng):
        phi = uniform_target(4, 2)
        psi = random_raw_mps(4, 2, 2, rng)
        a = normalized_global_loss(psi, phi)
        assert normalized_global_loss(psi.scaled(7.5), phi) == pytest.approx(a, rel=1e-12)

    def test_kl_nonnegative(self, rng):
        phi = uniform_target(4, 2)
        for _ in range(20):
            assert kl_loss(random_raw_mps(4, 2, 2, rng), phi) >= -1e-12

    def test_kl_orthogonal(self):
        psi = MpsState((np.array([[[1.0]], [[1.0]]]),))
        phi = TargetState(mps=MpsState((np.array([[[1.0]], [[-1.0]]]),)))
        with pytest.raises(DivergenceError):
            kl_loss(psi, phi)

    def test_degenerate_norm(self):
        psi = MpsState(tuple(np.zeros((2, 2, 2)) for _ in range(3)))
        with pytest.raises(DegenerateStateError):
            normalized_global_loss(psi, uniform_target(3, 2))

    def test_identity_embedding_numerator(self):
        _, _, z = pauli()
        psi = embed_unitary_mps([np.eye(4)] * 3, 2, 2)
        assert local_numerator(psi, LocalObservable(z, 2)) == pytest.approx(4.0)


class TestLossObject:
    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            Loss("hinge")

    def test_missing_data(self):
        with pytest.raises(ValidationError):
            Loss("fidelity")
        with pytest.raises(ValidationError):
            Loss("local")

    def test_is_global(self):
        assert Loss("kl", target=uniform_target(2, 2)).is_global
        assert not Loss("local", observable=LocalObservable(pauli()[0], 1)).is_global
