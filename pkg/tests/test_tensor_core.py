import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from barrenbench.errors import DimensionError
from barrenbench.tensor_core import DenseTensor, contract, reshape, transpose


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def loop_contract(a, b, pairs):
    """Reference contraction by explicit index loops."""
    ax_a = [i for i, _ in pairs]
    ax_b = [j for _, j in pairs]
    free_a = [i for i in range(a.ndim) if i not in ax_a]
    free_b = [j for j in range(b.ndim) if j not in ax_b]
    out = np.zeros([a.shape[i] for i in free_a] + [b.shape[j] for j in free_b], dtype=complex)
    summed = [range(a.shape[i]) for i in ax_a]
    for idx in itertools.product(*[range(s) for s in out.shape]):
        ia, ib = idx[:len(free_a)], idx[len(free_a):]
        total = 0
        for s in itertools.product(*summed):
            full_a = [0] * a.ndim
            full_b = [0] * b.ndim
            for k, i in enumerate(free_a):
                full_a[i] = ia[k]
            for k, j in enumerate(free_b):
                full_b[j] = ib[k]
            for k, (i, j) in enumerate(pairs):
                full_a[i] = full_b[j] = s[k]
            total += a[tuple(full_a)] * b[tuple(full_b)]
        out[idx] = total
    return out


class TestDenseTensor:
    def test_flat_data_with_shape(self):
        t = DenseTensor(range(6), shape=(2, 3))
        assert t.shape == (2, 3)
        np.testing.assert_array_equal(t.data, np.arange(6))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            DenseTensor(range(5), shape=(2, 3))

    def test_immutable(self):
        t = DenseTensor(np.eye(2))
        with pytest.raises(ValueError):
            t.array[0, 0] = 3

    def test_labels_per_axis(self):
        with pytest.raises(ValueError):
            DenseTensor(np.eye(2), labels=["a"])


class TestContract:
    def test_identity_composition(self):
        eye = DenseTensor(np.eye(2))
        np.testing.assert_allclose(contract(eye, eye, [(1, 0)]).array, np.eye(2))

    def test_unit_norm(self):
        v = np.array([1, 1j]) / np.sqrt(2)
        out = contract(DenseTensor(v), DenseTensor(v.conj()), [(0, 0)])
        assert out.shape == ()
        assert abs(out.array - 1) < 1e-15

    def test_against_loops(self, rng):
        a, b = crandn(rng, 3, 4, 2), crandn(rng, 2, 4)
        out = contract(a, b, [(2, 0), (1, 1)])
        np.testing.assert_allclose(out.array, loop_contract(a, b, [(2, 0), (1, 1)]), rtol=1e-12)

    def test_free_axis_order(self, rng):
        a, b = crandn(rng, 2, 3, 4), crandn(rng, 5, 3)
        assert contract(a, b, [(1, 1)]).shape == (2, 4, 5)

    def test_length_mismatch(self, rng):
        with pytest.raises(DimensionError):
            contract(crandn(rng, 2, 3), crandn(rng, 2, 3), [(0, 1)])

    def test_repeated_axis(self, rng):
        with pytest.raises(ValueError):
            contract(crandn(rng, 2, 2), crandn(rng, 2, 2), [(0, 0), (0, 1)])

    def test_bilinear(self, rng):
        a, a2, b = crandn(rng, 3, 4), crandn(rng, 3, 4), crandn(rng, 4, 2)
        al, be = 0.3 - 1j, 2.0
        lhs = contract(DenseTensor(al * a + be * a2), b, [(1, 0)]).array
        rhs = al * contract(a, b, [(1, 0)]).array + be * contract(a2, b, [(1, 0)]).array
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.data())
    def test_random_against_loops(self, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 31)))
        rank_a = data.draw(st.integers(1, 3))
        rank_b = data.draw(st.integers(1, 3))
        shape_a = [data.draw(st.integers(1, 3)) for _ in range(rank_a)]
        shape_b = [data.draw(st.integers(1, 3)) for _ in range(rank_b)]
        npairs = data.draw(st.integers(0, min(rank_a, rank_b)))
        ia = data.draw(st.permutations(range(rank_a)))[:npairs]
        ib = data.draw(st.permutations(range(rank_b)))[:npairs]
        for i, j in zip(ia, ib):
            shape_b[j] = shape_a[i]
        a, b = crandn(rng, *shape_a), crandn(rng, *shape_b)
        pairs = list(zip(ia, ib))
        np.testing.assert_allclose(contract(a, b, pairs).array, loop_contract(a, b, pairs),
                                   rtol=1e-12, atol=1e-12)


class TestTranspose:
    def test_symmetric(self):
        np.testing.assert_array_equal(transpose(np.eye(2), [1, 0]).array, np.eye(2))

    def test_inverse_is_exact(self, rng):
        a = DenseTensor(crandn(rng, 2, 3, 4))
        perm = [2, 0, 1]
        back = transpose(transpose(a, perm), list(np.argsort(perm)))
        np.testing.assert_array_equal(back.array, a.array)

    def test_against_index_map(self, rng):
        a = crandn(rng, 2, 3, 4)
        t = transpose(a, [1, 2, 0]).array
        for i, j, k in itertools.product(range(2), range(3), range(4)):
            assert t[j, k, i] == a[i, j, k]

    def test_invalid(self):
        with pytest.raises(ValueError):
            transpose(np.eye(2), [0, 0])


class TestReshape:
    def test_order_preserved(self):
        a = np.arange(4).reshape(2, 2)
        np.testing.assert_array_equal(reshape(a, (4,)).array, np.arange(4))

    def test_round_trip(self):
        v = np.arange(4)
        np.testing.assert_array_equal(reshape(reshape(v, (2, 2)), (4,)).array, v)

    def test_site_tensor_split(self, rng):
        a = crandn(rng, 2, 3, 3)
        flat = reshape(a, (18,)).array
        for j, l, r in itertools.product(range(2), range(3), range(3)):
            assert flat[j * 9 + l * 3 + r] == a[j, l, r]
        np.testing.assert_array_equal(reshape(flat, (2, 3, 3)).array, a)

    def test_size_mismatch(self):
        with pytest.raises(DimensionError):
            reshape(np.arange(4), (3,))
