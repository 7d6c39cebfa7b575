import numpy as np
import pytest

from barrenbench.errors import ValidationError
from barrenbench.validation import (
    check_hermitian,
    check_positive_int,
    check_random_state,
    check_square,
    check_unitary,
    is_hermitian,
    is_unitary,
)


class TestIntegers:
    @pytest.mark.parametrize("bad", [0, -3, 1.5, True, "2", None])
    def test_rejects(self, bad):
        with pytest.raises(ValidationError):
            check_positive_int(bad, "n")

    def test_accepts_numpy_int(self):
        assert check_positive_int(np.int64(4), "n") == 4

    def test_minimum(self):
        assert check_positive_int(0, "seed", minimum=0) == 0


class TestMatrices:
    def test_square(self):
        with pytest.raises(ValidationError, match="square"):
            check_square(np.zeros((2, 3)))
        assert check_square([[1, 0], [0, 1]]).dtype == np.complex128

    def test_unitary(self):
        assert is_unitary(np.array([[0, 1], [1, 0]]))
        assert not is_unitary(np.eye(2) * 1.01)
        with pytest.raises(ValidationError, match="unitary"):
            check_unitary(np.eye(2) * 2)

    def test_hermitian(self):
        assert is_hermitian(np.array([[1, 1j], [-1j, 0]]))
        with pytest.raises(ValidationError):
            check_hermitian(np.array([[0, 1j], [1j, 0]]))


class TestRandomState:
    def test_passthrough(self):
        g = np.random.default_rng(1)
        assert check_random_state(g) is g

    def test_int_seed_reproducible(self):
        a = check_random_state(5).standard_normal(3)
        b = check_random_state(5).standard_normal(3)
        np.testing.assert_array_equal(a, b)
