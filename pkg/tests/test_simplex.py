import numpy as np
import pytest

from meanrotor.simplex import (
    as_simplex,
    check_zero_sum,
    cyclic_shift,
    dirac,
    equidistribution,
    fourier_mode,
    tv_distance,
)


def test_equidistribution_and_dirac():
    assert equidistribution(4).tolist() == [0.25] * 4
    assert dirac(4, 2).tolist() == [0.0, 1.0, 0.0, 0.0]
    with pytest.raises(ValueError):
        dirac(4, 5)


def test_as_simplex_validation():
    clean = as_simplex([0.5, 0.5, -1e-14], 3)
    assert clean.min() == 0.0 and abs(clean.sum() - 1.0) < 1e-15
    with pytest.raises(ValueError):
        as_simplex([0.5, 0.6], 2)
    with pytest.raises(ValueError):
        as_simplex([0.5, 0.5], 3)
    with pytest.raises(ValueError):
        as_simplex([1.5, -0.5], 2)
    with pytest.raises(ValueError):
        as_simplex([np.nan, 1.0], 2)


def test_tv_and_shift():
    assert tv_distance([1, 0], [0, 1]) == 1.0
    assert cyclic_shift([1.0, 2.0, 3.0], 1).tolist() == [3.0, 1.0, 2.0]


def test_fourier_modes_are_zero_sum():
    for j in range(1, 10):
        v = fourier_mode(10, j)
        assert abs(v.sum()) <= 1e-14
    check_zero_sum(fourier_mode(10, 3))
    with pytest.raises(ValueError):
        check_zero_sum([1.0, 1.0])
