import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from hckernels.special_functions import PoleError, gamma, log_gamma, rgamma


def test_small_integer_and_half_integer_values():
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-14)


def test_gamma_of_i_modulus():
    g = gamma(1j)
    assert abs(g) ** 2 == pytest.approx(math.pi / math.sinh(math.pi), rel=1e-13)


def test_matches_scipy_principal_branch():
    rng = np.random.default_rng(0)
    z = rng.uniform(-40, 40, 2000) + 1j * rng.uniform(-60, 60, 2000)
    ours = log_gamma(z)
    ref = special.loggamma(z)
    assert np.max(np.abs(ours - ref) / np.maximum(1, np.abs(ref))) < 1e-13


def test_large_imaginary_part_does_not_overflow():
    z = np.array([-3.3 + 900j, -0.7 - 2000j, 0.2 + 1500j])
    ours = log_gamma(z)
    assert np.all(np.isfinite(ours))
    assert np.allclose(ours, special.loggamma(z), rtol=1e-13)


def test_scalar_in_scalar_out():
    assert np.ndim(log_gamma(2.5 + 1j)) == 0
    assert log_gamma(np.array([2.5])).shape == (1,)


@pytest.mark.parametrize("z", [0, -1, -7.0, -20])
def test_poles_raise(z):
    with pytest.raises(PoleError):
        log_gamma(z)


def test_rgamma_vanishes_at_poles():
    out = rgamma(np.array([0.0, -1.0, -4.0, 2.0]))
    assert np.all(out[:3] == 0)
    assert out[3] == pytest.approx(1.0)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        log_gamma(np.nan)


_coord = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(_coord, _coord)
def test_recurrence_property(x, y):
    z = complex(x, y)
    if abs(z) < 1e-6 or (y == 0 and x <= 0 and x == round(x)):
        return
    lhs = log_gamma(z + 1)
    diff = lhs - log_gamma(z) - np.log(z)
    if y == 0 and x < 0:
        # on the cut the two logs may take opposite limits
        diff = complex(diff.real, (diff.imag + np.pi) % (2 * np.pi) - np.pi)
    assert abs(diff) < 1e-11 * max(1.0, abs(lhs))


@settings(max_examples=300, deadline=None)
@given(_coord, st.floats(0.01, 50))
def test_conjugate_symmetry_property(x, y):
    z = complex(x, y)
    assert abs(log_gamma(np.conj(z)) - np.conj(log_gamma(z))) < 1e-12 * max(1.0, abs(log_gamma(z)))
