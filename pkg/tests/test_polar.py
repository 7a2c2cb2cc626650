import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cdpolar.algebra import CdElement, norm
from cdpolar.polar import BasicPolar, basic_polar_via_exp, from_basic_polar, to_basic_polar


def test_one_plus_e1():
    p = to_basic_polar(CdElement([1, 1, 0, 0, 0, 0, 0, 0]))
    assert p.modulus == pytest.approx(math.sqrt(2))
    assert p.axis == CdElement.basis(1)
    assert p.theta == pytest.approx(math.pi / 4)


def test_negative_real_uses_default_axis():
    p = to_basic_polar(CdElement.real(-5.0))
    assert p.modulus == 5.0
    assert p.axis == CdElement.basis(1)
    assert p.theta == math.pi


def test_positive_real_has_zero_angle():
    p = to_basic_polar(CdElement.real(2.0, 4))
    assert p.theta == 0.0
    assert p.axis == CdElement.basis(1, 4)


def test_zero_rejected():
    with pytest.raises(ValueError):
        to_basic_polar(CdElement.zero())


def test_from_examples():
    e2 = CdElement.basis(2)
    np.testing.assert_allclose(from_basic_polar(BasicPolar(1.0, e2, math.pi / 2)).coeffs, e2.coeffs, atol=1e-16)
    assert from_basic_polar(BasicPolar(2.0, CdElement.basis(7), 0.0)) == CdElement.real(2.0)


def test_invalid_polar_rejected():
    with pytest.raises(ValueError):
        BasicPolar(1.0, CdElement.basis(1) * 2.0, 0.1)
    with pytest.raises(ValueError):
        BasicPolar(1.0, CdElement.one(), 0.1)
    with pytest.raises(ValueError):
        BasicPolar(1.0, CdElement.basis(1), -0.1)
    with pytest.raises(ValueError):
        BasicPolar(-1.0, CdElement.basis(1), 0.1)


@given(
    arrays(np.float64, 8, elements=st.floats(-1, 1)).filter(lambda v: np.linalg.norm(v) > 1e-3),
    st.floats(-6, 6),
)
def test_round_trip(direction, log_scale):
    v = direction / np.linalg.norm(direction) * 10.0**log_scale
    o = CdElement(v)
    p = to_basic_polar(o)
    assert 0.0 <= p.theta <= math.pi
    assert abs(norm(p.axis) - 1.0) <= 1e-12 and p.axis[0] == 0.0
    back = from_basic_polar(p).coeffs
    assert np.linalg.norm(back - v) <= 1e-12 * np.linalg.norm(v)


@given(arrays(np.float64, 8, elements=st.floats(-5, 5)).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_trig_form_equals_exponential_form(v):
    p = to_basic_polar(CdElement(v))
    np.testing.assert_allclose(basic_polar_via_exp(p).coeffs, from_basic_polar(p).coeffs, atol=1e-12 * p.modulus)
