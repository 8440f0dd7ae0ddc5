from fractions import Fraction

import pytest

from funcfield.multizeta.exceptions import (
    FieldMismatchError,
    InsufficientPrecisionError,
    TwistError,
)
from funcfield.multizeta.gf import build_field
from funcfield.multizeta.scalars import (
    LaurentScalar,
    UniformizerSpec,
    carlitz_period,
    omega_at_theta,
    theta,
    theta_root,
)
from funcfield.multizeta.tate import TateSeries, omega
from funcfield.multizeta.tmotive import specialize, tate_twist

U3 = UniformizerSpec(3, 0, build_field(3, 1))


def v(exponent, coefficient=1, prec=None):
    if prec is None:
        return LaurentScalar.monomial(U3, exponent, coefficient)
    return LaurentScalar(U3, [(exponent, coefficient)], prec)


def test_polynomial_arithmetic():
    one_plus_t = TateSeries.polynomial(U3, [1, 1])
    assert one_plus_t**2 == TateSeries.polynomial(U3, [1, 2, 1])
    # Frobenius in characteristic 3
    assert one_plus_t**3 == TateSeries.polynomial(U3, [1, 0, 0, 1])
    assert (one_plus_t - one_plus_t).first_mismatch(TateSeries.constant(U3, 0)) is None
    assert one_plus_t.coefficient(7).is_zero


def test_truncation_rules():
    short = TateSeries(U3, [v(0, prec=9)] * 3)
    long = TateSeries(U3, [v(0, prec=9)] * 6)
    assert (short + long).t_deg == 2
    assert (short * long).t_deg == 2
    assert (short * TateSeries.polynomial(U3, [1, 1, 1, 1])).t_deg == 2
    assert not (short + long).exact
    with pytest.raises(InsufficientPrecisionError):
        short.coefficient(3)


def test_scalar_product():
    f = TateSeries(U3, [v(1, prec=9), v(2, prec=9)], tail=[(5, 3)])
    scaled = f * v(-1)
    assert scaled.coeffs[0] == v(0, prec=8)
    assert scaled.tail == ((Fraction(4), Fraction(3)),)
    assert (2 * f).coeffs[1] == v(2, 2, prec=9)


def test_mixed_uniformizers():
    other = UniformizerSpec(3, 1, build_field(3, 1))
    with pytest.raises(FieldMismatchError):
        TateSeries.constant(U3) + TateSeries.constant(other)


def test_line_bound():
    poly = TateSeries.polynomial(U3, [v(2), v(5)])
    assert poly.line_bound(1) == 2
    f = TateSeries(U3, [v(2, prec=20), v(5, prec=20)], tail=[(10, 3)])
    assert f.line_bound(3) == 2
    assert f.line_bound(3, start=2) == 10
    assert f.line_bound(4) is None
    assert TateSeries(U3, [v(2, prec=20)]).line_bound(0) is None


def test_tails_of_sums_and_products():
    f = TateSeries(U3, [v(0, prec=30), v(3, prec=30)], tail=[(0, 3)])
    g = TateSeries(U3, [v(1, prec=30), v(4, prec=30)], tail=[(1, 3)])
    assert (f + g).tail == ((Fraction(0), Fraction(3)),)
    assert (f * g).tail == ((Fraction(1), Fraction(3)),)
    assert (f * TateSeries(U3, [v(0, prec=30)])).tail is None


def test_inverse():
    one_minus_t = TateSeries.polynomial(U3, [1, -1])
    inverse = one_minus_t.inverse(t_deg=4, prec=10)
    assert inverse.t_deg == 4
    assert all(c.agrees_with(LaurentScalar.constant(U3)) for c in inverse.coeffs)
    assert (one_minus_t * inverse).first_mismatch(TateSeries.constant(U3)) is None
    assert inverse.tail is None


def test_omega_coefficients():
    # Arrange
    # Omega = v^3 (1 + v^6 t)(1 + v^18 t)... for q = 3, R = 0

    # Act
    series = omega(U3, 3, 40)

    # Assert
    assert series.coeffs[0] == v(3, prec=40)
    assert series.coeffs[1] == LaurentScalar(U3, [(9, 1), (21, 1)], prec=40)
    assert series.coeffs[2] == v(27, prec=40)
    assert series.coeffs[3].is_zero
    assert series.min_valuations()[:3] == [3, 9, 27]


def test_omega_weighted_precision():
    series = omega(U3, 3, 20, weight=10)
    assert [c.prec for c in series.coeffs] == [20, 30, 40, 50]


@pytest.mark.parametrize("depth,t_deg", [(0, 4), (1, 3), (2, 2)])
def test_omega_difference_equation(depth, t_deg):
    # Arrange
    spec = UniformizerSpec(3, depth, build_field(3, 1))
    prec = 40 * spec.scale
    series = omega(spec, t_deg, prec)

    # Act
    twisted = tate_twist(series, -1)
    expected = TateSeries.t_minus(spec, theta(spec)) * series

    # Assert
    assert twisted.first_mismatch(expected) is None
    assert twisted.checked_exponent(expected) > spec.scale


def test_tate_twist_round_trip():
    series = omega(U3, 3, 40)
    assert tate_twist(tate_twist(series, 1), -1) == series
    constant = TateSeries.constant(U3, 2)
    assert tate_twist(constant, -1) == constant


def test_twist_error_names_the_t_exponent():
    f = TateSeries.polynomial(U3, [v(3), v(1)])
    with pytest.raises(TwistError) as exc:
        tate_twist(f, -1)
    assert exc.value.t_exponent == 1
    assert exc.value.exponent == 1


def test_twist_scales_tail():
    f = TateSeries(U3, [v(3, prec=30)], tail=[(6, 9)])
    assert f.twist(-1).tail == ((Fraction(2), Fraction(3)),)


def test_specialize_omega_at_theta():
    series = omega(U3, 6, 60)
    value = specialize(series)
    assert value.agrees_with(omega_at_theta(U3, 60))
    assert (value * carlitz_period(U3, 30)).agrees_with(LaurentScalar.constant(U3))


def test_omega_vanishes_at_frobenius_points():
    series = omega(U3, 3, 40)
    value = specialize(series, 1)
    assert value.is_zero
    assert value.prec == 22


def test_specialize_polynomials():
    assert specialize(TateSeries.t_minus(U3, theta(U3))).is_zero
    assert specialize(TateSeries.constant(U3, 2)) == LaurentScalar.constant(U3, 2)
    depth_one = UniformizerSpec(3, 1, build_field(3, 1))
    factor = TateSeries.t_minus(depth_one, theta_root(depth_one, 1))
    assert specialize(factor, 0) == theta(depth_one) - theta_root(depth_one, 1)


def test_specialize_needs_a_certificate():
    with pytest.raises(InsufficientPrecisionError):
        specialize(TateSeries(U3, [v(0, prec=10)]))
    with pytest.raises(ValueError):
        specialize(TateSeries.constant(U3), -1)


def test_cap():
    series = omega(U3, 2, 40).cap(10, weight=5)
    assert [c.prec for c in series.coeffs] == [10, 15, 20]


def test_json():
    data = omega(U3, 1, 12).to_json_dict()
    assert data["exact"] is False
    assert data["coeffs"][0] == {"terms": [[3, [1]]], "prec": 12}
    assert all(len(line) == 2 for line in data["tail"])
