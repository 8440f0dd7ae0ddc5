import math
import os
from unittest.mock import patch

import galois
import pytest

from funcfield.multizeta.exceptions import BudgetExceededError, FieldMismatchError
from funcfield.multizeta.gf import FieldSpec, build_field
from funcfield.multizeta.ringa import (
    FunctionField,
    RatFuncExt,
    function_field,
    poly_coeffs,
    poly_from_coeffs,
    poly_to_laurent,
    to_laurent,
    tree_sum,
)
from funcfield.multizeta.scalars import LaurentScalar


def test_fractions_are_reduced(f3):
    # theta / (2 theta) is 1/2 = 2
    assert RatFuncExt.from_coeffs(f3, [0, 1], [0, 2]) == RatFuncExt.from_coeffs(f3, [2])
    half = RatFuncExt.from_coeffs(f3, [1], [0, 2])
    assert poly_coeffs(half.den) == [0, 1]
    assert poly_coeffs(half.num) == [2]


def test_fraction_arithmetic(f3, a3):
    inverse_theta = RatFuncExt.from_coeffs(f3, [1], [0, 1])
    assert inverse_theta * a3.theta == RatFuncExt.one(f3)
    assert ((inverse_theta + inverse_theta) - 2 * inverse_theta).is_zero
    assert inverse_theta**-2 == RatFuncExt(f3, a3.theta**2)
    assert inverse_theta.degree == -1
    assert RatFuncExt.zero(f3).degree == -math.inf


def test_fraction_errors(f3):
    with pytest.raises(ZeroDivisionError):
        RatFuncExt.from_coeffs(f3, [1], [0])
    with pytest.raises(ZeroDivisionError):
        RatFuncExt.one(f3) / RatFuncExt.zero(f3)
    with pytest.raises(FieldMismatchError):
        RatFuncExt(build_field(3, 2), poly_from_coeffs(f3, [1]))


def test_fraction_repr_and_json(f3):
    x = RatFuncExt.from_coeffs(f3, [1, 2], [0, 0, 1])
    assert eval(repr(x), {"RatFuncExt": RatFuncExt, "FieldSpec": FieldSpec}) == x
    assert RatFuncExt.from_json_dict(x.to_json_dict()) == x


def test_tree_sum(f3):
    parts = [RatFuncExt.from_coeffs(f3, [1], [k, 1]) for k in range(3)]
    assert tree_sum(f3, parts) == parts[0] + parts[1] + parts[2]
    assert tree_sum(f3, []).is_zero


def test_monics(a3):
    assert [poly_coeffs(a) for a in a3.monics(1)] == [[0, 1], [1, 1], [2, 1]]
    assert len(list(a3.monics(2))) == 9
    assert list(a3.monics(0)) == [galois.Poly.One(a3.spec.field)]


def test_monics_budget(tmp_path, a3):
    config_path = tmp_path / "config.json"
    config_path.write_text('{"version": 1, "limits": {"max_monic_count": 5}}')
    with patch.dict(os.environ, {"CMZV_CONFIG": str(config_path)}):
        with pytest.raises(BudgetExceededError):
            list(a3.monics(2))


def test_constants_in_extension():
    ring = FunctionField(3, build_field(3, 2))
    assert ring.constants == (0, 1, 2)
    assert len(list(ring.monics(1))) == 3


def test_carlitz_factorials(a3):
    theta = a3.theta
    assert a3.carlitz_factor(0) == galois.Poly.One(a3.spec.field)
    assert a3.carlitz_factor(1) == theta**3 - theta
    assert a3.gamma(0) == galois.Poly.One(a3.spec.field)
    assert a3.gamma(2) == galois.Poly.One(a3.spec.field)
    assert a3.gamma(3) == theta**3 - theta
    assert a3.gamma(7) == (theta**3 - theta) ** 2


def test_power_sum_degree_one(f3, a3):
    # S_1(1) = 1 / (theta - theta^3)
    expected = RatFuncExt(f3, galois.Poly.One(f3.field), a3.theta - a3.theta**3)
    assert a3.power_sum(1, 1) == expected
    assert a3.power_sum(0, 5) == RatFuncExt.one(f3)
    assert function_field(3, f3) is function_field(3, f3)


def test_power_sum_is_memoized(a3):
    assert a3.power_sum(2, 2) is a3.power_sum(2, 2)


def test_polynomial_expansion(u3, a3):
    assert poly_to_laurent(a3.theta, u3) == LaurentScalar.monomial(u3, -2, -1)
    square = poly_to_laurent(a3.theta**2 + galois.Poly.One(a3.spec.field), u3)
    assert square == LaurentScalar(u3, [(-4, 1), (0, 1)])


def test_fraction_expansion(u3, a3):
    value = to_laurent(a3.power_sum(1, 1), u3, 14)
    assert value == LaurentScalar(u3, [(6, 1), (10, 1), (14, 1)], prec=14)
    assert to_laurent(RatFuncExt.zero(a3.spec), u3, 4).is_zero


def test_expansion_field_mismatch(u3):
    with pytest.raises(FieldMismatchError):
        to_laurent(RatFuncExt.one(build_field(3, 2)), u3, 4)
