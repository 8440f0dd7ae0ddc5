import os
from unittest.mock import patch

import pytest

from funcfield.multizeta.exceptions import (
    BudgetExceededError,
    EmptyWordError,
    FieldMismatchError,
    InsufficientPrecisionError,
    InvalidFieldError,
)
from funcfield.multizeta.gf import FieldSpec, GFElem, build_field, canonical_generator
from funcfield.multizeta.powersum import (
    Index,
    ZetaValue,
    cmzv,
    frobenius_power,
    nested_power_sum,
    power_sum,
    power_sum_le,
    power_sum_lt,
    sum_cutoff,
    twisted_power_sum,
    zeta_series,
    zeta_values,
)
from funcfield.multizeta.ringa import RatFuncExt
from funcfield.multizeta.scalars import LaurentScalar, UniformizerSpec


def test_index_properties(f3):
    idx = Index([2, 1, 3], [GFElem(f3, 1), GFElem(f3, 2), GFElem(f3, 2)])
    assert idx.wt == 6
    assert idx.dep == 3
    assert idx[1:].s == (1, 3)
    assert idx.reversed().s == (3, 1, 2)
    assert idx.color_product() == 1
    assert idx == Index.from_json_dict(idx.to_json_dict())
    assert len({idx, Index([2, 1, 3], list(idx.xi))}) == 1
    assert eval(repr(idx), {"Index": Index, "GFElem": GFElem, "FieldSpec": FieldSpec}) == idx


@pytest.mark.parametrize(
    "s,values,error",
    [
        ([], [], EmptyWordError),
        ([1, 2], [1], ValueError),
        ([0], [1], ValueError),
        ([1], [0], InvalidFieldError),
    ],
)
def test_index_validation(f3, s, values, error):
    with pytest.raises(error):
        Index(s, [GFElem(f3, v) for v in values])


def test_index_mixed_fields(f3):
    with pytest.raises(FieldMismatchError):
        Index([1, 1], [f3.one, build_field(3, 2).one])


def test_empty_slice(f3):
    with pytest.raises(EmptyWordError):
        Index.trivial([1, 2], f3)[2:]


def test_power_sums(f3, a3):
    s11 = power_sum(a3, 1, 1)
    assert s11.degree == -3
    assert twisted_power_sum(a3, 1, 1, GFElem(f3, 2)) == s11 * 2
    assert power_sum_lt(a3, 2, Index.trivial([1], f3)) == RatFuncExt.one(f3) + s11
    assert power_sum_le(a3, 1, Index.trivial([1], f3)) == RatFuncExt.one(f3) + s11


def test_nested_power_sum(f3, a3):
    idx = Index.trivial([1, 1], f3)
    assert nested_power_sum(a3, 0, idx).is_zero
    assert nested_power_sum(a3, 1, idx) == power_sum(a3, 1, 1)
    expected = power_sum(a3, 2, 1) * (RatFuncExt.one(f3) + power_sum(a3, 1, 1))
    assert nested_power_sum(a3, 2, idx) == expected


def test_nested_power_sum_field_mismatch(a3):
    with pytest.raises(FieldMismatchError):
        nested_power_sum(a3, 1, Index.trivial([1], build_field(3, 2)))


@pytest.mark.parametrize("prec,cutoff", [(5, 0), (6, 1), (23, 1), (24, 2)])
def test_sum_cutoff(prec, cutoff):
    assert sum_cutoff(3, 2, prec) == cutoff


def test_sum_cutoff_budget(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text('{"version": 1, "limits": {"max_cutoff_degree": 1}}')
    with patch.dict(os.environ, {"CMZV_CONFIG": str(config_path)}):
        with pytest.raises(BudgetExceededError):
            sum_cutoff(3, 2, 100)


def test_zeta_one(f3, u3):
    # Arrange
    idx = Index.trivial([1], f3)

    # Act
    value = cmzv(idx, u3, 10)

    # Assert
    # 1 + 1/(theta - theta^3) = 1 + v^6 + v^10 + ...
    assert value.value == LaurentScalar(u3, [(0, 1), (6, 1), (10, 1)], prec=10)
    assert value.d_cutoff == 1
    assert value.leading_degree == 0
    assert value.certified_degree == 0


def test_colored_zeta(f3, u3):
    value = cmzv(Index([1], [GFElem(f3, 2)]), u3, 10)
    assert value.value == LaurentScalar(u3, [(0, 1), (6, 2), (10, 2)], prec=10)


@pytest.mark.parametrize("s", [(1, 1), (2, 1), (1, 2, 1)])
def test_leading_degree_is_certified(f3, u3, s):
    value = cmzv(Index.trivial(s, f3), u3, 40)
    assert value.leading_degree == value.certified_degree


def test_level_two_colors():
    f9 = build_field(3, 2)
    spec = UniformizerSpec(3, 0, f9)
    g = canonical_generator(f9)
    value = cmzv(Index([2, 1], [g**4, g**4]), spec, 30)
    assert value.leading_degree == value.certified_degree
    assert value.value.spec == spec


def test_frobenius_power(f3, u3):
    # zeta(3) = zeta(1)^3 in characteristic 3
    idx = Index.trivial([1], f3)
    assert frobenius_power(idx) == Index.trivial([3], f3)
    cube = cmzv(idx, u3, 10).value.twist(1)
    assert cube.agrees_with(cmzv(frobenius_power(idx), u3, 33).value)


def test_zeta_series_field_mismatch(u3):
    with pytest.raises(FieldMismatchError):
        zeta_series(Index.trivial([1], build_field(3, 2)), u3, 10)


def test_zeta_precision(f3, u3):
    with pytest.raises(InsufficientPrecisionError):
        cmzv(Index.trivial([1], f3), u3, 0)


def test_zeta_values(f3, u3):
    values = zeta_values([Index.trivial([1], f3), Index.trivial([2], f3)], u3, 8)
    assert all(isinstance(v, ZetaValue) for v in values)
    assert [v.index.s for v in values] == [(1,), (2,)]
    assert values[0].to_json_dict()["d_cutoff"] == 1
