import os
from unittest.mock import patch

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from funcfield.multizeta.exceptions import (
    FieldMismatchError,
    FieldSizeError,
    InvalidFieldError,
)
from funcfield.multizeta.gf import (
    Embedding,
    FieldSpec,
    GFElem,
    build_field,
    canonical_generator,
    color_field,
    common_field,
    discrete_log,
    power_of,
    qtwist,
    solve_mu,
    subfield,
)

F9 = build_field(3, 2)


def test_build_field_is_deterministic():
    assert build_field(3, 2) == build_field(3, 2)
    assert build_field(3, 2).modulus == (1, 0, 1)
    assert build_field(2, 2).modulus == (1, 1, 1)
    assert build_field(5, 1).modulus == (0, 1)


@pytest.mark.parametrize("p,e", [(4, 1), (1, 1), (3, 0)])
def test_build_field_rejects(p, e):
    with pytest.raises(InvalidFieldError):
        build_field(p, e)


def test_reducible_modulus_is_rejected():
    with pytest.raises(InvalidFieldError, match="reducible"):
        FieldSpec(3, 2, (2, 0, 1))


def test_field_size_guard():
    with patch.dict(os.environ, {"CMZV_MAX_FIELD": "8"}):
        with pytest.raises(FieldSizeError) as exc:
            build_field(3, 2)
    assert exc.value.order == 9
    assert exc.value.limit == 8


def test_color_field():
    assert color_field(3, 2) == F9
    assert color_field(4, 2) == build_field(2, 4)
    assert power_of(9, 3) == 2
    with pytest.raises(InvalidFieldError):
        power_of(6, 3)


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_field_laws(a, b, c):
    x, y, z = (GFElem(F9, v) for v in (a, b, c))
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    if not y.is_zero:
        assert (x / y) * y == x
        assert y**-1 * y == 1


def test_integers_coerce_to_prime_field(f3):
    two = GFElem(f3, 2)
    assert two + 1 == 0
    assert 2 * two == 1
    assert -two == 1


def test_mixed_fields_raise(f3):
    with pytest.raises(FieldMismatchError):
        GFElem(f3, 1) + GFElem(F9, 1)


def test_element_out_of_range(f3):
    with pytest.raises(InvalidFieldError):
        GFElem(f3, 3)


def test_coefficient_vector():
    x = GFElem.from_coeffs(F9, [1, 2])
    assert x.coeffs == (1, 2)
    assert x.integer == 7
    assert GFElem.from_json_dict(x.to_json_dict()) == x


def test_repr_round_trip():
    x = GFElem(F9, 5)
    assert eval(repr(x), {"GFElem": GFElem, "FieldSpec": FieldSpec}) == x


def test_canonical_generator():
    g = canonical_generator(F9)
    assert g.multiplicative_order() == 8
    assert all(GFElem(F9, v).multiplicative_order() < 8 for v in range(1, g.integer))
    assert discrete_log(g**5) == 5
    assert canonical_generator(build_field(3, 1)) == 2


def test_qtwist_is_frobenius():
    g = canonical_generator(F9)
    assert qtwist(g, 3, 1) == g**3
    assert qtwist(qtwist(g, 3, 1), 3, -1) == g
    assert qtwist(g, 3, 2) == g
    assert qtwist(GFElem(F9, 2), 3, 1) == 2


def test_subfield():
    assert list(subfield(F9, 3)) == [0, 1, 2]
    assert len(subfield(build_field(2, 4), 4)) == 4
    with pytest.raises(FieldMismatchError):
        subfield(F9, 27)


@settings(deadline=None)
@given(st.integers(0, 8), st.integers(0, 8))
def test_embedding_is_a_homomorphism(a, b):
    emb = Embedding(F9, build_field(3, 4))
    x, y = GFElem(F9, a), GFElem(F9, b)
    assert emb(x * y) == emb(x) * emb(y)
    assert emb(x + y) == emb(x) + emb(y)


def test_embedding_composes(f3):
    inner = Embedding(f3, F9)
    outer = Embedding(F9, build_field(3, 4))
    assert inner.compose(outer)(GFElem(f3, 2)) == outer(inner(GFElem(f3, 2)))
    with pytest.raises(FieldMismatchError):
        Embedding(F9, build_field(3, 3))


@pytest.mark.parametrize("q,r,k", [(3, 1, 0), (3, 2, 4), (3, 2, 3), (2, 2, 1), (4, 1, 2)])
def test_solve_mu(q, r, k):
    # Arrange
    xi = canonical_generator(color_field(q, r)) ** k

    # Act
    mu, home = solve_mu(xi, q, r)

    # Assert
    assert mu.spec == home
    image = Embedding(xi.spec, home)(xi) if home != xi.spec else xi
    assert mu ** (q**r - 1) == image**r


def test_solve_mu_needs_extension(f3):
    # mu^2 = -1 has no root in F_3
    mu, home = solve_mu(GFElem(f3, 2), 3, 1)
    assert home == F9
    assert mu**2 == Embedding(f3, F9)(GFElem(f3, 2))


def test_solve_mu_rejects(f3):
    with pytest.raises(InvalidFieldError):
        solve_mu(GFElem(f3, 0), 3, 1)
    with pytest.raises(InvalidFieldError):
        solve_mu(canonical_generator(F9), 3, 1)
    with pytest.raises(InvalidFieldError):
        solve_mu(GFElem(f3, 2), 3, 1, home=f3)


def test_common_field(f3):
    working, emb = common_field(3, 1, [GFElem(f3, 1), GFElem(f3, 2)])
    assert working == F9
    assert emb.source == f3
    working, _ = common_field(3, 1, [GFElem(f3, 1)])
    assert working == f3
