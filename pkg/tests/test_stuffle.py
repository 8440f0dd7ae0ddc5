from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from funcfield.multizeta.exceptions import FieldMismatchError
from funcfield.multizeta.gf import FieldSpec, GFElem, build_field, canonical_generator, color_field
from funcfield.multizeta.powersum import Index
from funcfield.multizeta.scalars import UniformizerSpec
from funcfield.multizeta.stuffle import (
    GRADED,
    PARTIAL,
    FormalSum,
    Relation,
    binomial_mod,
    chen_delta,
    depth1_product,
    graded_product,
    graded_relation,
    stuffle_product,
    verify_relation,
    zeta_relation,
)

F3 = build_field(3, 1)
F16 = color_field(4, 2)
G16 = canonical_generator(F16)

letters = st.tuples(st.integers(1, 3), st.integers(1, 2))
words = st.lists(letters, min_size=1, max_size=2).map(
    lambda entries: Index([s for s, _ in entries], [GFElem(F3, x) for _, x in entries])
)


def trivial(*s):
    return Index.trivial(s, F3)


@pytest.mark.parametrize("n,k,p,expected", [(5, 2, 3, 1), (4, 2, 2, 0), (6, 3, 5, 0), (3, 5, 3, 0)])
def test_binomial_mod(n, k, p, expected):
    assert binomial_mod(n, k, p) == expected


def test_chen_delta():
    assert chen_delta(2, 2, 2, 3) == 1
    assert chen_delta(1, 2, 2, 3) == 0
    with pytest.raises(ValueError):
        chen_delta(1, 1, 2, 3)


def test_depth_one_square():
    # zeta(1)^2 = 2 zeta(1, 1) + zeta(2) for q = 3
    product = stuffle_product(trivial(1), trivial(1), 3)
    assert product.coefficient(trivial(1, 1)) == 2
    assert product.coefficient(trivial(2)) == 1
    assert len(product) == 2


def test_frobenius_in_characteristic_two():
    f2 = build_field(2, 1)
    one = Index.trivial([1], f2)
    assert stuffle_product(one, one, 2) == FormalSum(2, [(Index.trivial([2], f2), 1)])


def test_correction_terms():
    product = depth1_product(2, F3.one, 2, F3.one, 3)
    assert product == FormalSum(3, [(trivial(4), 1), (trivial(2, 2), 1)])


@settings(max_examples=25, deadline=None)
@given(words, words)
def test_stuffle_is_commutative(a, b):
    assert stuffle_product(a, b, 3) == stuffle_product(b, a, 3)
    assert graded_product(a, b, 3) == graded_product(b, a, 3)


@settings(max_examples=10, deadline=None)
@given(words, words, words)
def test_stuffle_is_associative(a, b, c):
    x, y, z = (FormalSum(3, [(w, 1)]) for w in (a, b, c))
    assert (x * y) * z == x * (y * z)


@settings(max_examples=25, deadline=None)
@given(words, words)
def test_products_conserve_weight_and_color(a, b):
    assert zeta_relation(a, b, 3).violations() == []
    assert graded_relation(a, b, 3).violations() == []


def test_formal_sum_arithmetic():
    x = FormalSum(3, [(trivial(1), 1), (trivial(1), 2)])
    assert x.is_zero
    y = FormalSum(3, [(trivial(2), 1)])
    assert (y + y) == 2 * y
    assert (y - y).is_zero
    assert -y == y * 2
    with pytest.raises(FieldMismatchError):
        y + FormalSum(9, [(trivial(2), 1)])


def test_formal_sum_repr_and_json():
    x = stuffle_product(trivial(1), trivial(2), 3)
    namespace = {"FormalSum": FormalSum, "Index": Index, "GFElem": GFElem, "FieldSpec": FieldSpec}
    assert eval(repr(x), namespace) == x
    assert FormalSum.from_json_dict(x.to_json_dict()) == x
    relation = zeta_relation(trivial(1), trivial(2), 3)
    assert Relation.from_json_dict(relation.to_json_dict()) == relation


def test_relation_level():
    with pytest.raises(ValueError):
        Relation((trivial(1), trivial(1)), FormalSum(3), "both")


def test_mixed_fields():
    with pytest.raises(FieldMismatchError):
        stuffle_product(trivial(1), Index.trivial([1], build_field(3, 2)), 3)


@pytest.mark.parametrize(
    "a,b",
    [((1,), (1,)), ((1,), (2,)), ((2,), (2,)), ((1, 1), (1,)), ((2, 1), (3,))],
)
def test_verify_zeta_relation(u3, a, b):
    # Act
    report = verify_relation(zeta_relation(trivial(*a), trivial(*b), 3), u3, 40, 2)

    # Assert
    assert report.passed
    assert report.to_json_dict()["status"] == "pass"


def test_verify_colored_relation():
    f9 = build_field(3, 2)
    uspec = UniformizerSpec(3, 0, f9)
    g = canonical_generator(f9)
    a, b = Index([1], [g**4]), Index([2, 1], [g**4, f9.one])
    assert verify_relation(zeta_relation(a, b, 3), uspec, 30, 1).passed
    assert verify_relation(graded_relation(a, b, 3), uspec, 30, 2).passed


@pytest.mark.parametrize("a,b", [((1,), (1,)), ((2,), (2,)), ((1, 2), (2,))])
def test_verify_graded_relation(u3, a, b):
    report = verify_relation(graded_relation(trivial(*a), trivial(*b), 3), u3, 20, 2)
    assert report.passed
    assert report.numeric_mismatch is None


def test_verify_detects_wrong_relation(u3):
    # Arrange
    # zeta(1)^2 without the zeta(2) term
    wrong = Relation((trivial(1), trivial(1)), FormalSum(3, [(trivial(1, 1), 2)]), PARTIAL)

    # Act
    report = verify_relation(wrong, u3, 20, 2)

    # Assert
    assert not report.passed
    assert report.exact_failure == 1
    assert report.numeric_mismatch == 0
    assert report.to_json_dict()["status"] == "fail"


def test_graded_level_constant(u3):
    relation = graded_relation(trivial(1), trivial(1), 3)
    assert relation.level == GRADED
    assert relation.rhs == FormalSum(3, [(trivial(2), 1)])


@pytest.mark.slow
@pytest.mark.parametrize(
    "a,b",
    [
        (Index([1], [G16]), Index([2], [G16**4])),
        (Index([2], [G16]), Index([2], [G16**3])),
        (Index([3], [G16**2]), Index([2], [F16.one])),
        (Index([1, 1], [G16**5, F16.one]), Index([2], [G16**7])),
        (Index([2, 1], [G16**3, G16]), Index([1, 1], [G16**2, G16**6])),
    ],
)
def test_colored_relations_over_f16(a, b):
    # Arrange
    uspec = UniformizerSpec(4, 0, F16)

    # Act
    partial = verify_relation(zeta_relation(a, b, 4), uspec, 18, 3)
    graded = verify_relation(graded_relation(a, b, 4), uspec, 18, 3)

    # Assert
    assert partial.passed
    assert graded.passed
    assert zeta_relation(a, b, 4).violations() == []
    assert graded_relation(a, b, 4).violations() == []


@pytest.mark.slow
@pytest.mark.parametrize("a,b", [((1,), (2,)), ((2,), (3,)), ((1, 1), (2,))])
def test_relations_hold_in_every_degree(u3, a, b):
    # power sums of degree 1 to 5
    assert verify_relation(zeta_relation(trivial(*a), trivial(*b), 3), u3, 20, 4).passed
    assert verify_relation(graded_relation(trivial(*a), trivial(*b), 3), u3, 20, 4).passed
