import os
from unittest.mock import patch

import pytest

from funcfield.multizeta.exceptions import (
    BudgetExceededError,
    FieldMismatchError,
    InsufficientPrecisionError,
    InvalidFieldError,
    TowerDepthError,
)
from funcfield.multizeta.gf import FieldSpec, GFElem, build_field, canonical_generator, color_field
from funcfield.multizeta.powersum import Index
from funcfield.multizeta.ringa import function_field
from funcfield.multizeta.scalars import UniformizerSpec, carlitz_period, theta_root
from funcfield.multizeta.tate import TateSeries
from funcfield.multizeta.tmotive import (
    ATPoly,
    L_at_theta_sides,
    L_series,
    L_star_series,
    MotiveSpec,
    T_term,
    anderson_thakur_sides,
    at_poly,
    build_triv,
    check_deformation_twist,
    check_inverse,
    check_trivialization,
    direct_sum_motive,
    inclusion_exclusion_defects,
    kronecker_motive,
    period_multiple,
    phi_determinant_at_zero,
    psi_corner_at_theta,
    specialization_pattern,
)


@pytest.fixture()
def depth_one_system(f3, u3_1):
    """Level 1 system of zeta(2) with a small budget."""
    ms = MotiveSpec(Index.trivial([2], f3), 1, u3_1, t_deg=3, prec=24)
    return build_triv(ms)


@pytest.mark.parametrize("q", [2, 3])
def test_first_at_polynomials_are_one(q):
    for n in range(q):
        assert at_poly(n, q) == ATPoly(q, n, [[1]])


def test_at_polynomial_h3():
    # H_3 = 2 t^3 - t - theta^3 for q = 3
    h = at_poly(3, 3)
    assert h.coeffs.tolist() == [[0, 2, 0, 2], [0, 0, 0, 0], [0, 0, 0, 0], [2, 0, 0, 0]]
    assert h.theta_degree == 3
    assert h.t_degree == 3
    assert h.to_json_dict() == {"q": 3, "n": 3, "coeffs": h.coeffs.tolist()}
    assert eval(repr(h), {"ATPoly": ATPoly}) == h


@pytest.mark.parametrize("q,n", [(2, 3), (2, 5), (3, 3), (3, 4), (3, 7)])
def test_at_polynomial_at_theta_is_gamma(q, n):
    ring = function_field(q, color_field(q, 1))
    assert at_poly(n, q).at_theta() == ring.gamma(n)


def test_at_polynomial_rejects_negative_index():
    with pytest.raises(ValueError):
        at_poly(-1, 3)


@pytest.mark.parametrize("s", [1, 2, 4])
@pytest.mark.parametrize("d", [0, 1, 2])
def test_anderson_thakur_identity(u3, s, d):
    # Act
    lhs, rhs = anderson_thakur_sides(s, d, u3, 4, 30)

    # Assert
    assert not rhs.is_zero
    assert lhs.agrees_with(rhs)


def test_anderson_thakur_identity_in_characteristic_two(u2):
    for s in (1, 2, 3):
        lhs, rhs = anderson_thakur_sides(s, 1, u2, 4, 24)
        assert lhs.agrees_with(rhs)


def test_t_term_depth_one(f3, u3_1):
    # T_(1,1)(1) = t - theta
    term = T_term(1, 1, f3.one, u3_1)
    assert term.exact
    assert term.first_mismatch(TateSeries.t_minus(u3_1, theta_root(u3_1, 0))) is None


def test_t_term_color_scaling(f3, u3_1):
    colored = T_term(2, 1, GFElem(f3, 2), u3_1)
    plain = T_term(2, 1, f3.one, u3_1)
    assert colored.first_mismatch(plain.scale(GFElem(f3, 2) ** -1)) is None


def test_t_term_tower_depth(f3, u3, u3_1):
    with pytest.raises(TowerDepthError):
        T_term(1, 1, f3.one, u3)
    with pytest.raises(TowerDepthError):
        T_term(1, 0, f3.one, u3_1)


def test_star_series_in_depth_one(f3, u3):
    idx = Index([2], [GFElem(f3, 2)])
    strict = L_series(idx, u3, 3, 30)
    star = L_star_series(idx, u3, 3, 30)
    assert strict.first_mismatch(star) is None


def test_l_series_field_mismatch(u3):
    with pytest.raises(FieldMismatchError):
        L_series(Index.trivial([1], build_field(3, 2)), u3, 2, 10)


def test_l_series_budget(tmp_path, f3, u3):
    config_path = tmp_path / "config.json"
    config_path.write_text('{"version": 1, "limits": {"max_cutoff_degree": 1}}')
    with patch.dict(os.environ, {"CMZV_CONFIG": str(config_path)}):
        with pytest.raises(BudgetExceededError):
            L_series(Index.trivial([1], f3), u3, 2, 30)


@pytest.mark.parametrize("s", [(1,), (1, 2), (2, 1, 1)])
def test_inclusion_exclusion(f3, u3, s):
    assert inclusion_exclusion_defects(Index.trivial(s, f3), u3, 3, 30) == (None, None)


@pytest.mark.parametrize("s", [(1,), (2,), (1, 2)])
def test_deformation_twist_closed_form(f3, u3_1, s):
    idx = Index(s, [GFElem(f3, 2)] * len(s))
    assert check_deformation_twist(idx, u3_1, 1, 3, 24) is None


def test_motive_spec_defaults(f3, u3_1):
    ms = MotiveSpec(Index.trivial([2], f3), 1, u3_1)
    assert ms.t_deg == 8
    assert ms.prec == 360
    assert ms.weight == 6
    assert len(ms.mu) == 1
    assert ms.mu[0] ** 2 == 1


def test_motive_spec_repr(f3):
    ms = MotiveSpec.from_colors(3, 1, [1, 2], [GFElem(f3, 2), f3.one], t_deg=2, prec=12)
    assert ms.uspec.field.order == 9
    namespace = {
        "MotiveSpec": MotiveSpec,
        "Index": Index,
        "GFElem": GFElem,
        "FieldSpec": FieldSpec,
        "UniformizerSpec": UniformizerSpec,
    }
    assert eval(repr(ms), namespace) == ms


def test_motive_spec_validation(f3, u3, u3_1):
    idx = Index.trivial([1], f3)
    with pytest.raises(TowerDepthError):
        MotiveSpec(idx, 1, u3)
    with pytest.raises(ValueError):
        MotiveSpec(idx, 0, u3_1)
    with pytest.raises(FieldMismatchError):
        MotiveSpec(Index.trivial([1], build_field(3, 2)), 1, u3_1)
    # mu^2 = -1 needs F_9
    with pytest.raises(InvalidFieldError):
        MotiveSpec(Index([1, 2], [GFElem(f3, 2), f3.one]), 1, u3_1)


def test_trivialization_depth_one(depth_one_system):
    # Act
    report = check_trivialization(depth_one_system)

    # Assert
    assert report.passed
    assert report.entries_checked == 4
    assert report.max_checked_exponent > 0
    assert report.to_json_dict()["status"] == "pass"


def test_inverse_depth_one(depth_one_system):
    assert check_inverse(depth_one_system).passed


def test_trivialization_depth_two(f3):
    ms = MotiveSpec.from_colors(3, 1, [1, 2], [GFElem(f3, 2), f3.one], t_deg=3, prec=24)
    td = build_triv(ms)
    assert td.dimension == 3
    report = check_trivialization(td)
    assert report.passed
    assert report.deformation_mismatch is None
    assert check_inverse(td).passed


def test_trivialization_level_two():
    # Arrange
    g = canonical_generator(color_field(3, 2))
    ms = MotiveSpec.from_colors(3, 2, [1, 1], [g**4, g], t_deg=2, prec=36)

    # Act
    td = build_triv(ms)

    # Assert
    assert td.r == 2
    assert ms.uspec.depth == 2
    assert check_trivialization(td).passed


def test_literal_t_terms_break_the_system(f3, u3_1):
    ms = MotiveSpec(Index.trivial([2], f3), 1, u3_1, t_deg=3, prec=24)
    report = check_trivialization(build_triv(ms, literal=True))
    assert not report.passed
    assert report.first_mismatch[:2] == (1, 0)
    assert report.deformation_mismatch[:2] == (0, 1)
    assert report.to_json_dict()["first_mismatch"] is not None
    assert report.to_json_dict()["deformation_mismatch"] is not None


def test_phi_determinant_at_zero(depth_one_system):
    assert not phi_determinant_at_zero(depth_one_system).is_zero


def test_kronecker_of_one_factor(depth_one_system):
    product = kronecker_motive([depth_one_system], [1])
    assert product.phi == depth_one_system.phi
    assert product.psi == depth_one_system.psi
    assert product.motive == depth_one_system.motive


def test_kronecker_square(depth_one_system):
    square = kronecker_motive([depth_one_system], [2])
    assert square.dimension == 4
    assert square.motive is None
    assert check_trivialization(square).passed


def test_kronecker_budget(tmp_path, depth_one_system):
    config_path = tmp_path / "config.json"
    config_path.write_text('{"version": 1, "limits": {"max_motive_dimension": 3}}')
    with patch.dict(os.environ, {"CMZV_CONFIG": str(config_path)}):
        with pytest.raises(BudgetExceededError):
            kronecker_motive([depth_one_system], [2])
    with pytest.raises(ValueError):
        kronecker_motive([depth_one_system], [0])


def test_direct_sum(depth_one_system):
    total = direct_sum_motive([depth_one_system, depth_one_system])
    assert total.dimension == 4
    assert check_trivialization(total).passed
    with pytest.raises(ValueError):
        specialization_pattern(total)


def test_specialization_pattern(f3, u3_1):
    # Arrange
    # 18 digits per power of t are lost at theta^3
    ms = MotiveSpec(Index.trivial([2], f3), 1, u3_1, t_deg=4, prec=120, weight=18)

    # Act
    report = specialization_pattern(build_triv(ms), 1)

    # Assert
    assert report.point == 1
    assert report.passed
    assert report.observed[0].is_zero
    assert report.observed[1].prec == 120
    assert report.expected[1].valuation == 54
    assert report.c == f3.one
    assert report.to_json_dict()["status"] == "pass"


def test_specialization_pattern_needs_digits(depth_one_system):
    # Omega^2 at theta^9 is not certified by three powers of t
    with pytest.raises(InsufficientPrecisionError):
        specialization_pattern(depth_one_system, 2)


@pytest.mark.parametrize("n", [0, -1])
def test_specialization_pattern_needs_a_frobenius_point(depth_one_system, n):
    with pytest.raises(ValueError):
        specialization_pattern(depth_one_system, n)


def test_period_multiple(f3, u3):
    # Gamma_1 zeta(1) / pi = zeta(1) Omega(theta)
    value = period_multiple(Index.trivial([1], f3), u3, 20)
    assert value.prec == 20
    assert value.valuation == 3
    assert value.leading_coefficient == f3.one


def test_L_at_theta_depth_one(f3, u3):
    # Act
    lhs, rhs = L_at_theta_sides(Index([1], [GFElem(f3, 2)]), u3, 4, 30)

    # Assert
    assert lhs.prec == 30
    assert not rhs.is_zero
    assert lhs.agrees_with(rhs)


def test_L_at_theta_depth_two(f3, u3):
    lhs, rhs = L_at_theta_sides(Index([1, 2], [GFElem(f3, 2), f3.one]), u3, 4, 30)
    assert lhs.prec >= 20
    assert rhs.valuation == 15
    assert lhs.agrees_with(rhs)


def test_psi_corner_depth_one(f3, u3_1):
    ms = MotiveSpec(Index.trivial([2], f3), 1, u3_1, t_deg=2, prec=24)
    observed, expected = psi_corner_at_theta(build_triv(ms))
    assert observed.prec == 24
    assert expected.valuation == 18
    assert observed.agrees_with(expected)


def test_psi_corner_depth_two(f3):
    # Arrange
    ms = MotiveSpec.from_colors(3, 1, [1, 2], [GFElem(f3, 2), f3.one], t_deg=2, prec=72)

    # Act
    observed, expected = psi_corner_at_theta(build_triv(ms))

    # Assert
    assert observed.prec > 45
    assert expected.valuation == 45
    assert observed.agrees_with(expected)


def test_psi_corner_needs_a_single_index(depth_one_system):
    with pytest.raises(ValueError):
        psi_corner_at_theta(direct_sum_motive([depth_one_system]))


@pytest.mark.slow
@pytest.mark.parametrize("s", range(1, 7))
def test_anderson_thakur_third_twist(u3, s):
    # S_3(s) = 1 / l_3^s starts at v^(78 s) for s <= 3
    lhs, rhs = anderson_thakur_sides(s, 3, u3, 4, 240)
    assert lhs.prec == 240
    if s <= 2:
        assert not rhs.is_zero
    assert lhs.agrees_with(rhs)


@pytest.mark.slow
@pytest.mark.parametrize("s", range(1, 5))
def test_anderson_thakur_third_twist_in_characteristic_two(u2, s):
    lhs, rhs = anderson_thakur_sides(s, 3, u2, 4, 60)
    assert lhs.prec == 60
    if s <= 2:
        assert not rhs.is_zero
    assert lhs.agrees_with(rhs)


@pytest.mark.slow
def test_level_two_system_over_f9():
    # Arrange
    g = canonical_generator(color_field(3, 2))
    ms = MotiveSpec.from_colors(3, 2, [2, 1], [g**4, g**4], t_deg=10, prec=60)

    # Act
    td = build_triv(ms)

    # Assert
    assert ms.uspec.field.order == 9
    assert check_trivialization(td).passed
    assert check_inverse(td).passed
    assert not phi_determinant_at_zero(td).is_zero
    assert not check_trivialization(build_triv(ms, literal=True)).passed


@pytest.mark.slow
def test_level_two_system_in_characteristic_two():
    # Arrange
    g = canonical_generator(color_field(2, 2))
    ms = MotiveSpec.from_colors(2, 2, [1, 1], [g, g], t_deg=10, prec=60)

    # Act
    td = build_triv(ms)

    # Assert
    assert ms.uspec.depth == 2
    assert check_trivialization(td).passed
    assert check_inverse(td).passed
    assert not phi_determinant_at_zero(td).is_zero


def test_kronecker_square_at_theta(f3, u3_1):
    # Arrange
    td = build_triv(MotiveSpec(Index.trivial([1], f3), 1, u3_1, t_deg=2, prec=24))

    # Act
    square = kronecker_motive([td], [2])
    corner = square.psi[0][0].specialize(0)

    # Assert
    # Omega(theta)^2
    assert check_trivialization(square).passed
    assert corner.valuation == 18
    assert corner.agrees_with((carlitz_period(u3_1, 80) ** 2).inverse(60))


def test_carlitz_period_is_stable_in_precision(u3):
    low = carlitz_period(u3, 30)
    high = carlitz_period(u3, 60)
    assert high.prec >= low.prec
    assert high.truncate(30).agrees_with(low)
    assert not low.is_zero


@pytest.mark.parametrize("prec", [30, 60])
def test_L_at_theta_is_stable_in_precision(f3, u3, prec):
    idx = Index([1, 2], [GFElem(f3, 2), f3.one])
    low, _ = L_at_theta_sides(idx, u3, 4, prec)
    high, _ = L_at_theta_sides(idx, u3, 4, 2 * prec)
    assert high.prec >= low.prec
    assert high.agrees_with(low)
