"""Colored multiple zeta values over F_q[theta] and their t-motives."""

try:
    import importlib.metadata as importlib_metadata
except ModuleNotFoundError:  # pragma: no cover
    import importlib_metadata  # type: ignore

from funcfield.multizeta.configuration import Configuration, is_configured
from funcfield.multizeta.exceptions import (
    BudgetExceededError,
    EmptyWordError,
    FieldMismatchError,
    FieldSizeError,
    IndexSyntaxError,
    InsufficientPrecisionError,
    InvalidConfigurationError,
    InvalidFieldError,
    NotConfiguredError,
    TowerDepthError,
    TwistError,
)
from funcfield.multizeta.gf import FieldSpec, GFElem, build_field, color_field, solve_mu
from funcfield.multizeta.powersum import Index, ZetaValue, cmzv, nested_power_sum, power_sum
from funcfield.multizeta.relmine import (
    MonomialBasis,
    cross_weight_scan,
    enumerate_monomials,
    mine_relations,
)
from funcfield.multizeta.scalars import LaurentScalar, UniformizerSpec, carlitz_period
from funcfield.multizeta.stuffle import (
    FormalSum,
    graded_product,
    stuffle_product,
    verify_relation,
)
from funcfield.multizeta.tate import TateSeries, omega
from funcfield.multizeta.tmotive import (
    L_at_theta_sides,
    L_series,
    L_star_series,
    MotiveSpec,
    T_term,
    TrivData,
    at_poly,
    build_triv,
    check_trivialization,
    kronecker_motive,
    period_multiple,
    psi_corner_at_theta,
    specialize,
    tate_twist,
)

__all__ = [
    "Configuration",
    "is_configured",
    "BudgetExceededError",
    "EmptyWordError",
    "FieldMismatchError",
    "FieldSizeError",
    "IndexSyntaxError",
    "InsufficientPrecisionError",
    "InvalidConfigurationError",
    "InvalidFieldError",
    "NotConfiguredError",
    "TowerDepthError",
    "TwistError",
    "FieldSpec",
    "GFElem",
    "build_field",
    "color_field",
    "solve_mu",
    "Index",
    "ZetaValue",
    "cmzv",
    "nested_power_sum",
    "power_sum",
    "MonomialBasis",
    "cross_weight_scan",
    "enumerate_monomials",
    "mine_relations",
    "LaurentScalar",
    "UniformizerSpec",
    "carlitz_period",
    "FormalSum",
    "graded_product",
    "stuffle_product",
    "verify_relation",
    "TateSeries",
    "omega",
    "L_at_theta_sides",
    "L_series",
    "L_star_series",
    "MotiveSpec",
    "T_term",
    "TrivData",
    "at_poly",
    "build_triv",
    "check_trivialization",
    "kronecker_motive",
    "period_multiple",
    "psi_corner_at_theta",
    "specialize",
    "tate_twist",
]

__version__ = importlib_metadata.version(__name__.replace(".", "-"))
