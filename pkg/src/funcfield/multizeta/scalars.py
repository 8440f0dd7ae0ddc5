"""Truncated Laurent series in a uniformizer ``v`` with ``v^((q-1) q^R) = -1/theta``."""

from fractions import Fraction
import logging
import math
from typing import Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from funcfield.multizeta.exceptions import (
    FieldMismatchError,
    InsufficientPrecisionError,
    InvalidFieldError,
    TowerDepthError,
    TwistError,
)
from funcfield.multizeta.gf import FieldSpec, GFElem, power_of

logger = logging.getLogger(__name__)

Precision = Union[int, float]
"""A v-exponent, or ``math.inf`` for exact values."""


class UniformizerSpec:
    """Uniformizer ``v`` of depth ``R`` over a coefficient field.

    The embedding of ``F_q(theta)`` is fixed by ``theta = -v^(-(q-1) q^R)``, so every
    ``theta^(q^-i)`` with ``i <= R`` is a monomial in ``v`` up to sign.
    """

    _q: int
    _depth: int
    _field: FieldSpec

    @property
    def q(self) -> int:
        """Size of the constant field."""
        return self._q

    @property
    def depth(self) -> int:
        """Number of inverse Frobenius roots of ``theta`` the tower holds."""
        return self._depth

    @property
    def field(self) -> FieldSpec:
        """Coefficient field."""
        return self._field

    @property
    def p(self) -> int:
        """Characteristic."""
        return self._field.p

    @property
    def scale(self) -> int:
        """Number of v-digits in one digit of ``1/theta``, ``(q-1) q^R``."""
        return (self._q - 1) * self._q**self._depth

    def __init__(self, q: int, depth: int, field: FieldSpec):
        """Create a uniformizer specification."""
        if depth < 0:
            raise TowerDepthError(depth, 0)
        if not field.contains(q):
            raise InvalidFieldError(field.p, f"F_{q} is not a subfield of F_{field.order}")
        self._q = q
        self._depth = depth
        self._field = field

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, UniformizerSpec):
            return False
        return self.q == obj.q and self.depth == obj.depth and self.field == obj.field

    def __hash__(self):
        """Hash of the defining data."""
        return hash((self._q, self._depth, self._field))

    def __repr__(self):
        """Python callable description."""
        return f"UniformizerSpec(q={self.q!r}, depth={self.depth!r}, field={self.field!r})"

    def to_json_dict(self) -> Mapping:
        """JSON description."""
        return {"q": self.q, "depth": self.depth, "field": self.field.to_json_dict()}

    @staticmethod
    def from_json_dict(data: Mapping) -> "UniformizerSpec":
        """Inverse of :meth:`to_json_dict`."""
        return UniformizerSpec(data["q"], data["depth"], FieldSpec.from_json_dict(data["field"]))


def _normalize(exponents: np.ndarray, coeffs, prec: Precision):
    keep = exponents <= prec
    exponents, coeffs = exponents[keep], coeffs[keep]
    if exponents.size == 0:
        return exponents, coeffs
    order = np.argsort(exponents, kind="stable")
    exponents, coeffs = exponents[order], coeffs[order]
    starts = np.flatnonzero(np.concatenate(([True], exponents[1:] != exponents[:-1])))
    coeffs = np.add.reduceat(coeffs, starts)
    exponents = exponents[starts]
    nonzero = np.asarray(coeffs != 0)
    return exponents[nonzero], coeffs[nonzero]


class LaurentScalar:
    """Laurent series in ``v`` known up to ``v^prec``.

    Terms with exponent above :attr:`prec` are unknown. Arithmetic propagates the
    precision pessimistically, and exact values carry ``prec == math.inf``.
    """

    _spec: UniformizerSpec
    _exponents: np.ndarray
    _coeffs: object
    _prec: Precision

    @property
    def spec(self) -> UniformizerSpec:
        """Uniformizer the series is written in."""
        return self._spec

    @property
    def prec(self) -> Precision:
        """Largest known exponent, ``math.inf`` for exact values."""
        return self._prec

    @property
    def is_exact(self) -> bool:
        """Whether every digit is known."""
        return self._prec == math.inf

    @property
    def exponents(self) -> np.ndarray:
        """Exponents of the nonzero terms, ascending."""
        return self._exponents.copy()

    @property
    def coefficients(self):
        """Coefficients of the nonzero terms as a :mod:`galois` array."""
        return self._coeffs.copy()

    @property
    def terms(self) -> Tuple[Tuple[int, GFElem], ...]:
        """Nonzero terms as ``(exponent, coefficient)`` pairs, ascending."""
        field = self._spec.field
        return tuple(
            (int(e), field.element(c)) for e, c in zip(self._exponents, self._coeffs)
        )

    @property
    def is_zero(self) -> bool:
        """Whether no nonzero digit is known."""
        return self._exponents.size == 0

    @property
    def valuation(self) -> Precision:
        """Smallest exponent with a nonzero known digit, ``math.inf`` when there is none."""
        return int(self._exponents[0]) if self._exponents.size else math.inf

    @property
    def valuation_bound(self) -> Precision:
        """Guaranteed lower bound on the true valuation."""
        return min(self.valuation, self._prec + 1)

    @property
    def leading_coefficient(self) -> GFElem:
        """Coefficient at :attr:`valuation`."""
        if self.is_zero:
            raise InsufficientPrecisionError("The leading coefficient of zero", self._prec)
        return self._spec.field.element(self._coeffs[0])

    @property
    def degree_theta(self) -> Fraction:
        """Degree in ``theta`` of the leading term, ``-valuation / scale``."""
        if self.is_zero:
            raise InsufficientPrecisionError("The degree of zero", self._prec)
        return Fraction(-self.valuation, self._spec.scale)

    def __init__(
        self,
        spec: UniformizerSpec,
        terms: Iterable[Tuple[int, Union[GFElem, int]]] = (),
        prec: Precision = math.inf,
    ):
        """Create a series from ``(exponent, coefficient)`` pairs.

        Integer coefficients are read as elements of the prime field. Repeated exponents
        add up, and terms beyond ``prec`` are dropped.
        """
        field = spec.field.field
        exponents, values = [], []
        for exponent, coefficient in terms:
            exponents.append(int(exponent))
            values.append(_coefficient_integer(spec, coefficient))
        self._spec = spec
        self._prec = prec
        self._exponents, self._coeffs = _normalize(
            np.array(exponents, dtype=np.int64), field(np.array(values, dtype=np.int64)), prec
        )

    @staticmethod
    def _from_arrays(spec: UniformizerSpec, exponents, coeffs, prec: Precision):
        result = LaurentScalar.__new__(LaurentScalar)
        result._spec = spec
        result._prec = prec
        result._exponents, result._coeffs = _normalize(
            np.asarray(exponents, dtype=np.int64), coeffs, prec
        )
        return result

    @staticmethod
    def constant(spec: UniformizerSpec, value: Union[GFElem, int] = 1) -> "LaurentScalar":
        """Exact constant."""
        return LaurentScalar(spec, [(0, value)])

    @staticmethod
    def monomial(
        spec: UniformizerSpec, exponent: int, coefficient: Union[GFElem, int] = 1
    ) -> "LaurentScalar":
        """Exact monomial ``coefficient * v^exponent``."""
        return LaurentScalar(spec, [(exponent, coefficient)])

    @staticmethod
    def zero(spec: UniformizerSpec, prec: Precision = math.inf) -> "LaurentScalar":
        """Zero known up to ``prec``."""
        return LaurentScalar(spec, (), prec)

    def _coerce(self, other) -> Optional["LaurentScalar"]:
        if isinstance(other, LaurentScalar):
            if other.spec != self.spec:
                raise FieldMismatchError(f"{other.spec} and {self.spec} differ")
            return other
        if isinstance(other, (GFElem, int, np.integer)):
            return LaurentScalar.constant(self.spec, other)
        return None

    def __add__(self, other):
        """Sum, known up to the smaller precision."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return LaurentScalar._from_arrays(
            self._spec,
            np.concatenate((self._exponents, other._exponents)),
            np.concatenate((self._coeffs, other._coeffs)),
            min(self._prec, other._prec),
        )

    __radd__ = __add__

    def __neg__(self):
        """Additive inverse."""
        return LaurentScalar._from_arrays(self._spec, self._exponents, -self._coeffs, self._prec)

    def __sub__(self, other):
        """Difference, known up to the smaller precision."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        """Difference with the series on the right."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        """Product, known up to ``min(Px + val y, Py + val x)``."""
        if isinstance(other, (GFElem, int, np.integer)):
            value = self._spec.field.field(_coefficient_integer(self._spec, other))
            if value == 0:
                return LaurentScalar.zero(self._spec)
            return LaurentScalar._from_arrays(
                self._spec, self._exponents, self._coeffs * value, self._prec
            )
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        prec = min(self._prec + other.valuation_bound, other._prec + self.valuation_bound)
        if self.is_zero or other.is_zero:
            return LaurentScalar.zero(self._spec, prec)
        left = self._exponents <= prec - other.valuation
        right = other._exponents <= prec - self.valuation
        exponents = np.add.outer(self._exponents[left], other._exponents[right]).ravel()
        coeffs = np.multiply.outer(self._coeffs[left], other._coeffs[right]).ravel()
        return LaurentScalar._from_arrays(self._spec, exponents, coeffs, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Quotient; an exact divisor is inverted to the precision the dividend supports."""
        if isinstance(other, (GFElem, int, np.integer)):
            value = self._spec.field.field(_coefficient_integer(self._spec, other))
            if value == 0:
                raise ZeroDivisionError("division of a Laurent series by zero")
            return self * self._spec.field.element(value**-1)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_exact and not self.is_exact:
            target = self._prec - other.valuation - self.valuation_bound
            return self * other.inverse(target)
        return self * other.inverse()

    def __pow__(self, exponent: int):
        """Power by repeated squaring; negative powers go through :meth:`inverse`."""
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = LaurentScalar.constant(self._spec)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, obj):
        """Test for equality of the known digits and of the precision."""
        if not isinstance(obj, LaurentScalar):
            return False
        return (
            self._spec == obj._spec
            and self._prec == obj._prec
            and np.array_equal(self._exponents, obj._exponents)
            and np.array_equal(np.asarray(self._coeffs), np.asarray(obj._coeffs))
        )

    __hash__ = None

    def __repr__(self):
        """Python callable description."""
        prec = 'float("inf")' if self.is_exact else repr(self._prec)
        return f"LaurentScalar({self._spec!r}, terms={self.terms!r}, prec={prec})"

    def shift(self, exponent: int) -> "LaurentScalar":
        """Product with ``v^exponent``."""
        return LaurentScalar._from_arrays(
            self._spec, self._exponents + exponent, self._coeffs, self._prec + exponent
        )

    def truncate(self, prec: Precision) -> "LaurentScalar":
        """Forget the digits above ``prec``."""
        if prec >= self._prec:
            return self
        return LaurentScalar._from_arrays(self._spec, self._exponents, self._coeffs, prec)

    def coefficient(self, exponent: int) -> GFElem:
        """Digit at ``exponent``."""
        if exponent > self._prec:
            raise InsufficientPrecisionError(f"The digit at v^{exponent}", self._prec)
        position = np.searchsorted(self._exponents, exponent)
        if position < self._exponents.size and self._exponents[position] == exponent:
            return self._spec.field.element(self._coeffs[position])
        return self._spec.field.zero

    def dense(self, start: int, stop: int):
        """Digits at exponents ``start..stop`` as a :mod:`galois` array."""
        if stop > self._prec:
            raise InsufficientPrecisionError(f"The digits up to v^{stop}", self._prec)
        digits = self._spec.field.field.Zeros(stop - start + 1)
        window = (self._exponents >= start) & (self._exponents <= stop)
        digits[self._exponents[window] - start] = self._coeffs[window]
        return digits

    def inverse(self, prec: Optional[Precision] = None) -> "LaurentScalar":
        """Multiplicative inverse by Newton iteration.

        Parameters
        ----------
        prec : int, optional
            Target precision. Required for exact inputs; otherwise capped by the
            precision the input supports, ``prec - 2 * valuation``.

        Raises
        ------
        InsufficientPrecisionError
            The series has no known nonzero digit, or it is exact and no target is given.
        """
        if self.is_zero:
            raise InsufficientPrecisionError(
                "The inverse of a value indistinguishable from 0", self._prec
            )
        k = self.valuation
        supported = self._prec - 2 * k
        if prec is None:
            if supported == math.inf:
                raise InsufficientPrecisionError("The inverse of an exact series", math.inf)
            prec = supported
        prec = min(prec, supported)
        if prec == math.inf:
            raise InsufficientPrecisionError("The inverse of an exact series", math.inf)
        leading = self._coeffs[0]
        relative = prec + k
        unit = LaurentScalar._from_arrays(
            self._spec, self._exponents - k, self._coeffs / leading, math.inf
        )
        # Iterates stay exact; only the final value carries a precision.
        result = LaurentScalar.constant(self._spec)
        known = 0
        while known < relative:
            known = min(2 * known + 1, relative)
            product = (unit._clip(known) * result)._clip(known)
            result = (result * (2 - product))._clip(known)
        return LaurentScalar._from_arrays(
            self._spec, result._exponents - k, result._coeffs / leading, relative - k
        )

    def _clip(self, bound: Precision) -> "LaurentScalar":
        # Exact series made of the terms up to ``bound``.
        keep = self._exponents <= bound
        return LaurentScalar._from_arrays(
            self._spec, self._exponents[keep], self._coeffs[keep], math.inf
        )

    def twist(self, n: int) -> "LaurentScalar":
        """Frobenius twist ``sum a_m v^m -> sum a_m^(q^n) v^(m q^n)``.

        Raises
        ------
        TwistError
            ``n < 0`` and some exponent is not divisible by ``q^|n|``.
        """
        spec = self._spec
        k = (power_of(spec.q, spec.p) * n) % spec.field.e
        coeffs = self._coeffs ** (spec.p**k) if k else self._coeffs
        factor = spec.q ** abs(n)
        if n >= 0:
            prec = self._prec if self.is_exact else (self._prec + 1) * factor - 1
            return LaurentScalar._from_arrays(spec, self._exponents * factor, coeffs, prec)
        bad = self._exponents % factor != 0
        if bad.any():
            raise TwistError(int(self._exponents[bad][0]), factor)
        prec = self._prec if self.is_exact else -((-(self._prec + 1)) // factor) - 1
        return LaurentScalar._from_arrays(spec, self._exponents // factor, coeffs, prec)

    def first_mismatch(self, other: "LaurentScalar") -> Optional[int]:
        """Smallest exponent where the two series differ on their joint precision."""
        difference = self - other
        return None if difference.is_zero else difference.valuation

    def agrees_with(self, other: "LaurentScalar") -> bool:
        """Whether the two series agree on every digit both know."""
        return self.first_mismatch(other) is None

    def to_json_dict(self) -> Mapping:
        """JSON description with ascending exponents; exact values have ``prec`` null."""
        return {
            "uniformizer": self._spec.to_json_dict(),
            "terms": [[exponent, list(c.coeffs)] for exponent, c in self.terms],
            "prec": None if self.is_exact else int(self._prec),
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "LaurentScalar":
        """Inverse of :meth:`to_json_dict`."""
        spec = UniformizerSpec.from_json_dict(data["uniformizer"])
        terms = [(e, GFElem.from_coeffs(spec.field, c)) for e, c in data["terms"]]
        prec = math.inf if data["prec"] is None else data["prec"]
        return LaurentScalar(spec, terms, prec)

    def to_text(self, max_terms: int = 12) -> str:
        """Expansion in powers of ``-1/theta``, with the leading degree in ``theta``."""
        scale = self._spec.scale
        shown = []
        for exponent, c in self.terms[:max_terms]:
            power = Fraction(exponent, scale)
            shown.append(f"{c.integer}*(-1/theta)^({power})")
        if self.is_exact:
            tail = "" if len(self.terms) <= max_terms else " + ..."
        else:
            tail = f" + O((-1/theta)^({Fraction(self._prec + 1, scale)}))"
        body = " + ".join(shown) if shown else "0"
        head = "" if self.is_zero else f"deg_theta = {self.degree_theta}: "
        return f"{head}{body}{tail}"


def _coefficient_integer(spec: UniformizerSpec, value: Union[GFElem, int]) -> int:
    if isinstance(value, GFElem):
        if value.spec != spec.field:
            raise FieldMismatchError(f"{value} is not an element of {spec.field}")
        return value.integer
    return int(value) % spec.p


def theta(spec: UniformizerSpec) -> LaurentScalar:
    """``theta = -v^(-(q-1) q^R)``."""
    return theta_root(spec, 0)


def theta_root(spec: UniformizerSpec, i: int) -> LaurentScalar:
    """``theta^(q^-i) = -v^(-(q-1) q^(R-i))``.

    Raises
    ------
    TowerDepthError
        ``i`` is negative or above the depth of the uniformizer.
    """
    if not 0 <= i <= spec.depth:
        raise TowerDepthError(i, spec.depth)
    return LaurentScalar.monomial(spec, -(spec.q - 1) * spec.q ** (spec.depth - i), -1)


def omega_at_theta(spec: UniformizerSpec, prec: Precision) -> LaurentScalar:
    """``Omega(theta) = v^(q^(R+1)) prod_{i >= 1} (1 - v^((q-1) q^R (q^i - 1)))`` to ``prec``."""
    prefactor = spec.q ** (spec.depth + 1)
    product = LaurentScalar.constant(spec).truncate(prec - prefactor)
    i = 1
    while prefactor + spec.scale * (spec.q**i - 1) <= prec:
        factor = LaurentScalar(spec, [(0, 1), (spec.scale * (spec.q**i - 1), -1)])
        product = product * factor
        i += 1
    logger.debug("Omega(theta) uses %d factors at precision %s", i - 1, prec)
    return product.shift(prefactor)


def carlitz_period(spec: UniformizerSpec, prec: Precision) -> LaurentScalar:
    """Carlitz period ``1 / Omega(theta)`` up to ``prec``.

    The sign is the one fixed by the ``(q-1)``-th root of ``-theta`` inside ``v``.
    """
    if prec < 1:
        raise InsufficientPrecisionError("The Carlitz period", prec)
    offset = 2 * spec.q ** (spec.depth + 1)
    return omega_at_theta(spec, prec + offset).inverse(prec)
