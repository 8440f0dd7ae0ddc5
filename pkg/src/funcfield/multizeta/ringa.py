"""Polynomial ring ``A = F_q[theta]`` and its fraction field over a finite field."""

import functools
import itertools
import logging
import math
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import galois

from funcfield.multizeta.configuration import Configuration
from funcfield.multizeta.exceptions import BudgetExceededError, FieldMismatchError
from funcfield.multizeta.gf import FieldSpec, GFElem, subfield
from funcfield.multizeta.scalars import LaurentScalar, Precision, UniformizerSpec

logger = logging.getLogger(__name__)

PolyA = galois.Poly
"""Polynomials in ``theta`` are :class:`galois.Poly` over the coefficient field."""


def is_zero_poly(poly: PolyA) -> bool:
    """Whether ``poly`` is the zero polynomial."""
    return poly.degree == 0 and int(poly.coeffs[0]) == 0


def poly_from_coeffs(spec: FieldSpec, coeffs: Sequence[Union[GFElem, int]]) -> PolyA:
    """Polynomial from coefficients in ascending degree.

    Integers are integer representations of elements of ``spec``.
    """
    values = [c.integer if isinstance(c, GFElem) else int(c) for c in coeffs] or [0]
    return galois.Poly(values, field=spec.field, order="asc")


def poly_coeffs(poly: PolyA) -> List[int]:
    """Integer representations of the coefficients in ascending degree."""
    return [int(c) for c in poly.coeffs[::-1]]


class RatFuncExt:
    """Reduced fraction of polynomials in ``theta`` over a finite field.

    The representation is canonical: coprime numerator and denominator, monic
    denominator, and ``0 / 1`` for zero.
    """

    _spec: FieldSpec
    _num: PolyA
    _den: PolyA

    @property
    def spec(self) -> FieldSpec:
        """Coefficient field."""
        return self._spec

    @property
    def num(self) -> PolyA:
        """Numerator."""
        return self._num

    @property
    def den(self) -> PolyA:
        """Monic denominator."""
        return self._den

    @property
    def is_zero(self) -> bool:
        """Whether the fraction is zero."""
        return is_zero_poly(self._num)

    @property
    def degree(self) -> Union[int, float]:
        """``deg num - deg den``, ``-math.inf`` for zero."""
        if self.is_zero:
            return -math.inf
        return self._num.degree - self._den.degree

    def __init__(self, spec: FieldSpec, num: PolyA, den: Optional[PolyA] = None):
        """Create the reduced fraction ``num / den``."""
        field = spec.field
        if num.field is not field or (den is not None and den.field is not field):
            raise FieldMismatchError(f"polynomials must have coefficients in {spec}")
        den = galois.Poly.One(field) if den is None else den
        if is_zero_poly(den):
            raise ZeroDivisionError("the denominator is zero")
        if is_zero_poly(num):
            num, den = galois.Poly.Zero(field), galois.Poly.One(field)
        else:
            divisor = galois.gcd(num, den)
            num, den = num // divisor, den // divisor
            leading = galois.Poly([int(den.coeffs[0] ** -1)], field=field)
            num, den = num * leading, den * leading
        self._spec = spec
        self._num = num
        self._den = den

    @staticmethod
    def from_coeffs(
        spec: FieldSpec, num: Sequence[int], den: Sequence[int] = (1,)
    ) -> "RatFuncExt":
        """Fraction from ascending integer coefficient lists."""
        return RatFuncExt(spec, poly_from_coeffs(spec, num), poly_from_coeffs(spec, den))

    @staticmethod
    def zero(spec: FieldSpec) -> "RatFuncExt":
        """Zero."""
        return RatFuncExt(spec, galois.Poly.Zero(spec.field))

    @staticmethod
    def one(spec: FieldSpec) -> "RatFuncExt":
        """One."""
        return RatFuncExt(spec, galois.Poly.One(spec.field))

    def _coerce(self, other) -> Optional["RatFuncExt"]:
        if isinstance(other, RatFuncExt):
            if other.spec != self.spec:
                raise FieldMismatchError(f"{other.spec} and {self.spec} differ")
            return other
        if isinstance(other, galois.Poly):
            return RatFuncExt(self._spec, other)
        if isinstance(other, GFElem):
            return RatFuncExt(self._spec, poly_from_coeffs(self._spec, [other]))
        if isinstance(other, int):
            return RatFuncExt(self._spec, poly_from_coeffs(self._spec, [other % self._spec.p]))
        return None

    def __add__(self, other):
        """Sum."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self._den == other._den:
            return RatFuncExt(self._spec, self._num + other._num, self._den)
        return RatFuncExt(
            self._spec, self._num * other._den + other._num * self._den, self._den * other._den
        )

    __radd__ = __add__

    def __neg__(self):
        """Additive inverse."""
        return RatFuncExt(self._spec, -self._num, self._den)

    def __sub__(self, other):
        """Difference."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        """Difference with the fraction on the right."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        """Product."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RatFuncExt(self._spec, self._num * other._num, self._den * other._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Quotient."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by the zero fraction")
        return RatFuncExt(self._spec, self._num * other._den, self._den * other._num)

    def __pow__(self, exponent: int):
        """Integer power."""
        if exponent < 0:
            if self.is_zero:
                raise ZeroDivisionError("zero has no inverse")
            return RatFuncExt(self._spec, self._den**-exponent, self._num**-exponent)
        return RatFuncExt(self._spec, self._num**exponent, self._den**exponent)

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, RatFuncExt):
            return False
        return self._spec == obj._spec and self._num == obj._num and self._den == obj._den

    __hash__ = None

    def __repr__(self):
        """Python callable description."""
        return (
            f"RatFuncExt.from_coeffs({self._spec!r}, "
            f"{tuple(poly_coeffs(self._num))!r}, {tuple(poly_coeffs(self._den))!r})"
        )

    def to_json_dict(self) -> Mapping:
        """JSON description ``{field, num, den}`` with ascending coefficients."""
        return {
            "field": self._spec.to_json_dict(),
            "num": poly_coeffs(self._num),
            "den": poly_coeffs(self._den),
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "RatFuncExt":
        """Inverse of :meth:`to_json_dict`."""
        spec = FieldSpec.from_json_dict(data["field"])
        return RatFuncExt.from_coeffs(spec, data["num"], data["den"])


def tree_sum(spec: FieldSpec, fractions: Sequence[RatFuncExt]) -> RatFuncExt:
    """Sum of ``fractions``, added pairwise to keep intermediate degrees balanced."""
    layer = list(fractions)
    if not layer:
        return RatFuncExt.zero(spec)
    while len(layer) > 1:
        paired = [layer[i] + layer[i + 1] for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            paired.append(layer[-1])
        layer = paired
    return layer[0]


class FunctionField:
    """``A = F_q[theta]`` with coefficients computed in a working field containing ``F_q``.

    Power sums are memoized per instance; use :func:`function_field` to share them.
    """

    _q: int
    _spec: FieldSpec
    _constants: Tuple[int, ...]
    _power_sums: Dict[Tuple[int, int], RatFuncExt]

    @property
    def q(self) -> int:
        """Size of the constant field."""
        return self._q

    @property
    def spec(self) -> FieldSpec:
        """Working coefficient field."""
        return self._spec

    @property
    def constants(self) -> Tuple[int, ...]:
        """Integer representations of ``F_q`` inside the working field, ascending."""
        return self._constants

    @property
    def theta(self) -> PolyA:
        """The variable ``theta``."""
        return galois.Poly.Degrees([1], field=self._spec.field)

    def __init__(self, q: int, spec: FieldSpec):
        """Create ``F_q[theta]`` over ``spec``."""
        self._q = q
        self._spec = spec
        self._constants = tuple(int(c) for c in subfield(spec, q))
        self._power_sums = {}

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, FunctionField):
            return False
        return self.q == obj.q and self.spec == obj.spec

    def __hash__(self):
        """Hash of the defining data."""
        return hash((self._q, self._spec))

    def __repr__(self):
        """Python callable description."""
        return f"FunctionField(q={self.q!r}, spec={self.spec!r})"

    def monics(self, d: int) -> Iterator[PolyA]:
        """Monic polynomials of degree ``d``, in lexicographic order of their coefficients.

        Raises
        ------
        BudgetExceededError
            ``q^d`` is above the configured enumeration limit.
        """
        limit = Configuration.current().max_monic_count
        if self._q**d > limit:
            raise BudgetExceededError(f"Enumerating monics of degree {d}", self._q**d, limit)
        field = self._spec.field
        for lower in itertools.product(self._constants, repeat=d):
            yield galois.Poly([1, *lower], field=field)

    def carlitz_factor(self, i: int) -> PolyA:
        """``D_i = prod_{j<i} (theta^(q^i) - theta^(q^j))``."""
        field = self._spec.field
        result = galois.Poly.One(field)
        top = galois.Poly.Degrees([self._q**i], field=field)
        for j in range(i):
            result = result * (top - galois.Poly.Degrees([self._q**j], field=field))
        return result

    def gamma(self, n: int) -> PolyA:
        """Carlitz gamma value ``Gamma_(n+1) = prod_i D_i^(n_i)`` over the digits of ``n``."""
        result = galois.Poly.One(self._spec.field)
        i = 0
        while n:
            n, digit = divmod(n, self._q)
            if digit:
                result = result * self.carlitz_factor(i) ** digit
            i += 1
        return result

    def power_sum(self, d: int, s: int) -> RatFuncExt:
        """``S_d(s) = sum over monic a of degree d of 1 / a^s``."""
        key = (d, s)
        if key not in self._power_sums:
            fractions = [
                RatFuncExt(self._spec, galois.Poly.One(self._spec.field), a**s)
                for a in self.monics(d)
            ]
            self._power_sums[key] = tree_sum(self._spec, fractions)
            logger.debug("S_%s(%s) has degree %s", d, s, self._power_sums[key].degree)
        return self._power_sums[key]


@functools.lru_cache(maxsize=None)
def function_field(q: int, spec: FieldSpec) -> FunctionField:
    """Shared :class:`FunctionField` for ``q`` over ``spec``."""
    return FunctionField(q, spec)


def poly_to_laurent(poly: PolyA, uspec: UniformizerSpec) -> LaurentScalar:
    """Exact v-expansion of a polynomial, ``theta = -v^(-(q-1) q^R)``."""
    terms = []
    for k, c in zip(poly.nonzero_degrees, poly.nonzero_coeffs):
        coefficient = uspec.field.element(c)
        terms.append((-uspec.scale * int(k), -coefficient if k % 2 else coefficient))
    return LaurentScalar(uspec, terms)


def to_laurent(f: RatFuncExt, uspec: UniformizerSpec, prec: Precision) -> LaurentScalar:
    """v-expansion of ``f`` up to ``prec``.

    Raises
    ------
    FieldMismatchError
        ``f`` and ``uspec`` use different coefficient fields.
    """
    if f.spec != uspec.field:
        raise FieldMismatchError(f"{f.spec} is not the coefficient field of {uspec}")
    numerator = poly_to_laurent(f.num, uspec)
    if f.den.degree == 0:
        return numerator.truncate(prec)
    if f.is_zero:
        return LaurentScalar.zero(uspec, prec)
    target = prec + uspec.scale * f.num.degree
    denominator = poly_to_laurent(f.den, uspec).inverse(target)
    return (numerator * denominator).truncate(prec)
