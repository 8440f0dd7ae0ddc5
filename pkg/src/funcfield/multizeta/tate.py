"""Truncated series in ``t`` with Laurent-series coefficients.

A :class:`TateSeries` stores the coefficients of ``t^0 .. t^T``. It is either a
polynomial in ``t`` (``exact``), or a truncation whose remaining coefficients are
described by an optional tail certificate: a set of lines ``(a, b)`` such that every
coefficient of ``t^j`` with ``j > T`` has v-valuation at least ``a + b j``. The
certificate is what makes specialization at ``t = theta^(q^N)`` come with a guaranteed
error, the line with the best error being picked for each point.
"""

from fractions import Fraction
import logging
import math
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from funcfield.multizeta.exceptions import (
    FieldMismatchError,
    InsufficientPrecisionError,
    TwistError,
)
from funcfield.multizeta.gf import GFElem
from funcfield.multizeta.scalars import LaurentScalar, Precision, UniformizerSpec

logger = logging.getLogger(__name__)

Line = Tuple[Fraction, Fraction]
Tail = Tuple[Line, ...]

Scalar = Union[LaurentScalar, GFElem, int]


def _as_fraction(value) -> Union[Fraction, float]:
    return value if value == math.inf else Fraction(value)


def _normalize_tail(lines) -> Optional[Tail]:
    if lines is None:
        return None
    best = {}
    for a, b in lines:
        a, b = _as_fraction(a), Fraction(b)
        best[b] = max(best.get(b, a), a)
    return tuple(sorted(((a, b) for b, a in best.items()), key=lambda line: line[1])) or None


class TateSeries:
    """Series ``sum_j f_j t^j`` known for ``j <= t_deg``."""

    _spec: UniformizerSpec
    _coeffs: Tuple[LaurentScalar, ...]
    _exact: bool
    _tail: Optional[Tail]

    @property
    def spec(self) -> UniformizerSpec:
        """Uniformizer of the coefficients."""
        return self._spec

    @property
    def coeffs(self) -> Tuple[LaurentScalar, ...]:
        """Coefficients of ``t^0 .. t^t_deg``."""
        return self._coeffs

    @property
    def t_deg(self) -> int:
        """Largest stored ``t``-exponent."""
        return len(self._coeffs) - 1

    @property
    def exact(self) -> bool:
        """Whether the series is a polynomial in ``t`` with nothing beyond ``t_deg``."""
        return self._exact

    @property
    def tail(self) -> Optional[Tail]:
        """Lines ``(a, b)`` bounding the valuations beyond ``t_deg``, if certified."""
        return self._tail

    def __init__(
        self,
        spec: UniformizerSpec,
        coeffs: Sequence[LaurentScalar],
        exact: bool = False,
        tail: Optional[Sequence[Tuple]] = None,
    ):
        """Create a series from its first coefficients."""
        coeffs = tuple(coeffs) or (LaurentScalar.zero(spec),)
        if any(c.spec != spec for c in coeffs):
            raise FieldMismatchError(f"coefficients must be written in {spec}")
        self._spec = spec
        self._coeffs = coeffs
        self._exact = exact
        self._tail = None if exact else _normalize_tail(tail)

    @staticmethod
    def constant(spec: UniformizerSpec, value: Scalar = 1) -> "TateSeries":
        """Series without ``t``."""
        if not isinstance(value, LaurentScalar):
            value = LaurentScalar.constant(spec, value)
        return TateSeries(spec, [value], exact=True)

    @staticmethod
    def polynomial(spec: UniformizerSpec, coeffs: Sequence[Scalar]) -> "TateSeries":
        """Polynomial in ``t`` from its coefficients, lowest degree first."""
        scalars = [
            c if isinstance(c, LaurentScalar) else LaurentScalar.constant(spec, c) for c in coeffs
        ]
        return TateSeries(spec, scalars, exact=True)

    @staticmethod
    def t_minus(spec: UniformizerSpec, root: LaurentScalar) -> "TateSeries":
        """``t - root``."""
        return TateSeries(spec, [-root, LaurentScalar.constant(spec)], exact=True)

    def coefficient(self, j: int) -> LaurentScalar:
        """Coefficient of ``t^j``."""
        if j <= self.t_deg:
            return self._coeffs[j]
        if self._exact:
            return LaurentScalar.zero(self._spec)
        raise InsufficientPrecisionError(f"The coefficient of t^{j}", self.t_deg)

    def line_bound(self, slope, start: int = 0):
        """Lower bound of ``val f_j - slope j`` over every ``j >= start``, None if unknown."""
        best = math.inf
        for j in range(start, len(self._coeffs)):
            bound = self._coeffs[j].valuation_bound
            if bound != math.inf:
                best = min(best, bound - slope * j)
        if self._exact:
            return best
        if self._tail is None:
            return None
        beyond = [a + (b - slope) * (self.t_deg + 1) for a, b in self._tail if b >= slope]
        if not beyond:
            return None
        return min(best, max(beyond))

    def _check(self, other: "TateSeries") -> None:
        if other.spec != self.spec:
            raise FieldMismatchError(f"{other.spec} and {self.spec} differ")

    @staticmethod
    def _combine_tails(operands: Sequence["TateSeries"], start: int, add: bool) -> Optional[Tail]:
        truncated = [f for f in operands if not f.exact]
        if any(f.tail is None for f in truncated):
            return None
        slopes = sorted({b for f in truncated for _, b in f.tail})
        lines = []
        for slope in slopes:
            bounds = [f.line_bound(slope, start) for f in operands]
            if None in bounds:
                continue
            lines.append((sum(bounds) if add else min(bounds), slope))
        return _normalize_tail(lines)

    def __add__(self, other):
        """Sum; truncated at the smaller degree of the non-polynomial operands."""
        if not isinstance(other, TateSeries):
            other = TateSeries.constant(self._spec, other)
        self._check(other)
        truncated = [f for f in (self, other) if not f.exact]
        if not truncated:
            size = max(len(self._coeffs), len(other._coeffs))
            coeffs = [self.coefficient(j) + other.coefficient(j) for j in range(size)]
            return TateSeries(self._spec, coeffs, exact=True)
        t_deg = min(f.t_deg for f in truncated)
        coeffs = [self.coefficient(j) + other.coefficient(j) for j in range(t_deg + 1)]
        tail = TateSeries._combine_tails((self, other), t_deg + 1, add=False)
        return TateSeries(self._spec, coeffs, tail=tail)

    __radd__ = __add__

    def __neg__(self):
        """Additive inverse."""
        return TateSeries(self._spec, [-c for c in self._coeffs], self._exact, self._tail)

    def __sub__(self, other):
        """Difference."""
        if not isinstance(other, TateSeries):
            other = TateSeries.constant(self._spec, other)
        return self + (-other)

    def __rsub__(self, other):
        """Difference with the series on the right."""
        return (-self) + other

    def scale(self, value: Scalar) -> "TateSeries":
        """Product with a scalar."""
        if not isinstance(value, LaurentScalar):
            value = LaurentScalar.constant(self._spec, value)
        tail = None
        if self._tail is not None:
            tail = [(a + value.valuation_bound, b) for a, b in self._tail]
        return TateSeries(self._spec, [c * value for c in self._coeffs], self._exact, tail)

    def __mul__(self, other):
        """Product; truncated at the smaller degree of the non-polynomial operands."""
        if not isinstance(other, TateSeries):
            return self.scale(other)
        self._check(other)
        truncated = [f for f in (self, other) if not f.exact]
        exact = not truncated
        t_deg = self.t_deg + other.t_deg if exact else min(f.t_deg for f in truncated)
        coeffs = []
        for j in range(t_deg + 1):
            total = LaurentScalar.zero(self._spec)
            for i in range(max(0, j - other.t_deg), min(j, self.t_deg) + 1):
                total = total + self._coeffs[i] * other._coeffs[j - i]
            coeffs.append(total)
        tail = None if exact else TateSeries._combine_tails((self, other), 0, add=True)
        return TateSeries(self._spec, coeffs, exact, tail)

    def __rmul__(self, other):
        """Product with a scalar on the left."""
        return self.scale(other)

    def __pow__(self, exponent: int):
        """Nonnegative integer power."""
        result = TateSeries.constant(self._spec)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, obj):
        """Test for equality of the stored data."""
        if not isinstance(obj, TateSeries):
            return False
        return (
            self._spec == obj._spec
            and self._coeffs == obj._coeffs
            and self._exact == obj._exact
            and self._tail == obj._tail
        )

    __hash__ = None

    def __repr__(self):
        """Python callable description."""
        return (
            f"TateSeries({self._spec!r}, coeffs={list(self._coeffs)!r}, "
            f"exact={self._exact!r}, tail={self._tail!r})"
        )

    def cap(self, prec: Precision, weight: Precision = 0) -> "TateSeries":
        """Forget the digits of the ``t^j`` coefficient above ``prec + weight j``."""
        coeffs = [c.truncate(prec + weight * j) for j, c in enumerate(self._coeffs)]
        return TateSeries(self._spec, coeffs, self._exact, self._tail)

    def with_tail(self, tail: Optional[Sequence[Tuple]]) -> "TateSeries":
        """Same coefficients with another tail certificate."""
        return TateSeries(self._spec, self._coeffs, self._exact, tail)

    def twist(self, n: int) -> "TateSeries":
        """Coefficientwise Frobenius twist; ``t`` is fixed.

        Raises
        ------
        TwistError
            ``n < 0`` and a coefficient has an exponent not divisible by ``q^|n|``.
        """
        coeffs = []
        for j, c in enumerate(self._coeffs):
            try:
                coeffs.append(c.twist(n))
            except TwistError as e:
                raise TwistError(e.exponent, self._spec.q ** abs(n), j) from e
        tail = None
        if self._tail is not None:
            factor = Fraction(self._spec.q) ** n
            tail = [(a * factor, b * factor) for a, b in self._tail]
        return TateSeries(self._spec, coeffs, self._exact, tail)

    def inverse(self, t_deg: Optional[int] = None, prec: Optional[Precision] = None):
        """Formal inverse in ``t``, to ``t_deg`` (this series' degree by default).

        ``prec`` is the target precision of ``1/f_0``, required when ``f_0`` is exact.
        The result carries no tail certificate.
        """
        t_deg = self.t_deg if t_deg is None else t_deg
        head = self._coeffs[0].inverse(prec)
        result = [head]
        for j in range(1, t_deg + 1):
            total = LaurentScalar.zero(self._spec)
            for i in range(1, j + 1):
                total = total + self.coefficient(i) * result[j - i]
            result.append(-(total * head))
        return TateSeries(self._spec, result)

    def specialize(self, n: int = 0) -> LaurentScalar:
        """Value at ``t = theta^(q^n)``, with the truncation error accounted for.

        Raises
        ------
        InsufficientPrecisionError
            No tail line decays fast enough for this point.
        """
        drop = self._spec.scale * self._spec.q**n
        point = LaurentScalar.monomial(self._spec, -drop, -1)
        value = LaurentScalar.zero(self._spec)
        power = LaurentScalar.constant(self._spec)
        for c in self._coeffs:
            value = value + c * power
            power = power * point
        if self._exact:
            return value
        errors = [
            a + (b - drop) * (self.t_deg + 1) for a, b in (self._tail or ()) if b > drop
        ]
        if not errors:
            raise InsufficientPrecisionError(f"The value at theta^(q^{n})", self.t_deg)
        error = max(errors)
        return value.truncate(math.ceil(error) - 1 if error != math.inf else math.inf)

    def at_zero(self) -> LaurentScalar:
        """Value at ``t = 0``."""
        return self._coeffs[0]

    def _compared_degrees(self, other: "TateSeries") -> int:
        if self._exact and other._exact:
            return max(len(self._coeffs), len(other._coeffs))
        return min(f.t_deg for f in (self, other) if not f.exact) + 1

    def first_mismatch(self, other: "TateSeries") -> Optional[Tuple[int, int]]:
        """First ``(t-exponent, v-exponent)`` where the series differ on their joint precision."""
        self._check(other)
        for j in range(self._compared_degrees(other)):
            mismatch = self.coefficient(j).first_mismatch(other.coefficient(j))
            if mismatch is not None:
                return j, mismatch
        return None

    def checked_exponent(self, other: "TateSeries") -> Precision:
        """Largest v-exponent compared by :meth:`first_mismatch`."""
        return max(
            min(self.coefficient(j).prec, other.coefficient(j).prec)
            for j in range(self._compared_degrees(other))
        )

    def min_valuations(self) -> List[Precision]:
        """Valuation bound of each stored coefficient."""
        return [c.valuation_bound for c in self._coeffs]

    def to_json_dict(self) -> Mapping:
        """JSON description with the coefficients as Laurent series."""
        coeffs = []
        for c in self._coeffs:
            data = c.to_json_dict()
            coeffs.append({"terms": data["terms"], "prec": data["prec"]})
        return {
            "uniformizer": self._spec.to_json_dict(),
            "coeffs": coeffs,
            "exact": self._exact,
            "tail": None if self._tail is None else [[str(a), str(b)] for a, b in self._tail],
        }


def _omega_intercept(valuation_base: int, q: int, slope: int, start: int) -> int:
    j = start
    best = valuation_base * q**j - slope * j
    while True:
        following = valuation_base * q ** (j + 1) - slope * (j + 1)
        if following >= best:
            return best
        best, j = following, j + 1


def omega(
    spec: UniformizerSpec, t_deg: int, prec: Precision, weight: Precision = 0
) -> TateSeries:
    """``Omega = v^(q^(R+1)) prod_{i >= 1} (1 + v^((q-1) q^(R+i)) t)`` truncated in ``t``.

    The coefficient of ``t^j`` is known up to ``prec + weight j`` and has valuation
    exactly ``q^(R+1+j)``, which provides the tail certificate.
    """
    q, depth = spec.q, spec.depth
    prefactor = q ** (depth + 1)
    reach = prec + weight * t_deg
    coeffs = [LaurentScalar.constant(spec)] + [LaurentScalar.zero(spec)] * t_deg
    i = 1
    while prefactor + spec.scale * q**i <= reach:
        step = LaurentScalar.monomial(spec, spec.scale * q**i)
        for j in range(t_deg, 0, -1):
            coeffs[j] = (coeffs[j] + coeffs[j - 1] * step).truncate(
                prec + weight * j - prefactor
            )
        i += 1
    coeffs = [
        c.truncate(prec + weight * j - prefactor).shift(prefactor) for j, c in enumerate(coeffs)
    ]
    slopes = [spec.scale * q**k for k in range(1, t_deg + 3)]
    slopes.append((q - 1) * q ** (depth + t_deg + 2))
    tail = [(_omega_intercept(prefactor, q, b, t_deg + 1), b) for b in slopes]
    logger.debug("Omega with %d factors, t_deg=%s, precision %s", i - 1, t_deg, prec)
    return TateSeries(spec, coeffs, tail=tail)
