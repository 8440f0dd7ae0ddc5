"""Power sums, nested power sums and colored multizeta values."""

import functools
import logging
from typing import Iterable, Mapping, Sequence, Tuple

from funcfield.multizeta.configuration import Configuration
from funcfield.multizeta.exceptions import (
    BudgetExceededError,
    EmptyWordError,
    FieldMismatchError,
    InsufficientPrecisionError,
    InvalidFieldError,
)
from funcfield.multizeta.gf import FieldSpec, GFElem
from funcfield.multizeta.ringa import FunctionField, RatFuncExt, function_field, to_laurent
from funcfield.multizeta.scalars import LaurentScalar, Precision, UniformizerSpec

logger = logging.getLogger(__name__)


class Index:
    """Colored index ``(s_1, ..., s_n; xi_1, ..., xi_n)``."""

    _s: Tuple[int, ...]
    _xi: Tuple[GFElem, ...]

    @property
    def s(self) -> Tuple[int, ...]:
        """Exponents."""
        return self._s

    @property
    def xi(self) -> Tuple[GFElem, ...]:
        """Colors."""
        return self._xi

    @property
    def spec(self) -> FieldSpec:
        """Field holding the colors."""
        return self._xi[0].spec

    @property
    def wt(self) -> int:
        """Weight ``s_1 + ... + s_n``."""
        return sum(self._s)

    @property
    def dep(self) -> int:
        """Depth ``n``."""
        return len(self._s)

    def __init__(self, s: Sequence[int], xi: Sequence[GFElem]):
        """Create an index from its exponents and colors.

        Raises
        ------
        EmptyWordError
            The index is empty.
        ValueError
            Lengths differ or an exponent is not positive.
        InvalidFieldError
            A color is zero.
        """
        s, xi = tuple(int(x) for x in s), tuple(xi)
        if not s:
            raise EmptyWordError("an index needs at least one entry")
        if len(s) != len(xi):
            raise ValueError(f"{len(s)} exponents for {len(xi)} colors")
        if min(s) < 1:
            raise ValueError(f"exponents must be positive, got {s}")
        if any(x.spec != xi[0].spec for x in xi):
            raise FieldMismatchError("all colors must lie in the same field")
        if any(x.is_zero for x in xi):
            raise InvalidFieldError(xi[0].spec.p, "colors must be nonzero")
        self._s = s
        self._xi = xi

    @staticmethod
    def trivial(s: Sequence[int], spec: FieldSpec) -> "Index":
        """Index with every color equal to 1."""
        return Index(s, [spec.one] * len(s))

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, Index):
            return False
        return self.s == obj.s and self.xi == obj.xi

    def __hash__(self):
        """Hash of exponents and colors."""
        return hash((self._s, self._xi))

    def __repr__(self):
        """Python callable description."""
        return f"Index(s={self.s!r}, xi={self.xi!r})"

    def __getitem__(self, item: slice) -> "Index":
        """Sub-index."""
        return Index(self._s[item], self._xi[item])

    def reversed(self) -> "Index":
        """Index read from the last entry to the first."""
        return Index(self._s[::-1], self._xi[::-1])

    def color_product(self) -> GFElem:
        """``xi_1 ... xi_n``."""
        return functools.reduce(lambda a, b: a * b, self._xi)

    def to_json_dict(self) -> Mapping:
        """JSON description ``{field, s, xi}``, colors as coefficient vectors."""
        return {
            "field": self.spec.to_json_dict(),
            "s": list(self._s),
            "xi": [list(x.coeffs) for x in self._xi],
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "Index":
        """Inverse of :meth:`to_json_dict`."""
        spec = FieldSpec.from_json_dict(data["field"])
        return Index(data["s"], [GFElem.from_coeffs(spec, c) for c in data["xi"]])


def power_sum(ring: FunctionField, d: int, s: int) -> RatFuncExt:
    """``S_d(s)``, the sum of ``1/a^s`` over monic ``a`` of degree ``d``."""
    return ring.power_sum(d, s)


def twisted_power_sum(ring: FunctionField, d: int, s: int, xi: GFElem) -> RatFuncExt:
    """``S_d(s; xi) = xi^d S_d(s)``."""
    return ring.power_sum(d, s) * xi**d


@functools.lru_cache(maxsize=4096)
def nested_power_sum(ring: FunctionField, d: int, idx: Index) -> RatFuncExt:
    """``S_d(s; xi)``: sum over ``d = d_1 > d_2 > ... > d_n >= 0``.

    Zero when ``d < n - 1``.
    """
    if idx.spec != ring.spec:
        raise FieldMismatchError(f"colors of {idx} are not in {ring.spec}")
    if d < idx.dep - 1:
        return RatFuncExt.zero(ring.spec)
    head = twisted_power_sum(ring, d, idx.s[0], idx.xi[0])
    if idx.dep == 1:
        return head
    return head * power_sum_lt(ring, d, idx[1:])


@functools.lru_cache(maxsize=4096)
def power_sum_lt(ring: FunctionField, d: int, idx: Index) -> RatFuncExt:
    """``S_{<d}(s; xi)``, the sum of :func:`nested_power_sum` over degrees below ``d``."""
    if d <= 0:
        return RatFuncExt.zero(ring.spec)
    return power_sum_lt(ring, d - 1, idx) + nested_power_sum(ring, d - 1, idx)


def power_sum_le(ring: FunctionField, d: int, idx: Index) -> RatFuncExt:
    """``S_{<=d}``, the non-strict companion of :func:`power_sum_lt`."""
    return power_sum_lt(ring, d + 1, idx)


def certified_degree(ring: FunctionField, idx: Index) -> int:
    """``deg S_{n-1}(s_1) + ... + deg S_0(s_n)``, the degree of every CMZV with this index."""
    n = idx.dep
    return sum(ring.power_sum(n - 1 - k, s).degree for k, s in enumerate(idx.s))


def sum_cutoff(q: int, scale: int, prec: Precision) -> int:
    """Largest ``d`` with ``scale * (q + q^2 + ... + q^d) <= prec``.

    Every ``S_d(s)`` has degree at most ``-(q + ... + q^d)``, so the terms beyond the
    cutoff are below precision. At least ``d = 0`` is always kept.

    Raises
    ------
    BudgetExceededError
        The cutoff is above the configured limit.
    """
    limit = Configuration.current().max_cutoff_degree
    d, span = 0, 0
    while scale * (span + q ** (d + 1)) <= prec:
        d += 1
        span += q**d
        if d > limit:
            raise BudgetExceededError("The d-cutoff", d, limit)
    return d


class ZetaValue:
    """A colored multizeta value with its certificates."""

    _index: Index
    _value: LaurentScalar
    _certified_degree: int
    _d_cutoff: int
    _partial_sum: RatFuncExt

    @property
    def index(self) -> Index:
        """Index."""
        return self._index

    @property
    def value(self) -> LaurentScalar:
        """Value up to the requested precision."""
        return self._value

    @property
    def leading_degree(self) -> int:
        """Degree in ``theta`` of the computed value."""
        return int(self._value.degree_theta)

    @property
    def certified_degree(self) -> int:
        """Degree predicted by the leading power sums."""
        return self._certified_degree

    @property
    def d_cutoff(self) -> int:
        """Largest ``d`` included in the partial sum."""
        return self._d_cutoff

    @property
    def partial_sum(self) -> RatFuncExt:
        """Exact sum of the nested power sums up to the cutoff."""
        return self._partial_sum

    def __init__(
        self,
        index: Index,
        value: LaurentScalar,
        certified_degree: int,
        d_cutoff: int,
        partial_sum: RatFuncExt,
    ):
        """Create a ZetaValue."""
        self._index = index
        self._value = value
        self._certified_degree = certified_degree
        self._d_cutoff = d_cutoff
        self._partial_sum = partial_sum

    def __repr__(self):
        """Python callable description."""
        return (
            f"ZetaValue(index={self._index!r}, value={self._value!r}, "
            f"certified_degree={self._certified_degree!r}, d_cutoff={self._d_cutoff!r}, "
            f"partial_sum={self._partial_sum!r})"
        )

    def to_json_dict(self) -> Mapping:
        """JSON description of the value and its certificates."""
        return {
            "index": self._index.to_json_dict(),
            "value": self._value.to_json_dict(),
            "leading_degree": self.leading_degree,
            "certified_degree": self._certified_degree,
            "d_cutoff": self._d_cutoff,
        }


def cmzv(idx: Index, uspec: UniformizerSpec, prec: Precision) -> ZetaValue:
    """Colored multizeta value ``zeta_A(s; xi)`` up to ``v^prec``.

    Parameters
    ----------
    idx : Index
        Index with colors in the coefficient field of ``uspec``.
    uspec : UniformizerSpec
        Uniformizer the value is expanded in.
    prec : int
        Precision in v-exponents, at least 1.

    Returns
    -------
    ZetaValue
        The value, its leading degree and the degree certificate.

    Raises
    ------
    InsufficientPrecisionError
        The value has no nonzero digit up to ``prec``.
    BudgetExceededError
        The truncation needs more monics or a larger cutoff than configured.
    """
    if prec < 1:
        raise InsufficientPrecisionError(f"zeta{idx.s}", prec)
    value, cutoff, partial = zeta_series(idx, uspec, prec)
    if value.is_zero:
        raise InsufficientPrecisionError(f"zeta{idx.s}", prec)
    ring = function_field(uspec.q, uspec.field)
    return ZetaValue(idx, value, certified_degree(ring, idx), cutoff, partial)


def zeta_series(
    idx: Index, uspec: UniformizerSpec, prec: Precision
) -> Tuple[LaurentScalar, int, RatFuncExt]:
    """Truncated CMZV without the non-vanishing check.

    Returns
    -------
    tuple
        The v-expansion up to ``prec``, the d-cutoff and the exact partial sum.
    """
    if idx.spec != uspec.field:
        raise FieldMismatchError(f"colors of {idx} are not in {uspec.field}")
    ring = function_field(uspec.q, uspec.field)
    cutoff = sum_cutoff(uspec.q, uspec.scale, prec)
    partial = power_sum_lt(ring, cutoff + 1, idx)
    logger.debug("zeta%s summed up to d=%s at precision %s", idx.s, cutoff, prec)
    return to_laurent(partial, uspec, prec), cutoff, partial


def frobenius_power(idx: Index) -> Index:
    """Index ``(p s; xi^p)`` whose CMZV is the ``p``-th power of the CMZV of ``idx``."""
    p = idx.spec.p
    return Index([p * s for s in idx.s], [x**p for x in idx.xi])


def zeta_values(
    indices: Iterable[Index], uspec: UniformizerSpec, prec: Precision
) -> Tuple[ZetaValue, ...]:
    """:func:`cmzv` for several indices in order."""
    return tuple(cmzv(idx, uspec, prec) for idx in indices)
