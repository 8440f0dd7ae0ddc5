"""Finite field tower module.

Fields are built with the lexicographically least monic irreducible modulus so that
every run rebuilds bit-identical fields. All arithmetic is delegated to :mod:`galois`.
"""

import functools
import logging
import math
from typing import Iterable, Mapping, Optional, Sequence, Tuple

import galois
import numpy as np

from funcfield.multizeta.configuration import Configuration
from funcfield.multizeta.exceptions import FieldMismatchError, FieldSizeError, InvalidFieldError

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=None)
def _galois_field(p: int, e: int, modulus: Tuple[int, ...]):
    if e == 1:
        return galois.GF(p)
    irreducible = galois.Poly(list(modulus), field=galois.GF(p), order="asc")
    return galois.GF(p**e, irreducible_poly=irreducible)


def power_of(q: int, p: int) -> int:
    """Return ``m`` such that ``q == p**m``.

    Raises
    ------
    InvalidFieldError
        ``q`` is not a power of ``p``.
    """
    m, rest = 0, q
    while rest > 1 and rest % p == 0:
        rest //= p
        m += 1
    if rest != 1 or m == 0:
        raise InvalidFieldError(p, f"{q} is not a power of the characteristic")
    return m


class FieldSpec:
    """Finite field ``F_{p^e}`` presented as ``F_p[x]/(modulus)``.

    For ``e == 1`` the modulus is ``x`` and arithmetic is plain arithmetic modulo ``p``.
    """

    _p: int
    _e: int
    _modulus: Tuple[int, ...]

    @property
    def p(self) -> int:
        """Characteristic."""
        return self._p

    @property
    def e(self) -> int:
        """Extension degree over ``F_p``."""
        return self._e

    @property
    def modulus(self) -> Tuple[int, ...]:
        """Coefficients of the modulus, lowest degree first."""
        return self._modulus

    @property
    def order(self) -> int:
        """Number of elements."""
        return self._p**self._e

    @property
    def field(self):
        """:mod:`galois` field class implementing the arithmetic."""
        return _galois_field(self._p, self._e, self._modulus)

    @property
    def zero(self) -> "GFElem":
        """Additive identity."""
        return GFElem(self, 0)

    @property
    def one(self) -> "GFElem":
        """Multiplicative identity."""
        return GFElem(self, 1)

    def __init__(self, p: int, e: int, modulus: Sequence[int]):
        """Create a FieldSpec, checking that the modulus is monic irreducible of degree ``e``."""
        if not galois.is_prime(p):
            raise InvalidFieldError(p, "the characteristic must be prime")
        if e < 1:
            raise InvalidFieldError(p, "the extension degree must be positive")
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise InvalidFieldError(p, f"the modulus must be monic of degree {e}")
        polynomial = galois.Poly(list(modulus), field=galois.GF(p), order="asc")
        if e > 1 and not polynomial.is_irreducible():
            raise InvalidFieldError(p, f"{modulus} is reducible")
        self._p = p
        self._e = e
        self._modulus = modulus

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, FieldSpec):
            return False
        return self.p == obj.p and self.e == obj.e and self.modulus == obj.modulus

    def __hash__(self):
        """Hash of the defining data."""
        return hash((self._p, self._e, self._modulus))

    def __repr__(self):
        """Python callable description."""
        return f"FieldSpec(p={self.p!r}, e={self.e!r}, modulus={self.modulus!r})"

    def element(self, value) -> "GFElem":
        """Element from its integer representation or from a :mod:`galois` scalar."""
        return GFElem(self, int(value))

    def contains(self, q: int) -> bool:
        """Whether ``F_q`` is a subfield of this field."""
        try:
            return self.e % power_of(q, self.p) == 0
        except InvalidFieldError:
            return False

    def to_json_dict(self) -> Mapping:
        """JSON description ``{p, e, modulus}``."""
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}

    @staticmethod
    def from_json_dict(data: Mapping) -> "FieldSpec":
        """Inverse of :meth:`to_json_dict`."""
        return FieldSpec(data["p"], data["e"], data["modulus"])


class GFElem:
    """Element of a finite field described by a :class:`FieldSpec`.

    Integers combine with elements as elements of the prime field.
    """

    _spec: FieldSpec
    _value: int

    @property
    def spec(self) -> FieldSpec:
        """Field the element belongs to."""
        return self._spec

    @property
    def integer(self) -> int:
        """Integer representation, the coefficients read as base-``p`` digits."""
        return self._value

    @property
    def value(self):
        """The element as a :mod:`galois` scalar."""
        return self._spec.field(self._value)

    @property
    def coeffs(self) -> Tuple[int, ...]:
        """Coordinates over ``F_p`` in the power basis, lowest degree first."""
        return tuple(int(c) for c in self.value.vector()[::-1])

    @property
    def is_zero(self) -> bool:
        """Whether the element is zero."""
        return self._value == 0

    def __init__(self, spec: FieldSpec, value: int):
        """Create an element from its integer representation."""
        if not 0 <= value < spec.order:
            raise InvalidFieldError(spec.p, f"{value} is not an element of F_{spec.order}")
        self._spec = spec
        self._value = int(value)

    @staticmethod
    def from_coeffs(spec: FieldSpec, coeffs: Sequence[int]) -> "GFElem":
        """Element from its coordinates over ``F_p``, lowest degree first."""
        padded = list(coeffs) + [0] * (spec.e - len(coeffs))
        if len(padded) != spec.e:
            raise InvalidFieldError(spec.p, f"{len(coeffs)} coordinates for degree {spec.e}")
        return GFElem(spec, int(spec.field.Vector(padded[::-1])))

    def _coerce(self, other) -> "GFElem":
        if isinstance(other, GFElem):
            if other.spec != self.spec:
                raise FieldMismatchError(f"{other.spec} and {self.spec} differ")
            return other
        if isinstance(other, (int, np.integer)):
            return GFElem(self.spec, int(other) % self.spec.p)
        return NotImplemented

    def _wrap(self, value) -> "GFElem":
        return GFElem(self._spec, int(value))

    def __add__(self, other):
        """Field addition."""
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        """Field subtraction."""
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.value - other.value)

    def __rsub__(self, other):
        """Field subtraction with the element on the right."""
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(other.value - self.value)

    def __mul__(self, other):
        """Field multiplication."""
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.value * other.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Field division."""
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            raise ZeroDivisionError("division by zero in a finite field")
        return self._wrap(self.value / other.value)

    def __neg__(self):
        """Additive inverse."""
        return self._wrap(-self.value)

    def __pow__(self, exponent: int):
        """Power, negative exponents for nonzero elements."""
        if exponent < 0 and self.is_zero:
            raise ZeroDivisionError("zero has no inverse")
        if self.is_zero:
            return self if exponent else self.spec.one
        reduced = exponent % (self.spec.order - 1)
        return self._wrap(self.value**reduced)

    def __eq__(self, obj):
        """Test for equality."""
        if isinstance(obj, (int, np.integer)):
            obj = self._coerce(obj)
        if not isinstance(obj, GFElem):
            return False
        return self.spec == obj.spec and self.integer == obj.integer

    def __hash__(self):
        """Hash of the field and the integer representation."""
        return hash((self._spec, self._value))

    def __repr__(self):
        """Python callable description."""
        return f"GFElem({self.spec!r}, {self.integer!r})"

    def multiplicative_order(self) -> int:
        """Order in the multiplicative group."""
        if self.is_zero:
            raise ZeroDivisionError("zero has no multiplicative order")
        return int(self.value.multiplicative_order())

    def to_json_dict(self) -> Mapping:
        """JSON description: coefficient vector plus field descriptor."""
        return {"field": self.spec.to_json_dict(), "coeffs": list(self.coeffs)}

    @staticmethod
    def from_json_dict(data: Mapping) -> "GFElem":
        """Inverse of :meth:`to_json_dict`."""
        return GFElem.from_coeffs(FieldSpec.from_json_dict(data["field"]), data["coeffs"])


def build_field(p: int, e: int) -> FieldSpec:
    """Build ``F_{p^e}`` with the lexicographically least monic irreducible modulus.

    Parameters
    ----------
    p : int
        Prime characteristic.
    e : int
        Extension degree, at least one.

    Returns
    -------
    FieldSpec
        Deterministic description; repeated calls return equal specs.

    Raises
    ------
    InvalidFieldError
        ``p`` is not prime or ``e`` is not positive.
    FieldSizeError
        ``p**e`` is above the configured guard.
    """
    if not galois.is_prime(p):
        raise InvalidFieldError(p, "the characteristic must be prime")
    if e < 1:
        raise InvalidFieldError(p, "the extension degree must be positive")
    limit = Configuration.current().max_field_order
    if p**e > limit:
        raise FieldSizeError(p**e, limit)
    return _build_field(p, e)


@functools.lru_cache(maxsize=None)
def _build_field(p: int, e: int) -> FieldSpec:
    if e == 1:
        modulus = (0, 1)
    else:
        irreducible = galois.irreducible_poly(p, e, method="min")
        modulus = tuple(int(c) for c in irreducible.coeffs[::-1])
    logger.debug("Built F_%s^%s with modulus %s", p, e, modulus)
    return FieldSpec(p, e, modulus)


class Embedding:
    """Ring homomorphism ``F_{p^a} -> F_{p^b}`` for ``a`` dividing ``b``.

    The generator of the source is sent to the least root of the source modulus in the
    target, unless an image is given explicitly (used by :meth:`compose`).
    """

    _source: FieldSpec
    _target: FieldSpec
    _image: GFElem

    @property
    def source(self) -> FieldSpec:
        """Field embedded."""
        return self._source

    @property
    def target(self) -> FieldSpec:
        """Field receiving the image."""
        return self._target

    @property
    def image(self) -> GFElem:
        """Image of the class of ``x`` in the source."""
        return self._image

    def __init__(self, source: FieldSpec, target: FieldSpec, image: Optional[GFElem] = None):
        """Create the embedding of ``source`` into ``target``."""
        if source.p != target.p or target.e % source.e:
            raise FieldMismatchError(f"{source} does not embed into {target}")
        if image is None:
            modulus = galois.Poly(list(source.modulus), field=target.field, order="asc")
            image = target.element(min(int(root) for root in modulus.roots()))
        elif image.spec != target:
            raise FieldMismatchError(f"the image must lie in {target}")
        self._source = source
        self._target = target
        self._image = image

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, Embedding):
            return False
        return self.source == obj.source and self.target == obj.target and self.image == obj.image

    def __repr__(self):
        """Python callable description."""
        return (
            f"Embedding(source={self.source!r}, target={self.target!r}, image={self.image!r})"
        )

    def __call__(self, x: GFElem) -> GFElem:
        """Image of ``x``."""
        return embed(x, self)

    def compose(self, other: "Embedding") -> "Embedding":
        """Embedding ``other o self``."""
        if other.source != self.target:
            raise FieldMismatchError(f"cannot compose through {self.target} and {other.source}")
        return Embedding(self.source, other.target, other(self.image))


def embed(x: GFElem, emb: Embedding) -> GFElem:
    """Image of ``x`` under ``emb``.

    Raises
    ------
    FieldMismatchError
        ``x`` does not belong to the source of the embedding.
    """
    if x.spec != emb.source:
        raise FieldMismatchError(f"{x} is not an element of {emb.source}")
    if emb.source == emb.target:
        return x
    polynomial = galois.Poly(list(x.coeffs), field=emb.target.field, order="asc")
    return emb.target.element(polynomial(emb.image.value))


def qtwist(x: GFElem, q: int, n: int) -> GFElem:
    """Frobenius twist ``x^(q^n)``; negative ``n`` uses the inverse Frobenius.

    Raises
    ------
    InvalidFieldError
        ``q`` is not a power of the characteristic of ``x``.
    """
    k = (power_of(q, x.spec.p) * n) % x.spec.e
    return x ** (x.spec.p**k)


@functools.lru_cache(maxsize=None)
def canonical_generator(spec: FieldSpec) -> GFElem:
    """Least generator of the multiplicative group, in integer representation order."""
    group_order = spec.order - 1
    field = spec.field
    for value in range(1, spec.order):
        if int(field(value).multiplicative_order()) == group_order:
            return GFElem(spec, value)
    raise InvalidFieldError(spec.p, "no generator found")  # pragma: no cover


def discrete_log(x: GFElem, base: Optional[GFElem] = None) -> int:
    """Discrete logarithm with respect to ``base`` (the canonical generator by default)."""
    if x.is_zero:
        raise ZeroDivisionError("zero has no discrete logarithm")
    base = canonical_generator(x.spec) if base is None else base
    if x.spec.order == 2:
        return 0
    return int(x.value.log(base.value))


def subfield(spec: FieldSpec, q: int) -> np.ndarray:
    """Integer representations of the elements of ``F_q`` inside ``spec``, ascending."""
    m = power_of(q, spec.p)
    if spec.e % m:
        raise FieldMismatchError(f"F_{q} is not a subfield of F_{spec.order}")
    if q == spec.p:
        return np.arange(spec.p, dtype=np.int64)
    step = (spec.order - 1) // (q - 1)
    root = canonical_generator(spec) ** step
    powers = [(root**i).integer for i in range(q - 1)]
    return np.array(sorted([0] + powers), dtype=np.int64)


def color_field(q: int, r: int, p: Optional[int] = None) -> FieldSpec:
    """``F_{q^r}``, the field holding level-``r`` colors."""
    p = p if p is not None else characteristic(q)
    return build_field(p, power_of(q, p) * r)


def characteristic(q: int) -> int:
    """Least prime dividing ``q``."""
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    raise InvalidFieldError(q, "q must be at least 2")


def _root_in(xi: GFElem, q: int, r: int, home: FieldSpec) -> Optional[GFElem]:
    if not home.contains(q**r):
        raise FieldMismatchError(f"F_{home.order} does not contain F_{q ** r}")
    x = xi if xi.spec == home else Embedding(xi.spec, home)(xi)
    exponent = q**r - 1
    log = discrete_log(x**r)
    if log % exponent:
        return None
    return canonical_generator(home) ** (log // exponent)


def solve_mu(
    xi: GFElem, q: int, r: int, home: Optional[FieldSpec] = None
) -> Tuple[GFElem, FieldSpec]:
    """Root ``mu`` of ``mu^(q^r - 1) = xi^r`` with the least discrete logarithm.

    Parameters
    ----------
    xi : GFElem
        Nonzero element of ``F_{q^r}``.
    q : int
        Size of the constant field.
    r : int
        Level.
    home : FieldSpec, optional
        Field to solve in. By default the fields ``F_{q^(r m)}`` are searched for
        ``m = 1, 2, ...`` and the first one holding a root is used.

    Returns
    -------
    tuple
        The root and the field it lives in.

    Raises
    ------
    InvalidFieldError
        ``xi`` is zero or not in ``F_{q^r}``, or ``home`` holds no root.
    """
    p = xi.spec.p
    if xi.is_zero or qtwist(xi, q, r) != xi:
        raise InvalidFieldError(p, f"{xi} is not a nonzero element of F_{q ** r}")
    if home is not None:
        mu = _root_in(xi, q, r, home)
        if mu is None:
            raise InvalidFieldError(p, f"no (q^{r}-1)-th root of xi^{r} in F_{home.order}")
        return mu, home
    level = power_of(q, p) * r
    m = 1
    while True:
        target = build_field(p, math.lcm(xi.spec.e, level * m))
        mu = _root_in(xi, q, r, target)
        if mu is not None:
            logger.debug("Solved mu for %s in F_%s", xi, target.order)
            return mu, target
        m += 1


def common_field(q: int, r: int, colors: Iterable[GFElem]) -> Tuple[FieldSpec, Embedding]:
    """Working field holding the colors of ``F_{q^r}`` and every ``mu`` they require.

    Returns
    -------
    tuple
        The working field ``W = F_{q^(r M)}`` and the embedding of the color field into it.
    """
    colors = list(colors)
    source = colors[0].spec if colors else color_field(q, r)
    multiple = 1
    for xi in colors:
        if xi.spec != source:
            raise FieldMismatchError("all colors must come from the same field")
        _, home = solve_mu(xi, q, r)
        multiple = math.lcm(multiple, home.e // source.e)
    working = build_field(source.p, source.e * multiple)
    logger.debug("Working field F_%s for %d colors", working.order, len(colors))
    return working, Embedding(source, working)
