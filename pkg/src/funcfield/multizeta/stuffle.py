"""Sum-shuffle (stuffle) products of colored indices and their verification.

Two products are provided. :func:`graded_product` expands ``S_d(a) S_d(b)`` for every
``d``; :func:`stuffle_product` expands ``S_{<d}(a) S_{<d}(b)`` for every ``d`` and hence
the product of the colored multizeta values.
"""

import functools
import logging
import math
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from funcfield.multizeta.exceptions import EmptyWordError, FieldMismatchError
from funcfield.multizeta.gf import GFElem, characteristic, discrete_log
from funcfield.multizeta.powersum import (
    Index,
    nested_power_sum,
    power_sum_lt,
    zeta_series,
)
from funcfield.multizeta.ringa import FunctionField, RatFuncExt, function_field
from funcfield.multizeta.scalars import LaurentScalar, Precision, UniformizerSpec

logger = logging.getLogger(__name__)

Word = Index
"""Relation letters are the entries of an :class:`Index`."""

Letter = Tuple[int, GFElem]
WordKey = Tuple[Letter, ...]

PARTIAL = "partial"
"""Level of identities between partial sums ``S_{<d}``, hence between CMZVs."""

GRADED = "graded"
"""Level of identities between the nested power sums ``S_d``."""


def _letters(word: Union[Index, Iterable[Letter]]) -> WordKey:
    if isinstance(word, Index):
        return tuple(zip(word.s, word.xi))
    return tuple((int(s), x) for s, x in word)


@functools.lru_cache(maxsize=None)
def _color_key(x: GFElem) -> int:
    return discrete_log(x)


def _sort_key(word: WordKey):
    return (len(word), tuple(s for s, _ in word), tuple(_color_key(x) for _, x in word))


def binomial_mod(n: int, k: int, p: int) -> int:
    """``C(n, k) mod p`` by Lucas' theorem."""
    if k < 0 or k > n:
        return 0
    result = 1
    while n or k:
        n, n_digit = divmod(n, p)
        k, k_digit = divmod(k, p)
        if k_digit > n_digit:
            return 0
        result = result * math.comb(n_digit, k_digit) % p
    return result


def chen_delta(s1: int, s2: int, j: int, p: int) -> int:
    """``(-1)^(s1-1) C(j-1, s1-1) + (-1)^(s2-1) C(j-1, s2-1)`` reduced mod ``p``.

    Raises
    ------
    ValueError
        ``j`` is not in ``0 < j < s1 + s2``.
    """
    if not 0 < j < s1 + s2:
        raise ValueError(f"j={j} is outside 0 < j < {s1 + s2}")
    first = (-1) ** (s1 - 1) * binomial_mod(j - 1, s1 - 1, p)
    second = (-1) ** (s2 - 1) * binomial_mod(j - 1, s2 - 1, p)
    return (first + second) % p


class FormalSum:
    """``F_p``-linear combination of words, with no zero coefficient stored.

    Iteration yields ``(Index, coefficient)`` pairs ordered by depth, exponents and
    discrete logarithms of the colors.
    """

    _q: int
    _p: int
    _terms: Dict[WordKey, int]

    @property
    def q(self) -> int:
        """Size of the constant field the product rule depends on."""
        return self._q

    @property
    def p(self) -> int:
        """Characteristic; coefficients are residues mod ``p``."""
        return self._p

    @property
    def is_zero(self) -> bool:
        """Whether no term is left."""
        return not self._terms

    def __init__(
        self,
        q: int,
        terms: Union[Mapping, Iterable[Tuple[Union[Index, WordKey], int]]] = (),
    ):
        """Create a formal sum from ``(word, coefficient)`` pairs; repeated words add up."""
        self._q = q
        self._p = characteristic(q)
        items = terms.items() if isinstance(terms, Mapping) else terms
        accumulated: Dict[WordKey, int] = {}
        for word, coefficient in items:
            key = _letters(word)
            accumulated[key] = (accumulated.get(key, 0) + int(coefficient)) % self._p
        self._terms = {key: c for key, c in accumulated.items() if c}

    def _keys(self) -> List[WordKey]:
        return sorted(self._terms, key=_sort_key)

    def __iter__(self) -> Iterator[Tuple[Index, int]]:
        """Terms in canonical order."""
        for key in self._keys():
            yield Index([s for s, _ in key], [x for _, x in key]), self._terms[key]

    def __len__(self):
        """Number of terms."""
        return len(self._terms)

    def coefficient(self, word: Union[Index, WordKey]) -> int:
        """Coefficient of ``word``, 0 when absent."""
        return self._terms.get(_letters(word), 0)

    def _check(self, other: "FormalSum") -> None:
        if other.q != self.q:
            raise FieldMismatchError(f"formal sums for q={self.q} and q={other.q}")

    def __add__(self, other):
        """Sum."""
        if not isinstance(other, FormalSum):
            return NotImplemented
        self._check(other)
        return FormalSum(self._q, [*self._terms.items(), *other._terms.items()])

    def __neg__(self):
        """Additive inverse."""
        return FormalSum(self._q, [(key, -c) for key, c in self._terms.items()])

    def __sub__(self, other):
        """Difference."""
        if not isinstance(other, FormalSum):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        """Scalar multiple, or bilinear extension of :func:`stuffle_product`."""
        if isinstance(other, int):
            return FormalSum(self._q, [(key, c * other) for key, c in self._terms.items()])
        if not isinstance(other, FormalSum):
            return NotImplemented
        self._check(other)
        result = FormalSum(self._q)
        for x, a in self._terms.items():
            for y, b in other._terms.items():
                result = result + _harmonic(self._q, x, y) * (a * b)
        return result

    def __rmul__(self, other):
        """Scalar multiple."""
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, FormalSum):
            return False
        return self._q == obj._q and self._terms == obj._terms

    __hash__ = None

    def __repr__(self):
        """Python callable description."""
        return f"FormalSum(q={self._q!r}, terms={tuple(self)!r})"

    def prefixed(self, letter: Letter) -> "FormalSum":
        """Every word with ``letter`` put in front."""
        return FormalSum(self._q, [((letter, *key), c) for key, c in self._terms.items()])

    def evaluate(self, ring: FunctionField, d: int, level: str = PARTIAL) -> RatFuncExt:
        """``sum f_w S_{<d}(w)`` at the partial level, ``sum f_w S_d(w)`` at the graded one."""
        total = RatFuncExt.zero(ring.spec)
        for word, coefficient in self:
            if level == GRADED:
                total = total + nested_power_sum(ring, d, word) * coefficient
            else:
                total = total + power_sum_lt(ring, d, word) * coefficient
        return total

    def to_json_dict(self) -> Mapping:
        """JSON description ``{q, terms: [{coeff, index}]}``."""
        return {
            "q": self._q,
            "terms": [{"coeff": c, "index": word.to_json_dict()} for word, c in self],
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "FormalSum":
        """Inverse of :meth:`to_json_dict`."""
        return FormalSum(
            data["q"], [(Index.from_json_dict(t["index"]), t["coeff"]) for t in data["terms"]]
        )


def depth1_product(s1: int, xi1: GFElem, s2: int, xi2: GFElem, q: int) -> FormalSum:
    """Expansion of ``S_d(s1; xi1) S_d(s2; xi2)`` valid for every ``d``.

    The correction terms carry ``(s1 + s2 - j, j; xi1 xi2, 1)`` for ``0 < j < s1 + s2``
    with ``(q - 1) | j``.
    """
    color = xi1 * xi2
    weight = s1 + s2
    p = characteristic(q)
    terms = [(((weight, color),), 1)]
    for j in range(q - 1, weight, q - 1):
        coefficient = chen_delta(s1, s2, j, p)
        if coefficient:
            terms.append((((weight - j, color), (j, color.spec.one)), coefficient))
    return FormalSum(q, terms)


@functools.lru_cache(maxsize=None)
def _harmonic(q: int, x: WordKey, y: WordKey) -> FormalSum:
    if not x:
        return FormalSum(q, [(y, 1)])
    if not y:
        return FormalSum(q, [(x, 1)])
    return (
        _harmonic(q, x[1:], y).prefixed(x[0])
        + _harmonic(q, x, y[1:]).prefixed(y[0])
        + _graded(q, x, y)
    )


@functools.lru_cache(maxsize=None)
def _graded(q: int, x: WordKey, y: WordKey) -> FormalSum:
    (s1, xi1), (s2, xi2) = x[0], y[0]
    tails = _harmonic(q, x[1:], y[1:])
    result = FormalSum(q)
    for word, coefficient in depth1_product(s1, xi1, s2, xi2, q)._terms.items():
        if len(word) == 1:
            result = result + tails.prefixed(word[0]) * coefficient
        else:
            spread = FormalSum(q)
            for tail, c in tails._terms.items():
                spread = spread + _harmonic(q, word[1:], tail) * c
            result = result + spread.prefixed(word[0]) * coefficient
    return result


def _check_words(a: Index, b: Index) -> Tuple[WordKey, WordKey]:
    if not isinstance(a, Index) or not isinstance(b, Index):
        raise EmptyWordError("both factors must be nonempty indices")
    if a.spec != b.spec:
        raise FieldMismatchError(f"colors of {a} and {b} lie in different fields")
    return _letters(a), _letters(b)


def stuffle_product(a: Index, b: Index, q: int) -> FormalSum:
    """Expansion of ``S_{<d}(a) S_{<d}(b)`` valid for every ``d``, hence of ``zeta(a) zeta(b)``."""
    x, y = _check_words(a, b)
    return _harmonic(q, x, y)


def graded_product(a: Index, b: Index, q: int) -> FormalSum:
    """Expansion of ``S_d(a) S_d(b)`` valid for every ``d``."""
    x, y = _check_words(a, b)
    return _graded(q, x, y)


class Relation:
    """Identity ``lhs[0] * lhs[1] = rhs`` at the partial or the graded level."""

    _lhs: Tuple[Index, Index]
    _rhs: FormalSum
    _level: str

    @property
    def lhs(self) -> Tuple[Index, Index]:
        """The two factors."""
        return self._lhs

    @property
    def rhs(self) -> FormalSum:
        """Expansion of the product."""
        return self._rhs

    @property
    def level(self) -> str:
        """``"partial"`` for ``S_{<d}`` (and CMZV) identities, ``"graded"`` for ``S_d`` ones."""
        return self._level

    def __init__(self, lhs: Tuple[Index, Index], rhs: FormalSum, level: str = PARTIAL):
        """Create a relation."""
        if level not in (PARTIAL, GRADED):
            raise ValueError(f'level must be "{PARTIAL}" or "{GRADED}", got "{level}"')
        self._lhs = tuple(lhs)
        self._rhs = rhs
        self._level = level

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, Relation):
            return False
        return self.lhs == obj.lhs and self.rhs == obj.rhs and self.level == obj.level

    __hash__ = None

    def __repr__(self):
        """Python callable description."""
        return f"Relation(lhs={self.lhs!r}, rhs={self.rhs!r}, level={self.level!r})"

    def violations(self) -> List[str]:
        """Conservation laws broken by some term: weight, color product or depth."""
        a, b = self._lhs
        weight = a.wt + b.wt
        color = a.color_product() * b.color_product()
        depth = a.dep + b.dep
        found = []
        for word, _ in self._rhs:
            if word.wt != weight:
                found.append(f"weight of {word.s} is not {weight}")
            if word.color_product() != color:
                found.append(f"color product of {word.s} differs")
            if word.dep > depth:
                found.append(f"depth of {word.s} exceeds {depth}")
        return found

    def to_json_dict(self) -> Mapping:
        """JSON description ``{a, b, rhs, level}``."""
        return {
            "a": self._lhs[0].to_json_dict(),
            "b": self._lhs[1].to_json_dict(),
            "rhs": self._rhs.to_json_dict(),
            "level": self._level,
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "Relation":
        """Inverse of :meth:`to_json_dict`."""
        lhs = (Index.from_json_dict(data["a"]), Index.from_json_dict(data["b"]))
        return Relation(lhs, FormalSum.from_json_dict(data["rhs"]), data["level"])


def zeta_relation(a: Index, b: Index, q: int) -> Relation:
    """``zeta(a) zeta(b) = sum f_w zeta(w)`` from :func:`stuffle_product`."""
    return Relation((a, b), stuffle_product(a, b, q), PARTIAL)


def graded_relation(a: Index, b: Index, q: int) -> Relation:
    """``S_d(a) S_d(b) = sum f_w S_d(w)`` from :func:`graded_product`."""
    return Relation((a, b), graded_product(a, b, q), GRADED)


class RelationReport:
    """Outcome of :func:`verify_relation`."""

    _relation: Relation
    _d_max: int
    _prec: Precision
    _exact_failure: Optional[int]
    _numeric_mismatch: Optional[int]

    @property
    def relation(self) -> Relation:
        """Relation checked."""
        return self._relation

    @property
    def passed(self) -> bool:
        """Whether both the exact and the numeric checks passed."""
        return self._exact_failure is None and self._numeric_mismatch is None

    @property
    def exact_failure(self) -> Optional[int]:
        """First ``d`` where the rational-function identity fails."""
        return self._exact_failure

    @property
    def numeric_mismatch(self) -> Optional[int]:
        """First v-exponent where the CMZV identity fails."""
        return self._numeric_mismatch

    def __init__(
        self,
        relation: Relation,
        d_max: int,
        prec: Precision,
        exact_failure: Optional[int],
        numeric_mismatch: Optional[int],
    ):
        """Create a report."""
        self._relation = relation
        self._d_max = d_max
        self._prec = prec
        self._exact_failure = exact_failure
        self._numeric_mismatch = numeric_mismatch

    def to_json_dict(self) -> Mapping:
        """JSON description of the verdict."""
        return {
            "status": "pass" if self.passed else "fail",
            "d_max": self._d_max,
            "prec": self._prec,
            "exact_failure_d": self._exact_failure,
            "numeric_mismatch_exponent": self._numeric_mismatch,
        }


def verify_relation(
    rel: Relation, uspec: UniformizerSpec, prec: Precision, d_max: int
) -> RelationReport:
    """Check a relation exactly on power sums and numerically on CMZVs.

    The exact check runs over ``d = 1..d_max + 1`` for partial sums and ``d = 0..d_max``
    for graded ones. The numeric check compares ``zeta(a) zeta(b)`` with the right-hand
    side up to ``prec`` and only applies at the partial level.
    """
    a, b = rel.lhs
    if a.spec != uspec.field:
        raise FieldMismatchError(f"colors of {a} are not in {uspec.field}")
    ring = function_field(uspec.q, uspec.field)
    exact_failure = None
    degrees = range(1, d_max + 2) if rel.level == PARTIAL else range(0, d_max + 1)
    for d in degrees:
        if rel.level == PARTIAL:
            left = power_sum_lt(ring, d, a) * power_sum_lt(ring, d, b)
        else:
            left = nested_power_sum(ring, d, a) * nested_power_sum(ring, d, b)
        if left != rel.rhs.evaluate(ring, d, rel.level):
            exact_failure = d
            break
    numeric_mismatch = None
    if rel.level == PARTIAL:
        product = zeta_series(a, uspec, prec)[0] * zeta_series(b, uspec, prec)[0]
        total = LaurentScalar.zero(uspec, prec)
        for word, coefficient in rel.rhs:
            total = total + zeta_series(word, uspec, prec)[0] * coefficient
        numeric_mismatch = product.first_mismatch(total)
    report = RelationReport(rel, d_max, prec, exact_failure, numeric_mismatch)
    if not report.passed:
        logger.warning("Relation %s fails: %s", rel, report.to_json_dict())
    return report
