"""Search for ``F_p``-linear relations among monomials of colored multizeta values.

Every monomial is expanded in ``v`` and each digit, an element of the working field, is
written over ``F_p``. Relations are the left kernel of the resulting digit matrix. A
relation found at one precision is only reported once it survives at twice the
precision; kernel vectors that do not are kept apart as precision artifacts.
"""

import functools
import itertools
import logging
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from funcfield.multizeta.configuration import Configuration
from funcfield.multizeta.exceptions import BudgetExceededError, InsufficientPrecisionError
from funcfield.multizeta.gf import GFElem, build_field, discrete_log, subfield
from funcfield.multizeta.powersum import Index, zeta_series
from funcfield.multizeta.scalars import LaurentScalar, Precision, UniformizerSpec
from funcfield.multizeta.stuffle import stuffle_product

logger = logging.getLogger(__name__)

Monomial = Tuple[Tuple[Index, int], ...]
"""Product of CMZVs as sorted ``(index, exponent)`` pairs."""


def _index_key(idx: Index):
    return idx.wt, idx.dep, idx.s, tuple(discrete_log(x) for x in idx.xi)


def make_monomial(factors: Mapping[Index, int]) -> Monomial:
    """Canonical monomial from exponents by index; zero exponents are dropped."""
    return tuple(sorted(((i, e) for i, e in factors.items() if e), key=lambda f: _index_key(f[0])))


def monomial_weight(monomial: Monomial) -> int:
    """Total weight ``sum e_i wt(s_i)``."""
    return sum(idx.wt * e for idx, e in monomial)


def monomial_json(monomial: Monomial) -> List[Mapping]:
    """JSON description as a list of ``{index, exponent}``."""
    return [{"index": idx.to_json_dict(), "exponent": e} for idx, e in monomial]


def monomial_label(monomial: Monomial) -> str:
    """Short text such as ``zeta(1;1)^2*zeta(2;1)``, colors by integer representation."""
    parts = []
    for idx, e in monomial:
        s = ",".join(str(x) for x in idx.s)
        xi = ",".join(str(x.integer) for x in idx.xi)
        parts.append(f"zeta({s};{xi})" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


class MonomialBasis:
    """Ordered list of monomials whose values are mined for relations."""

    _monomials: Tuple[Monomial, ...]
    _uspec: UniformizerSpec
    _depth_max: int

    @property
    def monomials(self) -> Tuple[Monomial, ...]:
        """Monomials in mining order."""
        return self._monomials

    @property
    def uspec(self) -> UniformizerSpec:
        """Uniformizer the values are expanded in."""
        return self._uspec

    @property
    def depth_max(self) -> int:
        """Largest depth of an index."""
        return self._depth_max

    @property
    def weights(self) -> Tuple[int, ...]:
        """Distinct total weights, ascending."""
        return tuple(sorted({monomial_weight(m) for m in self._monomials}))

    @property
    def weight(self) -> int:
        """Total weight shared by every monomial."""
        weights = self.weights
        if len(weights) != 1:
            raise ValueError(f"the basis mixes the weights {weights}")
        return weights[0]

    def __init__(self, monomials: Sequence[Monomial], uspec: UniformizerSpec, depth_max: int):
        """Create a basis; repeated monomials are kept once."""
        self._monomials = tuple(dict.fromkeys(monomials))
        self._uspec = uspec
        self._depth_max = depth_max

    def __len__(self):
        """Number of monomials."""
        return len(self._monomials)

    def __iter__(self) -> Iterator[Monomial]:
        """Monomials in order."""
        return iter(self._monomials)

    def __getitem__(self, position: int) -> Monomial:
        """Monomial at ``position``."""
        return self._monomials[position]

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, MonomialBasis):
            return False
        return (
            self._monomials == obj._monomials
            and self._uspec == obj._uspec
            and self._depth_max == obj._depth_max
        )

    def __repr__(self):
        """Python callable description."""
        return (
            f"MonomialBasis({list(self._monomials)!r}, uspec={self._uspec!r}, "
            f"depth_max={self._depth_max!r})"
        )

    def position(self, monomial: Monomial) -> Optional[int]:
        """Position of ``monomial``, None if absent."""
        try:
            return self._monomials.index(monomial)
        except ValueError:
            return None

    def union(self, other: "MonomialBasis") -> "MonomialBasis":
        """This basis followed by the monomials of ``other``."""
        return MonomialBasis(
            self._monomials + other._monomials, self._uspec, max(self._depth_max, other._depth_max)
        )

    def restricted(self, weight: int) -> "MonomialBasis":
        """Monomials of one total weight."""
        chosen = [m for m in self._monomials if monomial_weight(m) == weight]
        return MonomialBasis(chosen, self._uspec, self._depth_max)

    def to_json_dict(self) -> Mapping:
        """JSON description."""
        return {
            "uniformizer": self._uspec.to_json_dict(),
            "depth_max": self._depth_max,
            "monomials": [monomial_json(m) for m in self._monomials],
        }


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    if parts == 0:
        return
    for head in range(1, total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head, *rest)


def default_colors(uspec: UniformizerSpec, r: int = 1) -> List[GFElem]:
    """Nonzero elements of ``F_{q^r}`` inside the coefficient field."""
    return [GFElem(uspec.field, int(x)) for x in subfield(uspec.field, uspec.q**r) if x]


def enumerate_monomials(
    w: int,
    depth_max: int,
    uspec: UniformizerSpec,
    r: int = 1,
    colors: Optional[Sequence[GFElem]] = None,
) -> MonomialBasis:
    """Monomials of total weight ``w`` in CMZVs of depth at most ``depth_max``.

    Parameters
    ----------
    w : int
        Total weight, at least 1.
    depth_max : int
        Largest depth of an index.
    uspec : UniformizerSpec
        Uniformizer; its coefficient field holds the colors.
    r : int, optional
        Level; the colors default to every nonzero element of ``F_{q^r}``.
    colors : sequence of GFElem, optional
        Colors to use instead.

    Raises
    ------
    BudgetExceededError
        More monomials than the configured enumeration limit.
    """
    if w < 1:
        raise ValueError(f"the weight must be positive, got {w}")
    colors = default_colors(uspec, r) if colors is None else list(colors)
    limit = Configuration.current().max_monic_count
    indices = []
    for k in range(1, w + 1):
        for s in _compositions(k, depth_max):
            for xi in itertools.product(colors, repeat=len(s)):
                indices.append(Index(s, xi))
    indices.sort(key=_index_key)

    monomials: List[Monomial] = []

    def extend(start: int, remaining: int, chosen: Dict[Index, int]) -> None:
        if remaining == 0:
            monomials.append(make_monomial(chosen))
            if len(monomials) > limit:
                what = f"Enumerating weight-{w} monomials"
                raise BudgetExceededError(what, len(monomials), limit)
            return
        for position in range(start, len(indices)):
            idx = indices[position]
            if idx.wt > remaining:
                continue
            chosen[idx] = chosen.get(idx, 0) + 1
            extend(position, remaining - idx.wt, chosen)
            chosen[idx] -= 1

    extend(0, w, {})
    logger.debug("%d monomials of weight %d from %d indices", len(monomials), w, len(indices))
    return MonomialBasis(monomials, uspec, depth_max)


def monomial_value(monomial: Monomial, uspec: UniformizerSpec, prec: Precision) -> LaurentScalar:
    """Value of the monomial up to ``prec``."""
    value = LaurentScalar.constant(uspec)
    for idx, e in monomial:
        value = value * _zeta(idx, uspec, prec) ** e
    return value.truncate(prec)


@functools.lru_cache(maxsize=1024)
def _zeta(idx: Index, uspec: UniformizerSpec, prec: Precision) -> LaurentScalar:
    return zeta_series(idx, uspec, prec)[0]


def digit_matrix(basis: MonomialBasis, prec: Precision):
    """Rows of ``F_p``-coordinates of the digits of every monomial up to ``prec``.

    The window starts at the lowest valuation found in the basis.

    Raises
    ------
    InsufficientPrecisionError
        No digit of any monomial is known at this precision.
    """
    uspec = basis.uspec
    values = [monomial_value(m, uspec, prec) for m in basis]
    known = [v.valuation for v in values if not v.is_zero]
    if not known:
        raise InsufficientPrecisionError("Separating the monomials", prec)
    start = min(known)
    rows = [v.dense(start, prec).vector().reshape(-1) for v in values]
    prime = build_field(uspec.p, 1).field
    return prime(np.array([np.asarray(row, dtype=np.int64) for row in rows]))


def _kernel(basis: MonomialBasis, prec: Precision):
    kernel = digit_matrix(basis, prec).left_null_space()
    if kernel.shape[0] == 0:
        return kernel
    return kernel.row_reduce()


def _in_span(rows, vector) -> bool:
    if rows.shape[0] == 0:
        return not np.any(vector)
    stacked = type(rows)(np.vstack([np.asarray(rows), np.asarray(vector)]))
    return np.linalg.matrix_rank(stacked) == np.linalg.matrix_rank(rows)


class RelationCandidate:
    """``F_p``-linear relation among the monomials of a basis."""

    def __init__(
        self,
        basis: MonomialBasis,
        coefficients: Sequence[int],
        discovery_prec: Precision,
        confirmation_prec: Optional[Precision] = None,
    ):
        """Create a candidate; ``confirmation_prec`` is set once it held there."""
        p = basis.uspec.p
        self._basis = basis
        self._coefficients = tuple(int(c) % p for c in coefficients)
        self._discovery_prec = discovery_prec
        self._confirmation_prec = confirmation_prec

    @property
    def basis(self) -> MonomialBasis:
        """Basis the coefficients refer to."""
        return self._basis

    @property
    def coefficients(self) -> Tuple[int, ...]:
        """Coefficient of each monomial, residues mod ``p``."""
        return self._coefficients

    @property
    def discovery_prec(self) -> Precision:
        """Precision the relation was found at."""
        return self._discovery_prec

    @property
    def confirmation_prec(self) -> Optional[Precision]:
        """Precision the relation was confirmed at, None if it was not."""
        return self._confirmation_prec

    @property
    def confirmed(self) -> bool:
        """Whether the relation held at the confirmation precision."""
        return self._confirmation_prec is not None

    def support(self) -> List[Tuple[int, Monomial]]:
        """``(coefficient, monomial)`` for the nonzero coefficients."""
        return [(c, m) for c, m in zip(self._coefficients, self._basis) if c]

    def weights(self) -> Tuple[int, ...]:
        """Total weights of the supporting monomials."""
        return tuple(sorted({monomial_weight(m) for _, m in self.support()}))

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, RelationCandidate):
            return False
        return (
            self._basis == obj._basis
            and self._coefficients == obj._coefficients
            and self._discovery_prec == obj._discovery_prec
            and self._confirmation_prec == obj._confirmation_prec
        )

    def __repr__(self):
        """Python callable description."""
        return (
            f"RelationCandidate({self._basis!r}, {list(self._coefficients)!r}, "
            f"discovery_prec={self._discovery_prec!r}, "
            f"confirmation_prec={self._confirmation_prec!r})"
        )

    def __str__(self):
        """Relation as text."""
        terms = [f"{c}*{monomial_label(m)}" for c, m in self.support()]
        return " + ".join(terms) + " = 0"

    def to_json_dict(self) -> Mapping:
        """JSON description with the supporting monomials."""
        return {
            "relation": str(self),
            "support": [
                {"coefficient": c, "monomial": monomial_json(m)} for c, m in self.support()
            ],
            "weights": list(self.weights()),
            "discovery_prec": self._discovery_prec,
            "confirmation_prec": self._confirmation_prec,
            "confirmed": self.confirmed,
        }


class MiningResult:
    """Relations confirmed at doubled precision and the kernel vectors that were not."""

    def __init__(
        self,
        basis: MonomialBasis,
        relations: Sequence[RelationCandidate],
        artifacts: Sequence[RelationCandidate],
        discovery_prec: Precision,
        confirmation_prec: Precision,
    ):
        """Create a result."""
        self._basis = basis
        self._relations = tuple(relations)
        self._artifacts = tuple(artifacts)
        self._discovery_prec = discovery_prec
        self._confirmation_prec = confirmation_prec

    @property
    def basis(self) -> MonomialBasis:
        """Mined basis."""
        return self._basis

    @property
    def relations(self) -> Tuple[RelationCandidate, ...]:
        """Row-reduced basis of the confirmed relations."""
        return self._relations

    @property
    def artifacts(self) -> Tuple[RelationCandidate, ...]:
        """Kernel vectors at the discovery precision outside the confirmed span."""
        return self._artifacts

    @property
    def discovery_prec(self) -> Precision:
        """Precision of the first kernel computation."""
        return self._discovery_prec

    @property
    def confirmation_prec(self) -> Precision:
        """Precision of the confirming kernel computation."""
        return self._confirmation_prec

    def __repr__(self):
        """Python callable description."""
        return (
            f"MiningResult({self._basis!r}, relations={list(self._relations)!r}, "
            f"artifacts={list(self._artifacts)!r}, discovery_prec={self._discovery_prec!r}, "
            f"confirmation_prec={self._confirmation_prec!r})"
        )

    def to_json_dict(self) -> Mapping:
        """JSON description."""
        return {
            "basis_size": len(self._basis),
            "weights": list(self._basis.weights),
            "discovery_prec": self._discovery_prec,
            "confirmation_prec": self._confirmation_prec,
            "relations": [c.to_json_dict() for c in self._relations],
            "artifacts": [c.to_json_dict() for c in self._artifacts],
        }

    def json_lines(self) -> Iterator[Mapping]:
        """One JSON record per relation and per artifact."""
        for candidate in self._relations + self._artifacts:
            yield candidate.to_json_dict()


def mine_relations(basis: MonomialBasis, prec: Precision) -> MiningResult:
    """``F_p``-linear relations among the monomial values, found at ``prec``.

    The kernel is computed again at ``2 prec``; its row-reduced basis is reported as
    confirmed relations, and discovery kernel vectors outside its span as artifacts.

    Raises
    ------
    ValueError
        The basis is empty.
    InsufficientPrecisionError
        No digit is known at the discovery precision.
    """
    if not len(basis):
        raise ValueError("the basis is empty")
    found = _kernel(basis, prec)
    confirming = 2 * prec
    confirmed = _kernel(basis, confirming)
    relations = [RelationCandidate(basis, row, prec, confirming) for row in confirmed]
    artifacts = [
        RelationCandidate(basis, row, prec) for row in found if not _in_span(confirmed, row)
    ]
    for candidate in artifacts:
        logger.warning("Relation %s does not hold at precision %s", candidate, confirming)
    logger.debug(
        "%d relations among %d monomials, %d artifacts", len(relations), len(basis), len(artifacts)
    )
    return MiningResult(basis, relations, artifacts, prec, confirming)


def implied_relations(basis: MonomialBasis) -> List[Tuple[int, ...]]:
    """Coefficient vectors of the stuffle relations supported inside the basis.

    For every monomial and every pair of its factors, the pair is replaced by the terms
    of its stuffle product; the relation is kept when every resulting monomial is in
    the basis.
    """
    uspec = basis.uspec
    p = uspec.p
    found: Dict[Tuple[int, ...], None] = {}
    for position, monomial in enumerate(basis):
        factors = dict(monomial)
        pairs = list(itertools.combinations(factors, 2))
        pairs += [(i, i) for i in factors if factors[i] > 1]
        for a, b in pairs:
            rest = dict(factors)
            rest[a] -= 1
            rest[b] -= 1
            vector = [0] * len(basis)
            vector[position] = 1
            complete = True
            for word, coefficient in stuffle_product(a, b, uspec.q):
                term = dict(rest)
                term[word] = term.get(word, 0) + 1
                target = basis.position(make_monomial(term))
                if target is None:
                    complete = False
                    break
                vector[target] = (vector[target] - coefficient) % p
            if complete and any(vector):
                found[tuple(vector)] = None
    return list(found)


def missing_relations(
    result: MiningResult, implied: Sequence[Sequence[int]]
) -> List[Tuple[int, ...]]:
    """Implied relations outside the span of the confirmed ones."""
    prime = build_field(result.basis.uspec.p, 1).field
    rows = prime(
        np.array([c.coefficients for c in result.relations], dtype=np.int64).reshape(
            -1, len(result.basis)
        )
    )
    return [tuple(v) for v in implied if not _in_span(rows, prime(np.array(v, dtype=np.int64)))]


class CrossWeightReport:
    """Outcome of mining a union of two weights."""

    def __init__(
        self,
        weights: Tuple[int, int],
        result: MiningResult,
        cross_weight: Sequence[RelationCandidate],
        escalations: int,
    ):
        """Create a report."""
        self._weights = weights
        self._result = result
        self._cross_weight = tuple(cross_weight)
        self._escalations = escalations

    @property
    def weights(self) -> Tuple[int, int]:
        """Scanned weights."""
        return self._weights

    @property
    def result(self) -> MiningResult:
        """Mining result of the union at the final precision."""
        return self._result

    @property
    def cross_weight(self) -> Tuple[RelationCandidate, ...]:
        """Confirmed relations not explained by the single-weight relations."""
        return self._cross_weight

    @property
    def escalations(self) -> int:
        """Number of precision doublings performed."""
        return self._escalations

    @property
    def consistent(self) -> bool:
        """Whether every relation of the union lives inside a single weight."""
        return not self._cross_weight

    def to_json_dict(self) -> Mapping:
        """JSON description."""
        return {
            "weights": list(self._weights),
            "consistent": self.consistent,
            "escalations": self._escalations,
            "prec": self._result.discovery_prec,
            "cross_weight": [c.to_json_dict() for c in self._cross_weight],
            "mining": self._result.to_json_dict(),
        }


def _mixed(result: MiningResult, weights: Sequence[int]) -> List[RelationCandidate]:
    basis = result.basis
    prime = build_field(basis.uspec.p, 1).field
    graded = []
    for w in weights:
        part = basis.restricted(w)
        for c in mine_relations(part, result.discovery_prec).relations:
            vector = [0] * len(basis)
            for coefficient, monomial in zip(c.coefficients, part):
                vector[basis.position(monomial)] = coefficient
            graded.append(vector)
    rows = prime(np.array(graded, dtype=np.int64).reshape(-1, len(basis)))
    mixed = []
    for candidate in result.relations:
        vector = prime(np.array(candidate.coefficients, dtype=np.int64))
        if not _in_span(rows, vector):
            mixed.append(candidate)
            rows = type(rows)(np.vstack([np.asarray(rows), np.asarray(vector)]))
    return mixed


def cross_weight_scan(
    w1: int,
    w2: int,
    depth_max: int,
    uspec: UniformizerSpec,
    prec: Precision,
    r: int = 1,
    colors: Optional[Sequence[GFElem]] = None,
    max_escalations: int = 2,
) -> CrossWeightReport:
    """Mine the union of the weight-``w1`` and weight-``w2`` bases.

    A relation of the union outside the span of the single-weight relations is flagged
    and the scan is repeated at doubled precision, up to ``max_escalations`` times.
    """
    if w1 == w2:
        raise ValueError("the two weights must differ")
    union = enumerate_monomials(w1, depth_max, uspec, r, colors).union(
        enumerate_monomials(w2, depth_max, uspec, r, colors)
    )
    escalations = 0
    while True:
        result = mine_relations(union, prec)
        mixed = _mixed(result, (w1, w2))
        if not mixed or escalations >= max_escalations:
            break
        logger.info("%d cross-weight relations at precision %s, escalating", len(mixed), prec)
        prec *= 2
        escalations += 1
    return CrossWeightReport((w1, w2), result, mixed, escalations)
