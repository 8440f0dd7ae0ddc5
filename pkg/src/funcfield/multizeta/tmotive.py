"""Anderson-Thakur polynomials, deformation series and level-r trivializations.

Matrices are lists of rows of :class:`~funcfield.multizeta.tate.TateSeries`, indexed
from 0. For an index of depth ``n`` and level ``r`` the system is::

    Psi^(-r) = Phi Psi

with ``Phi`` lower triangular and polynomial in ``t``, ``Psi`` lower triangular with
powers of ``Omega`` on the diagonal and deformation series ``L`` below it, and
``Upsilon`` its inverse built from the non-strict series ``L*``.
"""

import functools
import itertools
import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import galois
import numpy as np

from funcfield.multizeta.configuration import Configuration
from funcfield.multizeta.exceptions import (
    BudgetExceededError,
    FieldMismatchError,
    InsufficientPrecisionError,
    InvalidFieldError,
    TowerDepthError,
)
from funcfield.multizeta.gf import GFElem, color_field, common_field, solve_mu
from funcfield.multizeta.powersum import Index, zeta_series
from funcfield.multizeta.ringa import (
    RatFuncExt,
    function_field,
    poly_coeffs,
    poly_to_laurent,
    to_laurent,
)
from funcfield.multizeta.scalars import (
    LaurentScalar,
    Precision,
    UniformizerSpec,
    carlitz_period,
    omega_at_theta,
    theta_root,
)
from funcfield.multizeta.tate import TateSeries, omega

logger = logging.getLogger(__name__)

Matrix = List[List[TateSeries]]


class ATPoly:
    """Anderson-Thakur polynomial ``H_n``, a polynomial in ``theta`` and ``t`` over ``F_p``.

    ``coeffs[a, b]`` is the coefficient of ``theta^a t^b``.
    """

    _q: int
    _n: int
    _coeffs: np.ndarray

    @property
    def q(self) -> int:
        """Size of the constant field."""
        return self._q

    @property
    def n(self) -> int:
        """Index of the polynomial."""
        return self._n

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficient matrix, rows by ``theta``-degree and columns by ``t``-degree."""
        return self._coeffs.copy()

    @property
    def theta_degree(self) -> int:
        """Degree in ``theta``."""
        return self._coeffs.shape[0] - 1

    @property
    def t_degree(self) -> int:
        """Degree in ``t``."""
        return self._coeffs.shape[1] - 1

    def __init__(self, q: int, n: int, coeffs: Sequence[Sequence[int]]):
        """Create ``H_n`` from its coefficient matrix."""
        self._q = q
        self._n = n
        self._coeffs = np.array(coeffs, dtype=np.int64, ndmin=2) % color_field(q, 1).p

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, ATPoly):
            return False
        return (
            self._q == obj._q
            and self._n == obj._n
            and np.array_equal(self._coeffs, obj._coeffs)
        )

    __hash__ = None

    def __repr__(self):
        """Python callable description."""
        return f"ATPoly(q={self._q!r}, n={self._n!r}, coeffs={self._coeffs.tolist()!r})"

    def at_theta(self) -> galois.Poly:
        """``H_n(theta)`` as a polynomial in ``theta`` over ``F_q``."""
        spec = color_field(self._q, 1)
        values = np.zeros(self.theta_degree + self.t_degree + 1, dtype=np.int64)
        for (a, b), c in np.ndenumerate(self._coeffs):
            values[a + b] += c
        return galois.Poly(values % spec.p, field=spec.field, order="asc")

    def to_tate(self, uspec: UniformizerSpec) -> TateSeries:
        """``H_n`` as a polynomial in ``t`` with v-expanded coefficients."""
        coeffs = []
        for column in self._coeffs.T:
            terms = [
                (-uspec.scale * a, -int(c) if a % 2 else int(c))
                for a, c in enumerate(column)
                if c
            ]
            coeffs.append(LaurentScalar(uspec, terms))
        return TateSeries.polynomial(uspec, coeffs)

    def to_json_dict(self) -> Mapping:
        """JSON description ``{q, n, coeffs}``."""
        return {"q": self._q, "n": self._n, "coeffs": self._coeffs.tolist()}


def _carlitz_weight(q: int, i: int, field) -> Dict[int, galois.Poly]:
    # prod_{j=1}^{i} (t^(q^i) - theta^(q^j)), keyed by theta-degree
    top = galois.Poly.Degrees([q**i], field=field)
    result = {0: galois.Poly.One(field)}
    for j in range(1, i + 1):
        following: Dict[int, galois.Poly] = {}
        for a, f in result.items():
            following[a] = following.get(a, galois.Poly.Zero(field)) + f * top
            shifted = a + q**j
            following[shifted] = following.get(shifted, galois.Poly.Zero(field)) - f
        result = following
    return result


@functools.lru_cache(maxsize=None)
def _generating_terms(q: int, n: int) -> Tuple[Tuple[int, RatFuncExt], ...]:
    """``H_n / Gamma_(n+1)(t)`` keyed by ``theta``-degree, coefficients in ``F_p(t)``."""
    ring = function_field(q, color_field(q, 1))
    spec = ring.spec
    if n == 0:
        return ((0, RatFuncExt.one(spec)),)
    total: Dict[int, RatFuncExt] = {}
    i = 0
    while q**i <= n:
        den = ring.carlitz_factor(i)
        for b, weight in _carlitz_weight(q, i, spec.field).items():
            factor = RatFuncExt(spec, weight, den)
            for a, g in _generating_terms(q, n - q**i):
                total[a + b] = total.get(a + b, RatFuncExt.zero(spec)) + g * factor
        i += 1
    return tuple((a, total[a]) for a in sorted(total) if not total[a].is_zero)


@functools.lru_cache(maxsize=None)
def at_poly(n: int, q: int) -> ATPoly:
    """Anderson-Thakur polynomial ``H_n``.

    Computed from the generating series
    ``sum_n H_n / Gamma_(n+1)(t) x^n = (1 - sum_i E_i / D_i(t) x^(q^i))^(-1)``
    with ``E_i = prod_{j=1}^{i} (t^(q^i) - theta^(q^j))``, where ``D_i(t)`` and
    ``Gamma(t)`` are the Carlitz factorial pieces in the variable ``t``.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    gamma = function_field(q, color_field(q, 1)).gamma(n)
    rows = {}
    for a, g in _generating_terms(q, n):
        rows[a] = poly_coeffs((g * gamma).num)
    width = max(len(row) for row in rows.values())
    coeffs = np.zeros((max(rows) + 1, width), dtype=np.int64)
    for a, row in rows.items():
        coeffs[a, : len(row)] = row
    logger.debug("H_%s has theta-degree %s and t-degree %s", n, max(rows), width - 1)
    return ATPoly(q, n, coeffs)


@functools.lru_cache(maxsize=64)
def deformation_base(s: int, uspec: UniformizerSpec, t_deg: int, prec: Precision) -> TateSeries:
    """``H_(s-1) Omega^s`` with every coefficient known up to ``prec``."""
    h = at_poly(s - 1, uspec.q)
    om = omega(uspec, t_deg, prec + uspec.scale * h.theta_degree)
    return (h.to_tate(uspec) * om**s).cap(prec)


def anderson_thakur_sides(
    s: int, d: int, uspec: UniformizerSpec, t_deg: int, prec: Precision
) -> Tuple[LaurentScalar, LaurentScalar]:
    """Both sides of ``(H_(s-1) Omega^s)^(d)|_{t=theta} = Gamma_s S_d(s) Omega(theta)^s``.

    Returns
    -------
    tuple
        The specialized twisted series and the product of the right side, each up to
        ``prec``.
    """
    base = deformation_base(s, uspec, t_deg, prec + uspec.scale * t_deg)
    lhs = base.twist(d).specialize(0).truncate(prec)
    ring = function_field(uspec.q, uspec.field)
    gamma = ring.gamma(s - 1)
    reach = prec + uspec.scale * gamma.degree
    rhs = (
        poly_to_laurent(gamma, uspec)
        * to_laurent(ring.power_sum(d, s), uspec, reach)
        * omega_at_theta(uspec, reach) ** s
    )
    return lhs, rhs.truncate(prec)


def tate_twist(f: TateSeries, n: int) -> TateSeries:
    """``f^(n)``, the Frobenius twist of every coefficient.

    Raises
    ------
    TwistError
        ``n < 0`` and some coefficient is not a ``q^|n|``-th power; the error names the
        t-exponent and the v-exponent.
    """
    return f.twist(n)


def specialize(f: TateSeries, n: int = 0) -> LaurentScalar:
    """Value of ``f`` at ``t = theta`` (``n = 0``) or at ``t = theta^(q^n)``.

    Raises
    ------
    InsufficientPrecisionError
        The truncation of ``f`` does not certify any digit at this point.
    """
    if n < 0:
        raise ValueError(f"cannot specialize at theta^(q^{n})")
    return f.specialize(n)


def _twist_cutoff(q: int, bases: Sequence[TateSeries], reach: Precision) -> int:
    lowest = min(min(base.min_valuations()) for base in bases)
    if lowest <= 0:
        raise InsufficientPrecisionError("The deformation series", reach)
    limit = Configuration.current().max_cutoff_degree
    d = 1
    while q**d * lowest <= reach:
        d += 1
        if d > limit:
            raise BudgetExceededError("The twist cutoff", d, limit)
    return d


def _deformation_tail(bases: Sequence[TateSeries]):
    # twisting only raises the nonnegative valuations of the bases
    slopes = sorted({b for base in bases for _, b in (base.tail or ())})
    lines = []
    for slope in slopes:
        bounds = [base.line_bound(slope) for base in bases]
        if None not in bounds:
            lines.append((sum(bounds), slope))
    return lines or None


def L_series(
    idx: Index,
    uspec: UniformizerSpec,
    t_deg: int,
    prec: Precision,
    weight: Precision = 0,
    star: bool = False,
) -> TateSeries:
    """Deformation series ``L(s; xi)``.

    ``sum_{d_1 > ... > d_n >= 0} xi_1^d_1 (H_(s_1-1) Omega^s_1)^(d_1) ...``, with
    ``>=`` in place of ``>`` when ``star`` is set.

    Parameters
    ----------
    idx : Index
        Index with colors in the coefficient field of ``uspec``.
    uspec : UniformizerSpec
        Uniformizer of the coefficients.
    t_deg : int
        Largest ``t``-exponent kept.
    prec : int
        Precision of the ``t^0`` coefficient in v-exponents.
    weight : int, optional
        Extra precision per power of ``t``.
    star : bool, optional
        Sum over non-strict chains.

    Raises
    ------
    BudgetExceededError
        The twist cutoff is above the configured limit.
    """
    if idx.spec != uspec.field:
        raise FieldMismatchError(f"colors of {idx} are not in {uspec.field}")
    reach = prec + weight * t_deg
    bases = [deformation_base(s, uspec, t_deg, reach) for s in idx.s]
    cutoff = _twist_cutoff(uspec.q, bases, reach)
    zero = TateSeries(uspec, [LaurentScalar.zero(uspec)] * (t_deg + 1))
    inner: Optional[List[TateSeries]] = None
    total = zero
    for k in reversed(range(idx.dep)):
        partial, total = [], zero
        for e in range(cutoff):
            term = bases[k].twist(e).scale(idx.xi[k] ** e)
            if inner is not None:
                term = term * inner[e]
            term = term.cap(reach)
            if star:
                total = total + term
            partial.append(total)
            if not star:
                total = total + term
        inner = partial
    logger.debug("L%s%s summed over %d twists", "*" if star else "", idx.s, cutoff)
    return total.cap(prec, weight).with_tail(_deformation_tail(bases))


def L_star_series(
    idx: Index, uspec: UniformizerSpec, t_deg: int, prec: Precision, weight: Precision = 0
) -> TateSeries:
    """Non-strict deformation series ``L*(s; xi)``."""
    return L_series(idx, uspec, t_deg, prec, weight, star=True)


@functools.lru_cache(maxsize=256)
def T_term(
    s: int, j: int, xi: GFElem, uspec: UniformizerSpec, literal: bool = False
) -> TateSeries:
    """``T_(s,j)(xi) = xi^-j H_(s-1)^(-j) prod_{h=0}^{j-1} (t - theta^(q^-h))^s``.

    With ``literal`` the product runs up to ``h = j``.

    Raises
    ------
    TowerDepthError
        ``j`` is not between 1 and the depth of the uniformizer.
    """
    if not 1 <= j <= uspec.depth:
        raise TowerDepthError(j, uspec.depth)
    result = at_poly(s - 1, uspec.q).to_tate(uspec).twist(-j)
    for h in range(j + 1 if literal else j):
        result = result * TateSeries.t_minus(uspec, theta_root(uspec, h)) ** s
    return result.scale(xi**-j)


def chained_t_terms(
    idx: Index, r: int, uspec: UniformizerSpec, literal: bool = False
) -> TateSeries:
    """Sum over ``r >= j_n > ... > j_1 >= 1`` of ``T_(s_n,j_n)(xi_n) ... T_(s_1,j_1)(xi_1)``."""
    total = TateSeries.constant(uspec, 0)
    for chain in itertools.combinations(range(1, r + 1), idx.dep):
        product = TateSeries.constant(uspec)
        for s, xi, j in zip(idx.s, idx.xi, chain):
            product = product * T_term(s, j, xi, uspec, literal)
        total = total + product
    return total


def _loss(series: TateSeries) -> Precision:
    lowest = min(series.min_valuations())
    return max(0, -lowest) if lowest != math.inf else 0


def twisted_deformation(
    idx: Index,
    uspec: UniformizerSpec,
    r: int,
    t_deg: int,
    prec: Precision,
    literal: bool = False,
) -> TateSeries:
    """Closed form of ``L(s; xi)^(-r)`` through the T-terms.

    ``(xi_1 ... xi_m)^r sum_k L(s_1..s_(k-1)) T_(k..m) Omega^(s_k + ... + s_m)``, the
    empty ``L`` and empty chain being 1.
    """
    m = idx.dep
    total = TateSeries.constant(uspec, 0)
    for k in range(m + 1):
        if k < m:
            chain = chained_t_terms(idx[k:], r, uspec, literal)
        else:
            chain = TateSeries.constant(uspec)
        reach = prec + _loss(chain)
        prefix = L_series(idx[:k], uspec, t_deg, reach) if k else TateSeries.constant(uspec)
        om = omega(uspec, t_deg, reach)
        total = total + (prefix * chain * om ** sum(idx.s[k:])).cap(prec)
    return total.scale(idx.color_product() ** r)


def check_deformation_twist(
    idx: Index,
    uspec: UniformizerSpec,
    r: int,
    t_deg: int,
    prec: Precision,
    literal: bool = False,
) -> Optional[Tuple[int, int]]:
    """First ``(t-exponent, v-exponent)`` where ``L^(-r)`` and its closed form differ."""
    direct = L_series(idx, uspec, t_deg, prec * uspec.q**r).twist(-r)
    return direct.first_mismatch(twisted_deformation(idx, uspec, r, t_deg, prec, literal))


class MotiveSpec:
    """Index, level and truncation budget of a trivialization.

    ``mu_i`` are the roots of ``mu^(q^r - 1) = xi_i^r`` in the coefficient field.
    """

    _index: Index
    _r: int
    _uspec: UniformizerSpec
    _t_deg: int
    _prec: Precision
    _weight: Precision
    _mu: Tuple[GFElem, ...]

    @property
    def index(self) -> Index:
        """Colored index."""
        return self._index

    @property
    def r(self) -> int:
        """Level of the colors."""
        return self._r

    @property
    def uspec(self) -> UniformizerSpec:
        """Uniformizer of the coefficients."""
        return self._uspec

    @property
    def t_deg(self) -> int:
        """Largest ``t``-exponent kept."""
        return self._t_deg

    @property
    def prec(self) -> Precision:
        """Precision in v-exponents of the ``t^0`` coefficients."""
        return self._prec

    @property
    def weight(self) -> Precision:
        """Extra precision per power of ``t``."""
        return self._weight

    @property
    def mu(self) -> Tuple[GFElem, ...]:
        """Roots ``mu_i``."""
        return self._mu

    def __init__(
        self,
        index: Index,
        r: int,
        uspec: UniformizerSpec,
        t_deg: Optional[int] = None,
        prec: Optional[Precision] = None,
        weight: Optional[Precision] = None,
        mu: Optional[Sequence[GFElem]] = None,
    ):
        """Create a motive specification.

        ``t_deg`` and ``prec`` default to the configured budget for the weight of the
        index, ``weight`` to ``(q-1) q^R`` so that specialization at ``theta`` keeps
        ``prec`` digits.

        Raises
        ------
        TowerDepthError
            The uniformizer depth is below ``r``.
        InvalidFieldError
            A color is not in ``F_{q^r}`` or a given ``mu_i`` has the wrong power.
        """
        if r < 1:
            raise ValueError(f"the level must be positive, got {r}")
        if index.spec != uspec.field:
            raise FieldMismatchError(f"colors of {index} are not in {uspec.field}")
        if uspec.depth < r:
            raise TowerDepthError(r, uspec.depth)
        configuration = Configuration.current()
        q = uspec.q
        if mu is None:
            mu = [solve_mu(xi, q, r, home=uspec.field)[0] for xi in index.xi]
        else:
            mu = list(mu)
            for root, xi in zip(mu, index.xi):
                if root ** (q**r - 1) != xi**r:
                    raise InvalidFieldError(uspec.p, f"{root} is not a root for {xi}")
        self._index = index
        self._r = r
        self._uspec = uspec
        self._t_deg = configuration.t_deg_per_weight * index.wt if t_deg is None else t_deg
        self._prec = configuration.prec_digits * uspec.scale if prec is None else prec
        self._weight = uspec.scale if weight is None else weight
        self._mu = tuple(mu)

    @staticmethod
    def from_colors(
        q: int,
        r: int,
        s: Sequence[int],
        colors: Sequence[GFElem],
        depth: Optional[int] = None,
        **budget,
    ) -> "MotiveSpec":
        """Motive for colors of ``F_{q^r}``, moved into the working field holding every ``mu``."""
        working, embedding = common_field(q, r, colors)
        index = Index(s, [embedding(xi) for xi in colors])
        uspec = UniformizerSpec(q, r if depth is None else depth, working)
        return MotiveSpec(index, r, uspec, **budget)

    def __eq__(self, obj):
        """Test for equality."""
        if not isinstance(obj, MotiveSpec):
            return False
        return (
            self._index == obj._index
            and self._r == obj._r
            and self._uspec == obj._uspec
            and self._t_deg == obj._t_deg
            and self._prec == obj._prec
            and self._weight == obj._weight
            and self._mu == obj._mu
        )

    def __repr__(self):
        """Python callable description."""
        return (
            f"MotiveSpec(index={self._index!r}, r={self._r!r}, uspec={self._uspec!r}, "
            f"t_deg={self._t_deg!r}, prec={self._prec!r}, weight={self._weight!r}, "
            f"mu={list(self._mu)!r})"
        )


class TrivData:
    """Matrices ``Phi``, ``Psi`` and ``Upsilon`` of a level-``r`` system."""

    def __init__(
        self,
        phi: Matrix,
        psi: Matrix,
        upsilon: Matrix,
        r: int,
        uspec: UniformizerSpec,
        motive: Optional[MotiveSpec] = None,
        literal: bool = False,
    ):
        """Create the system data."""
        self._literal = literal
        self._phi = phi
        self._psi = psi
        self._upsilon = upsilon
        self._r = r
        self._uspec = uspec
        self._motive = motive

    @property
    def phi(self) -> Matrix:
        """Frobenius matrix, polynomial in ``t``."""
        return self._phi

    @property
    def psi(self) -> Matrix:
        """Truncated trivialization."""
        return self._psi

    @property
    def upsilon(self) -> Matrix:
        """Truncated inverse of ``psi``."""
        return self._upsilon

    @property
    def r(self) -> int:
        """Level of the twist ``Psi^(-r)``."""
        return self._r

    @property
    def uspec(self) -> UniformizerSpec:
        """Uniformizer of the entries."""
        return self._uspec

    @property
    def motive(self) -> Optional[MotiveSpec]:
        """Specification the system was built from, None for products and sums."""
        return self._motive

    @property
    def literal(self) -> bool:
        """Whether the T-terms run their product up to ``h = j``."""
        return self._literal

    @property
    def dimension(self) -> int:
        """Size of the matrices."""
        return len(self._phi)

    @property
    def first_column(self) -> List[TateSeries]:
        """First column of ``psi``."""
        return [row[0] for row in self._psi]

    def __repr__(self):
        """Short description."""
        return f"<TrivData dimension={self.dimension} r={self._r} uspec={self._uspec!r}>"


def _is_zero_series(f: TateSeries) -> bool:
    return f.exact and all(c.is_zero for c in f.coeffs)


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    uspec = a[0][0].spec
    result = []
    for row in a:
        new_row = []
        for j in range(len(b[0])):
            total = TateSeries.constant(uspec, 0)
            for k, entry in enumerate(row):
                if _is_zero_series(entry) or _is_zero_series(b[k][j]):
                    continue
                total = total + entry * b[k][j]
            new_row.append(total)
        result.append(new_row)
    return result


def _kron(a: Matrix, b: Matrix) -> Matrix:
    size = len(b)
    uspec = a[0][0].spec
    result = [[TateSeries.constant(uspec, 0)] * (len(a) * size) for _ in range(len(a) * size)]
    for (i, j), (k, m) in itertools.product(
        itertools.product(range(len(a)), repeat=2), itertools.product(range(size), repeat=2)
    ):
        if _is_zero_series(a[i][j]) or _is_zero_series(b[k][m]):
            continue
        result[i * size + k][j * size + m] = a[i][j] * b[k][m]
    return result


def _identity(uspec: UniformizerSpec, size: int) -> Matrix:
    return [[TateSeries.constant(uspec, int(i == j)) for j in range(size)] for i in range(size)]


@functools.lru_cache(maxsize=64)
def _root_product(uspec: UniformizerSpec, r: int, exponent: int) -> TateSeries:
    # prod_{h<r} ((t - theta)^exponent)^(-h)
    result = TateSeries.constant(uspec)
    for h in range(r):
        result = result * TateSeries.t_minus(uspec, theta_root(uspec, h)) ** exponent
    return result


def _mu_run(ms: MotiveSpec, start: int, stop: int) -> GFElem:
    return functools.reduce(lambda x, y: x * y, ms.mu[start:stop], ms.uspec.field.one)


def build_triv(ms: MotiveSpec, literal: bool = False) -> TrivData:
    """Build ``Phi``, ``Psi`` and ``Upsilon`` for a motive specification.

    With 0-based rows and ``S_i = s_i + ... + s_(n-1)``, for ``i > j``:

    - ``Psi[i][j] = (mu_j ... mu_(i-1)) L(s_j..s_(i-1)) Omega^S_i``;
    - ``Upsilon[i][j] = (-1)^(i-j) (mu_j ... mu_(i-1)) L*(s_(i-1)..s_j) Omega^(-S_j)``;
    - ``Phi[i][j] = P_i (mu_j ... mu_(i-1)) T_(j..i-1)`` with
      ``P_i = prod_{h<r} (t - theta^(q^-h))^S_i`` on the diagonal.

    Parameters
    ----------
    ms : MotiveSpec
        Index, level and budget.
    literal : bool, optional
        Use the T-terms with the product running up to ``h = j``.
    """
    idx, uspec, r = ms.index, ms.uspec, ms.r
    n, t_deg = idx.dep, ms.t_deg
    reach = ms.prec + ms.weight * t_deg
    suffix = [sum(idx.s[i:]) for i in range(n + 1)]
    om = omega(uspec, t_deg, reach + (idx.wt + 2) * uspec.q ** (uspec.depth + 1))
    om_inv = om.inverse()
    om_powers = [(om**e).cap(reach) for e in suffix]
    inv_powers = [(om_inv**e).cap(reach) for e in suffix]
    zero = TateSeries.constant(uspec, 0)
    size = n + 1
    phi = [[zero] * size for _ in range(size)]
    psi = [[zero] * size for _ in range(size)]
    upsilon = [[zero] * size for _ in range(size)]
    for i in range(size):
        phi[i][i] = _root_product(uspec, r, suffix[i])
        psi[i][i] = om_powers[i]
        upsilon[i][i] = inv_powers[i]
        for j in range(i):
            sub = idx[j:i]
            mu = _mu_run(ms, j, i)
            psi[i][j] = (L_series(sub, uspec, t_deg, reach) * om_powers[i]).scale(mu).cap(reach)
            star = L_star_series(sub.reversed(), uspec, t_deg, reach)
            sign = mu if (i - j) % 2 == 0 else -mu
            upsilon[i][j] = (star * inv_powers[j]).scale(sign).cap(reach)
            phi[i][j] = (phi[i][i] * chained_t_terms(sub, r, uspec, literal)).scale(mu)
    logger.debug("Built the level-%s system of %s with t_deg=%s", r, idx.s, t_deg)
    return TrivData(phi, psi, upsilon, r, uspec, ms, literal)


class TrivReport:
    """Outcome of an entrywise matrix comparison."""

    def __init__(
        self,
        entries_checked: int,
        max_checked_exponent: Optional[Precision],
        first_mismatch: Optional[Tuple[int, int, int, int]] = None,
        deformation_mismatch: Optional[Tuple[int, int, int, int]] = None,
    ):
        """Create a report.

        ``first_mismatch`` is ``(row, column, t-exponent, v-exponent)`` and
        ``deformation_mismatch`` is ``(start, stop, t-exponent, v-exponent)`` for the
        sub-index ``s_start..s_(stop-1)``.
        """
        self._entries_checked = entries_checked
        self._max_checked_exponent = max_checked_exponent
        self._first_mismatch = first_mismatch
        self._deformation_mismatch = deformation_mismatch

    @property
    def passed(self) -> bool:
        """Whether every compared digit matched."""
        return self._first_mismatch is None and self._deformation_mismatch is None

    @property
    def status(self) -> str:
        """``"pass"`` or ``"fail"``."""
        return "pass" if self.passed else "fail"

    @property
    def entries_checked(self) -> int:
        """Number of compared matrix entries."""
        return self._entries_checked

    @property
    def max_checked_exponent(self) -> Optional[Precision]:
        """Largest v-exponent compared in any entry."""
        return self._max_checked_exponent

    @property
    def first_mismatch(self) -> Optional[Tuple[int, int, int, int]]:
        """First mismatching ``(row, column, t-exponent, v-exponent)``."""
        return self._first_mismatch

    @property
    def deformation_mismatch(self) -> Optional[Tuple[int, int, int, int]]:
        """First sub-index whose ``L^(-r)`` differs from its T-term closed form."""
        return self._deformation_mismatch

    def __repr__(self):
        """Python callable description."""
        return (
            f"TrivReport(entries_checked={self._entries_checked!r}, "
            f"max_checked_exponent={self._max_checked_exponent!r}, "
            f"first_mismatch={self._first_mismatch!r}, "
            f"deformation_mismatch={self._deformation_mismatch!r})"
        )

    def to_json_dict(self) -> Mapping:
        """JSON description."""
        mismatch = self._first_mismatch
        deformation = self._deformation_mismatch
        return {
            "status": self.status,
            "max_checked_exponent": self._max_checked_exponent,
            "entries_checked": self._entries_checked,
            "first_mismatch": None if mismatch is None else list(mismatch),
            "deformation_mismatch": None if deformation is None else list(deformation),
        }


def _compare(
    pairs: Sequence[Tuple[Matrix, Matrix]],
    deformation_mismatch: Optional[Tuple[int, int, int, int]] = None,
) -> TrivReport:
    checked, highest, mismatch = 0, None, None
    for lhs, rhs in pairs:
        for i, (left_row, right_row) in enumerate(zip(lhs, rhs)):
            for j, (left, right) in enumerate(zip(left_row, right_row)):
                checked += 1
                exponent = left.checked_exponent(right)
                if exponent != math.inf:
                    highest = exponent if highest is None else max(highest, exponent)
                found = left.first_mismatch(right)
                if found is not None and mismatch is None:
                    mismatch = (i, j, *found)
    if mismatch is not None:
        logger.warning("Matrix entries differ at %s", mismatch)
    return TrivReport(checked, highest, mismatch, deformation_mismatch)


def _deformation_mismatch(td: TrivData) -> Optional[Tuple[int, int, int, int]]:
    ms = td.motive
    n = ms.index.dep
    for start, stop in itertools.combinations(range(n + 1), 2):
        sub = ms.index[start:stop]
        found = check_deformation_twist(sub, td.uspec, td.r, ms.t_deg, ms.prec, td.literal)
        if found is not None:
            logger.warning("The closed form of L%s^(-%d) fails at %s", sub.s, td.r, found)
            return (start, stop, *found)
    return None


def check_trivialization(td: TrivData) -> TrivReport:
    """Compare ``Psi^(-r)`` with ``Phi Psi`` entrywise on their joint truncation.

    For a system built from a single index, ``L^(-r)`` of every contiguous sub-index is
    also compared with its T-term closed form up to the ``t^0`` precision.
    """
    twisted = [[f.twist(-td.r) for f in row] for row in td.psi]
    deformation = None if td.motive is None else _deformation_mismatch(td)
    return _compare([(twisted, _matmul(td.phi, td.psi))], deformation)


def check_inverse(td: TrivData) -> TrivReport:
    """Compare ``Upsilon Psi`` and ``Psi Upsilon`` with the identity."""
    identity = _identity(td.uspec, td.dimension)
    return _compare(
        [
            (_matmul(td.upsilon, td.psi), identity),
            (_matmul(td.psi, td.upsilon), identity),
        ]
    )


def phi_determinant_at_zero(td: TrivData) -> LaurentScalar:
    """``det Phi`` at ``t = 0`` for a lower triangular ``Phi``."""
    for i, row in enumerate(td.phi):
        if any(not _is_zero_series(f) for f in row[i + 1 :]):
            raise ValueError("Phi is not lower triangular")
    return functools.reduce(
        lambda x, y: x * y, (row[i].at_zero() for i, row in enumerate(td.phi))
    )


def inclusion_exclusion_defects(
    idx: Index, uspec: UniformizerSpec, t_deg: int, prec: Precision
) -> Tuple[Optional[Tuple[int, int]], Optional[Tuple[int, int]]]:
    """First mismatches against zero of the two alternating ``L``/``L*`` sums.

    ``sum_k (-1)^(n-k) L*(s_(n-1)..s_k) L(s_0..s_(k-1))`` and
    ``sum_k (-1)^k L(s_k..s_(n-1)) L*(s_(k-1)..s_0)``, empty series being 1.
    """
    n = idx.dep
    one = TateSeries.constant(uspec)
    zero = TateSeries.constant(uspec, 0)

    def strict(k: int, stop: int) -> TateSeries:
        return L_series(idx[k:stop], uspec, t_deg, prec) if stop > k else one

    def loose(k: int, stop: int) -> TateSeries:
        return L_star_series(idx[k:stop].reversed(), uspec, t_deg, prec) if stop > k else one

    first, second = zero, zero
    for k in range(n + 1):
        term = loose(k, n) * strict(0, k)
        first = first + (term if (n - k) % 2 == 0 else -term)
        term = strict(k, n) * loose(0, k)
        second = second + (term if k % 2 == 0 else -term)
    return first.first_mismatch(zero), second.first_mismatch(zero)


def frobenius_matrix(phi: Matrix, step: int, count: int) -> Matrix:
    """``Phi^(-(count-1) step) ... Phi^(-step) Phi``, the Frobenius of the ``count``-fold twist."""
    result = phi
    for k in range(1, count):
        twisted = [[f.twist(-k * step) for f in row] for row in phi]
        result = _matmul(twisted, result)
    return result


def _common_level(factors: Sequence[TrivData]) -> Tuple[UniformizerSpec, int]:
    if not factors:
        raise ValueError("at least one system is needed")
    uspec = factors[0].uspec
    if any(f.uspec != uspec for f in factors):
        raise FieldMismatchError("systems must share their uniformizer")
    r = math.lcm(*(f.r for f in factors))
    if uspec.depth < r:
        raise TowerDepthError(r, uspec.depth)
    return uspec, r


def _check_dimension(what: str, dimension: int) -> None:
    limit = Configuration.current().max_motive_dimension
    if dimension > limit:
        raise BudgetExceededError(what, dimension, limit)


def kronecker_motive(factors: Sequence[TrivData], multiplicities: Sequence[int]) -> TrivData:
    """Kronecker product ``Phi_1^(x m_1) x ... x Phi_k^(x m_k)`` and likewise for ``Psi``.

    The level is the least common multiple of the factor levels; each ``Phi`` is replaced
    by its iterated twist product so that every factor satisfies the same equation.

    Raises
    ------
    BudgetExceededError
        The product dimension is above the configured limit.
    """
    if len(factors) != len(multiplicities) or min(multiplicities, default=0) < 1:
        raise ValueError("every system needs a positive multiplicity")
    uspec, r = _common_level(factors)
    _check_dimension(
        "The Kronecker product",
        math.prod(f.dimension**m for f, m in zip(factors, multiplicities)),
    )
    phi = psi = upsilon = None
    for factor, m in zip(factors, multiplicities):
        factor_phi = frobenius_matrix(factor.phi, factor.r, r // factor.r)
        for _ in range(m):
            if phi is None:
                phi, psi, upsilon = factor_phi, factor.psi, factor.upsilon
            else:
                phi = _kron(phi, factor_phi)
                psi = _kron(psi, factor.psi)
                upsilon = _kron(upsilon, factor.upsilon)
    logger.debug("Kronecker system of dimension %d at level %d", len(phi), r)
    if len(factors) == 1 and multiplicities[0] == 1:
        return TrivData(phi, psi, upsilon, r, uspec, factors[0].motive, factors[0].literal)
    return TrivData(phi, psi, upsilon, r, uspec)


def direct_sum_motive(factors: Sequence[TrivData]) -> TrivData:
    """Block diagonal system of several trivializations at their common level."""
    uspec, r = _common_level(factors)
    size = sum(f.dimension for f in factors)
    _check_dimension("The direct sum", size)
    zero = TateSeries.constant(uspec, 0)
    phi = [[zero] * size for _ in range(size)]
    psi = [[zero] * size for _ in range(size)]
    upsilon = [[zero] * size for _ in range(size)]
    offset = 0
    for factor in factors:
        block = frobenius_matrix(factor.phi, factor.r, r // factor.r)
        for i, j in itertools.product(range(factor.dimension), repeat=2):
            phi[offset + i][offset + j] = block[i][j]
            psi[offset + i][offset + j] = factor.psi[i][j]
            upsilon[offset + i][offset + j] = factor.upsilon[i][j]
        offset += factor.dimension
    return TrivData(phi, psi, upsilon, r, uspec)


def _gamma_product(idx: Index, uspec: UniformizerSpec) -> galois.Poly:
    ring = function_field(uspec.q, uspec.field)
    return functools.reduce(lambda x, y: x * y, (ring.gamma(s - 1) for s in idx.s))


def period_multiple(idx: Index, uspec: UniformizerSpec, prec: Precision) -> LaurentScalar:
    """``Gamma_(s_1) ... Gamma_(s_n) zeta(s; xi) / pi^w`` up to ``prec``.

    ``pi`` is :func:`carlitz_period`; this is the value the deformation ``L(s; xi)``
    takes at ``t = theta``.
    """
    gamma = _gamma_product(idx, uspec)
    reach = prec + uspec.scale * gamma.degree
    zeta, _, _ = zeta_series(idx, uspec, reach)
    period = carlitz_period(uspec, reach)
    value = poly_to_laurent(gamma, uspec) * zeta / period**idx.wt
    return value.truncate(prec)


def L_at_theta_sides(
    idx: Index, uspec: UniformizerSpec, t_deg: int, prec: Precision
) -> Tuple[LaurentScalar, LaurentScalar]:
    """``L(s; xi)`` specialized at ``t = theta`` next to :func:`period_multiple`.

    The specialized side may know fewer digits than ``prec`` when the truncation in
    ``t`` is too short.
    """
    series = L_series(idx, uspec, t_deg, prec + uspec.scale * t_deg)
    return series.specialize(0).truncate(prec), period_multiple(idx, uspec, prec)


def psi_corner_at_theta(td: TrivData) -> Tuple[LaurentScalar, LaurentScalar]:
    """Last entry of the first column of ``Psi`` at ``t = theta``, observed and predicted.

    The prediction is ``(mu_1 ... mu_n) Gamma_(s_1) ... Gamma_(s_n) zeta(s; xi) / pi^w``.

    Raises
    ------
    ValueError
        The system has no motive specification.
    InsufficientPrecisionError
        No digit of the specialized entry is certified.
    """
    ms = td.motive
    if ms is None:
        raise ValueError("the corner needs the system of a single index")
    observed = td.first_column[-1].specialize(0)
    target = ms.prec if observed.prec == math.inf else observed.prec
    if target < 1:
        raise InsufficientPrecisionError("The first column at theta", target)
    expected = period_multiple(ms.index, ms.uspec, target) * _mu_run(ms, 0, ms.index.dep)
    return observed, expected


class SpecializationReport:
    """First column of ``Psi`` at ``t = theta^(q^N)`` next to its predicted value.

    The prediction is zero except for the last entry, ``a c^N (b zeta Omega(theta)^w)^(q^N)``
    with ``a = prod mu_i``, ``b = prod Gamma_(s_i)`` and ``c = prod xi_i``.
    """

    def __init__(
        self,
        point: int,
        a: GFElem,
        b: LaurentScalar,
        c: GFElem,
        expected: Sequence[LaurentScalar],
        observed: Sequence[LaurentScalar],
    ):
        """Create a report."""
        self._point = point
        self._a = a
        self._b = b
        self._c = c
        self._expected = tuple(expected)
        self._observed = tuple(observed)

    @property
    def point(self) -> int:
        """``N`` of the point ``theta^(q^N)``."""
        return self._point

    @property
    def a(self) -> GFElem:
        """Product of the ``mu_i``."""
        return self._a

    @property
    def b(self) -> LaurentScalar:
        """Product of the Carlitz gamma values ``Gamma_(s_i)``."""
        return self._b

    @property
    def c(self) -> GFElem:
        """Product of the colors."""
        return self._c

    @property
    def expected(self) -> Tuple[LaurentScalar, ...]:
        """Predicted first column."""
        return self._expected

    @property
    def observed(self) -> Tuple[LaurentScalar, ...]:
        """Specialized first column."""
        return self._observed

    @property
    def first_mismatch(self) -> Optional[Tuple[int, int]]:
        """First ``(row, v-exponent)`` where prediction and specialization differ."""
        for row, (left, right) in enumerate(zip(self._observed, self._expected)):
            found = left.first_mismatch(right)
            if found is not None:
                return row, found
        return None

    @property
    def passed(self) -> bool:
        """Whether the pattern holds on every compared digit."""
        return self.first_mismatch is None

    def to_json_dict(self) -> Mapping:
        """JSON description."""
        mismatch = self.first_mismatch
        return {
            "point": self._point,
            "status": "pass" if self.passed else "fail",
            "a": self._a.to_json_dict(),
            "c": self._c.to_json_dict(),
            "observed": [x.to_json_dict() for x in self._observed],
            "first_mismatch": None if mismatch is None else list(mismatch),
        }


def specialization_pattern(td: TrivData, n: Optional[int] = None) -> SpecializationReport:
    """Specialize the first column of ``Psi`` at ``theta^(q^n)`` and predict it.

    ``n`` defaults to ``2 r``. The digits of the observed column are limited by the
    precision per power of ``t`` of the motive, which should be at least
    ``(q-1) q^(R+n)`` to keep the ``t^0`` precision.

    Raises
    ------
    ValueError
        The system has no motive specification or ``n`` is not a positive multiple of ``r``.
    """
    ms = td.motive
    if ms is None:
        raise ValueError("the pattern needs the system of a single index")
    n = 2 * ms.r if n is None else n
    if n < 1 or n % ms.r:
        raise ValueError(f"N={n} is not a positive multiple of r={ms.r}")
    uspec, idx = ms.uspec, ms.index
    observed = [f.specialize(n) for f in td.first_column]
    b = poly_to_laurent(_gamma_product(idx, uspec), uspec)
    a = _mu_run(ms, 0, idx.dep)
    c = idx.color_product()
    last = observed[-1].prec
    target = ms.prec if last == math.inf else math.ceil((last + 1) / uspec.q**n)
    if target < 1:
        raise InsufficientPrecisionError(f"The first column at theta^(q^{n})", last)
    prediction = period_multiple(idx, uspec, target).twist(n) * (a * c**n)
    expected = [LaurentScalar.zero(uspec)] * (len(observed) - 1) + [prediction]
    return SpecializationReport(n, a, b, c, expected, observed)
