"""Valuation classes: additive, XOS, and subadditive identical-item tables.

All valuations are monotone set functions with v(empty) = 0.  Instances are
immutable after construction and safe to share across workers.  Construction
validates the class invariants (non-negativity, monotonicity, subadditivity
of identical-item tables) and rejects degenerate inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import lp
from .errors import DegenerateValuationError, InfeasibleInstanceError

_TOL = 1e-9


def _as_index_tuple(subset: Iterable[int], m: int) -> tuple[int, ...]:
    items = tuple(sorted(set(int(i) for i in subset)))
    if items and (items[0] < 0 or items[-1] >= m):
        raise IndexError(f"subset indices must lie in [0, {m})")
    return items


@dataclass(frozen=True)
class AdditiveValuation:
    """v(S) = sum of per-item weights over S."""

    weights: tuple[float, ...]

    def __init__(self, weights: Sequence[float]):
        w = tuple(float(x) for x in weights)
        if not w:
            raise ValueError("need at least one item")
        if any(x < 0 for x in w):
            raise ValueError("weights must be non-negative")
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return len(self.weights)

    def value(self, subset: Iterable[int]) -> float:
        return float(sum(self.weights[i] for i in _as_index_tuple(subset, self.m)))

    def total(self) -> float:
        return float(sum(self.weights))


@dataclass(frozen=True)
class XOSValuation:
    """v(S) = max over additive clauses of the clause value on S."""

    clauses: tuple[AdditiveValuation, ...]

    def __init__(self, clauses: Sequence[Sequence[float] | AdditiveValuation]):
        built = tuple(
            c if isinstance(c, AdditiveValuation) else AdditiveValuation(c) for c in clauses
        )
        if not built:
            raise ValueError("an XOS valuation needs at least one clause")
        if len({c.m for c in built}) != 1:
            raise ValueError("all clauses must cover the same item count")
        object.__setattr__(self, "clauses", built)

    @property
    def m(self) -> int:
        return self.clauses[0].m

    def value(self, subset: Iterable[int]) -> float:
        items = _as_index_tuple(subset, self.m)
        return float(max(sum(c.weights[i] for i in items) for c in self.clauses))

    def total(self) -> float:
        return self.value(range(self.m))


@dataclass(frozen=True)
class SubadditiveIdenticalValuation:
    """Identical items: any k-subset has value table[k].

    Invariants checked at construction: table[0] = 0, monotone non-decreasing,
    and subadditive (table[i+j] <= table[i] + table[j]).
    """

    table: tuple[float, ...]

    def __init__(self, table: Sequence[float]):
        t = tuple(float(x) for x in table)
        if len(t) < 2:
            raise ValueError("table must cover counts 0..m with m >= 1")
        if abs(t[0]) > _TOL:
            raise ValueError("v(0) must be 0")
        if any(t[i + 1] < t[i] - _TOL for i in range(len(t) - 1)):
            raise ValueError("table must be non-decreasing")
        m = len(t) - 1
        for i in range(1, m):
            for j in range(1, m - i + 1):
                if t[i + j] > t[i] + t[j] + _TOL:
                    raise ValueError(
                        f"not subadditive: v({i + j}) > v({i}) + v({j})"
                    )
        object.__setattr__(self, "table", t)

    @property
    def m(self) -> int:
        return len(self.table) - 1

    def value(self, subset: Iterable[int]) -> float:
        return float(self.table[len(_as_index_tuple(subset, self.m))])

    def value_of_count(self, k: int) -> float:
        if not 0 <= k <= self.m:
            raise IndexError("count out of range")
        return float(self.table[k])

    def total(self) -> float:
        return float(self.table[-1])


Valuation = Union[AdditiveValuation, XOSValuation, SubadditiveIdenticalValuation]


@dataclass(frozen=True)
class SInstanceParams:
    """Parameters of the hard identical-item instance for budget x in (0, 1/4)."""

    x: float
    m: int
    sigma: float
    d: int
    phase2_bid: float


@dataclass(frozen=True)
class CoverCertificate:
    """Bid vector r with sum r = v(I) and sum_{j in S} r_j <= beta * v(S)."""

    r: tuple[float, ...]
    beta: float


# -- operations --------------------------------------------------------------


def value(v: Valuation, subset: Iterable[int]) -> float:
    """Set value under any valuation class; v(empty) = 0."""
    return v.value(subset)


def gamma_star(v: XOSValuation | AdditiveValuation) -> AdditiveValuation:
    """The additive clause attaining the valuation's total on the full set.

    Ties are broken toward the lowest clause index so results are
    reproducible.  For an additive valuation this is the identity.
    """
    if isinstance(v, AdditiveValuation):
        return v
    totals = [c.total() for c in v.clauses]
    best = max(totals)
    idx = next(i for i, t in enumerate(totals) if t >= best - 0.0)
    return v.clauses[idx]


def normalize(v: Valuation) -> tuple[Valuation, float]:
    """Scale so the full set is worth exactly 1; returns (valuation, divisor)."""
    scale = v.total()
    if scale <= _TOL:
        raise DegenerateValuationError("v(I) must be positive to normalize")
    if isinstance(v, AdditiveValuation):
        return AdditiveValuation(tuple(w / scale for w in v.weights)), scale
    if isinstance(v, XOSValuation):
        return (
            XOSValuation(tuple(tuple(w / scale for w in c.weights) for c in v.clauses)),
            scale,
        )
    return SubadditiveIdenticalValuation(tuple(t / scale for t in v.table)), scale


def sigma_of(x: float) -> float:
    """sigma(x) = 8x / (1 - 4x) on (0, 1/4)."""
    if not 0.0 < x < 0.25:
        raise InfeasibleInstanceError("x must lie strictly inside (0, 1/4)")
    return 8.0 * x / (1.0 - 4.0 * x)


def l_threshold(x: float) -> float:
    """Minimum item count for which the hard instance is well defined."""
    s = sigma_of(x)
    return max(s + 2.0, (1.0 + s) / (x * (2.0 + s)) + 2.0)


def make_s_instance(x: float, m: int) -> tuple[SubadditiveIdenticalValuation, SInstanceParams]:
    """The normalized hard identical-item instance on m items for budget x.

    Marginals: first and last item are each worth 1/(2+sigma); each of the
    middle m-2 items adds sigma/(d(2+sigma)), d = m-2.  Requires m >= L(x) so
    the table is subadditive and the blocking bid is affordable.
    """
    s = sigma_of(x)
    if m < l_threshold(x) - 1e-12:
        raise InfeasibleInstanceError(
            f"m = {m} is below the feasibility threshold L(x) = {l_threshold(x):.6g}"
        )
    d = m - 2
    denom = 2.0 + s
    table = [0.0]
    for i in range(1, m):
        table.append(1.0 / denom + (i - 1) * s / (d * denom))
    table.append(1.0)
    params = SInstanceParams(
        x=float(x), m=int(m), sigma=s, d=d, phase2_bid=(1.0 + s) / (d * denom)
    )
    return SubadditiveIdenticalValuation(table), params


def cover_lower_bound(v: SubadditiveIdenticalValuation, q: int) -> float:
    """Partition bound: any q-subset is worth at least v(I) / ceil(m/q)."""
    if not 1 <= q <= v.m:
        raise ValueError("q out of range")
    return v.total() / math.ceil(v.m / q)


def beta_cover(v: Valuation, max_m: int = 8) -> CoverCertificate:
    """Best cover factor for v by a single bid vector, via a dense LP.

    Minimizes beta subject to sum(r) = v(I), sum_{j in S} r_j <= beta * v(S)
    for every non-empty S, and r >= 0.  Exponentially many constraints, so m
    is capped (default 8).
    """
    m = v.m
    if m > max_m:
        raise ValueError(f"m = {m} exceeds the enumeration cap {max_m}")
    vI = v.total()
    if vI <= _TOL:
        raise DegenerateValuationError("v(I) must be positive")
    n = m + 1  # variables r_1..r_m, beta
    rows, rhs = [], []
    for mask in range(1, 1 << m):
        items = [i for i in range(m) if mask >> i & 1]
        row = np.zeros(n)
        row[items] = 1.0
        row[m] = -v.value(items)
        rows.append(row)
        rhs.append(0.0)
    c = np.zeros(n)
    c[m] = 1.0
    A_eq = np.zeros((1, n))
    A_eq[0, :m] = 1.0
    x, _ = lp.solve_lp(c, A_ub=np.array(rows), b_ub=np.array(rhs), A_eq=A_eq, b_eq=[vI])
    cert = CoverCertificate(r=tuple(float(t) for t in x[:m]), beta=float(x[m]))
    _check_certificate(v, cert)
    return cert


def random_subadditive_identical(
    m: int, rng: "np.random.Generator"
) -> SubadditiveIdenticalValuation:
    """Random normalized identical-item table sampled across the subadditive
    polytope: each v(k) is drawn uniformly between its monotone floor v(k-1)
    and its subadditive ceiling min_i v(i) + v(k-i)."""
    t = [0.0, 1.0]
    for k in range(2, m + 1):
        ceiling = min(t[i] + t[k - i] for i in range(1, k))
        floor = t[k - 1]
        t.append(floor + float(rng.random()) * (ceiling - floor))
    scale = t[-1]
    return SubadditiveIdenticalValuation(tuple(x / scale for x in t))


def _check_certificate(v: Valuation, cert: CoverCertificate) -> None:
    r = np.asarray(cert.r)
    if abs(float(r.sum()) - v.total()) > 1e-9:
        raise ArithmeticError("certificate violates sum(r) = v(I)")
    for mask in range(1, 1 << v.m):
        items = [i for i in range(v.m) if mask >> i & 1]
        if float(r[items].sum()) > cert.beta * v.value(items) + 1e-7:
            raise ArithmeticError("certificate violates a cover constraint")
