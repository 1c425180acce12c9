"""Simultaneous auction resolution and the randomized first-price analysis.

The adversary in a simultaneous auction is constrained by total bid mass
(sum of bids at most B).  Against the uniform-random bidder the adversary's
best response is the quadratic program

    minimize   (1/2) sum_i g_i (1 - b_i)^2
    subject to 0 <= b_i <= 1,  sum_i g_i b_i <= B

whose optimum is the constant vector b_i = B with value (1 - B)^2 / 2 for a
normalized weight vector g.  A projected-gradient refinement and a lattice
search act as numeric cross-checks of the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .valuations import AdditiveValuation, Valuation, XOSValuation, gamma_star

_TOL = 1e-12


@dataclass(frozen=True)
class SimulOutcome:
    won_by_1: tuple[int, ...]
    bidder_paid: float
    adversary_paid: float
    profit: float


@dataclass(frozen=True)
class QPSolution:
    ratios: tuple[float, ...]
    value: float
    dual: tuple[float, ...]  # 2m box multipliers then the budget multiplier
    pg_value: float


@dataclass(frozen=True)
class CounterPlan:
    k_star: int
    p_star: float | None
    bound: float
    realized: float


@dataclass(frozen=True)
class BudgetSplit:
    w1: float
    w2: float
    regime: str  # "low" for B < 1/4, else "high"


def budget_split(B: float) -> BudgetSplit:
    """The two bid levels of the randomized simultaneous adversary."""
    if not 0.0 < B < 1.0:
        raise ValueError("B must lie in (0, 1)")
    if B < 0.25:
        return BudgetSplit(w1=2.0 * B, w2=0.0, regime="low")
    return BudgetSplit(w1=1.0 / 3.0 + 2.0 * B / 3.0, w2=4.0 * B / 3.0 - 1.0 / 3.0, regime="high")


# -- one-shot resolution ------------------------------------------------------


def resolve(
    v: Valuation,
    bids1: Iterable[float],
    bids2: Iterable[float],
    price_rule: str = "first",
) -> SimulOutcome:
    """Resolve one simultaneous auction; per-item ties go to the adversary."""
    if price_rule not in ("first", "second"):
        raise ValueError("price_rule must be 'first' or 'second'")
    b1 = np.asarray(list(bids1), dtype=float)
    b2 = np.asarray(list(bids2), dtype=float)
    if b1.shape != b2.shape or b1.shape != (v.m,):
        raise ValueError("bid vectors must both have one entry per item")
    bidder_wins = b1 > b2
    if price_rule == "first":
        paid1 = float(b1[bidder_wins].sum())
        paid2 = float(b2[~bidder_wins].sum())
    else:
        paid1 = float(b2[bidder_wins].sum())
        paid2 = float(b1[~bidder_wins].sum())
    won = tuple(np.nonzero(bidder_wins)[0].tolist())
    return SimulOutcome(
        won_by_1=won,
        bidder_paid=paid1,
        adversary_paid=paid2,
        profit=float(v.value(won) - paid1),
    )


# -- uniform-random bidder: expected profit ------------------------------------


def expected_profit_uniform_random(gstar: AdditiveValuation, ratios: Sequence[float]) -> float:
    """Closed-form expected profit surrogate sum_i g_i (1 - b_i)^2 / 2.

    Exact when the valuation equals its dominant additive clause; a lower
    bound otherwise.
    """
    g = np.asarray(gstar.weights)
    b = np.asarray(list(ratios), dtype=float)
    if b.shape != g.shape:
        raise ValueError("ratio vector length mismatch")
    if np.any(b < -1e-9) or np.any(b > 1.0 + 1e-9):
        raise ValueError("ratios must lie in [0, 1]")
    return float(np.sum(g * 0.5 * (1.0 - b) ** 2))


def exact_xos_expected_profit(v: XOSValuation, ratios: Sequence[float]) -> float:
    """Exact expected profit of the uniform-random bidder against ratio bids.

    Enumerates all win sets (2^m terms, m capped at 20): the bidder wins item
    i with probability 1 - b_i and pays her own bid, in expectation
    g_i (1 - b_i^2) / 2 per item.
    """
    m = v.m
    if m > 20:
        raise ValueError("exact enumeration is capped at m = 20")
    g = np.asarray(gamma_star(v).weights)
    b = np.asarray(list(ratios), dtype=float)
    expected_value = 0.0
    chunk = 1 << 16
    clause_mat = np.array([c.weights for c in v.clauses])
    for start in range(0, 1 << m, chunk):
        masks = np.arange(start, min(start + chunk, 1 << m), dtype=np.int64)
        bits = ((masks[:, None] >> np.arange(m)) & 1).astype(float)
        probs = np.prod(bits * (1.0 - b) + (1.0 - bits) * b, axis=1)
        vals = (bits @ clause_mat.T).max(axis=1)
        expected_value += float(probs @ vals)
    expected_pay = float(np.sum(g * (1.0 - b**2) / 2.0))
    return expected_value - expected_pay


# -- the adversarial quadratic program ------------------------------------------


def project_budget_box(z: np.ndarray, g: np.ndarray, B: float) -> np.ndarray:
    """Euclidean projection onto {0 <= b <= 1, g . b <= B}.

    If the clipped point violates the budget plane, the projection is
    clip(z - theta * g) for the unique theta > 0 putting it on the plane;
    theta is found exactly by scanning the clip breakpoints.
    """
    b = np.clip(z, 0.0, 1.0)
    if float(g @ b) <= B + _TOL:
        return b
    thetas = np.concatenate(([0.0], (z - 1.0) / g, z / g))
    thetas = np.unique(thetas[thetas >= 0.0])
    vals = g @ np.clip(z[:, None] - thetas[None, :] * g[:, None], 0.0, 1.0)
    below = np.nonzero(vals <= B)[0]
    if below.size == 0:
        return np.zeros_like(z)  # B <= 0: only the origin is feasible
    i = int(below[0])
    if i == 0 or vals[i] == vals[i - 1]:
        theta = float(thetas[i])
    else:
        frac = (vals[i - 1] - B) / (vals[i - 1] - vals[i])
        theta = float(thetas[i - 1] + frac * (thetas[i] - thetas[i - 1]))
    return np.clip(z - theta * g, 0.0, 1.0)


def projected_gradient_qp(
    g: np.ndarray, B: float, iters: int = 50000, starts: int = 3, seed: int = 0
) -> tuple[np.ndarray, float]:
    """Minimize (1/2) sum g_i (1-b_i)^2 over the budget box by PG descent.

    Step 1/L with L = max g_i; the iteration stops early once the iterate is
    stationary to machine precision.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    step = 1.0 / float(np.max(g))
    best_b, best_v = None, math.inf
    for s in range(starts):
        b = project_budget_box(rng.random(len(g)) if s else np.full(len(g), B), g, B)
        for it in range(iters):
            grad = -g * (1.0 - b)
            nxt = project_budget_box(b - step * grad, g, B)
            if it % 16 == 0 and float(np.max(np.abs(nxt - b))) < 1e-13:
                b = nxt
                break
            b = nxt
        val = float(np.sum(g * 0.5 * (1.0 - b) ** 2))
        if val < best_v:
            best_b, best_v = b, val
    return best_b, best_v


def qp_grid_search(g: np.ndarray, B: float, step: float = 0.001) -> float:
    """Independent lattice oracle for the two-item QP."""
    if len(g) != 2:
        raise ValueError("the lattice oracle is for m = 2")
    axis = np.arange(0.0, 1.0 + step / 2, step)
    b1, b2 = np.meshgrid(axis, axis, indexing="ij")
    feasible = g[0] * b1 + g[1] * b2 <= B + 1e-12
    obj = 0.5 * (g[0] * (1.0 - b1) ** 2 + g[1] * (1.0 - b2) ** 2)
    return float(obj[feasible].min())


def adversary_qp(gstar: AdditiveValuation, B: float, seed: int = 0) -> QPSolution:
    """Optimal adversary ratios against the uniform-random bidder.

    Stationarity forces a constant ratio, so b_i = B with value (1-B)^2 / 2;
    a projected-gradient run must agree within 1e-6 or this raises.  The
    returned dual is the feasible multiplier vector with 1-B on the budget
    constraint, whose objective equals the primal value (strong duality).
    """
    g = np.asarray(gstar.weights)
    if abs(float(g.sum()) - 1.0) > 1e-9:
        raise ValueError("gstar must be normalized (weights summing to 1)")
    if not 0.0 < B < 1.0:
        raise ValueError("B must lie in (0, 1)")
    value = 0.5 * (1.0 - B) ** 2
    _, pg_value = projected_gradient_qp(g, B, seed=seed)
    if abs(pg_value - value) > 1e-6:
        raise ArithmeticError(
            f"projected gradient ({pg_value}) disagrees with the closed form ({value})"
        )
    m = len(g)
    dual = (0.0,) * (2 * m) + (1.0 - B,)
    dual_objective = value  # evaluated at this multiplier; weak duality check
    if value < dual_objective - 1e-12:
        raise ArithmeticError("weak duality violated")
    return QPSolution(
        ratios=(float(B),) * m, value=float(value), dual=dual, pg_value=float(pg_value)
    )


def second_price_truthful_worst(
    v: XOSValuation | AdditiveValuation, B: float
) -> tuple[float, tuple[int, ...]]:
    """Worst-case profit of truthful dominant-clause bidding in the
    simultaneous second-price auction, over every adversary response.

    The adversary takes any set whose dominant-clause mass fits his budget
    (ties go to him, so exactly B is enough) and spends whatever budget is
    left driving up the prices of the remaining items, each capped by the
    bidder's bid on it.  Enumerates all 2^m take-sets.
    """
    g = np.asarray(gamma_star(v).weights)
    m = v.m
    if m > 20:
        raise ValueError("enumeration capped at m = 20")
    worst, worst_mask = math.inf, 0
    chunk = 1 << 16
    if isinstance(v, XOSValuation):
        clause_mat = np.array([c.weights for c in v.clauses])
    else:
        clause_mat = np.array([v.weights])
    for start in range(0, 1 << m, chunk):
        masks = np.arange(start, min(start + chunk, 1 << m), dtype=np.int64)
        tbits = ((masks[:, None] >> np.arange(m)) & 1).astype(float)
        cost = tbits @ g
        feasible = cost <= B + 1e-12
        if not np.any(feasible):
            continue
        tbits, masks, cost = tbits[feasible], masks[feasible], cost[feasible]
        won_bits = 1.0 - tbits
        values = (won_bits @ clause_mat.T).max(axis=1)
        drain = np.minimum(B - cost, won_bits @ g)
        profit = values - drain
        i = int(np.argmin(profit))
        if profit[i] < worst:
            worst, worst_mask = float(profit[i]), int(masks[i])
    plan = tuple(i for i in range(m) if worst_mask >> i & 1)
    return worst, plan


# -- deterministic counter-strategies -------------------------------------------


def deterministic_counter(bids1_sorted: Sequence[float], B: float) -> CounterPlan:
    """The prefix counter against a pure bidder in the uniform additive
    simultaneous auction.

    With bids sorted non-decreasingly the adversary wins the longest prefix
    strictly affordable under B; p* is the first bid the bidder keeps.  The
    ``bound`` field is the claim bound (m - B/p* + 1)(1/m - p*); ``realized``
    is the bidder's actual profit minimized over all affordable prefixes.
    """
    bids = np.asarray(list(bids1_sorted), dtype=float)
    m = len(bids)
    if m == 0 or np.any(bids < -_TOL):
        raise ValueError("bids must be a non-empty non-negative vector")
    if np.any(np.diff(bids) < -_TOL):
        raise ValueError("bids must be sorted non-decreasingly")
    if float(bids.max(initial=0.0)) <= 0.0:
        raise ValueError("all-zero bid vector: the prefix counter is undefined")
    cum = np.concatenate(([0.0], np.cumsum(bids)))
    affordable = np.nonzero(cum < B - 1e-12)[0]
    if affordable.size == 0:
        affordable = np.array([0])
    k_star = int(affordable.max())
    margins = 1.0 / m - bids
    suffix = np.concatenate((np.cumsum(margins[::-1])[::-1], [0.0]))
    realized = float(suffix[affordable].min())
    if k_star >= m:
        return CounterPlan(k_star=m, p_star=None, bound=0.0, realized=realized)
    p_star = float(bids[k_star])
    if p_star <= 0.0:
        bound = 1.0  # degenerate: zero-price prefix, the claim bound is vacuous
    else:
        bound = (m - B / p_star + 1.0) * (1.0 / m - p_star)
    return CounterPlan(k_star=k_star, p_star=p_star, bound=bound, realized=realized)


def optimal_counter_price(m: int, B: float) -> float:
    """Bid level maximizing the prefix-counter bound: sqrt(B / (m (m+1)))."""
    return math.sqrt(B / (m * (m + 1.0)))


# -- the randomized w1/w2 adversary ---------------------------------------------


def randomized_adversary(m: int, B: float, seed: int) -> np.ndarray:
    """One sampled bid vector: w1/m on a uniform m/2-subset, w2/m elsewhere."""
    if m % 2 != 0:
        raise ValueError("m must be even")
    split = budget_split(B)
    rng = np.random.Generator(np.random.Philox(int(seed)))
    bids = np.full(m, split.w2 / m)
    chosen = rng.choice(m, size=m // 2, replace=False)
    bids[chosen] = split.w1 / m
    return bids


def best_response_profit(m: int, B: float) -> float:
    """Bidder 1's best-response value against the randomized adversary on the
    uniform additive instance: 1 - 2B below budget 1/4, else 2(1-B)/3."""
    if m % 2 != 0:
        raise ValueError("m must be even")
    if B < 0.25:
        return 1.0 - 2.0 * B
    return 2.0 * (1.0 - B) / 3.0


def exhaustive_best_response_split(m: int, B: float) -> tuple[float, tuple[int, int]]:
    """Enumerated bidder best response against the w1/w2 adversary.

    Undominated per-item bids are: skip, beat w2/m (wins when the item is off
    the random subset, probability 1/2), or beat w1/m (always wins).  The
    expectation is linear, so enumerating the counts (n1, n2) of items played
    at each level is exhaustive.
    """
    split = budget_split(B)
    gain_mid = 0.5 * (1.0 - split.w2) / m  # wins iff off-subset, pays w2/m
    gain_top = (1.0 - split.w1) / m  # always wins, pays w1/m
    best, arg = 0.0, (0, 0)
    for n1 in range(m + 1):
        for n2 in range(m + 1 - n1):
            val = n1 * gain_mid + n2 * gain_top
            if val > best + _TOL:
                best, arg = val, (n1, n2)
    return float(best), arg


# -- pure-adversary counter ------------------------------------------------------


def bidder_counter_to_pure(
    v: XOSValuation | AdditiveValuation, bids2: Sequence[float]
) -> tuple[np.ndarray, float]:
    """Counter a known pure adversary vector: outbid wherever his bid is below
    the dominant clause weight.

    Returns (limit bid vector, profit).  For a normalized valuation the
    profit is at least 1 - sum(bids2); violation raises.
    """
    g = np.asarray(gamma_star(v).weights)
    b2 = np.asarray(list(bids2), dtype=float)
    if b2.shape != g.shape:
        raise ValueError("bid vector length mismatch")
    wins = b2 < g
    bids1 = np.where(wins, b2, 0.0)
    won = tuple(np.nonzero(wins)[0].tolist())
    profit = float(v.value(won) - b2[wins].sum())
    floor = 1.0 - float(b2.sum())
    if abs(v.total() - 1.0) <= 1e-9 and profit < floor - 1e-9:
        raise ArithmeticError("counter strategy fell below the 1 - B floor")
    return bids1, profit
