"""Named bidding policies for both sides of the sequential game, plus the
randomized simultaneous bidder.

A sequential policy is a callable mapping a ``SeqGameState`` to a bid.
Policies are immutable after construction; randomized ones carry their own
generator and expose ``with_seed`` so simulations replay exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleInstanceError
from .seq import SeqGameState, alpha_params, equalization_alpha
from .valuations import (
    AdditiveValuation,
    SInstanceParams,
    SubadditiveIdenticalValuation,
)


@dataclass(frozen=True)
class FixedBidsPolicy:
    """Non-adaptive: bid ``bids[t]`` on the round-t item regardless of history."""

    bids: tuple[float, ...]
    budget: float | None = None

    def __call__(self, state: SeqGameState) -> float:
        return self.bids[state.round]


@dataclass(frozen=True)
class ConstantBidPolicy:
    bid: float
    budget: float | None = None

    def __call__(self, state: SeqGameState) -> float:
        return self.bid


def xos_sqrt_policy(gstar: AdditiveValuation, B: float) -> FixedBidsPolicy:
    """Bid sqrt(B) times the dominant additive clause's weight on every item.

    Guarantees (1 - sqrt(B))^2 on any normalized XOS valuation whose
    dominant clause is ``gstar``, against any budget-B adversary.
    """
    if B < 0:
        raise ValueError("budget must be non-negative")
    root = math.sqrt(B)
    return FixedBidsPolicy(bids=tuple(root * w for w in gstar.weights))


def low_budget_policy(B: float, m: int | None = None) -> ConstantBidPolicy:
    """Bid the adversary's whole budget on every item (meant for B < 1/m^2)."""
    if m is not None and B >= 1.0 / m**2:
        warnings.warn("low_budget_policy outside its intended range B < 1/m^2")
    return ConstantBidPolicy(bid=float(B))


def high_budget_policy(m: int, B: float) -> ConstantBidPolicy:
    """Bid B/m on every item (meant for B > (m-1)/m)."""
    if B <= (m - 1) / m:
        warnings.warn("high_budget_policy outside its intended range B > (m-1)/m")
    return ConstantBidPolicy(bid=float(B) / m)


@dataclass(frozen=True)
class AlphaTildeAdversary:
    """Adversary for the uniform additive auction A_m.

    Each round the remaining game is a rescaled A_{m'}; in the intermediate
    budget regime the bid ratio is the closed-form sufficient ratio, outside
    it the exact equalization ratio from the value recursion.
    """

    m: int
    budget: float

    def __call__(self, state: SeqGameState) -> float:
        m_rem = len(state.remaining)
        per_item = 1.0 / state.m
        r = state.adversary_budget
        if m_rem == 0 or r <= 0:
            return 0.0
        x_sub = r / (m_rem * per_item)
        if m_rem == 1:
            ratio = min(1.0, x_sub)
        else:
            p = alpha_params(m_rem, x_sub)
            if p.intermediate:
                ratio = min(max(p.alpha_tilde, 0.0), p.alpha_max)
            else:
                ratio = equalization_alpha(m_rem, x_sub)[0]
        return min(ratio * per_item, r)


def alpha_tilde_adversary(m: int, x: float) -> AlphaTildeAdversary:
    return AlphaTildeAdversary(m=m, budget=float(x))


@dataclass(frozen=True)
class ConstantPricePlan:
    k: int
    q: int
    p: float
    bound: float  # t_{k-1}(B) - (B k / (k-1)) / m


@dataclass(frozen=True)
class ConstantPricePolicy:
    """Bid a flat price until the target allocation is reached, then stop."""

    p: float
    q: int

    def __call__(self, state: SeqGameState) -> float:
        return self.p if len(state.won_by_1) < self.q else 0.0


def constant_price_policy(
    si: SubadditiveIdenticalValuation, B: float, k: int
) -> tuple[ConstantPricePolicy, ConstantPricePlan]:
    """Flat-price strategy targeting q = ceil(m/k) wins at p = B/(m-q+1).

    The price is the smallest at which the adversary's budget cannot block
    the target allocation; the plan's ``bound`` is the guaranteed profit.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    m = si.m
    if m < k:
        raise ValueError("need m >= k")
    q = math.ceil(m / k)
    p = B / (m - q + 1)
    bound = tangent_value(k - 1, B) - (B * k / (k - 1)) / m
    return ConstantPricePolicy(p=p, q=q), ConstantPricePlan(k=k, q=q, p=p, bound=bound)


def tangent_value(k: int, B: float) -> float:
    """t_k(B) = 1/(k+1) - B/k, tangent to (1-sqrt(B))^2 at B = (k/(k+1))^2."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return 1.0 / (k + 1) - B / k


def choose_k(B: float, k_cap: int = 400) -> int:
    """Allocation coarseness whose tangent bound is highest at budget B.

    Maximizes t_{k-1}(B) over k >= 2; ties break toward smaller k.
    """
    best_k, best_val = 2, tangent_value(1, B)
    for k in range(3, k_cap + 1):
        val = tangent_value(k - 1, B)
        if val > best_val + 1e-15:
            best_k, best_val = k, val
    return best_k


def constant_price_worst_profit(
    si: SubadditiveIdenticalValuation, B: float, k: int
) -> tuple[float, int]:
    """Exhaustive adversary best response to the flat-price policy.

    Against a bidder who pays p until she holds q items, the adversary's only
    lever is how many rounds to win while she is still bidding; each such win
    costs him p (he must outbid it), and the total must stay strictly below
    B.  Returns (bidder profit, adversary win count at the minimum).
    """
    policy, plan = constant_price_policy(si, B, k)
    m, q, p = si.m, plan.q, plan.p
    if p <= 0:
        return si.value_of_count(q) if q <= m else si.total(), 0
    w_max = min(m, int(math.floor((B - 1e-12) / p - 1e-12)) + 1)
    # w wins at price p each require w * p < B strictly
    while w_max > 0 and w_max * p >= B - 1e-12:
        w_max -= 1
    worst, worst_w = math.inf, 0
    for w in range(w_max + 1):
        c = min(q, m - w)
        profit = si.value_of_count(c) - c * p
        if profit < worst:
            worst, worst_w = profit, w
    return float(worst), worst_w


@dataclass(frozen=True)
class SInstanceAdversary:
    """Three-phase adversary for the hard identical-item instance.

    Phase 1: bid 0 until Bidder 1 wins an item.  Phase 2 (entered only if the
    adversary holds nothing): bid the blocking price until he wins once.
    Phase 3: play the exact optimal bid for the rescaled uniform additive
    subgame, valued by the piecewise-linear recursion.
    """

    params: SInstanceParams

    @property
    def budget(self) -> float:
        return self.params.x

    def __call__(self, state: SeqGameState) -> float:
        if len(state.won_by_1) == 0:
            return 0.0
        if state.adversary_wins == 0:
            return min(self.params.phase2_bid, state.adversary_budget)
        m_rem = len(state.remaining)
        if m_rem == 0 or state.adversary_budget <= 0:
            return 0.0
        s, d = self.params.sigma, self.params.d
        mu = s / (d * (2.0 + s))  # marginal value of each remaining item
        x_sub = state.adversary_budget / (m_rem * mu)
        ratio = min(1.0, x_sub) if m_rem == 1 else equalization_alpha(m_rem, x_sub)[0]
        return min(ratio * mu, state.adversary_budget)


def s_instance_adversary(params: SInstanceParams) -> SInstanceAdversary:
    if params.m < params.sigma + 2 - 1e-12:
        raise InfeasibleInstanceError("instance is not subadditive at this size")
    if params.phase2_bid > params.x + 1e-12:
        raise InfeasibleInstanceError("blocking bid exceeds the budget")
    return SInstanceAdversary(params=params)


class UniformRandomBidder:
    """Simultaneous bidder drawing an independent U(0,1) ratio per item.

    ``draw`` returns one bid vector X_i * gstar_i; the stream is seeded and
    counter-based, so runs replay exactly.  Use ``with_seed`` to fork an
    independent copy instead of sharing one instance across workers.
    """

    def __init__(self, gstar: AdditiveValuation, seed: int):
        self.gstar = gstar
        self.seed = int(seed)
        self._rng = np.random.Generator(np.random.Philox(self.seed))

    def draw(self) -> np.ndarray:
        x = self._rng.random(len(self.gstar.weights))
        return x * np.asarray(self.gstar.weights)

    def with_seed(self, seed: int) -> "UniformRandomBidder":
        return UniformRandomBidder(self.gstar, seed)


def uniform_random_policy(gstar: AdditiveValuation, seed: int) -> UniformRandomBidder:
    return UniformRandomBidder(gstar, seed)
