"""The square-root bidding rule and why you cannot beat it sequentially.

Take any XOS valuation normalized to 1 on the full set.  Bidding
sqrt(B) * (dominant clause weight) on every item locks in a profit of at
least (1 - sqrt(B))^2 no matter what a budget-B rival does.  And no strategy
can do asymptotically better: in the m-item uniform auction the rival can
hold any bidder to (1 - sqrt(B))^2 + 1/sqrt(m).
"""

import math

import numpy as np

from riskfree import seq
from riskfree.strategies import alpha_tilde_adversary, xos_sqrt_policy
from riskfree.valuations import AdditiveValuation, XOSValuation, gamma_star

rng = np.random.Generator(np.random.Philox(2024))

# Lower bound: the guarantee holds on random instances, with the rival
# playing an exact best response to the posted bids.
print("square-root rule vs exhaustive best response")
for B in (0.04, 0.25, 0.49):
    floor = (1 - math.sqrt(B)) ** 2
    worst = 1.0
    for _ in range(200):
        m = int(rng.integers(2, 11))
        clauses = [tuple(rng.random(m)) for _ in range(int(rng.integers(0, 4)))]
        w = rng.random(m) + 1e-3
        clauses.append(tuple(w / w.sum()))
        v = XOSValuation(clauses)
        policy = xos_sqrt_policy(gamma_star(v), B)
        _, profit = seq.best_response_to_fixed_bids(v, policy.bids, B)
        worst = min(worst, profit)
    print(f"  B = {B}: floor {floor:.4f}, worst observed {worst:.4f}")

# Upper bound: the adaptive rival holds even the sqrt bidder close to the
# floor as m grows.
print("\nuniform auction, sqrt bidder vs adaptive rival")
for m in (4, 9, 16, 25):
    B = 0.25
    v = AdditiveValuation((1.0 / m,) * m)
    out = seq.simulate(v, xos_sqrt_policy(v, B), alpha_tilde_adversary(m, B), budget=B)
    print(
        f"  m = {m:>2}: profit {out.profit:.4f}  "
        f"(floor 0.25, ceiling {0.25 + 1 / math.sqrt(m):.4f})"
    )

# The exact game value sits between the two bounds everywhere.
print("\nexact game value f_m against both bounds (m = 16)")
f16 = seq.uniform_additive_value(16)
for x in (0.05, 0.2, 0.5, 0.8):
    lo = (1 - math.sqrt(x)) ** 2
    hi = lo + 0.25
    print(f"  x = {x}: {lo:.4f} <= f_16(x) = {f16(x):.4f} <= {hi:.4f}")
