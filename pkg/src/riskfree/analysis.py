"""Closed-form bounds, small-auction table replicas, and the numeric
verification harness.

Each ``verify_*`` function sweeps a family of theorem statements over a grid
and returns a :class:`SweepReport` whose ``min_margin`` is the worst observed
value of (bound - quantity); the family passes when that margin is no worse
than -tolerance.  Asymptotic constants that the statements leave implicit are
measured and reported, never assumed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import seq, simul
from .strategies import (
    choose_k,
    constant_price_worst_profit,
    tangent_value,
)
from .valuations import (
    XOSValuation,
    l_threshold,
    make_s_instance,
    sigma_of,
)

# re-exported closed forms living with their consumers
from .simul import BudgetSplit, budget_split  # noqa: F401

sigma = sigma_of


@dataclass(frozen=True)
class TangentBound:
    k: int
    value: float
    tangency: float  # budget where t_k touches (1 - sqrt(B))^2


@dataclass
class SweepReport:
    name: str
    description: str
    n_points: int
    min_margin: float
    worst_point: tuple
    passed: bool
    runtime_s: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "n_points": self.n_points,
            "min_margin": self.min_margin,
            "worst_point": list(self.worst_point),
            "passed": self.passed,
            "runtime_s": self.runtime_s,
            "extra": self.extra,
        }

    def summary_line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{self.name:<22} n={self.n_points:<7} min_margin={self.min_margin:+.3e} "
            f"{verdict}  ({self.runtime_s:.2f}s)"
        )


# -- closed forms --------------------------------------------------------------


def f_bound(B: float) -> float:
    """The fair-split bound (1 - sqrt(B))^2."""
    if B < 0:
        raise ValueError("B must be non-negative")
    return (1.0 - math.sqrt(B)) ** 2


def tangent_bound(k: int, B: float) -> TangentBound:
    return TangentBound(k=k, value=tangent_value(k, B), tangency=(k / (k + 1.0)) ** 2)


def t_star(B: float) -> tuple[float, int]:
    """Upper envelope of the tangent family and its attaining index.

    Tangency points (k/(k+1))^2 accumulate at 1, so searching k up to
    ceil(1/(1 - sqrt(B))) + 2 is sufficient; ties break toward smaller k.
    """
    if B < 0:
        raise ValueError("B must be non-negative")
    root = math.sqrt(B)
    k_hi = 64 if root >= 1.0 else math.ceil(1.0 / (1.0 - root)) + 2
    best_val, best_k = tangent_value(1, B), 1
    for k in range(2, k_hi + 1):
        v = tangent_value(k, B)
        if v > best_val + 1e-15:
            best_val, best_k = v, k
    return best_val, best_k


def table_A(m: int, B: float) -> float:
    """Exact guaranteed-profit tables for the 1/2/3-item uniform auctions."""
    if B < 0:
        raise ValueError("B must be non-negative")
    if m == 1:
        return 1.0 - B if B < 1.0 else 0.0
    if m == 2:
        if B < 0.25:
            return 1.0 - 2.0 * B
        if B < 0.5:
            return 0.75 - B
        if B < 1.0:
            return 0.5 - B / 2.0
        return 0.0
    if m == 3:
        if B < 1.0 / 9.0:
            return 1.0 - 3.0 * B
        if B < 1.0 / 6.0:
            return 8.0 / 9.0 - 2.0 * B
        if B < 1.0 / 3.0:
            return 7.0 / 9.0 - 4.0 * B / 3.0
        if B < 5.0 / 9.0:
            return 7.0 / 12.0 - 3.0 * B / 4.0
        if B < 2.0 / 3.0:
            return 4.0 / 9.0 - B / 2.0
        if B < 1.0:
            return 1.0 / 3.0 - B / 3.0
        return 0.0
    raise ValueError("tables exist for m in {1, 2, 3}")


# -- verification families ------------------------------------------------------


def verify_value_bound(m_max: int = 30, grid_step: float = 0.005, tol: float = 1e-9) -> SweepReport:
    """(a) f_m(x) <= (1 - sqrt(x))^2 + 1/sqrt(m) on a budget grid."""
    t0 = time.perf_counter()
    xs = np.arange(grid_step, 1.0, grid_step)
    bound_base = (1.0 - np.sqrt(xs)) ** 2
    worst, worst_pt, n = math.inf, (None, None), 0
    ladder = seq.f_ladder(m_max)
    for m in range(1, m_max + 1):
        margins = bound_base + 1.0 / math.sqrt(m) - ladder[m - 1](xs)
        n += len(xs)
        i = int(np.argmin(margins))
        if margins[i] < worst:
            worst, worst_pt = float(margins[i]), (m, float(xs[i]))
    return SweepReport(
        name="xos_value_bound",
        description=f"f_m <= f + 1/sqrt(m), m <= {m_max}, step {grid_step}",
        n_points=n,
        min_margin=worst,
        worst_point=worst_pt,
        passed=worst >= -tol,
        runtime_s=time.perf_counter() - t0,
    )


def _intermediate_grid(m: int, grid_step: float) -> np.ndarray:
    lo, hi = 1.0 / m**2, (m - 1.0) / m
    pts = np.arange(lo, hi + grid_step / 2, grid_step)
    return np.clip(pts, lo, hi)


def verify_alpha_feasibility(m_max: int = 30, grid_step: float = 0.002, tol: float = 1e-9) -> SweepReport:
    """(b) 0 <= alpha_tilde <= alpha_max on the intermediate budget interval."""
    t0 = time.perf_counter()
    worst, worst_pt, n = math.inf, (None, None), 0
    for m in range(2, m_max + 1):
        xs = _intermediate_grid(m, grid_step)
        one_minus = 1.0 - np.sqrt(xs)
        at = 1.0 - 2.0 * m * one_minus + 2.0 * math.sqrt(m * (m - 1.0)) * one_minus
        amax = np.minimum(1.0, m * xs)
        margins = np.minimum(at, amax - at)
        n += len(xs)
        i = int(np.argmin(margins))
        if margins[i] < worst:
            worst, worst_pt = float(margins[i]), (m, float(xs[i]))
    return SweepReport(
        name="alpha_feasibility",
        description=f"0 <= alpha_tilde <= alpha_max, m <= {m_max}, step {grid_step}",
        n_points=n,
        min_margin=worst,
        worst_point=worst_pt,
        passed=worst >= -tol,
        runtime_s=time.perf_counter() - t0,
    )


def verify_gh_bound(m_max: int = 30, grid_step: float = 0.002, tol: float = 1e-9) -> SweepReport:
    """(c) g_m(x, alpha_tilde) and h_m(x, alpha_tilde) <= f(x) + 1/sqrt(m)."""
    t0 = time.perf_counter()
    worst, worst_pt, n = math.inf, (None, None), 0
    ladder = seq.f_ladder(max(m_max - 1, 1))
    for m in range(2, m_max + 1):
        xs = _intermediate_grid(m, grid_step)
        one_minus = 1.0 - np.sqrt(xs)
        at = 1.0 - 2.0 * m * one_minus + 2.0 * math.sqrt(m * (m - 1.0)) * one_minus
        at = np.clip(at, 0.0, np.minimum(1.0, m * xs))
        fp = ladder[m - 2]
        r = (m - 1.0) / m
        g = (1.0 - at) / m + r * fp(m * xs / (m - 1.0))
        h = r * fp((m * xs - at) / (m - 1.0))
        bound = (1.0 - np.sqrt(xs)) ** 2 + 1.0 / math.sqrt(m)
        margins = bound - np.maximum(g, h)
        n += len(xs)
        i = int(np.argmin(margins))
        if margins[i] < worst:
            worst, worst_pt = float(margins[i]), (m, float(xs[i]))
    return SweepReport(
        name="gh_at_alpha_tilde",
        description=f"g, h at alpha_tilde <= f + 1/sqrt(m), m <= {m_max}, step {grid_step}",
        n_points=n,
        min_margin=worst,
        worst_point=worst_pt,
        passed=worst >= -tol,
        runtime_s=time.perf_counter() - t0,
    )


def verify_si_lower(
    n_instances: int = 500,
    m_choices: Sequence[int] = (20, 50, 100),
    seed: int = 0,
    tol: float = 1e-9,
) -> SweepReport:
    """(d) flat-price profit >= t*(B) - (B k/(k-1))/m on random instances."""
    from .valuations import random_subadditive_identical

    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.Philox(seed))
    worst, worst_pt = math.inf, (None, None)
    for _ in range(n_instances):
        m = int(rng.choice(np.asarray(m_choices)))
        si = random_subadditive_identical(m, rng)
        B = float(rng.uniform(0.02, 0.6))
        k = choose_k(B)
        profit, _ = constant_price_worst_profit(si, B, k)
        target = t_star(B)[0] - (B * k / (k - 1.0)) / m
        margin = profit - target
        if margin < worst:
            worst, worst_pt = float(margin), (m, B)
    return SweepReport(
        name="si_lower_bound",
        description=f"flat price >= t* - (Bk/(k-1))/m on {n_instances} random instances",
        n_points=n_instances,
        min_margin=worst,
        worst_point=worst_pt,
        passed=worst >= -tol,
        runtime_s=time.perf_counter() - t0,
    )


def si_upper_response_value(x: float, m: int) -> dict:
    """Best response value of the bidder against the three-phase adversary on
    the hard instance, maximized over the first-win / first-loss classes.

    Subgames are valued with the exact piecewise-linear solver.  Returns the
    per-class maxima and the overall value.
    """
    si, params = make_s_instance(x, m)
    s, d = params.sigma, params.d
    mu = s / (d * (2.0 + s))
    p2 = params.phase2_bid
    v1 = 1.0 / (2.0 + s)
    ladder = seq.f_ladder(max(m - 2, 1))

    concede_first, arg_j1 = 0.0, None  # adversary takes items 1..j1-1 free
    for j1 in range(2, m + 1):
        m_rem = m - j1
        val = v1 if m_rem == 0 else v1 + m_rem * mu * ladder[m_rem - 1](d / (4.0 * m_rem))
        if val > concede_first:
            concede_first, arg_j1 = val, j1

    buy_through = 1.0 - (d + 1) * p2  # she wins every item

    concede_later, arg_j2 = -math.inf, None  # she wins first, loses at j2
    for j2 in range(2, m + 1):
        c = j2 - 1
        held = v1 + (c - 1) * mu
        paid = (j2 - 2) * p2
        m_rem = m - j2
        val = held - paid
        if m_rem >= 1:
            x_sub = (x - p2) * d / (4.0 * x * m_rem)
            val += m_rem * mu * ladder[m_rem - 1](x_sub)
        if val > concede_later:
            concede_later, arg_j2 = val, j2

    value = max(0.0, concede_first, buy_through, concede_later)
    return {
        "value": value,
        "concede_first": concede_first,
        "best_j1": arg_j1,
        "buy_through": buy_through,
        "concede_later": concede_later,
        "best_j2": arg_j2,
    }


def verify_si_upper(
    x_list: Sequence[float] = (0.05, 0.10, 0.15, 0.20),
    m_list: Sequence[int] = (50, 100, 200),
) -> SweepReport:
    """(e) hard-instance response classes stay near t_1(x); the excess over
    t_1 is measured, reported as C = max (V - t_1) sqrt(m), and must shrink
    between the smallest and largest m."""
    t0 = time.perf_counter()
    rows = []
    c_measured = 0.0
    worst, worst_pt = math.inf, (None,)  # convergence gap, per x
    for x in x_list:
        ms = sorted({max(math.ceil(l_threshold(x)), m_list[0]), *m_list[1:]})
        ms = [m for m in ms if m >= l_threshold(x)]
        t1 = tangent_value(1, x)
        excesses = []
        for m in ms:
            val = si_upper_response_value(x, m)["value"]
            excess = val - t1
            c_measured = max(c_measured, excess * math.sqrt(m))
            excesses.append(excess)
            rows.append({"x": x, "m": m, "value": val, "excess": excess})
        if len(excesses) >= 2:
            gap = excesses[0] - excesses[-1]  # positive means shrinking excess
            if gap < worst:
                worst, worst_pt = gap, (x,)
    passed = worst > 0.0 and math.isfinite(c_measured)
    return SweepReport(
        name="si_upper_bound",
        description="three-phase adversary holds responses to t_1(x) + C/sqrt(m); "
        "margin = worst shrink of the excess between the smallest and largest m",
        n_points=len(rows),
        min_margin=worst,
        worst_point=worst_pt,
        passed=passed,
        runtime_s=time.perf_counter() - t0,
        extra={"C_measured": c_measured, "rows": rows},
    )


def verify_tangency(k_max: int = 50, grid_step: float = 0.001, tol: float = 1e-9) -> SweepReport:
    """(f) t_k touches (1-sqrt(B))^2 exactly at (k/(k+1))^2 and t* dominates."""
    t0 = time.perf_counter()
    worst, worst_pt = math.inf, (None,)
    for k in range(1, k_max + 1):
        pt = (k / (k + 1.0)) ** 2
        gap = -abs(tangent_value(k, pt) - f_bound(pt))
        if gap < worst:
            worst, worst_pt = gap, (k,)
    grid = np.arange(grid_step, 1.0, grid_step)
    n = k_max + len(grid) * k_max
    for B in grid:
        env = t_star(float(B))[0]
        for k in range(1, k_max + 1):
            gap = env - tangent_value(k, float(B))
            if gap < worst:
                worst, worst_pt = gap, (float(B), k)
    return SweepReport(
        name="tangency",
        description=f"t_k tangency identities and envelope dominance, k <= {k_max}",
        n_points=n,
        min_margin=worst,
        worst_point=worst_pt,
        passed=worst >= -tol,
        runtime_s=time.perf_counter() - t0,
    )


def verify_simul(seed: int = 0, tol: float = 1e-9) -> SweepReport:
    """QP agreement, second-price floor, and the randomized adversary values."""
    from .valuations import AdditiveValuation

    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.Philox(seed))
    worst, worst_pt, n = math.inf, (None,), 0

    def note(margin: float, pt) -> None:
        nonlocal worst, worst_pt, n
        n += 1
        if margin < worst:
            worst, worst_pt = float(margin), pt

    # QP: closed form vs projected gradient (and lattice at m = 2).
    for B in np.arange(0.1, 0.95, 0.1):
        B = float(B)
        for trial in range(3):
            m = 2 if trial < 2 else int(rng.integers(3, 7))
            w = rng.random(m) + 0.05
            g = AdditiveValuation(tuple(w / w.sum()))
            sol = simul.adversary_qp(g, B, seed=int(rng.integers(2**31)))
            note(1e-6 - abs(sol.pg_value - sol.value), ("qp_pg", B, m))
            if m == 2:
                lattice = simul.qp_grid_search(np.asarray(g.weights), B)
                note(1e-4 - abs(lattice - sol.value), ("qp_lattice", B))

    # Second price: truthful dominant-clause bidding nets at least 1 - B.
    for _ in range(20):
        m = int(rng.integers(2, 9))
        v = _random_xos(m, rng)
        B = float(rng.uniform(0.05, 0.9))
        worst_profit, _ = simul.second_price_truthful_worst(v, B)
        note(worst_profit - (1.0 - B), ("second_price", m, B))

    # Randomized split adversary: exact best response equals the closed form.
    for m in (4, 8, 12):
        for B in np.arange(0.05, 1.0, 0.05):
            B = float(B)
            got, _ = simul.exhaustive_best_response_split(m, B)
            want = simul.best_response_profit(m, B)
            note(tol - abs(got - want), ("split_value", m, B))
            note((1.0 - B) - got - 1e-15, ("split_below_1mB", m, B))

    # (1-B)^2/2 beats (1-sqrt(B))^2 beyond B = 3 - 2 sqrt(2).
    for B in np.arange(3.0 - 2.0 * math.sqrt(2.0) + 0.01, 1.0, 0.01):
        note(0.5 * (1.0 - B) ** 2 - f_bound(float(B)), ("qp_vs_sqrt", float(B)))

    return SweepReport(
        name="simultaneous",
        description="QP agreement, 1-B second-price floor, w1/w2 adversary values",
        n_points=n,
        min_margin=worst,
        worst_point=worst_pt,
        passed=worst >= -tol,
        runtime_s=time.perf_counter() - t0,
    )


def _random_xos(m: int, rng: np.random.Generator, max_clauses: int = 5) -> XOSValuation:
    """Random normalized XOS instance (dominant clause sums to 1)."""
    ell = int(rng.integers(1, max_clauses + 1))
    clauses = []
    for _ in range(ell):
        w = rng.random(m) + 1e-3
        clauses.append(tuple(w / w.sum() * float(rng.uniform(0.3, 1.0))))
    # force one clause to be the normalized dominant one
    w = rng.random(m) + 1e-3
    clauses.append(tuple(w / w.sum()))
    return XOSValuation(tuple(clauses))


def verify_all(
    suites: Iterable[str] = ("xos", "si", "simul"),
    m_max: int = 30,
    grid_step: float = 0.01,
    tol: float = 1e-9,
    seed: int = 0,
) -> list[SweepReport]:
    reports: list[SweepReport] = []
    wanted = set(suites)
    if "xos" in wanted:
        reports.append(verify_value_bound(m_max=m_max, grid_step=grid_step, tol=tol))
        reports.append(verify_alpha_feasibility(m_max=m_max, grid_step=grid_step, tol=tol))
        reports.append(verify_gh_bound(m_max=m_max, grid_step=grid_step, tol=tol))
        reports.append(verify_tangency(tol=tol))
    if "si" in wanted:
        reports.append(verify_si_lower(n_instances=200, seed=seed, tol=tol))
        reports.append(verify_si_upper())
    if "simul" in wanted:
        reports.append(verify_simul(seed=seed, tol=tol))
    return reports


# -- figure reproduction ----------------------------------------------------------


def figure_value_bound_rows() -> list[tuple[float, str, float]]:
    """Series for the f / f_2 / f_3 comparison figure (x, series, value)."""
    rows: list[tuple[float, str, float]] = []
    xs = np.linspace(0.0, 1.0, 201)
    for x in xs:
        rows.append((float(x), "f", f_bound(float(x))))
        rows.append((float(x), "f+1/sqrt(2)", f_bound(float(x)) + 1.0 / math.sqrt(2)))
        rows.append((float(x), "f+1/sqrt(3)", f_bound(float(x)) + 1.0 / math.sqrt(3)))
    for name, m in (("f2", 2), ("f3", 3)):
        fm = seq.uniform_additive_value(m)
        for x, y in fm.csv_rows():
            rows.append((x, name, y))
    return rows


def figure_tangent_rows() -> list[tuple[float, str, float]]:
    """Series for the tangent-envelope figure (x, series, value)."""
    rows: list[tuple[float, str, float]] = []
    xs = np.linspace(0.0, 1.0, 201)
    for x in xs:
        rows.append((float(x), "f", f_bound(float(x))))
    spans = {1: (0.0, 0.5), 2: (0.0, 2.0 / 3.0), 3: (0.0, 0.75)}
    for k, (lo, hi) in spans.items():
        for x in (lo, hi):
            rows.append((x, f"t{k}", tangent_value(k, x)))
    for x in (0.0, 1.0 / 3.0, 0.5, 0.6):
        rows.append((x, "tstar", t_star(x)[0]))
    return rows
