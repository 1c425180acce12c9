"""Batch front end: scenario files in, JSON/CSV reports out.

Exit codes: 0 on success (all bounds pass), 2 when a verification sweep
reports a violated bound, 1 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import analysis, seq, simul, strategies
from .errors import RiskFreeError
from .valuations import (
    AdditiveValuation,
    SubadditiveIdenticalValuation,
    Valuation,
    XOSValuation,
    gamma_star,
    make_s_instance,
)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class Scenario:
    auction: str
    price_rule: str
    valuation: Valuation
    budget: float
    bidder: str
    adversary: str
    seed: int
    mc_samples: int
    out: str | None
    s_params: Any = None


def parse_valuation(spec: dict) -> tuple[Valuation, Any]:
    kind = spec.get("kind")
    if kind == "additive":
        return AdditiveValuation(spec["weights"]), None
    if kind == "xos":
        return XOSValuation([tuple(c) for c in spec["clauses"]]), None
    if kind == "subadditive_identical":
        return SubadditiveIdenticalValuation(spec["table"]), None
    if kind == "s_instance":
        v, params = make_s_instance(float(spec["x"]), int(spec["m"]))
        return v, params
    raise ValueError(f"unknown valuation kind: {kind!r}")


def load_scenario(path: str) -> Scenario:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read scenario file: {exc}") from exc
    try:
        valuation, s_params = parse_valuation(raw["valuation"])
        sc = Scenario(
            auction=raw.get("auction", "sequential"),
            price_rule=raw.get("price_rule", "first"),
            valuation=valuation,
            budget=float(raw["budget"]),
            bidder=str(raw["bidder"]),
            adversary=str(raw["adversary"]),
            seed=int(raw.get("seed", 0)),
            mc_samples=int(raw.get("mc_samples", 0)),
            out=raw.get("out"),
            s_params=s_params,
        )
    except KeyError as exc:
        raise ValueError(f"scenario is missing required key {exc}") from exc
    if sc.auction not in ("sequential", "simultaneous"):
        raise ValueError(f"unknown auction kind: {sc.auction!r}")
    if sc.price_rule not in ("first", "second"):
        raise ValueError(f"unknown price rule: {sc.price_rule!r}")
    if sc.budget < 0:
        raise ValueError("budget must be non-negative")
    return sc


def _parse_call(spec: str) -> tuple[str, list[float]]:
    spec = spec.strip()
    if "(" not in spec:
        return spec, []
    if not spec.endswith(")"):
        raise ValueError(f"malformed policy spec: {spec!r}")
    name, _, inner = spec.partition("(")
    args = [float(a) for a in inner[:-1].split(",") if a.strip()]
    return name.strip(), args


def make_policy(spec: str, side: str, sc: Scenario):
    """Resolve a policy name for the sequential game."""
    name, args = _parse_call(spec)
    v, B = sc.valuation, sc.budget
    if name == "fixed":
        if len(args) != v.m:
            raise ValueError(f"fixed(...) needs {v.m} bids")
        return strategies.FixedBidsPolicy(tuple(args), budget=B if side == "adversary" else None)
    if side == "bidder":
        if name == "xos_sqrt":
            return strategies.xos_sqrt_policy(gamma_star(v), B)
        if name == "low_budget":
            return strategies.low_budget_policy(B)
        if name == "high_budget":
            return strategies.high_budget_policy(v.m, B)
        if name == "constant_price":
            if not isinstance(v, SubadditiveIdenticalValuation):
                raise ValueError("constant_price needs an identical-item valuation")
            k = int(args[0]) if args else strategies.choose_k(B)
            return strategies.constant_price_policy(v, B, k)[0]
    else:
        if name == "alpha_tilde":
            return strategies.alpha_tilde_adversary(v.m, B)
        if name == "s_adversary":
            if sc.s_params is None:
                raise ValueError("s_adversary needs an s_instance valuation")
            return strategies.s_instance_adversary(sc.s_params)
    raise ValueError(f"unknown {side} policy: {name!r}")


def run_scenario(sc: Scenario) -> dict:
    if sc.auction == "sequential":
        bidder = make_policy(sc.bidder, "bidder", sc)
        adversary = make_policy(sc.adversary, "adversary", sc)
        outcome = seq.simulate(
            sc.valuation, bidder, adversary, sc.price_rule, seed=sc.seed, budget=sc.budget
        )
        closed = None
        if isinstance(sc.valuation, AdditiveValuation) and len(set(sc.valuation.weights)) == 1:
            closed = float(seq.uniform_additive_value(sc.valuation.m)(sc.budget))
        return {
            "auction": "sequential",
            "price_rule": sc.price_rule,
            "seed": sc.seed,
            "profit": outcome.profit,
            "allocation": list(outcome.won_by_1),
            "rounds": [list(r) for r in outcome.rounds],
            "closed_form": closed,
            "gap": None if closed is None else outcome.profit - closed,
        }

    # simultaneous
    name1, _ = _parse_call(sc.bidder)
    name2, args2 = _parse_call(sc.adversary)
    g = gamma_star(sc.valuation)
    if name2 == "fixed":
        bids2 = np.asarray(args2, dtype=float)
    elif name2 == "split":
        bids2 = simul.randomized_adversary(sc.valuation.m, sc.budget, seed=sc.seed)
    else:
        raise ValueError(f"unknown adversary policy: {name2!r}")
    if float(bids2.sum()) > sc.budget + 1e-9:
        raise ValueError("adversary bid vector exceeds the budget")

    if name1 == "uniform_random":
        drawer = strategies.uniform_random_policy(g, sc.seed)
        ratios = np.clip(bids2 / np.maximum(np.asarray(g.weights), 1e-300), 0.0, 1.0)
        closed = simul.expected_profit_uniform_random(g, ratios)
        n = max(sc.mc_samples, 1)
        rng = np.random.Generator(np.random.Philox(sc.seed))
        draws = rng.random((n, sc.valuation.m)) * np.asarray(g.weights)
        wins = draws > bids2
        profits = (np.asarray(g.weights) * wins).sum(axis=1) - (draws * wins).sum(axis=1)
        numeric = float(profits.mean())
        return {
            "auction": "simultaneous",
            "price_rule": sc.price_rule,
            "seed": sc.seed,
            "mc_samples": n,
            "closed_form": closed,
            "numeric": numeric,
            "gap": numeric - closed,
        }
    if name1 == "xos_sqrt":
        bids1 = np.sqrt(sc.budget) * np.asarray(g.weights)
    elif name1 == "truthful":
        bids1 = np.asarray(g.weights, dtype=float)
    elif name1 == "fixed":
        _, args1 = _parse_call(sc.bidder)
        bids1 = np.asarray(args1, dtype=float)
    else:
        raise ValueError(f"unknown bidder policy: {name1!r}")
    outcome = simul.resolve(sc.valuation, bids1, bids2, sc.price_rule)
    return {
        "auction": "simultaneous",
        "price_rule": sc.price_rule,
        "seed": sc.seed,
        "profit": outcome.profit,
        "allocation": list(outcome.won_by_1),
        "closed_form": None,
        "gap": None,
    }


# -- subcommands -----------------------------------------------------------------


def _cmd_solve_uniform(args) -> int:
    fm = seq.uniform_additive_value(args.m)
    xs, ys = fm.xs, fm.ys
    branches = []
    for i in range(len(xs) - 1):
        slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        intercept = ys[i] - slope * xs[i]
        branches.append([float(xs[i]), float(xs[i + 1]), float(slope), float(intercept)])
    print(json.dumps({"m": args.m, "branches": branches}))
    if args.dump_csv:
        _write_pwl_csv(fm, args.dump_csv)
    return 0


def _write_pwl_csv(fm, path: str) -> None:
    lines = ["x,value"] + [f"{_fmt(x)},{_fmt(y)}" for x, y in fm.csv_rows()]
    Path(path).write_text("\n".join(lines) + "\n")


def _cmd_tables(args) -> int:
    print(_fmt(analysis.table_A(args.m, args.b)))
    return 0


def _cmd_simulate(args) -> int:
    sc = load_scenario(args.scenario)
    report = run_scenario(sc)
    text = json.dumps(report, indent=2, sort_keys=True)
    if sc.out:
        Path(sc.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_oracle(args) -> int:
    v = AdditiveValuation((1.0 / args.m,) * args.m)
    val = seq.solve_discretized(v, args.b, args.delta, args.price_rule, args.leader)
    print(_fmt(val))
    return 0


def _cmd_qp(args) -> int:
    weights = tuple(float(w) for w in args.gamma_star.split(","))
    sol = simul.adversary_qp(AdditiveValuation(weights), args.b)
    print(json.dumps({"value": sol.value, "pg_value": sol.pg_value, "ratios": list(sol.ratios)}))
    return 0


def _cmd_verify(args) -> int:
    suites = ("xos", "si", "simul") if args.suite == "all" else (args.suite,)
    reports = analysis.verify_all(
        suites=suites, m_max=args.m_max, grid_step=args.grid_step, seed=args.seed
    )
    for rep in reports:
        print(rep.summary_line())
    if args.report:
        Path(args.report).write_text(
            json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
        )
    return 0 if all(r.passed for r in reports) else 2


def _cmd_figures(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, rows in (
        ("figure1.csv", analysis.figure_value_bound_rows()),
        ("figure2.csv", analysis.figure_tangent_rows()),
    ):
        lines = ["x,series,value"] + [f"{_fmt(x)},{s},{_fmt(v)}" for x, s, v in rows]
        (out / name).write_text("\n".join(lines) + "\n")
    for m in (2, 3):
        _write_pwl_csv(seq.uniform_additive_value(m), str(out / f"f{m}.csv"))
    print(f"wrote figure CSVs to {out}")
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="riskfree", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve-uniform", help="exact value function of the m-item uniform auction")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--dump-csv", default=None)
    sp.set_defaults(fn=_cmd_solve_uniform)

    sp = sub.add_parser("tables", help="closed-form profit tables for m in {1,2,3}")
    sp.add_argument("--m", type=int, required=True, choices=(1, 2, 3))
    sp.add_argument("--b", type=float, required=True)
    sp.set_defaults(fn=_cmd_tables)

    sp = sub.add_parser("simulate", help="run a scenario file")
    sp.add_argument("--scenario", required=True)
    sp.set_defaults(fn=_cmd_simulate)

    sp = sub.add_parser("oracle", help="discretized game-tree value of the uniform auction")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--delta", type=float, default=0.01)
    sp.add_argument("--leader", choices=("adversary", "bidder"), default="adversary")
    sp.add_argument("--price-rule", choices=("first", "second"), default="first")
    sp.set_defaults(fn=_cmd_oracle)

    sp = sub.add_parser("qp", help="adversarial QP value for a weight vector")
    sp.add_argument("--gamma-star", required=True, help="comma-separated weights")
    sp.add_argument("--b", type=float, required=True)
    sp.set_defaults(fn=_cmd_qp)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", choices=("xos", "si", "simul", "all"), default="all")
    sp.add_argument("--m-max", type=int, default=30)
    sp.add_argument("--grid-step", type=float, default=0.01)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--report", default=None)
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("figures", help="emit the figure CSVs")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=_cmd_figures)

    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (RiskFreeError, ValueError, IndexError, KeyError) as exc:
        print(f"riskfree: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
