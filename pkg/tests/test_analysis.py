import numpy as np
import pytest

from riskfree import analysis as A
from riskfree.strategies import tangent_value
from riskfree.valuations import l_threshold


def table_transcription(m, B):
    # independent second transcription of the closed-form tables (two-person
    # rule); intentionally written as data, not branches
    segments = {
        1: [(0.0, 1.0, -1.0, 1.0)],
        2: [(0.0, 0.25, -2.0, 1.0), (0.25, 0.5, -1.0, 0.75), (0.5, 1.0, -0.5, 0.5)],
        3: [
            (0.0, 1 / 9, -3.0, 1.0),
            (1 / 9, 1 / 6, -2.0, 8 / 9),
            (1 / 6, 1 / 3, -4 / 3, 7 / 9),
            (1 / 3, 5 / 9, -3 / 4, 7 / 12),
            (5 / 9, 2 / 3, -1 / 2, 4 / 9),
            (2 / 3, 1.0, -1 / 3, 1 / 3),
        ],
    }[m]
    for lo, hi, slope, intercept in segments:
        if lo <= B < hi:
            return intercept + slope * B
    return 0.0


class TestClosedForms:
    def test_f_bound_tangency(self):
        assert A.f_bound(0.25) == pytest.approx(0.25)
        assert tangent_value(1, 0.25) == pytest.approx(0.25)

    def test_t_star_low_budget(self):
        val, k = A.t_star(0.1)
        assert val == pytest.approx(0.4) and k == 1

    def test_t_star_tie(self):
        val, k = A.t_star(0.5)
        assert val == pytest.approx(1 / 12)
        assert k == 2  # tie with k = 3 breaks toward the smaller index

    def test_tangent_bound_fields(self):
        tb = A.tangent_bound(3, 0.5)
        assert tb.tangency == pytest.approx(9 / 16)
        assert tb.value == pytest.approx(0.25 - 0.5 / 3)

    def test_tables_examples(self):
        assert A.table_A(2, 0.6) == pytest.approx(0.2)
        assert A.table_A(3, 0.125) == pytest.approx(8 / 9 - 0.25)
        assert A.table_A(1, 1.5) == 0.0

    def test_tables_against_independent_transcription(self):
        rng = np.random.Generator(np.random.Philox(15))
        for _ in range(2000):
            m = int(rng.integers(1, 4))
            B = float(rng.uniform(0, 1.3))
            assert A.table_A(m, B) == pytest.approx(table_transcription(m, B), abs=1e-12)

    def test_tables_out_of_range(self):
        with pytest.raises(ValueError):
            A.table_A(4, 0.3)

    def test_budget_split_examples(self):
        s = A.budget_split(0.1)
        assert (s.w1, s.w2) == (pytest.approx(0.2), pytest.approx(0.0))
        assert A.sigma(0.125) == pytest.approx(2.0)
        assert l_threshold(0.125) == pytest.approx(8.0)


class TestSweeps:
    def test_value_bound_small(self):
        rep = A.verify_value_bound(m_max=8, grid_step=0.02)
        assert rep.passed and rep.min_margin >= -1e-9

    def test_alpha_feasibility_small(self):
        rep = A.verify_alpha_feasibility(m_max=10, grid_step=0.01)
        assert rep.passed

    def test_gh_bound_small(self):
        rep = A.verify_gh_bound(m_max=10, grid_step=0.01)
        assert rep.passed

    def test_tangency(self):
        rep = A.verify_tangency()
        assert rep.passed

    def test_si_lower_small(self):
        rep = A.verify_si_lower(n_instances=60, seed=0)
        assert rep.passed

    def test_si_upper_small(self):
        rep = A.verify_si_upper(x_list=(0.1,), m_list=(30, 60))
        assert rep.passed
        assert rep.extra["C_measured"] >= 0.0
        rows = rep.extra["rows"]
        assert rows[-1]["excess"] < rows[0]["excess"]

    def test_simul(self):
        rep = A.verify_simul(seed=0)
        assert rep.passed

    def test_verify_all_shapes(self):
        reps = A.verify_all(suites=("simul",))
        assert len(reps) == 1
        d = reps[0].to_dict()
        assert set(d) >= {"name", "min_margin", "passed", "runtime_s"}
        assert isinstance(reps[0].summary_line(), str)


class TestSiUpperClasses:
    def test_case2_value_is_half_minus_2x(self):
        # buying everything nets 1 - (d+1) p2, just under 1/2 - 2x
        x, m = 0.125, 50
        r = A.si_upper_response_value(x, m)
        assert r["buy_through"] <= 0.5 - 2 * x + 1e-12

    def test_value_dominates_baseline_classes(self):
        r = A.si_upper_response_value(0.1, 60)
        assert r["value"] >= max(r["concede_first"], r["buy_through"], r["concede_later"]) - 1e-15

    def test_early_concessions_prefer_j1_2(self):
        r = A.si_upper_response_value(0.05, 100)
        assert r["best_j1"] == 2
        assert r["best_j2"] == 2


class TestFigures:
    def test_value_bound_series(self):
        rows = A.figure_value_bound_rows()
        f2 = [(x, v) for x, s, v in rows if s == "f2"]
        f3 = [(x, v) for x, s, v in rows if s == "f3"]
        np.testing.assert_allclose(
            f2, [(0, 1), (0.25, 0.5), (0.5, 0.25), (1, 0)], atol=1e-9
        )
        np.testing.assert_allclose(
            f3,
            [
                (0, 1),
                (1 / 9, 2 / 3),
                (1 / 6, 5 / 9),
                (1 / 3, 1 / 3),
                (5 / 9, 1 / 6),
                (2 / 3, 1 / 9),
                (1, 0),
            ],
            atol=1e-9,
        )

    def test_tangent_envelope_breakpoints(self):
        rows = A.figure_tangent_rows()
        tstar = {x: v for x, s, v in rows if s == "tstar"}
        # kinks of the envelope: t1 = t2 at 1/3, t2 = t3 at 1/2
        assert tstar[1 / 3] == pytest.approx(tangent_value(1, 1 / 3))
        assert tstar[1 / 3] == pytest.approx(tangent_value(2, 1 / 3))
        assert tstar[0.5] == pytest.approx(tangent_value(2, 0.5))
        assert tstar[0.5] == pytest.approx(tangent_value(3, 0.5))

    def test_envelope_dominates_tangents_on_grid(self):
        for B in np.linspace(0.001, 0.999, 500):
            env = A.t_star(float(B))[0]
            for k in range(1, 51):
                assert env >= tangent_value(k, float(B)) - 1e-12
