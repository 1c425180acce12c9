import numpy as np
import pytest

from riskfree import pwl
from riskfree.errors import BreakpointOverflowError, ContractViolationError
from riskfree.pwl import PiecewiseLinear, add, affine_transform, pointwise_extreme, solve_equal


def ramp():
    return PiecewiseLinear([0.0, 1.0], [1.0, 0.0])


def f2_table():
    # the two-item profit table as a piecewise-linear function
    return PiecewiseLinear([0.0, 0.25, 0.5, 1.0], [1.0, 0.5, 0.25, 0.0])


class TestEval:
    def test_midpoint(self):
        assert ramp()(0.5) == pytest.approx(0.5, abs=1e-15)

    def test_left_extension_is_constant(self):
        assert ramp()(-1.0) == 1.0

    def test_right_extension_is_constant(self):
        assert ramp()(3.0) == 0.0

    def test_two_item_table_at_03(self):
        assert f2_table()(0.3) == pytest.approx(0.45, abs=1e-15)

    def test_vectorized(self):
        xs = np.array([-1.0, 0.0, 0.25, 0.9, 2.0])
        np.testing.assert_allclose(ramp()(xs), [1.0, 1.0, 0.75, 0.1, 0.0], atol=1e-15)


class TestAffine:
    def test_identity(self):
        f = f2_table()
        g = affine_transform(f, 1.0, 1.0, 0.0, 0.0)
        assert f.allclose(g, tol=0.0)

    def test_hand_composition(self):
        # x -> (1/2) f1(2x) with f1 = max(1-x, 0), checked against the
        # direct formula on a dense grid over the function's support
        g = affine_transform(ramp(), 0.5, 2.0, 0.0, 0.0)
        for x in np.linspace(0.0, 1.5, 100):
            assert g(x) == pytest.approx(0.5 * max(1.0 - 2.0 * x, 0.0), abs=1e-15)

    def test_reflection(self):
        g = affine_transform(ramp(), 1.0, -1.0, 0.0, 0.0)
        np.testing.assert_allclose(g.xs, [-1.0, 0.0])
        np.testing.assert_allclose(g.ys, [0.0, 1.0])

    def test_b_zero_rejected(self):
        with pytest.raises(ValueError):
            affine_transform(ramp(), 1.0, 0.0, 0.0, 0.0)

    def test_eval_identity_random(self):
        rng = np.random.Generator(np.random.Philox(1))
        f = f2_table()
        a, b, c, d = 1.7, -0.6, 0.2, -0.3
        g = affine_transform(f, a, b, c, d)
        xs = rng.uniform(-2, 2, size=1000)
        np.testing.assert_allclose(g(xs), a * f(b * xs + c) + d, atol=1e-12)


class TestExtreme:
    def test_tent_minimum(self):
        up = PiecewiseLinear([0.0, 1.0], [0.0, 1.0])
        down = ramp()
        low = pointwise_extreme(up, down, "min")
        assert 0.5 in low.xs
        assert low(0.5) == pytest.approx(0.5)
        assert low(0.2) == pytest.approx(0.2)
        assert low(0.8) == pytest.approx(0.2)

    def test_idempotent(self):
        f = f2_table()
        assert pointwise_extreme(f, f, "max").allclose(f, tol=0.0)

    def test_middle_branch_crossing(self):
        # 3/4 - B and 1/2 - B/2 cross at B = 1/2
        a = PiecewiseLinear([0.0, 1.0], [0.75, -0.25])
        b = PiecewiseLinear([0.0, 1.0], [0.5, 0.0])
        lo = pointwise_extreme(a, b, "min")
        assert np.min(np.abs(lo.xs - 0.5)) < 1e-15

    def test_commutative_associative(self):
        rng = np.random.Generator(np.random.Philox(7))
        for _ in range(50):
            fs = []
            for _ in range(3):
                xs = np.sort(rng.uniform(0, 1, size=rng.integers(2, 6)))
                xs = np.unique(xs)
                if len(xs) < 2:
                    continue
                fs.append(PiecewiseLinear(xs, rng.uniform(-1, 1, size=len(xs))))
            if len(fs) < 3:
                continue
            f, g, h = fs
            assert pointwise_extreme(f, g, "min").allclose(pointwise_extreme(g, f, "min"), 1e-12)
            left = pointwise_extreme(pointwise_extreme(f, g, "max"), h, "max")
            right = pointwise_extreme(f, pointwise_extreme(g, h, "max"), "max")
            assert left.allclose(right, 1e-12)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            pointwise_extreme(ramp(), ramp(), "sum")


class TestCanonical:
    def test_collinear_merge(self):
        f = PiecewiseLinear([0.0, 0.5, 1.0], [1.0, 0.5, 0.0])
        assert len(f.xs) == 2

    def test_redundant_flat_ends_dropped(self):
        f = PiecewiseLinear([-1.0, 0.0, 1.0, 2.0], [1.0, 1.0, 0.0, 0.0])
        np.testing.assert_allclose(f.xs, [0.0, 1.0])

    def test_canonicalization_preserves_eval(self):
        rng = np.random.Generator(np.random.Philox(3))
        xs = np.linspace(0, 1, 11)
        ys = np.maximum(1 - 2 * xs, 0.0)  # collinear runs on both sides of the kink
        f = PiecewiseLinear(xs, ys)
        # collinear interior points and the redundant flat tail are gone
        assert len(f.xs) == 2
        probes = rng.uniform(0.0, 1.2, size=500)
        np.testing.assert_allclose(f(probes), np.maximum(1 - 2 * probes, 0.0), atol=1e-12)

    def test_breakpoint_cap(self, monkeypatch):
        monkeypatch.setattr(pwl, "MAX_BREAKPOINTS", 8)
        xs = np.arange(20, dtype=float)
        ys = np.where(np.arange(20) % 2 == 0, 0.0, 1.0)
        with pytest.raises(BreakpointOverflowError):
            PiecewiseLinear(xs, ys)


class TestSolveEqual:
    def test_simple_crossing(self):
        lhs = ramp()
        rhs = PiecewiseLinear([0.0, 1.0], [0.0, 1.0])
        assert solve_equal(lhs, rhs, 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_no_crossing(self):
        lhs = PiecewiseLinear([0.0], [2.0])
        rhs = PiecewiseLinear([0.0], [1.0])
        assert solve_equal(lhs, rhs, 0.0, 1.0) is None

    def test_two_item_equalization(self):
        # g(a) = 0.7 - a/2 and h(a) = 0.2 + a/2 on [0, 0.6] cross at a = 0.5
        g = PiecewiseLinear([0.0, 0.6], [0.7, 0.4])
        h = PiecewiseLinear([0.0, 0.6], [0.2, 0.5])
        assert solve_equal(g, h, 0.0, 0.6) == pytest.approx(0.5, abs=1e-15)

    def test_monotonicity_contract(self):
        rising = PiecewiseLinear([0.0, 1.0], [0.0, 1.0])
        with pytest.raises(ContractViolationError):
            solve_equal(rising, rising, 0.0, 1.0)

    def test_leftmost_of_flat_overlap(self):
        lhs = PiecewiseLinear([0.0, 0.4, 1.0], [1.0, 0.5, 0.5])
        rhs = PiecewiseLinear([0.0, 1.0], [0.5, 0.5])
        assert solve_equal(lhs, rhs, 0.0, 1.0) == pytest.approx(0.4, abs=1e-12)


class TestAdd:
    def test_sum_exact_on_union(self):
        s = add(ramp(), f2_table())
        for x in np.linspace(-0.5, 1.5, 101):
            assert s(x) == pytest.approx(ramp()(x) + f2_table()(x), abs=1e-15)


def test_csv_rows_roundtrip():
    f = f2_table()
    rows = f.csv_rows()
    assert rows[0] == (0.0, 1.0) and rows[-1] == (1.0, 0.0)
    g = PiecewiseLinear([r[0] for r in rows], [r[1] for r in rows])
    assert f.allclose(g, tol=0.0)
