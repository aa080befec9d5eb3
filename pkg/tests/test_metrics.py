import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genxfer.metrics import (
    SinkhornConfig,
    TvConfig,
    sinkhorn_transport,
    sinkhorn_wasserstein,
    tv_binned,
)
from genxfer.util import ConfigError


def exact_w1_sorted(a, b):
    """Exact 1-dim W1 for equal-size samples: mean |sorted(a) - sorted(b)|."""
    return float(np.mean(np.abs(np.sort(a) - np.sort(b))))


class TestTvBinned:
    def test_identical_samples_zero(self):
        x = np.random.default_rng(0).standard_normal(500)
        assert tv_binned(x, x.copy()) == 0.0

    @pytest.mark.parametrize("n_bins", [2, 3, 10, 50])
    def test_disjoint_supports_one(self, n_bins):
        rng = np.random.default_rng(1)
        a = rng.uniform(0, 1, 200)
        b = rng.uniform(10, 11, 300)
        assert tv_binned(a, b, TvConfig(n_bins=n_bins)) == pytest.approx(1.0)

    def test_hand_computed_histograms(self):
        a = np.array([0.0, 0.0, 1.0, 1.0])
        b = np.array([0.0, 1.0, 1.0, 1.0])
        got = tv_binned(a, b, TvConfig(n_bins=2, range=(-0.5, 1.5)))
        assert got == pytest.approx(0.25, abs=1e-15)

    def test_out_of_range_mass_clamped(self):
        a = np.array([-100.0, 0.0])
        b = np.array([0.0, 100.0])
        got = tv_binned(a, b, TvConfig(n_bins=4, range=(-1.0, 1.0)))
        # clamped: a -> bins {0, mid}, b -> bins {mid, 3}
        assert got == pytest.approx(0.5)

    def test_empty_input_raises(self):
        with pytest.raises(ConfigError):
            tv_binned(np.array([]), np.array([1.0]))

    def test_multidim_rejected(self):
        with pytest.raises(ConfigError):
            tv_binned(np.zeros((4, 2)), np.zeros((4, 2)))

    @given(
        st.lists(st.floats(-50, 50), min_size=1, max_size=60),
        st.lists(st.floats(-50, 50), min_size=1, max_size=60),
    )
    @settings(max_examples=100, deadline=None)
    def test_symmetric_and_bounded(self, xs, ys):
        a, b = np.array(xs), np.array(ys)
        t1 = tv_binned(a, b)
        t2 = tv_binned(b, a)
        assert t1 == t2
        assert 0.0 <= t1 <= 1.0


class TestSinkhorn:
    def test_self_transport_small(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((60, 2))
        eps = 0.05
        cost = sinkhorn_wasserstein(a, a.copy(), SinkhornConfig(epsilon=eps))
        assert 0.0 <= cost < 2 * eps

    def test_two_point_masses(self):
        a = np.array([[0.0]])
        b = np.array([[3.0]])
        cost = sinkhorn_wasserstein(a, b, SinkhornConfig(epsilon=0.01))
        assert cost == pytest.approx(3.0, abs=0.02)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((40, 3))
        b = rng.standard_normal((50, 3)) + 0.5
        cfg = SinkhornConfig(epsilon=0.05)
        c1 = sinkhorn_wasserstein(a, b, cfg)
        c2 = sinkhorn_wasserstein(a, b[rng.permutation(50)], cfg)
        c3 = sinkhorn_wasserstein(a[rng.permutation(40)], b, cfg)
        assert abs(c1 - c2) < 1e-10
        assert abs(c1 - c3) < 1e-10

    def test_self_distance_decreases_with_epsilon(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((50, 2))
        costs = [
            sinkhorn_wasserstein(a, a.copy(), SinkhornConfig(epsilon=e, max_iters=20000))
            for e in (0.1, 0.01, 0.001)
        ]
        assert costs[0] >= costs[1] >= costs[2]
        assert costs[2] < 0.01

    def test_matches_exact_1d_w1(self):
        rng = np.random.default_rng(5)
        cfg = SinkhornConfig(epsilon=1e-3, max_iters=50000, tol=1e-8)
        for case in range(50):
            n = int(rng.integers(20, 80))
            a = rng.standard_normal(n) * rng.uniform(0.5, 2.0)
            b = rng.standard_normal(n) * rng.uniform(0.5, 2.0) + rng.uniform(-1, 1)
            got = sinkhorn_wasserstein(a, b, cfg)
            want = exact_w1_sorted(a, b)
            assert got == pytest.approx(want, abs=1e-2), f"case {case}"

    def test_sq_euclidean_cost(self):
        a = np.array([[0.0]])
        b = np.array([[2.0]])
        cost = sinkhorn_wasserstein(a, b, SinkhornConfig(epsilon=0.01, cost="sq_euclidean"))
        assert cost == pytest.approx(4.0, abs=0.05)

    def test_diagnostics_and_convergence_flag(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((30, 2))
        b = rng.standard_normal((30, 2))
        res = sinkhorn_transport(a, b, SinkhornConfig(epsilon=0.05))
        assert res.converged and res.marginal_error < 1e-6
        res2 = sinkhorn_transport(a, b, SinkhornConfig(epsilon=0.05, max_iters=2))
        assert not res2.converged and res2.cost >= 0.0

    def test_overrelax_agrees_with_plain(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((40, 2))
        b = rng.standard_normal((40, 2)) + 0.3
        c_plain = sinkhorn_wasserstein(a, b, SinkhornConfig(epsilon=0.05))
        c_fast = sinkhorn_wasserstein(a, b, SinkhornConfig(epsilon=0.05, overrelax=1.5))
        assert c_fast == pytest.approx(c_plain, abs=1e-4)

    def test_empty_and_mismatch_raise(self):
        with pytest.raises(ConfigError):
            sinkhorn_wasserstein(np.zeros((0, 2)), np.zeros((3, 2)))
        with pytest.raises(ConfigError):
            sinkhorn_wasserstein(np.zeros((3, 2)), np.zeros((3, 3)))
