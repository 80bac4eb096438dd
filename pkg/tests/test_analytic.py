import math

import numpy as np
import pytest

from rqaoa import analytic as an
from rqaoa.errors import DomainError, SingularPointError
from rqaoa.ising import complete_model
from rqaoa.simulator import ParameterSchedule, correlation, optimize_schedule, qaoa_state

SQRT3_TERM = (math.sqrt(3) - 1) / 8


class TestEdgeCost:
    @pytest.mark.parametrize("n", [2, 3, 7])
    def test_gamma_zero(self, n):
        assert an.expected_edge_cost(n, 0.0, 0.77) == 0.5

    @pytest.mark.parametrize("n", [2, 3, 7])
    def test_beta_zero(self, n):
        assert an.expected_edge_cost(n, 1.3, 0.0) == 0.5

    def test_n2_quarter_pi(self):
        b = an.optimal_beta(2, math.pi / 4)
        assert an.expected_edge_cost(2, math.pi / 4, b) == pytest.approx(0.5 + SQRT3_TERM, abs=1e-15)

    def test_identity_with_f(self, rng):
        for n in (2, 5, 11):
            g, b = rng.uniform(-4, 4, (2, 200))
            d = 2 * n - 2
            c = np.cos(g)
            f = 0.5 * np.sin(4 * b) * np.sin(g) * c**d - 0.25 * np.sin(2 * b) ** 2 * (1 - np.cos(2 * g) ** d)
            np.testing.assert_allclose(an.expected_edge_cost(n, g, b) - 0.5, f, atol=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            an.expected_edge_cost(1, 0.1, 0.1)


class TestCorrelation:
    def test_gamma_zero(self):
        assert an.edge_correlation(4, 0.0, 0.3) == 0.0

    @pytest.mark.parametrize("n", [2, 3, 4, 10])
    def test_negative_at_optimum(self, n):
        prof = an.maximize_f(n)
        assert an.edge_correlation(n, prof.gamma, prof.beta_star) < 0

    def test_matches_simulator_k6(self, rng):
        model = complete_model(6)
        for g, b in rng.uniform(-3, 3, (20, 2)):
            s = qaoa_state(model, ParameterSchedule((g,), (b,)))
            assert abs(an.edge_correlation(3, g, b) - correlation(s, 0, 1)) <= 1e-10

    def test_bounded_on_grid(self):
        g, b = np.meshgrid(np.linspace(0, 2 * math.pi, 100), np.linspace(0, math.pi, 100))
        for n in (2, 3, 8):
            c = an.edge_correlation(n, g, b)
            assert c.min() >= -1 and c.max() <= 1


class TestOptimalBeta:
    def test_n2_quarter_pi(self):
        assert an.optimal_beta(2, math.pi / 4) == pytest.approx(math.atan(math.sqrt(2)) / 4, abs=1e-15)
        assert an.arctan_argument(2, math.pi / 4) == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_stationary_and_maximum(self, rng):
        h = 1e-6
        for _ in range(100):
            g = rng.uniform(0.01, math.pi / 2 - 0.01)
            n = int(rng.integers(2, 11))
            b = an.optimal_beta(n, g)
            grad = (an.edge_objective(n, g, b + h) - an.edge_objective(n, g, b - h)) / (2 * h)
            assert abs(grad) <= 1e-6
            h2 = 1e-4
            curv = an.edge_objective(n, g, b + h2) - 2 * an.edge_objective(n, g, b) + an.edge_objective(n, g, b - h2)
            assert curv < 0

    def test_limit_at_zero(self):
        vals = [an.edge_objective(3, g, an.optimal_beta(3, g)) for g in (1e-2, 1e-3, 1e-4)]
        assert vals[0] > vals[1] > vals[2] > 0
        # f ~ gamma/2 near zero
        assert vals[2] < 1e-4

    @pytest.mark.parametrize("g", [0.0, math.pi / 2, math.pi])
    def test_singular(self, g):
        with pytest.raises(SingularPointError):
            an.optimal_beta(3, g)


class TestReduced:
    def test_zero(self):
        assert an.f_reduced(5, 0.0) == 0.0

    def test_half_pi(self):
        assert an.f_reduced(5, math.pi / 2) == pytest.approx(0.0, abs=1e-30)

    def test_n2_quarter_pi(self):
        assert an.f_reduced(2, math.pi / 4) == pytest.approx(SQRT3_TERM, abs=1e-15)

    def test_matches_unsimplified_form(self):
        g = np.linspace(0, math.pi / 2, 301)
        for n in (2, 6):
            d = 2 * n - 2
            c2 = np.cos(g) ** 2
            D = 1 - (2 * c2 - 1) ** d
            direct = (np.sqrt(D**2 + 16 * (1 - c2) * c2**d) - D) / 8
            np.testing.assert_allclose(an.f_reduced(n, g), direct, atol=1e-15)

    def test_equals_f_at_optimal_beta(self):
        grid = np.linspace(0, math.pi / 2, 1001)[1:-1]
        for n in range(2, 21):
            for g in grid:
                b = an.optimal_beta(n, g)
                assert abs(an.f_reduced(n, g) - an.edge_objective(n, g, b)) <= 1e-12

    def test_non_negative(self):
        g = np.linspace(-7, 7, 5001)
        assert an.f_reduced(4, g).min() >= 0


class TestMaximize:
    def test_bound_and_positive(self):
        for n in range(2, 201):
            prof = an.maximize_f(n)
            assert 0 < prof.f_value < 1 / (4 * n - 1)
            assert prof.f_value >= an.f_reduced(n, math.pi / 4)

    def test_profile_consistent(self):
        for n in (2, 9, 40):
            prof = an.maximize_f(n)
            assert abs(prof.f_value - an.edge_objective(n, prof.gamma, prof.beta_star)) <= 1e-12
            assert prof.x_value == pytest.approx(an.arctan_argument(n, prof.gamma))

    def test_dominates_scan(self):
        n = 6
        prof = an.maximize_f(n)
        assert prof.f_value >= an.f_reduced(n, np.linspace(0, math.pi / 2, 1572)).max()

    def test_full_period_spot_scan(self):
        for n in (2, 3, 10):
            coarse = an.f_reduced(n, np.linspace(0, 2 * math.pi, 20001)).max()
            assert coarse <= an.maximize_f(n).f_value + 1e-12

    def test_n2_matches_simulator(self):
        rep = optimize_schedule(complete_model(4), 1)
        assert abs(rep.best_value / 6 - 0.5 - an.maximize_f(2).f_value) <= 1e-6

    def test_complete_profile_general_m(self):
        # K_2 is solved exactly; odd cliques use the same closed form with d = m - 2
        assert an.complete_graph_profile(2).f_value == pytest.approx(0.5, abs=1e-12)
        rep = optimize_schedule(complete_model(5), 1)
        assert abs(rep.best_value - 10 * (0.5 + an.complete_graph_profile(5).f_value)) <= 1e-6


class TestRatio:
    def test_below_one(self):
        for n in range(2, 201):
            assert an.qaoa1_ratio(n) < 1

    def test_below_bound_chain(self):
        for n in range(4, 201):
            r = an.qaoa1_ratio(n)
            inner = 1 - 1 / (2 * n * (4 * n - 1))
            assert r < inner < 1 - 1 / (8 * n * n)

    def test_n2_matches_simulator(self):
        rep = optimize_schedule(complete_model(4), 1)
        assert abs(an.qaoa1_ratio(2) - rep.best_value / 4) <= 1e-6

    def test_maxcut_optimum(self):
        assert [an.maxcut_optimum(m) for m in (2, 3, 4, 5, 6)] == [1, 2, 4, 6, 9]


class TestG:
    @pytest.mark.parametrize("n", [2, 3, 4, 17])
    def test_endpoints(self, n):
        expected = 4 / (4 * n - 1) ** 2
        assert an.g_function(n, 0.0) == pytest.approx(expected, abs=1e-16)
        assert an.g_function(n, 1.0) == pytest.approx(expected, abs=1e-16)

    def test_n2_half(self):
        assert an.g_function(2, 0.5) == pytest.approx(11 / 49 - 1 / 8, abs=1e-15)

    def test_derivative_finite_difference(self):
        h = 1e-6
        t = np.linspace(1e-3, 1 - 1e-3, 500)
        for n in (2, 3, 4, 10, 30):
            fd = (an.g_function(n, t + h) - an.g_function(n, t - h)) / (2 * h)
            np.testing.assert_allclose(an.g_derivative(n, t), fd, atol=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            an.g_function(3, 1.2)
        with pytest.raises(DomainError):
            an.g_derivative(3, -0.1)

    def test_positive_iff_f_bound(self):
        # g(cos^2 gamma) > 0  <=>  f_reduced(gamma) < 1/(4n-1)
        g = np.linspace(0, math.pi / 2, 2001)
        for n in (2, 5, 12):
            assert np.all(an.g_function(n, np.cos(g) ** 2) > 0)
            assert np.all(an.f_reduced(n, g) < 1 / (4 * n - 1))


class TestPositivityReport:
    @pytest.mark.parametrize("n", [2, 3])
    def test_small_n(self, n):
        rep = an.verify_g_positivity(n, 1e-4)
        assert rep.passed and rep.bound is None
        assert an.qaoa1_ratio(n) < 1

    @pytest.mark.parametrize("n", [4, 5, 8, 25])
    def test_bound_at_critical_points(self, n):
        rep = an.verify_g_positivity(n, 1e-4)
        assert rep.passed
        assert rep.critical_points
        assert all(gc > an.critical_value_bound(n) for _, gc in rep.critical_points)
        assert rep.bound_ok

    def test_critical_points_are_roots(self):
        for n in (3, 6):
            for t in an.critical_points(n):
                assert abs(an.g_derivative(n, t)) <= 1e-12

    def test_brackets_contain_scan_minima(self):
        step = 1e-4
        t = np.linspace(0, 1, 10001)
        for n in (2, 4, 9, 30):
            g = an.g_function(n, t)
            # ignore rounding plateaus where g changes by a few ulp per step
            margin = 8 * np.spacing(g[1:-1])
            interior = np.flatnonzero((g[:-2] - g[1:-1] > margin) & (g[2:] - g[1:-1] > margin)) + 1
            assert len(interior) >= 1
            roots = an.critical_points(n, step)
            for k in interior:
                assert any(abs(r - t[k]) <= step for r in roots)

    def test_failing_report_is_not_exception(self, monkeypatch):
        monkeypatch.setattr(an, "g_function", lambda n, t: np.asarray(t) * 0 - 1.0)
        rep = an.verify_g_positivity(4, 1e-3)
        assert not rep.passed

    def test_coarse_grid_rejected(self):
        with pytest.raises(DomainError):
            an.verify_g_positivity(4, 1e-2)
