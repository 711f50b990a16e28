import numpy as np
import pytest

from ilsll.core import (
    EPS,
    CallableProblem,
    make_rng,
    random_bits,
    second_difference,
)
from ilsll.oracles import true_vig, walsh_transform
from ilsll.problems import nk_generate
from ilsll.search import ls, lswll2
from ilsll.vigw import EmpiricalVigw


def assert_local_optimum(problem, bits):
    state = problem.init_state(bits)
    for g in range(problem.n):
        assert state.delta(g) <= EPS


class TestPlainLs:
    def test_reaches_one_flip_local_optimum(self, rng):
        p = nk_generate(10, 3, "random", make_rng(21))
        for _ in range(10):
            res = ls(p, random_bits(10, rng), rng)
            assert res.fitness >= res.start_fitness
            assert_local_optimum(p, res.bits)

    def test_inner_iterations_at_least_n(self, rng):
        p = nk_generate(12, 3, "adjacent", make_rng(22))
        for _ in range(5):
            res = ls(p, random_bits(12, rng), rng)
            assert res.inner_iterations >= 12

    def test_already_optimal_start_costs_n_tests(self, rng):
        p = nk_generate(8, 2, "adjacent", make_rng(23))
        res = ls(p, random_bits(8, rng), rng)
        res2 = ls(p, res.bits, rng)
        assert res2.inner_iterations == 8
        assert np.array_equal(res2.bits, res.bits)

    def test_fixed_order_is_deterministic(self, rng):
        p = nk_generate(10, 3, "random", make_rng(24))
        start = random_bits(10, rng)
        order = list(range(10))
        a = ls(p, start, make_rng(0), order=order)
        b = ls(p, start, make_rng(1), order=order)
        assert np.array_equal(a.bits, b.bits)
        assert a.inner_iterations == b.inner_iterations


class TestLswll2:
    def test_same_postcondition_as_plain_ls(self, rng):
        p = nk_generate(10, 3, "random", make_rng(25))
        for _ in range(10):
            g = EmpiricalVigw(10)
            res = lswll2(p, random_bits(10, rng), g, rng)
            assert res.fitness >= res.start_fitness
            assert_local_optimum(p, res.bits)

    def test_observer_purity(self, rng):
        """Recording on or off, the trajectory and result are identical."""
        p = nk_generate(12, 3, "random", make_rng(26))
        for trial in range(20):
            start = random_bits(12, rng)
            order = [int(v) for v in rng.permutation(12)]
            on = lswll2(p, start, EmpiricalVigw(12), make_rng(0), order=order)
            off = lswll2(p, start, None, make_rng(0), record=False, order=order)
            assert np.array_equal(on.bits, off.bits)
            assert on.fitness == off.fitness
            assert on.inner_iterations == off.inner_iterations

    def test_learned_edges_subset_of_true_vig(self, rng):
        p = nk_generate(12, 3, "adjacent", make_rng(27))
        truth = true_vig(walsh_transform(p))
        graph = EmpiricalVigw(12)
        for _ in range(40):
            lswll2(p, random_bits(12, rng), graph, rng)
        assert graph.edge_set() <= truth
        assert len(graph.edge_set()) > 0

    def test_observations_match_probe_oracle(self, rng):
        p = nk_generate(10, 3, "random", make_rng(28))
        obs = []
        for _ in range(20):
            lswll2(p, random_bits(10, rng), EmpiricalVigw(10), rng, observations=obs)
        assert obs, "expected at least one recorded interaction"
        for o in obs:
            oracle = second_difference(p, o.bits, o.g, o.h)
            assert o.value == pytest.approx(oracle, abs=1e-12)

    def test_weights_are_means_of_observations(self, rng):
        p = nk_generate(10, 3, "adjacent", make_rng(29))
        graph = EmpiricalVigw(10)
        obs = []
        for _ in range(30):
            lswll2(p, random_bits(10, rng), graph, rng, observations=obs)
        logged = {}
        for o in obs:
            key = (o.g, o.h) if o.g < o.h else (o.h, o.g)
            logged.setdefault(key, []).append(o.value)
        assert set(logged) == graph.edge_set()
        for key, values in logged.items():
            stat = graph.edge(*key)
            assert stat.count == len(values)
            assert stat.weight == pytest.approx(
                sum(values) / len(values), abs=1e-12
            )

    def test_graph_size_mismatch(self, rng):
        p = nk_generate(8, 2, "adjacent", make_rng(30))
        with pytest.raises(ValueError):
            lswll2(p, random_bits(8, rng), EmpiricalVigw(9), rng)


class TestRevisitScenario:
    """A hand-built run: the delta of one queued variable changes after an
    improving flip elsewhere, so exactly that pair gains an edge."""

    def scenario_problem(self):
        def f(b):
            return (
                1.0 * b[0]
                - 0.6 * b[4]
                - 0.2 * b[0] * b[4]
                - 0.5 * (b[1] + b[2] + b[3])
            )

        return CallableProblem(5, f)

    def test_inclusive_revisit_records_the_pair(self):
        p = self.scenario_problem()
        graph = EmpiricalVigw(5)
        obs = []
        start = np.zeros(5, dtype=np.uint8)
        res = lswll2(
            p,
            start,
            graph,
            make_rng(0),
            revisit_inclusive=True,
            order=[4, 0, 1, 2, 3],
            observations=obs,
        )
        # x5 queued with delta -0.6; flipping x1 improves; the revisit of x5
        # now sees -0.8, so edge (x1, x5) gets weight |−0.8 − (−0.6)| = 0.2
        assert graph.edge_set() == {(0, 4)}
        assert graph.edge(0, 4).weight == pytest.approx(0.2, abs=1e-12)
        assert len(obs) == 1 and obs[0].g == 4 and obs[0].h == 0
        assert res.fitness == pytest.approx(1.0)
        assert np.array_equal(res.bits, np.array([1, 0, 0, 0, 0], dtype=np.uint8))

    def test_strict_cursor_skips_last_queued(self):
        # verbatim queue cursor: the single queued variable is not revisited
        p = self.scenario_problem()
        graph = EmpiricalVigw(5)
        lswll2(p, np.zeros(5, dtype=np.uint8), graph, make_rng(0), order=[4, 0, 1, 2, 3])
        assert graph.edge_set() == set()
