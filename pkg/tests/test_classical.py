import itertools
import math
import warnings

import pytest

from bombsim.classical import (ClassicalQueryAlgorithm,
                               ConstantGuesser, OrScan, Query,
                               QueryContractError, compile_classical_to_bomb,
                               derive_seed, measure_TG, role_rng,
                               run_classical, simulate_classical_by_quantum)
from bombsim.oracles import HiddenString
from bombsim.search import make_backend
from bombsim.zeno import BudgetWarning

IDEAL = make_backend("ideal")


def all_strings(n):
    return [HiddenString(bits) for bits in itertools.product((0, 1), repeat=n)]


class TestSeeding:
    def test_role_split_is_stable(self):
        a1 = role_rng(42, "alg").integers(0, 1 << 30, size=4)
        a2 = role_rng(42, "alg").integers(0, 1 << 30, size=4)
        g = role_rng(42, "guess").integers(0, 1 << 30, size=4)
        assert list(a1) == list(a2)
        assert list(a1) != list(g)

    def test_derive_seed_branches(self):
        assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
        assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)


class TestRunClassical:
    def test_or_scan_stops_at_first_one(self):
        answer, tr = run_classical(OrScan(4), HiddenString.of([0, 0, 1, 0]), 0)
        assert answer == 1
        assert len(tr) == 3
        assert tr.pairs == ((1, 0), (2, 0), (3, 1))

    def test_or_scan_all_zero(self):
        answer, tr = run_classical(OrScan(8), HiddenString.of([0] * 8), 0)
        assert answer == 0
        assert len(tr) == 8

    def test_transcript_guesses_recorded(self):
        _, tr = run_classical(OrScan(4), HiddenString.of([0, 1, 0, 0]), 0,
                              guesser=ConstantGuesser(0))
        assert tr.wrong_guesses == 1
        assert tr.wrong_positions == (2,)

    def test_contract_length_mismatch(self):
        with pytest.raises(QueryContractError):
            run_classical(OrScan(4), HiddenString.of([0, 0]), 0)

    def test_contract_bound_and_range_enforced(self):
        class Wild(ClassicalQueryAlgorithm):
            string_length = 4
            query_bound = 2

            def start(self, rng):
                return {"t": 0}

            def peek(self, state):
                return Query(1)

            def advance(self, state, bit):
                state["t"] += 1

        with pytest.raises(QueryContractError):
            run_classical(Wild(), HiddenString.of([0, 0, 0, 0]), 0)


class TestMeasureTG:
    def test_or_scan_guess_zero_at_most_one_mistake(self):
        stats = measure_TG(OrScan(6), ConstantGuesser(0), all_strings(6),
                           trials=2, base_seed=1)
        assert stats.max_wrong <= 1
        assert stats.max_queries <= 6

    def test_all_zero_input_no_mistakes(self):
        stats = measure_TG(OrScan(6), ConstantGuesser(0),
                           [HiddenString.of([0] * 6)], trials=3, base_seed=2)
        assert stats.max_wrong == 0
        assert stats.max_queries == 6


class TestBombCompilation:
    def test_budget_closed_form(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BudgetWarning)
            compiled = compile_classical_to_bomb(OrScan(8), ConstantGuesser(0),
                                                 eps=0.1, g_bound=1.0)
        assert compiled.L == 25
        assert compiled.query_budget == 200

    def test_eps_window(self):
        with pytest.raises(ValueError):
            compile_classical_to_bomb(OrScan(4), ConstantGuesser(0), 0.3, 1.0)
        with pytest.warns(BudgetWarning):
            compile_classical_to_bomb(OrScan(4), ConstantGuesser(0), 0.02, 1.0)
        compile_classical_to_bomb(OrScan(4), ConstantGuesser(0), 0.01, 1.0)

    def test_all_zero_explodes_never(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BudgetWarning)
            compiled = compile_classical_to_bomb(OrScan(8), ConstantGuesser(0),
                                                 0.1, 1.0)
        res = compiled.run(HiddenString.of([0] * 8), 5)
        assert res.answer == 0
        assert res.explosion == 0.0
        assert res.bomb_queries == 200

    def test_single_one_closed_form(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BudgetWarning)
            compiled = compile_classical_to_bomb(OrScan(8), ConstantGuesser(0),
                                                 0.1, 1.0)
        res = compiled.run(HiddenString.of([0, 0, 0, 0, 1, 0, 0, 0]), 5)
        assert res.answer == 1
        assert res.explosion == pytest.approx(
            1 - math.cos(math.pi / 50) ** 50, abs=1e-9)
        assert res.explosion <= 0.1

    def test_surviving_run_matches_classical_exactly(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BudgetWarning)
            compiled = compile_classical_to_bomb(OrScan(6), ConstantGuesser(0),
                                                 0.1, 1.0)
        for x in all_strings(6):
            res = compiled.run(x, 9)
            answer, tr = run_classical(OrScan(6), x, 9,
                                       guesser=ConstantGuesser(0))
            assert res.answer == answer
            assert res.transcript.pairs == tr.pairs
            assert res.bomb_queries == compiled.L * len(tr)

    def test_monte_carlo_explosion_frequency(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BudgetWarning)
            compiled = compile_classical_to_bomb(OrScan(8), ConstantGuesser(0),
                                                 0.1, 1.0)
        x = HiddenString.of([0, 0, 0, 1, 0, 0, 0, 0])
        trials = 3000
        runs = [compiled.run(x, s, mode="monte_carlo") for s in range(trials)]
        p = 1 - math.cos(math.pi / (2 * compiled.L)) ** (2 * compiled.L)
        freq = sum(r.exploded for r in runs) / trials
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(freq - p) <= 3 * sigma
        assert all(r.answer == 1 for r in runs if not r.exploded)

    def test_explosion_compounds_per_wrong_guess(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BudgetWarning)
            compiled = compile_classical_to_bomb(OrScan(6), ConstantGuesser(1),
                                                 0.1, 6.0)
        res = compiled.run(HiddenString.of([0] * 6), 9)
        w = res.transcript.wrong_guesses
        assert w == 6
        L = compiled.L
        assert res.explosion == pytest.approx(
            1 - math.cos(math.pi / (2 * L)) ** (2 * L * w), abs=1e-9)


class TestQuantumSimulation:
    def test_perfect_guesser_single_window(self):
        x = HiddenString.of([0] * 16)
        sim = simulate_classical_by_quantum(OrScan(16), ConstantGuesser(0), x,
                                            IDEAL, 3, g_bound=1.0)
        assert sim.answer == 0
        assert sim.deviations == ()
        assert sim.segment_widths == (16,)
        assert sim.iterations == 1

    def test_or_scan_deviation_found(self):
        x = HiddenString.of([0, 0, 0, 0, 0, 1, 0, 0])
        sim = simulate_classical_by_quantum(OrScan(8), ConstantGuesser(0), x,
                                            IDEAL, 3, g_bound=1.0)
        answer, tr = run_classical(OrScan(8), x, 3, guesser=ConstantGuesser(0))
        assert sim.answer == answer == 1
        assert sim.deviations == tr.wrong_positions == (6,)
        assert sim.pairs == tr.pairs

    def test_matches_classical_on_every_string(self):
        for x in all_strings(5):
            sim = simulate_classical_by_quantum(OrScan(5), ConstantGuesser(0),
                                                x, IDEAL, 11, g_bound=1.0)
            answer, tr = run_classical(OrScan(5), x, 11,
                                       guesser=ConstantGuesser(0))
            assert sim.answer == answer
            assert sim.deviations == tr.wrong_positions
            assert not sim.failed

    def test_cauchy_schwarz_accounting(self):
        x = HiddenString.of([1, 0, 1, 0, 1, 0, 1, 0])
        sim = simulate_classical_by_quantum(OrScan(8), ConstantGuesser(1), x,
                                            IDEAL, 3, g_bound=8.0)
        widths = sim.segment_widths
        g = len(sim.deviations)
        assert sum(math.sqrt(w) for w in widths) <= math.sqrt(
            (g + 1) * sum(widths)) + 1e-9

    def test_loop_cap_reports_failure(self):
        # guess-1 on the all-zero string deviates at every query
        x = HiddenString.of([0] * 8)
        sim = simulate_classical_by_quantum(
            OrScan(8), ConstantGuesser(1), x, IDEAL, 3, g_bound=1.0,
            loop_multiplier=2)
        assert sim.failed
        assert sim.answer is None
        assert sim.iterations == 2

    def test_exact_backend_small_instance(self):
        x = HiddenString.of([0, 0, 1, 0])
        sim = simulate_classical_by_quantum(OrScan(4), ConstantGuesser(0), x,
                                            make_backend("exact"), 3,
                                            g_bound=1.0)
        assert sim.answer == 1
        assert sim.deviations == (3,)
