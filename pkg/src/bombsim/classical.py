"""Classical query algorithms, guessers, and their bomb/quantum compilations.

A classical algorithm is a resumable decision procedure: from its state it
either asks for one position of the hidden string or announces its answer.
States are explicit and cloneable so that runs can be forked and replayed on
hypothetical query results, which is what both compilers need.

Seeding: every run derives its role generators (algorithm coins, guesser
coins, backend sampling) from a single 64-bit seed via ``role_rng``; reports
carry only that seed.
"""

from __future__ import annotations

import copy
import math
import zlib
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .oracles import CLASSICAL, QUANTUM, SYMMETRIC, HiddenString, QueryLedger
from .search import Backend, MarkPredicate, find_first_marked_lazy
from .zeno import (ZenoParams, check_explosion_budget,
                   guessed_bit_query, live_test_explosion)

MASK64 = (1 << 64) - 1


def role_rng(seed: int, role: str) -> np.random.Generator:
    """Deterministic per-role generator split off one 64-bit seed."""
    ss = np.random.SeedSequence([seed & MASK64, zlib.crc32(role.encode())])
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(base: int, *branch: int) -> int:
    """Stable 64-bit child seed for a numbered trial or instance."""
    ss = np.random.SeedSequence([base & MASK64, *[b & MASK64 for b in branch]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Query:
    position: int


@dataclass(frozen=True)
class Answer:
    value: object


class ClassicalQueryAlgorithm(ABC):
    """Resumable decision procedure over a hidden string of fixed length."""

    @property
    @abstractmethod
    def string_length(self) -> int:
        """Number of queryable positions."""

    @property
    @abstractmethod
    def query_bound(self) -> int:
        """Worst-case query count T."""

    @abstractmethod
    def start(self, rng: np.random.Generator | None):
        """Fresh run state (rng covers any coin flips the procedure makes)."""

    @abstractmethod
    def peek(self, state) -> Query | Answer:
        """Next action; must not consume randomness or mutate visibly."""

    @abstractmethod
    def advance(self, state, bit: int) -> None:
        """Feed the result of the pending query."""

    def clone(self, state):
        return copy.deepcopy(state)


class Guesser(ABC):
    """Predicts the next query result; sees every confirmed (position, bit)."""

    def start(self, rng: np.random.Generator | None):
        return None

    @abstractmethod
    def guess(self, gstate, position: int) -> int: ...

    def observe(self, gstate, position: int, bit: int) -> None:
        pass

    def clone(self, gstate):
        return copy.deepcopy(gstate)


class ConstantGuesser(Guesser):
    """Always predicts the same bit (0 = the no-edge guess on graphs)."""

    def __init__(self, bit: int):
        if bit not in (0, 1):
            raise ValueError("guess bit must be 0 or 1")
        self.bit = bit

    def guess(self, gstate, position: int) -> int:
        return self.bit


@dataclass(frozen=True)
class TranscriptEntry:
    t: int
    position: int
    guess: int | None
    actual: int


@dataclass
class Transcript:
    """Ordered per-query records of one classical run."""

    entries: list[TranscriptEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def wrong_guesses(self) -> int:
        return sum(1 for e in self.entries
                   if e.guess is not None and e.guess != e.actual)

    @property
    def wrong_positions(self) -> tuple[int, ...]:
        """Query ordinals t at which the guess was wrong."""
        return tuple(e.t for e in self.entries
                     if e.guess is not None and e.guess != e.actual)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((e.position, e.actual) for e in self.entries)


class QueryContractError(RuntimeError):
    """Algorithm emitted an out-of-range position or exceeded its bound."""


class OrScan(ClassicalQueryAlgorithm):
    """Probe positions 1..n in order; answer 1 at the first set bit."""

    def __init__(self, n: int):
        self.n = n

    @property
    def string_length(self) -> int:
        return self.n

    @property
    def query_bound(self) -> int:
        return self.n

    def start(self, rng=None):
        return {"cursor": 1, "found": False}

    def peek(self, state):
        if state["found"]:
            return Answer(1)
        if state["cursor"] > self.n:
            return Answer(0)
        return Query(state["cursor"])

    def advance(self, state, bit: int) -> None:
        if bit:
            state["found"] = True
        else:
            state["cursor"] += 1


def run_classical(alg: ClassicalQueryAlgorithm, x: HiddenString, seed: int,
                  guesser: Guesser | None = None,
                  ledger: QueryLedger | None = None,
                  ) -> tuple[object, Transcript]:
    """Drive the algorithm against the hidden string, recording everything."""
    if alg.string_length != len(x):
        raise QueryContractError(
            f"algorithm expects strings of length {alg.string_length}, "
            f"got {len(x)}")
    ledger = ledger if ledger is not None else QueryLedger()
    state = alg.start(role_rng(seed, "alg"))
    gstate = guesser.start(role_rng(seed, "guess")) if guesser else None
    transcript = Transcript()
    t = 0
    while True:
        action = alg.peek(state)
        if isinstance(action, Answer):
            return action.value, transcript
        t += 1
        if t > alg.query_bound:
            raise QueryContractError(
                f"query bound T={alg.query_bound} exceeded")
        pos = action.position
        if not 1 <= pos <= alg.string_length:
            raise QueryContractError(f"position {pos} outside [1, {alg.string_length}]")
        bit = x.bit(pos)
        g = guesser.guess(gstate, pos) if guesser else None
        if guesser:
            guesser.observe(gstate, pos, bit)
        transcript.entries.append(TranscriptEntry(t, pos, g, bit))
        ledger.charge(CLASSICAL)
        alg.advance(state, bit)


@dataclass
class InputTG:
    max_queries: int
    mean_wrong: float
    max_wrong: int


@dataclass
class TGStats:
    per_input: list[InputTG]
    max_queries: int
    mean_wrong: float
    max_wrong: int


def measure_TG(alg: ClassicalQueryAlgorithm, guesser: Guesser,
               inputs: Sequence[HiddenString], trials: int,
               base_seed: int) -> TGStats:
    """Empirical (T, G) estimates: worst-case queries, wrong guesses per input."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    per_input = []
    for i, x in enumerate(inputs):
        t_vals, wrongs = [], []
        for trial in range(trials):
            _, tr = run_classical(alg, x, derive_seed(base_seed, i, trial),
                                  guesser=guesser)
            t_vals.append(len(tr))
            wrongs.append(tr.wrong_guesses)
        per_input.append(InputTG(max(t_vals),
                                 float(np.mean(wrongs)), max(wrongs)))
    return TGStats(
        per_input=per_input,
        max_queries=max(s.max_queries for s in per_input),
        mean_wrong=float(np.mean([s.mean_wrong for s in per_input])),
        max_wrong=max(s.max_wrong for s in per_input))


@dataclass
class BombRunResult:
    answer: object
    transcript: Transcript
    ledger: QueryLedger
    L: int
    exploded: bool = False

    @property
    def bomb_queries(self) -> int:
        return self.ledger.count(SYMMETRIC)

    @property
    def explosion(self) -> float:
        return self.ledger.explosion_probability


@dataclass
class CompiledClassicalBomb:
    """A classical algorithm rewritten to read bits through guessed queries.

    Each classical query becomes L = ceil(pi^2 G / (4 eps)) symmetric bomb
    queries guided by the guesser; a right guess reads the bit for free, a
    wrong one costs 1 - cos^{2L}(pi/2L) of the surviving mass.  Conditioned
    on survival the run is bit-for-bit the classical one.
    """

    alg: ClassicalQueryAlgorithm
    guesser: Guesser
    eps: float
    g_bound: float
    L: int

    @property
    def query_budget(self) -> int:
        """Worst-case total bomb queries L * T."""
        return self.L * self.alg.query_bound

    def run(self, x: HiddenString, seed: int,
            mode: str = "closed_form") -> BombRunResult:
        """Execute on x.  Modes "closed_form" and "circuit" track explosion
        analytically; "monte_carlo" samples the termination per wrong guess
        and may return an exploded run (answer None)."""
        params = ZenoParams(self.L)
        ledger = QueryLedger()
        sampler = role_rng(seed, "bomb") if mode == "monte_carlo" else None
        state = self.alg.start(role_rng(seed, "alg"))
        gstate = self.guesser.start(role_rng(seed, "guess"))
        transcript = Transcript()
        t = 0
        while True:
            action = self.alg.peek(state)
            if isinstance(action, Answer):
                return BombRunResult(action.value, transcript, ledger, self.L)
            t += 1
            if t > self.alg.query_bound:
                raise QueryContractError(
                    f"query bound T={self.alg.query_bound} exceeded")
            pos = action.position
            g = self.guesser.guess(gstate, pos)
            if sampler is not None:
                bit = x.bit(pos)
                ledger.charge(SYMMETRIC, self.L)
                if bit != g and sampler.random() < live_test_explosion(self.L):
                    transcript.entries.append(TranscriptEntry(t, pos, g, bit))
                    return BombRunResult(None, transcript, ledger, self.L,
                                         exploded=True)
            else:
                bit = guessed_bit_query(pos, g, x, params, ledger, mode=mode)
            self.guesser.observe(gstate, pos, bit)
            transcript.entries.append(TranscriptEntry(t, pos, g, bit))
            self.alg.advance(state, bit)


def compile_classical_to_bomb(alg: ClassicalQueryAlgorithm, guesser: Guesser,
                              eps: float, g_bound: float,
                              ) -> CompiledClassicalBomb:
    check_explosion_budget(eps)
    if g_bound <= 0:
        raise ValueError(f"g_bound must be positive, got {g_bound}")
    L = math.ceil(math.pi ** 2 * g_bound / (4 * eps))
    return CompiledClassicalBomb(alg, guesser, eps, g_bound, L)


@dataclass
class QuantumSimRun:
    """Outcome of simulating a classical run through first-deviation search."""

    answer: object
    failed: bool
    iterations: int
    deviations: tuple[int, ...]      # query ordinals where the guess was wrong
    pairs: tuple[tuple[int, int], ...]
    segment_widths: tuple[int, ...]  # d_i - d_{i-1} per search round
    queries: int                     # quantum queries charged
    ledger: QueryLedger

    @property
    def transcript_length(self) -> int:
        return len(self.pairs)


def simulate_classical_by_quantum(alg: ClassicalQueryAlgorithm,
                                  guesser: Guesser, x: HiddenString,
                                  backend: Backend, seed: int,
                                  g_bound: float,
                                  loop_multiplier: int = 100,
                                  delta_per_call: float | None = None,
                                  ) -> QuantumSimRun:
    """Reproduce a classical run by searching for its wrong guesses.

    Roll the algorithm forward on the guesser's predictions (no queries),
    quantum-search the prediction list for the first place the hidden string
    deviates, correct it, and repeat from there.  Each round costs roughly
    sqrt(segment length), so the whole run costs O(sqrt(T * wrong guesses)).
    The loop is cut off after ``loop_multiplier * g_bound`` rounds and the
    run reported failed.
    """
    if alg.string_length != len(x):
        raise QueryContractError(
            f"algorithm expects strings of length {alg.string_length}, "
            f"got {len(x)}")
    if delta_per_call is None:
        delta_per_call = 0.1 / (loop_multiplier * max(g_bound, 1.0))
    rng_b = role_rng(seed, "backend")
    ledger = QueryLedger()
    confirmed = alg.start(role_rng(seed, "alg"))
    conf_g = guesser.start(role_rng(seed, "guess"))
    pairs: list[tuple[int, int]] = []
    widths: list[int] = []
    deviations: list[int] = []
    max_rounds = int(math.ceil(loop_multiplier * g_bound))
    rounds = 0
    answer, failed = None, False
    while True:
        action = alg.peek(confirmed)
        if isinstance(action, Answer):
            answer = action.value
            break
        if rounds >= max_rounds:
            failed = True
            break
        rounds += 1
        # hypothetical roll-forward on pure predictions, materialized lazily
        hyp = alg.clone(confirmed)
        hyp_g = guesser.clone(conf_g)
        predictions: list[tuple[int, int]] = []
        ended = False

        def grow(k: int) -> int:
            nonlocal ended
            while len(predictions) < k and not ended:
                act = alg.peek(hyp)
                if isinstance(act, Answer):
                    ended = True
                    break
                gb = guesser.guess(hyp_g, act.position)
                guesser.observe(hyp_g, act.position, gb)
                predictions.append((act.position, gb))
                alg.advance(hyp, gb)
            return len(predictions)

        pred = MarkPredicate(
            lambda t: x.bit(predictions[t - 1][0]) != predictions[t - 1][1],
            ledger)
        found = find_first_marked_lazy(pred, grow, delta_per_call,
                                       backend, rng_b)

        def accept(pos: int, bit: int) -> None:
            action = alg.peek(confirmed)
            if not isinstance(action, Query) or action.position != pos:
                raise QueryContractError(
                    "confirmed replay diverged from the predicted positions")
            pairs.append((pos, bit))
            guesser.observe(conf_g, pos, bit)
            alg.advance(confirmed, bit)

        if found.position is None:
            # every remaining prediction checked out; grow() ran to the end
            for pos, gb in predictions:
                accept(pos, gb)
            widths.append(len(predictions))
        else:
            t_star = found.position
            for pos, gb in predictions[:t_star - 1]:
                accept(pos, gb)
            pos_star, gb_star = predictions[t_star - 1]
            accept(pos_star, 1 - gb_star)
            deviations.append(len(pairs))
            widths.append(t_star)
    return QuantumSimRun(
        answer=answer, failed=failed, iterations=rounds,
        deviations=tuple(deviations), pairs=tuple(pairs),
        segment_widths=tuple(widths), queries=ledger.count(QUANTUM),
        ledger=ledger)
