"""Quantum search subroutines with exact and ideal-cost backends.

Every subroutine runs against a counted predicate (or value function) whose
charges land on a query ledger under the "quantum" model key.

* exact backend: real state-vector Grover over the window.  Each Grover
  iteration applies the oracle once (one charge); sampled candidates are
  re-verified classically (one charge) so an unmarked element is never
  returned and "none" is always correct when nothing is marked.
* ideal backend: the cost model that stands in beyond exact-simulation
  scale.  A search over a window of w elements returns a uniformly random
  marked element (or none, correctly, if there are none); one sweep is
  charged ceil(c_s * sqrt(w)) queries.  Inside the minimum-finding loop the
  per-round charge is ceil(c_s * sqrt(w/k)) for k current candidates, which
  keeps the telescoped total at O(sqrt(w)) exactly like the real thing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .oracles import QUANTUM, QueryLedger
from .qsim import DIM_CAP, SimulationError


class CapacityError(SimulationError):
    """Exact simulation was asked for a window above the dimension cap."""


@dataclass(frozen=True)
class IdealBackend:
    """Charge-only cost model; answers are drawn from the true marked set."""

    c_s: float = math.pi / 4

    mode = "ideal"


@dataclass(frozen=True)
class ExactBackend:
    """Full state-vector Grover; charges count actual oracle applications."""

    dim_cap: int = DIM_CAP

    mode = "exact"


Backend = IdealBackend | ExactBackend


def make_backend(mode: str, c_s: float = math.pi / 4,
                 dim_cap: int = DIM_CAP) -> Backend:
    if mode == "ideal":
        return IdealBackend(c_s=c_s)
    if mode == "exact":
        return ExactBackend(dim_cap=dim_cap)
    raise ValueError(f"unknown backend mode {mode!r}")


@dataclass
class MarkPredicate:
    """Counted membership test over 1-based positions."""

    fn: Callable[[int], bool]
    ledger: QueryLedger = field(default_factory=QueryLedger)

    def peek(self, position: int) -> bool:
        """Uncharged lookup, for backend-internal oracle construction."""
        return bool(self.fn(position))

    def check(self, position: int) -> bool:
        """Charged classical verification of one position."""
        self.ledger.charge(QUANTUM)
        return bool(self.fn(position))


@dataclass
class CountedFunction:
    """Counted value function over 1-based positions."""

    fn: Callable[[int], float]
    ledger: QueryLedger = field(default_factory=QueryLedger)

    def peek(self, position: int) -> float:
        return self.fn(position)

    def evaluate(self, position: int) -> float:
        self.ledger.charge(QUANTUM)
        return self.fn(position)


def _grover_statevector(pred: MarkPredicate, w: int, iterations: int,
                        rng: np.random.Generator) -> int:
    """Run `iterations` Grover steps over positions 1..w and sample one."""
    marked = np.fromiter((pred.peek(p) for p in range(1, w + 1)),
                         dtype=bool, count=w)
    amps = np.full(w, 1.0 / math.sqrt(w))
    for _ in range(iterations):
        pred.ledger.charge(QUANTUM)  # one oracle application per iteration
        amps = np.where(marked, -amps, amps)
        amps = 2.0 * amps.mean() - amps
    probs = amps ** 2
    probs /= probs.sum()
    return int(rng.choice(w, p=probs)) + 1


def grover_sample(pred: MarkPredicate, w: int, backend: Backend,
                  rng: np.random.Generator,
                  iterations: int | None = None) -> int | None:
    """Search positions 1..w for a marked element.

    Exact backend with ``iterations=None`` runs the exponential schedule for
    an unknown mark count; with an explicit count it is a single shot.  A
    returned position is always verified marked; ``None`` after a fruitless
    budget is certain when nothing is marked.
    """
    if w < 1:
        raise ValueError(f"window size must be >= 1, got {w}")
    if isinstance(backend, IdealBackend):
        pred.ledger.charge(QUANTUM, math.ceil(backend.c_s * math.sqrt(w)))
        marked = [p for p in range(1, w + 1) if pred.peek(p)]
        if not marked:
            return None
        return marked[int(rng.integers(0, len(marked)))]
    if w > backend.dim_cap:
        raise CapacityError(f"window {w} exceeds exact-backend cap {backend.dim_cap}")
    if iterations is not None:
        candidate = _grover_statevector(pred, w, iterations, rng)
        return candidate if pred.check(candidate) else None
    # exponential schedule for unknown mark count
    m = 1.0
    budget = math.ceil(6.0 * math.sqrt(w)) + 10
    spent = 0
    while spent <= budget:
        j = int(rng.integers(0, max(1, math.ceil(m))))
        spent += j + 1
        candidate = _grover_statevector(pred, w, j, rng)
        if pred.check(candidate):
            return candidate
        m = min(m * 1.2, math.sqrt(w))
    return None


def _round_cap(n: int, delta: float) -> int:
    return math.ceil(2.0 * (math.log2(max(n, 2)) + math.log2(1.0 / delta))) + 4


def find_minimum(values: CountedFunction, n: int, delta: float,
                 backend: Backend, rng: np.random.Generator) -> int:
    """Position of the minimum of `values` over 1..n, error at most delta.

    Iterated threshold search: keep a champion, search for anything strictly
    better, stop when a sweep comes back empty.  The round cap grows with
    log(n) and log(1/delta) so that a run that has not converged (possible
    only through repeated unlucky searches) is rarer than delta.
    """
    if n < 1:
        raise ValueError(f"domain size must be >= 1, got {n}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0,1), got {delta}")
    y = int(rng.integers(1, n + 1))
    best = values.evaluate(y)
    for _ in range(_round_cap(n, delta)):
        if isinstance(backend, IdealBackend):
            better = [p for p in range(1, n + 1) if values.peek(p) < best]
            k = len(better)
            values.ledger.charge(
                QUANTUM, math.ceil(backend.c_s * math.sqrt(n / max(k, 1))))
            if k == 0:
                return y
            y = better[int(rng.integers(0, k))]
            best = values.peek(y)
        else:
            pred = MarkPredicate(lambda p: values.peek(p) < best, values.ledger)
            candidate = grover_sample(pred, n, backend, rng)
            if candidate is None:
                return y
            y = candidate
            best = values.evaluate(y)
    return y


@dataclass
class FirstMarkedResult:
    position: int | None
    windows: tuple[int, ...]
    queries: int


def find_first_marked(pred: MarkPredicate, n: int, delta: float,
                      backend: Backend, rng: np.random.Generator,
                      ) -> FirstMarkedResult:
    """First marked position in 1..n, or None if nothing is marked.

    Doubling sweep: for window sizes 1, 2, 4, ..., find the minimum marked
    position inside the prefix; a verified hit ends the sweep, so the cost is
    O(sqrt(d)) for a first mark at d and O(sqrt(n)) when nothing is marked
    (in which case the answer None is always correct: candidates are
    re-verified and nothing can verify).
    """
    return find_first_marked_lazy(pred, lambda k: min(k, n), delta,
                                   backend, rng)


def find_first_marked_lazy(pred: MarkPredicate, grow: Callable[[int], int],
                            delta: float, backend: Backend,
                            rng: np.random.Generator) -> FirstMarkedResult:
    """Doubling first-marked search over a lazily materialized prefix.

    ``grow(k)`` extends the underlying list to at least k elements when it
    can and returns the count actually available; the sweep stops growing
    once the list is exhausted.
    """
    start = pred.ledger.count(QUANTUM)
    sentinel = float("inf")
    windows: list[int] = []
    ell = 1
    while True:
        avail = grow(ell)
        w = min(ell, avail)
        if w >= 1 and (not windows or w > windows[-1]):
            windows.append(w)
            values = CountedFunction(
                lambda p: p if pred.peek(p) else sentinel, pred.ledger)
            candidate = find_minimum(values, w, delta, backend, rng)
            if pred.check(candidate):
                return FirstMarkedResult(
                    candidate, tuple(windows),
                    pred.ledger.count(QUANTUM) - start)
        if avail < ell:
            return FirstMarkedResult(
                None, tuple(windows), pred.ledger.count(QUANTUM) - start)
        ell *= 2
