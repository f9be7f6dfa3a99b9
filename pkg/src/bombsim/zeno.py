"""Interaction-free measurement constructions built on the quantum Zeno effect.

The common trick: a chain of L small rotations R(pi/2L) interleaved with
controlled bomb queries.  On a "safe" branch the rotations compose to a
quarter turn; on a "dangerous" branch each query projects the rotated qubit
back, shrinking the amplitude by cos(pi/2L) per step, so after L steps the
branch survives with probability cos^{2L}(pi/2L) = 1 - O(1/L) and the qubit
ends where it started.  Reading off which of the two happened extracts one
bit with an O(1/L) chance of termination.

Three artifacts use it:

* ``ev_bomb_test``          -- the Elitzur-Vaidman live/dud bomb tester.
* ``zeno_simulated_oracle`` -- simulate one standard oracle call with 2L bomb
  queries (explosion 1 - cos^{4L}, output distance 1 - cos^{2L} per branch).
* ``guessed_bit_query``     -- read one bit through the symmetric bomb oracle
  with zero explosion risk when the guess is right.

``compile_quantum_to_bomb`` rewrites a whole oracle circuit, replacing each
standard-oracle call with the simulated one at L = ceil(pi^2 Q / (2 eps)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import oracles, qsim
from .oracles import BOMB, SYMMETRIC, HiddenString, QueryLedger
from .qsim import (Gate, QState, RegisterLayout, SimulationError, apply_gate,
                   make_basis_state, rotation, survival_probability)

EPS_MAX = 0.1        # hard cap on the explosion budget
EPS_SOFT = 0.01      # budgets above this draw a warning


class BudgetWarning(UserWarning):
    """Explosion budget above the standard regime (but still allowed)."""


def check_explosion_budget(eps: float) -> None:
    if not 0.0 < eps <= EPS_MAX:
        raise ValueError(f"explosion budget eps={eps} outside (0, {EPS_MAX}]")
    if eps > EPS_SOFT:
        warnings.warn(
            f"explosion budget eps={eps} above the standard {EPS_SOFT} regime",
            BudgetWarning, stacklevel=3)


@dataclass(frozen=True)
class ZenoParams:
    """Step count L of a Zeno chain; the rotation angle is pi/(2L)."""

    L: int

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")

    @property
    def theta(self) -> float:
        return math.pi / (2 * self.L)


# Closed forms for the three survival/explosion quantities of a chain.

def live_test_explosion(L: int) -> float:
    """Explosion probability of testing a live bomb: 1 - cos^{2L}(pi/2L)."""
    return 1.0 - math.cos(math.pi / (2 * L)) ** (2 * L)


def simulated_oracle_branch_explosion(L: int) -> float:
    """Mass lost by a unit x_i=1 branch of the simulated oracle: 1 - cos^{4L}."""
    return 1.0 - math.cos(math.pi / (2 * L)) ** (4 * L)


def simulated_oracle_branch_shrink(L: int) -> float:
    """Amplitude factor cos^{2L}(pi/2L) on x_i=1 branches."""
    return math.cos(math.pi / (2 * L)) ** (2 * L)


def explosion_bound(L: int) -> float:
    """pi^2/(2L), the a-priori bound on simulated-oracle explosion."""
    return math.pi ** 2 / (2 * L)


def distance_bound(L: int) -> float:
    """pi^2/(4L), the a-priori bound on output distance and one-sided chains."""
    return math.pi ** 2 / (4 * L)


def ev_bomb_test(is_live: bool, L: int) -> tuple[str, float]:
    """Elitzur-Vaidman tester: decide live/dud in L probes.

    Returns (verdict, explosion_probability).  The verdict is always correct
    conditioned on survival; a dud never explodes, a live bomb explodes with
    probability 1 - cos^{2L}(pi/2L).
    """
    params = ZenoParams(L)
    layout = RegisterLayout.of(("probe", 2))
    state = make_basis_state(layout, (0,))
    ledger = QueryLedger()
    gate = rotation("probe", params.theta)
    probe_digit = layout.digit_array("probe")
    for _ in range(L):
        state = apply_gate(state, gate)
        ledger.charge(BOMB)
        if is_live:
            # live probe: any amplitude reaching |1> triggers the bomb
            before = survival_probability(state)
            state = qsim.apply_mask(state, probe_digit == 0)
            ledger.add_explosion(before - survival_probability(state))
    # surviving probe sits at |0> for a live bomb, |1> for a dud
    p1 = float(abs(state.amplitudes[layout.encode((1,))]) ** 2)
    p0 = float(abs(state.amplitudes[layout.encode((0,))]) ** 2)
    verdict = "dud" if p1 > p0 else "live"
    return verdict, ledger.explosion_probability


def ev_bomb_test_sampled(is_live: bool, L: int, rng) -> str:
    """One Monte-Carlo trajectory of the tester: 'live', 'dud' or 'exploded'.

    Cross-validates the analytic mode: the exploded fraction over many
    trajectories converges to live_test_explosion(L).
    """
    params = ZenoParams(L)
    layout = RegisterLayout.of(("control", 2), ("index", 1))
    x = HiddenString.of([1 if is_live else 0])
    state = make_basis_state(layout, (0, 0))
    gate = rotation("control", params.theta)
    for _ in range(L):
        state = apply_gate(state, gate)
        exploded, state = oracles.sample_bomb_step(state, x, rng)
        if exploded:
            return "exploded"
    p1 = float(abs(state.amplitudes[layout.encode((1, 0))]) ** 2)
    return "dud" if p1 > 0.5 else "live"


def zeno_simulated_oracle(state: QState, x: HiddenString, params: ZenoParams,
                          ledger: QueryLedger, record: str = "record",
                          index: str = "index", mode: str = "circuit",
                          ancilla: str = "zeno_ancilla",
                          tap=None) -> QState:
    """Simulate one standard-oracle call with 2L bomb queries.

    The output state is exactly

        sum_{r,i} a_{r,i} cos^{2 L x_i}(pi/2L) |r xor x_i, i>

    so x_i=0 branches pass through untouched and x_i=1 branches flip the
    record and shed 1 - cos^{4L} of their mass to the ledger.

    mode="circuit" walks the explicit rotate/probe chain with a fresh work
    qubit (verified to uncompute to |0> before discard); mode="closed_form"
    applies the displayed map directly with identical charges.  ``tap``, if
    given, is called as tap(state, control, index) right before every bomb
    query (circuit mode only).
    """
    if mode == "closed_form":
        return _simulated_oracle_closed_form(state, x, params, ledger,
                                             record, index)
    if mode != "circuit":
        raise ValueError(f"unknown mode {mode!r}")
    L, theta = params.L, params.theta
    work = state
    work = qsim.attach_register(work, ancilla, 2)
    rot_fwd = rotation(ancilla, theta)
    rot_back = rotation(ancilla, -theta)
    for _ in range(L):
        work = apply_gate(work, rot_fwd)
        if tap is not None:
            tap(work, ancilla, index)
        work = oracles.bomb_oracle(work, x, ledger, control=ancilla, index=index)
    work = apply_gate(work, qsim.controlled_bit_flip(ancilla, record))
    work = apply_gate(work, qsim.bit_flip(record))
    for _ in range(L):
        work = apply_gate(work, rot_back)
        if tap is not None:
            tap(work, ancilla, index)
        work = oracles.bomb_oracle(work, x, ledger, control=ancilla, index=index)
    # the chain must have returned the work qubit to |0> on every branch
    return qsim.detach_register(work, ancilla, expect_digit=0)


def _simulated_oracle_closed_form(state: QState, x: HiddenString,
                                  params: ZenoParams, ledger: QueryLedger,
                                  record: str, index: str) -> QState:
    layout = state.layout
    rec = layout.digit_array(record)
    idx = layout.digit_array(index)
    flip = x.as_array()[idx].astype(np.int64)
    stride = layout.stride_of(record)
    dest = np.arange(layout.dim) + ((rec ^ flip) - rec) * stride
    shrink = np.where(flip == 1, simulated_oracle_branch_shrink(params.L), 1.0)
    amps = np.zeros_like(state.amplitudes)
    amps[dest] = state.amplitudes * shrink
    before = survival_probability(state)
    out = QState(layout, amps)
    ledger.charge(BOMB, 2 * params.L)
    ledger.add_explosion(before - survival_probability(out), BOMB)
    return out


def guessed_bit_query(position: int, guess: int, x: HiddenString,
                      params: ZenoParams, ledger: QueryLedger,
                      mode: str = "closed_form") -> int:
    """Read x at a 1-based position through L symmetric bomb queries.

    The returned bit always equals the true bit conditioned on survival.
    Explosion is zero when the guess is right and 1 - cos^{2L}(pi/2L) of the
    surviving mass when it is wrong, so consecutive wrong guesses compound
    multiplicatively on the ledger.
    """
    if guess not in (0, 1):
        raise ValueError(f"guess must be 0 or 1, got {guess}")
    actual = x.bit(position)
    survival_before = ledger.survival
    if mode == "closed_form":
        ledger.charge(SYMMETRIC, params.L)
        if guess != actual:
            frac_lost = live_test_explosion(params.L)
            ledger.add_explosion(survival_before * frac_lost, SYMMETRIC)
        return actual
    if mode != "circuit":
        raise ValueError(f"unknown mode {mode!r}")
    layout = RegisterLayout.of(("control", 2), ("index", len(x)), ("guess", 2))
    state = make_basis_state(layout, (0, position - 1, guess))
    gate = rotation("control", params.theta)
    inner = QueryLedger()
    for _ in range(params.L):
        state = apply_gate(state, gate)
        state = oracles.symmetric_bomb_oracle(state, x, inner)
    state = apply_gate(state, qsim.controlled_bit_flip("guess", "control"))
    state = apply_gate(state, qsim.bit_flip("control"))
    ledger.charge(SYMMETRIC, params.L)
    ledger.add_explosion(survival_before * inner.explosion_probability, SYMMETRIC)
    ctrl = layout.digit_array("control")
    mass1 = float(np.linalg.norm(state.amplitudes[ctrl == 1]) ** 2)
    mass0 = float(np.linalg.norm(state.amplitudes[ctrl == 0]) ** 2)
    bit = 1 if mass1 > mass0 else 0
    if bit != actual:
        raise SimulationError("surviving branch read a wrong bit")
    return bit


# --- oracle circuits and the quantum -> bomb compiler ------------------------

@dataclass(frozen=True)
class Stage:
    """A run of oracle-independent unitaries."""

    gates: tuple[Gate, ...]


@dataclass(frozen=True)
class OracleCall:
    """Marker for one standard-oracle application."""

    record: str = "record"
    index: str = "index"


@dataclass(frozen=True)
class Measurement:
    """Final answer extraction: measure registers, accept listed digit tuples."""

    registers: tuple[str, ...]
    accepting: frozenset


@dataclass(frozen=True)
class QueryCircuit:
    """Alternating unitary stages and oracle calls over a fixed layout."""

    layout: RegisterLayout
    initial: tuple[int, ...]
    elements: tuple
    answer: Measurement

    @property
    def query_count(self) -> int:
        return sum(1 for e in self.elements if isinstance(e, OracleCall))


def run_standard(circuit: QueryCircuit, x: HiddenString,
                 ledger: QueryLedger | None = None) -> tuple[QState, QueryLedger]:
    """Execute the circuit against the unitary oracle."""
    ledger = ledger if ledger is not None else QueryLedger()
    state = make_basis_state(circuit.layout, circuit.initial)
    for element in circuit.elements:
        if isinstance(element, Stage):
            for gate in element.gates:
                state = apply_gate(state, gate)
        elif isinstance(element, OracleCall):
            state = oracles.standard_oracle(state, x, ledger,
                                            record=element.record,
                                            index=element.index)
        else:
            raise SimulationError(f"unknown circuit element {element!r}")
    return state, ledger


def accept_probability(state: QState, answer: Measurement) -> float:
    """Total mass on accepting digit tuples of the answer registers."""
    layout = state.layout
    digit_arrays = [layout.digit_array(r) for r in answer.registers]
    mask = np.zeros(layout.dim, dtype=bool)
    for combo in answer.accepting:
        hit = np.ones(layout.dim, dtype=bool)
        for arr, digit in zip(digit_arrays, combo):
            hit &= arr == digit
        mask |= hit
    return float(np.linalg.norm(state.amplitudes[mask]) ** 2)


@dataclass(frozen=True)
class CompiledBombCircuit:
    """A query circuit with every oracle call replaced by the Zeno chain."""

    circuit: QueryCircuit
    L: int

    @property
    def bomb_query_count(self) -> int:
        return 2 * self.L * self.circuit.query_count

    def run(self, x: HiddenString, mode: str = "closed_form",
            ledger: QueryLedger | None = None,
            tap=None) -> tuple[QState, QueryLedger]:
        ledger = ledger if ledger is not None else QueryLedger()
        params = ZenoParams(self.L)
        state = make_basis_state(self.circuit.layout, self.circuit.initial)
        for element in self.circuit.elements:
            if isinstance(element, Stage):
                for gate in element.gates:
                    state = apply_gate(state, gate)
            elif isinstance(element, OracleCall):
                state = zeno_simulated_oracle(
                    state, x, params, ledger, record=element.record,
                    index=element.index, mode=mode, tap=tap)
            else:
                raise SimulationError(f"unknown circuit element {element!r}")
        return state, ledger


def compile_quantum_to_bomb(circuit: QueryCircuit, eps: float) -> CompiledBombCircuit:
    """Choose L = ceil(pi^2 Q / (2 eps)) and rewrite every oracle call.

    Executing the result on any input loses at most eps mass to explosion and
    lands within eps/2 of the uncompiled final state.
    """
    check_explosion_budget(eps)
    q = circuit.query_count
    if q < 1:
        raise ValueError("circuit declares no oracle calls")
    L = math.ceil(math.pi ** 2 * q / (2 * eps))
    return CompiledBombCircuit(circuit, L)


# --- Grover-OR reference circuit ---------------------------------------------

def _uniform_prep_matrix(n: int) -> np.ndarray:
    """Unitary whose first column is the uniform superposition (a DFT)."""
    w = np.exp(2j * math.pi / n)
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return (w ** (j * k)) / math.sqrt(n)


def _diffusion_matrix(n: int) -> np.ndarray:
    return 2.0 * np.full((n, n), 1.0 / n, dtype=np.complex128) - np.eye(n)


def grover_or_circuit(n: int, iterations: int | None = None,
                      record: str = "record", index: str = "index",
                      ) -> QueryCircuit:
    """Grover circuit deciding OR of n hidden bits.

    ``iterations`` defaults to floor(pi/4 sqrt(n)).  The record qubit is put
    in the |-> state for phase kickback, rotated back after the iterations,
    and a final oracle call writes the verified bit of the measured index
    into it, so the answer measurement is simply record=1.
    """
    if iterations is None:
        iterations = int(math.pi / 4 * math.sqrt(n))
    layout = RegisterLayout.of((record, 2), (index, n))
    prep = Stage((qsim.bit_flip(record), qsim.hadamard(record),
                  qsim.dense_unitary(index, _uniform_prep_matrix(n))))
    elements: list = [prep]
    diffuse = Stage((qsim.dense_unitary(index, _diffusion_matrix(n)),))
    for _ in range(iterations):
        elements.append(OracleCall(record, index))
        elements.append(diffuse)
    elements.append(Stage((qsim.hadamard(record), qsim.bit_flip(record))))
    elements.append(OracleCall(record, index))  # verify the sampled index
    return QueryCircuit(
        layout=layout, initial=(0, 0), elements=tuple(elements),
        answer=Measurement((record,), frozenset({(1,)})))


def grover_success_probability(n: int, marked: int, iterations: int) -> float:
    """Exact hit probability of Grover with the given iteration count."""
    if marked == 0:
        return 0.0
    theta = math.asin(math.sqrt(marked / n))
    return math.sin((2 * iterations + 1) * theta) ** 2


def or_attempt_schedule(n: int, target: float = 0.96) -> tuple[int, ...]:
    """Iteration counts for independent Grover attempts deciding OR.

    A single fixed-iteration Grover run cannot decide OR with constant
    worst-case success (half the mass is lost when exactly n/2 bits are set),
    so the attempts sweep guessed mark counts 1, 2, 4, ... and the whole
    schedule is repeated until the exact worst case over all mark counts
    reaches ``target``.
    """
    base: list[int] = []
    guess = 1
    while guess <= n:
        j = int(math.pi / 4 * math.sqrt(n / guess))
        if not base or base[-1] != j:
            base.append(j)
        guess *= 2
    schedule: list[int] = []
    for _ in range(64):
        schedule.extend(base)
        worst = min(
            1.0 - math.prod(1.0 - grover_success_probability(n, k, j)
                            for j in schedule)
            for k in range(1, n + 1))
        if worst >= target:
            return tuple(schedule)
    raise SimulationError(f"no schedule reached target success {target}")


@dataclass
class BombOrOutcome:
    """Aggregate of the compiled OR attempts on one input."""

    answer_one_probability: float   # P(report 1 | survive)
    explosion: float                # 1 - prod of attempt survivals
    bomb_queries: int
    L: int
    attempts: tuple[int, ...]


def run_bomb_or(n: int, x: HiddenString, eps: float,
                mode: str = "closed_form", target: float = 0.96,
                ) -> BombOrOutcome:
    """Decide OR of x through the compiled Grover attempts.

    Attempts are independent circuits, each compiled with an eps/R share of
    the explosion budget; the reported answer is 1 iff any attempt's verified
    record reads 1.
    """
    check_explosion_budget(eps)
    schedule = or_attempt_schedule(n, target)
    eps_each = eps / len(schedule)
    p_all_zero = 1.0
    survival = 1.0
    bomb_queries = 0
    last_L = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BudgetWarning)
        for j in schedule:
            circuit = grover_or_circuit(n, iterations=j)
            compiled = CompiledBombCircuit(
                circuit,
                math.ceil(math.pi ** 2 * circuit.query_count / (2 * eps_each)))
            final, ledger = compiled.run(x, mode=mode)
            bomb_queries += compiled.bomb_query_count
            last_L = compiled.L
            surv = survival_probability(final)
            p_one = accept_probability(final, circuit.answer) / surv
            p_all_zero *= 1.0 - p_one
            survival *= surv
    return BombOrOutcome(
        answer_one_probability=1.0 - p_all_zero,
        explosion=1.0 - survival,
        bomb_queries=bomb_queries,
        L=last_L,
        attempts=schedule)
