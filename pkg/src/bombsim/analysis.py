"""Progress-function instrumentation and scaling-law fits.

The progress function for AND tracks, step by step, how a bomb algorithm
distinguishes the all-ones string from the N strings with a single zero:

    W_t = sum_k <psi^ones_t | psi^k_t>

taken right before each bomb query.  Every query can shave only a little off
W_t (a per-step inequality in terms of the mass sitting on the (control=1,
index=k) branch and the per-input leaks), while any algorithm that answers
correctly must drive W from N down below a delta-dependent threshold; the
two together force the query count.  This module measures all of those
quantities on an actual run and checks every link of the chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import zeno
from .oracles import HiddenString, QueryLedger
from .qsim import QState
from .zeno import CompiledBombCircuit, Measurement, QueryCircuit

PROGRESS_TOL = 1e-6   # accumulated float error across a full trace
LEAK_TOL = 1e-9       # telescoping identities


@dataclass
class ProgressTrace:
    """Per-step progress values and leaks for the AND input family.

    Input 0 is the all-ones string; input k (1-based) has its k-th bit
    cleared.  ``w_per_k[t, k-1]`` is <psi^0_t|psi^k_t> right before query
    t+1 (row T holds the final states' inner products).  ``leaks[x, t]`` is
    the mass input x loses to query t+1; ``pi_norms[t, k-1]`` is the norm of
    input 0's (control=1, index=k) component before query t+1.
    """

    n: int
    w_per_k: np.ndarray
    leaks: np.ndarray
    pi_norms: np.ndarray
    initial_norms: np.ndarray
    final_norms: np.ndarray
    explosions: np.ndarray

    @property
    def steps(self) -> int:
        return self.w_per_k.shape[0] - 1

    @property
    def w_values(self) -> np.ndarray:
        return self.w_per_k.sum(axis=1)


def and_adversary_inputs(n: int) -> list[HiddenString]:
    """The all-ones string followed by the n single-zero strings."""
    ones = HiddenString(tuple([1] * n))
    out = [ones]
    for k in range(n):
        bits = [1] * n
        bits[k] = 0
        out.append(HiddenString(tuple(bits)))
    return out


def zero_search_circuit(n: int, iterations: int | None = None,
                        attempts: int = 2) -> QueryCircuit:
    """Circuit deciding AND of n bits by hunting for a zero.

    Amplifying the index mass onto the zeros uses the same iterate as the
    one-marked OR search (the two phase oracles differ by a global sign), so
    each attempt is the OR reference circuit read through the opposite
    answer: a verified record of 0 means a zero was found, hence AND = 0.
    Attempts run on separate registers of one circuit so the whole algorithm
    is a single state evolution.
    """
    if iterations is None:
        iterations = int(math.pi / 4 * math.sqrt(n))
    layout_regs: list[tuple[str, int]] = []
    elements: list = []
    answers: list[str] = []
    for a in range(attempts):
        rec, idx = f"rec{a}", f"idx{a}"
        single = zeno.grover_or_circuit(n, iterations, record=rec, index=idx)
        layout_regs.extend(single.layout.registers)
        elements.extend(single.elements)
        answers.append(rec)
    layout = zeno.RegisterLayout(tuple(layout_regs))
    size = len(answers)
    accepting = frozenset(
        combo for combo in _all_bit_tuples(size) if 0 in combo)
    return QueryCircuit(layout=layout, initial=(0,) * len(layout_regs),
                        elements=tuple(elements),
                        answer=Measurement(tuple(answers), accepting))


def _all_bit_tuples(k: int):
    return [tuple((i >> j) & 1 for j in range(k)) for i in range(1 << k)]


@dataclass
class AndBombRunner:
    """Compiled zero-search algorithm exposing each pre-query state."""

    compiled: CompiledBombCircuit

    @classmethod
    def build(cls, n: int, eps: float, attempts: int = 2) -> "AndBombRunner":
        circuit = zero_search_circuit(n, attempts=attempts)
        return cls(zeno.compile_quantum_to_bomb(circuit, eps))

    def run(self, x: HiddenString, tap) -> tuple[QState, QueryLedger]:
        return self.compiled.run(x, mode="circuit", tap=tap)

    def answer_is_and_zero(self, state: QState) -> float:
        """P(algorithm reports AND=0 | survival)."""
        surv = float(np.vdot(state.amplitudes, state.amplitudes).real)
        return zeno.accept_probability(state, self.compiled.circuit.answer) / surv


def progress_trace_and(n: int, eps: float,
                       runner: AndBombRunner | None = None) -> ProgressTrace:
    """Run the compiled AND algorithm on all n+1 adversary inputs in one
    common circuit and record the full progress trace."""
    if runner is None:
        runner = AndBombRunner.build(n, eps)
    inputs = and_adversary_inputs(n)
    ones = inputs[0]
    ones_bits = ones.as_array()

    states0: list[np.ndarray] = []
    leak_rows: list[list[float]] = [[] for _ in inputs]
    pi_rows: list[np.ndarray] = []

    def tap0(state: QState, control: str, index: str):
        amps = state.amplitudes
        layout = state.layout
        c = layout.digit_array(control)
        idx = layout.digit_array(index)
        states0.append(amps.copy())
        dead = (c == 1) & (ones_bits[idx] == 1)
        leak_rows[0].append(float(np.linalg.norm(amps[dead]) ** 2))
        norms = np.zeros(n)
        sel = c == 1
        for k in range(n):
            norms[k] = np.linalg.norm(amps[sel & (idx == k)])
        pi_rows.append(norms)

    final0, ledger0 = runner.run(ones, tap0)
    steps = len(states0)
    w_per_k = np.zeros((steps + 1, n), dtype=complex)
    final_norms = np.zeros(n + 1)
    explosions = np.zeros(n + 1)
    final_norms[0] = float(np.vdot(final0.amplitudes, final0.amplitudes).real)
    explosions[0] = ledger0.explosion_probability

    for k in range(1, n + 1):
        xk = inputs[k]
        xk_bits = xk.as_array()
        t_holder = [0]

        def tapk(state: QState, control: str, index: str, _k=k,
                 _bits=xk_bits, _t=t_holder):
            amps = state.amplitudes
            layout = state.layout
            c = layout.digit_array(control)
            idx = layout.digit_array(index)
            t = _t[0]
            w_per_k[t, _k - 1] = complex(np.vdot(states0[t], amps))
            dead = (c == 1) & (_bits[idx] == 1)
            leak_rows[_k].append(float(np.linalg.norm(amps[dead]) ** 2))
            _t[0] = t + 1

        finalk, ledgerk = runner.run(xk, tapk)
        if t_holder[0] != steps:
            raise RuntimeError("inputs saw different query schedules")
        w_per_k[steps, k - 1] = complex(
            np.vdot(final0.amplitudes, finalk.amplitudes))
        final_norms[k] = float(
            np.vdot(finalk.amplitudes, finalk.amplitudes).real)
        explosions[k] = ledgerk.explosion_probability

    return ProgressTrace(
        n=n,
        w_per_k=w_per_k,
        leaks=np.array(leak_rows),
        pi_norms=np.array(pi_rows) if pi_rows else np.zeros((0, n)),
        initial_norms=np.ones(n + 1),
        final_norms=final_norms,
        explosions=explosions)


@dataclass
class ProgressBoundsReport:
    n: int
    steps: int
    w0: float
    drop: float
    lower_threshold: float
    eps_hat: float
    upper_threshold: float
    step_count_floor: float
    lower_ok: bool
    upper_ok: bool
    step_floor_ok: bool
    per_step_ok: bool

    @property
    def all_ok(self) -> bool:
        return (self.lower_ok and self.upper_ok and self.step_floor_ok
                and self.per_step_ok)


def check_progress_bounds(trace: ProgressTrace, delta: float,
                          tol: float = PROGRESS_TOL) -> ProgressBoundsReport:
    """Verify the measured trace against the two-sided progress bounds.

    Raises if the trace is internally inconsistent (leaks must telescope to
    the measured norm loss); returns the bound comparisons otherwise.
    """
    n, steps = trace.n, trace.steps
    for xi in range(n + 1):
        lost = trace.initial_norms[xi] - trace.final_norms[xi]
        leak_sum = float(trace.leaks[xi].sum())
        if abs(lost - leak_sum) > LEAK_TOL:
            raise ValueError(
                f"input {xi}: leak sum {leak_sum} != norm loss {lost}")
        if abs(trace.explosions[xi] - lost) > LEAK_TOL:
            raise ValueError(
                f"input {xi}: ledger explosion {trace.explosions[xi]} "
                f"!= norm loss {lost}")
    w = trace.w_values
    w0 = float(w[0].real)
    drop = float((w[0] - w[-1]).real)
    lower = (1.0 - 2.0 * math.sqrt(delta * (1.0 - delta))) * n
    eps_hat = float(trace.leaks.sum(axis=1).max())
    upper = math.sqrt(eps_hat * steps * n) + n * eps_hat
    floor = (max(1.0 - 2.0 * math.sqrt(delta * (1.0 - delta)) - eps_hat, 0.0)
             ** 2) * n / eps_hat if eps_hat > 0 else 0.0
    per_step = True
    for t in range(steps):
        dw = np.abs(trace.w_per_k[t] - trace.w_per_k[t + 1])
        cross = np.sqrt(trace.leaks[0, t] * trace.leaks[1:, t])
        if not np.all(dw <= trace.pi_norms[t] + cross + tol):
            per_step = False
            break
    return ProgressBoundsReport(
        n=n, steps=steps, w0=w0, drop=drop, lower_threshold=lower,
        eps_hat=eps_hat, upper_threshold=upper, step_count_floor=floor,
        lower_ok=drop >= lower - tol,
        upper_ok=drop <= upper + tol,
        step_floor_ok=steps >= floor - tol,
        per_step_ok=per_step)


@dataclass
class FitResult:
    exponent: float
    constant: float
    residual: float


def scaling_fit(points) -> FitResult:
    """Least-squares power-law fit cost ~ constant * size^exponent."""
    pts = [(float(s), float(c)) for s, c in points]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 points, got {len(pts)}")
    if any(s <= 0 or c <= 0 for s, c in pts):
        raise ValueError("sizes and costs must be positive")
    logx = np.log([s for s, _ in pts])
    logy = np.log([c for _, c in pts])
    slope, intercept = np.polyfit(logx, logy, 1)
    resid = float(np.sqrt(np.mean((logy - (slope * logx + intercept)) ** 2)))
    return FitResult(exponent=float(slope), constant=float(math.exp(intercept)),
                     residual=resid)
