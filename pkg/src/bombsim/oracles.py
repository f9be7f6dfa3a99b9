"""Query-oracle models over a hidden bit string, with explosion accounting.

Four ways to touch the hidden string:

* ``standard_oracle``   -- unitary XOR of the queried bit into a record register.
* ``bomb_oracle``       -- controlled projector that destroys any amplitude
  querying a 1 with the control on; lost mass is "explosion".
* ``symmetric_bomb_oracle`` -- bomb variant with a guess register; amplitude
  survives iff the control is off or the guess matches the queried bit.
* ``projective_oracle`` -- controlled query whose result is measured
  immediately; both classical branches are returned, nothing terminates.

Positions in the hidden string are 1-based; an index-register digit ``d``
addresses position ``d + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qsim import ATOL_NORM, QState, SimulationError, survival_probability

STANDARD = "standard"
BOMB = "bomb"
SYMMETRIC = "symmetric"
PROJECTIVE = "projective"
CLASSICAL = "classical"
QUANTUM = "quantum"


class RecordContractError(SimulationError):
    """A measurement record register was not |0> when an oracle fired."""


@dataclass(frozen=True)
class HiddenString:
    """Immutable boolean string being queried, positions 1..N."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise ValueError("hidden string must have length >= 1")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("hidden string bits must be 0 or 1")

    @classmethod
    def of(cls, bits) -> "HiddenString":
        return cls(tuple(int(b) for b in bits))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "HiddenString":
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=n)))

    def __len__(self) -> int:
        return len(self.bits)

    def bit(self, position: int) -> int:
        """Bit at a 1-based position."""
        if not 1 <= position <= len(self.bits):
            raise ValueError(f"position {position} outside [1, {len(self.bits)}]")
        return self.bits[position - 1]

    def as_array(self) -> np.ndarray:
        arr = getattr(self, "_array", None)
        if arr is None:
            arr = np.array(self.bits, dtype=np.uint8)
            arr.setflags(write=False)
            object.__setattr__(self, "_array", arr)
        return arr


def double_string(x: HiddenString) -> HiddenString:
    """Concatenate x with its bitwise complement.

    Under the index encoding i~ = a*N + i the plain bomb projector on the
    doubled string acts identically to the symmetric bomb projector on x.
    """
    return HiddenString(x.bits + tuple(1 - b for b in x.bits))


@dataclass
class QueryLedger:
    """Per-model query counters plus accumulated explosion probability.

    ``explosion_probability`` is the total probability mass lost to bomb
    terminations over a run.  When every norm-losing event of a run is routed
    through one ledger, survival + explosion = 1.
    """

    counts: dict[str, int] = field(default_factory=dict)
    explosion_probability: float = 0.0
    events: list[tuple[str, float]] | None = None

    def charge(self, model: str, n: int = 1) -> None:
        self.counts[model] = self.counts.get(model, 0) + n

    def count(self, model: str) -> int:
        return self.counts.get(model, 0)

    @property
    def total_queries(self) -> int:
        return sum(self.counts.values())

    @property
    def survival(self) -> float:
        return 1.0 - self.explosion_probability

    def add_explosion(self, loss: float, model: str = BOMB) -> None:
        if loss < -ATOL_NORM:
            raise ValueError(f"negative norm loss {loss}")
        loss = max(loss, 0.0)
        self.explosion_probability = min(1.0, self.explosion_probability + loss)
        if self.events is not None:
            self.events.append((model, loss))


@dataclass
class BranchOutcome:
    """One classical branch of a projective query."""

    bit: int
    state: QState
    probability: float


def _check_record_cleared(state: QState, record: str | None) -> None:
    if record is None or record not in state.layout.labels:
        return
    rec = state.layout.digit_array(record)
    stray = float(np.linalg.norm(state.amplitudes[rec != 0]))
    if stray > ATOL_NORM:
        raise RecordContractError(
            f"record register {record!r} holds {stray:.3e} amplitude "
            "outside |0> before a measured query")


def standard_oracle(state: QState, x: HiddenString, ledger: QueryLedger,
                    record: str = "record", index: str = "index") -> QState:
    """Unitary oracle: XOR the addressed bit into the record register."""
    layout = state.layout
    if layout.dimension_of(record) != 2:
        raise SimulationError(f"record register {record!r} must have dimension 2")
    if layout.dimension_of(index) != len(x):
        raise SimulationError(
            f"index register dimension {layout.dimension_of(index)} does not "
            f"match string length {len(x)}")
    rec = layout.digit_array(record)
    idx = layout.digit_array(index)
    flip = x.as_array()[idx].astype(np.int64)
    stride = layout.stride_of(record)
    dest = np.arange(layout.dim) + ((rec ^ flip) - rec) * stride
    amps = np.zeros_like(state.amplitudes)
    amps[dest] = state.amplitudes
    ledger.charge(STANDARD)
    return QState(layout, amps)


def bomb_oracle(state: QState, x: HiddenString, ledger: QueryLedger,
                control: str = "control", index: str = "index",
                measurement_record: str | None = None) -> QState:
    """Controlled projector killing amplitude on (control=1, x_i=1) branches.

    The measured record register of the underlying circuit is elided (the
    projector acts on control and index only); pass ``measurement_record`` to
    assert a physically present record register is |0>.
    """
    layout = state.layout
    if layout.dimension_of(control) != 2:
        raise SimulationError(f"control register {control!r} must have dimension 2")
    if layout.dimension_of(index) != len(x):
        raise SimulationError(
            f"index register dimension {layout.dimension_of(index)} does not "
            f"match string length {len(x)}")
    _check_record_cleared(state, measurement_record)
    c = layout.digit_array(control)
    idx = layout.digit_array(index)
    keep = ~((c == 1) & (x.as_array()[idx] == 1))
    before = survival_probability(state)
    out = QState(layout, np.where(keep, state.amplitudes, 0.0))
    ledger.charge(BOMB)
    ledger.add_explosion(before - survival_probability(out), BOMB)
    return out


def symmetric_bomb_oracle(state: QState, x: HiddenString, ledger: QueryLedger,
                          control: str = "control", index: str = "index",
                          guess: str = "guess",
                          measurement_record: str | None = None) -> QState:
    """Bomb projector that survives a controlled query iff the guess is right."""
    layout = state.layout
    if layout.dimension_of(control) != 2 or layout.dimension_of(guess) != 2:
        raise SimulationError("control and guess registers must have dimension 2")
    if layout.dimension_of(index) != len(x):
        raise SimulationError(
            f"index register dimension {layout.dimension_of(index)} does not "
            f"match string length {len(x)}")
    _check_record_cleared(state, measurement_record)
    c = layout.digit_array(control)
    idx = layout.digit_array(index)
    a = layout.digit_array(guess)
    keep = (c == 0) | (x.as_array()[idx] == a)
    before = survival_probability(state)
    out = QState(layout, np.where(keep, state.amplitudes, 0.0))
    ledger.charge(SYMMETRIC)
    ledger.add_explosion(before - survival_probability(out), SYMMETRIC)
    return out


def sample_bomb_step(state: QState, x: HiddenString, rng,
                     control: str = "control", index: str = "index",
                     ) -> tuple[bool, QState]:
    """One Monte-Carlo trajectory step of the bomb query.

    Instead of carrying the shrunk amplitude, sample the termination: with
    probability (mass killed)/(current mass) the bomb goes off.  Returns
    (exploded, post_state); the surviving state is renormalized, so a
    trajectory stays a unit vector and explosion statistics come from
    counting exploded trajectories.
    """
    layout = state.layout
    c = layout.digit_array(control)
    idx = layout.digit_array(index)
    keep = ~((c == 1) & (x.as_array()[idx] == 1))
    total = survival_probability(state)
    kept = QState(layout, np.where(keep, state.amplitudes, 0.0))
    kept_mass = survival_probability(kept)
    p_explode = 1.0 - kept_mass / total if total > 0 else 1.0
    if rng.random() < p_explode:
        return True, QState(layout, np.zeros_like(state.amplitudes))
    return False, QState(layout, kept.amplitudes / math.sqrt(kept_mass))


def projective_oracle(state: QState, x: HiddenString, ledger: QueryLedger,
                      control: str = "control", index: str = "index",
                      measurement_record: str | None = None,
                      ) -> tuple[BranchOutcome, BranchOutcome]:
    """Controlled query measured immediately; returns both classical branches.

    Branch probabilities sum to the input's squared norm.  Nothing explodes:
    the caller may sample a branch or enumerate both.
    """
    layout = state.layout
    if layout.dimension_of(control) != 2:
        raise SimulationError(f"control register {control!r} must have dimension 2")
    if layout.dimension_of(index) != len(x):
        raise SimulationError(
            f"index register dimension {layout.dimension_of(index)} does not "
            f"match string length {len(x)}")
    _check_record_cleared(state, measurement_record)
    c = layout.digit_array(control)
    idx = layout.digit_array(index)
    one = (c == 1) & (x.as_array()[idx] == 1)
    branch1 = QState(layout, np.where(one, state.amplitudes, 0.0))
    branch0 = QState(layout, np.where(one, 0.0, state.amplitudes))
    ledger.charge(PROJECTIVE)
    return (BranchOutcome(0, branch0, survival_probability(branch0)),
            BranchOutcome(1, branch1, survival_probability(branch1)))
