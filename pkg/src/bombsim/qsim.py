"""Dense state-vector simulation over named registers of mixed dimension.

A state is an amplitude vector over the joint basis of an ordered list of
registers; basis indices are mixed-radix with the first listed register most
significant.  Amplitude vectors may be sub-normalized: the squared norm of a
state is the probability that the run has survived every terminating
measurement so far, so projectors are allowed to lose mass and nothing ever
renormalizes behind the caller's back.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

DIM_CAP = 1 << 22   # largest joint dimension we agree to materialize
ATOL_NORM = 1e-9    # invariant checks (norm cap, unitarity, contract checks)
ATOL_EXACT = 1e-12  # algebraic identities


class SimulationError(Exception):
    """Base class for state and layout contract violations."""


class LayoutError(SimulationError):
    """Unknown register, digit out of range, or oversized layout."""


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered (label, dimension) pairs defining a joint mixed-radix basis."""

    registers: tuple[tuple[str, int], ...]

    def __post_init__(self):
        labels = [lab for lab, _ in self.registers]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate register labels in {labels}")
        for lab, d in self.registers:
            if d < 1:
                raise LayoutError(f"register {lab!r} has dimension {d} < 1")
        if self.dim > DIM_CAP:
            raise LayoutError(f"joint dimension {self.dim} exceeds cap {DIM_CAP}")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "RegisterLayout":
        return cls(tuple((str(lab), int(d)) for lab, d in pairs))

    @property
    def dim(self) -> int:
        return math.prod(d for _, d in self.registers)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.registers)

    def axis_of(self, label: str) -> int:
        for k, (lab, _) in enumerate(self.registers):
            if lab == label:
                return k
        raise LayoutError(f"no register named {label!r} in {self.labels}")

    def dimension_of(self, label: str) -> int:
        return self.registers[self.axis_of(label)][1]

    def stride_of(self, label: str) -> int:
        axis = self.axis_of(label)
        return math.prod(d for _, d in self.registers[axis + 1:])

    def encode(self, digits: Sequence[int]) -> int:
        """Flat basis index of per-register digits (most significant first)."""
        if len(digits) != len(self.registers):
            raise LayoutError(
                f"expected {len(self.registers)} digits, got {len(digits)}")
        index = 0
        for (lab, d), digit in zip(self.registers, digits):
            if not 0 <= digit < d:
                raise LayoutError(f"digit {digit} out of range for {lab!r} (dim {d})")
            index = index * d + digit
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise LayoutError(f"index {index} out of range for dim {self.dim}")
        digits = []
        for _, d in reversed(self.registers):
            digits.append(index % d)
            index //= d
        return tuple(reversed(digits))

    def digit_array(self, label: str) -> np.ndarray:
        """Digit of `label` for every flat basis index (shared, read-only)."""
        return _digit_array(self.registers, label)

    def with_register(self, label: str, dim: int) -> "RegisterLayout":
        """New layout with (label, dim) appended as least-significant register."""
        return RegisterLayout(self.registers + ((label, dim),))

    def without_register(self, label: str) -> "RegisterLayout":
        axis = self.axis_of(label)
        return RegisterLayout(self.registers[:axis] + self.registers[axis + 1:])


@functools.lru_cache(maxsize=512)
def _digit_array(registers: tuple[tuple[str, int], ...],
                 label: str) -> np.ndarray:
    layout = RegisterLayout(registers)
    d = layout.dimension_of(label)
    stride = layout.stride_of(label)
    arr = (np.arange(layout.dim) // stride) % d
    arr.setflags(write=False)
    return arr

@dataclass
class QState:
    """Possibly sub-normalized amplitude vector over a register layout."""

    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.layout.dim,):
            raise SimulationError(
                f"amplitude vector of length {self.amplitudes.shape} does not "
                f"match layout dimension {self.layout.dim}")
        n2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if n2 > 1.0 + ATOL_NORM:
            raise SimulationError(f"squared norm {n2} exceeds 1 beyond tolerance")

    def copy(self) -> "QState":
        return QState(self.layout, self.amplitudes.copy())


def make_basis_state(layout: RegisterLayout, digits: Sequence[int]) -> QState:
    """Unit basis state with the given per-register digits."""
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[layout.encode(digits)] = 1.0
    return QState(layout, amps)


def zero_state(layout: RegisterLayout) -> QState:
    """All-registers-zero basis state."""
    return make_basis_state(layout, [0] * len(layout.registers))


# --- gates -----------------------------------------------------------------

_XMAT = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_HMAT = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=np.complex128)


@dataclass
class Gate:
    """A unitary on one or more named registers (identity elsewhere)."""

    kind: str
    targets: tuple[str, ...]
    matrix: np.ndarray

    def __repr__(self):
        return f"Gate({self.kind}, targets={self.targets})"


def rotation(target: str, theta: float) -> Gate:
    """Real rotation by theta in the {|0>,|1>} plane of a dim-2 register.

    rotation(pi/2) maps |0> to |1>.
    """
    c, s = math.cos(theta), math.sin(theta)
    return Gate("rotation", (target,),
                np.array([[c, -s], [s, c]], dtype=np.complex128))


def bit_flip(target: str) -> Gate:
    return Gate("bit-flip", (target,), _XMAT)


def hadamard(target: str) -> Gate:
    return Gate("hadamard", (target,), _HMAT)


def controlled_bit_flip(control: str, target: str) -> Gate:
    """Flip `target` on the control=1 subspace; both registers dim 2."""
    return Gate("controlled-bit-flip", (control, target), _CNOT)


def dense_unitary(targets: Iterable[str] | str, matrix: np.ndarray) -> Gate:
    targets = (targets,) if isinstance(targets, str) else tuple(targets)
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise SimulationError(f"unitary must be square, got {matrix.shape}")
    err = np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])).max()
    if err > ATOL_NORM:
        raise SimulationError(f"matrix is not unitary (deviation {err:.2e})")
    return Gate("dense-unitary", targets, matrix)


def apply_gate(state: QState, gate: Gate) -> QState:
    """Apply the gate on its target registers, identity on the rest."""
    layout = state.layout
    axes = [layout.axis_of(t) for t in gate.targets]
    dims = layout.dims
    block = math.prod(dims[a] for a in axes)
    if gate.matrix.shape != (block, block):
        raise SimulationError(
            f"gate of shape {gate.matrix.shape} does not fit registers "
            f"{gate.targets} with joint dimension {block}")
    psi = state.amplitudes.reshape(dims)
    psi = np.moveaxis(psi, axes, range(len(axes)))
    moved_shape = psi.shape
    psi = psi.reshape(block, -1)
    psi = gate.matrix @ psi
    psi = psi.reshape(moved_shape)
    psi = np.moveaxis(psi, range(len(axes)), axes)
    return QState(layout, psi.reshape(-1))


def apply_projector(state: QState, keep: Callable[[tuple[int, ...]], bool]) -> QState:
    """Zero every amplitude whose basis digits fail the predicate.

    The squared norm never increases; lost mass is the caller's to account.
    """
    layout = state.layout
    mask = np.fromiter(
        (keep(layout.decode(i)) for i in range(layout.dim)),
        dtype=bool, count=layout.dim)
    return apply_mask(state, mask)


def apply_mask(state: QState, mask: np.ndarray) -> QState:
    """Projector given directly as a boolean mask over flat basis indices."""
    amps = np.where(mask, state.amplitudes, 0.0)
    return QState(state.layout, amps)


def survival_probability(state: QState) -> float:
    """Squared norm: probability the run has survived to this point."""
    return float(np.vdot(state.amplitudes, state.amplitudes).real)


def inner_product(a: QState, b: QState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.layout != b.layout:
        raise LayoutError("inner product requires identical layouts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def state_distance(a: QState, b: QState) -> float:
    """Euclidean norm of the amplitude difference."""
    if a.layout != b.layout:
        raise LayoutError("distance requires identical layouts")
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def attach_register(state: QState, label: str, dim: int, digit: int = 0) -> QState:
    """Adjoin a fresh least-significant register prepared in |digit>."""
    layout = state.layout.with_register(label, dim)
    amps = np.zeros((state.layout.dim, dim), dtype=np.complex128)
    amps[:, digit] = state.amplitudes
    return QState(layout, amps.reshape(-1))


def detach_register(state: QState, label: str, expect_digit: int = 0,
                    atol: float = ATOL_NORM) -> QState:
    """Discard a register, requiring all mass to sit at `expect_digit`.

    Raises if the register holds more than `atol` amplitude elsewhere: a
    discarded work register must have been uncomputed.
    """
    layout = state.layout
    axis = layout.axis_of(label)
    psi = state.amplitudes.reshape(layout.dims)
    psi = np.moveaxis(psi, axis, -1)
    stray = psi.copy()
    stray[..., expect_digit] = 0.0
    leak = float(np.linalg.norm(stray))
    if leak > atol:
        raise SimulationError(
            f"register {label!r} holds {leak:.3e} amplitude outside "
            f"digit {expect_digit}; refusing to discard")
    return QState(layout.without_register(label),
                  np.ascontiguousarray(psi[..., expect_digit]).reshape(-1))
