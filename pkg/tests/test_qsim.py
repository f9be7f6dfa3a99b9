import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bombsim import qsim
from bombsim.qsim import (LayoutError, QState, RegisterLayout, SimulationError,
                          apply_gate, apply_projector, inner_product,
                          make_basis_state, state_distance,
                          survival_probability)


def layout_cri():
    return RegisterLayout.of(("c", 2), ("r", 2), ("i", 4))


class TestLayout:
    def test_encode_base_case(self):
        assert layout_cri().encode((0, 0, 0)) == 0

    def test_encode_mixed_radix(self):
        assert layout_cri().encode((1, 0, 2)) == 1 * 8 + 0 * 4 + 2

    def test_out_of_range_digit(self):
        with pytest.raises(LayoutError):
            layout_cri().encode((0, 0, 4))

    def test_duplicate_labels_rejected(self):
        with pytest.raises(LayoutError):
            RegisterLayout.of(("a", 2), ("a", 3))

    def test_zero_dimension_rejected(self):
        with pytest.raises(LayoutError):
            RegisterLayout.of(("a", 0))

    def test_dim_cap(self):
        with pytest.raises(LayoutError):
            RegisterLayout.of(("big", qsim.DIM_CAP + 1))

    @given(st.lists(st.integers(min_value=1, max_value=5),
                    min_size=1, max_size=5))
    @settings(max_examples=50, deadline=None)
    def test_encode_decode_roundtrip(self, dims):
        layout = RegisterLayout.of(*((f"g{k}", d) for k, d in enumerate(dims)))
        for index in range(layout.dim):
            assert layout.encode(layout.decode(index)) == index

    def test_digit_array_matches_decode(self):
        layout = layout_cri()
        for label in layout.labels:
            arr = layout.digit_array(label)
            axis = layout.axis_of(label)
            for index in range(layout.dim):
                assert arr[index] == layout.decode(index)[axis]


class TestStatesAndGates:
    def test_basis_state_amplitude(self):
        st_ = make_basis_state(layout_cri(), (1, 0, 2))
        assert st_.amplitudes[10] == 1.0
        assert survival_probability(st_) == pytest.approx(1.0)

    def test_quarter_rotation_flips(self):
        layout = RegisterLayout.of(("q", 2))
        out = apply_gate(make_basis_state(layout, (0,)),
                         qsim.rotation("q", math.pi / 2))
        assert abs(out.amplitudes[1]) == pytest.approx(1.0, abs=1e-12)

    def test_rotation_inverse_pair(self):
        layout = RegisterLayout.of(("q", 2), ("p", 3))
        rng = np.random.default_rng(0)
        amps = rng.normal(size=6) + 1j * rng.normal(size=6)
        amps /= np.linalg.norm(amps)
        state = QState(layout, amps)
        theta = 0.83
        back = apply_gate(apply_gate(state, qsim.rotation("q", theta)),
                          qsim.rotation("q", -theta))
        assert state_distance(back, state) < 1e-12

    def test_cnot_truth_table(self):
        layout = RegisterLayout.of(("c", 2), ("t", 2))
        gate = qsim.controlled_bit_flip("c", "t")
        out = apply_gate(make_basis_state(layout, (1, 0)), gate)
        assert abs(out.amplitudes[layout.encode((1, 1))]) == 1.0
        out = apply_gate(make_basis_state(layout, (0, 1)), gate)
        assert abs(out.amplitudes[layout.encode((0, 1))]) == 1.0

    def test_unknown_register(self):
        layout = RegisterLayout.of(("q", 2))
        with pytest.raises(LayoutError):
            apply_gate(make_basis_state(layout, (0,)), qsim.bit_flip("zz"))

    def test_dense_unitary_rejected_if_not_unitary(self):
        with pytest.raises(SimulationError):
            qsim.dense_unitary("q", np.array([[1, 1], [0, 1]]))

    @given(st.integers(min_value=0, max_value=2 ** 31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_unitaries_preserve_norm(self, seed):
        rng = np.random.default_rng(seed)
        layout = RegisterLayout.of(("a", 2), ("b", 3), ("c", 2))
        amps = rng.normal(size=12) + 1j * rng.normal(size=12)
        amps /= np.linalg.norm(amps)
        state = QState(layout, amps)
        mat = np.linalg.qr(rng.normal(size=(3, 3))
                           + 1j * rng.normal(size=(3, 3)))[0]
        for gate in (qsim.rotation("a", rng.uniform(0, 6.2)),
                     qsim.hadamard("c"),
                     qsim.bit_flip("a"),
                     qsim.controlled_bit_flip("a", "c"),
                     qsim.dense_unitary("b", mat)):
            state = apply_gate(state, gate)
        assert survival_probability(state) == pytest.approx(1.0, abs=1e-12)


class TestProjectorsAndProducts:
    def test_keep_all_identity(self):
        layout = RegisterLayout.of(("q", 4))
        state = make_basis_state(layout, (2,))
        out = apply_projector(state, lambda d: True)
        assert state_distance(out, state) == 0.0

    def test_keep_none_zeroes(self):
        layout = RegisterLayout.of(("q", 4))
        out = apply_projector(make_basis_state(layout, (2,)), lambda d: False)
        assert survival_probability(out) == 0.0

    def test_half_mass(self):
        layout = RegisterLayout.of(("q", 2))
        state = QState(layout, np.array([1, 1]) / math.sqrt(2))
        out = apply_projector(state, lambda d: d[0] == 0)
        assert survival_probability(out) == pytest.approx(0.5)

    @given(st.integers(min_value=0, max_value=2 ** 31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_projector_idempotent_exactly(self, seed):
        rng = np.random.default_rng(seed)
        layout = RegisterLayout.of(("a", 3), ("b", 2))
        amps = rng.normal(size=6) + 1j * rng.normal(size=6)
        amps /= np.linalg.norm(amps)
        state = QState(layout, amps)
        keep = lambda d: (d[0] + d[1]) % 2 == 0
        once = apply_projector(state, keep)
        twice = apply_projector(once, keep)
        assert np.array_equal(once.amplitudes, twice.amplitudes)

    def test_inner_product_is_norm(self):
        layout = RegisterLayout.of(("q", 3))
        rng = np.random.default_rng(4)
        amps = rng.normal(size=3) + 1j * rng.normal(size=3)
        amps /= np.linalg.norm(amps)
        state = QState(layout, amps)
        assert inner_product(state, state).real == pytest.approx(
            survival_probability(state))

    def test_orthogonal_basis_states(self):
        layout = RegisterLayout.of(("q", 3))
        a = make_basis_state(layout, (0,))
        b = make_basis_state(layout, (2,))
        assert inner_product(a, b) == 0.0
        assert state_distance(a, a) == 0.0

    def test_conjugate_linearity(self):
        layout = RegisterLayout.of(("q", 2))
        a = QState(layout, np.array([1j, 0]) / 1.0)
        b = make_basis_state(layout, (0,))
        assert inner_product(a, b) == pytest.approx(-1j)

    def test_layout_mismatch(self):
        a = make_basis_state(RegisterLayout.of(("q", 2)), (0,))
        b = make_basis_state(RegisterLayout.of(("p", 2)), (0,))
        with pytest.raises(LayoutError):
            inner_product(a, b)


class TestAncillaLifecycle:
    def test_attach_detach_roundtrip(self):
        layout = RegisterLayout.of(("q", 3))
        rng = np.random.default_rng(9)
        amps = rng.normal(size=3) + 1j * rng.normal(size=3)
        amps /= np.linalg.norm(amps)
        state = QState(layout, amps)
        lifted = qsim.attach_register(state, "anc", 2)
        assert lifted.layout.dim == 6
        back = qsim.detach_register(lifted, "anc")
        assert state_distance(back, state) < 1e-15

    def test_detach_refuses_dirty_ancilla(self):
        layout = RegisterLayout.of(("q", 2), ("anc", 2))
        state = QState(layout, np.array([0.6, 0.8, 0, 0]))
        with pytest.raises(SimulationError):
            qsim.detach_register(state, "anc")
