"""Tests for SINR/SNR evaluation, buffer-capped rates, and buffer updates.

Hand-evaluated examples pin the formulas; randomized sequences check the
conservation identity sum(B_after) = sum(B_before) + C_S - C_D and the
feasibility guards.
"""

import math

import numpy as np
import pytest

from relaysim.errors import BufferViolationError
from relaysim.rates import (
    BufferState,
    apply_slot,
    inst_rate_receive,
    inst_rate_transmit,
    sinr_receive,
    snr_transmit,
)


def test_sinr_receive_hand_example():
    # rho_s |u^H h_s|^2 / (1 + rho_r |u^H H w|^2) = 4 / (1 + 1) = 2
    got = sinr_receive([2.0, 0.0], np.eye(2), [1.0, 0.0], [1.0, 0.0],
                       1.0, 1.0)
    assert got == pytest.approx(2.0)


def test_sinr_receive_no_leak_reduces_to_snr():
    got = sinr_receive([2.0, 0.0], np.eye(2), [1.0, 0.0], [0.0, 1.0],
                       3.0, 100.0)
    assert got == pytest.approx(3.0 * 4.0)


def test_sinr_receive_zero_source_power():
    got = sinr_receive([2.0, 0.0], np.eye(2), [1.0, 0.0], [1.0, 0.0],
                       0.0, 1.0)
    assert got == 0.0


def test_sinr_receive_rejects_non_unit_combiner():
    with pytest.raises(ValueError):
        sinr_receive([1.0, 0.0], np.eye(2), [2.0, 0.0], [1.0, 0.0], 1.0, 1.0)


def test_snr_transmit_mrt_gets_full_gain():
    h_d = np.array([0.6, 0.8j])
    w = h_d / np.linalg.norm(h_d)
    assert snr_transmit(h_d, w, 10.0) == pytest.approx(10.0)


def test_snr_transmit_orthogonal_beam_gets_zero():
    assert snr_transmit([1.0, 0.0], [0.0, 1.0], 10.0) == 0.0


def test_snr_transmit_hand_example():
    assert snr_transmit([0.6, 0.8], [1.0, 0.0], 10.0) == pytest.approx(3.6)


def test_inst_rate_receive_unconstrained():
    buf = BufferState(np.array([0.0, 0.0]), b_max=10.0)
    assert inst_rate_receive(3.0, buf, 0) == pytest.approx(2.0)


def test_inst_rate_receive_headroom_limited():
    buf = BufferState(np.array([9.0, 0.0]), b_max=10.0)
    assert inst_rate_receive(15.0, buf, 0) == pytest.approx(1.0)


def test_inst_rate_receive_zero_sinr():
    buf = BufferState(np.array([0.0, 0.0]), b_max=10.0)
    assert inst_rate_receive(0.0, buf, 0) == 0.0


def test_inst_rate_receive_infinite_buffer():
    buf = BufferState(np.array([1e6, 0.0]))
    assert inst_rate_receive(7.0, buf, 0) == pytest.approx(3.0)


def test_inst_rate_transmit_empty_buffer():
    buf = BufferState(np.array([0.0, 0.0]))
    assert inst_rate_transmit(100.0, buf, 0) == 0.0


def test_inst_rate_transmit_channel_limited():
    buf = BufferState(np.array([100.0, 0.0]))
    assert inst_rate_transmit(7.0, buf, 0) == pytest.approx(3.0)


def test_inst_rate_transmit_buffer_limited():
    buf = BufferState(np.array([5.0, 0.0]))
    assert inst_rate_transmit(1023.0, buf, 0) == pytest.approx(5.0)


def test_buffer_state_rejects_negative_levels():
    with pytest.raises(BufferViolationError):
        BufferState(np.array([-0.1, 0.0]))


def test_buffer_state_rejects_levels_above_capacity():
    with pytest.raises(BufferViolationError):
        BufferState(np.array([11.0, 0.0]), b_max=10.0)


def test_buffer_headroom():
    buf = BufferState(np.array([3.0, 0.0]), b_max=10.0)
    assert buf.headroom(0) == pytest.approx(7.0)
    assert math.isinf(BufferState(np.array([3.0])).headroom(0))


def test_apply_slot_noop():
    buf = BufferState(np.array([1.0, 2.0]), b_max=10.0)
    out = apply_slot(buf, 0, 0.0, 1, 0.0)
    np.testing.assert_array_equal(out.levels, buf.levels)


def test_apply_slot_hand_example():
    buf = BufferState(np.array([0.0, 5.0]), b_max=10.0)
    out = apply_slot(buf, 0, 2.0, 1, 5.0)
    np.testing.assert_allclose(out.levels, [2.0, 0.0])


def test_apply_slot_rejects_same_relay():
    buf = BufferState(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        apply_slot(buf, 0, 1.0, 0, 1.0)


def test_apply_slot_rejects_overflow():
    buf = BufferState(np.array([9.5, 5.0]), b_max=10.0)
    with pytest.raises(BufferViolationError):
        apply_slot(buf, 0, 1.0, 1, 0.0)


def test_apply_slot_rejects_underflow():
    buf = BufferState(np.array([0.0, 1.0]), b_max=10.0)
    with pytest.raises(BufferViolationError):
        apply_slot(buf, 0, 0.0, 1, 2.0)


def test_apply_slot_clamps_rounding_residue():
    level = 0.1 + 0.2  # 0.30000000000000004
    buf = BufferState(np.array([0.0, level]))
    out = apply_slot(buf, 0, 0.0, 1, 0.3000000000000001)
    assert out.levels[1] == 0.0


def test_apply_slot_sum_conservation_randomized():
    rng = np.random.default_rng(21)
    buf = BufferState(rng.uniform(0.0, 5.0, size=4), b_max=10.0)
    for _ in range(2000):
        i, j = rng.choice(4, size=2, replace=False)
        c_s = rng.uniform(0.0, buf.headroom(i))
        c_d = rng.uniform(0.0, buf.levels[j])
        before = buf.levels.sum()
        buf = apply_slot(buf, int(i), c_s, int(j), c_d)
        assert buf.levels.sum() == pytest.approx(before + c_s - c_d,
                                                 abs=1e-9)
        assert np.all(buf.levels >= 0.0)
        assert np.all(buf.levels <= 10.0)


def test_episode_flow_conservation_identity():
    # C_S-bar - C_D-bar == (sum B(end) - sum B(start)) / T over a random
    # feasible episode, to rounding
    rng = np.random.default_rng(31)
    buf = BufferState(np.zeros(3), b_max=50.0)
    start = buf.levels.sum()
    t_slots = 5000
    tot_s = tot_d = 0.0
    for _ in range(t_slots):
        i, j = rng.choice(3, size=2, replace=False)
        c_s = rng.uniform(0.0, min(buf.headroom(i), 8.0))
        c_d = rng.uniform(0.0, min(buf.levels[j], 8.0))
        buf = apply_slot(buf, int(i), c_s, int(j), c_d)
        tot_s += c_s
        tot_d += c_d
    lhs = tot_s / t_slots - tot_d / t_slots
    rhs = (buf.levels.sum() - start) / t_slots
    assert lhs == pytest.approx(rhs, abs=1e-9)
