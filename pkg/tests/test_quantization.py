import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgossip.quantization import (
    QState,
    QuantizerSpec,
    distribution,
    lyapunov_scaled,
    lyapunov_units,
    mean_units,
    quantize,
    spread,
    state_from_json,
    state_from_values,
    state_mean,
    state_to_json,
)

SPEC16 = QuantizerSpec(u_min=0.0, u_max=16.0, r=3)  # delta = 2, levels 0,2,...,14


def test_spec_basicfacts():
    assert SPEC16.delta == 2.0
    assert SPEC16.levels == 8
    assert SPEC16.level_value(0) == 0.0
    assert SPEC16.level_value(7) == 14.0
    with pytest.raises(ValueError):
        QuantizerSpec(1.0, 1.0, 3)
    with pytest.raises(ValueError):
        QuantizerSpec(0.0, 1.0, 0)


def test_quantize_interior_point():
    assert quantize(5.0, SPEC16) == 4.0  # 5 in [4, 6)


def test_quantize_boundaries():
    assert quantize(SPEC16.u_min, SPEC16) == SPEC16.u_min
    # the top of the range maps to the last level
    assert quantize(16.0, SPEC16) == 14.0
    with pytest.raises(ValueError):
        quantize(16.1, SPEC16)
    with pytest.raises(ValueError):
        quantize(-0.1, SPEC16)


def test_quantize_idempotent_on_levels():
    for k in range(SPEC16.levels):
        level = SPEC16.level_value(k)
        assert quantize(level, SPEC16) == level


@given(st.floats(0.0, 16.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_quantize_floor_property(u):
    q = quantize(u, SPEC16)
    if u < SPEC16.u_max:
        assert q <= u < q + SPEC16.delta
    else:
        assert q == SPEC16.u_max - SPEC16.delta


UNIT_SPEC = QuantizerSpec(u_min=0.0, u_max=8.0, r=3)  # delta = 1


def test_mean_examples():
    assert mean_units(QState([0, 1, 2], UNIT_SPEC)) == 1
    assert state_mean(QState([0, 1, 2], UNIT_SPEC)) == 1.0
    # mean can land between levels: units (0,1) with delta 2 -> 1.0
    half = QState([0, 1], SPEC16)
    assert mean_units(half) == Fraction(1, 2)
    assert state_mean(half) == 1.0
    shifted = QState([3, 3, 3], QuantizerSpec(1.0, 17.0, 3))
    assert state_mean(shifted) == 1.0 + 3 * 2.0


def test_lyapunov_examples():
    assert lyapunov_units(QState([2, 2, 2], UNIT_SPEC), 2) == 0
    x = QState([0, 1, 2], UNIT_SPEC)
    assert lyapunov_units(x, mean_units(x)) == 2


def test_lyapunov_scaled_matches_direct_sum():
    for units in ([0, 1, 2], [3, 3, 3], [0, 8], [1, 4, 4, 7]):
        x = QState(units, UNIT_SPEC)
        direct = lyapunov_units(x, mean_units(x))
        assert Fraction(lyapunov_scaled(units), len(units)) == direct


def test_spread_examples():
    assert spread(QState([3, 3, 3], UNIT_SPEC)) == 0
    assert spread(QState([0, 1, 1, 1, 2], UNIT_SPEC)) == 2
    assert spread(QState([0, UNIT_SPEC.levels], UNIT_SPEC)) == UNIT_SPEC.levels


def test_distribution_examples():
    assert distribution(QState([1, 1, 1], UNIT_SPEC)) == [(1, 3)]
    assert distribution(QState([0, 1, 1, 2], UNIT_SPEC)) == [(0, 1), (1, 2), (2, 1)]
    assert distribution(QState([0, 1, 1, 1, 2], UNIT_SPEC)) == [(0, 1), (1, 3), (2, 1)]


@given(st.lists(st.integers(0, 8), min_size=1, max_size=10))
@settings(max_examples=150, deadline=None)
def test_range_variance_inequality(units):
    # V about the mean never exceeds n * J^2 / 4 (in squared step units)
    x = QState(units, UNIT_SPEC)
    v = lyapunov_units(x, mean_units(x))
    assert v <= Fraction(x.n * spread(x) ** 2, 4)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=8), st.integers(0, 4))
@settings(max_examples=100, deadline=None)
def test_translation_invariance(units, shift):
    x = QState(units, UNIT_SPEC)
    y = QState([k + shift for k in units], UNIT_SPEC)
    assert spread(x) == spread(y)
    assert lyapunov_units(x, mean_units(x)) == lyapunov_units(y, mean_units(y))


def test_state_validation():
    with pytest.raises(ValueError):
        QState([0, 9], UNIT_SPEC)  # above L
    with pytest.raises(ValueError):
        QState([-1, 0], UNIT_SPEC)
    with pytest.raises(ValueError):
        QState([0.5, 1], UNIT_SPEC)
    with pytest.raises(ValueError):
        QState([], UNIT_SPEC)


def test_state_from_values():
    x = state_from_values([0.0, 4.0, 14.0], SPEC16)
    assert x.units == [0, 2, 7]
    with pytest.raises(ValueError):
        state_from_values([1.0], SPEC16)  # not a multiple of the step


def test_copy_is_independent():
    x = QState([0, 1, 2], UNIT_SPEC)
    y = x.copy()
    y.units[0] = 5
    assert x.units == [0, 1, 2]


def test_state_json_round_trip():
    x = QState([0, 3, 7, 2], SPEC16)
    back = state_from_json(state_to_json(x))
    assert back.units == x.units
    assert back.spec == x.spec
    payload = json.loads(state_to_json(x))
    assert set(payload) == {"u_min", "u_max", "r", "units"}
