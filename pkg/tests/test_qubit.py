import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privdel.qubit import (
    Basis,
    EIGENSTATES,
    Qubit,
    apply_x,
    born_probability_zero,
    measure,
    measure_all_sites,
    measure_sites,
    prepare,
)

SQRT_HALF = math.sqrt(0.5)


def rng_for(seed):
    return np.random.default_rng(seed)


def test_prepare_returns_the_four_reference_states():
    assert prepare(0, Basis.RECTILINEAR).vector() == pytest.approx([1.0, 0.0])
    assert prepare(1, Basis.RECTILINEAR).vector() == pytest.approx([0.0, 1.0])
    assert prepare(0, Basis.DIAGONAL).vector() == pytest.approx([SQRT_HALF, SQRT_HALF])
    assert prepare(1, Basis.DIAGONAL).vector() == pytest.approx([SQRT_HALF, -SQRT_HALF])


def test_prepare_rejects_non_bits():
    with pytest.raises(ValueError):
        prepare(2, Basis.RECTILINEAR)


def test_same_basis_measurement_is_deterministic():
    rng = rng_for(0)
    for basis in Basis:
        for bit in (0, 1):
            state = prepare(bit, basis)
            for _ in range(50):
                outcome, collapsed = measure(state, basis, rng)
                assert outcome == bit
                assert collapsed == state


def test_conjugate_measurement_is_a_fair_coin():
    # |<0|+>|^2 = 1/2, checked as an empirical frequency
    trials = 100_000
    amps = np.tile(EIGENSTATES[Basis.DIAGONAL, 0], (trials, 1))
    outcomes = measure_all_sites(amps, Basis.RECTILINEAR, rng_for(1))
    assert abs(outcomes.mean() - 0.5) < 0.005


@pytest.mark.parametrize("basis", list(Basis))
def test_cross_basis_frequencies_within_three_sigma(basis):
    trials = 20_000
    other = Basis.DIAGONAL if basis is Basis.RECTILINEAR else Basis.RECTILINEAR
    for bit in (0, 1):
        amps = np.tile(EIGENSTATES[basis, bit], (trials, 1))
        outcomes = measure_all_sites(amps, other, rng_for(10 + bit))
        assert abs(outcomes.mean() - 0.5) <= 3 * 0.5 / math.sqrt(trials)


def test_normalization_is_enforced():
    with pytest.raises(ValueError):
        Qubit(1.0, 1.0)
    with pytest.raises(ValueError):
        Qubit(0.5, 0.5)


@given(st.floats(0, 2 * math.pi))
def test_any_real_unit_vector_is_a_valid_state(theta):
    Qubit(math.cos(theta), math.sin(theta))


def test_apply_x_on_reference_states():
    assert apply_x(prepare(0, Basis.RECTILINEAR)) == prepare(1, Basis.RECTILINEAR)
    assert apply_x(prepare(1, Basis.RECTILINEAR)) == prepare(0, Basis.RECTILINEAR)
    # |+> is invariant; |-> flips only its global sign
    assert apply_x(prepare(0, Basis.DIAGONAL)) == prepare(0, Basis.DIAGONAL)
    flipped = apply_x(prepare(1, Basis.DIAGONAL))
    assert flipped.vector() == pytest.approx([-SQRT_HALF, SQRT_HALF])


@given(st.floats(0, 2 * math.pi), st.sampled_from(list(Basis)), st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_repeated_measurement_is_idempotent(theta, basis, seed):
    rng = rng_for(seed)
    state = Qubit(math.cos(theta), math.sin(theta))
    first, collapsed = measure(state, basis, rng)
    second, again = measure(collapsed, basis, rng)
    assert second == first
    assert again == collapsed


@given(st.floats(0, 2 * math.pi), st.sampled_from(list(Basis)))
@settings(max_examples=60, deadline=None)
def test_global_sign_is_unobservable(theta, basis):
    a0, a1 = math.cos(theta), math.sin(theta)
    p_plus = born_probability_zero(a0, a1, basis)
    p_minus = born_probability_zero(-a0, -a1, basis)
    assert p_plus == pytest.approx(p_minus, abs=1e-15)
    # same stream position, same outcome
    out_plus, _ = measure(Qubit(a0, a1), basis, rng_for(7))
    out_minus, _ = measure(Qubit(-a0, -a1), basis, rng_for(7))
    assert out_plus == out_minus


@given(st.floats(0, 2 * math.pi), st.sampled_from(list(Basis)), st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_collapse_preserves_normalization(theta, basis, seed):
    _, collapsed = measure(Qubit(math.cos(theta), math.sin(theta)), basis, rng_for(seed))
    norm2 = collapsed.amplitude0**2 + collapsed.amplitude1**2
    assert abs(norm2 - 1.0) <= 1e-12


def test_readout_flip_inverts_the_report_but_not_the_collapse():
    rng = rng_for(3)
    outcome, collapsed = measure(prepare(0, Basis.RECTILINEAR), Basis.RECTILINEAR, rng, flip_probability=1.0)
    assert outcome == 1
    assert collapsed == prepare(0, Basis.RECTILINEAR)


def test_measure_sites_matches_scalar_semantics():
    # deterministic case: eigenstates measured in their own bases
    amps = EIGENSTATES[[0, 0, 1, 1], [0, 1, 0, 1]].copy()
    outcomes = measure_sites(amps, np.arange(4), np.array([0, 0, 1, 1]), rng_for(4))
    assert outcomes.tolist() == [0, 1, 0, 1]
    assert np.array_equal(amps, EIGENSTATES[[0, 0, 1, 1], [0, 1, 0, 1]])


def test_measure_sites_collapses_in_place():
    amps = np.tile(EIGENSTATES[Basis.DIAGONAL, 0], (3, 1))
    outcomes = measure_sites(amps, np.array([1]), Basis.RECTILINEAR, rng_for(5))
    expected = EIGENSTATES[Basis.RECTILINEAR, outcomes[0]]
    assert np.array_equal(amps[1], expected)
    assert np.array_equal(amps[0], EIGENSTATES[Basis.DIAGONAL, 0])


def test_measure_sites_readout_flip_is_classical():
    bits = np.array([0, 1, 1, 0], dtype=np.uint8)
    amps = EIGENSTATES[np.ones(4, dtype=np.intp), bits].copy()
    reported = measure_sites(
        amps, np.arange(4), Basis.DIAGONAL, rng_for(6), flip_probability=1.0
    )
    assert np.array_equal(reported, bits ^ 1)
    # the collapse tracked the physical outcomes, so a clean re-measurement
    # recovers the original values
    again = measure_sites(amps, np.arange(4), Basis.DIAGONAL, rng_for(7))
    assert np.array_equal(again, bits)
