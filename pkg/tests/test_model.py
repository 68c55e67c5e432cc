"""Formula-level tests for the channel model, capacities and signal propagation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anbeam.errors import (
    InfeasibleThreshold,
    NoRelays,
    SingularObservation,
)
from anbeam.model import (
    alpha_for_threshold,
    alpha_monotonicity_threshold,
    beam_sinr,
    capacity_dest,
    capacity_relay,
    combined_gains,
    derive_model,
    destination_phase2_rx,
    direct_sinr,
    noise_residual_scale,
    power_matrix,
    relay_snr,
    relay_snrs,
    second_phase_power,
    secrecy_monotone_in_alpha,
    secrecy_rate,
    simulate_noise_residual,
    strongest_relay,
)
from anbeam.types import (
    IndividualBudget,
    NetworkInstance,
    SignalRealization,
)
from conftest import make_instance, random_weights


# ---------------------------------------------------------------------------
# construction guards


def test_instance_rejects_nonpositive_noise():
    with pytest.raises(ValueError):
        NetworkInstance(h_sd=1.0, h_sr=[1.0], h_rd=[1.0], sigma2=0.0)


def test_instance_rejects_vanishing_direct_gain():
    with pytest.raises(ValueError, match="h_sd"):
        NetworkInstance(h_sd=1e-12, h_sr=[1.0], h_rd=[1.0], sigma2=1.0)


def test_instance_rejects_mismatched_relay_vectors():
    with pytest.raises(ValueError):
        NetworkInstance(h_sd=1.0, h_sr=[1.0, 2.0], h_rd=[1.0], sigma2=1.0)


def test_instance_arrays_are_immutable():
    inst = NetworkInstance(h_sd=1.0, h_sr=[1.0], h_rd=[2.0], sigma2=1.0)
    with pytest.raises(ValueError):
        inst.h_sr[0] = 5.0


# ---------------------------------------------------------------------------
# strongest relay


def test_strongest_relay_tie_breaks_low():
    gains = np.sqrt([0.2, 0.9, 0.9])
    inst = NetworkInstance(h_sd=1.0, h_sr=gains, h_rd=np.ones(3), sigma2=1.0)
    assert strongest_relay(inst) == 1


def test_strongest_relay_singleton():
    inst = NetworkInstance(h_sd=1.0, h_sr=[1.0], h_rd=[1.0], sigma2=1.0)
    assert strongest_relay(inst) == 0


def test_strongest_relay_matches_linear_scan(rng):
    for _ in range(20):
        inst = make_instance(rng, 8)
        best, best_gain = 0, -1.0
        for i in range(8):
            gain = abs(inst.h_sr[i]) ** 2
            if gain > best_gain:
                best, best_gain = i, gain
        assert strongest_relay(inst) == best


def test_strongest_relay_requires_relays():
    inst = NetworkInstance(h_sd=1.0, h_sr=[], h_rd=[], sigma2=1.0)
    with pytest.raises(NoRelays):
        strongest_relay(inst)


# ---------------------------------------------------------------------------
# power split from the SNR threshold


UNIT = NetworkInstance(h_sd=1.0, h_sr=[1.0], h_rd=[1.0], sigma2=1.0)


def test_alpha_at_threshold_ceiling_is_one():
    assert alpha_for_threshold(UNIT, p1=1.0, gamma=1.0) == pytest.approx(1.0)


def test_alpha_for_half_threshold():
    a = alpha_for_threshold(UNIT, p1=1.0, gamma=0.5)
    assert a == pytest.approx(2.0 / 3.0)
    assert relay_snr(UNIT, 1.0, a, 0) == pytest.approx(0.5)


def test_alpha_infeasible_threshold():
    with pytest.raises(InfeasibleThreshold):
        alpha_for_threshold(UNIT, p1=1.0, gamma=2.0)


def test_alpha_round_trip_and_dominance(rng):
    for _ in range(50):
        m = int(rng.integers(1, 7))
        inst = make_instance(rng, m)
        p1 = float(rng.uniform(0.5, 8.0))
        e = strongest_relay(inst)
        gamma = float(rng.uniform(0.05, 0.999)) * abs(inst.h_sr[e]) ** 2 * p1 / inst.sigma2
        a = alpha_for_threshold(inst, p1, gamma)
        assert 0.0 < a <= 1.0
        assert relay_snr(inst, p1, a, e) == pytest.approx(gamma, rel=1e-12)
        assert np.all(relay_snrs(inst, p1, a) <= gamma * (1.0 + 1e-12))


# ---------------------------------------------------------------------------
# SNRs and capacities


def test_relay_snr_extremes():
    assert relay_snr(UNIT, 1.0, 0.0, 0) == 0.0
    assert relay_snr(UNIT, 3.0, 1.0, 0) == pytest.approx(3.0)


def test_relay_snr_example():
    assert relay_snr(UNIT, 1.0, 2.0 / 3.0, 0) == pytest.approx(0.5)


def test_relay_snr_nondecreasing_in_alpha(rng):
    inst = make_instance(rng, 3)
    grid = np.linspace(0.0, 1.0, 100)
    for i in range(3):
        snrs = [relay_snr(inst, 2.5, a, i) for a in grid]
        assert np.all(np.diff(snrs) >= -1e-15)


@pytest.mark.parametrize("p1,expected", [(1.0, 0.5), (3.0, 1.0)])
def test_capacity_relay_values(p1, expected):
    # alpha=1 makes Gamma = p1 here, so C = 1/2 log2(1 + p1)
    assert capacity_relay(UNIT, p1, 1.0, 0) == pytest.approx(expected)


def test_capacity_relay_zero_at_zero_alpha():
    assert capacity_relay(UNIT, 1.0, 0.0, 0) == 0.0


def test_capacity_dest_zero_alpha(rng):
    inst = make_instance(rng, 2)
    w = random_weights(rng, 2)
    assert capacity_dest(inst, 4.0, 0.0, w) == 0.0


def test_capacity_dest_direct_only():
    inst = NetworkInstance(h_sd=1.0, h_sr=[0.3], h_rd=[0.3], sigma2=1.0)
    w = np.zeros(2, dtype=complex)
    assert capacity_dest(inst, 1.0, 1.0, w) == pytest.approx(0.5)


def test_capacity_dest_with_zero_weights_is_direct_formula(rng):
    for _ in range(10):
        inst = make_instance(rng, 3)
        a = float(rng.uniform(0.0, 1.0))
        w = np.zeros(4, dtype=complex)
        assert capacity_dest(inst, 2.0, a, w) == \
            0.5 * math.log2(1.0 + direct_sinr(inst, 2.0, a))


def test_secrecy_rate_is_worst_case_over_relays(rng):
    for _ in range(20):
        m = int(rng.integers(1, 6))
        inst = make_instance(rng, m)
        a = float(rng.uniform(0.1, 0.95))
        w = random_weights(rng, m)
        cd = capacity_dest(inst, 3.0, a, w)
        exhaustive = min(cd - capacity_relay(inst, 3.0, a, i) for i in range(m))
        assert secrecy_rate(inst, 3.0, a, w) == pytest.approx(exhaustive, abs=1e-14)


def test_secrecy_rate_zero_at_zero_alpha(rng):
    inst = make_instance(rng, 2)
    assert secrecy_rate(inst, 3.0, 0.0, random_weights(rng, 2)) == 0.0


def test_secrecy_rate_needs_relays():
    inst = NetworkInstance(h_sd=1.0, h_sr=[], h_rd=[], sigma2=1.0)
    with pytest.raises(NoRelays):
        secrecy_rate(inst, 1.0, 0.5, np.array([1.0 + 0j]))


# ---------------------------------------------------------------------------
# monotonicity-in-alpha threshold


def test_monotonicity_threshold_zero_for_matched_gains():
    inst = NetworkInstance(h_sd=0.7, h_sr=[0.7j], h_rd=[1.0], sigma2=1.0)
    assert alpha_monotonicity_threshold(inst, 1.0) == pytest.approx(0.0)
    assert secrecy_monotone_in_alpha(inst, 1.0, np.zeros(2, dtype=complex))


def test_monotonicity_threshold_singular_case():
    # sigma2 = |h_se|^2 p1 puts rho_e exactly at the excluded value 2
    with pytest.raises(SingularObservation):
        alpha_monotonicity_threshold(UNIT, 1.0)


def test_monotonic_secrecy_when_predicate_holds(rng):
    """Finite-difference check: while the beam factor clears the threshold
    (and the relay side sits in the rho_e > 2 regime), the secrecy rate is
    nondecreasing along alpha for a fixed w."""
    checked = 0
    for _ in range(60):
        inst = make_instance(rng, 2)
        weak = NetworkInstance(h_sd=inst.h_sd, h_sr=0.1 * inst.h_sr,
                               h_rd=inst.h_rd, sigma2=1.0)
        p1 = 2.0
        e = strongest_relay(weak)
        rho_e = weak.sigma2 / (abs(weak.h_sr[e]) ** 2 * p1) + 1.0
        if rho_e <= 2.05:
            continue
        w = random_weights(rng, 2)
        if not secrecy_monotone_in_alpha(weak, p1, w):
            continue
        grid = np.linspace(0.01, 0.99, 99)
        values = [secrecy_rate(weak, p1, a, w) for a in grid]
        assert np.all(np.diff(values) >= -1e-9), np.min(np.diff(values))
        checked += 1
    assert checked >= 20


# ---------------------------------------------------------------------------
# second-phase power accounting


def test_power_zero_weights(rng):
    inst = make_instance(rng, 3)
    assert second_phase_power(inst, 2.0, 0.5, np.zeros(4, dtype=complex)) == 0.0


def test_power_no_relays_block_collapse():
    inst = NetworkInstance(h_sd=2.0, h_sr=[], h_rd=[], sigma2=1.0)
    w = np.array([1.5 - 0.5j])
    assert second_phase_power(inst, 3.0, 0.4, w) == \
        pytest.approx(0.4 * 3.0 * abs(w[0]) ** 2)


def test_power_block_formula_matches_dense_quadratic(rng):
    for _ in range(1000):
        m = int(rng.integers(0, 5))
        inst = make_instance(rng, m)
        a = float(rng.uniform(0.0, 1.0))
        w = random_weights(rng, m)
        d = power_matrix(inst, 2.2, a)
        dense = float(np.real(np.conj(w) @ d @ w))
        assert second_phase_power(inst, 2.2, a, w) == pytest.approx(dense, rel=1e-12)


def test_power_matches_monte_carlo_waveforms(rng):
    """Empirical mean transmit power of actual second-phase waveforms."""
    inst = make_instance(rng, 3)
    p1, a = 2.0, 0.55
    w = random_weights(rng, 3)
    n = 100_000
    scale = math.sqrt(0.5)
    x = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    u = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    z = math.sqrt(inst.sigma2 / 2.0) * (rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3)))
    s1 = math.sqrt(a * p1) * x + math.sqrt((1 - a) * p1) * u
    relay_rx = np.outer(s1, inst.h_sr) + z
    g = inst.h_sr * inst.h_rd / inst.h_sd
    src_tx = math.sqrt(a * p1) * w[0] * x - math.sqrt((1 - a) * p1) * np.dot(g, w[1:]) * u
    power = np.mean(np.abs(src_tx) ** 2) + np.sum(
        np.mean(np.abs(relay_rx * w[1:]) ** 2, axis=0))
    assert second_phase_power(inst, p1, a, w) == pytest.approx(float(power), rel=0.01)


# ---------------------------------------------------------------------------
# artificial-noise cancellation


def _random_realization(rng, m):
    return SignalRealization(
        x=complex(rng.normal(), rng.normal()),
        u=complex(rng.normal(), rng.normal()),
        z=rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1),
    )


def test_noise_residual_small_for_random_draws(rng):
    for _ in range(1000):
        m = int(rng.integers(1, 5))
        inst = make_instance(rng, m)
        a = float(rng.uniform(0.0, 1.0))
        w = random_weights(rng, m)
        res = simulate_noise_residual(inst, 3.0, a, w, _random_realization(rng, m))
        scale = noise_residual_scale(inst, 3.0, a, w)
        assert abs(res) <= 1e-12 * max(scale, 1e-300)


def test_noise_residual_zero_weights(rng):
    inst = make_instance(rng, 2)
    res = simulate_noise_residual(inst, 3.0, 0.5, np.zeros(3, dtype=complex),
                                  _random_realization(rng, 2))
    assert res == 0.0


def test_phase2_message_coefficient(rng):
    """With noises and artificial noise silenced, the phase-2 reception is
    exactly sqrt(alpha p1) (w0 h_sd + sum w_i h_si h_id) x."""
    inst = make_instance(rng, 3)
    a, p1 = 0.6, 2.0
    w = random_weights(rng, 3)
    x = complex(rng.normal(), rng.normal())
    clean = SignalRealization(x=x, u=0.0, z=np.zeros(4, dtype=complex))
    rx = destination_phase2_rx(inst, p1, a, w, clean)
    coeff = math.sqrt(a * p1) * (w[0] * inst.h_sd + np.dot(w[1:], inst.h_sr * inst.h_rd))
    assert rx == pytest.approx(coeff * x, rel=1e-12)


# ---------------------------------------------------------------------------
# derived model


def test_derive_model_individual_constants(rng):
    inst = make_instance(rng, 3)
    p1, a = 2.0, 0.6
    budget = IndividualBudget(p_s=5.0, p_i=np.full(3, 0.1))
    derived = derive_model(inst, p1, a, budget)
    c1 = abs(inst.h_sd)
    assert derived.eta1 == pytest.approx(5.0 / (a * p1))
    assert derived.eta2 == pytest.approx((1 - a) / (a * c1 ** 2))
    assert derived.eta3 == pytest.approx(1 + derived.eta2 * c1 ** 2)
    expected_umax = np.abs(inst.h_rd) * np.sqrt(
        0.1 / (np.abs(inst.h_sr) ** 2 * p1 + inst.sigma2))
    assert derived.u_max == pytest.approx(expected_umax)
    assert np.all(derived.u_max >= 0)
    assert derived.h == pytest.approx(combined_gains(inst))


def test_derive_model_power_matrix_definite(rng):
    for _ in range(20):
        inst = make_instance(rng, 3)
        a = float(rng.uniform(0.05, 0.999))
        d = power_matrix(inst, 2.0, a)
        assert np.allclose(d, d.conj().T)
        eigs = np.linalg.eigvalsh(d)
        assert np.all(eigs > 0)


def test_beam_sinr_scale_free_in_phase(rng):
    inst = make_instance(rng, 2)
    w = random_weights(rng, 2)
    a = beam_sinr(inst, 2.0, 0.5, w)
    b = beam_sinr(inst, 2.0, 0.5, w * np.exp(1j * 0.73))
    assert a == pytest.approx(b, rel=1e-12)


# a couple of properties where randomized shrinking adds value


@settings(max_examples=60, deadline=None)
@given(
    gains=st.lists(st.floats(0.05, 3.0), min_size=1, max_size=6),
    alpha=st.floats(0.0, 1.0),
    p1=st.floats(0.1, 10.0),
)
def test_relay_snr_bounded_by_full_power(gains, alpha, p1):
    m = len(gains)
    inst = NetworkInstance(h_sd=1.0, h_sr=np.sqrt(gains), h_rd=np.ones(m), sigma2=1.0)
    for i in range(m):
        snr = relay_snr(inst, p1, alpha, i)
        assert 0.0 <= snr <= gains[i] * p1 + 1e-12
