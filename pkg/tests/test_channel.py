"""Monte Carlo distribution model: traces, invariants, empirical laws."""
import io
import math

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from eacsim.channel import (
    ChannelParams,
    SlotTimeline,
    empirical_contention_success,
    empirical_full_connection_by_slot,
    empirical_state_distribution,
    make_rng,
    normal_ci,
    sample_winner_sets,
    simulate_distribution,
    split_rng,
    success_csv_row,
    write_success_csv,
)


def binom_pmf(n, j, p):
    return math.comb(n, j) * p**j * (1 - p) ** (n - j)


# ---------------------------------------------------------------- params

def test_channel_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(q_cr=-0.1, q_e=0, M_cr=1, M_e=1)
    with pytest.raises(ValueError):
        ChannelParams(q_cr=0.5, q_e=1.2, M_cr=1, M_e=1)
    with pytest.raises(ValueError):
        ChannelParams(q_cr=0.5, q_e=0.5, M_cr=0, M_e=1)
    assert ChannelParams(q_cr=0.2, q_e=0.4, M_cr=3, M_e=7).m_bar == 3


def test_slot_timeline_validation():
    SlotTimeline(tau_th=100, tau_g=10, tau_d=8, tau_c=10)
    with pytest.raises(ValueError):
        SlotTimeline(tau_th=100, tau_g=0, tau_d=8, tau_c=10)


# ---------------------------------------------------------------- traces

def test_noiseless_connects_everyone_in_one_slot():
    trace = simulate_distribution(6, 0.0, 5, make_rng(0))
    assert trace.connected_sets[0] == (1, 2, 3, 4, 5, 6)
    assert len(trace.slots) == 1  # heralded: nothing left to attempt


def test_fully_absorbing_channel_connects_nobody():
    trace = simulate_distribution(4, 1.0, 3, make_rng(0))
    assert len(trace.connected_sets) == 3
    assert all(s == () for s in trace.connected_sets)


@pytest.mark.parametrize("seed", range(20))
def test_trace_invariants(seed):
    n, m = 6, 5
    trace = simulate_distribution(n, 0.5, m, split_rng(7, seed))
    assert len(trace.slots) <= m
    connected_before = set()
    for mask, cset in zip(trace.slots, trace.connected_sets):
        newly = {i for i in range(1, n + 1) if (mask >> (i - 1)) & 1}
        assert not (newly & connected_before)  # no re-attempt after success
        connected_before |= newly
        assert cset == tuple(sorted(connected_before))  # monotone growth
    if len(trace.slots) < m:
        assert trace.connected_sets[-1] == tuple(range(1, n + 1))  # early stop iff done


def test_connected_at():
    trace = simulate_distribution(5, 0.4, 6, split_rng(1, 0))
    assert trace.connected_at(1) == trace.connected_sets[0]
    assert trace.connected_at(100) == trace.connected_sets[-1]
    with pytest.raises(ValueError):
        trace.connected_at(0)


def test_per_node_indicator_law():
    # P(node i still unconnected after m slots) = q^m, checked per node and slot
    n, q, m, traces = 4, 0.6, 3, 4000
    counts = np.zeros((m, n))
    for t in range(traces):
        trace = simulate_distribution(n, q, m, split_rng(123, t))
        for slot in range(1, m + 1):
            connected = trace.connected_at(slot)
            for i in range(1, n + 1):
                counts[slot - 1, i - 1] += i not in connected
    for slot in range(1, m + 1):
        expected = q**slot
        sigma = math.sqrt(expected * (1 - expected) / traces)
        assert np.all(np.abs(counts[slot - 1] / traces - expected) < 3 * sigma)


def test_markov_property_witness():
    # transition frequencies match the one-step law and ignore deeper history
    n, q, traces = 3, 0.5, 40_000
    rng = make_rng(99)
    visits = {}
    for _ in range(traces):
        trace = simulate_distribution(n, q, 3, rng)
        h = len(trace.connected_at(1))
        i = len(trace.connected_at(2))
        j = len(trace.connected_at(3))
        visits.setdefault((h, i), []).append(j)

    def transition(i, j):
        if j < i:
            return 0.0
        return math.comb(n - i, j - i) * (1 - q) ** (j - i) * q ** (n - j)

    # empirical P(j | i) close to the closed form regardless of h
    for i in (1, 2):
        outcomes = [j for (h, ii), js in visits.items() if ii == i for j in js]
        total = len(outcomes)
        for j in range(i, n + 1):
            p = transition(i, j)
            sigma = math.sqrt(p * (1 - p) / total)
            freq = sum(1 for x in outcomes if x == j) / total
            assert abs(freq - p) < 3 * sigma

    # chi-square independence of the slot-3 state from the slot-1 state given slot 2
    i = 2
    hs = sorted({h for (h, ii) in visits if ii == i})
    table = []
    for h in hs:
        js = visits.get((h, i), [])
        row = [sum(1 for x in js if x == j) for j in (2, 3)]
        if sum(row) > 50:
            table.append(row)
    assert len(table) >= 2
    _, p_value, _, _ = chi2_contingency(np.array(table))
    assert p_value > 0.001


# ---------------------------------------------------------------- empirical estimators

def test_state_distribution_noiseless_point_mass():
    hist = empirical_state_distribution(5, 0.0, 3, 1000, make_rng(0))
    assert hist[5] == 1.0 and hist[:5].sum() == 0.0


def test_state_distribution_single_slot_binomial():
    n, q, trials = 6, 0.35, 100_000
    hist = empirical_state_distribution(n, q, 1, trials, make_rng(3))
    for j in range(n + 1):
        p = binom_pmf(n, j, 1 - q)
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(hist[j] - p) < 3 * sigma


def test_state_distribution_multi_slot_binomial():
    # after M slots the per-node success probability is 1 - q^M
    n, q, m, trials = 5, 0.5, 3, 100_000
    hist = empirical_state_distribution(n, q, m, trials, make_rng(8))
    assert hist.sum() == pytest.approx(1.0, abs=1e-12)
    for j in range(n + 1):
        p = binom_pmf(n, j, 1 - q**m)
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(hist[j] - p) < 3 * sigma


def test_full_connection_near_certain_at_reference_point():
    # n=10, q=0.4: thirteen attempts make full connection all but certain
    trials = 100_000
    hist = empirical_state_distribution(10, 0.4, 13, trials, make_rng(4))
    p = (1 - 0.4**13) ** 10
    sigma = math.sqrt(p * (1 - p) / trials)
    assert abs(hist[10] - p) < 3 * sigma
    assert hist[10] > 0.999


def test_full_connection_trajectory():
    n, q, m, trials = 4, 0.4, 8, 50_000
    traj = empirical_full_connection_by_slot(n, q, m, trials, make_rng(2))
    assert np.all(np.diff(traj) >= 0)
    p_final = (1 - q**m) ** n
    sigma = math.sqrt(p_final * (1 - p_final) / trials)
    assert abs(traj[-1] - p_final) < 3 * sigma


def test_winner_sets_uniform_and_sorted():
    n, k, trials = 5, 2, 50_000
    sets = sample_winner_sets(n, k, trials, make_rng(3))
    assert sets.shape == (trials, k)
    assert (sets[:, 0] < sets[:, 1]).all()
    assert sets.min() >= 1 and sets.max() <= n
    p = 1 / math.comb(n, k)
    sigma = math.sqrt(p * (1 - p) / trials)
    pairs, counts = np.unique(sets, axis=0, return_counts=True)
    assert len(pairs) == math.comb(n, k)
    assert np.all(np.abs(counts / trials - p) < 3.5 * sigma)


def test_winner_sampler_matches_statevector_law():
    # classical sampler vs quantum joint-outcome sampler, both against 1/C(n,k)
    from eacsim.encoder import build_linear_encoder
    from eacsim.protocol import sample_contention_outcomes
    from eacsim.states import DickeSpec

    n, k, trials = 4, 2, 30_000
    p = 1 / math.comb(n, k)
    sigma = math.sqrt(p * (1 - p) / trials)
    classical = sample_winner_sets(n, k, trials, make_rng(11))
    _, counts_c = np.unique(classical, axis=0, return_counts=True)
    spec = DickeSpec(n, k)
    d_bits, _ = sample_contention_outcomes(spec, build_linear_encoder(spec), trials, make_rng(12))
    _, counts_q = np.unique(d_bits, axis=0, return_counts=True)
    for counts in (counts_c, counts_q):
        assert np.all(np.abs(counts / trials - p) < 3.5 * sigma)


def test_contention_success_noise_free():
    params = ChannelParams(q_cr=0.0, q_e=0.0, M_cr=3, M_e=3)
    assert empirical_contention_success(6, 2, params, 2000, make_rng(0)) == 1.0


def test_contention_success_single_noisy_resource():
    # expected value from direct arithmetic: (1 - 0.3^3)^2
    params = ChannelParams(q_cr=0.3, q_e=0.0, M_cr=3, M_e=3)
    trials = 100_000
    est = empirical_contention_success(8, 2, params, trials, make_rng(21))
    expected = (1 - 0.3**3) ** 2
    sigma = math.sqrt(expected * (1 - expected) / trials)
    assert abs(est - expected) < 3 * sigma


def test_contention_success_both_noisy():
    a = 0.3**3
    expected = (1 - a - a + a * a) ** 2
    params = ChannelParams(q_cr=0.3, q_e=0.3, M_cr=3, M_e=3)
    trials = 100_000
    est = empirical_contention_success(8, 2, params, trials, make_rng(22))
    sigma = math.sqrt(expected * (1 - expected) / trials)
    assert abs(est - expected) < 3 * sigma


def test_contention_success_mismatched_horizons():
    # decision reads the common horizon min(M_cr, M_e) = 2
    params = ChannelParams(q_cr=0.4, q_e=0.4, M_cr=2, M_e=9)
    trials = 100_000
    est = empirical_contention_success(5, 2, params, trials, make_rng(23))
    a = 0.4**2
    expected = ((1 - a) * (1 - a)) ** 2
    sigma = math.sqrt(expected * (1 - expected) / trials)
    assert abs(est - expected) < 3 * sigma


def test_contention_success_independent_of_n():
    params = ChannelParams(q_cr=0.4, q_e=0.0, M_cr=3, M_e=3)
    trials = 50_000
    estimates = [
        empirical_contention_success(n, 2, params, trials, split_rng(31, n))
        for n in (2, 5, 10)
    ]
    expected = (1 - 0.4**3) ** 2
    sigma = math.sqrt(expected * (1 - expected) / trials)
    for est in estimates:
        assert abs(est - expected) < 3.5 * sigma


# ---------------------------------------------------------------- reproducibility / reporting

def test_split_rng_reproducible_and_disjoint():
    a = split_rng(5, 2).random(4)
    b = split_rng(5, 2).random(4)
    c = split_rng(5, 3).random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_estimator_bit_reproducible():
    params = ChannelParams(q_cr=0.3, q_e=0.2, M_cr=3, M_e=3)
    e1 = empirical_contention_success(6, 2, params, 20_000, make_rng(7))
    e2 = empirical_contention_success(6, 2, params, 20_000, make_rng(7))
    assert e1 == e2


def test_normal_ci_brackets():
    lo, hi = normal_ci(0.5, 10_000)
    assert lo < 0.5 < hi
    assert hi - lo == pytest.approx(2 * 2.5758293035489004 * math.sqrt(0.25 / 10_000), rel=1e-9)
    assert normal_ci(0.0, 100) == (0.0, 0.0)


def test_success_csv_output():
    params = ChannelParams(q_cr=0.3, q_e=0.0, M_cr=3, M_e=3)
    row = success_csv_row(8, 2, params, estimate=0.95, trials=1000, seed=4)
    assert row["M"] == 3 and row["ci_low"] < 0.95 < row["ci_high"]
    buf = io.StringIO()
    write_success_csv([row], buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "n,k,q_cr,q_e,M,estimate,ci_low,ci_high,trials,seed"
    assert len(lines) == 2
    assert lines[1].startswith("8,2,0.3,0.0,3,0.95,")
