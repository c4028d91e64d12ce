"""Closed-form analytics of the noisy entanglement-distribution chain.

The number of connected nodes evolves as a discrete-time Markov chain with
no backward transitions: from i connected nodes, the next slot adds a
Binomial(n-i, 1-q) batch of new connections.  Everything here is an exact
formula or a deterministic root-find; the Monte Carlo counterparts live in
`channel` and the two are cross-checked, never merged.
"""
from __future__ import annotations

import math

import numpy as np

from .channel import ChannelParams, SlotTimeline

EXACT_BINOM_LIMIT = 60  # integer arithmetic below, log-gamma above


class NonPositiveHorizon(ValueError):
    """The slot timeline leaves no room for even one distribution attempt."""


def binom(n: int, k: int) -> float:
    """Binomial coefficient, exact for small n, log-gamma for large."""
    if k < 0 or k > n:
        return 0.0
    if n <= EXACT_BINOM_LIMIT:
        return float(math.comb(n, k))
    return float(math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)))


def time_horizon(t: SlotTimeline) -> int:
    """Number of distribution attempts fitting in the coherence window.

    floor((tau_th - (tau_g + tau_c)) / tau_d); raises NonPositiveHorizon when
    generation plus contention already exhaust the window.
    """
    budget = t.tau_th - (t.tau_g + t.tau_c)
    m = math.floor(budget / t.tau_d)
    if m < 1:
        raise NonPositiveHorizon(
            f"no attempt fits: tau_th={t.tau_th}, tau_g+tau_c={t.tau_g + t.tau_c}, tau_d={t.tau_d}"
        )
    return m


def indicator_pmf(q: float, m: int) -> tuple[float, float]:
    """(P[node still unconnected], P[node connected]) after m attempts: (q^m, 1-q^m)."""
    _check_q(q)
    if m < 1:
        raise ValueError(f"m={m} must be >= 1")
    p0 = q**m
    return p0, 1.0 - p0


def transition_prob(n: int, i: int, j: int, q: float) -> float:
    """P[j connected after a slot | i connected before], for n nodes.

    Binomial(n-i, 1-q) over the j-i new connections; 0 for j < i (the chain
    never moves backward).  Slot-index independent.
    """
    _check_q(q)
    if not 0 <= i <= n or not 0 <= j <= n:
        raise ValueError(f"states must lie in 0..{n}, got i={i}, j={j}")
    if j < i:
        return 0.0
    return binom(n - i, j - i) * (1.0 - q) ** (j - i) * q ** (n - j)


def transition_matrix(n: int, q: float) -> np.ndarray:
    """(n+1) x (n+1) row-stochastic, upper-triangular transition matrix."""
    t = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(i, n + 1):
            t[i, j] = transition_prob(n, i, j, q)
    return t


def state_prob(n: int, j: int, q: float, m: int) -> float:
    """P[j of n nodes connected after m slots]: Binomial(n, 1-q^m) mass at j."""
    _check_q(q)
    if not 0 <= j <= n:
        raise ValueError(f"j={j} must lie in 0..{n}")
    if m < 1:
        raise ValueError(f"m={m} must be >= 1")
    p_fail = q**m
    return binom(n, j) * (1.0 - p_fail) ** j * p_fail ** (n - j)


def success_prob(k: int, q: float, M: int) -> float:
    """Probability the k winners all get their ebit within M attempts: (1-q^M)^k.

    Independent of the total number of contending nodes.
    """
    _check_q(q)
    if k < 1:
        raise ValueError(f"k={k} must be >= 1")
    if M < 1:
        raise ValueError(f"M={M} must be >= 1")
    return (1.0 - q**M) ** k


def success_prob_parallel(k: int, q: float, M: int, l_c: int) -> float:
    """Success with l_c communication qubits per node attempting in parallel."""
    if l_c < 1:
        raise ValueError(f"l_c={l_c} must be >= 1")
    return success_prob(k, q, M * l_c)


def success_prob_fully_noisy(k: int, params: ChannelParams) -> float:
    """Success when both resource distributions are noisy.

    Evaluated at the common horizon m_bar = min(M_cr, M_e); per winner the
    two independent processes must both have delivered, so the base is
    (1 - q_cr^m - q_e^m + q_cr^m q_e^m) = (1 - q_cr^m)(1 - q_e^m).
    """
    if k < 1:
        raise ValueError(f"k={k} must be >= 1")
    m = params.m_bar
    a = params.q_cr**m
    b = params.q_e**m
    return (1.0 - a - b + a * b) ** k


def absorbing_threshold(n: int, M: int, epsilon: float = 1e-5) -> float:
    """Largest failure probability below which full connection stays near-certain.

    The unique q solving P[all n connected after M slots] = 1 - epsilon,
    found by bisection (full-connection probability is strictly decreasing
    in q); for every q below the threshold the probability exceeds
    1 - epsilon.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon={epsilon} must be in (0, 1)")
    if n < 1 or M < 1:
        raise ValueError("need n >= 1 and M >= 1")
    target = 1.0 - epsilon

    def gap(q: float) -> float:
        return state_prob(n, n, q, M) - target

    lo, hi = 0.0, 1.0  # gap(0) = epsilon > 0 > gap(1) = -(1 - epsilon)
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def absorbing_threshold_worst_case(ns, M: int, epsilon: float = 1e-5) -> float:
    """Minimum threshold over a family of node counts (largest n dominates)."""
    ns = list(ns)
    if not ns:
        raise ValueError("need at least one n")
    return min(absorbing_threshold(n, M, epsilon) for n in ns)


def dicke_outcome_probability(n: int, k: int) -> tuple[float, float]:
    """(joint, marginal) contention-outcome law: every weight-k string has
    probability 1/C(n,k) and each node wins with probability k/n."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    return 1.0 / binom(n, k), k / n


def _check_q(q: float) -> None:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} must be in [0, 1]")
