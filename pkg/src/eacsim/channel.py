"""Monte Carlo simulation of heralded, slotted, noisy entanglement distribution.

Each of n nodes needs one ebit from the orchestrator.  Per slot, every
not-yet-connected node gets an independent distribution attempt that fails
with probability q (absorbing-channel model); heralding tells the
orchestrator who is connected, so successful nodes are never re-attempted.
The process runs for at most M slots.  This module is the empirical
counterpart of the closed forms in `markov`: the two are kept strictly
independent so Monte Carlo results can validate the analytics.

Reproducibility: experiments key a counter-based Philox stream by the master
seed.  `split_rng(seed, i)` yields the i-th trial's private stream (disjoint
counter blocks), and the vectorized estimators draw one rectangular block of
uniforms whose row t belongs to trial t, so results are bit-identical for a
given master seed no matter how trials would be scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

DEFAULT_TRIALS = 100_000
CONFIDENCE_LEVEL = 0.99


@dataclass(frozen=True)
class ChannelParams:
    """Failure probabilities and time horizons for the two distribution processes."""

    q_cr: float
    q_e: float
    M_cr: int
    M_e: int

    def __post_init__(self):
        for name in ("q_cr", "q_e"):
            q = getattr(self, name)
            if not 0.0 <= q <= 1.0:
                raise ValueError(f"{name}={q} must be in [0, 1]")
        for name in ("M_cr", "M_e"):
            m = getattr(self, name)
            if m < 1:
                raise ValueError(f"{name}={m} must be >= 1")

    @property
    def m_bar(self) -> int:
        """Common decision horizon: the smaller of the two time horizons."""
        return min(self.M_cr, self.M_e)


@dataclass(frozen=True)
class SlotTimeline:
    """Slot structure of one access-control round (all times in one unit).

    tau_th: coherence window, tau_g: multipartite generation time,
    tau_d: one distribution attempt, tau_c: contention-resolution time.
    """

    tau_th: float
    tau_g: float
    tau_d: float
    tau_c: float

    def __post_init__(self):
        for name in ("tau_th", "tau_g", "tau_d", "tau_c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class DistributionTrace:
    """Realization of one distribution process.

    ``slots[m-1]`` is a bitmask (bit i-1 = node i) of the nodes whose ebit
    arrived in slot m; ``connected_sets[m-1]`` is the sorted tuple of all
    nodes connected after slot m.  The trace may stop early once every node
    is connected, so it can be shorter than M.
    """

    n: int
    slots: tuple[int, ...]
    connected_sets: tuple[tuple[int, ...], ...]

    def connected_at(self, m: int) -> tuple[int, ...]:
        """Connected set after slot m (1-based); constant past an early stop."""
        if m < 1:
            raise ValueError("slot index is 1-based")
        if not self.connected_sets:
            return ()
        return self.connected_sets[min(m, len(self.connected_sets)) - 1]


def make_rng(master_seed: int) -> np.random.Generator:
    """Counter-based stream for a whole experiment."""
    return np.random.Generator(np.random.Philox(key=master_seed))

def split_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Private stream for one trial: disjoint counter block of the master stream."""
    return np.random.Generator(np.random.Philox(key=master_seed).jumped(trial_index))


def simulate_distribution(n: int, q: float, M: int, rng) -> DistributionTrace:
    """Run one heralded distribution process for n nodes over at most M slots."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} must be in [0, 1]")
    if M < 1:
        raise ValueError(f"M={M} must be >= 1")
    pending = list(range(1, n + 1))
    connected: list[int] = []
    slots: list[int] = []
    sets: list[tuple[int, ...]] = []
    for _ in range(M):
        if not pending:
            break
        draws = rng.random(len(pending)) < (1.0 - q)
        mask = 0
        still = []
        for node, ok in zip(pending, draws):
            if ok:
                mask |= 1 << (node - 1)
                connected.append(node)
            else:
                still.append(node)
        pending = still
        slots.append(mask)
        sets.append(tuple(sorted(connected)))
    return DistributionTrace(n=n, slots=tuple(slots), connected_sets=tuple(sets))


def _connected_after(n: int, q: float, slots: int, trials: int, rng,
                     snapshot_slot: int | None = None) -> np.ndarray:
    """Vectorized per-slot process: (trials, n) boolean connection status.

    With ``snapshot_slot`` set, the whole process still runs for ``slots``
    slots but the status returned is the one after the snapshot slot.
    """
    connected = np.zeros((trials, n), dtype=bool)
    snap = connected
    for m in range(1, slots + 1):
        attempts = rng.random((trials, n)) < (1.0 - q)
        connected = connected | (~connected & attempts)
        if m == snapshot_slot:
            snap = connected
    return snap if snapshot_slot is not None and snapshot_slot <= slots else connected


def empirical_full_connection_by_slot(n: int, q: float, M: int, trials: int, rng) -> np.ndarray:
    """Fraction of trials with all n nodes connected by slot m, for m = 1..M."""
    connected = np.zeros((trials, n), dtype=bool)
    out = np.empty(M)
    for m in range(M):
        attempts = rng.random((trials, n)) < (1.0 - q)
        connected |= ~connected & attempts
        out[m] = connected.all(axis=1).mean()
    return out


def empirical_state_distribution(
    n: int, q: float, M: int, trials: int = DEFAULT_TRIALS, rng=None
) -> np.ndarray:
    """Frequency of ending with j connected nodes, j = 0..n (sums to 1)."""
    if trials < 1:
        raise ValueError(f"trials={trials} must be >= 1")
    if rng is None:
        rng = make_rng(0)
    connected = _connected_after(n, q, M, trials, rng)
    counts = np.bincount(connected.sum(axis=1), minlength=n + 1)
    return counts / trials


def sample_winner_sets(n: int, k: int, trials: int, rng) -> np.ndarray:
    """(trials, k) node indices: uniform weight-k winner sets.

    Classical sampling of the contention outcome law (every k-subset equally
    likely); cross-validated against the statevector path in the tests so
    noise experiments can scale past the qubit cap.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    order = np.argsort(rng.random((trials, n)), axis=1)
    return np.sort(order[:, :k], axis=1) + 1


def empirical_contention_success(
    n: int, k: int, params: ChannelParams, trials: int = DEFAULT_TRIALS, rng=None
) -> float:
    """Fraction of trials in which the winner set is fully connected.

    Per trial: draw a uniform weight-k winner set, run the two distribution
    processes independently (to their own horizons), and count success when
    every winner holds both ebits at the common horizon m_bar.
    """
    if trials < 1:
        raise ValueError(f"trials={trials} must be >= 1")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if rng is None:
        rng = make_rng(0)
    m_bar = params.m_bar
    # both processes run to their own horizons; the decision reads slot m_bar
    conn_cr = _connected_after(n, params.q_cr, params.M_cr, trials, rng, snapshot_slot=m_bar)
    conn_e = _connected_after(n, params.q_e, params.M_e, trials, rng, snapshot_slot=m_bar)
    winners = sample_winner_sets(n, k, trials, rng) - 1
    ok_cr = np.take_along_axis(conn_cr, winners, axis=1).all(axis=1)
    ok_e = np.take_along_axis(conn_e, winners, axis=1).all(axis=1)
    return float((ok_cr & ok_e).mean())


def normal_ci(p_hat: float, trials: int, level: float = CONFIDENCE_LEVEL) -> tuple[float, float]:
    """Normal-approximation confidence interval for a Bernoulli mean."""
    z = float(norm.ppf(0.5 + level / 2.0))
    half = z * math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / trials)
    return max(0.0, float(p_hat) - half), min(1.0, float(p_hat) + half)


SUCCESS_CSV_COLUMNS = ("n", "k", "q_cr", "q_e", "M", "estimate", "ci_low", "ci_high", "trials", "seed")


def success_csv_row(
    n: int, k: int, params: ChannelParams, estimate: float, trials: int, seed: int
) -> dict:
    """One result row in the module's CSV schema (M is the decision horizon)."""
    lo, hi = normal_ci(estimate, trials)
    return {
        "n": n,
        "k": k,
        "q_cr": params.q_cr,
        "q_e": params.q_e,
        "M": params.m_bar,
        "estimate": estimate,
        "ci_low": lo,
        "ci_high": hi,
        "trials": trials,
        "seed": seed,
    }


def write_success_csv(rows, stream) -> None:
    """Emit result rows with the fixed column set, '.'-decimal, header first."""
    stream.write(",".join(SUCCESS_CSV_COLUMNS) + "\n")
    for row in rows:
        stream.write(",".join(repr(row[c]) if isinstance(row[c], float) else str(row[c])
                              for c in SUCCESS_CSV_COLUMNS) + "\n")
