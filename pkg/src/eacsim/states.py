"""Entangled resource states: Dicke (including W) and GHZ.

States are built by direct amplitude assignment rather than gate synthesis.
The weight-k basis strings of a Dicke state are enumerated in lexicographic
order of their big-endian bitstrings (i.e. ascending basis index); this fixes
the index convention used by the binary contention-resolution encoder, and
codebooks are always emitted explicitly so consumers never depend on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .statevector import MAX_QUBITS, CapacityError, StateVector


@dataclass(frozen=True)
class DickeSpec:
    """Contention instance: n competing nodes, k winners."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 contending nodes, got n={self.n}")
        if not 1 <= self.k < self.n:
            raise ValueError(f"winner count k={self.k} must satisfy 1 <= k < n={self.n}")

    @property
    def num_outcomes(self) -> int:
        return math.comb(self.n, self.k)


def weight_k_indices(n: int, k: int) -> list[int]:
    """Basis indices of all n-bit strings of Hamming weight k, ascending.

    Ascending index order equals lexicographic order of the big-endian
    bitstrings.  Uses Gosper's hack to step between same-weight integers.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 0:
        return [0]
    x = (1 << k) - 1
    limit = 1 << n
    out = []
    while x < limit:
        out.append(x)
        u = x & -x
        v = x + u
        x = v | (((v ^ x) // u) >> 2)
    return out


def index_bits(index: int, n: int) -> tuple[int, ...]:
    """Big-endian bit tuple (d_1, ..., d_n) of a basis index."""
    return tuple((index >> (n - i)) & 1 for i in range(1, n + 1))


def dicke_state(spec: DickeSpec) -> StateVector:
    """Even superposition of every weight-k computational basis state."""
    if spec.n > MAX_QUBITS:
        raise CapacityError(f"n={spec.n} exceeds the {MAX_QUBITS}-qubit cap")
    amps = np.zeros(2**spec.n, dtype=complex)
    amp = 1.0 / math.sqrt(spec.num_outcomes)
    amps[weight_k_indices(spec.n, spec.k)] = amp
    return StateVector(spec.n, amps)


def ghz_state(n: int) -> StateVector:
    """(|0...0> + |1...1>)/sqrt(2) on n qubits."""
    if n < 2:
        raise ValueError(f"GHZ state needs n >= 2, got {n}")
    if n > MAX_QUBITS:
        raise CapacityError(f"n={n} exceeds the {MAX_QUBITS}-qubit cap")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    return StateVector(n, amps)


def per_node_win_probability(spec: DickeSpec) -> float:
    """Probability that any given node reads outcome 1: C(n-1,k-1)/C(n,k) = k/n."""
    return spec.k / spec.n
