"""Contention-resolution encoders: CNOT circuits from Dicke qubits to ancillas.

A CNOT-only encoder computes an affine-free GF(2) linear map: with G the
ell x n binary matrix whose entry G[j][i-1] is 1 iff the circuit contains
CNOT(data qubit i -> ancilla j), the ancilla word read out after the
encoder is a = G.d mod 2, where d is the data measurement outcome.  Encoder
design therefore reduces to finding G injective on the weight-k slice of
{0,1}^n, which is what `verify_injectivity` certifies; the resulting
word -> winner-subset bijection is the codebook the orchestrator decodes.

Two constructions are provided:

* linear: ell = n-1 ancillas, one CNOT each, a_i = d_{i+1}; always injective.
  The missing last bit is recoverable from the word's parity.
* binary: ell = ceil(log2 C(n,k)) ancillas.  For k = 1 the map is the
  deterministic "write the winner index in binary" circuit; for k > 1 a
  seeded random search looks for an injective matrix at the target width.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .statevector import StateVector, apply_cnot
from .states import DickeSpec, index_bits, weight_k_indices

SEARCH_BUDGET = 10_000  # candidate matrices tried per ell before giving up


class SynthesisFailed(Exception):
    """No injective matrix found at the target ancilla count.

    ``best_ell`` is the smallest ancilla count above the target known to admit
    an injective map: either the escalated search succeeded there, or it is
    n-1, where the linear construction always works.
    """

    def __init__(self, target_ell: int, best_ell: int):
        self.target_ell = target_ell
        self.best_ell = best_ell
        super().__init__(
            f"no injective encoder found with ell={target_ell} "
            f"within {SEARCH_BUDGET} candidates; smallest workable ell={best_ell}"
        )


class NotInjective(Exception):
    """Two contention outcomes map to the same ancilla word."""

    def __init__(self, d1: tuple[int, ...], d2: tuple[int, ...]):
        self.d1 = d1
        self.d2 = d2
        super().__init__(f"outcomes {d1} and {d2} produce the same ancilla word")


class UnknownWord(KeyError):
    """Ancilla word absent from the codebook (invalid/corrupted measurement)."""


class InvalidParity(ValueError):
    """Linear-encoder word weight outside {k-1, k}."""


@dataclass(frozen=True)
class EncoderCircuit:
    """CNOT list from data qubits (1..n) to ancillas (0..ell-1)."""

    n: int
    k: int
    ell: int
    cnots: tuple[tuple[int, int], ...]
    kind: str  # "linear" or "binary"

    def __post_init__(self):
        for control, target in self.cnots:
            if not 1 <= control <= self.n:
                raise ValueError(f"CNOT control d{control} out of range 1..{self.n}")
            if not 0 <= target < self.ell:
                raise ValueError(f"CNOT target a{target} out of range 0..{self.ell - 1}")

    def matrix(self) -> np.ndarray:
        """The ell x n GF(2) matrix realized by the CNOT list (multiplicity mod 2)."""
        g = np.zeros((self.ell, self.n), dtype=np.uint8)
        for control, target in self.cnots:
            g[target, control - 1] ^= 1
        return g

    def encode_word(self, d_bits) -> tuple[int, ...]:
        """Ancilla word G.d mod 2 for a data outcome (d_1, ..., d_n)."""
        d = np.asarray(list(d_bits), dtype=np.uint8)
        if d.shape != (self.n,):
            raise ValueError(f"expected {self.n} data bits, got {d.shape}")
        return tuple(int(b) for b in (self.matrix() @ d) & 1)


@dataclass(frozen=True)
class Codebook:
    """Bijection between ancilla words and winner subsets of size k."""

    n: int
    k: int
    ell: int
    entries: dict  # word tuple -> sorted winner tuple

    def __iter__(self):
        return iter(sorted(self.entries.items()))


def _matrix_to_cnots(g: np.ndarray) -> tuple[tuple[int, int], ...]:
    ell, n = g.shape
    return tuple(
        (i + 1, j) for j in range(ell) for i in range(n) if g[j, i]
    )


def build_linear_encoder(spec: DickeSpec) -> EncoderCircuit:
    """One CNOT per ancilla: a_i = d_{i+1} for i = 0..n-2."""
    n = spec.n
    cnots = tuple((i + 1, i) for i in range(n - 1))
    return EncoderCircuit(n=n, k=spec.k, ell=n - 1, cnots=cnots, kind="linear")


def _slice_bit_matrix(n: int, k: int) -> np.ndarray:
    """C(n,k) x n matrix whose rows are the weight-k outcomes (d_1..d_n)."""
    rows = [index_bits(idx, n) for idx in weight_k_indices(n, k)]
    return np.array(rows, dtype=np.uint8)


def _injective_on_slice(g: np.ndarray, slice_bits: np.ndarray) -> bool:
    words = (slice_bits @ g.T) & 1
    packed = words @ (1 << np.arange(g.shape[0], dtype=np.int64))
    return len(np.unique(packed)) == len(packed)


def _search_matrix(spec: DickeSpec, ell: int, rng) -> np.ndarray | None:
    """Seeded random search for an injective ell x n matrix; None on failure."""
    if 2**ell < spec.num_outcomes:
        return None  # pigeonhole: not enough distinct words
    slice_bits = _slice_bit_matrix(spec.n, spec.k)
    for _ in range(SEARCH_BUDGET):
        g = rng.integers(0, 2, size=(ell, spec.n), dtype=np.uint8)
        if _injective_on_slice(g, slice_bits):
            return g
    return None


def build_binary_encoder(spec: DickeSpec, rng=None, ell: int | None = None) -> EncoderCircuit:
    """Encoder with the compressed ancilla count ell = ceil(log2 C(n,k)).

    k = 1 is deterministic: the state in which node i+1 holds the excitation
    is mapped to the binary representation of i, one CNOT per set bit
    (ancilla 0 being the least significant).  For k > 1 a random search over
    GF(2) matrices is run at the target width; ``rng`` (a numpy Generator)
    seeds it.  Pass ``ell`` to override the target width, e.g. after a
    SynthesisFailed suggested a larger one.
    """
    n, k = spec.n, spec.k
    if k == 1:
        min_ell = max(1, math.ceil(math.log2(n)))
        if ell is None:
            ell = min_ell
        elif ell < min_ell:
            raise ValueError(f"k=1 binary encoder needs ell >= {min_ell}, got {ell}")
        cnots = tuple(
            (i + 1, j) for i in range(n) for j in range(ell) if (i >> j) & 1
        )
        return EncoderCircuit(n=n, k=1, ell=ell, cnots=cnots, kind="binary")

    target_ell = ell if ell is not None else math.ceil(math.log2(spec.num_outcomes))
    if rng is None:
        rng = np.random.default_rng()
    g = _search_matrix(spec, target_ell, rng)
    if g is None:
        best = target_ell
        while True:
            best += 1
            if best >= n - 1:
                best = n - 1  # linear map always works here
                break
            if _search_matrix(spec, best, rng) is not None:
                break
        raise SynthesisFailed(target_ell, best)
    return EncoderCircuit(n=n, k=k, ell=target_ell, cnots=_matrix_to_cnots(g), kind="binary")


def verify_injectivity(circuit: EncoderCircuit, spec: DickeSpec) -> Codebook:
    """Enumerate every weight-k outcome, check all ancilla words differ.

    Returns the codebook mapping each word to its winner subset; raises
    NotInjective naming the two colliding outcomes otherwise.
    """
    if circuit.n != spec.n:
        raise ValueError(f"circuit built for n={circuit.n}, spec has n={spec.n}")
    g = circuit.matrix()
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    entries: dict[tuple[int, ...], tuple[int, ...]] = {}
    for idx in weight_k_indices(spec.n, spec.k):
        d = index_bits(idx, spec.n)
        word = tuple(int(b) for b in (g @ np.array(d, dtype=np.uint8)) & 1)
        if word in seen:
            raise NotInjective(seen[word], d)
        seen[word] = d
        entries[word] = tuple(i for i in range(1, spec.n + 1) if d[i - 1])
    return Codebook(n=spec.n, k=spec.k, ell=circuit.ell, entries=entries)


def decode(codebook: Codebook, word) -> tuple[int, ...]:
    """Winner subset for an ancilla word; UnknownWord if not in the codebook."""
    key = tuple(int(b) for b in word)
    if len(key) != codebook.ell:
        raise ValueError(f"word length {len(key)} != ell {codebook.ell}")
    try:
        return codebook.entries[key]
    except KeyError:
        raise UnknownWord(f"ancilla word {key} not in codebook") from None


def recover_last_bit_linear(word, k: int) -> int:
    """Parity recovery of the un-encoded data bit d_n from a linear-encoder word.

    The word carries d_1..d_{n-1}; their sum is k when d_n = 0 and k-1 when
    d_n = 1.  Any other weight signals a corrupted word.
    """
    weight = sum(int(b) for b in word)
    if weight == k:
        return 0
    if weight == k - 1:
        return 1
    raise InvalidParity(f"word weight {weight} not in {{{k - 1}, {k}}}")


def cnot_count_bound(n: int) -> int:
    """Gate-count bound for the binary encoder: ceil(log2 n) * 2^(ceil(log2 n)-1).

    Exact for k = 1 when n is a power of two, an overestimate otherwise.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    ell = math.ceil(math.log2(n))
    return ell * 2 ** (ell - 1)


def apply_encoder(dicke: StateVector, circuit: EncoderCircuit) -> StateVector:
    """Attach ell |0> ancillas to a Dicke state and run the CNOT list.

    Returns the (n+ell)-qubit contention-resolution state.  Gates are applied
    through the statevector simulator, so this is the quantum counterpart of
    the classical GF(2) path used by `verify_injectivity`.
    """
    if dicke.num_qubits != circuit.n:
        raise ValueError(f"state has {dicke.num_qubits} qubits, circuit expects {circuit.n}")
    total = circuit.n + circuit.ell
    amps = np.zeros(2**total, dtype=complex)
    amps[np.flatnonzero(dicke.amplitudes) << circuit.ell] = dicke.amplitudes[
        np.flatnonzero(dicke.amplitudes)
    ]
    state = StateVector(total, amps)
    for control, target in circuit.cnots:
        state = apply_cnot(state, control, circuit.n + 1 + target)
    return state


def format_circuit(circuit: EncoderCircuit) -> str:
    """Plain-text gate list: header line then one 'CNOT d<i> a<j>' per line."""
    lines = [f"encoder {circuit.kind} n={circuit.n} k={circuit.k} ell={circuit.ell}"]
    lines += [f"CNOT d{c} a{t}" for c, t in circuit.cnots]
    return "\n".join(lines) + "\n"


def format_codebook_csv(codebook: Codebook) -> str:
    """Codebook as CSV: one column per ancilla bit, winners space-separated."""
    buf = io.StringIO()
    header = [f"a_{j}" for j in range(codebook.ell)] + ["winners"]
    buf.write(",".join(header) + "\n")
    for word, winners in codebook:
        buf.write(",".join(str(b) for b in word))
        buf.write("," + " ".join(str(w) for w in winners) + "\n")
    return buf.getvalue()
