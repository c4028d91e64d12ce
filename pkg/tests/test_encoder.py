"""Encoders: golden codebooks, injectivity, gate counts, emission formats."""
import math
from itertools import combinations

import numpy as np
import pytest

from eacsim import statevector as sv
from eacsim.encoder import (
    Codebook,
    EncoderCircuit,
    InvalidParity,
    NotInjective,
    SynthesisFailed,
    UnknownWord,
    apply_encoder,
    build_binary_encoder,
    build_linear_encoder,
    cnot_count_bound,
    decode,
    format_circuit,
    format_codebook_csv,
    recover_last_bit_linear,
    verify_injectivity,
)
from eacsim.states import DickeSpec, dicke_state

# published measurement table for the linear encoder at n=4, k=2
TABLE_4_2 = {
    (1, 1, 0, 0): (1, 1, 0),
    (1, 0, 1, 0): (1, 0, 1),
    (0, 1, 1, 0): (0, 1, 1),
    (1, 0, 0, 1): (1, 0, 0),
    (0, 1, 0, 1): (0, 1, 0),
    (0, 0, 1, 1): (0, 0, 1),
}


def oracle_word(cnots, ell, d_bits):
    """Independent GF(2) evaluation of a CNOT list on classical bits."""
    word = [0] * ell
    for control, target in cnots:
        word[target] ^= d_bits[control - 1]
    return tuple(word)


# ---------------------------------------------------------------- linear

def test_linear_words_match_published_table():
    circuit = build_linear_encoder(DickeSpec(4, 2))
    for d, a in TABLE_4_2.items():
        assert circuit.encode_word(d) == a


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_linear_gate_and_ancilla_count(n):
    circuit = build_linear_encoder(DickeSpec(n, 1))
    assert circuit.ell == n - 1
    assert len(circuit.cnots) == n - 1


def test_linear_codebook_is_published_table():
    spec = DickeSpec(4, 2)
    codebook = verify_injectivity(build_linear_encoder(spec), spec)
    expected = {a: tuple(i + 1 for i in range(4) if d[i]) for d, a in TABLE_4_2.items()}
    assert codebook.entries == expected


# ---------------------------------------------------------------- binary

def test_binary_w_encoder_matches_published_circuit():
    circuit = build_binary_encoder(DickeSpec(4, 1))
    assert circuit.ell == 2
    assert set(circuit.cnots) == {(2, 0), (3, 1), (4, 0), (4, 1)}
    assert len(circuit.cnots) == 4


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_binary_cnot_count_power_of_two(n):
    circuit = build_binary_encoder(DickeSpec(n, 1))
    assert len(circuit.cnots) == cnot_count_bound(n)


@pytest.mark.parametrize("n", [3, 5, 6, 7, 9, 12, 15])
def test_binary_k1_injective_and_bounded(n):
    spec = DickeSpec(n, 1)
    circuit = build_binary_encoder(spec)
    assert circuit.ell == math.ceil(math.log2(n))
    codebook = verify_injectivity(circuit, spec)
    assert len(codebook.entries) == n
    assert len(circuit.cnots) <= cnot_count_bound(n)


def test_binary_6_2_synthesis():
    spec = DickeSpec(6, 2)
    circuit = build_binary_encoder(spec, np.random.default_rng(0))
    assert circuit.ell == 4
    codebook = verify_injectivity(circuit, spec)
    assert len(codebook.entries) == 15
    # oracle: exhaustive enumeration of the 15 weight-2 strings
    words = set()
    for i, j in combinations(range(1, 7), 2):
        d = [1 if x in (i, j) else 0 for x in range(1, 7)]
        words.add(oracle_word(circuit.cnots, circuit.ell, d))
    assert len(words) == 15


def test_known_6_2_matrix_is_injective():
    # a_j = d_{j+1} xor d_5 for j = 0..3: a hand-checkable injective map
    cnots = tuple((j + 1, j) for j in range(4)) + tuple((5, j) for j in range(4))
    circuit = EncoderCircuit(n=6, k=2, ell=4, cnots=cnots, kind="binary")
    codebook = verify_injectivity(circuit, DickeSpec(6, 2))
    assert len(codebook.entries) == 15
    assert len(circuit.cnots) == 8


def test_binary_synthesis_failure_reports_best_ell():
    with pytest.raises(SynthesisFailed) as err:
        build_binary_encoder(DickeSpec(4, 2), np.random.default_rng(1), ell=2)
    assert err.value.target_ell == 2
    assert err.value.best_ell == 3
    retry = build_binary_encoder(DickeSpec(4, 2), np.random.default_rng(1), ell=err.value.best_ell)
    verify_injectivity(retry, DickeSpec(4, 2))


def test_binary_k1_rejects_too_small_ell():
    with pytest.raises(ValueError):
        build_binary_encoder(DickeSpec(4, 1), ell=1)


def test_cnot_count_bound_values():
    assert cnot_count_bound(4) == 4
    assert cnot_count_bound(8) == 12
    # n=6 is not a power of two: the bound overestimates the built circuit
    built = len(build_binary_encoder(DickeSpec(6, 1)).cnots)
    assert cnot_count_bound(6) == 12
    assert built <= 12


# ---------------------------------------------------------------- verify / decode

def test_all_zero_matrix_not_injective():
    circuit = EncoderCircuit(n=4, k=2, ell=3, cnots=(), kind="binary")
    with pytest.raises(NotInjective) as err:
        verify_injectivity(circuit, DickeSpec(4, 2))
    assert sum(err.value.d1) == 2 and sum(err.value.d2) == 2
    assert err.value.d1 != err.value.d2


def test_verify_rejects_mismatched_spec():
    with pytest.raises(ValueError):
        verify_injectivity(build_linear_encoder(DickeSpec(4, 2)), DickeSpec(5, 2))


def test_decode_published_rows():
    spec = DickeSpec(4, 2)
    codebook = verify_injectivity(build_linear_encoder(spec), spec)
    assert decode(codebook, (1, 0, 1)) == (1, 3)
    assert decode(codebook, (0, 1, 0)) == (2, 4)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 3), (6, 2)])
def test_decode_is_bijection(n, k):
    spec = DickeSpec(n, k)
    codebook = verify_injectivity(build_linear_encoder(spec), spec)
    decoded = {decode(codebook, word) for word in codebook.entries}
    assert decoded == {tuple(sorted(c)) for c in combinations(range(1, n + 1), k)}


def test_decode_unknown_word():
    spec = DickeSpec(4, 2)
    codebook = verify_injectivity(build_linear_encoder(spec), spec)
    with pytest.raises(UnknownWord):
        decode(codebook, (1, 1, 1))
    with pytest.raises(ValueError):
        decode(codebook, (1, 1))


def test_recover_last_bit():
    assert recover_last_bit_linear((1, 1, 0), 2) == 0
    assert recover_last_bit_linear((1, 0, 0), 2) == 1
    with pytest.raises(InvalidParity):
        recover_last_bit_linear((1, 1, 1), 2)


def test_recover_last_bit_whole_table():
    for d, a in TABLE_4_2.items():
        assert recover_last_bit_linear(a, 2) == d[3]


# ---------------------------------------------------------------- circuit application

def test_apply_empty_encoder_is_tensor_with_zeros():
    spec = DickeSpec(3, 1)
    circuit = EncoderCircuit(n=3, k=1, ell=2, cnots=(), kind="binary")
    state = apply_encoder(dicke_state(spec), circuit)
    expected = np.zeros(32, dtype=complex)
    for idx in (0b001, 0b010, 0b100):
        expected[idx << 2] = 1 / np.sqrt(3)
    np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)


def test_apply_linear_4_2_joint_rows():
    # the joint (d, a) distribution is exactly the published six rows at 1/6
    spec = DickeSpec(4, 2)
    circuit = build_linear_encoder(spec)
    state = apply_encoder(dicke_state(spec), circuit)
    probs = np.abs(state.amplitudes) ** 2
    expected = np.zeros(2**7)
    for d, a in TABLE_4_2.items():
        idx = 0
        for b in d + a:
            idx = (idx << 1) | b
        expected[idx] = 1 / 6
    np.testing.assert_allclose(probs, expected, atol=1e-12)


@pytest.mark.parametrize(
    "spec,builder",
    [
        (DickeSpec(4, 2), lambda s: build_linear_encoder(s)),
        (DickeSpec(4, 1), lambda s: build_binary_encoder(s)),
        (DickeSpec(6, 2), lambda s: build_binary_encoder(s, np.random.default_rng(2))),
    ],
)
def test_ancilla_word_deterministic_given_data(spec, builder):
    circuit = builder(spec)
    state = apply_encoder(dicke_state(spec), circuit)
    data_qubits = list(range(1, spec.n + 1))
    anc_qubits = list(range(spec.n + 1, spec.n + circuit.ell + 1))
    for idx in np.flatnonzero(dicke_state(spec).amplitudes):
        d = [(int(idx) >> (spec.n - i)) & 1 for i in range(1, spec.n + 1)]
        p_d = sv.outcome_probability(state, data_qubits, d)
        word = oracle_word(circuit.cnots, circuit.ell, d)
        p_joint = sv.outcome_probability(state, data_qubits + anc_qubits, d + list(word))
        assert abs(p_joint - p_d) < 1e-12  # P(a = G.d | d) = 1


@pytest.mark.parametrize(
    "spec,builder",
    [
        (DickeSpec(4, 2), lambda s: build_linear_encoder(s)),
        (DickeSpec(5, 2), lambda s: build_linear_encoder(s)),
        (DickeSpec(4, 1), lambda s: build_binary_encoder(s)),
        (DickeSpec(6, 2), lambda s: build_binary_encoder(s, np.random.default_rng(3))),
    ],
)
def test_encoder_does_not_disturb_data_marginal(spec, builder):
    circuit = builder(spec)
    dicke = dicke_state(spec)
    encoded = apply_encoder(dicke, circuit)
    data_probs = (
        np.abs(encoded.amplitudes.reshape(2**spec.n, 2**circuit.ell)) ** 2
    ).sum(axis=1)
    np.testing.assert_allclose(data_probs, np.abs(dicke.amplitudes) ** 2, atol=1e-12)


def test_orthogonality_iff_injectivity():
    # injective circuit: conditional ancilla states of distinct outcomes are orthogonal
    spec = DickeSpec(4, 2)
    circuit = build_linear_encoder(spec)
    state = apply_encoder(dicke_state(spec), circuit)
    tensor = state.amplitudes.reshape(2**spec.n, 2**circuit.ell)
    support = [int(i) for i in np.flatnonzero(dicke_state(spec).amplitudes)]
    for i, di in enumerate(support):
        vi = tensor[di] / np.linalg.norm(tensor[di])
        for dj in support[i + 1:]:
            vj = tensor[dj] / np.linalg.norm(tensor[dj])
            assert abs(np.vdot(vi, vj)) < 1e-12
    # non-injective circuit: some pair of conditional ancilla states coincides
    broken = EncoderCircuit(n=4, k=2, ell=3, cnots=(), kind="binary")
    state = apply_encoder(dicke_state(spec), broken)
    tensor = state.amplitudes.reshape(2**spec.n, 2**3)
    v1 = tensor[support[0]] / np.linalg.norm(tensor[support[0]])
    v2 = tensor[support[1]] / np.linalg.norm(tensor[support[1]])
    assert abs(np.vdot(v1, v2)) > 1 - 1e-12
    with pytest.raises(NotInjective):
        verify_injectivity(broken, spec)


def test_apply_encoder_capacity():
    spec = DickeSpec(13, 2)
    with pytest.raises(sv.CapacityError):
        apply_encoder(dicke_state(spec), build_linear_encoder(spec))


# ---------------------------------------------------------------- structure & emission

def test_matrix_cancels_duplicate_cnots():
    circuit = EncoderCircuit(n=3, k=1, ell=2, cnots=((1, 0), (1, 0), (2, 1)), kind="binary")
    g = circuit.matrix()
    assert g[0, 0] == 0 and g[1, 1] == 1


def test_circuit_validation():
    with pytest.raises(ValueError):
        EncoderCircuit(n=3, k=1, ell=2, cnots=((4, 0),), kind="binary")
    with pytest.raises(ValueError):
        EncoderCircuit(n=3, k=1, ell=2, cnots=((1, 2),), kind="binary")


def test_format_circuit_text():
    circuit = build_linear_encoder(DickeSpec(4, 2))
    text = format_circuit(circuit)
    lines = text.strip().splitlines()
    assert lines[0] == "encoder linear n=4 k=2 ell=3"
    assert lines[1:] == ["CNOT d1 a0", "CNOT d2 a1", "CNOT d3 a2"]


def test_format_codebook_csv():
    spec = DickeSpec(4, 2)
    codebook = verify_injectivity(build_linear_encoder(spec), spec)
    lines = format_codebook_csv(codebook).strip().splitlines()
    assert lines[0] == "a_0,a_1,a_2,winners"
    assert len(lines) == 7
    assert "1,1,0,1 2" in lines
    assert "0,0,1,3 4" in lines
