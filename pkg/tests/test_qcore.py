"""Statevector core: indexing convention, tensor placement, symmetrized basis."""
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trajsense import qcore
from trajsense.qcore import Ket, make_ket


def test_basis_index_msb_first():
    # qubit 1 is the most significant bit
    assert qcore.basis_index("100") == 4
    assert qcore.basis_index("001") == 1
    assert qcore.bitstring(3, 4) == "100"
    for j in range(16):
        assert qcore.basis_index(qcore.bitstring(4, j)) == j


def test_make_ket_normalizes():
    k = make_ket(2, [("00", 1.0), ("11", 1.0)])
    np.testing.assert_allclose(k.amps[0], 2 ** -0.5)
    np.testing.assert_allclose(k.amps[3], 2 ** -0.5)
    assert abs(k.norm() - 1.0) < 1e-12


def test_make_ket_rejects_duplicates_and_zero():
    with pytest.raises(ValueError):
        make_ket(2, [("00", 1.0), ("00", 0.5)])
    with pytest.raises(ValueError):
        make_ket(2, [("01", 0.0)])
    with pytest.raises(ValueError):
        make_ket(2, [("001", 1.0)])  # wrong register size


def test_weight_on():
    w = qcore.weight_on(3, [1])        # counts bit of qubit 1 (MSB)
    np.testing.assert_array_equal(w, [0, 0, 0, 0, 1, 1, 1, 1])
    w = qcore.weight_on(3, [1, 3])
    assert w[qcore.basis_index("101")] == 2


def test_tensor_plain_kron():
    a = make_ket(1, [("0", 1.0)])
    b = make_ket(2, [("11", 1.0)])
    t = qcore.tensor(a, b)
    assert t.n == 3
    np.testing.assert_allclose(t.amps[qcore.basis_index("011")], 1.0)


def test_tensor_with_placement():
    # a on qubits (1,3), b on qubits (2,4); worked out by hand:
    # a = x|00> + y|11>, b = |10>  ->  x|0100> + y|1110>
    x, y = 0.6, 0.8
    a = make_ket(2, [("00", x), ("11", y)])
    b = make_ket(2, [("10", 1.0)])
    t = qcore.tensor(a, b, place_a=(1, 3), place_b=(2, 4))
    expect = np.zeros(16)
    expect[qcore.basis_index("0100")] = x
    expect[qcore.basis_index("1110")] = y
    np.testing.assert_allclose(t.amps, expect, atol=1e-12)


def test_tensor_placement_must_cover_register():
    a = make_ket(1, [("0", 1.0)])
    b = make_ket(1, [("1", 1.0)])
    with pytest.raises(ValueError):
        qcore.tensor(a, b, place_a=(1,), place_b=(1,))
    with pytest.raises(ValueError):
        qcore.tensor(a, b, place_a=(1,), place_b=(3,))


def test_gram_of_computational_basis():
    basis = [make_ket(2, [(qcore.bitstring(2, j), 1.0)]) for j in range(4)]
    np.testing.assert_allclose(qcore.gram(basis), np.eye(4), atol=1e-12)


def test_equal_up_to_phase():
    k = make_ket(2, [("01", 1.0), ("10", 1.0)])
    rotated = Ket(2, np.exp(0.7j) * k.amps)
    assert qcore.equal_up_to_phase(k, rotated)
    other = make_ket(2, [("01", 1.0), ("10", -1.0)])
    assert not qcore.equal_up_to_phase(k, other)


@pytest.mark.parametrize("n,norms", [
    (2, [2, 2]),
    (3, [2, 6]),
    (4, [2, 8, 6]),
    (5, [2, 10, 20]),
])
def test_symmetrized_basis_norms(n, norms):
    basis = qcore.symmetrized_basis(n)
    assert [e.norm_sq for e in basis] == norms
    # brute-force support count cross-check
    for e in basis:
        count = sum(1 for j in range(1 << n)
                    if bin(j).count("1") in (e.nu, n - e.nu))
        assert len(e.support) == count == e.norm_sq


def test_symmetrized_basis_vectors_orthogonal():
    basis = qcore.symmetrized_basis(4)
    vecs = [e.vector() for e in basis]
    for i, vi in enumerate(vecs):
        for k, vk in enumerate(vecs):
            expect = basis[i].norm_sq if i == k else 0.0
            assert abs(np.vdot(vi, vk) - expect) < 1e-12


def test_sample_measurement_deterministic():
    k = make_ket(2, [("00", 1.0), ("11", 1.0)])
    basis = [make_ket(2, [(qcore.bitstring(2, j), 1.0)]) for j in range(4)]
    a = qcore.sample_measurement(k, basis, rng_seed=7, sample_index=3)
    b = qcore.sample_measurement(k, basis, rng_seed=7, sample_index=3)
    assert a == b
    draws = {qcore.sample_measurement(k, basis, rng_seed=7, sample_index=i)
             for i in range(200)}
    assert draws == {0, 3}


def test_sample_measurement_complement_outcome():
    # incomplete basis: everything outside its span lands in the last slot
    k = make_ket(2, [("11", 1.0)])
    basis = [make_ket(2, [("00", 1.0)])]
    for i in range(20):
        assert qcore.sample_measurement(k, basis, rng_seed=1, sample_index=i) == 1


def test_sample_measurement_rejects_nonorthogonal_basis():
    k = make_ket(1, [("0", 1.0)])
    bad = [make_ket(1, [("0", 1.0)]), make_ket(1, [("0", 1.0), ("1", 1.0)])]
    with pytest.raises(ValueError):
        qcore.sample_measurement(k, bad, rng_seed=0)


def test_sample_measurement_frequencies():
    """Outcome histogram tracks Born weights on an asymmetric state."""
    k = make_ket(1, [("0", 1.0), ("1", 2.0)])   # p = (0.2, 0.8)
    basis = [make_ket(1, [("0", 1.0)]), make_ket(1, [("1", 1.0)])]
    hits = sum(qcore.sample_measurement(k, basis, rng_seed=42, sample_index=i)
               for i in range(4000))
    p = 0.8
    sigma = math.sqrt(p * (1 - p) * 4000)
    assert abs(hits - p * 4000) < 5 * sigma


def test_ket_json_roundtrip():
    k = make_ket(3, [("010", 0.5), ("101", 0.5j), ("111", -0.5)])
    back = qcore.ket_from_json(qcore.ket_to_json(k))
    assert back.n == 3
    np.testing.assert_allclose(back.amps, k.amps, atol=1e-15)
    payload = json.loads(qcore.ket_to_json(k))
    assert set(payload) == {"n", "amps"}


@given(st.integers(0, 3), st.integers(0, 7), st.floats(0.0, 2 * math.pi))
@settings(max_examples=60, deadline=None)
def test_tensor_preserves_norm(i, j, phi):
    a = Ket(2, np.exp(1j * phi) * np.eye(4)[i])
    b = Ket(3, np.eye(8)[j].astype(complex))
    t = qcore.tensor(a, b, place_a=(2, 4), place_b=(1, 3, 5))
    assert abs(t.norm() - 1.0) < 1e-12
    # placement is a bit permutation: exactly one nonzero amplitude survives
    assert np.count_nonzero(np.abs(t.amps) > 1e-12) == 1
