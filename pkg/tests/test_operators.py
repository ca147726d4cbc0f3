import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dqdcqed.errors import DimensionError, InvalidTruncationError
from dqdcqed.operators import (
    SIGMA_MINUS,
    HilbertLayout,
    basis_state,
    commutator,
    dag,
    embed,
    fock_create,
    fock_destroy,
    identity,
    pauli,
)


def test_fock_destroy_cutoff_two():
    np.testing.assert_array_equal(fock_destroy(2), [[0, 1], [0, 0]])


def test_number_operator_diagonal():
    a = fock_destroy(4)
    np.testing.assert_allclose(np.diag(dag(a) @ a).real, [0, 1, 2, 3])


def test_truncated_commutator_matches_brute_force():
    n = 6
    a = np.zeros((n, n))
    for m in range(n):
        for k in range(n):
            if m == k - 1:
                a[m, k] = np.sqrt(k)
    expected = np.eye(n)
    expected[n - 1, n - 1] = -(n - 1)
    np.testing.assert_allclose(a @ a.T - a.T @ a, expected, atol=1e-14)
    np.testing.assert_allclose(commutator(fock_destroy(n), fock_create(n)), expected, atol=1e-14)


@pytest.mark.parametrize("bad", [0, 1, -3, 2.5])
def test_invalid_cutoff(bad):
    with pytest.raises(InvalidTruncationError):
        fock_destroy(bad)
    with pytest.raises(InvalidTruncationError):
        HilbertLayout(bad, 0)


@given(st.integers(2, 12))
def test_ladder_action(cutoff):
    a = fock_destroy(cutoff)
    for n in range(cutoff):
        ket = np.zeros(cutoff)
        ket[n] = 1.0
        out = a @ ket
        want = np.zeros(cutoff)
        if n > 0:
            want[n - 1] = np.sqrt(n)
        np.testing.assert_array_equal(out, want)


def test_pauli_matrices():
    np.testing.assert_array_equal(pauli("x"), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(pauli("z"), [[1, 0], [0, -1]])
    np.testing.assert_allclose(commutator(pauli("x"), pauli("y")), 2j * pauli("z"))
    with pytest.raises(ValueError):
        pauli("w")


def test_ground_state_is_plus_one_of_sigma_z():
    # -(omega/2) sigma_z puts |g> = (1, 0) lowest
    h = -0.5 * 5000.0 * pauli("z")
    w, v = np.linalg.eigh(h)
    assert abs(v[0, 0]) == pytest.approx(1.0)
    np.testing.assert_array_equal(SIGMA_MINUS @ np.array([0, 1]), [1, 0])


def test_layout_dimension():
    lay = HilbertLayout(3, 2)
    assert lay.dims == (3, 2, 2)
    assert lay.dim == 12
    assert embed(pauli("x"), 1, lay).shape == (12, 12)


def test_embed_identity_is_identity():
    lay = HilbertLayout(4, 2)
    for slot in range(3):
        op = np.eye(lay.dims[slot])
        np.testing.assert_array_equal(embed(op, slot, lay), np.eye(lay.dim))
    np.testing.assert_array_equal(identity(lay), np.eye(lay.dim))


def test_embed_distinct_qubits_commute():
    lay = HilbertLayout(3, 2)
    x1 = embed(pauli("x"), 1, lay)
    z2 = embed(pauli("z"), 2, lay)
    assert np.abs(commutator(x1, z2)).max() == 0.0
    # brute force Kronecker in the fixed slot order
    ref = np.kron(np.kron(np.eye(3), pauli("x")), pauli("z"))
    np.testing.assert_array_equal(x1 @ z2, ref)


def test_embed_errors():
    lay = HilbertLayout(3, 1)
    with pytest.raises(DimensionError):
        embed(pauli("x"), 2, lay)
    with pytest.raises(DimensionError):
        embed(pauli("x"), 0, lay)
    with pytest.raises(DimensionError):
        embed(fock_destroy(4), 0, lay)


_ops = st.sampled_from(["a", "x", "y", "z", "sm"])


def _local(name, cutoff):
    if name == "a":
        return fock_destroy(cutoff)
    if name == "sm":
        return SIGMA_MINUS
    return pauli(name)


@given(st.integers(2, 5), st.integers(1, 2), _ops, _ops, st.data())
def test_distinct_slots_commute_and_dagger_commutes(cutoff, k, n1, n2, data):
    lay = HilbertLayout(cutoff, k)
    slots = data.draw(st.permutations(range(k + 1)))
    s1, s2 = slots[0], slots[1]
    op1 = fock_destroy(cutoff) if s1 == 0 else _local("x" if n1 == "a" else n1, cutoff)
    op2 = fock_destroy(cutoff) if s2 == 0 else _local("z" if n2 == "a" else n2, cutoff)
    e1, e2 = embed(op1, s1, lay), embed(op2, s2, lay)
    assert np.abs(commutator(e1, e2)).max() < 1e-12
    np.testing.assert_array_equal(dag(e1), embed(dag(op1), s1, lay))


def test_basis_state():
    lay = HilbertLayout(3, 2)
    ket = basis_state(lay, 1, (0, 1))
    ref = np.kron(np.kron([0, 1, 0], [1, 0]), [0, 1])
    np.testing.assert_array_equal(ket, ref)
