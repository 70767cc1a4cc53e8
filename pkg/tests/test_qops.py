"""Operator-layer checks: ladder algebra, embedding, eigendecomposition."""
import numpy as np
import pytest

from djcsim.errors import ConfigurationError, ContractViolationError
from djcsim.qops import (
    CompositeSpace,
    Operator,
    annihilation,
    atomic_ops,
    embed,
    herm_eig,
    identity,
    number,
    unitary_exp,
)


def test_annihilation_matrix_elements():
    a = annihilation(4).data
    expected = np.zeros((4, 4))
    expected[0, 1] = 1.0
    expected[1, 2] = np.sqrt(2.0)
    expected[2, 3] = np.sqrt(3.0)
    assert np.array_equal(a, expected)


def test_ladder_commutator_truncation_artifact():
    # [a, a+] = 1 everywhere except the bottom-right corner, which holds
    # -(cutoff - 1) in the truncated space.
    for cutoff in (2, 5, 16):
        a = annihilation(cutoff).data
        comm = a @ a.conj().T - a.conj().T @ a
        expected = np.eye(cutoff)
        expected[-1, -1] = -(cutoff - 1)
        assert np.abs(comm - expected).max() < 1e-12


def test_number_operator_matches_ladder_product():
    a = annihilation(7)
    assert np.abs((a.dag() @ a).data - number(7).data).max() < 1e-13


def test_annihilation_rejects_tiny_cutoff():
    with pytest.raises(ConfigurationError):
        annihilation(1)


def test_atomic_ops_algebra():
    sz, sp, sm = atomic_ops()
    assert np.array_equal(sz.data, np.diag([1.0, -1.0]))
    assert np.array_equal((sp @ sm).data, np.diag([1.0, 0.0]))   # |e><e|
    assert np.array_equal((sm @ sp).data, np.diag([0.0, 1.0]))   # |g><g|
    assert np.abs((sz @ sp - sp @ sz).data - 2 * sp.data).max() == 0.0
    assert np.abs((sz @ sm - sm @ sz).data + 2 * sm.data).max() == 0.0
    assert np.abs((sp @ sp).data).max() == 0.0


def test_composite_space_layout():
    space = CompositeSpace(4)
    assert space.dims == (2, 2, 4, 4)
    assert space.dim == 64
    # row-major flattening: ((ia*2 + ib)*N + na)*N + nb
    assert space.flat_index(0, 0, 0, 0) == 0
    assert space.flat_index(0, 0, 0, 3) == 3
    assert space.flat_index(0, 1, 0, 0) == 16
    assert space.flat_index(1, 0, 2, 1) == 41
    with pytest.raises(ConfigurationError):
        space.flat_index(0, 0, 4, 0)
    with pytest.raises(ConfigurationError):
        CompositeSpace(1)


def test_excitation_labels():
    space = CompositeSpace(3)
    exc = space.excitations()
    # |e,e,0,0> has two excitations, |g,g,0,0> none
    assert exc[space.flat_index(0, 0, 0, 0)] == 2
    assert exc[space.flat_index(1, 1, 0, 0)] == 0
    assert exc[space.flat_index(1, 0, 2, 1)] == 4
    assert exc.max() == 2 + 2 * 2


def test_field_tail_mask():
    space = CompositeSpace(4)
    mask = space.field_tail_mask()
    assert mask[space.flat_index(0, 0, 3, 0)]
    assert mask[space.flat_index(1, 1, 0, 2)]
    assert not mask[space.flat_index(1, 1, 1, 1)]


def test_embed_acts_on_one_slot():
    sz, _, _ = atomic_ops()
    dims = (2, 2, 4, 4)
    lifted = embed(sz, 1, dims)
    manual = np.kron(np.eye(2), np.kron(sz.data, np.eye(16)))
    assert np.array_equal(lifted.data, manual)
    # identity action on the other slots: embedding commutes with any
    # operator lifted into a different slot
    n_op = embed(number(4), 2, dims)
    assert np.abs((lifted @ n_op - n_op @ lifted).data).max() == 0.0


def test_embed_rejects_mismatched_slot():
    sz, _, _ = atomic_ops()
    with pytest.raises(ConfigurationError):
        embed(sz, 2, (2, 2, 4, 4))
    with pytest.raises(ConfigurationError):
        embed(sz, 7, (2, 2, 4, 4))


def test_operator_dims_validation():
    with pytest.raises(ConfigurationError):
        Operator(np.eye(3), (2, 2))
    with pytest.raises(ConfigurationError):
        identity((2, 2)) @ identity((4,))


def test_herm_eig_reconstruction():
    rng = np.random.default_rng(7)
    m = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    h = Operator(0.5 * (m + m.conj().T), (64,))
    dec = herm_eig(h)
    w, v = dec.eigenvalues, dec.eigenvectors
    assert np.all(np.diff(w) >= -1e-12)
    assert np.abs(v.conj().T @ v - np.eye(64)).max() < 1e-12
    assert np.abs((v * w) @ v.conj().T - h.data).max() < 1e-10


def test_herm_eig_rejects_asymmetry():
    m = np.eye(4, dtype=complex)
    m[0, 1] = 1e-6
    with pytest.raises(ContractViolationError) as err:
        herm_eig(Operator(m, (4,)))
    assert "1.000e-06" in str(err.value)


def test_unitary_exp_is_unitary_and_composes():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    h = Operator(0.5 * (m + m.conj().T), (12,))
    u1 = unitary_exp(h, 0.7).data
    u2 = unitary_exp(h, 1.9).data
    u12 = unitary_exp(h, 2.6).data
    assert np.abs(u1.conj().T @ u1 - np.eye(12)).max() < 1e-10
    assert np.abs(u1 @ u2 - u12).max() < 1e-9
    # inverse direction closes the group
    uinv = unitary_exp(h, -0.7).data
    assert np.abs(u1 @ uinv - np.eye(12)).max() < 1e-10


def test_unitary_exp_known_phase():
    sz, _, _ = atomic_ops()
    u = unitary_exp(sz, 0.5).data
    assert np.abs(u - np.diag([np.exp(-0.5j), np.exp(0.5j)])).max() < 1e-14
