import math

import numpy as np
import pytest

from csquant.fock import (
    FockVector,
    basis_vector,
    commutator,
    ho_hamiltonian,
    identity,
    ladder,
    make_space,
    momentum_operator,
    number_operator,
    position_operator,
)


def test_make_space_dims():
    assert make_space(1, 3).dim == 4
    assert make_space(2, 5).dim == 36


def test_make_space_rejects_bad_args():
    with pytest.raises(ValueError):
        make_space(2, 0)
    with pytest.raises(ValueError):
        make_space(0, 3)
    with pytest.raises(ValueError):
        make_space(4, 100)  # dim guard


def test_basis_ordering_mode0_fastest():
    s = make_space(2, 2)
    assert s.occupation(0) == (0, 0)
    assert s.occupation(1) == (1, 0)
    assert s.occupation(3) == (0, 1)
    for i in range(s.dim):
        assert s.index(s.occupation(i)) == i


@pytest.mark.parametrize("nmax", [5, 9])
def test_number_operator_eigenvalues(nmax):
    s = make_space(1, nmax)
    a, adag = ladder(s, 0)
    n_from_ladder = (adag @ a).mat
    one = basis_vector(s, (1,))
    assert (adag @ a).expectation(one) == pytest.approx(1.0, abs=0)
    # diagonal construction is exact for every level
    n_exact = number_operator(s, 0).mat
    assert np.array_equal(np.diag(n_exact), np.arange(nmax + 1).astype(complex))
    assert np.max(np.abs(n_from_ladder - n_exact)) < 1e-13


def test_vacuum_annihilation():
    s = make_space(1, 6)
    a, _ = ladder(s, 0)
    out = a.apply(basis_vector(s, (0,)))
    assert out.norm() == 0.0


@pytest.mark.parametrize("nmax", [3, 7])
def test_truncated_ladder_commutator(nmax):
    s = make_space(1, nmax)
    a, adag = ladder(s, 0)
    c = commutator(a, adag).mat
    expected = np.eye(nmax + 1, dtype=complex)
    expected[nmax, nmax] = -nmax
    assert np.max(np.abs(c - expected)) < 1e-12


def test_number_ladder_commutator_untruncated_rows():
    s = make_space(1, 8)
    a, _ = ladder(s, 0)
    n = number_operator(s, 0)
    resid = commutator(n, a).mat + a.mat
    assert np.max(np.abs(resid)) < 1e-12


def test_commutator_antisymmetry_and_space_mismatch():
    s = make_space(1, 4)
    a, adag = ladder(s, 0)
    assert np.max(np.abs(commutator(a, a).mat)) == 0.0
    other = make_space(1, 5)
    with pytest.raises(ValueError):
        commutator(a, ladder(other, 0)[0])


@pytest.mark.parametrize("nmax", [6, 12])
def test_canonical_commutator_on_safe_block(nmax):
    s = make_space(1, nmax)
    hbar = 0.7
    p = momentum_operator(s, 0, omega=1.3, hbar=hbar)
    q = position_operator(s, 0, omega=1.3, hbar=hbar)
    c = commutator(p, q).mat
    keep = s.subspace_indices(nmax - 1)
    block = c[np.ix_(keep, keep)]
    assert np.max(np.abs(block + 1j * hbar * np.eye(keep.size))) < 1e-12


def test_ho_hamiltonian_spectrum():
    s = make_space(1, 5)
    h = ho_hamiltonian(s, 0, omega=1.0, hbar=1.0)
    assert h.expectation(basis_vector(s, (0,))) == pytest.approx(0.5, abs=0)
    assert h.expectation(basis_vector(s, (3,))) == pytest.approx(3.5, abs=0)
    assert h.hermiticity_defect() == 0.0
    with pytest.raises(ValueError):
        ho_hamiltonian(s, 0, omega=-1.0)


def test_ladder_mode_out_of_range():
    s = make_space(2, 3)
    with pytest.raises(IndexError):
        ladder(s, 2)


def test_adjoint_involution_exact():
    s = make_space(1, 5)
    rng = np.random.default_rng(7)
    mat = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    from csquant.fock import LinearOperator

    op = LinearOperator(s, mat)
    assert np.array_equal(op.adjoint().adjoint().mat, op.mat)


def test_two_mode_ladder_acts_on_its_mode_only():
    s = make_space(2, 3)
    a1, ad1 = ladder(s, 1)
    v = basis_vector(s, (2, 1))
    out = ad1.apply(v)
    idx = s.index((2, 2))
    assert out.amps[idx] == pytest.approx(math.sqrt(2.0))
    assert np.count_nonzero(out.amps) == 1


def test_vector_norm_flag_and_immutability():
    s = make_space(1, 3)
    v = FockVector(s, np.array([1, 0, 0, 0], dtype=complex))
    assert v.is_normalized
    w = FockVector(s, np.array([1, 1, 0, 0], dtype=complex))
    assert not w.is_normalized
    assert w.normalized().is_normalized
    with pytest.raises(ValueError):
        w.amps[0] = 5.0
    assert identity(s).is_hermitian()
