import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from photonic_invariants import fock_core as fk
from photonic_invariants.errors import CapacityError, ContractViolation, InvalidArgument
from photonic_invariants.lie import image_basis


@pytest.mark.parametrize("m,n,expected", [(2, 2, 3), (1, 5, 1), (3, 2, 6), (4, 0, 1)])
def test_sector_dimension(m, n, expected):
    assert fk.sector_dimension(m, n) == expected


def test_sector_dimension_rejects_bad_arguments():
    with pytest.raises(InvalidArgument):
        fk.sector_dimension(0, 2)
    with pytest.raises(InvalidArgument):
        fk.sector_dimension(2, -1)
    with pytest.raises(CapacityError):
        fk.sector_dimension(400, 400)
    assert fk.sector_dimension(60, 20) < sys.maxsize


@pytest.mark.parametrize(
    "m,n,expected",
    [
        (2, 2, [(2, 0), (1, 1), (0, 2)]),
        (2, 0, [(0, 0)]),
        (3, 1, [(1, 0, 0), (0, 1, 0), (0, 0, 1)]),
    ],
)
def test_enumerate_basis(m, n, expected):
    assert fk.enumerate_basis(m, n) == expected


@pytest.mark.parametrize("m", range(1, 5))
@pytest.mark.parametrize("n", range(0, 6))
def test_basis_is_a_bijection(m, n):
    basis = fk.enumerate_basis(m, n)
    sector = fk.fock_sector(m, n)
    assert len(basis) == fk.sector_dimension(m, n)
    assert basis == oracles.sector_basis(m, n)
    assert [fk.basis_index(sector, o) for o in basis] == list(range(len(basis)))


def test_basis_index_rejects_foreign_occupation():
    with pytest.raises(InvalidArgument):
        fk.basis_index(fk.fock_sector(2, 2), (1, 0))


def test_make_pure_single_fock():
    s = fk.make_pure([(1, (1, 1))], 2)
    assert s.sectors == [2] and s.pure
    assert np.allclose(s.block(2).matrix, np.diag([0, 1, 0]))


def test_make_pure_hom_output():
    s = fk.make_pure([(1 / np.sqrt(2), (2, 0)), (-1 / np.sqrt(2), (0, 2))], 2)
    rho = s.block(2).matrix
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 1
    assert np.allclose(rho, 0.5 * np.array([[1, 0, -1], [0, 0, 0], [-1, 0, 1]]))


def test_make_pure_across_sectors_is_dephased():
    s = fk.make_pure([(1, (2, 0)), (1, (1, 0))], 2)
    assert s.sectors == [1, 2]
    assert not s.pure
    assert s.block(1).weight == pytest.approx(0.5, abs=1e-12)
    assert s.block(2).weight == pytest.approx(0.5, abs=1e-12)
    assert fk.DEPHASED_NOTE in s.notes


def test_make_pure_errors():
    with pytest.raises(InvalidArgument):
        fk.make_pure([(0, (1, 1))], 2)
    with pytest.raises(InvalidArgument):
        fk.make_pure([(1, (1, 1, 0))], 2)


def test_make_mixed_examples():
    rho = fk.make_pure([(1, (1, 1))], 2)
    same = fk.make_mixed([(1.0, rho)])
    assert np.allclose(same.block(2).matrix, rho.block(2).matrix)

    mix = fk.make_mixed([(0.5, fk.make_pure([(1, (2, 0))], 2)), (0.5, fk.make_pure([(1, (0, 2))], 2))])
    assert np.allclose(mix.block(2).matrix, np.diag([0.5, 0, 0.5]))

    two = fk.make_mixed([(0.3, fk.make_pure([(1, (1, 0))], 2)), (0.7, rho)])
    assert two.block(1).weight == pytest.approx(0.3, abs=1e-12)
    assert two.block(2).weight == pytest.approx(0.7, abs=1e-12)


def test_make_mixed_errors():
    rho = fk.make_pure([(1, (1, 1))], 2)
    with pytest.raises(InvalidArgument):
        fk.make_mixed([(-0.1, rho), (1.1, rho)])
    with pytest.raises(InvalidArgument):
        fk.make_mixed([(0.5, rho), (0.4, rho)])
    with pytest.raises(InvalidArgument):
        fk.make_mixed([(0.5, rho), (0.5, fk.make_pure([(1, (1, 1, 0))], 3))])


def test_state_invariants_checked():
    with pytest.raises(ContractViolation):
        fk.state_from_blocks(2, {1: np.array([[1, 1], [0, 0]])})
    with pytest.raises(ContractViolation):
        fk.state_from_blocks(2, {1: np.diag([1.5, -0.5])})
    with pytest.raises(InvalidArgument):
        fk.state_from_blocks(2, {1: np.diag([0.5, 0.4])})


def test_expectation_examples():
    s = fk.make_pure([(1, (1, 1))], 2)
    n1 = {2: image_basis(2, 2).elements[2]}
    assert fk.expectation(n1, s) == pytest.approx(1.0, abs=1e-12)
    ox = lambda n: image_basis(2, n).elements[0]
    value, residue = fk.expectation(ox, s, with_residue=True)
    assert value == pytest.approx(0.0, abs=1e-12) and residue < 1e-10


def test_expectation_missing_sector():
    s = fk.make_pure([(1, (1, 1))], 2)
    with pytest.raises(InvalidArgument):
        fk.expectation({1: np.eye(2)}, s)


@pytest.mark.parametrize(
    "matrix,expected",
    [
        (np.diag([2.0, 1.0, 0.0]), [0, 1, 2]),
        (np.eye(3) / 3, [1 / 3] * 3),
        (np.array([[0, 1], [1, 0]]), [-1, 1]),
    ],
)
def test_hermitian_spectrum(matrix, expected):
    assert np.allclose(fk.hermitian_spectrum(matrix), expected, atol=1e-12)


def test_hermitian_spectrum_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        fk.hermitian_spectrum(np.array([[0, 1], [0, 0]]))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), w=st.floats(0, 1))
def test_expectation_is_linear(seed, w):
    rng = np.random.default_rng(seed)
    r1 = fk.state_from_blocks(2, {2: oracles.random_density(3, rng)})
    r2 = fk.state_from_blocks(2, {2: oracles.random_density(3, rng)})
    op = {2: oracles.random_hermitian(3, rng)}
    mixed = fk.make_mixed([(w, r1), (1 - w, r2)])
    expected = w * fk.expectation(op, r1) + (1 - w) * fk.expectation(op, r2)
    assert fk.expectation(op, mixed) == pytest.approx(expected, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 6))
def test_density_spectrum_nonnegative_and_sums_to_weight(seed, dim):
    rng = np.random.default_rng(seed)
    rho = 0.6 * oracles.random_density(dim, rng)
    state = fk.state_from_blocks(2, {dim - 1: rho}, truncation_deficit=0.4)
    block = state.block(dim - 1)
    spec = fk.hermitian_spectrum(block.matrix)
    assert spec.min() >= -1e-10
    assert spec.sum() == pytest.approx(0.6, abs=1e-10)
    assert sum(b.weight for b in state.blocks.values()) + state.truncation_deficit == pytest.approx(1, abs=1e-12)
