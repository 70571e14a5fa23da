import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from errors import AllZeroInputError, NonSquareAmbientError, NotHermitianError, NotUnitaryError, ShapeMismatchError
from numkernel import (
    MatrixPayload,
    SubspacePayload,
    Tolerance,
    direct_sum,
    full_space,
    is_psd,
    kron,
    matrix_unit,
    numerical_rank,
    orthonormalize,
    perp,
    principal_angle,
    random_complex,
    random_isometry,
    require_unitary,
    zero_subspace,
)


def test_orthonormalize_drops_dependent_matrices():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    space = orthonormalize([a, 2j * a, np.eye(2)])
    assert space.dim == 2
    assert space.gram_defect() < 1e-12
    assert space.contains_matrix(a + np.eye(2))


def test_orthonormalize_rejects_zero_and_mixed_shapes():
    with pytest.raises(AllZeroInputError):
        orthonormalize([np.zeros((2, 2))])
    with pytest.raises(AllZeroInputError):
        orthonormalize([])
    with pytest.raises(ShapeMismatchError):
        orthonormalize([np.eye(2), np.eye(3)])


def test_perp_of_trivial_spaces():
    assert perp(zero_subspace(3)).dim == 9
    assert perp(full_space(3)).dim == 0
    with pytest.raises(NonSquareAmbientError):
        perp(full_space(2, 3))


@seed(1)
@settings(max_examples=100, deadline=None)
@given(n=st.integers(2, 4), dim=st.integers(1, 8), rng_seed=st.integers(0, 2**16))
def test_perp_is_an_involution(n, dim, rng_seed):
    rng = np.random.default_rng(rng_seed)
    dim = min(dim, n * n - 1)
    space = orthonormalize([random_complex(rng, n, n) for _ in range(dim)])
    twice = perp(perp(space))
    assert perp(space).dim == n * n - space.dim
    assert principal_angle(space, twice) < 1e-8


def test_principal_angle_detects_small_tilts():
    e11, e12 = matrix_unit(2, 0, 0), matrix_unit(2, 0, 1)
    a = orthonormalize([e11])
    b = orthonormalize([e11 + 1e-6 * e12])
    assert principal_angle(a, a) == 0.0
    assert principal_angle(a, b) == pytest.approx(1e-6, rel=1e-4)
    assert principal_angle(a, orthonormalize([e11, e12])) == pytest.approx(math.pi / 2)


@pytest.mark.parametrize(
    "matrix, expected",
    [
        (np.eye(3), 3),
        (np.outer([1, 2, 3], [1, 1, 1]), 1),
        (np.zeros((2, 2)), 0),
        (np.diag([1.0, 1e-12]), 1),
    ],
)
def test_numerical_rank(matrix, expected):
    assert numerical_rank(matrix) == expected


def test_is_psd_reports_the_spectrum():
    report = is_psd(np.diag([2.0, -1e-12]))
    assert report
    assert report.spectral_radius == pytest.approx(2.0)
    assert not is_psd(np.diag([1.0, -1e-3]))
    with pytest.raises(NotHermitianError):
        is_psd(np.array([[0, 1], [0, 0]], dtype=complex))


def test_random_isometry_and_unitary_checks(rng):
    v = random_isometry(rng, 5, 3)
    assert np.allclose(v.conj().T @ v, np.eye(3), atol=1e-12)
    with pytest.raises(NotUnitaryError):
        require_unitary(np.array([[1, 1], [0, 1]], dtype=complex))


def test_tolerance_range_is_enforced():
    with pytest.raises(ValueError):
        Tolerance(rank_rel=0.5)
    assert Tolerance(rank_rel=1e-10).rank_rel == 1e-10


def test_matrix_payload_validates_entries():
    m = np.array([[1 + 2j, 0], [3, -1j]])
    assert np.array_equal(MatrixPayload.from_matrix(m).to_matrix(), m)
    with pytest.raises(ValueError):
        MatrixPayload(rows=1, cols=2, entries=[(1.0, 0.0)])
    with pytest.raises(ValueError):
        MatrixPayload(rows=1, cols=1, entries=[(float("nan"), 0.0)])


def test_kron_and_direct_sum():
    a = np.array([[1, 2j], [0, 1]])
    assert kron(a, np.eye(3)).shape == (6, 6)
    assert np.allclose(kron(np.eye(1), a), a)
    block = direct_sum(a, np.eye(1))
    assert block.shape == (3, 3)
    assert np.allclose(block[:2, :2], a)
    assert block[2, 2] == 1.0 and not np.any(block[:2, 2])


def test_subspace_payload_round_trip():
    space = orthonormalize([matrix_unit(2, 0, 1), np.eye(2)])
    back = SubspacePayload.model_validate(SubspacePayload.from_subspace(space).model_dump()).to_subspace()
    assert back.dim == 2
    assert principal_angle(space, back) < 1e-10
    empty = SubspacePayload(rows=2, cols=2, basis=[]).to_subspace()
    assert empty.dim == 0
    with pytest.raises(ShapeMismatchError):
        SubspacePayload(rows=3, cols=3, basis=[MatrixPayload.from_matrix(np.eye(2))]).to_subspace()
