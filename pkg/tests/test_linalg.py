"""Unit and property tests for the complex-vector helpers.

Closed-form cases are checked against hand-expanded arithmetic; the rank-one
MMSE direction is checked against a dense random-restart maximization of the
generalized Rayleigh quotient it is supposed to optimize.
"""

import numpy as np
import pytest

from relaysim.errors import DegenerateInputError, DimensionError
from relaysim.linalg import (
    herm_inner,
    matvec,
    norm,
    normalize,
    project_orthogonal,
    random_orthonormal_pair,
    rank1_mmse_direction,
)


def _cn(rng, m):
    z = rng.standard_normal((m, 2))
    return (z[:, 0] + 1j * z[:, 1]) / np.sqrt(2.0)


def test_herm_inner_orthogonal():
    assert herm_inner([1.0, 0.0], [0.0, 1.0]) == 0.0


def test_herm_inner_self_is_norm_squared():
    assert herm_inner([1 + 1j, 0.0], [1 + 1j, 0.0]) == pytest.approx(2.0)


def test_herm_inner_conjugates_first_argument():
    # conj(2i) * 1 = -2i, so [1, 2i]^H [3, 1] = 3 - 2i
    assert herm_inner([1.0, 2j], [3.0, 1.0]) == pytest.approx(3.0 - 2.0j)


def test_herm_inner_length_mismatch():
    with pytest.raises(DimensionError):
        herm_inner([1.0, 0.0], [1.0, 0.0, 0.0])


def test_norm_pythagorean_triple():
    assert norm([3.0, 4.0]) == pytest.approx(5.0)


def test_norm_zero_vector():
    assert norm([0.0, 0.0]) == 0.0


def test_norm_complex_entries():
    assert norm([1 + 1j, 1 - 1j]) == pytest.approx(2.0)


def test_normalize_real_axis():
    np.testing.assert_allclose(normalize([2.0, 0.0]), [1.0, 0.0])


def test_normalize_imaginary_axis():
    np.testing.assert_allclose(normalize([0.0, 3j]), [0.0, 1j])


def test_normalize_symmetric():
    np.testing.assert_allclose(normalize([1.0, 1.0]),
                               [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_normalize_zero_vector_raises():
    with pytest.raises(DegenerateInputError):
        normalize([0.0, 0.0])


def test_normalize_unit_norm_property():
    rng = np.random.default_rng(7)
    for m in (1, 2, 4, 8):
        for _ in range(50):
            v = normalize(_cn(rng, m))
            assert abs(np.linalg.norm(v) - 1.0) <= 1e-12


def test_matvec_identity():
    np.testing.assert_allclose(matvec(np.eye(2), [3.0, 4j]), [3.0, 4j])


def test_matvec_zero_matrix():
    np.testing.assert_allclose(matvec(np.zeros((2, 2)), [1.0, 2.0]),
                               [0.0, 0.0])


def test_matvec_permutation():
    np.testing.assert_allclose(
        matvec(np.array([[0.0, 1.0], [1.0, 0.0]]), [1.0, 2.0]), [2.0, 1.0]
    )


def test_matvec_shape_mismatch():
    with pytest.raises(DimensionError):
        matvec(np.eye(3), [1.0, 2.0])


def test_rank1_mmse_direction_rho_zero_returns_h():
    h = np.array([1.0, 2j])
    np.testing.assert_allclose(rank1_mmse_direction([1.0, 0.0], 0.0, h), h)


def test_rank1_mmse_direction_orthogonal_interference():
    h = np.array([0.0, 1.0])
    np.testing.assert_allclose(rank1_mmse_direction([1.0, 0.0], 5.0, h), h)


def test_rank1_mmse_direction_hand_example():
    # (I + g g^H)^{-1} [1, 1] with g = [1, 0]: first entry 1 - 1/2 = 0.5
    out = rank1_mmse_direction([1.0, 0.0], 1.0, [1.0, 1.0])
    np.testing.assert_allclose(out, [0.5, 1.0])


def test_rank1_mmse_direction_matches_dense_inverse():
    rng = np.random.default_rng(11)
    for m in (2, 3, 4, 8):
        for _ in range(25):
            g = _cn(rng, m)
            h = _cn(rng, m)
            rho = float(rng.uniform(0.0, 100.0))
            cov = np.eye(m) + rho * np.outer(g, g.conj())
            expected = np.linalg.solve(cov, h)
            np.testing.assert_allclose(
                rank1_mmse_direction(g, rho, h), expected,
                rtol=1e-10, atol=1e-12,
            )


def test_rank1_mmse_direction_maximizes_rayleigh_quotient():
    # the normalized direction should beat a large random-restart search of
    # |u^H h|^2 / (rho |u^H g|^2 + 1) over unit vectors within 1e-6 relative
    rng = np.random.default_rng(13)

    def quotient(u, g, rho, h):
        return abs(np.vdot(u, h)) ** 2 / (rho * abs(np.vdot(u, g)) ** 2 + 1.0)

    for _ in range(20):
        g = _cn(rng, 2)
        h = _cn(rng, 2)
        rho = float(rng.uniform(0.0, 50.0))
        u_star = normalize(rank1_mmse_direction(g, rho, h))
        best = quotient(u_star, g, rho, h)
        samples = _cn(rng, 2 * 4000).reshape(4000, 2)
        samples /= np.linalg.norm(samples, axis=1)[:, None]
        vals = (np.abs(samples.conj() @ h) ** 2
                / (rho * np.abs(samples.conj() @ g) ** 2 + 1.0))
        assert vals.max() <= best * (1.0 + 1e-6)


def test_project_orthogonal_already_orthogonal():
    h = np.array([0.0, 1.0 + 1j])
    np.testing.assert_allclose(project_orthogonal(h, [1.0, 0.0]), h)


def test_project_orthogonal_parallel_gives_zero():
    out = project_orthogonal([2.0, 0.0], [1.0, 0.0])
    np.testing.assert_allclose(out, [0.0, 0.0], atol=1e-15)


def test_project_orthogonal_hand_example():
    np.testing.assert_allclose(project_orthogonal([1.0, 1.0], [1.0, 0.0]),
                               [0.0, 1.0])


def test_project_orthogonal_zero_direction_returns_h():
    h = np.array([1.0, 2.0])
    np.testing.assert_allclose(project_orthogonal(h, [0.0, 0.0]), h)


def test_project_orthogonal_residual_and_idempotence():
    rng = np.random.default_rng(17)
    for m in (2, 3, 8):
        for _ in range(40):
            g = _cn(rng, m)
            h = _cn(rng, m)
            p = project_orthogonal(h, g)
            assert abs(np.vdot(g, p)) <= 1e-12 * norm(g) * norm(h)
            np.testing.assert_allclose(project_orthogonal(p, g), p,
                                       atol=1e-12)


def test_project_orthogonal_pythagoras():
    rng = np.random.default_rng(19)
    for _ in range(100):
        g = _cn(rng, 4)
        h = _cn(rng, 4)
        p = project_orthogonal(h, g)
        lhs = norm(p) ** 2 + abs(np.vdot(g, h)) ** 2 / norm(g) ** 2
        assert lhs == pytest.approx(norm(h) ** 2, abs=1e-10)


def test_random_orthonormal_pair_defining_properties():
    rng = np.random.default_rng(23)
    for m in (2, 4, 8):
        for _ in range(50):
            u, q = random_orthonormal_pair(m, rng)
            assert abs(np.vdot(u, q)) <= 1e-12
            assert abs(np.linalg.norm(u) - 1.0) <= 1e-12
            assert abs(np.linalg.norm(q) - 1.0) <= 1e-12


def test_random_orthonormal_pair_deterministic_given_seed():
    u1, q1 = random_orthonormal_pair(4, np.random.default_rng(99))
    u2, q2 = random_orthonormal_pair(4, np.random.default_rng(99))
    np.testing.assert_array_equal(u1, u2)
    np.testing.assert_array_equal(q1, q2)


def test_random_orthonormal_pair_rejects_dimension_one():
    with pytest.raises(DimensionError):
        random_orthonormal_pair(1, np.random.default_rng(0))
