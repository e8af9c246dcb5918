import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassdyn.errors import DegenerateOrbitError, InvalidInputError, PreconditionError, SingularMatrixError
from grassdyn.grassmann import Subspace, grassmann_distance, random_subspace, random_unit_vectors
from grassdyn.jordan import assemble, example_operator
from grassdyn.matrix_core import BlockSpec, matrix_power, rotation
from grassdyn.orbits import (annulus_clearance, circular_distance, diagonal_blocks, dual_operator,
                             duality_check, esp2sup_membership, kronecker_find, norm_ratio_invariant,
                             orbit_frame_at, orbit_frames, orbit_grassmann_density, orbit_point_density,
                             projection_rank_lock, ratio_distance_floor)

SQRT2 = np.sqrt(2.0)
T2 = example_operator([1.0, SQRT2])
E13 = Subspace.coordinate(4, [0, 2])


def test_isometry_conservation():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(4)
    y = x.copy()
    for _ in range(10_000):
        y = T2 @ y
    assert abs(np.linalg.norm(y) - np.linalg.norm(x)) <= 1e-9 * np.linalg.norm(x)


def test_incremental_frames_match_direct_power():
    rng = np.random.default_rng(1)
    P = np.eye(4) + 0.2 * rng.standard_normal((4, 4))
    T = P @ T2 @ np.linalg.inv(P)
    M = random_subspace(rng, 4, 2)
    k = 10_000
    direct = Subspace.span(matrix_power(T, k) @ M.frame)
    assert grassmann_distance(orbit_frame_at(T, M, k), direct).chordal < 1e-7


def test_orbit_frames_chunking_and_collapse():
    seen = []
    for k0, frames in orbit_frames(T2, E13, 10, chunk=4):
        seen.extend(range(k0, k0 + len(frames)))
    assert seen == list(range(11))
    with pytest.raises(DegenerateOrbitError) as exc:
        list(orbit_frames(np.diag([1.0, 0.0]), Subspace.coordinate(2, [1]), 3))
    assert exc.value.k == 1


def test_targets_inside_M_at_K0():
    tg = np.array([[1.0, 0, 0, 0], [0, 0, -2.0, 0], [3.0, 0, 1.0, 0]])
    rep = orbit_point_density(T2, E13, tg, K=0, eps=1e-9)
    assert [d for d, _ in rep.per_target] == [0.0, 0.0, 0.0]
    assert rep.hits == 3 and rep.empirical


def test_density_report_bookkeeping():
    rng = np.random.default_rng(2)
    tg = random_unit_vectors(rng, 4, 20)
    prev = None
    for K in (0, 10, 100, 1000):
        rep = orbit_point_density(T2, E13, tg, K, 0.05)
        d = rep.min_distances
        assert np.all(d >= 0)
        assert all(0 <= k <= K for _, k in rep.per_target)
        assert rep.hits == int(np.sum(d < 0.05))
        if prev is not None:
            assert np.all(d <= prev)
        prev = d


def test_parallel_partition_is_deterministic(monkeypatch):
    rng = np.random.default_rng(3)
    tg = random_unit_vectors(rng, 4, 17)
    a = orbit_point_density(T2, E13, tg, 3000, 0.05, threads=1)
    b = orbit_point_density(T2, E13, tg, 3000, 0.05, threads=4)
    monkeypatch.setenv("GRASSDYN_THREADS", "3")
    c = orbit_point_density(T2, E13, tg, 3000, 0.05)
    assert a.per_target == b.per_target == c.per_target


def test_trace_is_per_iterate_distance():
    tg = np.array([[0.0, 1.0, 0.0, 0.0]])
    rep = orbit_point_density(T2, E13, tg, 50, 0.05, trace_target=0)
    assert rep.trace.shape == (51,)
    assert rep.trace.min() == rep.per_target[0][0]
    assert rep.trace[0] == pytest.approx(1.0)


def test_grassmann_density_examples():
    rep = orbit_grassmann_density(T2, E13, [E13], K=0, eps=1e-9)
    assert rep.per_target[0][0] == 0.0
    rng = np.random.default_rng(4)
    lines = [random_subspace(rng, 2, 1) for _ in range(50)]
    rep = orbit_grassmann_density(rotation(1.0), Subspace.coordinate(2, [0]), lines, 10_000, 0.02)
    assert rep.hits == 50
    with pytest.raises(InvalidInputError):
        orbit_grassmann_density(T2, E13, [Subspace.coordinate(4, [0])], 1, 0.1)


def test_max_angle_to_first_plane_stays_right_angle():
    E12 = Subspace.coordinate(4, [0, 1])
    for _, frames in orbit_frames(T2, E13, 2000):
        for f in frames[::97]:
            assert grassmann_distance(Subspace(f), E12).max_angle == pytest.approx(np.pi / 2, abs=1e-10)


def test_kronecker_examples():
    assert kronecker_find([0.0], [0.0], 0.1, 10) == 0
    assert kronecker_find([2 * np.pi / 3], [4 * np.pi / 3], 1e-9, 10) == 2
    assert kronecker_find([1.0], [0.5], 1e-12, 100) is None
    with pytest.raises(InvalidInputError):
        kronecker_find([1.0], [0.5], 0.0, 10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.0, 6.2), st.floats(0.05, 0.5))
def test_kronecker_returns_the_first_hit(theta, phi, eps):
    k = kronecker_find([theta], [phi], eps, 2000, chunk=64)
    ks = np.arange(2001)
    # oracle: plain loop over iterates
    hits = [int(j) for j in ks if circular_distance(j * theta, phi) < eps]
    assert k == (hits[0] if hits else None)


def test_dual_operator_examples():
    R = rotation(0.7)
    assert np.allclose(dual_operator(R), R)
    assert np.allclose(dual_operator(np.diag([2.0, 0.5])), np.diag([0.5, 2.0]))
    rng = np.random.default_rng(5)
    A = rng.standard_normal((5, 5)) + 5 * np.eye(5)
    assert np.max(np.abs(dual_operator(dual_operator(A)) - A)) < 1e-10
    with pytest.raises(SingularMatrixError):
        dual_operator(np.diag([1.0, 1e-14]))


def test_duality_examples():
    assert duality_check(T2, E13, 0) == 0.0
    rng = np.random.default_rng(6)
    M = random_subspace(rng, 4, 2)
    assert duality_check(T2, M, 1000) < 1e-9


def test_membership_examples():
    r = esp2sup_membership(E13)
    assert r.member
    assert np.array_equal(r.first_direction, [1.0, 0, 0, 0])
    assert np.array_equal(r.second_direction, [0, 0, 1.0, 0])
    assert not esp2sup_membership(Subspace.coordinate(4, [0, 1]))
    r = esp2sup_membership(Subspace.span([1.0, 0, 1, 0], [0, 1.0, 0, 1]))
    assert not r.member and (r.first_plane_dim, r.second_plane_dim) == (0, 0)
    with pytest.raises(InvalidInputError):
        esp2sup_membership(Subspace.coordinate(4, [0]))


def test_witnesses_lie_in_the_coordinate_planes():
    rng = np.random.default_rng(7)
    x, y = rng.standard_normal(2), rng.standard_normal(2)
    a, b = 0.3, -1.2
    M = Subspace.span(np.r_[x, a * y], np.r_[b * x, y])
    r = esp2sup_membership(M)
    assert r.member
    assert np.allclose(r.first_direction[2:], 0, atol=1e-12) and M.contains(r.first_direction)
    assert np.allclose(r.second_direction[:2], 0, atol=1e-12) and M.contains(r.second_direction)


def test_projection_rank_lock():
    rep = projection_rank_lock(T2, E13, 10_000)
    assert rep.holds
    assert rep.max_second_singular < 1e-10 and rep.max_angle_deviation < 1e-10
    assert projection_rank_lock(T2, E13, 0).holds
    with pytest.raises(PreconditionError):
        projection_rank_lock(T2, Subspace.coordinate(4, [0, 1]), 10)
    with pytest.raises(PreconditionError):
        projection_rank_lock(np.ones((4, 4)) + np.eye(4), E13, 10)


def test_norm_ratio_equal_moduli():
    x = np.array([1.0, 0, 1, 0]) / SQRT2
    rep = norm_ratio_invariant(T2, x, 1000, target=[2.0, 0, 0, 0])
    assert rep.holds and rep.block_sizes == (2, 2)
    assert rep.initial_block_norms[0] == pytest.approx(rep.initial_block_norms[1])
    assert rep.distance_floor == pytest.approx(SQRT2)


def test_norm_ratio_single_block_and_decay():
    assert norm_ratio_invariant(rotation(0.4), np.array([1.0, 2.0]), 100).holds
    T = assemble([BlockSpec.real(1.0, 0.3)], None)
    T = np.block([[T, np.zeros((2, 2))], [np.zeros((2, 2)), 0.5 * rotation(1.1)]])
    x = np.array([0.6, 0.8, 0.0, 1.0])
    rep = norm_ratio_invariant(T, x, 40)
    assert rep.holds and rep.block_moduli == pytest.approx((1.0, 0.5))
    y = np.linalg.matrix_power(T, 20) @ x
    assert np.linalg.norm(y[2:]) / np.linalg.norm(y[:2]) == pytest.approx(2.0 ** -20, rel=1e-9)


def test_norm_ratio_rejects_nonconforming():
    with pytest.raises(InvalidInputError):
        norm_ratio_invariant(assemble([BlockSpec.classical(1.0, 2)]), np.ones(2), 3, block_sizes=[2])
    with pytest.raises(InvalidInputError):
        norm_ratio_invariant(T2, np.zeros(4), 3)


def test_ratio_floor_is_a_lower_bound():
    # brute force over a fine grid of orbit points c * T^k x
    x = np.array([1.0, 0, 1, 0]) / SQRT2
    t = np.array([2.0, 0, 0, 0])
    floor = ratio_distance_floor(x, t, [2, 2])
    y = x.copy()
    best = np.inf
    for _ in range(5000):
        c = (y @ t) / (y @ y)
        best = min(best, np.linalg.norm(t - c * y))
        y = T2 @ y
    assert best >= floor - 1e-12
    assert best < floor + 1e-2


def test_diagonal_blocks_partition():
    assert diagonal_blocks(T2) == [2, 2]
    assert diagonal_blocks(example_operator([1.0], odd=True)) == [2, 1]
    assert diagonal_blocks(np.ones((3, 3))) == [3]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_annulus_stays_clear(seed):
    rng = np.random.default_rng(seed)
    x12, x34 = rng.standard_normal(2), rng.standard_normal(2)
    r, e = rng.uniform(1.1, 3.0), rng.uniform(0.01, 0.9)
    clearance, a, outer = annulus_clearance(x12, x34, r, e)
    # closest point of each line s*x34 + c*x12 to the origin
    for c in np.linspace(r - e, r + e, 9):
        p = c * x12
        s = -(p @ x34) / (x34 @ x34)
        assert np.linalg.norm(p + s * x34) >= clearance - 1e-12 > outer
