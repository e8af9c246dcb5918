import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassdyn.errors import (InvalidInputError, InvarianceViolationError, ModulusZeroError,
                             UnsupportedStructureError)
from grassdyn.grassmann import Subspace, complement
from grassdyn.jordan import (JordanStructure, assemble, bounds, example_operator, normalized,
                             quotient_operator, rationally_degenerate, recover_structure, sort_blocks)
from grassdyn.matrix_core import BlockSpec, jordan_block, rotation


def eigen_points(b):
    if b.kind == "classical":
        return [complex(b.modulus)]
    return [b.modulus * np.exp(1j * b.angle), b.modulus * np.exp(-1j * b.angle)]


def separated_blocks(rng, max_N=12, gap=0.05):
    """Random blocks whose distinct eigenvalues stay ``gap`` apart."""
    while True:
        N = int(rng.integers(1, max_N + 1))
        blocks, used = [], 0
        while used < N:
            real = N - used >= 2 and rng.integers(2)
            rho = int(rng.integers(1, min(4, (N - used) // (2 if real else 1)) + 1))
            mod = float(rng.uniform(0.3, 2.0))
            if real:
                blocks.append(BlockSpec.real(mod, float(rng.uniform(0.2, np.pi - 0.2)), rho))
            else:
                blocks.append(BlockSpec.classical(mod * (1 if rng.integers(2) else -1), rho))
            used += blocks[-1].dim
        pts = [p for b in blocks for p in eigen_points(b)]
        if all(abs(p - q) > gap for p, q in itertools.combinations(pts, 2)):
            return blocks


def conditioned(rng, N, cond=100.0):
    u = np.linalg.qr(rng.standard_normal((N, N)))[0]
    v = np.linalg.qr(rng.standard_normal((N, N)))[0]
    return u @ np.diag(np.geomspace(1.0, cond, N)) @ v.T


def signature(blocks):
    return sorted((b.kind, round(abs(b.modulus), 6), round(abs(b.angle or 0.0), 6), b.rho) for b in blocks)


def test_assemble_examples():
    A = assemble([BlockSpec.real(1, 1.0), BlockSpec.real(1, np.sqrt(2))])
    assert np.array_equal(A[:2, :2], rotation(1.0))
    assert np.array_equal(A[2:, 2:], rotation(np.sqrt(2)))
    assert not A[:2, 2:].any()
    assert np.array_equal(assemble([BlockSpec.classical(1.0)]), [[1.0]])
    assert np.array_equal(assemble([BlockSpec.classical(1.0)], [0.5]), [[0.5]])
    with pytest.raises(InvalidInputError):
        assemble([])


def test_example_operators():
    assert example_operator([1.0, np.sqrt(2)]).shape == (4, 4)
    T = example_operator([1.0], odd=True)
    assert np.array_equal(T, [[np.cos(1), -np.sin(1), 0], [np.sin(1), np.cos(1), 0], [0, 0, 1]])
    assert np.allclose(example_operator([0.0]), np.eye(2))
    assert rationally_degenerate([0.0])
    assert rationally_degenerate([1.0, 2.0])
    assert not rationally_degenerate([1.0, np.sqrt(2)])


def test_recover_example_operator():
    st_ = recover_structure(example_operator([1.0, np.sqrt(2)]))
    assert [b.kind for b in st_.blocks] == ["real", "real"]
    assert sorted(b.angle for b in st_.blocks) == pytest.approx([1.0, np.sqrt(2)])
    assert st_.rho == 2


def test_recover_identity():
    st_ = recover_structure(np.eye(3))
    assert [(b.kind, b.modulus, b.rho) for b in st_.blocks] == [("classical", 1.0, 1)] * 3


def test_recover_size_two_real_block():
    T = jordan_block(BlockSpec.real(1.0, 0.7, 2))
    st_ = recover_structure(T)
    assert len(st_.blocks) == 1
    b = st_.blocks[0]
    assert (b.kind, b.rho) == ("real", 2)
    assert b.angle == pytest.approx(0.7)
    assert np.allclose(st_.operator(), T, atol=1e-9)


def test_recover_errors():
    with pytest.raises(ModulusZeroError):
        recover_structure(np.diag([1.0, 0.0]))
    # two eigenvalues inside one cluster but not a Jordan block
    with pytest.raises(UnsupportedStructureError):
        recover_structure(np.diag([1.0, 1.0 + 1e-4]))


def test_recover_sort_order():
    blocks = [BlockSpec.real(2.0, 0.5), BlockSpec.classical(0.5, 2), BlockSpec.classical(-1.0)]
    st_ = recover_structure(assemble(blocks))
    assert [abs(b.modulus) for b in st_.blocks] == pytest.approx([0.5, 1.0, 2.0])
    assert sort_blocks(blocks) == [blocks[1], blocks[2], blocks[0]]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_recover_round_trip(seed):
    rng = np.random.default_rng(seed)
    blocks = separated_blocks(rng)
    N = sum(b.dim for b in blocks)
    P = conditioned(rng, N)
    T = P @ assemble(blocks) @ np.linalg.inv(P)
    rec = recover_structure(T)
    assert signature(rec.blocks) == signature(blocks)
    assert np.max(np.abs(rec.operator() - T)) < 1e-6 * max(1.0, np.max(np.abs(T)))


def test_bounds_examples():
    r = bounds(JordanStructure(tuple(BlockSpec.real(1, t) for t in (1.0, 2.0, 3.0))))
    assert (r.relative_size, r.lower_bound_universal) == (3, 3)
    r = bounds(JordanStructure((BlockSpec.real(1.0, 1.0, 2),)))
    assert (r.lower_bound_specific, r.lower_bound_universal, r.excluded_up_to) == (2, 2, 2)
    r = bounds(JordanStructure((BlockSpec.classical(1.0, 3),)))
    assert r.lower_bound_universal == 2
    assert r.to_dict()["rho"] == 3


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_bounds_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    blocks = separated_blocks(rng)
    a = bounds(JordanStructure(tuple(blocks)))
    b = bounds(JordanStructure(tuple(rng.permutation(np.array(blocks, dtype=object)))))
    assert (a.relative_size, a.lower_bound_specific, a.lower_bound_universal) == \
        (b.relative_size, b.lower_bound_specific, b.lower_bound_universal)
    assert a.lower_bound_specific >= a.lower_bound_universal


def test_structure_json_round_trip_and_validation():
    st_ = JordanStructure((BlockSpec.real(1.0, 0.3, 2), BlockSpec.classical(-0.5)))
    d = st_.to_dict()
    assert d["N"] == 5 and d["rho"] == 3
    back = JordanStructure.from_dict(d)
    assert back.blocks == st_.blocks
    with pytest.raises(InvalidInputError):
        JordanStructure.from_dict({**d, "N": 4})
    with pytest.raises(InvalidInputError):
        JordanStructure(())


def test_normalized_records_scale():
    st_ = normalized(JordanStructure((BlockSpec.classical(4.0), BlockSpec.real(2.0, 1.0))))
    assert max(abs(b.modulus) for b in st_.blocks) == 1.0
    assert st_.scale == 0.25


def test_quotient_examples():
    T = assemble([BlockSpec.classical(3.0, 2), BlockSpec.real(0.5, 1.0)])
    Q = quotient_operator(T, Subspace.coordinate(4, [0]))
    assert np.array_equal(Q, T[1:, 1:])
    R = assemble([BlockSpec.real(1.0, 0.4, 2), BlockSpec.classical(2.0)])
    Q2 = quotient_operator(R, Subspace.coordinate(5, [0, 1]))
    assert np.array_equal(Q2, R[2:, 2:])
    with pytest.raises(InvarianceViolationError) as exc:
        quotient_operator(T, Subspace.coordinate(4, [1]))
    assert exc.value.residual > 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_nested_quotients_compose(seed):
    rng = np.random.default_rng(seed)
    # upper triangular T keeps span{e1} and span{e1, e2} invariant
    N = int(rng.integers(3, 8))
    T = np.triu(rng.standard_normal((N, N))) + 3 * np.eye(N)
    Q = np.linalg.qr(rng.standard_normal((N, N)))[0]
    S = Q @ T @ Q.T
    K1 = Subspace(Q[:, :1])
    K2 = Subspace(Q[:, :2])
    step1 = quotient_operator(S, K1)
    # the image of K2 in the first quotient, in complement coordinates
    C1 = complement(K1).frame
    inner = Subspace.span(C1.T @ Q[:, 1])
    twice = quotient_operator(step1, inner)
    direct = quotient_operator(S, K2)
    # both represent the same induced map; relate the two orthonormal bases of K2^perp
    basis_twice = C1 @ complement(inner).frame
    W = complement(K2).frame.T @ basis_twice
    assert np.allclose(W.T @ W, np.eye(N - 2), atol=1e-12)
    assert np.allclose(twice, W.T @ direct @ W, atol=1e-9)
