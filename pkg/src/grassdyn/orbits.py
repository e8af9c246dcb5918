"""Empirical orbit density and the exact obstructions that certify its failure.

Orbit frames are advanced one iterate at a time: ``F_{k+1}`` is the left
singular frame of ``T @ F_k``, so every stored frame is orthonormal and the
singular values double as the rank-collapse check.  Density verdicts are
evidence only (``empirical=True`` in every report); non-density is asserted
only through the exact invariants at the bottom of this module.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (DegenerateOrbitError, InvalidInputError, PreconditionError,
                     SingularMatrixError)
from .grassmann import Subspace, chordal_to_frames, complement, grassmann_distance
from .matrix_core import as_matrix

COLLAPSE_TOL = 1e-12
TWO_PI = 2.0 * math.pi


def _threads(threads: Optional[int]) -> int:
    if threads is None:
        threads = int(os.environ.get("GRASSDYN_THREADS", "1") or 1)
    return max(1, int(threads))


def _check_operator(T, M: Subspace) -> np.ndarray:
    T = as_matrix(T, square=True, name="operator")
    if T.shape[0] != M.ambient_dim:
        raise InvalidInputError(f"operator acts on R^{T.shape[0]}, subspace lives in R^{M.ambient_dim}")
    return T


def orbit_frames(T, M: Subspace, K: int, chunk: int = 2048) -> Iterator[tuple]:
    """Yield ``(k0, frames)`` where ``frames[j]`` spans ``T^(k0+j) M``, for k up to K."""
    T = _check_operator(T, M)
    if K < 0:
        raise InvalidInputError(f"iterate budget must be >= 0, got {K}")
    N, n = M.frame.shape
    F = np.array(M.frame)
    buf = np.empty((min(chunk, K + 1), N, n))
    j = k0 = 0
    for k in range(K + 1):
        if k:
            u, s, _ = np.linalg.svd(T @ F, full_matrices=False)
            if s[-1] < COLLAPSE_TOL * max(s[0], 1e-300):
                raise DegenerateOrbitError(k, float(s[-1]))
            F = u
        buf[j] = F
        j += 1
        if j == buf.shape[0]:
            yield k0, buf[:j].copy()
            k0, j = k + 1, 0
    if j:
        yield k0, buf[:j].copy()


def orbit_frame_at(T, M: Subspace, k: int) -> Subspace:
    last = None
    for k0, frames in orbit_frames(T, M, k):
        last = frames[-1]
    return Subspace(last)


@dataclass(frozen=True)
class DensityReport:
    mode: str  # "point" or "grassmann"
    targets: int
    hits: int
    per_target: tuple  # (min_distance, argmin_iterate) per target
    K: int
    epsilon: float
    elapsed: float
    seed: Optional[int] = None
    empirical: bool = True
    trace: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def all_hit(self) -> bool:
        return self.hits == self.targets

    @property
    def min_distances(self) -> np.ndarray:
        return np.array([d for d, _ in self.per_target])

    def to_dict(self) -> dict:
        return {"mode": self.mode, "targets": self.targets, "hits": self.hits, "K": self.K,
                "epsilon": self.epsilon, "seed": self.seed, "empirical": self.empirical,
                "per_target": [{"min_distance": d, "argmin_iterate": k} for d, k in self.per_target],
                "elapsed": self.elapsed}


def _scan(frames_iter, n_targets: int, dist_fn, threads: int, trace_target: Optional[int]):
    best = np.full(n_targets, np.inf)
    arg = np.zeros(n_targets, dtype=int)
    trace = []
    groups = [g for g in np.array_split(np.arange(n_targets), threads) if g.size]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for k0, frames in frames_iter:
            def work(idx, frames=frames):
                return idx, dist_fn(frames, idx)

            for idx, d in pool.map(work, groups):
                j = np.argmin(d, axis=1)
                dmin = d[np.arange(len(idx)), j]
                better = dmin < best[idx]
                best[idx[better]] = dmin[better]
                arg[idx[better]] = k0 + j[better]
                if trace_target is not None and trace_target in idx:
                    trace.append(d[int(np.where(idx == trace_target)[0][0])])
    tr = None
    if trace_target is not None:
        tr = np.concatenate(trace)
    return best, arg, tr


def orbit_point_density(T, M: Subspace, targets, K: int, eps: float, *, seed: Optional[int] = None,
                        threads: Optional[int] = None, trace_target: Optional[int] = None) -> DensityReport:
    """For each target, the smallest distance to ``T^k M`` over ``0 <= k <= K``."""
    T = _check_operator(T, M)
    tg = np.atleast_2d(np.asarray(targets, dtype=float))
    if tg.shape[1] != M.ambient_dim:
        raise InvalidInputError(f"targets have length {tg.shape[1]}, expected {M.ambient_dim}")
    t0 = time.perf_counter()

    def dist(frames, idx):
        t = tg[idx]
        coef = np.einsum("kij,ti->tkj", frames, t)
        resid = t[:, None, :] - np.einsum("kij,tkj->tki", frames, coef)
        return np.sqrt(np.einsum("tki,tki->tk", resid, resid))

    best, arg, tr = _scan(orbit_frames(T, M, K), tg.shape[0], dist, _threads(threads), trace_target)
    per = tuple((float(d), int(k)) for d, k in zip(best, arg))
    hits = int(np.sum(best < eps))
    return DensityReport("point", tg.shape[0], hits, per, K, eps, time.perf_counter() - t0, seed,
                         trace=tr)


def orbit_grassmann_density(T, M: Subspace, targets: Sequence[Subspace], K: int, eps: float, *,
                            seed: Optional[int] = None, threads: Optional[int] = None,
                            trace_target: Optional[int] = None) -> DensityReport:
    """For each target subspace, the smallest chordal distance to ``T^k M``."""
    T = _check_operator(T, M)
    targets = list(targets)
    for S in targets:
        if S.dim != M.dim or S.ambient_dim != M.ambient_dim:
            raise InvalidInputError(f"target of dim {S.dim} in R^{S.ambient_dim} does not match M")
    G = np.array([S.frame for S in targets]) if targets else np.zeros((0,) + M.frame.shape)
    t0 = time.perf_counter()

    def dist(frames, idx):
        return np.array([chordal_to_frames(frames, G[i]) for i in idx])

    best, arg, tr = _scan(orbit_frames(T, M, K), len(targets), dist, _threads(threads), trace_target)
    per = tuple((float(d), int(k)) for d, k in zip(best, arg))
    hits = int(np.sum(best < eps))
    return DensityReport("grassmann", len(targets), hits, per, K, eps, time.perf_counter() - t0, seed,
                         trace=tr)


# -- Kronecker search ---------------------------------------------------------

def circular_distance(a, b):
    """Distance between angles on the circle, in [0, pi]."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def kronecker_find(angles: Sequence[float], phases: Sequence[float], eps: float, K: int,
                   chunk: int = 1 << 18) -> Optional[int]:
    """Smallest ``k <= K`` with ``k*theta_j`` within ``eps`` of ``phi_j`` (mod 2 pi) for all j."""
    th = np.asarray(angles, dtype=float)
    ph = np.asarray(phases, dtype=float)
    if th.shape != ph.shape or th.ndim != 1 or th.size == 0:
        raise InvalidInputError("angles and phases must be equal-length non-empty lists")
    if not eps > 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    for k0 in range(0, K + 1, chunk):
        k = np.arange(k0, min(K + 1, k0 + chunk), dtype=float)
        ok = np.ones(k.size, dtype=bool)
        for t, p in zip(th, ph):
            ok &= circular_distance(k * t, p) < eps
            if not ok.any():
                break
        hit = np.flatnonzero(ok)
        if hit.size:
            return int(k0 + hit[0])
    return None


# -- duality ------------------------------------------------------------------

def dual_operator(T, max_cond: float = 1e12) -> np.ndarray:
    """``(T^-1)^T``."""
    T = as_matrix(T, square=True, name="operator")
    cond = float(np.linalg.cond(T))
    if not np.isfinite(cond) or cond > max_cond:
        raise SingularMatrixError(f"operator is numerically singular (condition number {cond:.3e})")
    return np.linalg.inv(T).T


def duality_check(T, M: Subspace, i_max: int) -> float:
    """Worst chordal gap between ``(T^i M)^perp`` and ``dual(T)^i (M^perp)``, i <= i_max."""
    T = _check_operator(T, M)
    D = dual_operator(T)
    Mp = complement(M)
    worst = 0.0
    fwd = orbit_frames(T, M, i_max)
    bwd = orbit_frames(D, Mp, i_max)
    for (_, fa), (_, fb) in zip(fwd, bwd):
        for a, b in zip(fa, fb):
            worst = max(worst, grassmann_distance(complement(Subspace(a)), Subspace(b)).chordal)
    return worst


# -- exact obstructions ---------------------------------------------------------

@dataclass(frozen=True)
class MembershipResult:
    member: bool
    first_plane_dim: int  # dim(M ∩ R^2 x {0})
    second_plane_dim: int  # dim(M ∩ {0} x R^2)
    first_direction: Optional[np.ndarray] = field(default=None, compare=False)
    second_direction: Optional[np.ndarray] = field(default=None, compare=False)

    def __bool__(self):
        return self.member

    def to_dict(self) -> dict:
        f = lambda v: None if v is None else v.tolist()
        return {"member": self.member, "first_plane_dim": self.first_plane_dim,
                "second_plane_dim": self.second_plane_dim,
                "first_direction": f(self.first_direction), "second_direction": f(self.second_direction)}


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    return (v if v[np.argmax(np.abs(v))] > 0 else -v) + 0.0


def _kernel(a: np.ndarray, tol: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(a)
    r = int(np.sum(s > tol))
    return vh[r:].T


def esp2sup_membership(M: Subspace, tol: float = 1e-9) -> MembershipResult:
    """Whether a 2-plane of R^4 meets each coordinate plane in exactly a line.

    These are the planes ``span{(x, a y), (b x, y)}`` with ``x, y`` non-zero in
    R^2 and ``ab != 1``: ``x - a y``-type combinations supply the two
    intersection lines, returned as unit witnesses.
    """
    if M.dim != 2 or M.ambient_dim != 4:
        raise InvalidInputError(f"need a 2-dimensional subspace of R^4, got dim {M.dim} in R^{M.ambient_dim}")
    F = M.frame
    k1 = _kernel(F[2:4], tol)  # combinations with vanishing second bi-component
    k2 = _kernel(F[0:2], tol)
    d1, d2 = k1.shape[1], k2.shape[1]
    w1 = _canonical_sign(F @ k1[:, 0]) if d1 == 1 else None
    w2 = _canonical_sign(F @ k2[:, 0]) if d2 == 1 else None
    return MembershipResult(d1 == 1 and d2 == 1, d1, d2, w1, w2)


@dataclass(frozen=True)
class LockReport:
    holds: bool
    K: int
    max_second_singular: float
    max_angle_deviation: float  # max_k |pi/2 - max principal angle to span{e1, e2}|

    def to_dict(self) -> dict:
        return {"holds": self.holds, "K": self.K, "max_second_singular": self.max_second_singular,
                "max_angle_deviation": self.max_angle_deviation}


def _block_diagonal_2x2(T: np.ndarray, tol: float) -> bool:
    return T.shape == (4, 4) and np.max(np.abs(T[:2, 2:])) <= tol and np.max(np.abs(T[2:, :2])) <= tol


def projection_rank_lock(T, M: Subspace, K: int, tol: float = 1e-10) -> LockReport:
    """Certify that ``T^k M`` never leaves the one-line-per-bi-component shape.

    For every ``k <= K`` the first-bi-component projection of ``T^k M`` must
    have rank 1 (second singular value below ``tol``) and the largest
    principal angle between ``T^k M`` and ``span{e1, e2}`` must be pi/2.
    """
    T = _check_operator(T, M)
    if not _block_diagonal_2x2(T, 1e-14 * max(1.0, float(np.max(np.abs(T))))):
        raise PreconditionError("operator must be block diagonal with two 2x2 blocks")
    if not esp2sup_membership(M):
        raise PreconditionError("subspace does not meet both coordinate planes in a line")
    worst_s = worst_a = 0.0
    for _, frames in orbit_frames(T, M, K):
        top = frames[:, 0:2, :]
        bottom = frames[:, 2:4, :]
        s_top = np.linalg.svd(top, compute_uv=False)  # cosines to span{e1, e2}
        s_bot = np.linalg.svd(bottom, compute_uv=False)  # sines
        worst_s = max(worst_s, float(np.max(s_top[:, 1])))
        ang = np.arctan2(s_bot[:, 0], s_top[:, 1])
        worst_a = max(worst_a, float(np.max(np.abs(np.pi / 2 - ang))))
    return LockReport(worst_s < tol and worst_a < tol, K, worst_s, worst_a)


@dataclass(frozen=True)
class NormRatioReport:
    holds: bool
    K: int
    block_sizes: tuple
    block_moduli: tuple
    initial_block_norms: tuple
    max_relative_deviation: float
    distance_floor: Optional[float] = None

    def to_dict(self) -> dict:
        return {"holds": self.holds, "K": self.K, "block_sizes": list(self.block_sizes),
                "block_moduli": list(self.block_moduli),
                "initial_block_norms": list(self.initial_block_norms),
                "max_relative_deviation": self.max_relative_deviation,
                "distance_floor": self.distance_floor}


def diagonal_blocks(T: np.ndarray, tol: float = 0.0) -> list:
    """Sizes of the finest contiguous block-diagonal partition of ``T``."""
    N = T.shape[0]
    sizes, start = [], 0
    for b in range(1, N + 1):
        if b == N or (np.max(np.abs(T[start:b, b:])) <= tol and np.max(np.abs(T[b:, start:b])) <= tol
                      and np.max(np.abs(T[:start, b:]), initial=0.0) <= tol):
            sizes.append(b - start)
            start = b
    return sizes


def ratio_distance_floor(x, target, block_sizes: Sequence[int]) -> float:
    """Lower bound on the distance from ``target`` to ``{c T^k x}`` for equal-modulus isometric blocks.

    Block norms of every orbit point are proportional to those of ``x``, so the
    distance is at least the distance from the vector of target block norms to
    the ray through the vector of ``x`` block norms.
    """
    x, t = np.asarray(x, dtype=float), np.asarray(target, dtype=float)
    edges = np.cumsum([0] + list(block_sizes))
    nx = np.array([np.linalg.norm(x[a:b]) for a, b in zip(edges[:-1], edges[1:])])
    nt = np.array([np.linalg.norm(t[a:b]) for a, b in zip(edges[:-1], edges[1:])])
    u = nx / np.linalg.norm(nx)
    return float(np.linalg.norm(nt - (nt @ u) * u))


def norm_ratio_invariant(T, x, K: int, block_sizes: Optional[Sequence[int]] = None, target=None,
                         tol: float = 1e-9) -> NormRatioReport:
    """Check that every block norm of ``T^k x`` is ``|a_i|^k`` times its initial value.

    ``T`` must be block diagonal with each block ``a_i`` times an isometry.
    Equivalent to the pairwise statement
    ``|b_i(T^k x)| a_j^k |b_j(x)| = |b_j(T^k x)| a_i^k |b_i(x)|`` but immune to
    under/overflow of ``a^k``: each block is advanced by ``B_i / |a_i|``.
    """
    T = as_matrix(T, square=True, name="operator")
    x = np.asarray(x, dtype=float)
    if x.shape != (T.shape[0],) or not np.any(x):
        raise InvalidInputError("x must be a non-zero vector matching the operator")
    sizes = list(block_sizes) if block_sizes is not None else diagonal_blocks(T)
    if sum(sizes) != T.shape[0]:
        raise InvalidInputError(f"block sizes {sizes} do not cover R^{T.shape[0]}")
    edges = np.cumsum([0] + sizes)
    off = T.copy()
    blocks, moduli = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        B = T[a:b, a:b]
        off[a:b, a:b] = 0.0
        g = B.T @ B
        a2 = float(g[0, 0])
        if a2 <= 0 or np.max(np.abs(g - a2 * np.eye(b - a))) > 1e-9 * a2:
            raise InvalidInputError(f"block at rows {a}:{b} is not a scalar multiple of an isometry")
        blocks.append(B / math.sqrt(a2))
        moduli.append(math.sqrt(a2))
    if np.max(np.abs(off)) > 0:
        raise InvalidInputError("operator is not block diagonal with the given blocks")
    ys = [x[a:b].copy() for a, b in zip(edges[:-1], edges[1:])]
    n0 = np.array([np.linalg.norm(y) for y in ys])
    worst = 0.0
    for _ in range(K):
        ys = [Q @ y for Q, y in zip(blocks, ys)]
        n = np.array([np.linalg.norm(y) for y in ys])
        dev = np.abs(n - n0)[n0 > 0] / n0[n0 > 0]
        if dev.size:
            worst = max(worst, float(dev.max()))
        if np.any(n[n0 == 0] != 0):
            worst = math.inf
    floor = None
    if target is not None and np.allclose(moduli, moduli[0], rtol=1e-12):
        floor = ratio_distance_floor(x, target, sizes)
    return NormRatioReport(worst <= tol, K, tuple(sizes), tuple(moduli), tuple(float(v) for v in n0),
                           worst, floor)


def annulus_clearance(x12, x34, r: float, eps: float) -> tuple:
    """Geometry behind the size-2 real Jordan block obstruction.

    For independent ``x12, x34`` in R^2 the set
    ``{s x34 + c x12 : s real, r - eps <= c <= r + eps}`` keeps distance
    ``(r - eps) |x12| |sin alpha|`` from the origin, where alpha is the angle
    between the two vectors.  Any ``a`` below that distance gives a ball
    ``B((a/2, 0), a/4)`` whose rotations sweep the annulus
    ``a/4 <= |z| <= 3a/4``, disjoint from the set.  Returns
    ``(clearance, a, outer_radius)`` with ``a`` at 99% of the clearance.
    """
    x12 = np.asarray(x12, dtype=float)
    x34 = np.asarray(x34, dtype=float)
    if not 0 < eps < r:
        raise InvalidInputError("need 0 < eps < r")
    cross = abs(x12[0] * x34[1] - x12[1] * x34[0])
    sin_alpha = cross / (np.linalg.norm(x12) * np.linalg.norm(x34))
    if sin_alpha == 0:
        raise InvalidInputError("x12 and x34 must be linearly independent")
    clearance = (r - eps) * float(np.linalg.norm(x12)) * float(sin_alpha)
    a = 0.99 * clearance
    return clearance, a, 0.75 * a
