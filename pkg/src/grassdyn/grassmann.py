"""Subspaces of R^N as orthonormal frames, and the principal-angle metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, RankDeficiencyError

ORTHONORMAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Subspace:
    """An n-dimensional subspace of R^N held as an N x n orthonormal frame."""

    frame: np.ndarray

    def __post_init__(self):
        f = np.array(self.frame, dtype=float)
        if f.ndim == 1:
            f = f[:, None]
        if f.ndim != 2 or f.shape[1] < 1 or f.shape[1] > f.shape[0]:
            raise InvalidInputError(f"frame must be N x n with 1 <= n <= N, got shape {f.shape}")
        if not np.all(np.isfinite(f)):
            raise InvalidInputError("frame has non-finite entries")
        err = np.max(np.abs(f.T @ f - np.eye(f.shape[1])))
        if err > ORTHONORMAL_TOL:
            raise InvalidInputError(f"frame columns are not orthonormal (error {err:.2e})")
        f.setflags(write=False)
        object.__setattr__(self, "frame", f)

    @classmethod
    def span(cls, *vectors, tol: float = 1e-12) -> "Subspace":
        """Span of the given column vectors (or of the columns of one matrix)."""
        if len(vectors) == 1 and np.ndim(vectors[0]) == 2:
            a = np.array(vectors[0], dtype=float)
        else:
            a = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
        return cls(orthonormalize(a, tol=tol))

    @classmethod
    def coordinate(cls, ambient_dim: int, indices) -> "Subspace":
        """``span{e_i : i in indices}`` with 0-based indices."""
        return cls(np.eye(ambient_dim)[:, list(indices)])

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.T

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return point_to_subspace_distance(x, self) <= tol * max(1.0, float(np.linalg.norm(x)))

    def to_list(self) -> list:
        return self.frame.tolist()

    def __repr__(self):
        return f"Subspace(N={self.ambient_dim}, n={self.dim})"


def orthonormalize(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis of the column span of ``a`` (full column rank required)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[-1] <= tol * max(s[0], 1.0):
        raise RankDeficiencyError(f"columns are linearly dependent (singular values {s})")
    return u


def point_to_subspace_distance(x, S: Subspace) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (S.ambient_dim,):
        raise InvalidInputError(f"vector of length {x.shape} does not live in R^{S.ambient_dim}")
    r = x - S.frame @ (S.frame.T @ x)
    return float(np.linalg.norm(r))


@dataclass(frozen=True)
class GrassmannDistance:
    principal_angles: tuple
    chordal: float
    max_angle: float

    def to_dict(self) -> dict:
        return {"principal_angles": list(self.principal_angles), "chordal": self.chordal,
                "max_angle": self.max_angle}


def principal_angles(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Principal angles between column spans of orthonormal A, B, non-increasing.

    Cosines come from ``A^T B`` and sines from the residual ``B - A A^T B``;
    ``arctan2`` of the paired values stays accurate near 0 and near pi/2.
    """
    g = A.T @ B
    cos = np.linalg.svd(g, compute_uv=False)
    sin = np.linalg.svd(B - A @ g, compute_uv=False)
    # cos descending <-> angles ascending; sin descending <-> angles descending
    ang = np.arctan2(np.clip(sin[::-1], 0.0, 1.0), np.clip(cos, 0.0, 1.0))
    return np.sort(ang)[::-1]


def grassmann_distance(A: Subspace, B: Subspace) -> GrassmannDistance:
    if A.ambient_dim != B.ambient_dim or A.dim != B.dim:
        raise InvalidInputError(
            f"subspaces must share ambient space and dimension: "
            f"({A.ambient_dim},{A.dim}) vs ({B.ambient_dim},{B.dim})")
    # order the pair canonically so d(A, B) and d(B, A) run the same arithmetic
    if A.frame.tobytes() > B.frame.tobytes():
        A, B = B, A
    if np.array_equal(A.frame, B.frame):
        z = (0.0,) * A.dim
        return GrassmannDistance(z, 0.0, 0.0)
    ang = principal_angles(A.frame, B.frame)
    chordal = float(np.sqrt(np.sum(np.sin(ang) ** 2)))
    return GrassmannDistance(tuple(float(a) for a in ang), chordal, float(ang[0]))


def chordal_to_frames(frames: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Chordal distances from a stack of frames ``(K, N, n)`` to one frame ``(N, n)``.

    Uses ``||(I - F F^T) G||_F``, which equals ``sqrt(sum sin^2)``.
    """
    g = np.einsum("kij,il->kjl", frames, target)
    resid = target[None, :, :] - np.einsum("kij,kjl->kil", frames, g)
    return np.sqrt(np.einsum("kil,kil->k", resid, resid))


def complement(S: Subspace) -> Subspace:
    """Orthogonal complement, built canonically from the standard basis.

    Standard basis vectors are projected onto the complement and orthonormalised
    greedily, always taking the candidate with the largest remaining residual
    (first index on ties).  For coordinate subspaces this returns exactly the
    missing coordinate axes, in increasing order and with positive sign.
    """
    N, n = S.ambient_dim, S.dim
    if n == N:
        raise InvalidInputError("complement of the whole space is the zero subspace")
    cand = np.eye(N) - S.frame @ S.frame.T
    cols = []
    available = list(range(N))
    for _ in range(N - n):
        norms = [np.linalg.norm(cand[:, j]) for j in available]
        pick = available[int(np.argmax(norms))]
        q = cand[:, pick] / np.linalg.norm(cand[:, pick])
        cols.append(q)
        available.remove(pick)
        for j in available:
            cand[:, j] -= q * (q @ cand[:, j])
    f = np.column_stack(cols)
    # one reorthogonalisation pass against S and within the new frame
    f -= S.frame @ (S.frame.T @ f)
    return Subspace(_mgs(f))


def _mgs(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    for j in range(a.shape[1]):
        for i in range(j):
            a[:, j] -= a[:, i] * (a[:, i] @ a[:, j])
        a[:, j] /= np.linalg.norm(a[:, j])
    return a


def random_subspace(rng: np.random.Generator, ambient_dim: int, dim: int) -> Subspace:
    """Orthonormalised standard-normal frame."""
    g = rng.standard_normal((ambient_dim, dim))
    q, r = np.linalg.qr(g)
    return Subspace(q * np.sign(np.diag(r)))


def random_unit_vectors(rng: np.random.Generator, ambient_dim: int, count: int) -> np.ndarray:
    """``count`` points uniform on the unit sphere, as rows."""
    g = rng.standard_normal((count, ambient_dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
