"""Staircase reduction of a subspace basis relative to a Jordan-form operator.

A vector of R^N is read block by block as rho "slots": one coordinate under a
classical block, a coordinate pair (bi-component) under a real block.
``chi(x, i)`` returns slot ``i`` (1-based).  ``reduce`` walks the slots from
the last to the first.  At each step it picks pivots among the not yet
reduced vectors (one pivot, or two for a rank-2 bi-component set), normalises
them, and clears that slot from every remaining vector.  The resulting basis
has a staircase of zeros recorded by the ``kappa`` sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, RankDeficiencyError
from .grassmann import principal_angles
from .jordan import JordanStructure

NEAR_THRESHOLD_FACTOR = 100.0


@dataclass(frozen=True)
class ChiView:
    """Slot layout of R^N under a block list: ``slices[i-1]`` and ``owner[i-1]`` per slot ``i``."""

    blocks: tuple
    slices: tuple
    owner: tuple

    @classmethod
    def of(cls, structure) -> "ChiView":
        blocks = tuple(structure.blocks if isinstance(structure, JordanStructure) else structure)
        if not blocks:
            raise InvalidInputError("need at least one block")
        slices, owner = [], []
        offset = 0
        for p, b in enumerate(blocks, start=1):
            for r in range(b.rho):
                start = offset + b.tau * r
                slices.append(slice(start, start + b.tau))
                owner.append(p)
            offset += b.dim
        return cls(blocks, tuple(slices), tuple(owner))

    @property
    def rho(self) -> int:
        return len(self.slices)

    @property
    def ambient_dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def width(self, i: int) -> int:
        s = self.slices[i - 1]
        return s.stop - s.start


def chi(x, i: int, view: ChiView):
    """Slot ``i`` of ``x``: a float, or a length-2 array under a real block."""
    x = np.asarray(x, dtype=float)
    if x.shape != (view.ambient_dim,):
        raise InvalidInputError(f"vector has shape {x.shape}, expected ({view.ambient_dim},)")
    if not 1 <= i <= view.rho:
        raise InvalidInputError(f"slot index {i} outside 1..{view.rho}")
    s = view.slices[i - 1]
    return float(x[s.start]) if s.stop - s.start == 1 else x[s].copy()


@dataclass(frozen=True, eq=False)
class ReducedBasis:
    vectors: np.ndarray  # m x N, one reduced vector per row
    kappa: tuple  # kappa_0 .. kappa_rho, 1-based vector indices
    lambda_dims: tuple  # dim span(Lambda_i), i = 0 .. rho-1
    near_threshold: tuple = field(default_factory=tuple)  # steps with a borderline rank decision

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    def to_dict(self) -> dict:
        return {"vectors": self.vectors.tolist(), "kappa": list(self.kappa),
                "lambda_dims": list(self.lambda_dims), "near_threshold": list(self.near_threshold)}


def _as_basis(basis, N: int) -> np.ndarray:
    b = np.array(basis, dtype=float)
    if b.size == 0:
        return np.zeros((0, N))
    b = np.atleast_2d(b)
    if b.shape[1] != N:
        raise InvalidInputError(f"basis vectors have length {b.shape[1]}, expected {N}")
    if not np.all(np.isfinite(b)):
        raise InvalidInputError("basis has non-finite entries")
    return b


def reduce(view: ChiView, basis, tol: float = 1e-10) -> ReducedBasis:
    """Reduce ``basis`` (rows) against ``view``.

    Rank decisions are relative: a slot set counts as zero when its largest
    entry is at most ``tol`` times the largest vector entry, and a bi-component
    set has rank 2 when its second singular value exceeds ``tol`` times the
    first.
    """
    N, rho = view.ambient_dim, view.rho
    Y = _as_basis(basis, N)
    m = Y.shape[0]
    if m > N:
        raise InvalidInputError(f"{m} vectors cannot be independent in R^{N}")
    if m == 0:
        return ReducedBasis(np.zeros((0, N)), (1,) * (rho + 1), (0,) * rho)
    s = np.linalg.svd(Y, compute_uv=False)
    if s[-1] <= tol * s[0]:
        raise RankDeficiencyError(f"basis is linearly dependent (singular values {s})")
    Y = Y.copy()
    ref = float(np.max(np.abs(Y)))

    kappa, dims, near = [1], [], []
    start = 0  # 0-based index of the first unreduced vector
    for step in range(rho):
        sl = view.slices[rho - step - 1]
        C = Y[start:, sl]
        norms = np.linalg.norm(C, axis=1) if C.size else np.zeros(0)
        big = float(norms.max()) if norms.size else 0.0
        if big <= tol * ref:
            d = 0
            if 0 < big and big > tol * ref / NEAR_THRESHOLD_FACTOR:
                near.append(step)
        elif C.shape[1] == 1 or C.shape[0] == 1:
            d = 1
        else:
            sv = np.linalg.svd(C, compute_uv=False)
            d = 2 if sv[1] > tol * sv[0] else 1
            if sv[1] > 0 and tol * sv[0] / NEAR_THRESHOLD_FACTOR < sv[1] < tol * sv[0] * NEAR_THRESHOLD_FACTOR:
                near.append(step)

        rows = list(range(start, m))
        if d == 1:
            p = start + int(np.argmax(norms))
            piv = Y[p] / norms[p - start]
            cp = piv[sl]
            others = [r for r in rows if r != p]
            new_rows = [piv]
            for r in others:
                c = Y[r, sl]
                new = Y[r] - float(c @ cp) * piv  # cp has unit norm
                new[sl] = 0.0
                new_rows.append(new)
            Y[start:] = np.array(new_rows)
        elif d == 2:
            p1 = start + int(np.argmax(norms))
            c1 = Y[p1, sl]
            u1 = c1 / np.linalg.norm(c1)
            perp = np.abs(C[:, 0] * u1[1] - C[:, 1] * u1[0])
            perp[p1 - start] = -1.0
            p2 = start + int(np.argmax(perp))
            G = np.array([Y[p1, sl], Y[p2, sl]])  # rows are the pivots' bi-components
            X = np.array([[0.0, 1.0], [1.0, 0.0]]) @ np.linalg.inv(G)
            v1, v2 = X @ np.array([Y[p1], Y[p2]])
            v1[sl] = (0.0, 1.0)
            v2[sl] = (1.0, 0.0)
            new_rows = [v1, v2]
            for r in rows:
                if r in (p1, p2):
                    continue
                c = Y[r, sl]
                new = Y[r] - c[1] * v1 - c[0] * v2
                new[sl] = 0.0
                new_rows.append(new)
            Y[start:] = np.array(new_rows)
        else:
            Y[start:, sl] = 0.0
        dims.append(d)
        start += d
        kappa.append(kappa[-1] + d)

    if kappa[-1] != m + 1:
        raise RankDeficiencyError(f"reduction ended with kappa_rho={kappa[-1]} != m+1={m + 1}")
    return ReducedBasis(Y, tuple(kappa), tuple(dims), tuple(near))


@dataclass(frozen=True)
class ReductionCheck:
    """Per-property verdicts for a reduced basis, with worst residuals."""

    a: bool
    b: bool
    c: bool
    d: bool
    e: bool
    span: bool
    staircase_residual: float
    span_angle: float
    details: tuple = ()

    @property
    def passed(self) -> bool:
        return self.a and self.b and self.c and self.d and self.e and self.span

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "e": self.e, "span": self.span,
                "passed": self.passed, "staircase_residual": self.staircase_residual,
                "span_angle": self.span_angle, "details": list(self.details)}


def _slot_rank(vals: np.ndarray, tol: float, ref: float) -> int:
    if vals.size == 0:
        return 0
    if float(np.max(np.abs(vals))) <= tol * ref:
        return 0
    sv = np.linalg.svd(vals, compute_uv=False)
    return int(np.sum(sv > tol * max(sv[0], ref)))


def verify_reduction(rb: ReducedBasis, view: ChiView, original, tol: float = 1e-9,
                     span_tol: float = 1e-8) -> ReductionCheck:
    """Recheck every staircase property of ``rb`` from the vectors alone."""
    N, rho = view.ambient_dim, view.rho
    Y = np.atleast_2d(np.asarray(rb.vectors, dtype=float)).reshape(-1, N)
    X = _as_basis(original, N)
    m = Y.shape[0]
    kappa = list(rb.kappa)
    details = []
    ref = max(float(np.max(np.abs(Y))) if Y.size else 1.0, 1e-300)

    a = len(kappa) == rho + 1 and kappa[0] == 1
    if not a:
        details.append(f"(a) kappa_0={kappa[0] if kappa else None}, len={len(kappa)}")

    b = len(rb.lambda_dims) == rho and len(kappa) == rho + 1
    if b:
        for i in range(rho):
            lo = kappa[i] - 1
            slot = Y[lo:, view.slices[rho - i - 1]] if 0 <= lo <= m else np.zeros((0, 1))
            dim = _slot_rank(slot, tol, ref)
            if kappa[i + 1] != kappa[i] + dim or rb.lambda_dims[i] != dim:
                b = False
                details.append(f"(b) step {i}: kappa jump {kappa[i + 1] - kappa[i]}, "
                               f"recorded {rb.lambda_dims[i]}, recomputed dim {dim}")
    else:
        details.append("(b) kappa/lambda_dims lengths inconsistent with rho")

    c = True
    for i in range(min(rho, len(kappa) - 1)):
        piv = Y[kappa[i] - 1:kappa[i + 1] - 1, view.slices[rho - i - 1]]
        if piv.shape[0] and _slot_rank(piv, tol, ref) != piv.shape[0]:
            c = False
            details.append(f"(c) pivot set at step {i} is dependent")

    d = bool(kappa) and kappa[-1] == m + 1
    if not d:
        details.append(f"(d) kappa_rho={kappa[-1] if kappa else None}, m+1={m + 1}")

    worst = 0.0
    for p in range(1, min(rho, len(kappa) - 1) + 1):
        tail = Y[kappa[p] - 1:, view.slices[rho - p]]
        if tail.size:
            worst = max(worst, float(np.max(np.abs(tail))) / ref)
    e = worst <= tol
    if not e:
        details.append(f"(e) staircase residual {worst:.3e}")

    angle = np.pi / 2
    if m == X.shape[0] and m > 0:
        qx = np.linalg.qr(X.T)[0]
        qy = np.linalg.qr(Y.T)[0]
        angle = float(principal_angles(qx, qy)[0])
    elif m == X.shape[0] == 0:
        angle = 0.0
    span = angle < span_tol
    if not span:
        details.append(f"span: largest principal angle {angle:.3e}")
    return ReductionCheck(a, b, c, d, e, span, worst, angle, tuple(details))


def reduce_against(structure: JordanStructure, basis: Sequence, tol: float = 1e-10) -> ReducedBasis:
    return reduce(ChiView.of(structure), basis, tol)

