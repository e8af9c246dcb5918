"""Operators built from (and decomposed into) real Jordan data.

``recover_structure`` is exact on matrices assembled by this package and on
well-separated perturbations of them.  Eigenvalues are grouped into clusters
(single linkage at ``cluster_tol``); each cluster's invariant subspace is split
off with a reordered real Schur form and its Jordan chains are read from the
ranks of powers of ``T_c - z I``.  Distinct eigenvalues closer than
``cluster_tol`` fall outside the supported class and raise
:class:`UnsupportedStructureError`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import (InvalidInputError, InvarianceViolationError, ModulusZeroError,
                     UnsupportedStructureError)
from .grassmann import Subspace, complement
from .matrix_core import CLASSICAL, REAL, BlockSpec, as_matrix, jordan_block


@dataclass(frozen=True, eq=False)
class JordanStructure:
    blocks: tuple
    transform: Optional[np.ndarray] = None
    scale: float = 1.0

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise InvalidInputError("a Jordan structure needs at least one block")
        object.__setattr__(self, "blocks", blocks)
        if self.transform is not None:
            p = as_matrix(self.transform, square=True, name="transform")
            if p.shape[0] != self.ambient_dim:
                raise InvalidInputError(f"transform is {p.shape[0]}x{p.shape[0]} but blocks occupy {self.ambient_dim}")
            object.__setattr__(self, "transform", p)

    @property
    def ambient_dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    @property
    def rho(self) -> int:
        return sum(b.rho for b in self.blocks)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def matrix(self) -> np.ndarray:
        """The Jordan-form matrix ``J``."""
        return assemble(self.blocks)

    def operator(self) -> np.ndarray:
        """``P J P^-1`` when a transform is attached, else ``J``."""
        j = self.matrix()
        if self.transform is None:
            return j
        return self.transform @ j @ np.linalg.inv(self.transform)

    def to_dict(self) -> dict:
        d = {"blocks": [b.to_dict() for b in self.blocks], "N": self.ambient_dim, "rho": self.rho}
        if self.transform is not None:
            d["transform"] = self.transform.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "JordanStructure":
        try:
            blocks = [BlockSpec.from_dict(b) for b in d["blocks"]]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError("Jordan structure JSON needs a 'blocks' list") from exc
        st = cls(tuple(blocks), d.get("transform"))
        if "N" in d and d["N"] != st.ambient_dim:
            raise InvalidInputError(f"declared N={d['N']} but blocks occupy {st.ambient_dim}")
        if "rho" in d and d["rho"] != st.rho:
            raise InvalidInputError(f"declared rho={d['rho']} but blocks sum to {st.rho}")
        return st


@dataclass(frozen=True)
class BoundReport:
    """Proven supercyclicity lower bounds for one operator.

    ``lower_bound_specific`` is the relative size: no n-supercyclic subspace
    exists for ``n < rho``.  ``lower_bound_universal`` is ``floor((N+1)/2)``,
    which holds for every operator on R^N.  Neither is claimed optimal.
    """

    ambient_dim: int
    relative_size: int
    lower_bound_specific: int
    lower_bound_universal: int
    excluded_up_to: int
    strong_nontrivial_excluded: bool
    notes: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"N": self.ambient_dim, "rho": self.relative_size,
                "specific": self.lower_bound_specific, "universal": self.lower_bound_universal,
                "excluded_up_to": self.excluded_up_to,
                "strong_nontrivial_excluded": self.strong_nontrivial_excluded,
                "notes": list(self.notes)}


def assemble(blocks: Sequence[BlockSpec], scalars: Optional[Sequence[float]] = None) -> np.ndarray:
    """Block-diagonal matrix of ``a_i * jordan_block(block_i)``."""
    blocks = list(blocks)
    if not blocks:
        raise InvalidInputError("cannot assemble an empty block list")
    if scalars is None:
        scalars = [1.0] * len(blocks)
    if len(scalars) != len(blocks):
        raise InvalidInputError(f"{len(scalars)} scalars for {len(blocks)} blocks")
    return scipy.linalg.block_diag(*[a * jordan_block(b) for a, b in zip(scalars, blocks)])


def example_operator(angles: Sequence[float], odd: bool = False) -> np.ndarray:
    """``diag(R(theta_1), ..., R(theta_k))``, plus a trailing ``[1]`` when ``odd``."""
    angles = list(angles)
    if not angles:
        raise InvalidInputError("need at least one angle")
    return assemble(example_blocks(angles, odd))


def example_blocks(angles: Sequence[float], odd: bool = False) -> list:
    blocks = [BlockSpec.real(1.0, float(t)) for t in angles]
    if odd:
        blocks.append(BlockSpec.classical(1.0))
    return blocks


def rationally_degenerate(angles: Sequence[float], max_coeff: int = 12, tol: float = 1e-9) -> bool:
    """Cheap screen for an obvious integer relation among ``{pi, theta_1, ...}``.

    Only small relations are detected: single angles that are rational
    multiples of pi with denominator up to ``max_coeff`` (including 0), and
    pairs with ``p*t1 - q*t2`` a multiple of pi.
    """
    angles = [float(t) for t in angles]
    for t in angles:
        for q in range(1, max_coeff + 1):
            x = q * t / math.pi
            if abs(x - round(x)) < tol:
                return True
    for i in range(len(angles)):
        for j in range(i + 1, len(angles)):
            for p in range(1, max_coeff + 1):
                for q in range(-max_coeff, max_coeff + 1):
                    if q == 0:
                        continue
                    x = (p * angles[i] - q * angles[j]) / math.pi
                    if abs(x - round(x)) < tol:
                        return True
    return False


def bounds(structure: JordanStructure) -> BoundReport:
    N = structure.ambient_dim
    rho = structure.rho
    universal = (N + 1) // 2
    excluded = rho - 1
    notes = []
    b = structure.blocks
    if len(b) == 1 and b[0].kind == REAL and b[0].rho >= 2:
        # a single real Jordan block of relative size k is not k-supercyclic either
        excluded = rho
        notes.append(f"single real Jordan block: not {rho}-supercyclic; optimal constant unknown")
    notes.append(f"no n-supercyclic subspace for n < {rho}")
    return BoundReport(N, rho, rho, universal, excluded, N >= 3, tuple(notes))


def normalized(structure: JordanStructure) -> JordanStructure:
    """Rescale so the largest block modulus is 1; the factor is kept in ``scale``."""
    m = max(abs(b.modulus) for b in structure.blocks)
    blocks = tuple(BlockSpec(b.kind, b.modulus / m, b.angle, b.rho) for b in structure.blocks)
    return JordanStructure(blocks, structure.transform, structure.scale / m)


def sort_blocks(blocks: Sequence[BlockSpec]) -> list:
    """|modulus| ascending, classical before real, then rho descending."""
    return sorted(blocks, key=sort_key)


# -- structure recovery ------------------------------------------------------

def _clusters(eigs: np.ndarray, radius: float) -> list:
    """Single-linkage groups of eigenvalues (indices), upper half-plane only."""
    idx = [i for i, z in enumerate(eigs) if z.imag >= -radius]
    groups: list = []
    for i in idx:
        hits = [g for g in groups if any(abs(eigs[i] - eigs[j]) < radius for j in g)]
        merged = [i]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    return groups


def _rank(a: np.ndarray, thresh: float) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > thresh))


def _null_basis(a: np.ndarray, thresh: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(a)
    r = int(np.sum(s > thresh))
    return vh[r:].conj().T


def _jordan_chains(A: np.ndarray, alg_mult: int, thresh_for, label: str) -> list:
    """Jordan chains of the (numerically) nilpotent part of ``A`` on its kernel tower.

    Returns a list of chains ``[v_1, ..., v_k]`` with ``A v_1 = 0`` and
    ``A v_j = v_{j-1}``, longest first.
    """
    d = A.shape[0]
    powers = [np.eye(d, dtype=A.dtype)]
    ranks = [d]
    for k in range(1, alg_mult + 2):
        powers.append(powers[-1] @ A)
        ranks.append(_rank(powers[-1], thresh_for(k)))
    if ranks[-1] != d - alg_mult or ranks[-2] != ranks[-1]:
        raise UnsupportedStructureError(
            f"eigenvalue cluster {label}: kernel ranks {ranks} do not settle at {d - alg_mult}; "
            "eigenvalues inside the cluster are not numerically equal")
    depth = next(k for k in range(1, len(ranks)) if ranks[k] == ranks[-1])
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, depth + 1)]  # chains of length >= k
    if any(a < b for a, b in zip(at_least, at_least[1:])):
        raise UnsupportedStructureError(
            f"eigenvalue cluster {label}: kernel ranks {ranks} are not those of a nilpotent matrix")
    kernels = [np.zeros((d, 0), dtype=A.dtype)] + [
        _null_basis(powers[k], thresh_for(k)) for k in range(1, depth + 1)]
    chains: list = []
    for k in range(depth, 0, -1):
        exactly = at_least[k - 1] - (at_least[k] if k < depth else 0)
        if exactly == 0:
            continue
        # level-k vectors already used by longer chains
        used = [c[k - 1] for c in chains]
        basis = np.column_stack([kernels[k - 1]] + [u[:, None] for u in used]) if used else kernels[k - 1]
        if basis.shape[1]:
            q, _ = np.linalg.qr(basis)
            cand = kernels[k] - q @ (q.conj().T @ kernels[k])
        else:
            cand = kernels[k]
        u, s, _ = np.linalg.svd(cand, full_matrices=False)
        if u.shape[1] < exactly or (exactly and s[exactly - 1] <= 1e-6 * max(s[0], 1e-300)):
            raise UnsupportedStructureError(f"eigenvalue cluster {label}: cannot complete Jordan chains")
        for t in range(exactly):
            top = u[:, t]
            chain = [top]
            for _ in range(k - 1):
                chain.append(A @ chain[-1])
            chains.append(chain[::-1])
    chains.sort(key=len, reverse=True)
    return chains


def recover_structure(T, tol: float = 1e-8, cluster_tol: Optional[float] = None) -> JordanStructure:
    """Real Jordan structure ``T = P J P^-1`` with ``J`` in the repeated-superdiagonal form.

    Blocks come back sorted by |modulus|, classical first on ties, then
    relative size descending.  Real-block angles lie in (0, pi).
    """
    T = as_matrix(T, square=True, name="operator")
    N = T.shape[0]
    scale = max(1.0, float(np.linalg.norm(T, 2)))
    eigs = np.linalg.eigvals(T)
    if cluster_tol is None:
        # the spectral radius, not ||T||: a badly conditioned similarity inflates the norm
        cluster_tol = 1e-2 * max(1.0, float(np.max(np.abs(eigs))))
    small = [z for z in eigs if abs(z) < tol * scale]
    if small:
        raise ModulusZeroError(f"operator has an eigenvalue of modulus {abs(small[0]):.3e} (< tol)")

    pieces = []  # (BlockSpec, columns N x dim)
    for group in _clusters(eigs, cluster_tol):
        zs = eigs[group]
        z = complex(np.mean(zs))
        is_real = abs(z.imag) < cluster_tol
        label = f"around {z.real:.6g}{z.imag:+.6g}i"
        mult = len(group)

        def select(re, im, z=z, r=cluster_tol + 2 * float(np.max(np.abs(zs - z)))):
            w = complex(re, im)
            return abs(w - z) < r or abs(w - z.conjugate()) < r

        try:
            tz, qz, sdim = scipy.linalg.schur(T, output="real", sort=select)
        except np.linalg.LinAlgError as exc:
            raise UnsupportedStructureError(f"eigenvalue cluster {label}: Schur reordering failed ({exc})") from exc
        dim_c = mult if is_real else 2 * mult
        if sdim != dim_c:
            raise UnsupportedStructureError(
                f"eigenvalue cluster {label}: Schur reordering isolated {sdim} eigenvalues, expected {dim_c}")
        V = qz[:, :dim_c]
        Tc = tz[:dim_c, :dim_c]
        csc = max(1.0, float(np.linalg.norm(Tc, 2)))

        def thresh_for(k, csc=csc):
            return tol * csc ** k

        if is_real:
            mu = float(np.trace(Tc)) / dim_c
            A = Tc - mu * np.eye(dim_c)
            chains = _jordan_chains(A, dim_c, thresh_for, label)
            for chain in chains:
                k = len(chain)
                cols = np.column_stack([mu ** j * chain[j] for j in range(k)])
                pieces.append((BlockSpec.classical(mu, k), V @ cols))
        else:
            ev = np.linalg.eigvals(Tc)
            zc = complex(np.mean(ev[ev.imag > 0]))
            if zc.imag < 0:
                zc = zc.conjugate()
            # keep only the eigenvalues near zc so the chain analysis sees a nilpotent part
            rz = cluster_tol + 2 * float(np.max(np.abs(ev - zc) * (ev.imag > 0)))
            Tz, Z, sz = scipy.linalg.schur(Tc.astype(complex), output="complex",
                                           sort=lambda w, zc=zc, rz=rz: abs(w - zc) < rz)
            if sz != mult:
                raise UnsupportedStructureError(
                    f"eigenvalue cluster {label}: complex reordering isolated {sz} eigenvalues, expected {mult}")
            Vz = Z[:, :mult]
            Az = Tz[:mult, :mult] - zc * np.eye(mult)
            chains = [[Vz @ v for v in c] for c in _jordan_chains(Az, mult, thresh_for, label)]
            lam, theta = abs(zc), cmath.phase(zc)
            for chain in chains:
                k = len(chain)
                cols = []
                for j in range(k):
                    w = zc ** j * chain[j]
                    # w = p - i q  <=>  T [p q] = [p q] lam R(theta)
                    cols.append(w.real)
                    cols.append(-w.imag)
                pieces.append((BlockSpec.real(lam, theta, k), V @ np.column_stack(cols)))

    if sum(b.dim for b, _ in pieces) != N:
        raise UnsupportedStructureError(
            f"recovered blocks occupy {sum(b.dim for b, _ in pieces)} dimensions, expected {N}")
    order = sorted(range(len(pieces)), key=lambda i: sort_key(pieces[i][0]))
    blocks = tuple(pieces[i][0] for i in order)
    P = np.column_stack([pieces[i][1] for i in order])
    J = assemble(blocks)
    resid = float(np.max(np.abs(T @ P - P @ J)))
    pscale = float(np.max(np.abs(P))) * scale
    if resid > 1e3 * tol * pscale or np.linalg.cond(P) > 1.0 / tol:
        raise UnsupportedStructureError(f"similarity residual {resid:.3e} exceeds tolerance")
    return JordanStructure(blocks, P)


def sort_key(b: BlockSpec):
    return (abs(b.modulus), 0 if b.kind == CLASSICAL else 1, -b.rho, b.modulus, b.angle or 0.0)


# -- quotients ----------------------------------------------------------------

def invariance_residual(T: np.ndarray, K: Subspace) -> float:
    """``||(I - P_K) T K||_max``; zero iff ``T K`` lies in ``K``."""
    tk = T @ K.frame
    return float(np.max(np.abs(tk - K.frame @ (K.frame.T @ tk))))


def quotient_operator(T, K: Subspace, tol: float = 1e-9) -> np.ndarray:
    """Matrix of the induced map on ``R^N / K`` in the coordinates of ``complement(K)``.

    Cosets are represented by their component orthogonal to ``K``; with
    ``C = complement(K).frame`` the induced operator is ``C^T T C``.
    """
    T = as_matrix(T, square=True, name="operator")
    if K.ambient_dim != T.shape[0]:
        raise InvalidInputError(f"subspace lives in R^{K.ambient_dim}, operator acts on R^{T.shape[0]}")
    resid = invariance_residual(T, K)
    if resid > tol * max(1.0, float(np.max(np.abs(T)))):
        raise InvarianceViolationError(resid)
    C = complement(K).frame
    return C.T @ T @ C
