"""Dense real matrices, rotations and Jordan blocks.

Jordan blocks use the convention where the first (block) superdiagonal
repeats the diagonal entry: a classical block of modulus ``mu`` is
``mu * (I + S)`` with ``S`` the unit shift, and a real block is the block
analogue with ``lambda * R(theta)`` in every occupied position.  With this
convention the n-th power has the closed form ``binom(n, k) * A**n`` on the
k-th block superdiagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInputError, ModulusZeroError

CLASSICAL = "classical"
REAL = "real"


def as_matrix(a, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a finite 2-D float64 array."""
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name} must be square, got {m.shape[0]}x{m.shape[1]}")
    return m


@dataclass(frozen=True)
class BlockSpec:
    """One Jordan block: kind, modulus, angle (real kind only), relative size."""

    kind: str
    modulus: float
    angle: Optional[float] = None
    rho: int = 1

    def __post_init__(self):
        if self.kind not in (CLASSICAL, REAL):
            raise InvalidInputError(f"unknown block kind {self.kind!r}")
        if not math.isfinite(self.modulus):
            raise InvalidInputError("modulus must be finite")
        if self.modulus == 0:
            raise ModulusZeroError("Jordan block modulus must be non-zero")
        if self.kind == REAL:
            if self.angle is None or not math.isfinite(self.angle):
                raise InvalidInputError("real block needs a finite angle")
        elif self.angle is not None:
            raise InvalidInputError("classical block takes no angle")
        if isinstance(self.rho, bool) or int(self.rho) != self.rho or self.rho < 1:
            raise InvalidInputError(f"relative size must be a positive integer, got {self.rho!r}")
        object.__setattr__(self, "rho", int(self.rho))

    @classmethod
    def classical(cls, modulus: float, rho: int = 1) -> "BlockSpec":
        return cls(CLASSICAL, float(modulus), None, rho)

    @classmethod
    def real(cls, modulus: float, angle: float, rho: int = 1) -> "BlockSpec":
        return cls(REAL, float(modulus), float(angle), rho)

    @property
    def tau(self) -> int:
        return 1 if self.kind == CLASSICAL else 2

    @property
    def dim(self) -> int:
        return self.tau * self.rho

    def base(self) -> np.ndarray:
        """The diagonal entry ``A``: ``[[mu]]`` or ``lambda * R(theta)``."""
        if self.kind == CLASSICAL:
            return np.array([[self.modulus]])
        return self.modulus * rotation(self.angle)

    def base_power(self, n: int) -> np.ndarray:
        if self.kind == CLASSICAL:
            return np.array([[self.modulus ** n]])
        return self.modulus ** n * rotation(n * self.angle)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "modulus": self.modulus, "angle": self.angle, "rho": self.rho}

    @classmethod
    def from_dict(cls, d: dict) -> "BlockSpec":
        try:
            kind = d["kind"]
            modulus = float(d["modulus"])
            rho = d.get("rho", 1)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed block spec {d!r}") from exc
        angle = d.get("angle")
        return cls(kind, modulus, None if angle is None else float(angle), rho)


def rotation(theta: float) -> np.ndarray:
    if not math.isfinite(theta):
        raise InvalidInputError(f"rotation angle must be finite, got {theta!r}")
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def jordan_block(spec: BlockSpec) -> np.ndarray:
    t, r = spec.tau, spec.rho
    a = spec.base()
    out = np.zeros((t * r, t * r))
    for j in range(r):
        out[t * j:t * (j + 1), t * j:t * (j + 1)] = a
        if j + 1 < r:
            out[t * j:t * (j + 1), t * (j + 1):t * (j + 2)] = a
    return out


def binomial_float(n: int, k: int) -> float:
    # multiplicative rule, no factorials
    if k < 0 or k > n:
        return 0.0
    k = min(k, n - k)
    acc = 1.0
    for j in range(1, k + 1):
        acc = acc * (n - k + j) / j
    return acc


def jordan_block_power(spec: BlockSpec, n: int, *, exact: bool = False) -> np.ndarray:
    """Closed-form ``jordan_block(spec) ** n``.

    ``exact=True`` takes the binomial coefficients as exact integers
    (``math.comb``) and rounds only once when scaling ``A**n``; the default
    float path uses the multiplicative rule, relative error about ``k * eps``.
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise InvalidInputError(f"power must be a non-negative integer, got {n!r}")
    n = int(n)
    t, r = spec.tau, spec.rho
    an = spec.base_power(n)
    out = np.zeros((t * r, t * r))
    for k in range(min(r, n + 1)):
        c = float(math.comb(n, k)) if exact else binomial_float(n, k)
        block = c * an
        for j in range(r - k):
            out[t * j:t * (j + 1), t * (j + k):t * (j + k + 1)] = block
    return out


def matrix_power(T, n: int) -> np.ndarray:
    """``T**n`` by repeated squaring; ``T**0`` is the identity."""
    T = as_matrix(T, square=True)
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise InvalidInputError(f"power must be a non-negative integer, got {n!r}")
    return np.linalg.matrix_power(T, int(n))


def standard_jordan_block(spec: BlockSpec) -> np.ndarray:
    """Textbook block: ``A`` on the diagonal, identity on the superdiagonal."""
    t, r = spec.tau, spec.rho
    out = np.zeros((t * r, t * r))
    a = spec.base()
    for j in range(r):
        out[t * j:t * (j + 1), t * j:t * (j + 1)] = a
        if j + 1 < r:
            out[t * j:t * (j + 1), t * (j + 1):t * (j + 2)] = np.eye(t)
    return out


def convention_transform(spec: BlockSpec) -> np.ndarray:
    """``D = blockdiag(I, A, A**2, ...)`` with ``D^-1 @ standard @ D == jordan_block``.

    ``A`` commutes with itself, so conjugating by ``D`` turns every identity on
    the superdiagonal into ``A`` and leaves the diagonal alone.  Invertible
    because the modulus is non-zero.
    """
    t, r = spec.tau, spec.rho
    out = np.zeros((t * r, t * r))
    for j in range(r):
        out[t * j:t * (j + 1), t * j:t * (j + 1)] = spec.base_power(j)
    return out


def to_standard_convention(spec: BlockSpec) -> np.ndarray:
    d = convention_transform(spec)
    return d @ jordan_block(spec) @ np.linalg.inv(d)
