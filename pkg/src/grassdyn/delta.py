"""Exact rational polynomials in ``i`` behind the binomial telescoping identity.

``delta_poly(n)`` is defined by the triangular recursion

    Delta_n(i) = binom(i, n) - sum_{k=1}^{n-1} Delta_k(i) * binom(i, n - k)

and has degree ``n`` with leading coefficient ``(-1)**(n+1) / n!``.  The sums
``L_k = sum_{j=0}^{n-k} binom(i, j) u_{k+j}`` then satisfy
``L_k = u_k + sum_{j=1}^{n-k} Delta_j(i) L_{k+j}``.  Everything here is exact
(``fractions.Fraction``); floating point would hide the cancellations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import InvalidInputError, PreconditionError


@dataclass(frozen=True)
class RationalPolynomial:
    """Dense polynomial with ``Fraction`` coefficients, ascending degree."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Fraction:
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return RationalPolynomial(tuple((a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0)
                                        for k in range(n)))

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "RationalPolynomial":
        if not isinstance(other, RationalPolynomial):
            return RationalPolynomial(tuple(c * Fraction(other) for c in self.coefficients))
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return RationalPolynomial(())
        # integer convolution over common denominators; Fraction-by-Fraction is far slower
        da = math.lcm(*(c.denominator for c in a))
        db = math.lcm(*(c.denominator for c in b))
        ia = [c.numerator * (da // c.denominator) for c in a]
        ib = [c.numerator * (db // c.denominator) for c in b]
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(ia):
            for j, y in enumerate(ib):
                out[i + j] += x * y
        return RationalPolynomial(tuple(Fraction(c, da * db) for c in out))

    __rmul__ = __mul__

    def as_strings(self) -> list:
        return [str(c) for c in self.coefficients] or ["0"]

    def __str__(self):
        if not self.coefficients:
            return "0"
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            mono = "" if k == 0 else ("i" if k == 1 else f"i^{k}")
            coef = str(c) if (k == 0 or abs(c) != 1) else ("-" if c < 0 else "")
            terms.append(f"{coef}{'*' if coef not in ('', '-') and mono else ''}{mono}")
        return " + ".join(terms).replace("+ -", "- ")


@lru_cache(maxsize=None)
def binomial_poly(n: int) -> RationalPolynomial:
    """``i (i-1) ... (i-n+1) / n!`` as a polynomial in ``i``."""
    if n < 0:
        raise InvalidInputError(f"n must be non-negative, got {n}")
    p = RationalPolynomial((1,))
    for j in range(n):
        p = p * RationalPolynomial((-j, 1))
    return p * Fraction(1, math.factorial(n))


@lru_cache(maxsize=None)
def delta_poly(n: int) -> RationalPolynomial:
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    p = binomial_poly(n)
    for k in range(1, n):
        p = p - delta_poly(k) * binomial_poly(n - k)
    return p


def delta_leading_law(n: int) -> Fraction:
    return Fraction((-1) ** (n + 1), math.factorial(n))


def alternating_binomial_sum(n: int) -> int:
    """``sum_{k=1}^{n-1} binom(n, k) (-1)**(k+1)``: 0 for odd n, 2 for even n."""
    return sum(math.comb(n, k) * (-1) ** (k + 1) for k in range(1, n))


@dataclass(frozen=True)
class LIdentityReport:
    holds: bool
    residuals: tuple
    lhs: tuple
    rhs: tuple
    hypothesis_met: bool


def check_L_identity(u: Sequence, i: int, *, allow_small_i: bool = False) -> LIdentityReport:
    """Evaluate both sides of the ``L_k`` identity exactly for ``k = 1..n``.

    ``i < n`` violates the stated hypothesis; pass ``allow_small_i=True`` to
    evaluate anyway (the report carries ``hypothesis_met=False``).
    """
    u = [Fraction(x) for x in u]
    n = len(u)
    if n < 1:
        raise InvalidInputError("u must be non-empty")
    if int(i) != i or i < 0:
        raise InvalidInputError(f"i must be a non-negative integer, got {i!r}")
    i = int(i)
    met = i >= n
    if not met and not allow_small_i:
        raise PreconditionError(f"identity is stated for i >= n; got i={i}, n={n}")
    # L[k] for k = 1..n stored at index k-1
    L = [sum((math.comb(i, j) * u[k - 1 + j] for j in range(n - k + 1)), Fraction(0))
         for k in range(1, n + 1)]
    d = [delta_poly(j)(i) for j in range(1, n)]
    rhs = [u[k - 1] + sum((d[j - 1] * L[k - 1 + j] for j in range(1, n - k + 1)), Fraction(0))
           for k in range(1, n + 1)]
    res = tuple(a - b for a, b in zip(L, rhs))
    return LIdentityReport(all(r == 0 for r in res), res, tuple(L), tuple(rhs), met)
