"""Gauss hypergeometric polynomials with exact rational coefficients.

The spherical functions of rank-1 symmetric spaces are terminating
hypergeometric series F(A+n, -n, c, x): with second parameter -n the term
recurrence stops after n steps, so the function is a degree-n polynomial
and each coefficient is rational whenever A and c are.  Coefficients are
kept as ``fractions.Fraction`` end to end; floating point enters only when
a polynomial is evaluated along the radial ray.  Exactness is load-bearing:
the centrality certificates in :mod:`qflat.flatness` compare these
coefficients against closed-form gamma-ratio products as rationals, with no
tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .spaces import RootData, chi_params

__all__ = [
    "RationalPoly",
    "hypergeom_poly",
    "closed_coeffs",
    "eval_fchi",
    "horner_compensated",
]

RationalLike = Union[int, Fraction]


def _require_not_nonpositive_integer(c: Fraction, name: str) -> None:
    if c.denominator == 1 and c <= 0:
        raise ValueError(f"{name} must not be a nonpositive integer, got {c}")


@dataclass(frozen=True)
class RationalPoly:
    """Dense polynomial over Q; index equals degree, constant term first."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("a polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval_exact(self, x: RationalLike) -> Fraction:
        """Horner evaluation in exact rational arithmetic."""
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        return horner_compensated(self.float_coeffs(), x)

    def float_coeffs(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coeffs)


def horner_compensated(coeffs: Sequence[float], x: float) -> float:
    """Horner scheme with compensated additions.

    Each step's addition error is captured with a two-sum and carried along
    (multiplied through by x); products are left uncompensated, which is
    enough at the condition numbers reached here.
    """
    s = coeffs[-1]
    e = 0.0
    for a in reversed(coeffs[:-1]):
        p = s * x
        t = p + a
        # two-sum residual of p + a
        bp = t - a
        e = e * x + ((p - bp) + (a - (t - bp)))
        s = t
    return s + e


def hypergeom_poly(A: RationalLike, n: int, c: RationalLike) -> RationalPoly:
    """Coefficients of F(A+n, -n, c, x) via the exact term recurrence.

    c_{j+1} = c_j (a+j)(b+j) / ((j+1)(c+j)) with a = A+n, b = -n; the factor
    (b+j) vanishes at j = n, so the series terminates at degree n.
    """
    if n < 0:
        raise ValueError(f"degree index must be nonnegative, got {n}")
    A = Fraction(A)
    cf = Fraction(c)
    _require_not_nonpositive_integer(cf, "c")
    a = A + n
    b = Fraction(-n)
    term = Fraction(1)
    coeffs = [term]
    for j in range(n):
        term = term * (a + j) * (b + j) / ((j + 1) * (cf + j))
        coeffs.append(term)
    return RationalPoly(tuple(coeffs))


def closed_coeffs(
    A: RationalLike, n: int, c: RationalLike
) -> tuple[Fraction | None, Fraction]:
    """Closed-form first and top coefficients of F(A+n, -n, c, x).

    c_{n,1} = (A+n)(-n)/c and c_{n,n} = (-1)^n prod_{j<n}(A+n+j) / prod_{j<n}(c+j),
    the gamma ratios Gamma(A+2n)/Gamma(A+n) and Gamma(c)/Gamma(c+n) written
    as finite rational products.  For n = 0 the linear coefficient does not
    exist and None is returned in its place.
    """
    if n < 0:
        raise ValueError(f"degree index must be nonnegative, got {n}")
    A = Fraction(A)
    cf = Fraction(c)
    _require_not_nonpositive_integer(cf, "c")
    if n == 0:
        return None, Fraction(1)
    c_n1 = Fraction(A + n) * (-n) / cf
    top = Fraction(-1) ** n
    for j in range(n):
        top *= A + n + j
        top /= cf + j
    return c_n1, top


def eval_fchi(space: RootData, n: int, t: float) -> float:
    """Spherical function along the radial ray, F_n(-sinh^2 t).

    Even in t; equals 1 at t = 0 for every n.
    """
    ch = chi_params(space, n)
    poly = hypergeom_poly(ch.A, n, ch.c)
    x = -math.sinh(t) ** 2
    return poly.eval_float(x)
