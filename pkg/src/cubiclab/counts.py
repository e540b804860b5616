"""Exact enumeration of simple and quasi-simple triangulations.

All counts are closed-form products of factorials, evaluated in exact
integer arithmetic; rationals are `fractions.Fraction`.  The asymptotic
constants that carry square-root factors are kept symbolic as
``rational * sqrt(6) / sqrt(pi)`` so nothing is rounded prematurely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "count_simple_polygon",
    "count_simple_sphere",
    "count_quasi_simple",
    "partition_function_Z",
    "theta",
    "kappa",
    "theta_series_coefficients",
    "growth_constant_simple",
    "growth_constant_quasi",
    "SqrtPiConstant",
    "quasi_upper_constant",
]

#: growth weight of simple triangulations: one inner vertex costs (256/27).
RHO_TRI = Fraction(27, 256)
#: inverse growth rate of Z(p) in the boundary length.
BETA_TRI = Fraction(9, 64)


def count_simple_polygon(n: int, p: int) -> int:
    """Number of simple triangulations of the p-gon with n inner vertices.

    Closed form: ``2 (2p-3)! / ((p-1)!(p-3)!) * (4n+2p-5)! / (n!(3n+2p-3)!)``.

    Raises:
        ValueError: if p < 3 or n < 0.
    """
    if p < 3:
        raise ValueError(f"boundary degree must be >= 3, got {p}")
    if n < 0:
        raise ValueError(f"inner vertex count must be >= 0, got {n}")
    a = 2 * math.factorial(2 * p - 3) // (math.factorial(p - 1) * math.factorial(p - 3))
    num = math.factorial(4 * n + 2 * p - 5)
    den = math.factorial(n) * math.factorial(3 * n + 2 * p - 3)
    val = Fraction(a * num, den)
    assert val.denominator == 1
    return int(val)


def count_simple_sphere(n: int) -> int:
    """Number of rooted simple triangulations of the sphere with n+2 vertices.

    Equals ``2/(n(n-1)) * C(4n-3, n-2)``; also equals
    ``count_simple_polygon(n-1, 3)``.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 (at least 4 vertices), got {n}")
    val = Fraction(2 * math.comb(4 * n - 3, n - 2), n * (n - 1))
    assert val.denominator == 1
    return int(val)


def count_quasi_simple(n: int, p: int) -> int:
    """Number of quasi-simple triangulations of the p-gon with n inner vertices.

    Closed form: ``(2p)! (4n+2p-5)! / ((p-1)! p! (n-1)! (3n+2p-3)!)``,
    valid for n >= 1.  n = 0 is refused: the pointed vertex must be an
    inner vertex, and the formula is only stated from n = 1 on.
    """
    if n < 1:
        raise ValueError(f"quasi-simple counts need n >= 1, got {n}")
    if p < 1:
        raise ValueError(f"boundary degree must be >= 1, got {p}")
    num = math.factorial(2 * p) * math.factorial(4 * n + 2 * p - 5)
    den = (
        math.factorial(p - 1)
        * math.factorial(p)
        * math.factorial(n - 1)
        * math.factorial(3 * n + 2 * p - 3)
    )
    val = Fraction(num, den)
    assert val.denominator == 1
    return int(val)


def partition_function_Z(p: int) -> Fraction:
    """Critical partition function of simple triangulations of the p-gon.

    ``Z(p) = (1/(p(2p-3))) (16/9)^(p-2) C(2(p-1), p-1)`` for p >= 3.
    By convention ``Z(2) = 1`` (the edge-triangulation), which is what the
    skeleton slot weights use for childless vertices.
    """
    if p == 2:
        return Fraction(1)
    if p < 3:
        raise ValueError(f"Z(p) defined for p >= 3 (plus Z(2)=1), got {p}")
    return (
        Fraction(1, p * (2 * p - 3))
        * Fraction(16, 9) ** (p - 2)
        * math.comb(2 * (p - 1), p - 1)
    )


def theta(k: int) -> Fraction:
    """Offspring weight of the skeleton branching process.

    ``theta(k) = (3/2) 4^-k (2k)! / (k! (k+2)!)`` for k >= 0.
    """
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    return Fraction(3, 2) * Fraction(1, 4**k) * Fraction(
        math.factorial(2 * k), math.factorial(k) * math.factorial(k + 2)
    )


def kappa(p: int) -> Fraction:
    """Boundary weight of the hull law: ``kappa(p) = p 4^-p C(2p, p)``."""
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    return Fraction(p, 4**p) * math.comb(2 * p, p)


def theta_series_coefficients(kmax: int) -> list[Fraction]:
    """Taylor coefficients of ``1 - (1 + 1/sqrt(1-x))^-2`` up to x^kmax.

    Independent oracle for :func:`theta`: the generating function identity
    ``sum_k theta(k) x^k = 1 - (1 + (1-x)^(-1/2))^-2`` is checked coefficient
    by coefficient in exact arithmetic.
    """
    n = kmax + 1
    # s = (1-x)^(-1/2) as exact binomial series.
    s = [Fraction(0)] * n
    s[0] = Fraction(1)
    for k in range(1, n):
        # coefficient of x^k in (1-x)^(-1/2): C(2k,k)/4^k
        s[k] = Fraction(math.comb(2 * k, k), 4**k)
    one_plus = s[:]
    one_plus[0] += 1
    inv = _series_inverse(one_plus, n)
    sq = _series_mul(inv, inv, n)
    out = [-c for c in sq]
    out[0] += 1
    return out


def _series_mul(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j in range(min(len(b), n - i)):
            if b[j]:
                out[i + j] += ai * b[j]
    return out


def _series_inverse(a: list[Fraction], n: int) -> list[Fraction]:
    if a[0] == 0:
        raise ZeroDivisionError("series has no inverse (zero constant term)")
    out = [Fraction(0)] * n
    out[0] = 1 / a[0]
    for k in range(1, n):
        acc = Fraction(0)
        for j in range(1, k + 1):
            if j < len(a) and a[j]:
                acc += a[j] * out[k - j]
        out[k] = -acc / a[0]
    return out


@dataclass(frozen=True)
class SqrtPiConstant:
    """A constant of the form ``coefficient * sqrt(6) / sqrt(pi)``.

    The asymptotic prefactors of triangulation counts all live in this
    one-dimensional basis, so an exact rational coefficient is enough.
    """

    coefficient: Fraction

    def __float__(self) -> float:
        return float(self.coefficient) * math.sqrt(6) / math.sqrt(math.pi)

    def __mul__(self, other):
        return SqrtPiConstant(self.coefficient * other)

    __rmul__ = __mul__


def growth_constant_simple(p: int) -> SqrtPiConstant:
    """Prefactor C*(p) in |T_{n,p}| ~ C*(p) (256/27)^n n^(-5/2).

    Exactly ``sqrt(3)/(64 sqrt(2 pi)) (p-2) C(2(p-1), p-1) (16/9)^(p-1)``,
    i.e. ``sqrt(6)/(128 sqrt(pi))`` times a rational.
    """
    if p < 3:
        raise ValueError(f"need p >= 3, got {p}")
    coeff = Fraction((p - 2) * math.comb(2 * (p - 1), p - 1), 128) * Fraction(16, 9) ** (p - 1)
    return SqrtPiConstant(coeff)


def growth_constant_quasi(p: int) -> SqrtPiConstant:
    """Prefactor C(p) in |Q_{n,p}| ~ C(p) (256/27)^n n^(-3/2).

    Exactly ``sqrt(3)/(32 sqrt(2 pi)) p C(2p, p) (16/9)^(p-1)``.
    """
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    coeff = Fraction(p * math.comb(2 * p, p), 64) * Fraction(16, 9) ** (p - 1)
    return SqrtPiConstant(coeff)


def quasi_upper_constant(n_max: int = 200, p_max: int = 10) -> float:
    """Smallest c with |Q_{n,p}| <= c C(p) n^(-3/2) (256/27)^n on the grid.

    Returns the empirical sup over n in [1..n_max], p in [1..p_max]; callers
    assert that enlarging the grid does not move it (uniform-bound check).
    """
    worst = 0.0
    for p in range(1, p_max + 1):
        cp = float(growth_constant_quasi(p))
        for n in range(1, n_max + 1):
            bound = cp * n ** (-1.5) * (256 / 27) ** n
            # work in logs to survive large n
            log_ratio = (
                math.log(count_quasi_simple(n, p))
                - math.log(cp)
                + 1.5 * math.log(n)
                - n * math.log(256 / 27)
            )
            worst = max(worst, math.exp(log_ratio))
            del bound
    return worst
