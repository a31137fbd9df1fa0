"""Gamma, Gauss hypergeometric series, double factorial and the H function.

``H(a, b, c, d; x)`` is the Mellin-Barnes integral

    H = 1/(2 pi i) int_C Gamma(a+s) Gamma(b-s) / (Gamma(c+s) Gamma(d-s)) x**(-s) ds

It is evaluated here through its residue sums, which reduce to a single
``2F1`` on either side of ``x = 1``; the contour integral itself is never
computed.
"""

from __future__ import annotations

import math

from scipy import special as sc

from dfforge.errors import UnsupportedParameterError

__all__ = ["gamma", "rgamma", "hyp2f1", "double_factorial", "H"]


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _is_nonnegative_integer(x: float, atol: float = 1e-12) -> bool:
    r = round(x)
    return r >= 0 and abs(x - r) <= atol


def gamma(x: float) -> float:
    if _is_nonpositive_integer(x):
        raise UnsupportedParameterError(f"Gamma has a pole at {x}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """``1 / Gamma(x)``, zero at the poles."""
    if _is_nonpositive_integer(x):
        return 0.0
    return 1.0 / math.gamma(x)


def hyp2f1(a: float, b: float, c: float, x: float, *, rtol: float = 1e-16,
           max_terms: int = 100_000) -> float:
    """Gauss hypergeometric function for ``|x| < 1``.

    The power series is summed directly for ``|x| <= 0.9``; closer to the unit
    circle it converges too slowly and scipy's transformed evaluation is used.
    """
    if not abs(x) < 1:
        raise UnsupportedParameterError(f"series for 2F1 requires |x| < 1, got {x}")
    if _is_nonpositive_integer(c):
        raise UnsupportedParameterError(f"2F1 undefined for c = {c}")
    if abs(x) > 0.9:
        val = float(sc.hyp2f1(a, b, c, x))
        if not math.isfinite(val):
            raise ArithmeticError(f"2F1({a}, {b}; {c}; {x}) is not finite")
        return val
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x
        total += term
        if term == 0.0 or abs(term) <= rtol * abs(total):
            return total
    raise ArithmeticError(f"2F1 series did not converge in {max_terms} terms at x={x}")


def double_factorial(n: int) -> int:
    """``n!! = n (n-2) (n-4) ...``; ``0!! = 1`` (and ``(-1)!! = 1``)."""
    if n < -1 or int(n) != n:
        raise ValueError(f"double factorial needs an integer >= -1, got {n}")
    out = 1
    for k in range(int(n), 0, -2):
        out *= k
    return out


def H(a: float, b: float, c: float, d: float, x: float) -> float:
    """Dejonghe's ``H(a, b, c, d; x)`` via the closed-form case split.

    Cases where ``a + d`` or ``b + c`` is a negative integer are excluded, as is
    the point ``x = 1`` that separates the two residue series.
    """
    for name, v in (("a+d", a + d), ("b+c", b + c)):
        if v < 0 and float(v).is_integer():
            raise UnsupportedParameterError(f"H undefined when {name} = {v:g} is a negative integer")
    if x < 0:
        raise UnsupportedParameterError(f"H requires x >= 0, got {x}")
    if x < 1:
        if _is_nonnegative_integer(a - c):
            return 0.0
        return (x**a * hyp2f1(a + b, 1 + a - c, a + d, x)
                * gamma(a + b) * rgamma(c - a) * rgamma(a + d))
    if x > 1:
        if _is_nonnegative_integer(b - d):
            return 0.0
        return (x ** (-b) * hyp2f1(a + b, 1 + b - d, b + c, 1.0 / x)
                * gamma(a + b) * rgamma(d - b) * rgamma(b + c))
    raise UnsupportedParameterError("H is not evaluated at x = 1")
