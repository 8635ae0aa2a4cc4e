"""Polynomials and hypergeometric series.

Exact integer-coefficient polynomials (:class:`IntPolynomial`) carry every
algebraic identity used elsewhere in the package; floating point only enters
at the final evaluation.  The hypergeometric routines are plain power series
with explicit convergence control.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import zip_longest

import numpy as np

from .errors import DomainError, SeriesError

MAX_TERMS = 10_000


class IntPolynomial:
    """Polynomial with exact integer coefficients, ascending degree order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = list(coeffs)
        c = [int(v) for v in coeffs]
        for v, orig in zip(c, coeffs):
            if v != orig:
                raise ValueError(f"non-integer coefficient {orig!r}")
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "IntPolynomial":
        return cls([0] * degree + [coeff])

    @classmethod
    def constant(cls, value: int) -> "IntPolynomial":
        return cls([value])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPolynomial([other])
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def _coerce(self, other):
        if isinstance(other, IntPolynomial):
            return other
        if isinstance(other, int):
            return IntPolynomial([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return IntPolynomial(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(-a for a in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = IntPolynomial([1])
        for _ in range(n):
            out = out * self
        return out

    def deriv(self, order: int = 1) -> "IntPolynomial":
        c = list(self.coeffs)
        for _ in range(order):
            c = [k * c[k] for k in range(1, len(c))]
        return IntPolynomial(c)

    def __call__(self, x):
        """Horner evaluation; works for ints, Fractions, floats and arrays."""
        if not self.coeffs:
            return 0 * x
        acc = self.coeffs[-1]
        if isinstance(x, np.ndarray):
            acc = np.full_like(x, float(acc), dtype=np.result_type(x, float))
            for a in reversed(self.coeffs[:-1]):
                acc = acc * x + float(a)
            return acc
        for a in reversed(self.coeffs[:-1]):
            acc = acc * x + a
        return acc

    def content(self) -> int:
        g = 0
        for a in self.coeffs:
            g = math.gcd(g, a)
        return g

    def primitive(self) -> tuple[int, "IntPolynomial"]:
        """Split into ``(content, primitive part)`` with positive leading coefficient."""
        if self.is_zero():
            return 0, self
        g = self.content()
        if self.leading < 0:
            g = -g
        return g, IntPolynomial(a // g for a in self.coeffs)

    def is_even(self) -> bool:
        return all(a == 0 for a in self.coeffs[1::2])

    def is_odd(self) -> bool:
        return all(a == 0 for a in self.coeffs[0::2])

    def divmod_rational(self, other: "IntPolynomial") -> tuple[list, list]:
        """Long division over the rationals; returns Fraction coefficient lists."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(a) for a in self.coeffs]
        quo = [Fraction(0)] * max(len(rem) - other.degree, 1)
        lead = Fraction(other.leading)
        for k in range(len(rem) - 1, other.degree - 1, -1):
            q = rem[k] / lead
            if q:
                quo[k - other.degree] = q
                for j, b in enumerate(other.coeffs):
                    rem[k - other.degree + j] -= q * b
        while rem and rem[-1] == 0:
            rem.pop()
        return quo, rem

    def exact_div(self, other: "IntPolynomial") -> "IntPolynomial":
        """Quotient ``self / other``; raises if the division leaves a remainder
        or a non-integer coefficient."""
        quo, rem = self.divmod_rational(other)
        if rem:
            raise ArithmeticError("polynomial division is not exact")
        if any(q.denominator != 1 for q in quo):
            raise ArithmeticError("quotient has non-integer coefficients")
        return IntPolynomial(int(q) for q in quo)

    def to_numpy(self) -> np.ndarray:
        """Float coefficients, ascending order (numpy.polynomial convention)."""
        return np.array([float(a) for a in self.coeffs]) if self.coeffs else np.zeros(1)

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            a = self.coeffs[k]
            if a == 0:
                continue
            mag = abs(a)
            body = "" if (mag == 1 and k > 0) else str(mag)
            if k >= 1:
                body += "z" if k == 1 else f"z^{k}"
            sign = "-" if a < 0 else "+"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


Z = IntPolynomial([0, 1])


def poly_gcd(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """Primitive greatest common divisor with positive leading coefficient."""
    a = [Fraction(v) for v in p.coeffs]
    b = [Fraction(v) for v in q.coeffs]

    def to_int(coeffs):
        if not coeffs:
            return IntPolynomial()
        den = 1
        for c in coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return IntPolynomial(int(c * den) for c in coeffs).primitive()[1]

    while b:
        _, rem = to_int(a).divmod_rational(to_int(b))
        a, b = b, rem
    return to_int(a)


# ---------------------------------------------------------------------------
# Hermite families

@lru_cache(maxsize=None)
def hermite_poly(n: int) -> IntPolynomial:
    """Physicists' Hermite polynomial H_n in exact coefficient form."""
    if n < 0:
        raise DomainError(f"Hermite index must be >= 0, got {n}")
    if n == 0:
        return IntPolynomial([1])
    if n == 1:
        return IntPolynomial([0, 2])
    return 2 * Z * hermite_poly(n - 1) - 2 * (n - 1) * hermite_poly(n - 2)


@lru_cache(maxsize=None)
def pseudo_hermite_poly(m: int) -> IntPolynomial:
    """Pseudo-Hermite polynomial, m! * sum_p (2z)^(m-2p) / (p! (m-2p)!).

    Index -1 returns the zero polynomial so that terms like ``2m * H_{m-1}``
    can be written uniformly.
    """
    if m == -1:
        return IntPolynomial()
    if m < 0:
        raise DomainError(f"pseudo-Hermite index must be >= 0, got {m}")
    coeffs = [0] * (m + 1)
    for p in range(m // 2 + 1):
        k = m - 2 * p
        coeffs[k] = math.factorial(m) // (math.factorial(p) * math.factorial(k)) * 2**k
    return IntPolynomial(coeffs)


def imaginary_substitution(p: IntPolynomial) -> tuple[IntPolynomial, IntPolynomial]:
    """Real and imaginary coefficient parts of ``p(i z)``."""
    re, im = [], []
    for k, a in enumerate(p.coeffs):
        unit = (1, 0, -1, 0)[k % 4], (0, 1, 0, -1)[k % 4]
        re.append(a * unit[0])
        im.append(a * unit[1])
    return IntPolynomial(re), IntPolynomial(im)


def hermite(n: int, z):
    """H_n(z) by the three-term recurrence."""
    if n < 0:
        raise DomainError(f"Hermite index must be >= 0, got {n}")
    z = np.asarray(z, dtype=float)
    h_prev, h = np.ones_like(z), 2.0 * z
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    for k in range(1, n):
        h_prev, h = h, 2.0 * z * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def pseudo_hermite(m: int, z):
    """Pseudo-Hermite polynomial by its recurrence (all terms positive for z > 0)."""
    if m < 0:
        raise DomainError(f"pseudo-Hermite index must be >= 0, got {m}")
    z = np.asarray(z, dtype=float)
    h_prev, h = np.ones_like(z), 2.0 * z
    if m == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    for k in range(1, m):
        h_prev, h = h, 2.0 * z * h + 2.0 * k * h_prev
    return h if h.ndim else float(h)


# ---------------------------------------------------------------------------
# Hypergeometric series

def _is_nonpositive_integer(v) -> bool:
    v = complex(v)
    return v.imag == 0 and v.real <= 0 and float(v.real).is_integer()


def _series(num_params, den_param, x, what):
    """sum_n prod (a)_n / ((b)_n n!) x^n with term-ratio convergence control."""
    term = 1.0 + 0.0j
    total = term
    small = 0
    for n in range(MAX_TERMS):
        ratio = x / ((den_param + n) * (n + 1))
        for a in num_params:
            ratio *= a + n
        term = term * ratio
        if term == 0:
            return total
        total += term
        if abs(term) <= 1e-17 * max(abs(total), 1e-300):
            small += 1
            # keep going past transient dips while the terms still grow
            if small >= 2 and abs(ratio) < 1:
                return total
        else:
            small = 0
    raise SeriesError(f"{what} series did not converge in {MAX_TERMS} terms "
                      f"(params={num_params}, {den_param}; argument={x})")


def _real_if_possible(value, *inputs):
    if all(np.isrealobj(v) and not isinstance(v, complex) for v in inputs):
        return float(value.real)
    return complex(value)


def kummer_1f1(a, b, z, transform: bool = True):
    """Confluent hypergeometric function 1F1(a; b; z).

    Arguments with negative real part are evaluated through the Kummer
    transformation 1F1(a; b; z) = e^z 1F1(b - a; b; -z) unless the series
    terminates, which avoids the cancellation of an alternating series.
    ``transform=False`` forces the plain series (accurate only for modest |z|).
    """
    if _is_nonpositive_integer(b):
        raise DomainError(f"1F1 denominator parameter is a non-positive integer: {b}")
    if _is_nonpositive_integer(a):
        value = _series((complex(a),), complex(b), complex(z), "1F1")
    elif transform and complex(z).real < 0:
        value = np.exp(complex(z)) * _series((complex(b) - complex(a),), complex(b), -complex(z), "1F1")
    else:
        value = _series((complex(a),), complex(b), complex(z), "1F1")
    return _real_if_possible(value, a, b, z)


def gauss_2f1(a, b, c, x):
    """Gauss hypergeometric function 2F1(a, b; c; x) for |x| < 1.

    The Pfaff transformation 2F1(a, b; c; x) = (1-x)^(-a) 2F1(a, c-b; c; x/(x-1))
    is applied whenever it shrinks the series argument.
    """
    if _is_nonpositive_integer(c):
        raise DomainError(f"2F1 denominator parameter is a non-positive integer: {c}")
    x_c = complex(x)
    if abs(x_c) >= 1:
        raise DomainError(f"2F1 argument outside the unit disc: {x}")
    a_c, b_c, c_c = complex(a), complex(b), complex(c)
    if x_c == 0:
        value = 1.0 + 0j
    elif (_is_nonpositive_integer(a) or _is_nonpositive_integer(b)
          or abs(x_c / (x_c - 1)) >= abs(x_c)):
        value = _series((a_c, b_c), c_c, x_c, "2F1")
    else:
        value = (1 - x_c) ** (-a_c) * _series((a_c, c_c - b_c), c_c, x_c / (x_c - 1), "2F1")
    return _real_if_possible(value, a, b, c, x)


class RationalFunction:
    """Quotient of two :class:`IntPolynomial` objects.

    Equality is decided by cross multiplication, so no reduction is needed
    for identity checks; :meth:`reduced` cancels the common factor.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, int):
            num = IntPolynomial([num])
        if den is None:
            den = IntPolynomial([1])
        elif isinstance(den, int):
            den = IntPolynomial([den])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = num, den

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (int, IntPolynomial)):
            return RationalFunction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def deriv(self) -> "RationalFunction":
        return RationalFunction(self.num.deriv() * self.den - self.num * self.den.deriv(),
                                self.den * self.den)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def reduced(self) -> "RationalFunction":
        g = poly_gcd(self.num, self.den) if not self.num.is_zero() else self.den
        num, den = self.num.exact_div(g) if not self.num.is_zero() else IntPolynomial(), self.den.exact_div(g)
        if den.leading < 0:
            num, den = -num, -den
        return RationalFunction(num, den)

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __repr__(self):
        return f"RationalFunction(({self.num}) / ({self.den}))"
