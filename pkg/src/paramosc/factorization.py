"""Seeds, superpotentials and the rationally extended potentials.

All quantities depend on position only through z = (x + gamma)/sigma.  The
deformation of the k-th potential is D_k(z)/sigma^2 with D_k a constant plus
twice an exact :class:`RationalTerm`:

    one step, seed exp(z^2/2) H_m :   D_1 = -2 + 2 R[H_m]
    two steps, Wronskian seed g   :   D_2 = -4 + 2 R[g]
    shape invariant (eps = 1)     :   D_1 = +2

where R[p] = -d^2/dz^2 ln p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, NodeError
from .specfun import IntPolynomial, RationalFunction, Z, kummer_1f1, pseudo_hermite_poly


# ---------------------------------------------------------------------------
# Seed specifications

@dataclass(frozen=True)
class SeedSpec:
    """Factorization order plus pseudo-Hermite indices.

    order 0 is the bare oscillator.  Order 1 takes ``m`` (even) or the
    shape-invariant seed exp(-z^2/2); order 2 takes ``(m1, m2)`` normalized to
    m1 < m2 with ``swap_sign`` remembering whether the input was swapped.
    """

    order: int
    indices: tuple = ()
    shape_invariant: bool = False
    swap_sign: int = 1

    @classmethod
    def none(cls) -> "SeedSpec":
        return cls(0)

    @classmethod
    def one_step(cls, m: int) -> "SeedSpec":
        m = int(m)
        if m < 0:
            raise DomainError(f"seed index must be >= 0, got {m}")
        if m % 2:
            raise NodeError(f"H_{m} is odd and vanishes at z=0; one-step seeds need even m")
        return cls(1, (m,))

    @classmethod
    def shape_invariant_case(cls) -> "SeedSpec":
        return cls(1, (), shape_invariant=True)

    @classmethod
    def two_step(cls, m1: int, m2: int) -> "SeedSpec":
        m1, m2 = int(m1), int(m2)
        if min(m1, m2) < 0:
            raise DomainError("seed indices must be >= 0")
        if (m1 - m2) % 2 == 0:
            raise NodeError(f"indices ({m1}, {m2}) have equal parity; g has a real node")
        sign = 1
        if m1 > m2:
            m1, m2, sign = m2, m1, -1
        if m1 % 2:
            raise NodeError(f"after ordering, m1={m1} is odd: the intermediate one-step seed "
                            f"H_{m1} has a node, so the chain is singular")
        return cls(2, (m1, m2), swap_sign=sign)

    @property
    def m(self) -> int:
        if self.order != 1 or self.shape_invariant:
            raise DomainError("m is defined for pseudo-Hermite one-step specs only")
        return self.indices[0]

    @property
    def eps(self) -> tuple:
        """(eps1,) or (eps1, eps2)."""
        if self.order == 0:
            return ()
        if self.shape_invariant:
            return (1,)
        return tuple(-2 * m - 1 for m in self.indices)

    @property
    def tag(self) -> str:
        if self.order == 1 and not self.shape_invariant and self.indices[0] == 0:
            return "uniform-shift"  # H_0 = 1: potential shifted by -2/sigma^2
        if self.shape_invariant:
            return "shape-invariant"
        return ("oscillator", "one-step", "two-step")[self.order]

    def first_step(self) -> "SeedSpec":
        if self.order != 2:
            raise DomainError("first_step is defined for two-step specs")
        return SeedSpec(1, (self.indices[0],))

    def to_dict(self) -> dict:
        if self.order == 0:
            return {"order": 0}
        if self.shape_invariant:
            return {"order": 1, "shape_invariant": True}
        idx = list(self.indices)
        if self.swap_sign < 0:
            idx = idx[::-1]
        return {"order": self.order, "m": idx[0] if self.order == 1 else idx}

    @classmethod
    def from_dict(cls, d: dict) -> "SeedSpec":
        order = int(d.get("order", 0))
        if order == 0:
            return cls.none()
        if order == 1:
            if d.get("shape_invariant"):
                return cls.shape_invariant_case()
            return cls.one_step(d["m"])
        if order == 2:
            m1, m2 = d["m"]
            return cls.two_step(m1, m2)
        raise DomainError(f"factorization order must be 0, 1 or 2, got {order}")


# ---------------------------------------------------------------------------
# Seeds

@dataclass(frozen=True)
class PolySeed:
    """u(z) = exp(s z^2 / 2) p(z) with s = +1 or -1."""

    s: int
    poly: IntPolynomial
    eps: int

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        return np.exp(self.s * z * z / 2) * self.poly(z)

    def log_derivative(self) -> RationalFunction:
        """u'/u as an exact rational function."""
        p = self.poly
        return RationalFunction(self.s * Z * p + p.deriv(), p)

    def residual(self, z, h: float = 1e-2) -> np.ndarray:
        """|-u'' + z^2 u - eps u| / max|u| with an 8th-order second difference."""
        z = np.asarray(z, dtype=float)
        c = [-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560]
        upp = sum(cj * self(z + (j - 4) * h) for j, cj in enumerate(c)) / h**2
        u = self(z)
        return np.abs(-upp + z * z * u - self.eps * u) / np.max(np.abs(u))


def seed_u(m: int) -> PolySeed:
    """exp(z^2/2) H_m(z), eigenvalue eps = -2m - 1."""
    if m < 0:
        raise DomainError(f"seed index must be >= 0, got {m}")
    return PolySeed(1, pseudo_hermite_poly(m), -2 * m - 1)


def shape_invariant_seed() -> PolySeed:
    return PolySeed(-1, IntPolynomial([1]), 1)


def _seed_poly(spec: SeedSpec) -> PolySeed:
    return shape_invariant_seed() if spec.shape_invariant else seed_u(spec.m)


class GeneralSeed:
    """Most general solution of -u'' + z^2 u = eps u:

        u = eta0 e^{-z^2/2} 1F1((1-eps)/4, 1/2; z^2)
          + eta1 z e^{-z^2/2} 1F1((3-eps)/4, 3/2; z^2)

    ``form='kummer'`` evaluates the Kummer-transformed twin
    e^{+z^2/2} 1F1((1+eps)/4, 1/2; -z^2) (and its odd partner) by the plain
    alternating series, an independent route to the same function that loses
    accuracy to cancellation beyond |z| of about 3.
    """

    def __init__(self, eps: float, eta0: float, eta1: float, form: str = "direct"):
        if eta0 == 0 and eta1 == 0:
            raise DomainError("(eta0, eta1) must not both vanish")
        if form not in ("direct", "kummer"):
            raise DomainError(f"unknown form {form!r}")
        self.eps, self.eta0, self.eta1, self.form = float(eps), float(eta0), float(eta1), form

    def _one(self, z: float) -> float:
        e, z2 = self.eps, z * z
        out = 0.0
        if self.form == "direct":
            g = math.exp(-z2 / 2)
            if self.eta0:
                out += self.eta0 * g * kummer_1f1((1 - e) / 4, 0.5, z2)
            if self.eta1:
                out += self.eta1 * z * g * kummer_1f1((3 - e) / 4, 1.5, z2)
        else:
            g = math.exp(z2 / 2)
            if self.eta0:
                out += self.eta0 * g * kummer_1f1((1 + e) / 4, 0.5, -z2, transform=False)
            if self.eta1:
                out += self.eta1 * z * g * kummer_1f1((3 + e) / 4, 1.5, -z2, transform=False)
        return out

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        v = np.vectorize(self._one, otypes=[float])(z)
        return v if v.ndim else float(v)

    def residual(self, z, h: float = 1e-2) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        c = [-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560]
        upp = sum(cj * self(z + (j - 4) * h) for j, cj in enumerate(c)) / h**2
        u = self(z)
        return np.abs(-upp + z * z * u - self.eps * u) / np.max(np.abs(u))


def seed_general(eps: float, eta0: float, eta1: float, form: str = "direct") -> GeneralSeed:
    return GeneralSeed(eps, eta0, eta1, form)


# ---------------------------------------------------------------------------
# Rational terms and superpotentials

@dataclass(frozen=True)
class RationalTerm:
    """scale * numerator / denominator, equal to -d^2/dz^2 ln p for a seed polynomial p.

    ``numerator`` is primitive with ``scale`` its extracted content, and
    ``denominator`` is the square of the primitive part of p.
    """

    numerator: IntPolynomial
    denominator: IntPolynomial
    scale: Fraction

    @classmethod
    def from_seed_polynomial(cls, p: IntPolynomial) -> "RationalTerm":
        if p.is_zero():
            raise DomainError("seed polynomial is zero")
        _, q = p.primitive()
        dq = q.deriv()
        num = dq * dq - q * q.deriv(2)
        den = q * q
        if num.is_zero():
            return cls(IntPolynomial(), den, Fraction(0))
        content, prim = num.primitive()
        return cls(prim, den, Fraction(content))

    def is_zero(self) -> bool:
        return self.scale == 0

    def __call__(self, z):
        if self.is_zero():
            return 0.0 * np.asarray(z, dtype=float)
        z = np.asarray(z, dtype=float)
        return float(self.scale) * self.numerator(z) / self.denominator(z)

    def as_rational(self) -> RationalFunction:
        s = self.scale
        return RationalFunction(s.numerator * self.numerator, s.denominator * self.denominator)


@dataclass(frozen=True)
class Deformation:
    """D(z) = constant + 2 * term(z); the invariant is I_k = I_0 + D(z)."""

    constant: int
    term: RationalTerm | None = None

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        out = self.constant + 0.0 * z
        if self.term is not None and not self.term.is_zero():
            out = out + 2.0 * self.term(z)
        return out

    def as_rational(self) -> RationalFunction:
        r = RationalFunction(self.constant)
        if self.term is not None and not self.term.is_zero():
            r = r + RationalFunction(2) * self.term.as_rational()
        return r


@dataclass(frozen=True)
class Superpotential:
    """W(z) as an exact rational function; B = d/dz + W in the reduced picture."""

    rational: RationalFunction
    eps: int

    def __call__(self, z):
        return self.rational(np.asarray(z, dtype=float))

    def deriv(self, z):
        return self.rational.deriv()(np.asarray(z, dtype=float))

    def riccati_lhs(self) -> RationalFunction:
        """-W' + W^2 in exact arithmetic."""
        return -self.rational.deriv() + self.rational * self.rational


def superpotential_w1(spec: SeedSpec) -> Superpotential:
    """W1 = -u'/u; for the pseudo-Hermite seed W1 = -z - H_m'/H_m."""
    if spec.order == 2:
        spec = spec.first_step()
    if spec.order != 1:
        raise DomainError("W1 needs a one- or two-step spec")
    seed = _seed_poly(spec)
    report = nodeless_check(seed.poly)
    if not report.nodeless:
        raise NodeError(f"seed polynomial has real roots {report.real_roots}")
    return Superpotential(-seed.log_derivative(), seed.eps)


@lru_cache(maxsize=None)
def wronskian_seed(m1: int, m2: int, strict: bool = False) -> IntPolynomial:
    """g = 2 m2 H_m1 H_{m2-1} - 2 m1 H_{m1-1} H_m2 (W(u1, u2) = e^{z^2} g).

    ``strict=True`` raises NodeError for same-parity pairs.
    """
    if min(m1, m2) < 0:
        raise DomainError("seed indices must be >= 0")
    if strict and (m1 - m2) % 2 == 0:
        raise NodeError(f"indices ({m1}, {m2}) have equal parity; g has a real node")
    H = pseudo_hermite_poly
    return 2 * m2 * H(m1) * H(m2 - 1) - 2 * m1 * H(m1 - 1) * H(m2)


def _g(spec: SeedSpec) -> IntPolynomial:
    """Wronskian seed for the normalized (m1 < m2) order."""
    m1, m2 = spec.indices
    return wronskian_seed(m1, m2)


def superpotential_w2(spec: SeedSpec) -> Superpotential:
    """W2 = -d/dz ln(W(u1, u2)/u1) = -z - g'/g + H_m1'/H_m1."""
    if spec.order != 2:
        raise DomainError("W2 needs a two-step spec")
    g = _g(spec)
    report = nodeless_check(g)
    if not report.nodeless:
        raise NodeError(f"Wronskian seed has real roots {report.real_roots}")
    h1 = pseudo_hermite_poly(spec.indices[0])
    w = (RationalFunction(-Z) - RationalFunction(g.deriv(), g) + RationalFunction(h1.deriv(), h1))
    return Superpotential(w, spec.eps[1])


def second_seed(spec: SeedSpec):
    """v = W(u1, u2)/u1 = e^{z^2/2} g / H_m1, the seed of the second step (unnormalized)."""
    g = _g(spec)
    h1 = pseudo_hermite_poly(spec.indices[0])

    def v(z):
        z = np.asarray(z, dtype=float)
        return np.exp(z * z / 2) * g(z) / h1(z)

    return v


def rational_term(spec: SeedSpec) -> RationalTerm | None:
    if spec.order == 0 or spec.shape_invariant:
        return None
    if spec.order == 1:
        return RationalTerm.from_seed_polynomial(pseudo_hermite_poly(spec.m))
    return RationalTerm.from_seed_polynomial(_g(spec))


@lru_cache(maxsize=None)
def deformation(spec: SeedSpec) -> Deformation:
    """D_k(z) such that I_k = I_0 + D_k and H_k = H_0 + D_k / sigma^2."""
    if spec.order == 0:
        return Deformation(0)
    if spec.shape_invariant:
        return Deformation(2)
    poly = pseudo_hermite_poly(spec.m) if spec.order == 1 else _g(spec)
    report = nodeless_check(poly)
    if not report.nodeless:
        raise NodeError(f"seed polynomial has real roots {report.real_roots}")
    return Deformation(-2 * spec.order, rational_term(spec))


# ---------------------------------------------------------------------------
# Potentials

def potential_v0(cs, x):
    """Omega^2 x^2 + F x."""
    x = np.asarray(x, dtype=float)
    return cs.omega2 * x * x + cs.force * x


def potential(spec: SeedSpec, cs, x):
    """V_k(x, t) = V_0 + D_k(z)/sigma^2 for any order."""
    x = np.asarray(x, dtype=float)
    z = (x + cs.gamma) / cs.sigma
    return potential_v0(cs, x) + deformation(spec)(z) / cs.sigma**2


def potential_v1(spec: SeedSpec, cs, x):
    if spec.order != 1:
        raise DomainError("potential_v1 needs a one-step spec")
    return potential(spec, cs, x)


def potential_v2(spec: SeedSpec, cs, x):
    if spec.order != 2:
        raise DomainError("potential_v2 needs a two-step spec")
    return potential(spec, cs, x)


# ---------------------------------------------------------------------------
# Nodelessness

@dataclass(frozen=True)
class NodelessReport:
    nodeless: bool
    real_roots: np.ndarray
    sturm_count: int
    min_abs: float | None = None


def _frac_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        k = len(a) - len(b)
        f = a[-1] / b[-1]
        q[k] = f
        for j, c in enumerate(b):
            a[k + j] -= f * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return q, a


def sturm_count(p: IntPolynomial) -> int:
    """Number of distinct real roots, from an exact Sturm sequence."""
    seq = [[Fraction(c) for c in p.coeffs], [Fraction(c) for c in p.deriv().coeffs]]
    while seq[-1] and len(seq[-1]) > 1:
        _, r = _frac_divmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    seq = [s for s in seq if s]

    def changes(signs):
        signs = [v for v in signs if v != 0]
        return sum(1 for u, v in zip(signs, signs[1:]) if u != v)

    at_pos = [1 if s[-1] > 0 else -1 for s in seq]
    at_neg = [(1 if s[-1] > 0 else -1) * (-1) ** (len(s) - 1) for s in seq]
    return changes(at_neg) - changes(at_pos)


def nodeless_check(p: IntPolynomial, polish_steps: int = 8) -> NodelessReport:
    """Real-root detection for an exact polynomial.

    Companion-matrix eigenvalues, Newton-polished, locate candidate real roots;
    the verdict itself is certified by an exact Sturm count.
    """
    if p.is_zero():
        raise DomainError("the zero polynomial has no meaningful node structure")
    if p.degree == 0:
        return NodelessReport(True, np.array([]), 0, float(abs(p.leading)))
    c = p.to_numpy()
    roots = np.polynomial.polynomial.polyroots(c / c[-1])
    dp = p.deriv()
    for _ in range(polish_steps):
        d = dp(roots.astype(complex)) if dp.degree >= 0 else 1.0
        step = np.where(d != 0, p(roots.astype(complex)) / np.where(d != 0, d, 1), 0)
        roots = roots - step
    count = sturm_count(p)
    scale = max(1.0, float(np.max(np.abs(roots)))) if roots.size else 1.0
    real = np.sort(roots[np.abs(roots.imag) <= 1e-7 * scale].real)
    if real.size:
        real = np.unique(np.round(real, 10))
    min_abs = None
    if count == 0:
        zs = np.linspace(-10, 10, 4001)
        min_abs = float(np.min(np.abs(p(zs))))
    return NodelessReport(count == 0, real, count, min_abs)
