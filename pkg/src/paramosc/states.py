"""Eigenfunctions of the invariants I_0, I_1, I_2 and the Schrodinger solutions.

Every eigenfunction has the form

    phi(x, t) = U(x, t) f(z),   U = exp(i sigma sigma_dot z^2/4 - i gamma_dot x/2) / sqrt(sigma)

with a real, time-independent envelope f(z) = const * exp(-z^2/2) * R(z) and R an
exact rational function.  The envelopes are built twice: from the closed-form
polynomials and from the exact action of the factorization operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from . import classical
from .errors import DomainError, GridError
from .factorization import SeedSpec, superpotential_w1, superpotential_w2, wronskian_seed
from .grid import Grid, WaveField
from .specfun import IntPolynomial, RationalFunction, Z, hermite_poly, pseudo_hermite_poly

SQRT_PI = math.sqrt(math.pi)
TAIL_LIMIT = 1e-12
MUTATIONS = ("chi-sign", "chi-gamma", "chi-work")


# ---------------------------------------------------------------------------
# Spectra

@dataclass(frozen=True)
class SpectrumTable:
    k: int
    values: tuple
    provenance: tuple

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return len(self.values)


def eigenvalue(k: int, n: int, spec: SeedSpec) -> int:
    if n < 0:
        raise DomainError(f"state index must be >= 0, got {n}")
    _check_order(k, spec)
    if k == 0:
        return 2 * n + 1
    if k == 1:
        if spec.shape_invariant:
            return 2 * n + 3
        return spec.eps[0] if n == 0 else 2 * n - 1
    eps1, eps2 = spec.eps
    if n == 0:
        return eps2
    if n == 1:
        return eps1
    return 2 * n - 3


def spectrum(k: int, spec: SeedSpec, n_max: int) -> SpectrumTable:
    vals = tuple(eigenvalue(k, n, spec) for n in range(n_max + 1))
    missing = 0 if (k == 0 or spec.shape_invariant) else k
    prov = tuple("missing-state" if n < missing else "mapped-from-I0" for n in range(n_max + 1))
    return SpectrumTable(k, vals, prov)


def _check_order(k, spec):
    if k not in (0, 1, 2):
        raise DomainError(f"order k must be 0, 1 or 2, got {k}")
    if k > 0 and spec.order != k:
        raise DomainError(f"order-{k} states need an order-{k} seed spec, got order {spec.order}")


# ---------------------------------------------------------------------------
# Envelopes

@dataclass(frozen=True)
class Envelope:
    """f(z) = const * exp(-z^2/2) * rational(z)."""

    rational: RationalFunction
    const: float

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        # evaluate the ratio through scaled arguments to keep big coefficients tame
        return self.const * np.exp(-z * z / 2) * self.rational(z)

    def norm2(self) -> float:
        """Integral of f^2 over the real line (adaptive quadrature)."""
        f = lambda z: float(self(z)) ** 2  # noqa: E731
        parts = [quad(f, lo, hi, epsabs=1e-16, epsrel=1e-13, limit=400)[0]
                 for lo, hi in ((-60, -6), (-6, 0), (0, 6), (6, 60))]
        return math.fsum(parts)

    def tail_mass(self, z_lo: float, z_hi: float) -> float:
        f = lambda z: float(self(z)) ** 2  # noqa: E731
        lo = quad(f, z_lo - 60, z_lo, epsabs=1e-300, epsrel=1e-8, limit=200)[0] if z_lo > -60 else 0.0
        hi = quad(f, z_hi, z_hi + 60, epsabs=1e-300, epsrel=1e-8, limit=200)[0] if z_hi < 60 else 0.0
        return lo + hi

    def positive_at_infinity(self) -> "Envelope":
        """Sign convention: the outermost lobe (z -> +inf) is positive."""
        r = self.rational
        s = math.copysign(1.0, r.num.leading * r.den.leading * self.const)
        return Envelope(r, s * self.const)


def apply_b(R: RationalFunction, W: RationalFunction) -> RationalFunction:
    """exp(-z^2/2) R  ->  (d/dz + W) of it, returned as the new R (exact)."""
    return (R.deriv() - RationalFunction(Z) * R + W * R).reduced()


def apply_b_dagger(R: RationalFunction, W: RationalFunction) -> RationalFunction:
    """(-d/dz + W) acting on exp(-z^2/2) R."""
    return (-R.deriv() + RationalFunction(Z) * R + W * R).reduced()


def proportionality(r1: RationalFunction, r2: RationalFunction):
    """Rational kappa with r1 = kappa * r2, or None."""
    lhs = r1.num * r2.den
    rhs = r2.num * r1.den
    if rhs.is_zero():
        return Fraction(0) if lhs.is_zero() else None
    kappa = Fraction(lhs.leading, rhs.leading)
    lhs_c = [Fraction(c) for c in lhs.coeffs]
    rhs_c = [kappa * c for c in rhs.coeffs]
    return kappa if lhs_c == rhs_c else None


def _gauss_norm(R: RationalFunction) -> float:
    return 1.0 / math.sqrt(Envelope(R, 1.0).norm2())


def P1(n: int, m: int) -> IntPolynomial:
    """One-step polynomial -H_m H_{n+1} - 2m H_{m-1} H_n."""
    H, h = pseudo_hermite_poly, hermite_poly
    return -H(m) * h(n + 1) - 2 * m * H(m - 1) * h(n)


def P2(n: int, m1: int, m2: int, joiner: str = "+") -> IntPolynomial:
    """Two-step polynomial (m2-m1) H_m1 H_m2 H_{n+1} (+/-) 2[m1(n+m2+1) H_{m1-1} H_m2
    - m2(n+m1+1) H_m1 H_{m2-1}] H_n.  ``joiner`` selects the operator between the
    two terms; the operator route fixes it as '+'."""
    H, h = pseudo_hermite_poly, hermite_poly
    first = (m2 - m1) * H(m1) * H(m2) * h(n + 1)
    second = 2 * (m1 * (n + m2 + 1) * H(m1 - 1) * H(m2) - m2 * (n + m1 + 1) * H(m1) * H(m2 - 1)) * h(n)
    if joiner == "+":
        return first + second
    if joiner == "-":
        return first - second
    raise DomainError(f"joiner must be '+' or '-', got {joiner!r}")


def normalization(k: int, n: int, spec: SeedSpec, legacy: bool = False) -> float:
    """Normalization constant of the closed-form envelope.

    ``legacy=True`` returns the older two-step constants for n >= 1, which are
    off by a factor of 2 (norm^2 = 1/4); kept for comparison only.
    """
    if k == 0 or (k == 1 and spec.shape_invariant):
        return (2.0**n * math.factorial(n) * SQRT_PI) ** -0.5
    if k == 1:
        m = spec.m
        if n == 0:
            return math.sqrt(2.0**m * math.factorial(m) / SQRT_PI)
        j = n - 1
        return (2.0 ** (j + 1) * math.factorial(j) * (j + m + 1) * SQRT_PI) ** -0.5
    m1, m2 = spec.indices
    if n == 0:
        return math.sqrt(2.0 ** (m2 + 1) * math.factorial(m2) * (m2 - m1) / SQRT_PI)
    if n == 1:
        if legacy:
            return math.sqrt(2.0 ** (m1 - 1) * math.factorial(m1) / (SQRT_PI * (m2 - m1)))
        return math.sqrt(2.0 ** (m1 + 1) * math.factorial(m1) * (m2 - m1) / SQRT_PI)
    j = n - 2
    p2 = 2.0 ** (j + 2) if legacy else 2.0**j
    return (SQRT_PI * p2 * math.factorial(j) * (j + m1 + 1) * (j + m2 + 1)) ** -0.5


def closed_form_envelope(k: int, n: int, spec: SeedSpec, legacy: bool = False) -> Envelope:
    """Envelope from the explicit polynomial formulas."""
    _check_order(k, spec)
    N = normalization(k, n, spec, legacy)
    if k == 0 or (k == 1 and spec.shape_invariant):
        R = RationalFunction(hermite_poly(n))
    elif k == 1:
        Hm = pseudo_hermite_poly(spec.m)
        R = RationalFunction(IntPolynomial([1]) if n == 0 else P1(n - 1, spec.m), Hm)
    else:
        m1, m2 = spec.indices
        g = wronskian_seed(m1, m2)
        if n == 0:
            num = pseudo_hermite_poly(m1)
        elif n == 1:
            num = pseudo_hermite_poly(m2)
        else:
            num = P2(n - 2, m1, m2)
        R = RationalFunction(num, g)
    return Envelope(R, N).positive_at_infinity()


def operator_route_envelope(k: int, n: int, spec: SeedSpec) -> Envelope:
    """Envelope from exact operator action: B_1 phi^(0), B_2 B_1 phi^(0), B_2 phi_0^(1),
    missing states from B^dagger phi = 0, normalized by sqrt(lambda - eps) factors."""
    _check_order(k, spec)
    if k == 0:
        R = RationalFunction(hermite_poly(n))
        return Envelope(R, _gauss_norm(R)).positive_at_infinity()
    if k == 1:
        W1 = superpotential_w1(spec).rational
        if spec.shape_invariant:
            c0 = normalization(0, n + 1, spec)
            R = apply_b(RationalFunction(hermite_poly(n + 1)), W1)
            return Envelope(R, c0 / math.sqrt(2 * n + 2)).positive_at_infinity()
        eps1 = spec.eps[0]
        if n == 0:
            R = _missing_state(W1)
            return Envelope(R, _gauss_norm(R)).positive_at_infinity()
        j = n - 1
        R = apply_b(RationalFunction(hermite_poly(j)), W1)
        return Envelope(R, normalization(0, j, spec) / math.sqrt(2 * j + 1 - eps1)).positive_at_infinity()
    eps1, eps2 = spec.eps
    W1 = superpotential_w1(spec).rational
    W2 = superpotential_w2(spec).rational
    if n == 0:
        R = _missing_state(W2)
        return Envelope(R, _gauss_norm(R)).positive_at_infinity()
    if n == 1:
        base = operator_route_envelope(1, 0, spec.first_step())
        R = apply_b(base.rational, W2)
        return Envelope(R, base.const / math.sqrt(eps1 - eps2)).positive_at_infinity()
    j = n - 2
    R = apply_b(apply_b(RationalFunction(hermite_poly(j)), W1), W2)
    lam = 2 * j + 1
    c = normalization(0, j, spec) / math.sqrt((lam - eps1) * (lam - eps2))
    return Envelope(R, c).positive_at_infinity()


def _missing_state(W: RationalFunction) -> RationalFunction:
    """Solve (-d/dz + W) exp(-z^2/2) R = 0, i.e. R'/R = W + z.

    The superpotentials here have W + z = q'/q - p'/p, so R = q/p; the factors
    are read off the reduced W + z and the annihilation is verified exactly.
    """
    Wz = (W + RationalFunction(Z)).reduced()
    den = Wz.den
    for q in _divisor_candidates(den):
        R = RationalFunction(q, den.exact_div(q))
        if apply_b_dagger(R, W).num.is_zero():
            return R.reduced()
    raise DomainError("could not construct the missing state")


def _divisor_candidates(den: IntPolynomial):
    # den = p q with q = 1 (one step) or q = H_m1 (two steps)
    yield IntPolynomial([1])
    for m in range(0, den.degree + 1, 2):
        h = pseudo_hermite_poly(m)
        try:
            den.exact_div(h)
        except ArithmeticError:
            continue
        yield h


def operator_polynomial_two_step(n: int, spec: SeedSpec) -> IntPolynomial:
    """Polynomial P with B_2 B_1 (e^{-z^2/2} H_n) = e^{-z^2/2} P / g (exact)."""
    m1, m2 = spec.indices
    W1 = superpotential_w1(spec).rational
    W2 = superpotential_w2(spec).rational
    R = apply_b(apply_b(RationalFunction(hermite_poly(n)), W1), W2)
    g = wronskian_seed(m1, m2)
    scaled = RationalFunction(R.num * g, R.den)
    return scaled.num.exact_div(scaled.den)


def envelope(k: int, n: int, spec: SeedSpec, route: str = "closed") -> Envelope:
    if route == "closed":
        return closed_form_envelope(k, n, spec)
    if route == "operator":
        return operator_route_envelope(k, n, spec)
    raise DomainError(f"route must be 'closed' or 'operator', got {route!r}")


# ---------------------------------------------------------------------------
# Wave fields

def default_grid(cs, n_max: int = 6, n: int = 2048, pad: float = 8.0) -> Grid:
    """x in [-gamma - L, -gamma + L] with L = sigma (sqrt(2 n_max + 1) + pad)."""
    L = cs.sigma * (math.sqrt(2 * n_max + 1) + pad)
    return Grid.centered(-cs.gamma, L, n)


def gauge(cs, x) -> np.ndarray:
    """U(x, t) = exp(i sigma sigma_dot z^2 / 4 - i gamma_dot x / 2) / sqrt(sigma)."""
    z = (x + cs.gamma) / cs.sigma
    return np.exp(1j * (cs.sigma * cs.sigma_dot * z * z / 4 - cs.gamma_dot * x / 2)) / math.sqrt(cs.sigma)


def eigenfunction(k: int, n: int, spec: SeedSpec, cs, grid: Grid | None = None,
                  route: str = "closed", check_tail: bool = True) -> WaveField:
    """phi_n^(k)(x, t) sampled on ``grid`` (default grid rule if omitted)."""
    if spec is None:
        spec = SeedSpec.none()
    env = envelope(k, n, spec, route)
    grid = grid or default_grid(cs, max(n, 6))
    x = grid.x
    z = (x + cs.gamma) / cs.sigma
    if check_tail:
        tail = env.tail_mass((grid.x0 + cs.gamma) / cs.sigma, (grid.x1 + cs.gamma) / cs.sigma)
        if tail > TAIL_LIMIT:
            raise GridError(f"grid too narrow: mass {tail:.2e} outside for k={k}, n={n}")
    vals = gauge(cs, x) * env(z)
    return WaveField(grid, vals, cs.t, {"k": k, "n": n, "spec": spec.to_dict(), "route": route})


# ---------------------------------------------------------------------------
# Phases and Schrodinger solutions

@dataclass(frozen=True)
class PhaseRecord:
    k: int
    n: int
    t: float
    chi: float


def chi_from_state(lam: float, cs, mutate: str | None = None) -> float:
    """chi = -lambda tau - gamma gamma_dot / 4 + (1/2) int F gamma."""
    if mutate not in (None, "none") + MUTATIONS:
        raise DomainError(f"unknown mutation {mutate!r}; choose from {MUTATIONS}")
    lam_term = -lam * cs.tau
    gam_term = -cs.gamma * cs.gamma_dot / 4
    work_term = 0.5 * cs.work
    if mutate == "chi-sign":
        lam_term = -lam_term
    elif mutate == "chi-gamma":
        gam_term = 2 * gam_term
    elif mutate == "chi-work":
        work_term = 0.0
    return lam_term + gam_term + work_term


def chi_phase(k: int, n: int, spec: SeedSpec, profile, params, t: float,
              mutate: str | None = None) -> PhaseRecord:
    spec = spec or SeedSpec.none()
    cs = classical.classical_state(profile, params, t)
    return PhaseRecord(k, n, float(t), chi_from_state(eigenvalue(k, n, spec), cs, mutate))


def schrodinger_solution(k: int, n: int, spec: SeedSpec, profile, params, grid: Grid | None,
                         t: float, mutate: str | None = None, route: str = "closed") -> WaveField:
    """psi_n^(k) = exp(i chi) phi_n^(k)."""
    spec = spec or SeedSpec.none()
    cs = classical.classical_state(profile, params, t)
    phi = eigenfunction(k, n, spec, cs, grid, route)
    chi = chi_from_state(eigenvalue(k, n, spec), cs, mutate)
    return phi.with_values(np.exp(1j * chi) * phi.values, chi=chi)


# ---------------------------------------------------------------------------
# Harmonic limit and quadratures

def harmonic_means(amplitude: float, phase: float, t):
    """<x> = -A cos(2t + phi), <p> = A sin(2t + phi)."""
    return -amplitude * np.cos(2 * t + phase), amplitude * np.sin(2 * t + phase)


def coherent_state(x, t: float, amplitude: float, phase: float) -> np.ndarray:
    """Glauber packet of H = p^2 + x^2 with the mean values above and the
    global phase exp(-i t)."""
    xm, pm = harmonic_means(amplitude, phase, t)
    return (math.pi ** -0.25 * np.exp(-(x - xm) ** 2 / 2 + 1j * pm * x - 1j * xm * pm / 2 - 1j * t))


def squeezed_density(x, params, t: float) -> np.ndarray:
    """|phi_0|^2 for Omega = 1, F = 0, amplitude 0, with sigma^2 from the
    closed form (a+c)/2 + (a-c)/2 cos 4t + sqrt(ac-1) sin 4t."""
    s2, _ = classical.harmonic_closed_form(params, 0.0, 0.0, t)
    return np.exp(-x * x / s2) / math.sqrt(math.pi * s2)


_D8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])


def expectations(f: WaveField) -> tuple:
    """(<x>, <p>) of a wave field, p = -i d/dx via an 8th-order stencil."""
    v, dx, x = f.values, f.grid.dx, f.x
    dv = np.zeros_like(v)
    h = 4
    for j, c in enumerate(_D8):
        if c:
            dv[h:-h] += c * v[j:len(v) - 2 * h + j]
    dv /= dx
    w = np.abs(v) ** 2
    norm = np.sum(w)
    xm = np.sum(x * w) / norm
    pm = np.real(np.sum(np.conj(v[h:-h]) * (-1j) * dv[h:-h])) / norm
    return float(xm), float(pm)


def quadrature_expectations(n: int, profile, params, t: float, k: int = 0,
                            spec: SeedSpec | None = None, grid: Grid | None = None) -> tuple:
    """Numerical (<x>, <p>) of psi_n^(k) by quadrature on the grid."""
    psi = schrodinger_solution(k, n, spec or SeedSpec.none(), profile, params, grid, t)
    return expectations(psi)
