"""Ladder, factorization operators, invariants and Hamiltonians on a space grid.

In the reduced picture (phi = U f(z), see :mod:`paramosc.states`) the
operators read A = d/dz + z, A^+ = -d/dz + z, B = d/dz + W, B^+ = -d/dz + W and
I_0 = -d^2/dz^2 + z^2.  Here they act directly on x-samples; I_1 and I_2 are
applied as I_0 + D_k(z) so that the factorization identities are genuine
cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError
from .factorization import SeedSpec, deformation, superpotential_w1, superpotential_w2
from .grid import WaveField, relative_residual

FIRST = {
    2: [-1 / 2, 0.0, 1 / 2],
    4: [1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12],
    6: [-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60],
    8: [1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280],
}
SECOND = {
    2: [1.0, -2.0, 1.0],
    4: [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12],
    6: [1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90],
    8: [-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560],
}
KINDS = ("A", "A+", "B1", "B1+", "B2", "B2+", "I0", "I1", "I2", "H0", "H1", "H2", "x", "p")
TIME_TOL = 1e-12


def _stencil(v: np.ndarray, coeffs, h: float, power: int) -> np.ndarray:
    w = len(coeffs) // 2
    out = np.zeros_like(v)
    n = len(v)
    for j, c in enumerate(coeffs):
        if c:
            out[w:n - w] += c * v[j:n - 2 * w + j]
    return out / h**power


def d1(f: WaveField, order: int = 4) -> WaveField:
    w = order // 2
    return f.with_values(_stencil(f.values, FIRST[order], f.grid.dx, 1), f.margin + w)


def d2(f: WaveField, order: int = 4) -> WaveField:
    w = order // 2
    return f.with_values(_stencil(f.values, SECOND[order], f.grid.dx, 2), f.margin + w)


@dataclass(frozen=True)
class GridOperator:
    """One of :data:`KINDS` frozen at the classical state ``cs``."""

    kind: str
    cs: object
    spec: SeedSpec = SeedSpec.none()
    order: int = 4

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown operator kind {self.kind!r}")
        if self.order not in FIRST:
            raise DomainError(f"stencil order must be one of {sorted(FIRST)}")
        need = {"B1": 1, "B1+": 1, "I1": 1, "H1": 1, "B2": 2, "B2+": 2, "I2": 2, "H2": 2}.get(self.kind, 0)
        if need == 2 and self.spec.order != 2:
            raise DomainError(f"{self.kind} needs a two-step spec")
        if need == 1 and self.spec.order not in (1, 2):
            raise DomainError(f"{self.kind} needs a one- or two-step spec")

    @property
    def Xi(self) -> complex:
        return -1j / self.cs.sigma + self.cs.sigma_dot / 2

    def _z(self, x):
        return (x + self.cs.gamma) / self.cs.sigma

    def _W(self, which: int, z):
        if which == 1:
            return superpotential_w1(self.spec)(z)
        return superpotential_w2(self.spec)(z)

    def _deform(self, k: int, z):
        if k == 0:
            return 0.0 * z
        spec = self.spec if (k == self.spec.order) else self.spec.first_step()
        return deformation(spec)(z)

    def _first_order(self, f: WaveField, sign: int, mult) -> WaveField:
        s = self.cs.sigma
        df = d1(f, self.order)
        return df.with_values(sign * s * df.values + mult * f.values)

    def apply(self, f: WaveField) -> WaveField:
        cs = self.cs
        if abs(f.t - cs.t) > TIME_TOL:
            raise ContractError(f"operator frozen at t={cs.t} applied to a field at t={f.t}")
        x = f.x
        z = self._z(x)
        s, sd, gd = cs.sigma, cs.sigma_dot, cs.gamma_dot
        # sigma * d/dx of the gauge log: i sigma_dot z / 2 - i gamma_dot / 2, times sigma
        gauge = 1j * s * sd * z / 2 - 1j * s * gd / 2
        k = self.kind
        if k == "x":
            return f.with_values(x * f.values)
        if k == "p":
            df = d1(f, self.order)
            return df.with_values(-1j * df.values)
        if k == "A":
            return self._first_order(f, +1, z - gauge)
        if k == "A+":
            return self._first_order(f, -1, z + gauge)
        if k in ("B1", "B2"):
            return self._first_order(f, +1, self._W(int(k[1]), z) - gauge)
        if k in ("B1+", "B2+"):
            return self._first_order(f, -1, self._W(int(k[1]), z) + gauge)
        if k[0] == "I":
            return self._invariant(f, x, z, int(k[1]))
        return self._hamiltonian(f, x, z, int(k[1]))

    def _invariant(self, f, x, z, k):
        cs = self.cs
        s, sd, g, W = cs.sigma, cs.sigma_dot, cs.gamma, cs.W
        df, ddf = d1(f, self.order), d2(f, self.order)
        v = f.values
        coeff1 = 1j * s * sd * x - 1j * s * W
        coeff0 = (1j * s * sd / 2 + (1 / s**2 + sd**2 / 4) * x * x
                  + (2 * g / s**2 - sd * W / 2) * x + g * g / s**2 + W * W / 4)
        out = -s * s * ddf.values + coeff1 * df.values + (coeff0 + self._deform(k, z)) * v
        return ddf.with_values(out)

    def _hamiltonian(self, f, x, z, k):
        cs = self.cs
        ddf = d2(f, self.order)
        pot = cs.omega2 * x * x + cs.force * x + self._deform(k, z) / cs.sigma**2
        return ddf.with_values(-ddf.values + pot * f.values)


def apply(op: GridOperator, f: WaveField) -> WaveField:
    return op.apply(f)


def chain(f: WaveField, cs, spec: SeedSpec, kinds, order: int = 4) -> WaveField:
    """Apply operators right to left: chain(f, ..., ["B2", "B1"]) = B2 B1 f."""
    for kind in reversed(list(kinds)):
        f = GridOperator(kind, cs, spec, order).apply(f)
    return f


def _rel(a: WaveField, b: WaveField, ref: WaveField) -> float:
    return relative_residual(a, b, ref)


# ---------------------------------------------------------------------------
# Identity checks; each returns ||LHS f - RHS f|| / ||f|| on the valid interior

def commutator_check(pair: str, f: WaveField, cs, spec: SeedSpec = SeedSpec.none(), order: int = 4) -> float:
    """pair in {'A,A+', 'I0,A+', 'I0,A'}: [A,A+] = 2, [I0,A+] = 2A+, [I0,A] = -2A."""
    if pair == "A,A+":
        lhs = chain(f, cs, spec, ["A", "A+"], order) - chain(f, cs, spec, ["A+", "A"], order)
        rhs = 2 * f
    elif pair == "I0,A+":
        lhs = chain(f, cs, spec, ["I0", "A+"], order) - chain(f, cs, spec, ["A+", "I0"], order)
        rhs = 2 * chain(f, cs, spec, ["A+"], order)
    elif pair == "I0,A":
        lhs = chain(f, cs, spec, ["I0", "A"], order) - chain(f, cs, spec, ["A", "I0"], order)
        rhs = -2 * chain(f, cs, spec, ["A"], order)
    else:
        raise DomainError(f"unknown commutator {pair!r}")
    return _rel(lhs, rhs.with_values(rhs.values, lhs.margin), f)


def ladder_residual(phi_lo: WaveField, phi_hi: WaveField, cs, coefficient: float,
                    lowering: bool = True, order: int = 4) -> float:
    """||A phi_hi - c phi_lo|| / ||phi_lo|| (or the A+ version if not lowering)."""
    if lowering:
        lhs = GridOperator("A", cs, order=order).apply(phi_hi)
        return _rel(lhs, coefficient * phi_lo, phi_lo)
    lhs = GridOperator("A+", cs, order=order).apply(phi_lo)
    return _rel(lhs, coefficient * phi_hi, phi_hi)


INTERTWININGS = {
    "B1 I0 = I1 B1": (["B1", "I0"], ["I1", "B1"]),
    "B1+ I1 = I0 B1+": (["B1+", "I1"], ["I0", "B1+"]),
    "B2 I1 = I2 B2": (["B2", "I1"], ["I2", "B2"]),
    "I2 B2 B1 = B2 B1 I0": (["I2", "B2", "B1"], ["B2", "B1", "I0"]),
}


def intertwine_residual(relation: str, f: WaveField, cs, spec: SeedSpec, order: int = 4) -> float:
    try:
        left, right = INTERTWININGS[relation]
    except KeyError:
        raise DomainError(f"unknown relation {relation!r}; choose from {list(INTERTWININGS)}") from None
    return _rel(chain(f, cs, spec, left, order), chain(f, cs, spec, right, order), f)


FACTORIZATIONS = {
    "B1+ B1 + eps1 = I0": (["B1+", "B1"], 0, "I0"),
    "B1 B1+ + eps1 = I1": (["B1", "B1+"], 0, "I1"),
    "B2+ B2 + eps2 = I1": (["B2+", "B2"], 1, "I1"),
    "B2 B2+ + eps2 = I2": (["B2", "B2+"], 1, "I2"),
    "A+ A + 1 = I0": (["A+", "A"], None, "I0"),
}


def factorization_residual(relation: str, f: WaveField, cs, spec: SeedSpec, order: int = 4) -> float:
    try:
        kinds, eps_idx, target = FACTORIZATIONS[relation]
    except KeyError:
        raise DomainError(f"unknown relation {relation!r}; choose from {list(FACTORIZATIONS)}") from None
    eps = 1.0 if eps_idx is None else spec.eps[eps_idx]
    lhs = chain(f, cs, spec, kinds, order)
    lhs = lhs + (eps * f).with_values(eps * f.values, lhs.margin)
    return _rel(lhs, GridOperator(target, cs, spec, order).apply(f), f)


def quadrature_decomposition(f: WaveField, cs, order: int = 4) -> tuple:
    """Residuals of x = (sigma/2)(A + A+) - gamma and p = (Xi A + Xi* A+)/2 - gamma_dot/2."""
    A = GridOperator("A", cs, order=order).apply(f)
    Ad = GridOperator("A+", cs, order=order).apply(f)
    X = GridOperator("x", cs, order=order).apply(f)
    P = GridOperator("p", cs, order=order).apply(f)
    Xi = GridOperator("A", cs).Xi
    x_rec = A.with_values(cs.sigma / 2 * (A.values + Ad.values) - cs.gamma * f.values)
    p_rec = A.with_values(0.5 * (Xi * A.values + np.conj(Xi) * Ad.values) - cs.gamma_dot / 2 * f.values)
    return _rel(X, x_rec, f), _rel(P, p_rec, f)


def adjoint_defect(kind: str, f: WaveField, g: WaveField, cs, spec: SeedSpec = SeedSpec.none(),
                   order: int = 4) -> float:
    """|<O+ f, g> - <f, O g>| for O in {A, B1, B2}."""
    op = GridOperator(kind, cs, spec, order)
    opd = GridOperator(kind + "+", cs, spec, order)
    return abs(opd.apply(f).inner(g) - f.inner(op.apply(g)))


def expectation(kind: str, f: WaveField, cs, spec: SeedSpec = SeedSpec.none(), order: int = 4) -> float:
    """Real part of <f|O|f>/<f|f> on the valid interior."""
    of = GridOperator(kind, cs, spec, order).apply(f)
    return float((f.inner(of) / f.inner(f.with_values(f.values, of.margin))).real)


def convergence_ratio(residual_fn, grids) -> list:
    """Ratios residual(grid_i) / residual(grid_{i+1}) along a refinement sequence."""
    res = [residual_fn(g) for g in grids]
    return [a / b for a, b in zip(res, res[1:])], res


__all__ = ["GridOperator", "apply", "chain", "commutator_check", "ladder_residual",
           "intertwine_residual", "factorization_residual", "quadrature_decomposition",
           "adjoint_defect", "expectation", "convergence_ratio", "d1", "d2", "KINDS",
           "INTERTWININGS", "FACTORIZATIONS"]
