"""Crank-Nicolson propagator for i d/dt psi = (-d^2/dx^2 + V_k(x, t)) psi.

The propagator knows nothing about the analytic solutions; it only samples the
potential.  It is the reference used to check the phases, the invariants and
the Schrodinger solutions built in :mod:`paramosc.states`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from . import classical
from .errors import ContractError, DomainError, GridError, WindowError
from .factorization import SeedSpec, deformation
from .grid import Grid, WaveField
from .operators import expectation

DT_DEFAULT = 2.5e-4
N_DEFAULT = 2048
EDGE_FRACTION = 0.05
REFLECTION_LIMIT = 1e-8
NORM_TOL = 1e-8


@dataclass(frozen=True)
class PropagationPlan:
    """Potential V_k of (spec, profile, params) on ``grid`` over [t_a, t_b].

    ``snapshot_every`` counts steps between stored fields; the first and last
    time are always stored.
    """

    k: int
    spec: SeedSpec
    profile: object
    params: classical.ErmakovParams
    grid: Grid
    dt: float = DT_DEFAULT
    t_a: float = 0.0
    t_b: float = math.pi
    snapshot_every: int = 400
    solver: str = "banded"
    monitor: bool = True

    def __post_init__(self):
        if self.k not in (0, 1, 2):
            raise DomainError(f"k must be 0, 1 or 2, got {self.k}")
        if self.k > max(self.spec.order, 0):
            raise DomainError(f"k={self.k} needs a spec of order >= {self.k}")
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not self.t_b > self.t_a:
            raise DomainError("t_b must exceed t_a")
        if self.solver not in ("banded", "thomas"):
            raise DomainError(f"solver must be 'banded' or 'thomas', got {self.solver!r}")
        if self.snapshot_every < 1:
            raise DomainError("snapshot_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, int(round((self.t_b - self.t_a) / self.dt)))

    @property
    def step(self) -> float:
        """The actual step, adjusted so that n_steps * step spans the window."""
        return (self.t_b - self.t_a) / self.n_steps

    @property
    def potential_spec(self) -> SeedSpec:
        if self.k == 0:
            return SeedSpec.none()
        if self.k == self.spec.order:
            return self.spec
        return self.spec.first_step()

    def time(self, j: int) -> float:
        return self.t_a + j * self.step

    def to_dict(self) -> dict:
        return {"k": self.k, "spec": self.spec.to_dict(), "profile": self.profile.to_dict(),
                "params": self.params.to_dict(), "grid": self.grid.to_dict(), "dt": self.dt,
                "t_a": self.t_a, "t_b": self.t_b, "snapshot_every": self.snapshot_every,
                "solver": self.solver}


@dataclass
class Trajectory:
    plan: PropagationPlan
    times: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    norms: list = field(default_factory=list)
    edge_mass: float = 0.0

    @property
    def final(self) -> WaveField:
        return self.fields[-1]

    @property
    def norm_drift(self) -> float:
        return float(max(abs(n - self.norms[0]) for n in self.norms))


def potential_on_grid(plan: PropagationPlan, t: float) -> np.ndarray:
    """V_k(x, t) on the plan grid; needs only sigma, gamma, Omega^2 and F."""
    lay = classical.layer(plan.profile, plan.params)
    sig, _ = lay.sigma(t)
    gam, _ = lay.trajectory(t)
    sig, gam = float(sig), float(gam)
    x = plan.grid.x
    v = float(plan.profile.omega2(t)) * x * x + float(plan.profile.force(t)) * x
    if plan.k:
        v = v + deformation(plan.potential_spec)((x + gam) / sig) / sig**2
    return v


def thomas_solve(lower, diag, upper, rhs) -> np.ndarray:
    """Reference tridiagonal solve without pivoting; lower[0], upper[-1] unused."""
    n = len(diag)
    c = np.empty(n, dtype=complex)
    d = np.empty(n, dtype=complex)
    c[0] = upper[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        den = diag[i] - lower[i] * c[i - 1]
        if den == 0:
            raise ZeroDivisionError("singular tridiagonal pivot")
        c[i] = upper[i] / den if i < n - 1 else 0.0
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / den
    out = np.empty(n, dtype=complex)
    out[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        out[i] = d[i] - c[i] * out[i + 1]
    return out


def cn_step(psi: np.ndarray, v_half: np.ndarray, dx: float, dt: float, solver: str = "banded") -> np.ndarray:
    """One step (1 + i dt H/2) psi' = (1 - i dt H/2) psi, H = -D2 + V with
    the 3-point D2 and psi = 0 beyond the grid ends."""
    r = 1j * dt / (2 * dx * dx)
    off = -r
    diag = 1 + 2 * r + 0.5j * dt * v_half
    # explicit half: (1 - i dt H / 2) psi
    rhs = (1 - 2 * r - 0.5j * dt * v_half) * psi
    rhs[1:] += r * psi[:-1]
    rhs[:-1] += r * psi[1:]
    n = len(psi)
    if solver == "thomas":
        lo = np.full(n, off, dtype=complex)
        up = np.full(n, off, dtype=complex)
        return thomas_solve(lo, diag, up, rhs)
    ab = np.empty((3, n), dtype=complex)
    ab[0, :] = off
    ab[1, :] = diag
    ab[2, :] = off
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def _edge_mass(psi: np.ndarray, dx: float) -> float:
    m = max(2, int(EDGE_FRACTION * len(psi)))
    w = np.abs(psi) ** 2
    return float((np.sum(w[:m]) + np.sum(w[-m:])) * dx)


def propagate(plan: PropagationPlan, psi0: WaveField) -> Trajectory:
    """Crank-Nicolson trajectory from psi0 (at t_a) to t_b."""
    if psi0.grid != plan.grid:
        raise GridError("initial field lives on a different grid than the plan")
    if abs(psi0.t - plan.t_a) > 1e-12:
        raise ContractError(f"initial field at t={psi0.t}, plan starts at {plan.t_a}")
    n0 = psi0.norm()
    if abs(n0 - 1) > 1e-6:
        raise ContractError(f"initial field must be normalized, norm = {n0}")
    dx, h = plan.grid.dx, plan.step
    psi = np.array(psi0.values, dtype=complex)
    traj = Trajectory(plan)
    meta = {"k": plan.k, "source": "crank-nicolson"}

    def store(j, values):
        t = plan.time(j)
        traj.times.append(t)
        traj.fields.append(WaveField(plan.grid, values.copy(), t, meta))

    store(0, psi)
    traj.norms.append(float(np.sqrt(np.sum(np.abs(psi) ** 2) * dx)))
    base_edge = _edge_mass(psi, dx)
    for j in range(plan.n_steps):
        v = potential_on_grid(plan, plan.time(j) + h / 2)
        psi = cn_step(psi, v, dx, h, plan.solver)
        if not np.all(np.isfinite(psi)):
            raise FloatingPointError(f"non-finite values after step {j + 1}")
        last = j + 1 == plan.n_steps
        if (j + 1) % plan.snapshot_every == 0 or last:
            nrm = float(np.sqrt(np.sum(np.abs(psi) ** 2) * dx))
            traj.norms.append(nrm)
            if plan.monitor:
                em = _edge_mass(psi, dx)
                traj.edge_mass = max(traj.edge_mass, em)
                if em - base_edge > REFLECTION_LIMIT:
                    raise WindowError(f"mass {em:.2e} reached the grid ends at t={plan.time(j + 1):.4f}")
            store(j + 1, psi)
    return traj


# ---------------------------------------------------------------------------
# Diagnostics

def invariant_drift(traj: Trajectory, k: int, spec: SeedSpec, order: int = 4) -> tuple:
    """(max |<I_k>(t) - <I_k>(t_a)|, series of <I_k>) along the snapshots."""
    plan = traj.plan
    kind = f"I{k}"
    vals = []
    for t, f in zip(traj.times, traj.fields):
        cs = classical.classical_state(plan.profile, plan.params, t)
        vals.append(expectation(kind, f, cs, spec if k else SeedSpec.none(), order))
    drift = max(abs(v - vals[0]) for v in vals)
    return float(drift), vals


def analytic_reference(plan: PropagationPlan, t: float, coefficients: dict) -> WaveField:
    """sum_n c_n psi_n^(k)(x, t) on the plan grid."""
    from .states import schrodinger_solution

    out = None
    for n, c in coefficients.items():
        psi = schrodinger_solution(plan.k, n, plan.spec if plan.k else SeedSpec.none(),
                                   plan.profile, plan.params, plan.grid, t)
        out = c * psi if out is None else out + c * psi
    return out


def overlap_series(traj: Trajectory, coefficients: dict) -> list:
    """|<psi_exact(t)|psi_CN(t)>| at each snapshot."""
    return [abs(analytic_reference(traj.plan, t, coefficients).inner(f))
            for t, f in zip(traj.times, traj.fields)]


def projections(traj: Trajectory, ns, spec: SeedSpec | None = None) -> np.ndarray:
    """|<phi_n^(k)(t)|psi(t)>|^2 for n in ns, one row per snapshot."""
    from .states import eigenfunction

    plan = traj.plan
    spec = spec or (plan.spec if plan.k else SeedSpec.none())
    rows = []
    for t, f in zip(traj.times, traj.fields):
        cs = classical.classical_state(plan.profile, plan.params, t)
        rows.append([abs(eigenfunction(plan.k, n, spec, cs, plan.grid).inner(f)) ** 2 for n in ns])
    return np.array(rows)


def mean_position(traj: Trajectory) -> np.ndarray:
    return np.array([float(np.sum(f.x * f.density()) / np.sum(f.density())) for f in traj.fields])


def self_convergence(plan: PropagationPlan, psi0: WaveField, levels: int = 3) -> tuple:
    """Final-time differences between successive dt halvings and their ratios.

    Second order in dt gives ratios near 4.
    """
    finals = []
    dt = plan.dt
    for _ in range(levels):
        p = PropagationPlan(plan.k, plan.spec, plan.profile, plan.params, plan.grid, dt,
                            plan.t_a, plan.t_b, 10**9, plan.solver, plan.monitor)
        finals.append(propagate(p, psi0).final)
        dt /= 2
    diffs = [(a - b).norm() for a, b in zip(finals, finals[1:])]
    ratios = [a / b for a, b in zip(diffs, diffs[1:])]
    return diffs, ratios


__all__ = ["PropagationPlan", "Trajectory", "propagate", "cn_step", "thomas_solve",
           "potential_on_grid", "invariant_drift", "overlap_series", "projections",
           "analytic_reference", "mean_position", "self_convergence",
           "DT_DEFAULT", "N_DEFAULT"]
