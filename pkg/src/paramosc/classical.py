"""Classical layer of the parametric oscillator.

Conventions: H = p^2 + Omega^2(t) x^2 + F(t) x with hbar = 1, so the linear
classical equation is q'' + 4 Omega^2 q = 0.  The Ermakov amplitude is the
nonlinear superposition sigma^2 = a q1^2 + b q1 q2 + c q2^2 and the driven
trajectory solves gamma'' + 4 Omega^2 gamma = 2 F.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp

from .errors import DomainError, InvariantViolation
from .specfun import gauss_2f1

ODE_RTOL = 1e-13
ODE_ATOL = 1e-15


# ---------------------------------------------------------------------------
# Profiles

@dataclass(frozen=True)
class CosineDrive:
    """Constant frequency Omega0 with force F0 cos(alpha t).

    The homogeneous part of the trajectory is amplitude * cos(2 Omega0 t + phase).
    """

    omega0: float = 1.0
    F0: float = 0.0
    alpha: float = 3.0
    amplitude: float = 0.0
    phase: float = 0.0
    kind = "cosine"

    def validate(self):
        if not self.omega0 > 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0}")
        if not 0.0 <= self.phase <= 2 * math.pi:
            raise DomainError(f"phase must lie in [0, 2pi], got {self.phase}")
        if self.alpha < 0:
            raise DomainError(f"drive frequency must be >= 0, got {self.alpha}")

    @property
    def resonant(self) -> bool:
        return self.F0 != 0 and math.isclose(self.alpha, 2 * self.omega0, rel_tol=1e-12)

    @property
    def tags(self) -> tuple:
        return ("non-periodic", "unbounded") if self.resonant else ()

    @property
    def window(self):
        return None

    def omega2(self, t):
        return self.omega0**2 + 0.0 * np.asarray(t, dtype=float)

    def force(self, t):
        return self.F0 * np.cos(self.alpha * np.asarray(t, dtype=float))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "omega0": self.omega0, "F0": self.F0, "alpha": self.alpha,
                "amplitude": self.amplitude, "phase": self.phase}


@dataclass(frozen=True)
class SechPulse:
    """Omega^2(t) = omega1 + omega2 sech^2(k (t - t0)), no external force.

    The trajectory is gamma = gamma1 Re q1 + gamma2 Im q1.  ``window`` defaults
    to [t0 - 8/k, t0 + 8/k] widened to contain t = 0.
    """

    omega1: float = 2.0
    omega2_amp: float = 15.0
    k: float = 1.0
    t0: float = 6.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    window_: tuple | None = None
    kind = "sech"

    def validate(self):
        if not (self.omega1 > 0 and self.omega2_amp > 0):
            raise DomainError("sech profile needs omega1 > 0 and omega2 > 0")
        if not self.k > 0:
            raise DomainError(f"pulse rate k must be positive, got {self.k}")
        ta, tb = self.window
        if not ta < tb:
            raise DomainError(f"empty time window {self.window}")

    @property
    def tags(self) -> tuple:
        return ()

    @property
    def window(self) -> tuple:
        if self.window_ is not None:
            return tuple(self.window_)
        ta, tb = self.t0 - 8.0 / self.k, self.t0 + 8.0 / self.k
        return (min(ta, 0.0), max(tb, 0.0))

    def omega2(self, t):
        s = self.k * (np.asarray(t, dtype=float) - self.t0)
        return self.omega1 + self.omega2_amp / np.cosh(s) ** 2

    def force(self, t):
        return 0.0 * np.asarray(t, dtype=float)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "omega1": self.omega1, "omega2": self.omega2_amp, "k": self.k,
             "t0": self.t0, "gamma1": self.gamma1, "gamma2": self.gamma2}
        if self.window_ is not None:
            d["window"] = list(self.window_)
        return d


@dataclass(frozen=True)
class CustomProfile:
    """User-supplied smooth callables Omega^2(t) and F(t) on a finite window.

    The basis starts at ``t_ref`` with q1 = 1, q1' = 0, q2 = 0,
    q2' = 2 Omega(t_ref), so w0 = 2 Omega(t_ref); gamma starts from
    (gamma0, gamma_dot0).
    """

    omega2_fn: Callable
    force_fn: Callable
    window_: tuple = (0.0, 10.0)
    t_ref: float = 0.0
    gamma0: float = 0.0
    gamma_dot0: float = 0.0
    kind = "custom"

    def validate(self):
        ta, tb = self.window
        if not ta <= self.t_ref <= tb:
            raise DomainError(f"t_ref={self.t_ref} outside the window {self.window}")
        w = self.omega2(np.linspace(ta, tb, 4001))
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError("Omega^2(t) must be positive on the whole window")

    @property
    def tags(self) -> tuple:
        return ()

    @property
    def window(self) -> tuple:
        return tuple(self.window_)

    def omega2(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(np.vectorize(self.omega2_fn, otypes=[float])(t))

    def force(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(np.vectorize(self.force_fn, otypes=[float])(t))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "window": list(self.window_), "t_ref": self.t_ref,
                "gamma0": self.gamma0, "gamma_dot0": self.gamma_dot0}


# ---------------------------------------------------------------------------
# Ermakov parameters and the classical state

@dataclass(frozen=True)
class ErmakovParams:
    """Coefficients of sigma^2 = a q1^2 + b q1 q2 + c q2^2.

    ``b=None`` selects the positive root of b^2 - 4ac = -16/w0^2; an explicit b
    must satisfy the constraint (this is how the sign is overridden).
    """

    a: float = 1.0
    c: float = 1.0
    b: float | None = None
    w0: complex | None = None

    def resolve(self, w0) -> "ErmakovParams":
        if not (self.a > 0 and self.c > 0):
            raise DomainError(f"Ermakov coefficients must be positive, got a={self.a}, c={self.c}")
        w0 = complex(w0)
        disc = (4 * self.a * self.c - 16 / w0**2)
        if abs(disc.imag) > 1e-12 * max(1.0, abs(disc)):
            raise DomainError(f"w0={w0} gives a complex b")
        disc = disc.real
        if disc < -1e-12 * max(1.0, 4 * self.a * self.c):
            raise DomainError(f"4ac={4 * self.a * self.c} is below 16/w0^2 = {(16 / w0**2).real}; "
                              "b would be imaginary and sigma^2 not positive")
        b_pos = math.sqrt(max(disc, 0.0))
        if self.b is None:
            b = b_pos
        else:
            if not math.isclose(abs(self.b), b_pos, rel_tol=1e-10, abs_tol=1e-12):
                raise DomainError(f"b={self.b} violates b^2 - 4ac = -16/w0^2 (|b| should be {b_pos})")
            b = float(self.b)
        return replace(self, b=b, w0=w0)

    def to_dict(self) -> dict:
        d = {"a": self.a, "c": self.c}
        if self.b is not None:
            d["b"] = self.b
        return d


@dataclass(frozen=True)
class ClassicalState:
    """Classical layer at one instant.  ``tau`` is the integral of 1/sigma^2 from 0,
    ``work`` the integral of F gamma from 0."""

    t: float
    sigma: float
    sigma_dot: float
    gamma: float
    gamma_dot: float
    W: float
    tau: float
    omega2: float = 1.0
    force: float = 0.0
    work: float = 0.0
    tags: tuple = ()

    def W_recomputed(self) -> float:
        return self.sigma * self.gamma_dot - self.sigma_dot * self.gamma

    def z(self, x):
        return (np.asarray(x) + self.gamma) / self.sigma


# ---------------------------------------------------------------------------
# Bases

class _OdeSolution:
    """Dense solution of y' = rhs(t, y) integrated from t_ref to both window ends."""

    def __init__(self, rhs, y0, t_ref, window, max_step=0.05):
        self.t_ref = t_ref
        self.window = window
        self.y0 = np.asarray(y0)
        kw = dict(method="DOP853", dense_output=True, rtol=ODE_RTOL, atol=ODE_ATOL, max_step=max_step)
        ta, tb = window
        self._fwd = self._bwd = None
        if tb > t_ref:
            self._fwd = solve_ivp(rhs, (t_ref, tb), self.y0, **kw)
            if not self._fwd.success:
                raise InvariantViolation(f"ODE integration failed: {self._fwd.message}")
        if ta < t_ref:
            self._bwd = solve_ivp(rhs, (t_ref, ta), self.y0, **kw)
            if not self._bwd.success:
                raise InvariantViolation(f"ODE integration failed: {self._bwd.message}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        ta, tb = self.window
        if np.any(t < ta - 1e-12) or np.any(t > tb + 1e-12):
            raise DomainError(f"t outside the integration window {self.window}")
        flat = t.ravel()
        out = np.empty((self.y0.size, flat.size), dtype=self.y0.dtype)
        fwd = flat >= self.t_ref
        if np.any(fwd):
            out[:, fwd] = self._fwd.sol(flat[fwd]) if self._fwd else self.y0[:, None]
        if np.any(~fwd):
            out[:, ~fwd] = self._bwd.sol(flat[~fwd])
        return out.reshape((self.y0.size,) + t.shape)


def sech_basis_closed_form(w1: float, w2: float, k: float, t0: float, t):
    """Hypergeometric solution of q'' + (w1 + w2 sech^2 k(t-t0)) q = 0.

    Returns (q1, q1_dot, mu, nu) with mu = sqrt(w1)/k, nu = sqrt(1/4 + w2/k^2).
    The partner solution is q2 = conj(q1) and W(q1, q2) = -2i sqrt(w1).  The
    series argument is x = (1 - y)/2 with y = tanh k(t - t0); it approaches 1
    as t -> -inf, where convergence is slow, so callers should keep
    t >= t0 - 1.1/k.
    """
    mu = math.sqrt(w1) / k
    nu = math.sqrt(0.25 + w2 / k**2)
    a, b, c = 0.5 + nu, 0.5 - nu, 1 - 1j * mu
    s = k * (float(t) - t0)
    # overflow-free forms of x, 1 - y, 1 + y
    x = 1.0 / (1.0 + math.exp(2 * s)) if s > -350 else 1.0
    one_m_y = 2.0 * x
    one_p_y = 2.0 / (1.0 + math.exp(-2 * s)) if s < 350 else 2.0
    pref = one_m_y ** (-0.5j * mu) * one_p_y ** (0.5j * mu)
    F = gauss_2f1(a, b, c, x)
    dF = (a * b / c) * gauss_2f1(a + 1, b + 1, c + 1, x)
    q1 = pref * F
    # d/dt: pref' = i mu k pref,  dx/dt = -(k/2)(1 - y^2)
    q1_dot = k * (1j * mu * pref * F - 0.5 * one_m_y * one_p_y * pref * dF)
    return complex(q1), complex(q1_dot), mu, nu


class _CosineBasis:
    def __init__(self, profile: CosineDrive):
        self.p = profile
        self.w = 2 * profile.omega0
        self.w0 = self.w

    def basis(self, t):
        w = self.w
        c, s = np.cos(w * t), np.sin(w * t)
        return c, -w * s, s, w * c

    def trajectory(self, t):
        p, w = self.p, self.w
        th = w * t + p.phase
        g = p.amplitude * np.cos(th)
        gd = -w * p.amplitude * np.sin(th)
        if p.F0:
            if p.resonant:
                k = p.F0 / w
                g = g + k * t * np.sin(w * t)
                gd = gd + k * (np.sin(w * t) + w * t * np.cos(w * t))
            else:
                C = 2 * p.F0 / (w**2 - p.alpha**2)
                g = g + C * np.cos(p.alpha * t)
                gd = gd - C * p.alpha * np.sin(p.alpha * t)
        return g, gd


class _SechBasis:
    def __init__(self, profile: SechPulse):
        self.p = profile
        w1, w2 = 4 * profile.omega1, 4 * profile.omega2_amp
        q, qd, self.mu, self.nu = sech_basis_closed_form(w1, w2, profile.k, profile.t0, profile.t0)
        self.w0 = -2j * math.sqrt(w1)

        def rhs(t, y):
            return np.array([y[1], -4.0 * profile.omega2(t) * y[0]])

        self.sol = _OdeSolution(rhs, np.array([q, qd], dtype=complex), profile.t0, profile.window,
                                max_step=min(0.05, 0.05 / profile.k))

    def basis(self, t):
        q, qd = self.sol(t)
        return q, qd, np.conj(q), np.conj(qd)

    def trajectory(self, t):
        q, qd = self.sol(t)
        g1, g2 = self.p.gamma1, self.p.gamma2
        return g1 * q.real + g2 * q.imag, g1 * qd.real + g2 * qd.imag


class _CustomBasis:
    def __init__(self, profile: CustomProfile):
        self.p = profile
        w_ref = 2 * math.sqrt(float(profile.omega2(profile.t_ref)))
        self.w0 = w_ref

        def rhs(t, y):
            w = 4.0 * float(profile.omega2_fn(t))
            return np.array([y[1], -w * y[0], y[3], -w * y[2], y[5], -w * y[4] + 2 * float(profile.force_fn(t))])

        y0 = np.array([1.0, 0.0, 0.0, w_ref, profile.gamma0, profile.gamma_dot0])
        self.sol = _OdeSolution(rhs, y0, profile.t_ref, profile.window)

    def basis(self, t):
        q1, q1d, q2, q2d, _, _ = self.sol(t)
        return q1, q1d, q2, q2d

    def trajectory(self, t):
        y = self.sol(t)
        return y[4], y[5]


# ---------------------------------------------------------------------------
# The layer

class ClassicalLayer:
    """Basis, Ermakov amplitude, trajectory and integrals for one (profile, params) pair."""

    def __init__(self, profile, params: ErmakovParams):
        profile.validate()
        self.profile = profile
        if profile.kind == "cosine":
            self._b = _CosineBasis(profile)
        elif profile.kind == "sech":
            if not math.isclose(params.a, params.c, rel_tol=1e-14):
                raise DomainError("the sech profile requires a = c so that sigma is real")
            self._b = _SechBasis(profile)
        elif profile.kind == "custom":
            self._b = _CustomBasis(profile)
        else:
            raise DomainError(f"unknown profile kind {profile.kind!r}")
        self.w0 = self._b.w0
        self.params = params.resolve(self.w0)

    @property
    def tags(self) -> tuple:
        return self.profile.tags

    def _check_window(self, t):
        win = self.profile.window
        if win is not None:
            t = np.asarray(t)
            if np.any(t < win[0] - 1e-12) or np.any(t > win[1] + 1e-12):
                raise DomainError(f"t={t} outside the working window {win}")

    def basis(self, t):
        self._check_window(t)
        return self._b.basis(np.asarray(t, dtype=float))

    def sigma(self, t):
        """(sigma, sigma_dot) at t (array friendly)."""
        q1, q1d, q2, q2d = self.basis(t)
        a, b, c = self.params.a, self.params.b, self.params.c
        S = a * q1 * q1 + b * q1 * q2 + c * q2 * q2
        Sd = 2 * a * q1 * q1d + b * (q1d * q2 + q1 * q2d) + 2 * c * q2 * q2d
        S, Sd = np.real(S), np.real(Sd)
        if np.any(S <= 0):
            raise InvariantViolation(f"sigma^2 <= 0 at t={t}")
        sig = np.sqrt(S)
        return sig, Sd / (2 * sig)

    def trajectory(self, t):
        self._check_window(t)
        return self._b.trajectory(np.asarray(t, dtype=float))

    def _integrate(self, f, t):
        # fixed subdivision keeps the integral a smooth function of t
        t = float(t)
        if t == 0.0:
            return 0.0
        n = max(1, int(math.ceil(abs(t) / 0.5)))
        edges = np.linspace(0.0, t, n + 1)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                # the tolerance sits at the roundoff floor on purpose
                warnings.simplefilter("ignore", IntegrationWarning)
                val, _ = quad(f, lo, hi, epsabs=1e-15, epsrel=1e-14, limit=200)
            total += val
        return total

    def tau(self, t) -> float:
        self._check_window(t)
        return self._integrate(lambda s: 1.0 / float(self.sigma(s)[0]) ** 2, t)

    def work(self, t) -> float:
        if self.profile.kind == "sech":
            return 0.0
        self._check_window(t)
        return self._integrate(lambda s: float(self.profile.force(s)) * float(self.trajectory(s)[0]), t)

    def state(self, t: float, with_integrals: bool = True) -> ClassicalState:
        """Classical state at t; ``with_integrals=False`` skips tau and the
        work integral (they are set to nan), which is all a potential or a
        density needs."""
        t = float(t)
        sig, sigd = self.sigma(t)
        g, gd = self.trajectory(t)
        sig, sigd, g, gd = float(sig), float(sigd), float(g), float(gd)
        return ClassicalState(
            t=t, sigma=sig, sigma_dot=sigd, gamma=g, gamma_dot=gd, W=sig * gd - sigd * g,
            tau=self.tau(t) if with_integrals else math.nan, omega2=float(self.profile.omega2(t)),
            force=float(self.profile.force(t)), work=self.work(t) if with_integrals else math.nan,
            tags=self.tags)


@lru_cache(maxsize=64)
def layer(profile, params: ErmakovParams) -> ClassicalLayer:
    return ClassicalLayer(profile, params)


def linear_basis(profile, t, params: ErmakovParams | None = None):
    """(q1, q1_dot, q2, q2_dot, w0) at t."""
    lay = layer(profile, params or _basis_only_params(profile))
    q1, q1d, q2, q2d = lay.basis(t)
    return q1, q1d, q2, q2d, lay.w0


def _basis_only_params(profile):
    # the Ermakov coefficients do not affect the basis; pick values valid for any w0
    return ErmakovParams(a=1.0, c=1.0) if profile.kind == "sech" else ErmakovParams(a=1e6, c=1e6)


def classical_state(profile, params: ErmakovParams, t: float) -> ClassicalState:
    return layer(profile, params).state(t)


def kinematic_state(profile, params: ErmakovParams, t: float) -> ClassicalState:
    """Classical state without the tau and work integrals."""
    return layer(profile, params).state(t, with_integrals=False)


def phase_time(profile, params: ErmakovParams, t: float) -> float:
    return layer(profile, params).tau(t)


def wronskian(profile, t, params: ErmakovParams | None = None):
    q1, q1d, q2, q2d, _ = linear_basis(profile, t, params)
    return q1 * q2d - q1d * q2


# ---------------------------------------------------------------------------
# Closed-form cross-checks

def phase_time_closed_form(profile, params: ErmakovParams, t: float, samples_per_unit: int = 4000):
    """tau from (1/2) arctan[(w0/4)(b + 2 c q2/q1)], branch-unwrapped from 0 to t.

    For complex arguments arctan X = (1/2i) ln Z with Z = (1 + iX)/(1 - iX), so
    Re arctan = arg(Z)/2 and its imaginary part should stay constant.
    Returns (tau, spread of the imaginary part).
    """
    lay = layer(profile, params)
    p = lay.params
    n = max(64, int(abs(t) * samples_per_unit))
    ts = np.linspace(0.0, t, n + 1)
    q1, _, q2, _ = lay.basis(ts)
    X_q1 = (p.w0 / 4) * (p.b * q1 + 2 * p.c * q2)  # X * q1, avoids dividing by q1
    Z = (q1 + 1j * X_q1) / (q1 - 1j * X_q1)
    re_arctan = 0.5 * np.unwrap(np.angle(Z))
    im_arctan = -0.5 * np.log(np.abs(Z))
    tau = 0.5 * (re_arctan[-1] - re_arctan[0])
    return float(tau), float(np.ptp(im_arctan))


def harmonic_closed_form(params: ErmakovParams, amplitude: float, phase: float, t):
    """sigma^2 and gamma for Omega = 1, F = 0 (squeezed and displaced states)."""
    a, c = params.a, params.c
    s2 = (a + c) / 2 + (a - c) / 2 * np.cos(4 * t) + math.sqrt(a * c - 1) * np.sin(4 * t)
    return s2, amplitude * np.cos(2 * t + phase)


def cosine_work_closed_form(profile: CosineDrive, t: float) -> float:
    """Integral of F gamma over [0, t] for the cosine drive."""
    p = profile
    F0, al, A, ph = p.F0, p.alpha, p.amplitude, p.phase
    w = 2 * p.omega0
    if F0 == 0:
        return 0.0
    hom = (math.sin((w + al) * t + ph) - math.sin(ph)) / (w + al)
    if math.isclose(w, al, rel_tol=1e-12):
        hom += t * math.cos(ph)
    else:
        hom += (math.sin((w - al) * t + ph) - math.sin(ph)) / (w - al)
    total = F0 * A * 0.5 * hom
    if p.resonant:
        C = F0 * F0 / w
        total += (C / 2) * (-t * math.cos(2 * w * t) / (2 * w) + math.sin(2 * w * t) / (4 * w * w))
    else:
        C = 2 * F0 / (w * w - al * al)
        sq = t if al == 0 else t / 2 + math.sin(2 * al * t) / (4 * al)
        total += F0 * C * sq
    return total
