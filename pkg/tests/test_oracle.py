import math

import numpy as np
import pytest

from paramosc import classical, oracle, states
from paramosc.classical import CosineDrive, ErmakovParams
from paramosc.errors import ContractError, DomainError, GridError, WindowError
from paramosc.factorization import SeedSpec, potential
from paramosc.grid import Grid

NONE = SeedSpec.none()


def _ground(profile, params, grid, t=0.0):
    return states.eigenfunction(0, 0, NONE, classical.classical_state(profile, params, t), grid)


def test_thomas_matches_banded():
    rng = np.random.default_rng(1)
    n = 64
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    v = rng.normal(size=n)
    a = oracle.cn_step(psi.copy(), v, 0.1, 0.01, "thomas")
    b = oracle.cn_step(psi.copy(), v, 0.1, 0.01, "banded")
    assert np.max(np.abs(a - b)) < 1e-13


def test_cn_step_is_unitary():
    rng = np.random.default_rng(2)
    psi = rng.normal(size=200) + 1j * rng.normal(size=200)
    out = oracle.cn_step(psi.copy(), rng.normal(size=200) * 5, 0.05, 0.01)
    assert abs(np.linalg.norm(out) - np.linalg.norm(psi)) < 1e-12


def test_plan_validation(harmonic, m4):
    g = Grid.centered(0.0, 10.0, 256)
    with pytest.raises(DomainError):
        oracle.PropagationPlan(2, m4, *harmonic, g)
    with pytest.raises(DomainError):
        oracle.PropagationPlan(0, NONE, *harmonic, g, dt=-1.0)
    with pytest.raises(DomainError):
        oracle.PropagationPlan(0, NONE, *harmonic, g, solver="lu")
    p = oracle.PropagationPlan(0, NONE, *harmonic, g, dt=0.3, t_b=1.0)
    assert p.n_steps * p.step == pytest.approx(1.0)
    assert p.to_dict()["k"] == 0


def test_eigenstate_picks_up_dynamical_phase(harmonic):
    g = Grid.centered(0.0, 10.0, 1024)
    psi0 = _ground(*harmonic, g)
    traj = oracle.propagate(oracle.PropagationPlan(0, NONE, *harmonic, g, dt=1e-3, t_b=1.0), psi0)
    assert abs((psi0 * np.exp(-1j)).inner(traj.final) - 1) < 1e-4
    assert traj.norm_drift < 1e-10


def test_solvers_agree_on_trajectory(harmonic):
    g = Grid.centered(0.0, 9.0, 200)
    psi0 = _ground(*harmonic, g)
    finals = [oracle.propagate(oracle.PropagationPlan(0, NONE, *harmonic, g, dt=0.01, t_b=0.2, solver=s),
                               psi0).final for s in ("thomas", "banded")]
    assert (finals[0] - finals[1]).norm() < 1e-12


def test_second_order_in_time(driven):
    g = Grid.centered(0.0, 10.0, 512)
    psi0 = _ground(*driven, g)
    plan = oracle.PropagationPlan(0, NONE, *driven, g, dt=0.02, t_b=0.5)
    diffs, ratios = oracle.self_convergence(plan, psi0, levels=3)
    assert diffs[1] < diffs[0]
    assert abs(ratios[0] - 4) < 0.5


def test_contracts(harmonic):
    g = Grid.centered(0.0, 10.0, 256)
    psi0 = _ground(*harmonic, g)
    plan = oracle.PropagationPlan(0, NONE, *harmonic, g, t_a=0.5, t_b=1.0)
    with pytest.raises(ContractError):
        oracle.propagate(plan, psi0)
    with pytest.raises(ContractError):
        oracle.propagate(oracle.PropagationPlan(0, NONE, *harmonic, g), 2 * psi0)
    with pytest.raises(GridError):
        oracle.propagate(oracle.PropagationPlan(0, NONE, *harmonic, Grid.centered(0.0, 10.0, 300)), psi0)


def test_window_error_when_packet_reaches_wall():
    # the coherent state starts at the centre and swings out to x = 5 at t = pi/4
    prof, par = CosineDrive(amplitude=5.0, phase=math.pi / 2), ErmakovParams(1.0, 1.0)
    g = Grid.centered(0.0, 6.0, 512)
    psi0 = states.schrodinger_solution(0, 0, NONE, prof, par, g, 0.0)
    with pytest.raises(WindowError):
        oracle.propagate(oracle.PropagationPlan(0, NONE, prof, par, g, dt=2e-3, t_b=math.pi / 2,
                                                snapshot_every=20), psi0)


def test_resonant_drive_centroid_follows_minus_gamma():
    # F = F0 cos 2t on Omega = 1 gives the secular particular solution
    # gamma_p = (F0 / 2) t sin 2t, and <x> = -gamma for the ground state
    prof, par = CosineDrive(F0=0.5, alpha=2.0), ErmakovParams(1.0, 1.0)
    g = Grid.centered(0.0, 12.0, 2048)
    psi0 = _ground(prof, par, g)
    traj = oracle.propagate(oracle.PropagationPlan(0, NONE, prof, par, g, dt=1e-3, t_b=3.0,
                                                   snapshot_every=500), psi0)
    t = np.array(traj.times)
    gam = np.array([classical.classical_state(prof, par, s).gamma for s in t])
    assert np.allclose(gam, 0.25 * t * np.sin(2 * t), atol=1e-8)
    assert np.max(np.abs(oracle.mean_position(traj) + gam)) < 1e-4


def test_projections_are_conserved(driven, m4):
    cs0 = classical.classical_state(*driven, 0.0)
    g = states.default_grid(cs0, 6, 2048)
    phis = [states.schrodinger_solution(1, n, m4, *driven, g, 0.0) for n in (0, 2)]
    psi0 = (phis[0] + phis[1]) * (1 / math.sqrt(2))
    traj = oracle.propagate(oracle.PropagationPlan(1, m4, *driven, g, dt=1e-3, t_b=1.0,
                                                   snapshot_every=250), psi0)
    P = oracle.projections(traj, (0, 1, 2))
    assert np.max(np.abs(P - P[0])) < 1e-4
    assert np.allclose(P[0], [0.5, 0.0, 0.5], atol=1e-8)


def test_overlap_and_drift_small_window(driven, m4):
    cs0 = classical.classical_state(*driven, 0.0)
    g = states.default_grid(cs0, 6, 1024)
    psi0 = states.schrodinger_solution(1, 1, m4, *driven, g, 0.0)
    traj = oracle.propagate(oracle.PropagationPlan(1, m4, *driven, g, dt=1e-3, t_b=0.5,
                                                   snapshot_every=100), psi0)
    assert 1 - min(oracle.overlap_series(traj, {1: 1.0})) < 1e-4
    drift, series = oracle.invariant_drift(traj, 1, m4)
    assert drift < 1e-4 and abs(series[0] - 1.0) < 1e-5


def test_potential_matches_factorization_layer(driven, m45):
    g = Grid.centered(0.0, 8.0, 300)
    for k, spec in ((0, NONE), (1, m45.first_step()), (2, m45)):
        plan = oracle.PropagationPlan(k, m45 if k else NONE, *driven, g)
        cs = classical.classical_state(*driven, 0.9)
        assert np.allclose(oracle.potential_on_grid(plan, 0.9), potential(spec, cs, g.x), atol=1e-10)
