"""Propagate phi_1 of the m=4 invariant under V_1 and compare with the exact solution.

The second run evolves the same state under the undeformed H_0: <I_1> then
drifts, which is the point of the check.

Run:  python3 demos/crank_nicolson.py   (about 15 s)
"""
import math

from paramosc import classical, oracle, states
from paramosc.classical import CosineDrive, ErmakovParams
from paramosc.factorization import SeedSpec

spec = SeedSpec.one_step(4)
profile, params = CosineDrive(amplitude=1.0, F0=1.0, alpha=3.0), ErmakovParams(math.sqrt(2), math.sqrt(2))
grid = states.default_grid(classical.classical_state(profile, params, 0.0))
psi0 = states.schrodinger_solution(1, 1, spec, profile, params, grid, 0.0)

traj = oracle.propagate(oracle.PropagationPlan(1, spec, profile, params, grid, snapshot_every=1600), psi0)
overlaps = oracle.overlap_series(traj, {1: 1.0})
_, inv = oracle.invariant_drift(traj, 1, spec)
print("     t    1-overlap    <I1>")
for t, o, i in zip(traj.times, overlaps, inv):
    print(f"{t:6.3f}  {1 - o:10.2e}  {i:.8f}")

wrong = oracle.PropagationPlan(0, spec, profile, params, grid, snapshot_every=1600, monitor=False)
drift, _ = oracle.invariant_drift(oracle.propagate(wrong, psi0), 1, spec)
print(f"under H_0 instead: <I1> drifts by {drift:.2f}")
