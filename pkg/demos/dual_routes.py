"""Independent routes to the same objects, compared side by side.

Run:  python3 demos/dual_routes.py
"""
import numpy as np

from paramosc import oracle, states
from paramosc.factorization import SeedSpec

z = np.linspace(-6, 6, 241)

# closed-form polynomials vs repeated application of the raising operators
for k, spec in ((1, SeedSpec.one_step(4)), (2, SeedSpec.two_step(4, 5))):
    for n in range(4):
        a = states.envelope(k, n, spec, "closed")(z)
        b = states.envelope(k, n, spec, "operator")(z)
        print(f"k={k} n={n} max|closed - operator| = {np.max(np.abs(a - b)):.1e}")

# Thomas sweep vs LAPACK banded solve for one Crank-Nicolson step
rng = np.random.default_rng(0)
psi = rng.normal(size=512) + 1j * rng.normal(size=512)
v = 5 * rng.normal(size=512)
a = oracle.cn_step(psi.copy(), v, 0.02, 1e-3, "thomas")
b = oracle.cn_step(psi.copy(), v, 0.02, 1e-3, "banded")
print(f"CN step max|thomas - banded| = {np.max(np.abs(a - b)):.1e}")
