"""Rational terms, spectra and a potential snapshot for the m=4 and (4,5) chains.

Run:  python3 demos/rational_potentials.py
"""
import numpy as np

from paramosc import classical, states
from paramosc.classical import CosineDrive, ErmakovParams
from paramosc.factorization import SeedSpec, potential, rational_term

m4, m45 = SeedSpec.one_step(4), SeedSpec.two_step(4, 5)

# exact integer coefficients of the z-dependent deformation
for spec in (m4, m45):
    term = rational_term(spec)
    print(f"{spec.to_dict()}: {term.scale} * ({term.numerator}) / ({term.denominator})")

# the new levels sit below the oscillator ladder
print("k=1 spectrum:", states.spectrum(1, m4, 4).values)
print("k=2 spectrum:", states.spectrum(2, m45, 4).values)

# V_2 on a few points of a driven, squeezed oscillator
profile, params = CosineDrive(amplitude=1.0, F0=1.0, alpha=3.0), ErmakovParams(np.sqrt(2), np.sqrt(2))
x = np.linspace(-4, 4, 9)
for t in (0.0, 0.7, 1.4):
    cs = classical.classical_state(profile, params, t)
    print(f"t={t:.1f} sigma={cs.sigma:.4f} gamma={cs.gamma:+.4f}",
          np.array2string(potential(m45, cs, x), precision=3))
