import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paramosc import classical, states
from paramosc.classical import CosineDrive, ErmakovParams
from paramosc.errors import DomainError, GridError
from paramosc.factorization import SeedSpec, superpotential_w1, superpotential_w2
from paramosc.grid import Grid
from paramosc.specfun import RationalFunction


def test_spectra(m4, m45):
    assert states.spectrum(0, SeedSpec.none(), 3).values == (1, 3, 5, 7)
    sp = states.spectrum(1, m4, 3)
    assert sp.values == (-9, 1, 3, 5) and sp.provenance[0] == "missing-state"
    assert states.spectrum(1, SeedSpec.shape_invariant_case(), 2).values == (3, 5, 7)
    sp2 = states.spectrum(2, m45, 3)
    assert sp2.values == (-11, -9, 1, 3) and sp2.provenance[:2] == ("missing-state",) * 2
    with pytest.raises(DomainError):
        states.eigenvalue(2, 0, m4)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_closed_form_normalized(k, m4, m45):
    spec = {0: SeedSpec.none(), 1: m4, 2: m45}[k]
    for n in range(7):
        assert abs(states.envelope(k, n, spec).norm2() - 1) < 1e-12


def test_legacy_two_step_constants_are_off_by_two(m45):
    # the corrected constants normalize; the legacy ones give norm^2 = 1/4 for n >= 1
    assert abs(states.closed_form_envelope(2, 0, m45, legacy=True).norm2() - 1) < 1e-12
    for n in (1, 2, 3):
        assert abs(states.closed_form_envelope(2, n, m45, legacy=True).norm2() - 0.25) < 1e-12


def test_two_step_polynomial_joiner(m45):
    for n in range(4):
        op = states.operator_polynomial_two_step(n, m45)
        assert op == 2 * states.P2(n, 4, 5, "+")
        assert op != 2 * states.P2(n, 4, 5, "-")


@pytest.mark.parametrize("k,spec", [(1, SeedSpec.one_step(4)), (1, SeedSpec.one_step(2)),
                                    (1, SeedSpec.shape_invariant_case()), (2, SeedSpec.two_step(4, 5)),
                                    (2, SeedSpec.two_step(2, 3))])
def test_closed_form_equals_operator_route(k, spec):
    z = np.linspace(-7, 7, 141)
    for n in range(5):
        a = states.envelope(k, n, spec, "closed")
        b = states.envelope(k, n, spec, "operator")
        assert np.allclose(a(z), b(z), atol=1e-13, rtol=1e-12)


def test_missing_states_annihilated_exactly(m4, m45):
    W1 = superpotential_w1(m4).rational
    R = states.envelope(1, 0, m4).rational
    assert states.apply_b_dagger(R, W1).num.is_zero()
    W2 = superpotential_w2(m45).rational
    R2 = states.envelope(2, 0, m45).rational
    assert states.apply_b_dagger(R2, W2).num.is_zero()
    R21 = states.envelope(2, 1, m45).rational
    W1b = superpotential_w1(m45).rational
    assert states.apply_b_dagger(states.apply_b_dagger(R21, W2), W1b).num.is_zero()


def test_proportionality():
    r = RationalFunction(states.P1(2, 4), states.pseudo_hermite_poly(4))
    assert states.proportionality(RationalFunction(3) * r, r) == 3
    assert states.proportionality(r, RationalFunction(states.P1(3, 4))) is None


def test_sign_convention_positive_at_infinity(m45):
    for n in range(5):
        assert states.envelope(2, n, m45)(9.0) > 0


def test_node_counts(m45):
    # n = 1 is the two-lobed density of the two-step family
    z = np.linspace(-8, 8, 20001)
    for n in range(5):
        f = states.envelope(2, n, m45)(z)
        f = f[np.abs(f) > 1e-12]
        # the n-th state in eigenvalue order has n nodes
        assert int(np.sum(np.diff(np.sign(f)) != 0)) == n


def test_narrow_grid_rejected(harmonic):
    cs = classical.classical_state(*harmonic, 0.0)
    with pytest.raises(GridError):
        states.eigenfunction(0, 4, SeedSpec.none(), cs, Grid.centered(0.0, 3.0, 256))


def test_harmonic_limit_is_glauber_state():
    prof, params = CosineDrive(amplitude=1.0, phase=0.4), ErmakovParams(1, 1)
    for t in (0.0, 0.7, 2.0):
        psi = states.schrodinger_solution(0, 0, SeedSpec.none(), prof, params, None, t)
        assert np.max(np.abs(psi.values - states.coherent_state(psi.x, t, 1.0, 0.4))) < 1e-13


def test_squeezed_density():
    params = ErmakovParams(2.0, 0.6)
    for t in (0.3, 1.0):
        cs = classical.classical_state(CosineDrive(), params, t)
        phi = states.eigenfunction(0, 0, SeedSpec.none(), cs)
        assert np.allclose(phi.density(), states.squeezed_density(phi.x, params, t), atol=1e-14)


def test_chi_mutations_differ(driven):
    base = states.chi_phase(1, 2, SeedSpec.one_step(4), *driven, 0.7).chi
    for m in states.MUTATIONS:
        assert abs(states.chi_phase(1, 2, SeedSpec.one_step(4), *driven, 0.7, mutate=m).chi - base) > 1e-3
    with pytest.raises(DomainError):
        states.chi_phase(1, 2, SeedSpec.one_step(4), *driven, 0.7, mutate="bogus")


def test_mean_values_closed_form():
    prof, params = CosineDrive(amplitude=0.8, phase=1.0), ErmakovParams(2.0, 0.6)
    for n in (0, 2):
        for t in (0.1, 1.9):
            xq, pq = states.quadrature_expectations(n, prof, params, t)
            xe, pe = states.harmonic_means(0.8, 1.0, t)
            assert abs(xq - xe) < 1e-9 and abs(pq - pe) < 1e-9


@settings(max_examples=15, deadline=None)
@given(t=st.floats(0.0, 3.0), a=st.floats(0.8, 2.0), k=st.sampled_from([0, 1, 2]))
def test_gram_identity_property(t, a, k):
    c = 1.0 / a + 0.5
    spec = {0: SeedSpec.none(), 1: SeedSpec.one_step(2), 2: SeedSpec.two_step(2, 3)}[k]
    cs = classical.classical_state(CosineDrive(amplitude=0.5, F0=0.5, alpha=3.0), ErmakovParams(a, c), t)
    grid = states.default_grid(cs, 4)
    phis = [states.eigenfunction(k, n, spec, cs, grid) for n in range(5)]
    G = np.array([[p.inner(q) for q in phis] for p in phis])
    assert np.max(np.abs(G - np.eye(5))) < 1e-10


@settings(max_examples=15, deadline=None)
@given(t=st.floats(0.0, 3.0), x=st.floats(-3.0, 3.0))
def test_density_depends_on_z_only(t, x):
    # |phi|^2 sigma is a function of z alone
    prof, params = CosineDrive(amplitude=1.0, F0=1.0, alpha=3.0), ErmakovParams(math.sqrt(2), math.sqrt(2))
    cs = classical.classical_state(prof, params, t)
    xs = np.array([cs.sigma * x - cs.gamma])
    env = states.envelope(1, 1, SeedSpec.one_step(4))
    phi = states.gauge(cs, xs) * env(x)
    assert abs(abs(phi[0]) ** 2 * cs.sigma - env(x) ** 2) < 1e-12
