import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from convhelm.dispersion import (
    Element,
    FlowParams,
    Formulation,
    InvalidProbeError,
    QuadraticInOmega,
    SchemeId,
    WaveProbe,
    a1_closed,
    dispersion_quotients,
    scheme_omega,
)
from convhelm.fem.oracle import stencil_oracle
from convhelm.linsolve import BandedComplexMatrix, factorize, relative_residual

schemes = st.sampled_from([SchemeId(e, f) for e in Element for f in Formulation])
kappas = st.floats(0.01, 2.5)
thetas = st.floats(-math.pi, math.pi)
machs = st.floats(0.0, 0.95)


@settings(max_examples=60, deadline=None)
@given(schemes, kappas, thetas, machs)
def test_oracle_matches_closed_form(scheme, kappa, theta, m):
    probe = WaveProbe(kappa, theta)
    try:
        ref = stencil_oracle(scheme, probe, m).positive_root()
    except InvalidProbeError:
        assume(False)
    assert math.isclose(scheme_omega(scheme, probe, m), ref, rel_tol=1e-11)


@settings(max_examples=60, deadline=None)
@given(schemes, kappas, thetas, machs)
def test_reflection_symmetry(scheme, kappa, theta, m):
    try:
        a = dispersion_quotients(scheme, m, theta, kappa)
        b = dispersion_quotients(scheme, m, -theta, kappa)
    except InvalidProbeError:
        assume(False)
    assert math.isclose(a.H, b.H, rel_tol=1e-12)
    assert math.isclose(a.q_p, b.q_p, rel_tol=1e-12)
    assert math.isclose(a.q_g, b.q_g, rel_tol=1e-12)


@given(st.floats(0.0, 0.99), st.floats(0.0, math.pi))
def test_a1_nonnegative_and_rt2_helmholtz_double(m, t):
    for e in Element:
        for f in Formulation:
            assert a1_closed(SchemeId(e, f), m, t).value >= 0.0
    r1 = a1_closed(SchemeId(Element.RT1NC, Formulation.HELMHOLTZ), m, t).value
    r2 = a1_closed(SchemeId(Element.RT2NC, Formulation.HELMHOLTZ), m, t).value
    assert r2 == 2.0 * r1


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
def test_quadratic_roots_satisfy_equation(a, b, c):
    assume(abs(a) > 1e-3 and b * b - 4 * a * c >= 0)
    q = QuadraticInOmega(a, b, c)
    scale = abs(a) + abs(b) + abs(c)
    for r in q.roots():
        assert abs(a * r * r + b * r + c) <= 1e-9 * scale * max(1.0, r * r)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 30), st.integers(0, 4), st.integers(0, 4), st.integers(0, 2**31))
def test_band_solver_residual(n, kl, ku, seed):
    kl, ku = min(kl, n - 1), min(ku, n - 1)
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    i, j = np.indices((n, n))
    a[(j - i > ku) | (i - j > kl)] = 0.0
    a += (kl + ku + 2) * np.eye(n)
    band = BandedComplexMatrix.from_dense(a, kl, ku)
    b = rng.standard_normal(n) + 0j
    x = factorize(band).solve(b)
    assert relative_residual(a, x, b) <= 1e-12


@given(machs)
def test_flow_params_roundtrip(m):
    f = FlowParams(m)
    assert FlowParams.coerce(f) is f
    assert f.a11 == 1.0 - m * m
