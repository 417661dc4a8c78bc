import math

import numpy as np
import pytest

from convhelm.dispersion import (
    Element,
    ExpansionBreakdownError,
    FlowParams,
    Formulation,
    InvalidProbeError,
    NoPositiveRootError,
    QuadraticInOmega,
    SchemeId,
    WaveProbe,
    a1_closed,
    a1_mismatch,
    a1_numeric,
    all_schemes,
    continuous_group_velocity,
    continuous_omega,
    discrete_group_velocity,
    dispersion_quotients,
    fd_gradient_levels,
    helmholtz_k3,
    kappa_for_H,
    kappa_limit,
    transformed_wave_residual,
    scheme_omega,
    scheme_quadratic,
)

CONV = {e: SchemeId(e) for e in Element}
HELM = {e: SchemeId(e, Formulation.HELMHOLTZ) for e in Element}


def test_flow_params_validation():
    assert FlowParams(0.5).a11 == 0.75
    np.testing.assert_array_equal(FlowParams(0.5).anisotropy, np.diag([0.75, 1.0]))
    for bad in (-0.1, 1.0, 1.5, float("nan")):
        with pytest.raises(ValueError):
            FlowParams(bad)


def test_scheme_id_parse_roundtrip():
    for s in all_schemes():
        assert SchemeId.parse(str(s)) == s
    assert SchemeId.parse("rt1nc") == SchemeId(Element.RT1NC)
    with pytest.raises(ValueError):
        SchemeId.parse("Q2")


def test_probe_range():
    for bad in (0.0, -0.1, math.pi, 4.0):
        with pytest.raises(InvalidProbeError):
            WaveProbe(bad, 0.0)
    with pytest.raises(InvalidProbeError):
        WaveProbe(0.5, float("inf"))


def test_quadratic_roots_stable():
    q = QuadraticInOmega(1.0, -1e8, 1.0)
    lo, hi = q.roots()
    assert math.isclose(lo, 1e-8, rel_tol=1e-12)
    assert math.isclose(hi, 1e8, rel_tol=1e-12)
    with pytest.raises(NoPositiveRootError):
        QuadraticInOmega(1.0, 0.0, 1.0).roots()
    with pytest.raises(NoPositiveRootError):
        QuadraticInOmega(1.0, 3.0, 2.0).positive_root()


def test_continuous_relation():
    assert continuous_omega(2.0, 0.0, 0.5) == 3.0
    assert math.isclose(continuous_omega(1.0, math.pi, 0.5), 0.5)
    assert math.isclose(continuous_group_velocity(0.0, 0.3), 1.3)


def test_helmholtz_k3():
    assert helmholtz_k3(1.0, 1.0, 0.5) == 2.0
    assert helmholtz_k3(0.37, 0.9, 0.0) == 0.37
    # kappa3 = kappa1 + (omega h) M / (1 - M^2) with omega h from the continuous relation
    k, t, m = 0.7, 0.4, 0.6
    k1 = k * math.cos(t)
    wh = continuous_omega(k, t, m)
    assert math.isclose(helmholtz_k3(k1, k, m), k1 + wh * m / (1 - m * m), rel_tol=1e-14)


@pytest.mark.parametrize("element, exact", [(Element.P1C, 1 / 24), (Element.RT1NC, 1 / 96), (Element.RT2NC, 1 / 48)])
def test_a1_closed_spot_values(element, exact):
    assert math.isclose(a1_closed(CONV[element], 0.0, 0.0).value, exact, rel_tol=1e-15)


def test_a1_closed_rt1_high_mach():
    val = a1_closed(CONV[Element.RT1NC], 0.9, math.pi).value
    assert math.isclose(val, abs(4 + 7.2 - 9.72) / (384 * 0.1**3), rel_tol=1e-12)


def test_a1_numeric_rt1_origin():
    est = a1_numeric(CONV[Element.RT1NC], 0.0, 0.0)
    assert abs(est.value - 1 / 96) < 1e-8
    assert est.error_bar < 1e-8
    assert len(est.ladder) == 5


def test_a1_numeric_breakdown_signal(monkeypatch):
    # a remainder that is not h^2-like must be reported, not extrapolated
    import convhelm.dispersion as d

    def bad_ladder(scheme, flow, theta, h0=0.1, levels=5):
        hs = h0 * 0.5 ** np.arange(levels)
        return hs, hs**2 * (1.0 + np.array([0.0, 0.1, -0.1, 0.3, -0.4]))

    monkeypatch.setattr(d, "error_ladder", bad_ladder)
    with pytest.raises(ExpansionBreakdownError):
        d.a1_numeric(CONV[Element.P1C], 0.0, 0.0)


def test_a1_mismatch_absolute_at_zero():
    assert a1_mismatch(1e-12, 0.0) == 1e-12
    assert math.isclose(a1_mismatch(1.1, 1.0), 0.1)


def test_rt2_helmholtz_is_twice_rt1():
    for m in (0.0, 0.4, 0.95):
        for t in (0.0, 1.0, 2.5):
            assert a1_closed(HELM[Element.RT2NC], m, t).value == 2.0 * a1_closed(HELM[Element.RT1NC], m, t).value


def test_helmholtz_blowup_increasing():
    ms = np.linspace(0.9, 0.99, 10)
    for e in Element:
        vals = [a1_closed(HELM[e], m, 0.0).value for m in ms]
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] > 10 * vals[0]


def test_convected_and_helmholtz_agree_without_flow():
    for e in Element:
        for k, t in ((0.3, 0.2), (1.5, 2.0), (2.9, 0.0)):
            p = WaveProbe(k, t)
            assert scheme_omega(CONV[e], p, 0.0) == pytest.approx(scheme_omega(HELM[e], p, 0.0), rel=1e-15)


def test_helmholtz_probe_beyond_kappa3_limit():
    # kappa3 = kappa / (1 - M) = 2 kappa at theta = 0, M = 0.5
    scheme_quadratic(HELM[Element.P1C], WaveProbe(1.5, 0.0), 0.5)
    with pytest.raises(InvalidProbeError):
        scheme_quadratic(HELM[Element.P1C], WaveProbe(2.0, 0.0), 0.5)
    assert kappa_limit(HELM[Element.P1C], 0.5, 0.0) < math.pi / 2


def test_quotients_tend_to_one():
    for s in all_schemes():
        pt = dispersion_quotients(s, 0.3, 0.7, 1e-3)
        assert abs(pt.q_p - 1) < 1e-5
        assert abs(pt.q_g - 1) < 1e-5


def test_group_velocity_richardson_ratio():
    # central differences have an h^2 error, so successive changes shrink by ~4
    probe = WaveProbe(0.8, 0.6)
    for s in all_schemes((Formulation.CONVECTED,)):
        g = fd_gradient_levels(s, probe, 0.4, step=1e-2, levels=3)
        ratio = np.linalg.norm(g[1] - g[0]) / np.linalg.norm(g[2] - g[1])
        assert abs(ratio - 4.0) < 0.01
    v_small = discrete_group_velocity(CONV[Element.RT1NC], WaveProbe(1e-3, 0.6), 0.4)
    assert abs(v_small - continuous_group_velocity(0.6, 0.4)) < 1e-6


def test_kappa_for_h_inverts():
    for s in all_schemes():
        k = kappa_for_H(s, 0.6, 0.5, 0.3)
        assert scheme_omega(s, WaveProbe(k, 0.5), 0.6) == pytest.approx(0.3, rel=1e-13)
    with pytest.raises(ValueError):
        kappa_for_H(CONV[Element.P1C], 0.0, 0.0, -1.0)


def test_transformed_wave_zero_flow_and_exactness():
    pts = np.random.default_rng(0).uniform(size=(100, 2))
    assert transformed_wave_residual(1.0, 0.0, 0.0, pts) < 1e-13
    assert transformed_wave_residual(1.0, 0.0, 0.5, pts) <= 1e-12 * 1.5**2
    assert transformed_wave_residual(1.0, 0.0, 0.5, []) == 0.0
