"""Self-check suites run by ``convhelm validate``.

Each suite returns a :class:`SuiteResult`; the report passes only if all do.
The oracle suite takes the closed-form quadratic as a parameter so a
deliberately perturbed relation can be fed through it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from convhelm.dispersion import (
    Element,
    FlowParams,
    Formulation,
    InvalidProbeError,
    QuadraticInOmega,
    SchemeId,
    WaveProbe,
    a1_closed,
    a1_mismatch,
    a1_numeric,
    all_schemes,
    convergence_exponent,
    dispersion_quotients,
    error_ladder,
    expansion_fit,
    helmholtz_k3,
    transformed_wave_residual,
    scheme_omega,
    scheme_quadratic,
)
from convhelm.fem.oracle import stencil_oracle
from convhelm.fem.solve import solve_plane_wave

QuadraticFn = Callable[[SchemeId, WaveProbe, FlowParams], QuadraticInOmega]

GRID_MACHS = (0.0, 0.3, 0.6, 0.9)
GRID_THETAS = (0.0, math.pi / 4, 3 * math.pi / 4, math.pi)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    notes: list[str] = field(default_factory=list)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: worst {self.worst:.3e} (tol {self.tolerance:.1e})"


def random_probes(rng: np.random.Generator, count: int, machs=GRID_MACHS):
    """``(probe, M)`` pairs with kappa in (0.01, 1) and theta in [0, pi]."""
    for _ in range(count):
        yield WaveProbe(float(rng.uniform(0.01, 1.0)), float(rng.uniform(0.0, math.pi))), float(rng.choice(machs))


def oracle_suite(
    quadratic: QuadraticFn = scheme_quadratic, count: int = 100, seed: int = 1, tol: float = 1e-12
) -> SuiteResult:
    """Closed-form roots against roots of the assembled-patch quadratic."""
    rng = np.random.default_rng(seed)
    worst, skipped = 0.0, 0
    for scheme in all_schemes():
        done = 0
        while done < count:
            (probe, m), = random_probes(rng, 1)
            flow = FlowParams(m)
            try:
                ref = stencil_oracle(scheme, probe, flow).positive_root()
            except InvalidProbeError:
                skipped += 1
                continue
            got = quadratic(scheme, probe, flow).positive_root()
            worst = max(worst, abs(got - ref) / abs(ref))
            done += 1
    res = SuiteResult("oracle equivalence", worst <= tol, worst, tol)
    res.notes.append(f"{count} probes per scheme, {skipped} Helmholtz probes beyond the kappa3 limit resampled")
    return res


def a1_suite(tol: float = 1e-6) -> SuiteResult:
    worst = 0.0
    for scheme in all_schemes((Formulation.CONVECTED,)):
        for m in GRID_MACHS:
            for t in GRID_THETAS:
                closed = a1_closed(scheme, m, t).value
                est = a1_numeric(scheme, m, t).value
                worst = max(worst, a1_mismatch(est, closed))
    spots = {Element.P1C: 1 / 24, Element.RT1NC: 1 / 96, Element.RT2NC: 1 / 48}
    for e, exact in spots.items():
        worst = max(worst, abs(a1_closed(SchemeId(e), 0.0, 0.0).value - exact) / exact)
    return SuiteResult("A1 agreement", worst <= tol, worst, tol)


def transformed_wave_suite(tol_factor: float = 1e-10, seed: int = 2) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in (1.0, 3.0):
        for t in (0.0, 0.3 * math.pi):
            for m in (0.5, 0.9):
                pts = rng.uniform(0.0, 1.0, size=(100, 2))
                omega = k * (1 + m * math.cos(t))
                worst = max(worst, transformed_wave_residual(k, t, m, pts) / omega**2)
    return SuiteResult("transformed plane wave residual / omega^2", worst <= tol_factor, worst, tol_factor)


def symmetry_suite(tol: float = 1e-12, seed: int = 3) -> SuiteResult:
    """theta -> -theta invariance of omega^h and both quotients, plus the M = 0 degeneracy."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for scheme in all_schemes():
        for probe, m in random_probes(rng, 20, machs=(0.0, 0.3, 0.6)):
            flow = FlowParams(m)
            try:
                a = dispersion_quotients(scheme, flow, probe.theta, probe.kappa)
                b = dispersion_quotients(scheme, flow, -probe.theta, probe.kappa)
            except InvalidProbeError:
                continue
            for x, y in ((a.H, b.H), (a.q_p, b.q_p), (a.q_g, b.q_g)):
                worst = max(worst, abs(x - y) / abs(x))
        for probe, _ in random_probes(rng, 20):
            conv = scheme_omega(SchemeId(scheme.element), probe, 0.0)
            helm = scheme_omega(SchemeId(scheme.element, Formulation.HELMHOLTZ), probe, 0.0)
            worst = max(worst, abs(conv - helm) / conv)
    return SuiteResult("theta symmetry and M=0 degeneracy", worst <= tol, worst, tol)


def rate_suite(mach: float = 0.6, theta: float = math.pi / 4) -> SuiteResult:
    """Exponent 2 +- 0.05 on the A1 ladder; odd powers <= 1e-8 of the h^2 term."""
    worst_rate, worst_odd = 0.0, 0.0
    for scheme in all_schemes():
        hs, errs = error_ladder(scheme, mach, theta)
        worst_rate = max(worst_rate, abs(convergence_exponent(hs, errs) - 2.0))
        coef = expansion_fit(scheme, mach, theta)
        worst_odd = max(worst_odd, abs(coef[1]) / abs(coef[2]), abs(coef[3]) / abs(coef[2]))
    res = SuiteResult("convergence rate", worst_rate <= 0.05 and worst_odd <= 1e-8, worst_rate, 0.05)
    res.notes.append(f"exponent deviation {worst_rate:.2e}, odd/h^2 coefficient ratio {worst_odd:.2e}")
    return res


def fem_rate_suite(omega: float = 10.0, ns=(16, 32, 64), tol: float = 0.9) -> SuiteResult:
    """Short refinement study of the impedance solve (fitted energy-error rate)."""
    worst = math.inf
    for e in Element:
        for m in (0.0, 0.3):
            res = [solve_plane_wave(e, m, omega, math.pi / 4, n=n) for n in ns]
            rate = convergence_exponent([r.h for r in res], [r.err_energy for r in res])
            worst = min(worst, rate)
    return SuiteResult("FEM energy-error rate", worst >= tol, worst, tol)


def printed_rt1_helmholtz(probe: WaveProbe, flow: FlowParams | float, variant: str) -> float:
    """``omega^h h`` from the printed RT1 Helmholtz-form relation with either denominator."""
    flow = FlowParams.coerce(flow)
    m = flow.mach
    k1, k2 = probe.components
    c2 = math.cos(k2 / 2)
    c3 = math.cos(helmholtz_k3(k1, probe.kappa, flow) / 2)
    num = (c2 + c3) * (1 - c2 * c3) + m * m * c2 * (c3 * c3 - 1)
    den = (c2 + c3) * (2 + c2 * c3) if variant == "product" else (c2 + c3) + (2 + c2 * c3)
    return 2.0 * math.sqrt(6.0 * flow.a11 * num / den)


def resolve_denominator(count: int = 50, seed: int = 4) -> tuple[str, dict[str, float]]:
    """Compare both denominator variants with the patch oracle; return the match."""
    rng = np.random.default_rng(seed)
    scheme = SchemeId(Element.RT1NC, Formulation.HELMHOLTZ)
    errs = {"product": 0.0, "sum": 0.0}
    for probe, m in random_probes(rng, count, machs=(0.0, 0.3, 0.6)):
        try:
            ref = stencil_oracle(scheme, probe, m).positive_root()
        except InvalidProbeError:
            continue
        for v in errs:
            errs[v] = max(errs[v], abs(printed_rt1_helmholtz(probe, m, v) - ref) / ref)
    return min(errs, key=errs.get), errs


def run_all(quadratic: QuadraticFn = scheme_quadratic, fem: bool = True) -> list[SuiteResult]:
    suites = [
        oracle_suite(quadratic),
        a1_suite(),
        transformed_wave_suite(),
        symmetry_suite(),
        rate_suite(),
    ]
    if fem:
        suites.append(fem_rate_suite())
    return suites


def report(results: list[SuiteResult]) -> str:
    lines = []
    for r in results:
        lines.append(r.line())
        lines.extend(f"    {n}" for n in r.notes)
    variant, errs = resolve_denominator()
    lines.append(
        f"RT1 Helmholtz-form denominator: '{variant}' variant matches the patch oracle "
        f"(max rel. error product {errs['product']:.2e}, sum {errs['sum']:.2e})"
    )
    return "\n".join(lines)
