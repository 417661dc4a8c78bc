"""Continuous and discrete dispersion relations for the convected Helmholtz equation.

All discrete relations are handled through the quadratic they satisfy in the
dimensionless frequency ``x = omega^h * h``::

    a x**2 + b x + c = 0

with coefficients that depend only on the dimensionless wave vector
``kappa = k^h h`` and the Mach number.  The positive root is the physical
branch.  Working with the quadratic (instead of the solved-for square-root
form) keeps every relation regular at ``M = 0``.

The coefficients are written so that no term suffers catastrophic
cancellation as ``kappa -> 0`` (``1 - cos u`` is always evaluated as
``2 sin(u/2)**2``).  This matters: the leading error ``omega^h - omega`` is
``O(kappa**3)`` and is extracted numerically from these roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

DENOMINATOR_TOL = 1e-8


class DispersionError(ValueError):
    """Base class for probes a dispersion relation cannot evaluate."""


class InvalidProbeError(DispersionError):
    """Probe outside the relation's validity (vanishing denominator, bad range)."""


class NoPositiveRootError(DispersionError):
    """The discrete relation has no positive real root (evanescent probe)."""


class ExpansionBreakdownError(DispersionError):
    """Richardson ladder does not behave like an even expansion in h."""


class Element(str, Enum):
    P1C = "P1C"
    RT1NC = "RT1NC"
    RT2NC = "RT2NC"


class Formulation(str, Enum):
    CONVECTED = "convected"
    HELMHOLTZ = "helmholtz"


@dataclass(frozen=True)
class FlowParams:
    """Uniform mean flow along x with Mach number ``mach``."""

    mach: float = 0.0

    def __post_init__(self):
        m = float(self.mach)
        if not (0.0 <= m < 1.0) or not math.isfinite(m):
            raise ValueError(f"Mach number must satisfy 0 <= M < 1, got {self.mach!r}")
        object.__setattr__(self, "mach", m)

    @property
    def a11(self) -> float:
        return 1.0 - self.mach**2

    @property
    def anisotropy(self) -> np.ndarray:
        """The diagonal stiffness matrix ``diag(1 - M^2, 1)``."""
        return np.diag([self.a11, 1.0])

    @classmethod
    def coerce(cls, flow: "FlowParams | float") -> "FlowParams":
        return flow if isinstance(flow, cls) else cls(float(flow))


@dataclass(frozen=True)
class SchemeId:
    element: Element
    formulation: Formulation = Formulation.CONVECTED

    def __post_init__(self):
        object.__setattr__(self, "element", Element(self.element))
        object.__setattr__(self, "formulation", Formulation(self.formulation))

    @classmethod
    def parse(cls, text: str) -> "SchemeId":
        """Parse ``"RT1NC"`` or ``"RT1NC/helmholtz"``."""
        elem, _, form = text.partition("/")
        return cls(Element(elem.strip().upper()), Formulation(form.strip().lower() or "convected"))

    def __str__(self) -> str:
        return f"{self.element.value}/{self.formulation.value}"


def all_schemes(formulations: Iterable[Formulation] = tuple(Formulation)) -> list[SchemeId]:
    return [SchemeId(e, f) for f in formulations for e in Element]


@dataclass(frozen=True)
class WaveProbe:
    """Dimensionless wave vector ``kappa * (cos theta, sin theta)``, ``kappa = |k^h| h``."""

    kappa: float
    theta: float

    def __post_init__(self):
        if not (0.0 < self.kappa < math.pi):
            raise InvalidProbeError(f"kappa must lie in (0, pi), got {self.kappa!r}")
        if not math.isfinite(self.theta):
            raise InvalidProbeError(f"theta must be finite, got {self.theta!r}")

    @property
    def components(self) -> tuple[float, float]:
        return self.kappa * math.cos(self.theta), self.kappa * math.sin(self.theta)


@dataclass(frozen=True)
class QuadraticInOmega:
    """``a x^2 + b x + c = 0`` in ``x = omega h``."""

    a: float
    b: float
    c: float

    def roots(self) -> tuple[float, float]:
        disc = self.b * self.b - 4.0 * self.a * self.c
        if disc < 0.0:
            raise NoPositiveRootError(f"complex roots (discriminant {disc:.3e})")
        q = -0.5 * (self.b + math.copysign(math.sqrt(disc), self.b))
        if q == 0.0:
            return 0.0, 0.0
        r1, r2 = q / self.a, self.c / q
        return (r1, r2) if r1 <= r2 else (r2, r1)

    def positive_root(self) -> float:
        lo, hi = self.roots()
        if hi <= 0.0:
            raise NoPositiveRootError(f"no positive root (roots {lo:.6g}, {hi:.6g})")
        return hi


@dataclass(frozen=True)
class DispersionPoint:
    H: float
    q_p: float
    q_g: float
    kappa: float = float("nan")


@dataclass(frozen=True)
class LeadingCoefficient:
    value: float
    scheme: SchemeId
    mach: float
    theta: float
    error_bar: float = 0.0
    ladder: tuple = field(default=(), compare=False, repr=False)


# -- continuous relation ----------------------------------------------------


def continuous_omega(k: float, theta: float, flow: FlowParams | float) -> float:
    """``omega = k1 M + |k| = k (1 + M cos theta)``."""
    flow = FlowParams.coerce(flow)
    if not k > 0.0:
        raise ValueError(f"wavenumber must be positive, got {k!r}")
    return k * (1.0 + flow.mach * math.cos(theta))


def continuous_group_velocity(theta: float, flow: FlowParams | float) -> float:
    m = FlowParams.coerce(flow).mach
    return math.sqrt(1.0 + 2.0 * m * math.cos(theta) + m * m)


def helmholtz_k3(kappa1: float, kappa: float, flow: FlowParams | float) -> float:
    """x-component of the wave ``u = p * exp(i omega M x / (1 - M^2))``."""
    flow = FlowParams.coerce(flow)
    return (kappa1 + kappa * flow.mach) / flow.a11


# -- discrete relations -----------------------------------------------------


def _sinc(u: float) -> float:
    return float(np.sinc(u / math.pi))


def _rt1_coeffs(kx: float, ky: float, m: float) -> tuple[float, float, float]:
    c1, c2 = math.cos(kx / 2), math.cos(ky / 2)
    s1 = math.sin(kx / 2)
    one_minus_c1 = 2.0 * math.sin(kx / 4) ** 2
    one_minus_c2 = 2.0 * math.sin(ky / 4) ** 2
    one_minus_c1c2 = one_minus_c1 + c1 * one_minus_c2
    a = -(c1 + c2) * (2.0 + c1 * c2)
    b = 8.0 * m * s1 * c2 * (2.0 * c1 + c2)
    c = 24.0 * ((c1 + c2) * one_minus_c1c2 - m * m * s1 * s1 * c2)
    return a, b, c


def _rt2_coeffs(kx: float, ky: float, m: float) -> tuple[float, float, float]:
    # printed relation divided through by kx*ky so the axes are regular
    s1h, s2h = math.sin(kx / 2), math.sin(ky / 2)
    cx, cy = math.cos(kx), math.cos(ky)
    sig1, sig2 = _sinc(kx), _sinc(ky)
    a = -(sig2 * (5.0 + cx) + sig1 * (5.0 + cy))
    b = 12.0 * m * (math.sin(kx) * sig2 + s1h * _sinc(kx / 2) * (1.0 + cy))
    c = 24.0 * (2.0 * s1h**2 * sig2 * (1.0 - m * m) + 2.0 * s2h**2 * sig1)
    return a, b, c


def _p1_coeffs(kx: float, ky: float, m: float) -> tuple[float, float, float]:
    d1 = 2.0 * math.sin(kx / 2) ** 2
    d2 = 2.0 * math.sin(ky / 2) ** 2
    a = -(3.0 - d1) * (3.0 - d2)
    b = 6.0 * m * math.sin(kx) * (3.0 - d2)
    c = 6.0 * (3.0 * d1 + 3.0 * d2 - 2.0 * d1 * d2 - m * m * d1 * (3.0 - d2))
    return a, b, c


_COEFFS: dict[Element, Callable[[float, float, float], tuple[float, float, float]]] = {
    Element.RT1NC: _rt1_coeffs,
    Element.RT2NC: _rt2_coeffs,
    Element.P1C: _p1_coeffs,
}


def _quadratic(
    scheme: SchemeId, k1: float, k2: float, m: float, kappa: float | None = None
) -> QuadraticInOmega:
    # kappa may be passed signed to continue kappa3 linearly through zero
    coeffs = _COEFFS[scheme.element]
    if scheme.formulation is Formulation.CONVECTED:
        a, b, c = coeffs(k1, k2, m)
    else:
        kappa = math.hypot(k1, k2) if kappa is None else kappa
        k3 = (k1 + kappa * m) / (1.0 - m * m)
        if abs(k3) >= math.pi:
            raise InvalidProbeError(
                f"{scheme}: transformed component kappa3={k3:.6g} beyond the grid Nyquist limit"
            )
        a, _, c = coeffs(k3, k2, m)
        b, c = 0.0, (1.0 - m * m) * c
    if abs(a) < DENOMINATOR_TOL:
        raise InvalidProbeError(
            f"{scheme}: denominator vanishes at kappa=({k1:.6g}, {k2:.6g}), M={m}"
        )
    return QuadraticInOmega(a, b, c)


def scheme_quadratic(
    scheme: SchemeId, probe: WaveProbe, flow: FlowParams | float
) -> QuadraticInOmega:
    """Quadratic in ``omega h`` whose positive root is the scheme's discrete frequency."""
    flow = FlowParams.coerce(flow)
    k1, k2 = probe.components
    return _quadratic(scheme, k1, k2, flow.mach)


def _omega_h(scheme: SchemeId, k1: float, k2: float, m: float) -> float:
    return _quadratic(scheme, k1, k2, m).positive_root()


def scheme_omega(scheme: SchemeId, probe: WaveProbe, flow: FlowParams | float) -> float:
    """Dimensionless discrete frequency ``omega^h h`` for the probe."""
    flow = FlowParams.coerce(flow)
    k1, k2 = probe.components
    return _omega_h(scheme, k1, k2, flow.mach)


def _central_gradient(f, k1: float, k2: float, step: float) -> np.ndarray:
    return np.array(
        [
            (f(k1 + step, k2) - f(k1 - step, k2)) / (2.0 * step),
            (f(k1, k2 + step) - f(k1, k2 - step)) / (2.0 * step),
        ]
    )


def fd_gradient_levels(
    scheme: SchemeId,
    probe: WaveProbe,
    flow: FlowParams | float,
    step: float | None = None,
    levels: int = 2,
) -> list[np.ndarray]:
    """Central-difference gradients of ``omega^h h`` w.r.t. kappa at steps ``step / 2**j``."""
    m = FlowParams.coerce(flow).mach
    if step is None:
        step = 1e-5 * max(probe.kappa, 0.01)
    k1, k2 = probe.components

    def f(a, b):
        return _omega_h(scheme, a, b, m)

    return [_central_gradient(f, k1, k2, step / 2**j) for j in range(levels)]


def discrete_group_velocity(
    scheme: SchemeId, probe: WaveProbe, flow: FlowParams | float, step: float | None = None
) -> float:
    """``|grad_kappa (omega^h h)|`` from central differences plus one Richardson level."""
    coarse, fine = fd_gradient_levels(scheme, probe, flow, step, levels=2)
    return float(np.linalg.norm(fine + (fine - coarse) / 3.0))


def dispersion_quotients(
    scheme: SchemeId, flow: FlowParams | float, theta: float, kappa: float
) -> DispersionPoint:
    flow = FlowParams.coerce(flow)
    probe = WaveProbe(kappa, theta)
    H = scheme_omega(scheme, probe, flow)
    q_p = kappa * (1.0 + flow.mach * math.cos(theta)) / H
    q_g = continuous_group_velocity(theta, flow) / discrete_group_velocity(scheme, probe, flow)
    return DispersionPoint(H=H, q_p=q_p, q_g=q_g, kappa=kappa)


def kappa_limit(scheme: SchemeId, flow: FlowParams | float, theta: float) -> float:
    """Largest admissible kappa along ``theta`` (grid Nyquist limit, also on kappa3)."""
    flow = FlowParams.coerce(flow)
    limit = math.pi
    if scheme.formulation is Formulation.HELMHOLTZ:
        slope = abs(math.cos(theta) + flow.mach) / flow.a11
        if slope > 0.0:
            limit = min(limit, math.pi / slope)
    return limit * (1.0 - 1e-9)


def kappa_for_H(
    scheme: SchemeId,
    flow: FlowParams | float,
    theta: float,
    H: float,
    tol: float = 1e-15,
) -> float:
    """Invert ``kappa -> omega^h h`` by bisection (the map is increasing on the admissible range)."""
    flow = FlowParams.coerce(flow)
    if H <= 0.0:
        raise ValueError("H must be positive")

    def g(k):
        return scheme_omega(scheme, WaveProbe(k, theta), flow)

    hi = kappa_limit(scheme, flow, theta)
    if g(hi) < H:
        raise InvalidProbeError(f"{scheme}: H={H} not reached below kappa={hi:.6g}")
    lo = 0.0
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) < H:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- leading error coefficients ---------------------------------------------


def a1_closed(scheme: SchemeId, flow: FlowParams | float, theta: float) -> LeadingCoefficient:
    """Closed-form leading coefficient ``A1(M, theta)`` of ``|omega^h - omega|``."""
    flow = FlowParams.coerce(flow)
    m, t = flow.mach, theta
    c = math.cos
    w = 1.0 + m * c(t)
    if w <= 0.0:
        raise InvalidProbeError("1 + M cos(theta) must be positive")
    e = scheme.element
    if scheme.formulation is Formulation.CONVECTED:
        if e is Element.RT1NC:
            num = 2 * (1 + c(4 * t)) + 4 * m * (c(3 * t) - 3 * c(t)) + m * m * (c(4 * t) - 6 * c(2 * t) - 7)
            val = abs(num) / (384 * w**3)
        elif e is Element.RT2NC:
            num = 2 * (1 + c(4 * t)) + 4 * m * (c(3 * t) - c(t)) + m * m * (c(4 * t) - 2 * c(2 * t) - 3)
            val = abs(num) / (192 * w**3)
        else:
            val = abs(3 + c(4 * t) - 4 * m * m * c(t) ** 4) / (96 * w**3)
    else:
        d = 1.0 - m * m
        if e is Element.P1C:
            num = (
                c(t) ** 4 + 4 * m * c(t) ** 3 + 6 * m**2 * c(t) ** 2 + 4 * m**3 * c(t) + m**4
                + d**3 * math.sin(t) ** 4
            )
            val = abs(num) / (24 * d * d * w**4)
        else:
            num = (
                (4 + 10 * m**2 + 28 * m**4 - 7 * m**6)
                + 4 * m * (4 + 11 * m**2 - m**4) * c(t)
                + 4 * m**2 * (11 - 6 * m**2 + 2 * m**4) * c(2 * t)
                + 4 * m * (4 - 3 * m**2 + m**4) * c(3 * t)
                + (4 - 6 * m**2 + 4 * m**4 - m**6) * c(4 * t)
            )
            val = abs(num) / (768 * d * d * w**4)
            if e is Element.RT2NC:
                val *= 2.0
    return LeadingCoefficient(value=val, scheme=scheme, mach=m, theta=theta)


def error_ladder(
    scheme: SchemeId,
    flow: FlowParams | float,
    theta: float,
    h0: float = 0.1,
    levels: int = 5,
) -> tuple[np.ndarray, np.ndarray]:
    """Dispersion error ``|omega^h - omega|`` at ``k = 1`` on ``h = h0 * 2**-m``."""
    flow = FlowParams.coerce(flow)
    omega = continuous_omega(1.0, theta, flow)
    hs = h0 * 0.5 ** np.arange(levels)
    errs = np.array(
        [abs(scheme_omega(scheme, WaveProbe(h, theta), flow) / h - omega) for h in hs]
    )
    return hs, errs


def a1_numeric(
    scheme: SchemeId,
    flow: FlowParams | float,
    theta: float,
    h0: float = 0.1,
    levels: int = 5,
) -> LeadingCoefficient:
    """Estimate ``A1`` by Richardson extrapolation of ``|omega^h - omega| / (omega^3 h^2)``.

    The remainder model is ``r(h) = A1 + c h^2 + O(h^4)``; the estimate comes from
    the finest pair and the change between the last two extrapolants is reported
    as ``error_bar``.  For the Helmholtz form the ladder is shrunk so that the
    transformed component kappa3 (up to ``kappa / (1 - M)``) starts at ``h0``.
    """
    flow = FlowParams.coerce(flow)
    omega = 1.0 + flow.mach * math.cos(theta)
    if omega <= 0.0:
        raise InvalidProbeError("1 + M cos(theta) must be positive")
    if levels < 3:
        raise ValueError("need at least three ladder levels")
    if scheme.formulation is Formulation.HELMHOLTZ:
        h0 *= min(1.0, flow.a11 / max(abs(math.cos(theta) + flow.mach), 1e-300))
    hs, errs = error_ladder(scheme, flow, theta, h0, levels)
    r = errs / (omega**3 * hs**2)
    extrap = (4.0 * r[1:] - r[:-1]) / 3.0
    changes = np.abs(np.diff(extrap))
    estimate = float(extrap[-1])
    # rounding floor of r at the finest level
    noise = 100.0 * np.finfo(float).eps / (omega**2 * hs[-1] ** 2)
    if changes[-1] > max(changes[0], noise):
        raise ExpansionBreakdownError(
            f"{scheme} at M={flow.mach}, theta={theta}: Richardson changes {changes} not decreasing"
        )
    return LeadingCoefficient(
        value=estimate,
        scheme=scheme,
        mach=flow.mach,
        theta=theta,
        error_bar=float(changes[-1]),
        ladder=tuple(zip(hs.tolist(), errs.tolist())),
    )


def a1_mismatch(estimate: float, closed: float, floor: float = 1e-10) -> float:
    """Relative difference, absolute where ``A1`` vanishes (RT at M = 0, theta = pi/4)."""
    diff = abs(estimate - closed)
    return diff / closed if closed > floor else diff


def convergence_exponent(hs: Sequence[float], errs: Sequence[float]) -> float:
    """Least-squares slope of ``log err`` against ``log h``."""
    slope, _ = np.polyfit(np.log(hs), np.log(errs), 1)
    return float(slope)


def reversed_branch_error(scheme: SchemeId, flow: FlowParams | float, theta: float, h: float) -> float:
    """``omega^h(-h) - omega`` with the discrete frequency continued to negative ``h``.

    The wave-vector components (and the transformed component kappa3, which is
    linear in ``h`` along a ray) change sign; the branch through
    ``omega^h h -> 0`` is then the negative root.
    """
    flow = FlowParams.coerce(flow)
    omega = continuous_omega(1.0, theta, flow)
    q = _quadratic(scheme, -h * math.cos(theta), -h * math.sin(theta), flow.mach, kappa=-h)
    lo, _ = q.roots()
    return lo / -h - omega


def expansion_fit(
    scheme: SchemeId,
    flow: FlowParams | float,
    theta: float,
    h0: float = 0.1,
    levels: int = 5,
    powers: Sequence[int] = (1, 2, 3, 4, 5, 6),
) -> dict[int, float]:
    """Least-squares coefficients of ``omega^h - omega`` in powers of ``h``.

    The ladder ``+-h0 * 2**-m`` is sampled on both sides of zero so odd and even
    parts of the expansion separate; an even expansion leaves the odd
    coefficients at rounding level.
    """
    flow = FlowParams.coerce(flow)
    omega = continuous_omega(1.0, theta, flow)
    hs = h0 * 0.5 ** np.arange(levels)
    pos = [scheme_omega(scheme, WaveProbe(h, theta), flow) / h - omega for h in hs]
    neg = [reversed_branch_error(scheme, flow, theta, h) for h in hs]
    x = np.concatenate([hs, -hs])
    y = np.array(pos + neg)
    scale = hs[0]
    basis = np.column_stack([(x / scale) ** p for p in powers])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return {p: float(c) / scale**p for p, c in zip(powers, coef)}


# -- Helmholtz reformulation ------------------------------------------------


def transformed_wave_residual(
    k: float,
    theta: float,
    flow: FlowParams | float,
    sample_points: Iterable[Sequence[float]],
) -> float:
    """Max modulus of ``-div(A grad u) - omega^2/(1-M^2) u`` for ``u = p * alpha``.

    ``p`` is the plane wave ``exp(i k x.e_r)`` solving the convected equation and
    ``alpha(x) = exp(i omega M x / (1 - M^2))``.  Second derivatives of the product
    are taken term by term (product rule), not from a combined symbol.
    """
    flow = FlowParams.coerce(flow)
    m, d = flow.mach, flow.a11
    omega = continuous_omega(k, theta, flow)
    k1, k2 = k * math.cos(theta), k * math.sin(theta)
    beta = omega * m / d
    pts = np.asarray(list(sample_points), dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    p = np.exp(1j * (k1 * x + k2 * y))
    p_x, p_xx, p_yy = 1j * k1 * p, -(k1**2) * p, -(k2**2) * p
    alpha = np.exp(1j * beta * x)
    alpha_x, alpha_xx = 1j * beta * alpha, -(beta**2) * alpha
    u = p * alpha
    u_xx = p_xx * alpha + 2.0 * p_x * alpha_x + p * alpha_xx
    u_yy = p_yy * alpha
    res = -d * u_xx - u_yy - omega**2 / d * u
    return float(np.max(np.abs(res))) if len(res) else 0.0
