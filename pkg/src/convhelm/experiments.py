"""Sweep drivers behind the CLI: dispersion quotients, A1 tables, FEM error sweeps.

Each driver expands a :class:`SweepConfig` into independent tasks, maps them
over an optional process pool, and returns rows sorted by
``(scheme, formulation, M, theta, abscissa)`` so output never depends on
evaluation order.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from convhelm.config import A1_MACHS, PAPER_MACHS, PAPER_THETAS, SweepConfig
from convhelm.dispersion import (
    DispersionError,
    Element,
    FlowParams,
    Formulation,
    SchemeId,
    WaveProbe,
    a1_closed,
    a1_mismatch,
    a1_numeric,
    dispersion_quotients,
    kappa_for_H,
    kappa_limit,
    scheme_omega,
)
from convhelm.fem.solve import mesh_size_for, solve_plane_wave
from convhelm.svg import line_chart

QUOTIENT_COLUMNS = ("scheme", "formulation", "M", "theta", "H", "q_p", "q_g", "kappa")
A1_COLUMNS = (
    "scheme", "formulation", "M", "theta",
    "A1_closed", "A1_numeric", "rel_err", "extrapolation_residual",
)
FEM_COLUMNS = ("scheme", "M", "theta", "omega", "n", "h", "err_energy", "wall_time", "residual", "n_dofs")


class MemoryCapError(RuntimeError):
    def __init__(self, report: str):
        super().__init__(report)
        self.report = report


def _map(func, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))


def _flatten(chunks):
    return [row for chunk in chunks for row in chunk]


def _fmt(value) -> str:
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def write_csv(path: Path, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])
    return path


def theta_tag(theta: float) -> str:
    return f"{theta / math.pi:.4g}pi"


# -- dispersion quotients -----------------------------------------------------


@dataclass(frozen=True)
class QuotientTask:
    scheme: SchemeId
    mach: float
    theta: float
    h_max: float
    samples: int
    grid: str


def kappa_samples(task: QuotientTask) -> np.ndarray:
    """Kappa values whose H covers ``(0, h_max]``; clipped at the admissible limit."""
    flow = FlowParams(task.mach)
    limit = kappa_limit(task.scheme, flow, task.theta)
    try:
        k_max = kappa_for_H(task.scheme, flow, task.theta, task.h_max)
    except DispersionError:
        k_max = limit
    if task.grid == "H":
        hs = task.h_max * np.arange(1, task.samples + 1) / task.samples
        ks = []
        for H in hs:
            try:
                ks.append(kappa_for_H(task.scheme, flow, task.theta, float(H)))
            except DispersionError:
                break
        return np.array(ks)
    return k_max * np.arange(1, task.samples + 1) / task.samples


def run_quotient_task(task: QuotientTask) -> list[dict]:
    flow = FlowParams(task.mach)
    rows = []
    for kappa in kappa_samples(task):
        try:
            pt = dispersion_quotients(task.scheme, flow, task.theta, float(kappa))
        except DispersionError:
            continue
        rows.append(
            dict(
                scheme=task.scheme.element.value,
                formulation=task.scheme.formulation.value,
                M=task.mach,
                theta=task.theta,
                H=pt.H,
                q_p=pt.q_p,
                q_g=pt.q_g,
                kappa=float(kappa),
            )
        )
    return rows


def _sort_key(abscissa: str):
    return lambda r: (r["scheme"], r["formulation"], r["M"], r["theta"], r[abscissa])


def quotient_rows(config: SweepConfig) -> list[dict]:
    config = config.with_defaults(PAPER_MACHS, PAPER_THETAS)
    tasks = [
        QuotientTask(SchemeId(e, f), m, t, config.h_max, config.samples, config.grid)
        for e in config.schemes
        for f in config.formulations
        for m in config.machs
        for t in config.thetas
    ]
    rows = _flatten(_map(run_quotient_task, tasks, config.workers))
    return sorted(rows, key=_sort_key("H"))


def quotient_panels(rows: list[dict]) -> dict[tuple[float, float], str]:
    """One SVG per (M, theta) panel showing q_p (solid series) and q_g for every scheme."""
    panels: dict[tuple[float, float], dict] = {}
    for r in rows:
        series = panels.setdefault((r["M"], r["theta"]), {})
        tag = r["scheme"] if r["formulation"] == "convected" else f'{r["scheme"]}/{r["formulation"]}'
        for q in ("q_p", "q_g"):
            xs, ys = series.setdefault(f"{tag} {q}", ([], []))
            xs.append(r["H"])
            ys.append(r[q])
    return {
        key: line_chart(
            series,
            title=f"M = {key[0]:g}, theta = {theta_tag(key[1])}",
            xlabel="H = omega^h h",
            ylabel="dispersion quotient",
        )
        for key, series in sorted(panels.items())
    }


def cmd_quotients(config: SweepConfig) -> list[Path]:
    rows = quotient_rows(config)
    written = [write_csv(config.out / "quotients.csv", QUOTIENT_COLUMNS, rows)]
    if config.svg:
        for (m, t), doc in quotient_panels(rows).items():
            path = config.out / f"quotients_M{m:g}_theta{theta_tag(t)}.svg"
            path.write_text(doc, encoding="utf-8")
            written.append(path)
    return written


# -- A1 table -----------------------------------------------------------------


def run_a1_task(task: tuple[SchemeId, float, float]) -> dict:
    scheme, mach, theta = task
    flow = FlowParams(mach)
    closed = a1_closed(scheme, flow, theta).value
    try:
        est = a1_numeric(scheme, flow, theta)
        numeric, resid = est.value, est.error_bar
    except DispersionError:
        numeric, resid = float("nan"), float("nan")
    rel = a1_mismatch(numeric, closed)
    return dict(
        scheme=scheme.element.value,
        formulation=scheme.formulation.value,
        M=mach,
        theta=theta,
        A1_closed=closed,
        A1_numeric=numeric,
        rel_err=rel,
        extrapolation_residual=resid,
    )


def a1_rows(config: SweepConfig) -> list[dict]:
    config = config.with_defaults(A1_MACHS, PAPER_THETAS)
    tasks = [
        (SchemeId(e, f), m, t)
        for e in config.schemes
        for f in config.formulations
        for m in config.machs
        for t in config.thetas
        if 1.0 + m * math.cos(t) > 0.0
    ]
    return sorted(_map(run_a1_task, tasks, config.workers), key=_sort_key("theta"))


def cmd_a1_table(config: SweepConfig) -> list[Path]:
    rows = a1_rows(config)
    written = [write_csv(config.out / "a1_table.csv", A1_COLUMNS, rows)]
    if config.svg:
        by_theta: dict[float, dict] = {}
        for r in rows:
            series = by_theta.setdefault(r["theta"], {})
            xs, ys = series.setdefault(f'{r["scheme"]}/{r["formulation"]}', ([], []))
            xs.append(r["M"])
            ys.append(r["A1_closed"])
        for t, series in sorted(by_theta.items()):
            doc = line_chart(series, f"A1 at theta = {theta_tag(t)}", "M", "log10 A1", logy=True)
            path = config.out / f"a1_theta{theta_tag(t)}.svg"
            path.write_text(doc, encoding="utf-8")
            written.append(path)
    return written


# -- FEM error sweep ----------------------------------------------------------


def estimate_memory_bytes(element: Element, omega: float) -> tuple[int, float]:
    """DOF count and a rough peak-memory estimate of the sparse LU solve.

    Fill-in of the nested-dissection-like COLAMD ordering grows like
    ``~10 N log2 N`` on these grids (measured up to N ~ 1.3e5); each stored
    entry costs a complex value plus an index.
    """
    n = mesh_size_for(omega)
    n_dofs = (n + 1) ** 2 if Element(element) is Element.P1C else 2 * n * (n + 1)
    fill = 12.0 * n_dofs * math.log2(max(n_dofs, 2))
    return n_dofs, 20.0 * fill + 2000.0 * n_dofs


def sizing_report(config: SweepConfig) -> tuple[float, str]:
    lines = [f"{'scheme':<6} {'omega':>7} {'n':>5} {'dofs':>9} {'est. GB':>8}"]
    worst = 0.0
    for e in config.schemes:
        for w in config.omegas:
            dofs, nbytes = estimate_memory_bytes(e, w)
            worst = max(worst, nbytes / 1e9)
            lines.append(f"{e.value:<6} {w:>7g} {mesh_size_for(w):>5} {dofs:>9} {nbytes / 1e9:>8.2f}")
    lines.append(f"peak estimate {worst:.2f} GB, cap {config.memory_cap_gb:g} GB")
    return worst, "\n".join(lines)


def run_fem_task(task: tuple[Element, float, float, float]) -> dict:
    element, mach, theta, omega = task
    res = solve_plane_wave(element, mach, omega, theta)
    return dict(
        scheme=res.element.value,
        M=res.mach,
        theta=res.theta,
        omega=res.omega,
        n=res.n,
        h=res.h,
        err_energy=res.err_energy,
        wall_time=res.wall_time,
        residual=res.residual,
        n_dofs=res.n_dofs,
    )


def fem_rows(config: SweepConfig) -> list[dict]:
    config = config.with_defaults(PAPER_MACHS, PAPER_THETAS)
    worst, report = sizing_report(config)
    if worst > config.memory_cap_gb:
        raise MemoryCapError(report)
    tasks = [(e, m, t, w) for e in config.schemes for m in config.machs for t in config.thetas for w in config.omegas]
    rows = _map(run_fem_task, tasks, config.workers)
    return sorted(rows, key=lambda r: (r["scheme"], r["M"], r["theta"], r["omega"]))


def cmd_fem_errors(config: SweepConfig) -> list[Path]:
    if Formulation.HELMHOLTZ in config.formulations and Formulation.CONVECTED not in config.formulations:
        raise ValueError("the FEM sweep solves the convected equation only")
    rows = fem_rows(config)
    written = [write_csv(config.out / "fem_errors.csv", FEM_COLUMNS, rows)]
    if config.svg:
        panels: dict[tuple, dict] = {}
        for r in rows:
            series = panels.setdefault((r["M"], r["theta"]), {})
            xs, ys = series.setdefault(r["scheme"], ([], []))
            xs.append(r["omega"])
            ys.append(r["err_energy"])
        for (m, t), series in sorted(panels.items()):
            doc = line_chart(series, f"M = {m:g}, theta = {theta_tag(t)}", "omega", "log10 energy error", logy=True)
            path = config.out / f"fem_errors_M{m:g}_theta{theta_tag(t)}.svg"
            path.write_text(doc, encoding="utf-8")
            written.append(path)
    return written


def quotient_at_H(scheme: SchemeId, flow: FlowParams | float, theta: float, H: float):
    """Quotients at an exact ``H`` (bisection on kappa)."""
    kappa = kappa_for_H(scheme, flow, theta, H)
    pt = dispersion_quotients(scheme, flow, theta, kappa)
    assert math.isclose(pt.H, scheme_omega(scheme, WaveProbe(kappa, theta), flow))
    return pt
