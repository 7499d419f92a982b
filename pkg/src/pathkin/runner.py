"""Sweep execution, CSV/table rendering and oracle verification."""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kinematics as kin
from .builders import sr_rest_frame_configuration
from .covariant import stencil_derivative
from .geometry import TangentVector
from .scenario import VECTOR_QUANTITIES, Scenario
from .sr import (
    doppler_energy,
    doppler_source_energy,
    lorentz_factor,
    sr_deviation_quantities,
    sr_relative_energy,
)
from .transport import (
    ConnectionTransport,
    TransportKind,
    composition_residual,
    metric_residual,
    scaling_residual,
)

__all__ = [
    "DEGENERATE",
    "run_scenario",
    "header",
    "format_csv",
    "format_table",
    "CheckResult",
    "VerificationReport",
    "verify",
]

DEGENERATE = "DEGENERATE"


# -- run -----------------------------------------------------------------------

def header(sc: Scenario) -> list:
    dim = sc.config.chart.dim
    cols = ["s"]
    for q in sc.outputs:
        if q in VECTOR_QUANTITIES:
            cols += [f"{q}_{i}" for i in range(dim)]
        else:
            cols.append(q)
    return cols


def _row(sc: Scenario, s: float) -> list:
    cfg = sc.config
    dcfg = cfg.derivative_config()
    vec = {
        "dV21": lambda: kin.relative_velocity(cfg, s),
        "h21": lambda: kin.deviation_vector(cfg, s),
        "V21": lambda: kin.deviation_velocity(cfg, s, dcfg),
        "dA21": lambda: kin.relative_acceleration(cfg, s, dcfg),
        "A21": lambda: kin.deviation_acceleration(cfg, s, dcfg),
        "dp21": lambda: kin.relative_momentum(cfg, s),
    }
    scal = {
        "E21": lambda: kin.relative_energy(cfg, s, "21"),
        "E12": lambda: kin.relative_energy(cfg, s, "12"),
        "E11": lambda: kin.proper_energy(cfg.particle1, cfg.metric, s),
        "E22": lambda: kin.proper_energy(cfg.particle2, cfg.metric, s),
        "dpi2": lambda: kin.momentum_invariant(cfg, s),
        "E21_via_dp": lambda: kin.energy_via_relative_momentum(cfg, s),
    }
    comps = None
    row = [float(s)]
    for q in sc.outputs:
        if q in vec:
            row += [float(x) for x in vec[q]().comps]
        elif q in scal:
            row.append(float(scal[q]()))
        else:
            if comps is None:
                comps = kin.energy_momentum_components(cfg, s, strict=False)
            val = getattr(comps, q)
            row.append(DEGENERATE if val is None else float(val))
    return row


def run_scenario(sc: Scenario, jobs: int = 1) -> list:
    """One row per sweep sample, in sweep order."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda s: _row(sc, s), sc.s_values))
    return [_row(sc, s) for s in sc.s_values]


def _cell(x) -> str:
    return x if isinstance(x, str) else format(x, ".17g")


def format_csv(cols: list, rows: list) -> str:
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for r in rows:
        buf.write(",".join(_cell(x) for x in r) + "\n")
    return buf.getvalue()


def format_table(cols: list, rows: list) -> str:
    cells = [cols] + [[x if isinstance(x, str) else f"{x:.10g}" for x in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# -- verify --------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    residual: float
    tol: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)


@dataclass
class VerificationReport:
    suite: str
    checks: list = field(default_factory=list)
    convergence: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, residual, tol, note=""):
        # keep the worst residual per identity
        for c in self.checks:
            if c.name == name:
                if residual > c.residual or math.isnan(residual):
                    c.residual, c.note = residual, note or c.note
                return
        self.checks.append(CheckResult(name, float(residual), tol, note))

    def render(self) -> str:
        out = [f"verification suite: {self.suite}"]
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            extra = f"  ({c.note})" if c.note else ""
            out.append(f"  [{flag}] {c.name:<44s} max residual {c.residual:.3e}  tol {c.tol:.1e}{extra}")
        for name, coarse, fine, ratio in self.convergence:
            r = "n/a" if ratio is None else f"{ratio:.2f}"
            out.append(f"  [conv] {name:<44s} {coarse:.3e} -> {fine:.3e}  ratio {r}")
        out.append("result: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(out) + "\n"


def _vmax(a, b) -> float:
    a = a.comps if isinstance(a, TangentVector) else np.asarray(a)
    b = b.comps if isinstance(b, TangentVector) else np.asarray(b)
    return float(np.max(np.abs(a - b), initial=0.0))


def _rel(a, b) -> float:
    return abs(a - b) / max(1.0, abs(b))


def verify(sc: Scenario, suite: str, tol: float | None = None, seed: int = 12345) -> VerificationReport:
    """Compare the pipeline against the oracles of one suite.

    ``tol`` overrides every default tolerance of the suite.
    """
    suites = {"sr": _verify_sr, "euclidean": _verify_euclidean, "axioms": _verify_axioms}
    if suite not in suites:
        raise ValueError(f"unknown suite {suite!r}; expected one of {sorted(suites)}")
    report = VerificationReport(suite)
    suites[suite](sc, report, tol, np.random.default_rng(seed))
    return report


def _common_identities(cfg, s, report, tol, rng):
    """Identities that hold for any linear metric-consistent configuration."""
    t = tol if tol is not None else 1e-9
    g = cfg.metric
    mu1, mu2 = cfg.particle1.mu_at(s), cfg.particle2.mu_at(s)

    dp = kin.relative_momentum(cfg, s)
    dV = kin.relative_velocity(cfg, s)
    rhs = dV * mu2 + kin.to_observer(cfg, s, cfg.particle1.momentum(s)) * (mu2 / mu1 - 1.0)
    report.add("momentum decomposition (linear transport)", _vmax(dp, rhs), t)

    X1 = TangentVector(cfg.particle1.position(s), rng.normal(size=cfg.chart.dim))
    X2 = TangentVector(cfg.particle2.position(s), rng.normal(size=cfg.chart.dim))
    d21 = kin.generic_difference(cfg, s, X1, X2, "21")
    d12 = kin.generic_difference(cfg, s, X1, X2, "12")
    if cfg.transport.kind is TransportKind.FLAT:
        report.add("flat antisymmetry dX12 = -dX21", _vmax(d12, -d21), 0.0 if tol is None else tol)

    if g is None:
        return
    E21 = kin.relative_energy(cfg, s, "21")
    report.add("energy reciprocity", kin.reciprocity_residual(cfg, s), t)
    if cfg.metric_consistent:
        report.add("E21 via relative momentum", _rel(kin.energy_via_relative_momentum(cfg, s, check=False), E21), t)
        inv = kin.invariant_residuals(cfg, s)
        report.add("invariant (dpi21)^2 energy form", inv["energy_form"] / inv["scale"], t)
        report.add("invariant symmetric form", inv["symmetric_form"] / inv["scale"], t)
        report.add("invariant at observer (dp21)^2", inv["observer_square"] / inv["scale"], t)
    for key, val in kin.component_residuals(cfg, s).items():
        report.add(f"adapted component {key}", val, t)
    # sign convention at zero must not matter for non-null velocities
    V1, V2 = cfg.particle1.velocity(s), cfg.particle2.velocity(s)
    if g.square(V1) != 0 and g.square(V2) != 0:
        flipped = cfg.with_numerics(_flip_eps(cfg.numerics))
        report.add("epsilon(0) convention independence",
                   abs(kin.relative_energy(flipped, s, "21") - E21), 0.0 if tol is None else tol)


def _flip_eps(n):
    return kin.Numerics(n.rk4_steps, n.simpson_panels, n.fd_step, n.scheme, n.tol, -n.epsilon_zero)


def _verify_sr(sc, report, tol, rng):
    if sc.sr_specs is None:
        raise ValueError("suite 'sr' needs a minkowski4 scenario")
    cfg, c = sc.config, sc.c
    spec1, spec2 = sc.sr_specs
    t = tol if tol is not None else 1e-9
    oracle = sr_relative_energy(spec1, spec2, c)
    massive = spec1.mass > 0 and spec2.mass > 0
    for s in sc.s_values:
        for name, attr in (("E21", "21"), ("E12", "12")):
            report.add(f"{name} vs closed form", _rel(kin.relative_energy(cfg, s, attr), getattr(oracle, name)), t)
        report.add("E11 vs closed form", _rel(kin.proper_energy(cfg.particle1, cfg.metric, s), oracle.E11), t)
        report.add("E22 vs closed form", _rel(kin.proper_energy(cfg.particle2, cfg.metric, s), oracle.E22), t)
        V1, V2 = cfg.particle1.velocity(s), cfg.particle2.velocity(s)
        report.add("relative velocity V2 - V1", _vmax(kin.relative_velocity(cfg, s), V2.comps - V1.comps), t)
        p1, p2 = cfg.particle1.momentum(s), cfg.particle2.momentum(s)
        report.add("relative momentum p2 - p1", _vmax(kin.relative_momentum(cfg, s), p2.comps - p1.comps), t)
        for label, part in (("particle1", cfg.particle1), ("particle2", cfg.particle2)):
            if part.massless:
                report.add("massless: null worldline", abs(cfg.metric.square(part.velocity(s))), 1e-12)
        if massive:
            dev = sr_deviation_quantities(spec1, spec2, c, s, dt_ds=1.0)
            report.add("lab-frame relative velocity (closed form)", _vmax(kin.relative_velocity(cfg, s), dev.dV21_K), t)
            report.add("lab-frame deviation vector (closed form)", _vmax(kin.deviation_vector(cfg, s), dev.h21_K), t)
            fd_tol = tol if tol is not None else 1e-6
            report.add("lab-frame deviation velocity (closed form)", _vmax(kin.deviation_velocity(cfg, s), dev.V21_K), fd_tol)
            kp = sr_rest_frame_configuration(spec1, spec2, c, _rest_domain(sc, spec1, c), cfg.numerics)
            s1 = (s - spec1.offset[0] / c) / lorentz_factor(spec1.velocity, c)
            devp = sr_deviation_quantities(spec1, spec2, c, s, observer_is_particle1=True)
            report.add("rest-frame relative velocity", _vmax(kin.relative_velocity(kp, s1), devp.dV21_Kp), t)
            report.add("rest-frame deviation vector", _vmax(kin.deviation_vector(kp, s1), devp.h21_Kp), t)
            report.add("rest-frame deviation velocity", _vmax(kin.deviation_velocity(kp, s1), devp.V21_Kp), fd_tol)
        if spec1.mass > 0 and spec2.mass == 0:
            E_src = kin.relative_energy(cfg, s, "21")
            n = spec2.velocity / c
            report.add("Doppler: lab energy from source energy",
                       _rel(doppler_energy(E_src, spec1.velocity, n, c), spec2.energy), t)
            report.add("Doppler: inverse round trip",
                       _rel(doppler_source_energy(spec2.energy, spec1.velocity, n, c), E_src), t)
        _common_identities(cfg, s, report, tol, rng)


def _rest_domain(sc, spec1, c):
    g = lorentz_factor(spec1.velocity, c)
    lo = (sc.s_values[0] - spec1.offset[0] / c) / g
    hi = (sc.s_values[-1] - spec1.offset[0] / c) / g
    return (lo - 1.0, hi + 1.0)


def _verify_euclidean(sc, report, tol, rng):
    cfg = sc.config
    if cfg.transport.kind is not TransportKind.FLAT or cfg.metric is None:
        raise ValueError("suite 'euclidean' needs a flat Cartesian scenario")
    exact = 0.0 if tol is None else tol
    dcfg = cfg.derivative_config()
    r1, r2 = sc.time_rates
    for s in sc.s_values:
        V1, V2 = cfg.particle1.velocity(s), cfg.particle2.velocity(s)
        p1, p2 = cfg.particle1.momentum(s), cfg.particle2.momentum(s)
        report.add("relative velocity = V2 - V1", _vmax(kin.relative_velocity(cfg, s), V2.comps - V1.comps), exact)
        report.add("relative momentum = p2 - p1", _vmax(kin.relative_momentum(cfg, s), p2.comps - p1.comps), exact)
        chord = lambda u: cfg.particle2.position(u) - cfg.particle1.position(u)
        same_stencil = stencil_derivative(chord, s, cfg.observer.domain, dcfg)
        V21 = kin.deviation_velocity(cfg, s, dcfg)
        report.add("deviation velocity = d/ds (x2 - x1)", _vmax(V21, same_stencil), exact)
        analytic = r2 * V2.comps - r1 * V1.comps
        report.add("deviation velocity vs analytic rates", _vmax(V21, analytic), tol if tol is not None else 1e-6)
        _common_identities(cfg, s, report, tol, rng)


def _random_vector(rng, base, dim):
    return TangentVector(base, rng.normal(size=dim))


def _verify_axioms(sc, report, tol, rng, draws: int = 20):
    cfg = sc.config
    T = cfg.transport
    t = tol if tol is not None else 1e-8
    g = cfg.metric
    dim = cfg.chart.dim
    paths = []
    for s in sc.s_values:
        paths += [cfg.gamma(s), cfg.eta(s), cfg.eta_star(s)]
    paths = [p for p in paths if np.max(np.abs(p.eval(1.0) - p.eval(0.0))) > 0]
    if not paths:
        report.add("identity I(s->s) = id", 0.0, 0.0, "all connecting paths are constant")
        return
    samples = []
    for k in range(draws):
        path = paths[k % len(paths)]
        r, s, u = rng.uniform(0.0, 1.0, size=3)
        samples.append((path, r, s, u))
    for path, r, s, u in samples:
        v = _random_vector(rng, path.eval(s), dim)
        w = _random_vector(rng, path.eval(s), dim)
        same = T.apply(path, s, s, v)
        report.add("identity I(s->s) = id", _vmax(same, v), 0.0 if tol is None else tol)
        report.add("composition I(t->r) I(s->t) = I(s->r)", composition_residual(T, path, r, s, u, v), t)
        if T.linear:
            report.add("homogeneity I(lambda v) = lambda I(v)", scaling_residual(T, path, s, u, v, 3.0), t)
        if g is not None and cfg.metric_consistent:
            report.add("metric consistency g(Iu, Iv) = g(u, v)", metric_residual(T, g, path, s, u, v, w), t)

    if isinstance(T, ConnectionTransport):
        def worst(transport):
            res = 0.0
            for path, r, s, u in samples[:8]:
                v = TangentVector(path.eval(s), np.ones(dim))
                res = max(res, composition_residual(transport, path, r, s, u, v))
            return res

        # measured at a coarse resolution; at production steps both sit at roundoff
        coarse_t = ConnectionTransport(T.chart, 8)
        fine_t = ConnectionTransport(T.chart, 16)
        coarse, fine = worst(coarse_t), worst(fine_t)
        ratio = coarse / fine if fine > 1e-14 else None
        report.convergence.append(("composition residual at 2x RK4 steps", coarse, fine, ratio))
