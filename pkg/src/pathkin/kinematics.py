"""Relative kinematics of two point particles seen by an observer.

Vectors at the two particles are compared by transporting along a connecting
path ``gamma_s`` (particle 1 at parameter 0, particle 2 at 1) and carried to
the observer along ``eta_s`` (particle 1 at 0, observer at 1) or
``eta*_s`` (particle 2 at 0, observer at 1).  By default all three families
are straight chart lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .covariant import CovariantDerivativeConfig, covariant_derivative, second_covariant_derivative
from .errors import (
    ConfigurationError,
    DegenerateDirectionError,
    InternalConsistencyError,
    InvalidParticleError,
)
from .geometry import FieldAlongPath, ManifoldChart, Path, TangentVector
from .metric import BundleMetric, adapted_basis, epsilon, first_component, orthogonal_completion
from .transport import (
    BASE_TOL,
    ConnectionTransport,
    Transport,
    TransportKind,
    pullback_fundamentals,
    transport_vector,
)

__all__ = [
    "Particle",
    "Numerics",
    "ObserverConfiguration",
    "RelativeState",
    "EnergyComponents",
    "pull_to_particle1",
    "to_observer",
    "to_observer_from2",
    "push_to_particle2",
    "generic_difference",
    "relative_velocity",
    "back_transported_integral",
    "deviation_map",
    "deviation_vector",
    "deviation_field",
    "deviation_velocity",
    "particle_acceleration",
    "relative_acceleration",
    "deviation_acceleration",
    "relative_momentum",
    "relative_energy",
    "proper_energy",
    "energy_momentum_components",
    "component_residuals",
    "momentum_invariant",
    "invariant_residuals",
    "energy_reciprocity_check",
    "reciprocity_residual",
    "energy_via_relative_momentum",
    "relative_state",
]


def _identity(s):
    return s


@dataclass(frozen=True, eq=False)
class Particle:
    """A worldline, the map from observer parameter to its own parameter,
    the rest mass and the (nonzero) mass function ``mu``.

    For ``mass > 0`` the mass function defaults to the constant mass;
    massless particles must supply ``mu`` directly (e.g. ``E / c**2``).
    """

    worldline: Path
    time_map: Callable[[float], float] = _identity
    mass: float = 1.0
    mu: Callable[[float], float] | None = None
    name: str = "particle"

    def __post_init__(self):
        if self.mass < 0:
            raise InvalidParticleError("rest mass must be non-negative")
        if self.mu is None:
            if self.mass == 0:
                raise InvalidParticleError("a massless particle needs an explicit mass function mu")
            m = float(self.mass)
            object.__setattr__(self, "mu", lambda s_a: m)

    @property
    def massless(self) -> bool:
        return self.mass == 0

    def param(self, s: float) -> float:
        return float(self.time_map(s))

    def mu_at(self, s: float) -> float:
        val = float(self.mu(self.param(s)))
        if val == 0.0 or not math.isfinite(val):
            raise InvalidParticleError(f"mass function vanishes at s={s}: that is vacuum, not a particle")
        return val

    def position(self, s: float) -> np.ndarray:
        s_a = self.param(s)
        self.worldline.check(s_a)
        return self.worldline.eval(s_a)

    def velocity(self, s: float) -> TangentVector:
        s_a = self.param(s)
        self.worldline.check(s_a)
        return TangentVector(self.worldline.eval(s_a), self.worldline.tangent(s_a))

    def momentum(self, s: float) -> TangentVector:
        return self.velocity(s) * self.mu_at(s)


@dataclass(frozen=True)
class Numerics:
    """Resolution and tolerance settings shared by a configuration."""

    rk4_steps: int = 256          # per unit parameter length
    simpson_panels: int = 256
    fd_step: float | None = None  # None: 1e-4 * observer parameter span
    scheme: str = "central-2"
    tol: float = 1e-9
    epsilon_zero: int = 1

    def __post_init__(self):
        if self.rk4_steps < 1 or self.simpson_panels < 1:
            raise ValueError("rk4_steps and simpson_panels must be >= 1")
        if self.epsilon_zero not in (1, -1):
            raise ValueError("epsilon_zero must be +1 or -1")

    def refined(self, factor: int = 2) -> "Numerics":
        fd = None if self.fd_step is None else self.fd_step / factor
        return Numerics(self.rk4_steps * factor, self.simpson_panels * factor, fd,
                        self.scheme, self.tol, self.epsilon_zero)


@dataclass(frozen=True, eq=False)
class ObserverConfiguration:
    observer: Path
    particle1: Particle
    particle2: Particle
    transport: Transport
    chart: ManifoldChart
    metric: BundleMetric | None = None
    connect_12: Callable[[float], Path] | None = None
    connect_1obs: Callable[[float], Path] | None = None
    connect_2obs: Callable[[float], Path] | None = None
    numerics: Numerics = field(default_factory=Numerics)
    metric_consistent: bool = False

    # -- connecting paths --------------------------------------------------

    def gamma(self, s: float) -> Path:
        if self.connect_12 is not None:
            return self.connect_12(s)
        return Path.line(self.particle1.position(s), self.particle2.position(s))

    def eta(self, s: float) -> Path:
        if self.connect_1obs is not None:
            return self.connect_1obs(s)
        return Path.line(self.particle1.position(s), self.observer.eval(s))

    def eta_star(self, s: float) -> Path:
        if self.connect_2obs is not None:
            return self.connect_2obs(s)
        return Path.line(self.particle2.position(s), self.observer.eval(s))

    def check_endpoints(self, s: float, tol: float = BASE_TOL) -> None:
        x1, x2, x = self.particle1.position(s), self.particle2.position(s), self.observer.eval(s)
        checks = [
            ("gamma_s(0) = x1", self.gamma(s).eval(0.0), x1),
            ("gamma_s(1) = x2", self.gamma(s).eval(1.0), x2),
            ("eta_s(0) = x1", self.eta(s).eval(0.0), x1),
            ("eta_s(1) = x", self.eta(s).eval(1.0), x),
            ("eta*_s(0) = x2", self.eta_star(s).eval(0.0), x2),
            ("eta*_s(1) = x", self.eta_star(s).eval(1.0), x),
        ]
        for label, got, want in checks:
            if np.max(np.abs(got - want)) > tol:
                raise ConfigurationError(f"connecting path endpoint {label} violated at s={s}")

    # -- helpers ----------------------------------------------------------

    def eps(self, lam: float) -> float:
        return epsilon(lam, self.numerics.epsilon_zero)

    def require_metric(self) -> BundleMetric:
        if self.metric is None:
            raise ConfigurationError("this quantity needs a bundle metric")
        return self.metric

    def derivative_config(self) -> CovariantDerivativeConfig:
        fd = self.numerics.fd_step
        if fd is None:
            a, b = self.observer.domain
            fd = 1e-4 * (b - a) if b > a else 1e-4
        return CovariantDerivativeConfig(fd, self.numerics.scheme)

    def with_numerics(self, numerics: Numerics) -> "ObserverConfiguration":
        transport = self.transport
        if isinstance(transport, ConnectionTransport):
            transport = ConnectionTransport(transport.chart, numerics.rk4_steps)
        return _replace(self, numerics=numerics, transport=transport)


def _replace(cfg, **changes):
    import dataclasses

    return dataclasses.replace(cfg, **changes)


# -- moving vectors between the three points ---------------------------------

def pull_to_particle1(cfg: ObserverConfiguration, s: float, X2: TangentVector) -> TangentVector:
    """Transport a vector at particle 2 back along ``gamma_s`` (1 -> 0)."""
    return transport_vector(cfg.transport, cfg.gamma(s), 1.0, 0.0, X2)


def push_to_particle2(cfg: ObserverConfiguration, s: float, X1: TangentVector) -> TangentVector:
    return transport_vector(cfg.transport, cfg.gamma(s), 0.0, 1.0, X1)


def to_observer(cfg: ObserverConfiguration, s: float, X1: TangentVector) -> TangentVector:
    return transport_vector(cfg.transport, cfg.eta(s), 0.0, 1.0, X1)


def to_observer_from2(cfg: ObserverConfiguration, s: float, X2: TangentVector) -> TangentVector:
    return transport_vector(cfg.transport, cfg.eta_star(s), 0.0, 1.0, X2)


def generic_difference(cfg: ObserverConfiguration, s: float, X1: TangentVector, X2: TangentVector,
                       direction: str = "21") -> TangentVector:
    """Transported difference of two vectors, expressed at the observer.

    ``"21"``: eta_s(gamma_s(1->0) X2 - X1); ``"12"``: eta*_s(gamma_s(0->1) X1 - X2).
    """
    if direction == "21":
        return to_observer(cfg, s, pull_to_particle1(cfg, s, X2) - X1)
    if direction == "12":
        return to_observer_from2(cfg, s, push_to_particle2(cfg, s, X1) - X2)
    raise ValueError(f"direction must be '21' or '12', got {direction!r}")


def relative_velocity(cfg: ObserverConfiguration, s: float) -> TangentVector:
    return generic_difference(cfg, s, cfg.particle1.velocity(s), cfg.particle2.velocity(s))


def relative_momentum(cfg: ObserverConfiguration, s: float) -> TangentVector:
    return generic_difference(cfg, s, cfg.particle1.momentum(s), cfg.particle2.momentum(s))


# -- deviation vector and its derivatives ------------------------------------

def back_transported_integral(transport: Transport, path: Path, t: float, panels: int = 256,
                              exact_flat: bool = True) -> TangentVector:
    """Integral over [a, t] of the tangent of ``path`` transported back to ``a``.

    ``a`` is the start of the path domain.  Composite Simpson with ``panels``
    panels; the linear-connection case integrates the pullback matrices on
    the same grid with RK4.  For the flat transport the integrand is the
    bare tangent, and with ``exact_flat`` the chord is returned directly.
    """
    a = path.domain[0]
    path.check(t)
    base = path.eval(a)
    if t == a:
        return TangentVector(base, np.zeros(path.dim))
    if transport.kind is TransportKind.FLAT and exact_flat:
        return TangentVector(base, path.eval(t) - base)
    nodes = 2 * panels
    h = (t - a) / nodes
    if isinstance(transport, ConnectionTransport):
        us, Z = pullback_fundamentals(transport.chart, path, a, t, nodes)
        T = path.tangent_many(us)
        comps = kernels.simpson_transported(np.ascontiguousarray(Z), np.ascontiguousarray(T), h)
        return TangentVector(base, np.asarray(comps))
    us = np.linspace(a, t, nodes + 1)
    vals = np.array([
        transport.apply(path, u, a, TangentVector(path.eval(u), path.tangent(u))).comps for u in us
    ])
    w = np.full(nodes + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return TangentVector(base, (h / 3.0) * (w @ vals))


def deviation_map(cfg: ObserverConfiguration, s: float, t: float) -> TangentVector:
    """Back-transported tangent integral along ``gamma_s`` from 0 to ``t``; at particle 1."""
    return back_transported_integral(cfg.transport, cfg.gamma(s), t, cfg.numerics.simpson_panels)


def deviation_vector(cfg: ObserverConfiguration, s: float) -> TangentVector:
    return to_observer(cfg, s, deviation_map(cfg, s, 1.0))


def deviation_field(cfg: ObserverConfiguration) -> FieldAlongPath:
    return FieldAlongPath(cfg.observer, lambda u: deviation_vector(cfg, u))


def deviation_velocity(cfg: ObserverConfiguration, s: float,
                       dcfg: CovariantDerivativeConfig | None = None) -> TangentVector:
    return covariant_derivative(cfg.chart, deviation_field(cfg), s, dcfg or cfg.derivative_config())


def deviation_acceleration(cfg: ObserverConfiguration, s: float,
                           dcfg: CovariantDerivativeConfig | None = None) -> TangentVector:
    return second_covariant_derivative(cfg.chart, deviation_field(cfg), s, dcfg or cfg.derivative_config())


def particle_acceleration(cfg: ObserverConfiguration, particle: Particle, s: float,
                          dcfg: CovariantDerivativeConfig | None = None) -> TangentVector:
    """Covariant derivative of the particle velocity along its own worldline."""
    wl = particle.worldline
    velocity = FieldAlongPath(wl, lambda u: TangentVector(wl.eval(u), wl.tangent(u)))
    return covariant_derivative(cfg.chart, velocity, particle.param(s), dcfg or cfg.derivative_config())


def relative_acceleration(cfg: ObserverConfiguration, s: float,
                          dcfg: CovariantDerivativeConfig | None = None) -> TangentVector:
    A1 = particle_acceleration(cfg, cfg.particle1, s, dcfg)
    A2 = particle_acceleration(cfg, cfg.particle2, s, dcfg)
    return generic_difference(cfg, s, A1, A2)


# -- energies ------------------------------------------------------------------

def relative_energy(cfg: ObserverConfiguration, s: float, direction: str = "21") -> float:
    """``E21 = eps(V1^2) (gamma_s(1->0) p2) . V1`` at particle 1, or ``E12`` at particle 2."""
    g = cfg.require_metric()
    V1, V2 = cfg.particle1.velocity(s), cfg.particle2.velocity(s)
    if direction == "21":
        p2_at_1 = pull_to_particle1(cfg, s, cfg.particle2.momentum(s))
        return cfg.eps(g.square(V1)) * g.dot(p2_at_1, V1)
    if direction == "12":
        p1_at_2 = push_to_particle2(cfg, s, cfg.particle1.momentum(s))
        return cfg.eps(g.square(V2)) * g.dot(p1_at_2, V2)
    raise ValueError(f"direction must be '21' or '12', got {direction!r}")


def proper_energy(particle: Particle, g: BundleMetric, s: float, tol: float = 1e-9,
                  null_tol: float = 1e-10) -> float:
    """Rest energy ``mu |V^2|``, cross-checked against ``|p^2| / mu``.

    A massless particle has zero rest energy; its worldline must be null.
    """
    mu = particle.mu_at(s)
    V = particle.velocity(s)
    sq = g.square(V)
    scale = float(np.max(np.abs(V.comps), initial=0.0)) ** 2
    if particle.massless:
        if abs(sq) > null_tol * max(scale, 1e-300):
            raise InvalidParticleError(f"massless particle on a non-null worldline: V^2 = {sq}")
        return 0.0
    from_velocity = mu * abs(sq)
    from_momentum = abs(g.square(particle.momentum(s))) / mu
    if abs(from_velocity - from_momentum) > tol * max(1.0, abs(from_velocity)):
        raise InternalConsistencyError(
            f"rest energy mismatch: {from_velocity} vs {from_momentum}",
            abs(from_velocity - from_momentum),
        )
    return from_velocity


# -- components in adapted bases ----------------------------------------------

@dataclass(frozen=True)
class EnergyComponents:
    """First components of momenta in velocity-adapted bases (None if degenerate)."""

    p1_1: float | None
    p1_other_max: float | None
    p21_1: float | None
    dpi21_1: float | None
    dp21_1: float | None
    p1_1prime: float | None


def _null(g, v, null_tol=1e-10):
    sq = g.square(v)
    scale = float(np.max(np.abs(v.comps), initial=0.0))
    return scale == 0.0 or abs(sq) < null_tol * scale**2


def energy_momentum_components(cfg: ObserverConfiguration, s: float, strict: bool = True) -> EnergyComponents:
    """Components of p1, (p2)_1, the relative momenta and p1 in adapted bases.

    With ``strict`` a null velocity raises :class:`DegenerateDirectionError`;
    otherwise the affected entries are None.
    """
    g = cfg.require_metric()
    P1, P2 = cfg.particle1, cfg.particle2
    V1, V2 = P1.velocity(s), P2.velocity(s)
    p1, p2 = P1.momentum(s), P2.momentum(s)

    p1_1 = p1_other = p21_1 = dpi21_1 = dp21_1 = p1_1prime = None
    if _null(g, V1):
        if strict:
            raise DegenerateDirectionError(
                "(V1)^2 = 0: the relative energy is spread over all the components"
            )
    else:
        lam = adapted_basis(g, V1)
        p21 = pull_to_particle1(cfg, s, p2)
        dpi = p21 - p1
        p1_1 = first_component(g, p1, lam)
        p1_other = max((abs(g.dot(p1, b) / g.square(b)) for b in lam.vectors[1:]), default=0.0)
        p21_1 = first_component(g, p21, lam)
        dpi21_1 = first_component(g, dpi, lam)
        l1 = to_observer(cfg, s, lam.first)
        dp21 = to_observer(cfg, s, dpi)
        dp21_1 = first_component(g, dp21, orthogonal_completion(g, l1))

    if _null(g, V2):
        if strict:
            raise DegenerateDirectionError(
                "(V2)^2 = 0: the relative energy is spread over all the components"
            )
    else:
        unit2 = V2 * (1.0 / math.sqrt(abs(g.square(V2))))
        lam1p = pull_to_particle1(cfg, s, unit2)
        p1_1prime = g.dot(p1, lam1p) / g.square(lam1p)

    return EnergyComponents(p1_1, p1_other, p21_1, dpi21_1, dp21_1, p1_1prime)


def component_residuals(cfg: ObserverConfiguration, s: float) -> dict:
    """Differences between each adapted-basis component and its energy expression."""
    g = cfg.require_metric()
    comps = energy_momentum_components(cfg, s, strict=False)
    V1, V2 = cfg.particle1.velocity(s), cfg.particle2.velocity(s)
    out = {}
    if comps.p1_1 is not None:
        inv1 = 1.0 / math.sqrt(abs(g.square(V1)))
        E11 = proper_energy(cfg.particle1, g, s)
        E21 = relative_energy(cfg, s, "21")
        out["p1_1"] = abs(comps.p1_1 - E11 * inv1)
        out["p1_other"] = comps.p1_other_max
        out["p21_1"] = abs(comps.p21_1 - E21 * inv1)
        out["dpi21_1"] = abs(comps.dpi21_1 - (E21 - E11) * inv1)
        if cfg.metric_consistent:
            out["dp21_1"] = abs(comps.dp21_1 - (E21 - E11) * inv1)
    if comps.p1_1prime is not None and cfg.metric_consistent:
        E12 = relative_energy(cfg, s, "12")
        out["p1_1prime"] = abs(comps.p1_1prime - E12 / math.sqrt(abs(g.square(V2))))
    return out


# -- invariant and reciprocity -------------------------------------------------

def invariant_residuals(cfg: ObserverConfiguration, s: float) -> dict:
    """Direct (dpi21)^2 and its energy expressions; symmetric form needs consistency."""
    g = cfg.require_metric()
    P1, P2 = cfg.particle1, cfg.particle2
    V1, V2 = P1.velocity(s), P2.velocity(s)
    e1, e2 = cfg.eps(g.square(V1)), cfg.eps(g.square(V2))
    mu1, mu2 = P1.mu_at(s), P2.mu_at(s)
    p1, p2 = P1.momentum(s), P2.momentum(s)
    dpi = pull_to_particle1(cfg, s, p2) - p1
    direct = g.square(dpi)
    E11, E22 = proper_energy(P1, g, s), proper_energy(P2, g, s)
    E21, E12 = relative_energy(cfg, s, "21"), relative_energy(cfg, s, "12")
    via_energies = e1 * mu1 * E11 + e2 * mu2 * E22 - 2.0 * e1 * mu1 * E21
    scale = max(1.0, abs(e1 * mu1 * E11), abs(e2 * mu2 * E22), abs(2.0 * mu1 * E21))
    out = {"value": direct, "scale": scale, "energy_form": abs(direct - via_energies)}
    if cfg.metric_consistent:
        dp = to_observer(cfg, s, dpi)
        symmetric = e1 * mu1 * E11 + e2 * mu2 * E22 - e1 * mu1 * E21 - e2 * mu2 * E12
        out["observer_square"] = abs(g.square(dp) - direct)
        out["symmetric_form"] = abs(direct - symmetric)
    return out


def momentum_invariant(cfg: ObserverConfiguration, s: float, tol: float | None = None) -> float:
    """(dpi21)^2, asserted against its expressions through the four energies.

    The assertions run only for metric-consistent configurations.
    """
    tol = cfg.numerics.tol if tol is None else tol
    res = invariant_residuals(cfg, s)
    if not cfg.metric_consistent:
        # the energy forms rely on the transport preserving scalar squares
        return res["value"]
    bound = tol * res["scale"]
    for key in ("energy_form", "observer_square", "symmetric_form"):
        if key in res and res[key] > bound:
            raise InternalConsistencyError(f"momentum invariant {key} residual {res[key]:.3e}", res[key])
    return res["value"]


def reciprocity_residual(cfg: ObserverConfiguration, s: float) -> float:
    g = cfg.require_metric()
    P1, P2 = cfg.particle1, cfg.particle2
    e1 = cfg.eps(g.square(P1.velocity(s)))
    e2 = cfg.eps(g.square(P2.velocity(s)))
    mu1, mu2 = P1.mu_at(s), P2.mu_at(s)
    E21, E12 = relative_energy(cfg, s, "21"), relative_energy(cfg, s, "12")
    return abs(e2 * mu1 * E21 - e1 * mu2 * E12) / max(1.0, abs(mu1 * E21))


def energy_reciprocity_check(cfg: ObserverConfiguration, s: float, tol: float | None = None) -> bool:
    tol = cfg.numerics.tol if tol is None else tol
    return reciprocity_residual(cfg, s) <= tol


def energy_via_relative_momentum(cfg: ObserverConfiguration, s: float, check: bool = True) -> float:
    """``eps(V1^2) [dp21 . eta_s(V1) + p1 . V1]``; equals E21 for metric-consistent transports."""
    g = cfg.require_metric()
    P1 = cfg.particle1
    V1, p1 = P1.velocity(s), P1.momentum(s)
    dp21 = relative_momentum(cfg, s)
    value = cfg.eps(g.square(V1)) * (g.dot(dp21, to_observer(cfg, s, V1)) + g.dot(p1, V1))
    if check and cfg.metric_consistent:
        direct = relative_energy(cfg, s, "21")
        if abs(value - direct) > cfg.numerics.tol * max(1.0, abs(direct)):
            raise InternalConsistencyError(f"E21 via momentum {value} != direct {direct}", abs(value - direct))
    return value


# -- everything at once --------------------------------------------------------

@dataclass(frozen=True)
class RelativeState:
    s: float
    dV21: TangentVector
    h21: TangentVector
    V21: TangentVector
    dA21: TangentVector
    A21: TangentVector
    dp21: TangentVector
    E21: float | None = None
    E12: float | None = None
    E11: float | None = None
    E22: float | None = None
    invariant_dpi2: float | None = None
    components: EnergyComponents | None = None


def relative_state(cfg: ObserverConfiguration, s: float,
                   dcfg: CovariantDerivativeConfig | None = None) -> RelativeState:
    dcfg = dcfg or cfg.derivative_config()
    kw = {}
    if cfg.metric is not None:
        g = cfg.metric
        kw = dict(
            E21=relative_energy(cfg, s, "21"),
            E12=relative_energy(cfg, s, "12"),
            E11=proper_energy(cfg.particle1, g, s),
            E22=proper_energy(cfg.particle2, g, s),
            invariant_dpi2=momentum_invariant(cfg, s),
            components=energy_momentum_components(cfg, s, strict=False),
        )
    return RelativeState(
        s=s,
        dV21=relative_velocity(cfg, s),
        h21=deviation_vector(cfg, s),
        V21=deviation_velocity(cfg, s, dcfg),
        dA21=relative_acceleration(cfg, s, dcfg),
        A21=deviation_acceleration(cfg, s, dcfg),
        dp21=relative_momentum(cfg, s),
        **kw,
    )
