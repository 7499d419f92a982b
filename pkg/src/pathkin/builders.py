"""Ready-made observer configurations: Minkowski (lab frame and the rest
frame of particle 1), Euclidean space, and the polar-chart plane."""

from __future__ import annotations

import math

import numpy as np

from .geometry import Path, flat_chart, polar_chart
from .kinematics import Numerics, ObserverConfiguration, Particle
from .metric import euclidean_metric, minkowski_metric, polar_metric
from .sr import SRParticleSpec, boost_matrix, lorentz_factor, sr_four_velocity
from .transport import ConnectionTransport, FlatTransport

__all__ = [
    "sr_particle",
    "sr_configuration",
    "sr_rest_frame_configuration",
    "euclidean_configuration",
    "polar_configuration",
    "cartesian_to_polar_path",
]


def _padded(lo, hi, pad=1.0):
    span = hi - lo
    return (lo - pad - 0.1 * span, hi + pad + 0.1 * span)


def sr_particle(spec: SRParticleSpec, c: float = 1.0, domain=(-10.0, 10.0), name="particle") -> Particle:
    """Inertial particle parametrized by proper time (massive) or lab time
    (massless); the time map makes observer parameter = lab time."""
    spec.validate(c)
    y = np.asarray(spec.offset, dtype=float)
    t0 = y[0] / c
    V = sr_four_velocity(spec, c)
    if spec.mass > 0:
        rate = 1.0 / lorentz_factor(spec.velocity, c)
        tau = lambda t: (t - t0) * rate
        mu = None
    else:
        rate = 1.0
        tau = lambda t: t - t0
        mu_val = spec.energy / c**2
        mu = lambda s_a: mu_val
    lo, hi = sorted(((domain[0] - t0) * rate, (domain[1] - t0) * rate))
    wl = Path.affine(y, V, _padded(lo, hi))
    return Particle(wl, tau, float(spec.mass), mu, name)


def sr_configuration(p1: SRParticleSpec, p2: SRParticleSpec, c: float = 1.0,
                     observer_velocity=(0.0, 0.0, 0.0), observer_offset=(0.0, 0.0, 0.0, 0.0),
                     domain=(-10.0, 10.0), numerics: Numerics | None = None) -> ObserverConfiguration:
    """Minkowski space in an inertial chart with the flat transport.

    The observer moves with ``observer_velocity`` and is parametrized by lab
    time, so all three events at parameter ``t`` are simultaneous in the lab.
    """
    y = np.asarray(observer_offset, dtype=float)
    u = np.concatenate(([c], np.asarray(observer_velocity, dtype=float)))
    origin = y - (y[0] / c) * u
    observer = Path.affine(origin, u, domain)
    return ObserverConfiguration(
        observer=observer,
        particle1=sr_particle(p1, c, domain, "particle1"),
        particle2=sr_particle(p2, c, domain, "particle2"),
        transport=FlatTransport(),
        chart=flat_chart(4, "minkowski"),
        metric=minkowski_metric(),
        numerics=numerics or Numerics(),
        metric_consistent=True,
    )


def sr_rest_frame_configuration(p1: SRParticleSpec, p2: SRParticleSpec, c: float = 1.0,
                                domain=(-10.0, 10.0), numerics: Numerics | None = None) -> ObserverConfiguration:
    """The same pair seen in the rest frame K' of particle 1, with the
    observer riding on particle 1 (observer parameter = K' time = s1)."""
    if p1.mass == 0 or p2.mass == 0:
        raise ValueError("the rest-frame configuration needs two massive particles")
    L = boost_matrix(p1.velocity, c)
    y1 = np.asarray(p1.offset, dtype=float)
    y21 = L @ (np.asarray(p2.offset, dtype=float) - y1)
    V2p = L @ sr_four_velocity(p2, c)
    rest = np.array([c, 0.0, 0.0, 0.0])

    observer = Path.affine(np.zeros(4), rest, domain)
    part1 = Particle(Path.affine(np.zeros(4), rest, _padded(*domain)), lambda t: t, float(p1.mass), None, "particle1")
    tau2 = lambda t: (c * t - y21[0]) / V2p[0]
    lo, hi = sorted((tau2(domain[0]), tau2(domain[1])))
    part2 = Particle(Path.affine(y21, V2p, _padded(lo, hi)), tau2, float(p2.mass), None, "particle2")
    return ObserverConfiguration(
        observer=observer,
        particle1=part1,
        particle2=part2,
        transport=FlatTransport(),
        chart=flat_chart(4, "minkowski-rest-frame"),
        metric=minkowski_metric(),
        numerics=numerics or Numerics(),
        metric_consistent=True,
    )


def euclidean_configuration(x1: Path, x2: Path, observer: Path, m1: float = 1.0, m2: float = 1.0,
                            tau1=None, tau2=None, numerics: Numerics | None = None) -> ObserverConfiguration:
    dim = observer.dim
    return ObserverConfiguration(
        observer=observer,
        particle1=Particle(x1, tau1 or (lambda s: s), m1, None, "particle1"),
        particle2=Particle(x2, tau2 or (lambda s: s), m2, None, "particle2"),
        transport=FlatTransport(),
        chart=flat_chart(dim, f"euclidean-{dim}"),
        metric=euclidean_metric(dim),
        numerics=numerics or Numerics(),
        metric_consistent=True,
    )


def cartesian_to_polar_path(p: Path) -> Path:
    """Re-express a Cartesian plane curve avoiding the origin in (r, theta),
    with theta continuous along the curve."""
    a, b = p.domain

    def ev(u):
        u = np.asarray(u, dtype=float)
        xy = p.eval_many(np.atleast_1d(u))
        r = np.hypot(xy[:, 0], xy[:, 1])
        th = _continuous_angle(xy, p, a)
        out = np.stack([r, th], axis=-1)
        return out[0] if u.ndim == 0 else out

    def tg(u):
        u = np.asarray(u, dtype=float)
        uu = np.atleast_1d(u)
        xy = p.eval_many(uu)
        dxy = p.tangent_many(uu)
        r2 = xy[:, 0] ** 2 + xy[:, 1] ** 2
        r = np.sqrt(r2)
        dr = (xy[:, 0] * dxy[:, 0] + xy[:, 1] * dxy[:, 1]) / r
        dth = (xy[:, 0] * dxy[:, 1] - xy[:, 1] * dxy[:, 0]) / r2
        out = np.stack([dr, dth], axis=-1)
        return out[0] if u.ndim == 0 else out

    return Path((a, b), ev, tg, dim=2, vectorized=True)


def _continuous_angle(xy, p, a):
    # angle relative to the start direction, unwrapped through the winding
    # accumulated between a and each parameter; curves used here wind less
    # than half a turn per unit so a direct atan2 on the rotated frame works
    x0 = p.eval(a)
    th0 = math.atan2(x0[1], x0[0])
    c, s = math.cos(th0), math.sin(th0)
    xr = c * xy[:, 0] + s * xy[:, 1]
    yr = -s * xy[:, 0] + c * xy[:, 1]
    return th0 + np.arctan2(yr, xr)


def polar_configuration(x1: Path, x2: Path, observer: Path, m1: float = 1.0, m2: float = 1.0,
                        tau1=None, tau2=None, numerics: Numerics | None = None) -> ObserverConfiguration:
    """Euclidean plane in polar coordinates with Levi-Civita transport.

    Worldlines are given in polar-chart coordinates (r, theta).
    """
    numerics = numerics or Numerics()
    chart = polar_chart()
    return ObserverConfiguration(
        observer=observer,
        particle1=Particle(x1, tau1 or (lambda s: s), m1, None, "particle1"),
        particle2=Particle(x2, tau2 or (lambda s: s), m2, None, "particle2"),
        transport=ConnectionTransport(chart, numerics.rk4_steps),
        chart=chart,
        metric=polar_metric(),
        numerics=numerics,
        metric_consistent=True,
    )
