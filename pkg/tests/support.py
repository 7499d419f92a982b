"""Random configuration generators shared by the test modules."""

import numpy as np

from pathkin.builders import polar_configuration, sr_configuration
from pathkin.geometry import Path
from pathkin.kinematics import Numerics
from pathkin.sr import SRParticleSpec


def random_velocity(rng, max_speed=0.95, c=1.0):
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    return tuple(d * rng.uniform(0.0, max_speed) * c)


def random_direction(rng):
    d = rng.normal(size=3)
    return d / np.linalg.norm(d)


def random_massive_spec(rng, c=1.0):
    offset = (0.0, *rng.uniform(-2.0, 2.0, size=3))
    return SRParticleSpec(float(rng.uniform(0.1, 10.0)), random_velocity(rng, c=c), offset)


def random_sr_config(rng, c=1.0):
    p1, p2 = random_massive_spec(rng, c), random_massive_spec(rng, c)
    obs_v = random_velocity(rng, 0.9, c)
    return sr_configuration(p1, p2, c, obs_v, (0.0, *rng.uniform(-1, 1, size=3))), (p1, p2)


def random_polar_worldline(rng, domain=(-1.0, 2.0)):
    """Smooth curve in (r, theta) chart coordinates with r bounded away from 0."""
    r0 = rng.uniform(1.0, 2.5)
    th0 = rng.uniform(-np.pi, np.pi)
    return Path.polynomial(
        [[r0, rng.uniform(-0.2, 0.2), rng.uniform(-0.1, 0.1)],
         [th0, rng.uniform(-1.5, 1.5), rng.uniform(-0.5, 0.5)]],
        domain,
    )


def random_polar_config(rng, rk4_steps=512):
    return polar_configuration(
        random_polar_worldline(rng),
        random_polar_worldline(rng),
        random_polar_worldline(rng),
        float(rng.uniform(0.5, 3.0)),
        float(rng.uniform(0.5, 3.0)),
        numerics=Numerics(rk4_steps=rk4_steps, simpson_panels=256),
    )


def random_polar_path(rng):
    return Path.polynomial(
        [[rng.uniform(0.8, 2.5), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)],
         [rng.uniform(-np.pi, np.pi), rng.uniform(-2, 2), rng.uniform(-1, 1)]],
        (0.0, 1.0),
    )
