"""Closed-form special relativity: four-velocities, relative energies,
the Doppler shift and deviation quantities in the lab frame K and in the
rest frame K' of particle 1.

Coordinates are (ct, x, y, z), signature (+,-,-,-).  These functions are
written directly from the textbook formulas and share no code with the
numerical pipeline, so they can serve as its oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, InvalidParticleError

__all__ = [
    "SRParticleSpec",
    "SREnergies",
    "SRDeviation",
    "lorentz_factor",
    "boost_matrix",
    "minkowski_square",
    "sr_four_velocity",
    "sr_four_momentum",
    "sr_relative_energy",
    "doppler_energy",
    "doppler_source_energy",
    "velocity_in_rest_frame",
    "sr_deviation_quantities",
]

_ETA = np.diag([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class SRParticleSpec:
    """Inertial particle: ``x(t) = (ct, t v) + offset``.

    For ``mass == 0`` the 3-velocity must have magnitude ``c`` and ``energy``
    (lab-frame energy) is required.
    """

    mass: float
    v3: tuple
    offset: tuple = (0.0, 0.0, 0.0, 0.0)
    energy: float | None = None

    def __post_init__(self):
        v = np.asarray(self.v3, dtype=float)
        if v.shape != (3,):
            raise InvalidParticleError("v3 must have three components")
        if len(self.offset) != 4:
            raise InvalidParticleError("offset must have four components")
        if self.mass < 0:
            raise InvalidParticleError("mass must be non-negative")
        if self.mass == 0 and (self.energy is None or not self.energy > 0):
            raise InvalidParticleError("a massless particle needs a positive energy")

    @property
    def velocity(self) -> np.ndarray:
        return np.asarray(self.v3, dtype=float)

    def validate(self, c: float) -> None:
        speed = float(np.linalg.norm(self.velocity))
        if self.mass > 0 and not speed < c:
            raise InvalidParticleError(f"massive particle with speed {speed} >= c = {c}")
        if self.mass == 0 and abs(speed - c) > 1e-12 * c:
            raise InvalidParticleError(f"massless particle with speed {speed} != c = {c}")

    def direction(self, c: float) -> np.ndarray:
        return self.velocity / c


@dataclass(frozen=True)
class SREnergies:
    E21: float
    E12: float
    E11: float
    E22: float


def lorentz_factor(v, c: float = 1.0) -> float:
    b2 = float(np.dot(v, v)) / c**2
    if not b2 < 1.0:
        raise DomainError("speed must be below c")
    return 1.0 / math.sqrt(1.0 - b2)


def minkowski_square(X) -> float:
    X = np.asarray(X, dtype=float)
    return float(X @ _ETA @ X)


def boost_matrix(v, c: float = 1.0) -> np.ndarray:
    """Pure boost into the frame moving with 3-velocity ``v``."""
    v = np.asarray(v, dtype=float)
    beta = v / c
    b2 = float(beta @ beta)
    L = np.eye(4)
    if b2 == 0.0:
        return L
    g = lorentz_factor(v, c)
    L[0, 0] = g
    L[0, 1:] = L[1:, 0] = -g * beta
    L[1:, 1:] += (g - 1.0) * np.outer(beta, beta) / b2
    return L


def sr_four_velocity(p: SRParticleSpec, c: float = 1.0) -> np.ndarray:
    p.validate(c)
    v = p.velocity
    if p.mass == 0:
        return c * np.concatenate(([1.0], v / c))
    return lorentz_factor(v, c) * np.concatenate(([c], v))


def sr_four_momentum(p: SRParticleSpec, c: float = 1.0) -> np.ndarray:
    if p.mass == 0:
        return (p.energy / c**2) * sr_four_velocity(p, c)
    return p.mass * sr_four_velocity(p, c)


def sr_relative_energy(p1: SRParticleSpec, p2: SRParticleSpec, c: float = 1.0) -> SREnergies:
    """Relative and rest energies of an inertial pair, by case."""
    p1.validate(c)
    p2.validate(c)
    v1, v2 = p1.velocity, p2.velocity
    if p1.mass > 0 and p2.mass > 0:
        k = (1.0 - v1 @ v2 / c**2) / math.sqrt((1.0 - v1 @ v1 / c**2) * (1.0 - v2 @ v2 / c**2))
        return SREnergies(p2.mass * c**2 * k, p1.mass * c**2 * k, p1.mass * c**2, p2.mass * c**2)
    if p1.mass > 0 and p2.mass == 0:
        n2 = v2 / c
        k = (1.0 - v1 @ n2 / c) / math.sqrt(1.0 - v1 @ v1 / c**2)
        return SREnergies(p2.energy * k, p1.mass * c**2 * k, p1.mass * c**2, 0.0)
    if p1.mass == 0 and p2.mass > 0:
        swapped = sr_relative_energy(p2, p1, c)
        return SREnergies(swapped.E12, swapped.E21, swapped.E22, swapped.E11)
    n1, n2 = v1 / c, v2 / c
    k = 1.0 - n1 @ n2
    return SREnergies(p2.energy * k, p1.energy * k, 0.0, 0.0)


def doppler_energy(E0: float, v, n, c: float = 1.0) -> float:
    """Lab energy of a massless particle emitted along ``n`` with energy ``E0``
    in the rest frame of a source moving with velocity ``v``."""
    v, n = np.asarray(v, dtype=float), np.asarray(n, dtype=float)
    if abs(float(n @ n) - 1.0) > 1e-12:
        raise DomainError("n must be a unit vector")
    denom = 1.0 - float(v @ n) / c
    if denom == 0.0:
        raise DomainError("source moving at c along the emission direction")
    return E0 / denom * math.sqrt(1.0 - float(v @ v) / c**2)


def doppler_source_energy(E: float, v, n, c: float = 1.0) -> float:
    """Inverse of :func:`doppler_energy`: the energy seen by the source."""
    v, n = np.asarray(v, dtype=float), np.asarray(n, dtype=float)
    return E * (1.0 - float(v @ n) / c) / math.sqrt(1.0 - float(v @ v) / c**2)


def velocity_in_rest_frame(v1, v2, c: float = 1.0) -> np.ndarray:
    """3-velocity of a particle with lab velocity ``v2`` seen from a frame
    moving with ``v1`` (relativistic velocity subtraction)."""
    v1, v2 = np.asarray(v1, dtype=float), np.asarray(v2, dtype=float)
    b2 = float(v1 @ v1)
    if b2 == 0.0:
        return v2.copy()
    g = lorentz_factor(v1, c)
    dot = float(v1 @ v2)
    par = dot / b2 * v1
    perp = v2 - par
    return (par - v1 + perp / g) / (1.0 - dot / c**2)


@dataclass(frozen=True)
class SRDeviation:
    dV21_K: np.ndarray
    h21_K: np.ndarray
    V21_K: np.ndarray
    dV21_Kp: np.ndarray | None
    h21_Kp: np.ndarray | None
    V21_Kp: np.ndarray | None
    v_prime: np.ndarray | None


def _motion(p2, c):
    """Lab position and velocity of particle 2 as functions of lab time."""
    if isinstance(p2, SRParticleSpec):
        y = np.asarray(p2.offset, dtype=float)
        t0 = y[0] / c
        v = p2.velocity
        return (lambda t: y[1:] + (t - t0) * v), (lambda t: v), t0
    pos, vel = p2
    return pos, vel, 0.0


def sr_deviation_quantities(p1: SRParticleSpec, p2, c: float = 1.0, t: float = 0.0,
                            dt_ds: float = 1.0, observer_is_particle1: bool = False) -> SRDeviation:
    """Relative velocity, deviation vector and deviation velocity in K and K'.

    ``p2`` is either an inertial spec or a pair ``(x2(t), v2(t))`` of lab
    position and velocity callables.  In K the particles are compared at
    equal lab time ``t``; in K' at equal K' time, which is the proper time
    ``s1`` of particle 1 (zero at its offset event).  ``dt_ds`` is the rate of
    lab time per observer parameter; with ``observer_is_particle1`` the
    observer parameter is ``s1`` itself.
    """
    p1.validate(c)
    if p1.mass == 0:
        raise InvalidParticleError("K' needs a massive particle 1")
    v1 = p1.velocity
    y1 = np.asarray(p1.offset, dtype=float)
    x2, v2f, _ = _motion(p2, c)
    g1 = lorentz_factor(v1, c)

    # lab frame: events at equal lab time
    t1_0 = y1[0] / c
    x1_t = y1[1:] + (t - t1_0) * v1
    v2 = np.asarray(v2f(t), dtype=float)
    g2 = lorentz_factor(v2, c)
    dV_K = g2 * np.concatenate(([c], v2)) - g1 * np.concatenate(([c], v1))
    h_K = np.concatenate(([0.0], np.asarray(x2(t)) - x1_t))
    V_K = dt_ds * np.concatenate(([0.0], v2 - v1))

    # rest frame of particle 1, origin at its offset event
    L = boost_matrix(v1, c)
    s1 = (t - t1_0) / g1  # K' time of particle 1 at lab time t

    def kprime_event(tl):
        return L @ (np.concatenate(([c * tl], np.asarray(x2(tl)))) - y1)

    lo, hi = t - 1.0, t + 1.0
    target = c * s1
    f = lambda tl: kprime_event(tl)[0] - target
    while f(lo) > 0:
        lo -= 2 * (hi - lo)
    while f(hi) < 0:
        hi += 2 * (hi - lo)
    t_lab = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    ev = kprime_event(t_lab)
    v2_lab = np.asarray(v2f(t_lab), dtype=float)
    v_p = velocity_in_rest_frame(v1, v2_lab, c)
    gp = lorentz_factor(v_p, c)
    dV_Kp = gp * np.concatenate(([c], v_p)) - np.array([c, 0.0, 0.0, 0.0])
    h_Kp = np.concatenate(([0.0], ev[1:]))
    rate = 1.0 if observer_is_particle1 else dt_ds / g1  # ds1/ds
    V_Kp = rate * np.concatenate(([0.0], v_p))
    return SRDeviation(dV_K, h_K, V_K, dV_Kp, h_Kp, V_Kp, v_p)
