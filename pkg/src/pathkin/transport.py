"""Transport of tangent vectors along paths.

A transport assigns to a path and a parameter pair ``(s, t)`` a map from the
tangent space at ``path(s)`` to the tangent space at ``path(t)``.  It must
compose (``s -> t -> r`` equals ``s -> r``) and be the identity for
``s == t``.  Linearity is optional; the connection-based transport is linear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from . import kernels
from .errors import NumericError, PreconditionError
from .geometry import ManifoldChart, Path, TangentVector

__all__ = [
    "TransportKind",
    "Transport",
    "FlatTransport",
    "ConnectionTransport",
    "CustomTransport",
    "TransportMatrix",
    "transport_vector",
    "linear_transport_matrix",
    "pullback_fundamentals",
    "check_composition",
    "check_metric_consistency",
    "check_scaling_consistency",
    "BASE_TOL",
]

BASE_TOL = 1e-9


class TransportKind(str, Enum):
    FLAT = "flat"
    LINEAR_CONNECTION = "linear-connection"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class TransportMatrix:
    from_param: float
    to_param: float
    matrix: np.ndarray

    def __matmul__(self, comps):
        return self.matrix @ comps


class Transport:
    """Base class; subclasses implement :meth:`transport_comps`."""

    kind: TransportKind = TransportKind.CUSTOM

    @property
    def linear(self) -> bool:
        return self.kind in (TransportKind.FLAT, TransportKind.LINEAR_CONNECTION)

    def transport_comps(self, path: Path, s: float, t: float, comps: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, path: Path, s: float, t: float, v: TangentVector) -> TangentVector:
        if s == t:
            return v
        comps = np.asarray(self.transport_comps(path, s, t, v.comps), dtype=float)
        return TangentVector(path.eval(t), comps)


class FlatTransport(Transport):
    """Components are carried over unchanged (Cartesian charts)."""

    kind = TransportKind.FLAT

    def transport_comps(self, path, s, t, comps):
        return np.array(comps, dtype=float)

    def matrix(self, path, s, t) -> TransportMatrix:
        return TransportMatrix(s, t, np.eye(path.dim))

    def __repr__(self):
        return "FlatTransport()"


class ConnectionTransport(Transport):
    """Parallel transport for the chart's connection, integrated with RK4.

    The step count is ``steps`` when given, otherwise
    ``ceil(steps_per_unit * |t - s|)`` (at least one).
    """

    kind = TransportKind.LINEAR_CONNECTION

    def __init__(self, chart: ManifoldChart, steps_per_unit: int = 256, steps: int | None = None):
        if steps is not None and steps < 1:
            raise ValueError("steps must be >= 1")
        if steps_per_unit < 1:
            raise ValueError("steps_per_unit must be >= 1")
        self.chart = chart
        self.steps_per_unit = int(steps_per_unit)
        self.steps = steps

    def __repr__(self):
        return f"ConnectionTransport({self.chart.name!r}, steps_per_unit={self.steps_per_unit}, steps={self.steps})"

    def step_count(self, s: float, t: float) -> int:
        if self.steps is not None:
            return int(self.steps)
        return max(1, math.ceil(self.steps_per_unit * abs(t - s)))

    def matrix(self, path: Path, s: float, t: float) -> TransportMatrix:
        return linear_transport_matrix(self.chart, path, s, t, self.step_count(s, t))

    def transport_comps(self, path, s, t, comps):
        return self.matrix(path, s, t).matrix @ np.asarray(comps, dtype=float)


class CustomTransport(Transport):
    """Wraps a user map ``fn(path, s, t, comps) -> comps``; may be nonlinear.

    The identity for ``s == t`` is enforced by :meth:`Transport.apply`.
    """

    kind = TransportKind.CUSTOM

    def __init__(self, fn: Callable[[Path, float, float, np.ndarray], np.ndarray], name: str = "custom"):
        self.fn = fn
        self.name = name

    def __repr__(self):
        return f"CustomTransport({self.name!r})"

    def transport_comps(self, path, s, t, comps):
        return self.fn(path, s, t, np.asarray(comps, dtype=float))


def _coefficient_samples(chart: ManifoldChart, path: Path, us: np.ndarray) -> np.ndarray:
    G = chart.christoffel_many(path.eval_many(us))
    T = path.tangent_many(us)
    if not np.all(np.isfinite(T)):
        raise NumericError("non-finite path tangent")
    return kernels.contract_connection(np.ascontiguousarray(G), np.ascontiguousarray(T))


def linear_transport_matrix(chart: ManifoldChart, path: Path, s: float, t: float, steps: int) -> TransportMatrix:
    """Fundamental matrix of dY/du = -Gamma(path(u)) . path'(u) Y, Y(s) = 1.

    The reverse direction is integrated backwards rather than inverted.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    path.check(s)
    path.check(t)
    d = chart.dim
    if s == t or chart.flat:
        return TransportMatrix(s, t, np.eye(d))
    us = np.linspace(s, t, 2 * steps + 1)
    A = _coefficient_samples(chart, path, us)
    Y = kernels.rk4_propagate(A, (t - s) / steps, False, False)
    return TransportMatrix(s, t, np.asarray(Y))


def pullback_fundamentals(chart: ManifoldChart, path: Path, a: float, t: float, steps: int):
    """Matrices carrying vectors at ``path(u)`` back to ``path(a)``.

    Returns ``(nodes, Z)`` with ``nodes`` the ``steps + 1`` grid points in
    ``[a, t]`` and ``Z[n]`` the transport matrix ``nodes[n] -> a``, obtained
    by integrating dZ/du = Z . Gamma . path'(u) forward from ``Z(a) = 1``.
    """
    nodes = np.linspace(a, t, steps + 1)
    d = chart.dim
    if chart.flat or a == t:
        return nodes, np.broadcast_to(np.eye(d), (steps + 1, d, d)).copy()
    us = np.linspace(a, t, 2 * steps + 1)
    A = _coefficient_samples(chart, path, us)
    Z = kernels.rk4_propagate(A, (t - a) / steps, True, True)
    return nodes, np.asarray(Z)


def transport_vector(T: Transport, path: Path, s: float, t: float, v: TangentVector,
                     tol: float = BASE_TOL) -> TangentVector:
    """Transport ``v`` (attached at ``path(s)``) to ``path(t)``."""
    path.check(s)
    path.check(t)
    start = path.eval(s)
    if np.max(np.abs(start - v.base), initial=0.0) > tol:
        raise PreconditionError(f"vector attached at {v.base.tolist()}, path starts at {start.tolist()}")
    return T.apply(path, s, t, v)


def check_composition(T: Transport, path: Path, r: float, s: float, t: float, v: TangentVector,
                      tol: float) -> bool:
    return composition_residual(T, path, r, s, t, v) <= tol


def composition_residual(T, path, r, s, t, v) -> float:
    """Max-norm of ``T(t->r) T(s->t) v - T(s->r) v``."""
    two_step = T.apply(path, t, r, transport_vector(T, path, s, t, v))
    direct = transport_vector(T, path, s, r, v)
    return float(np.max(np.abs(two_step.comps - direct.comps), initial=0.0))


def metric_residual(T, g, path, s, t, u, v) -> float:
    before = g.dot(u, v)
    after = g.dot(transport_vector(T, path, s, t, u), transport_vector(T, path, s, t, v))
    return abs(before - after)


def check_metric_consistency(T: Transport, g, path: Path, s: float, t: float,
                             u: TangentVector, v: TangentVector, tol: float) -> bool:
    """Whether transport from ``s`` to ``t`` preserves ``g(u, v)`` within ``tol``."""
    if not u.same_base(v):
        raise PreconditionError("u and v must share a base point")
    return metric_residual(T, g, path, s, t, u, v) <= tol


def scaling_residual(T, path, s, t, v, lam) -> float:
    scaled = transport_vector(T, path, s, t, v * lam)
    plain = transport_vector(T, path, s, t, v)
    return float(np.max(np.abs(scaled.comps - lam * plain.comps), initial=0.0))


def check_scaling_consistency(T: Transport, path: Path, s: float, t: float, v: TangentVector,
                              lam: float, tol: float) -> bool:
    return scaling_residual(T, path, s, t, v, lam) <= tol
