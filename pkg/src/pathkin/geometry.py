"""Charts, parametrized paths, tangent vectors and fields along paths.

Everything lives in a single global chart.  Points and vector components are
float64 arrays of length ``dim``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, NumericError

__all__ = [
    "ManifoldChart",
    "Path",
    "TangentVector",
    "FieldAlongPath",
    "path_point",
    "path_tangent_vector",
    "flat_chart",
    "polar_chart",
    "polar_to_cartesian_jacobian",
]

# slack for parameters that land a hair outside the domain after arithmetic
_DOMAIN_SLACK = 1e-12


def _as_vec(x, dim=None):
    arr = np.array(x, dtype=float).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"expected {dim} components, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True, eq=False)
class ManifoldChart:
    """A coordinate chart together with the connection coefficients on it.

    ``connection(x)`` returns an array ``G`` of shape ``(dim, dim, dim)`` with
    ``G[i, j, k]`` the coefficient with upper index ``i`` and lower indices
    ``j, k``.  When ``vectorized`` is true the callable also accepts a stack
    of points of shape ``(n, dim)`` and returns ``(n, dim, dim, dim)``.
    """

    dim: int
    connection: Callable[[np.ndarray], np.ndarray]
    name: str = "chart"
    vectorized: bool = False
    flat: bool = False

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("chart dimension must be >= 1")

    def coefficient(self, point, in1: int, in2: int, out: int) -> float:
        """Single coefficient Gamma^out_{in1 in2} at ``point``."""
        return float(self.christoffel(point)[out, in1, in2])

    def christoffel(self, point) -> np.ndarray:
        G = np.asarray(self.connection(_as_vec(point, self.dim)), dtype=float)
        if G.shape != (self.dim,) * 3:
            raise NumericError(f"connection returned shape {G.shape}")
        if not np.all(np.isfinite(G)):
            raise NumericError(f"non-finite connection coefficients at {point}")
        return G

    def christoffel_many(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        n = points.shape[0]
        if self.flat:
            return np.zeros((n,) + (self.dim,) * 3)
        if self.vectorized:
            G = np.asarray(self.connection(points), dtype=float)
        else:
            G = np.stack([np.asarray(self.connection(p), dtype=float) for p in points])
        if G.shape != (n,) + (self.dim,) * 3:
            raise NumericError(f"connection returned shape {G.shape}")
        if not np.all(np.isfinite(G)):
            raise NumericError("non-finite connection coefficients along path")
        return G


def flat_chart(dim: int, name: str | None = None) -> ManifoldChart:
    """Cartesian chart with identically vanishing connection."""

    def zero(x):
        x = np.asarray(x)
        return np.zeros(x.shape[:-1] + (dim, dim, dim))

    return ManifoldChart(dim, zero, name or f"flat-{dim}", vectorized=True, flat=True)


def _polar_connection(x):
    x = np.asarray(x, dtype=float)
    r = x[..., 0]
    G = np.zeros(x.shape[:-1] + (2, 2, 2))
    G[..., 0, 1, 1] = -r
    G[..., 1, 0, 1] = 1.0 / r
    G[..., 1, 1, 0] = 1.0 / r
    return G


def polar_chart() -> ManifoldChart:
    """Euclidean plane in polar coordinates (r, theta), Levi-Civita connection."""
    return ManifoldChart(2, _polar_connection, "polar-plane", vectorized=True)


def polar_to_cartesian_jacobian(point) -> np.ndarray:
    """d(x, y)/d(r, theta) at a polar-chart point."""
    r, th = float(point[0]), float(point[1])
    return np.array([[math.cos(th), -r * math.sin(th)], [math.sin(th), r * math.cos(th)]])


class Path:
    """A parametrized curve ``eval: [a, b] -> R^dim`` with its tangent.

    Without an explicit ``tangent`` a central difference with step
    ``1e-6 * (b - a)`` is installed (one-sided second order near the ends).
    """

    def __init__(self, domain, eval, tangent=None, dim=None, vectorized=False):
        a, b = float(domain[0]), float(domain[1])
        if not b >= a:
            raise ValueError(f"invalid path domain [{a}, {b}]")
        self.domain = (a, b)
        self._eval = eval
        self.vectorized = vectorized
        self.dim = dim if dim is not None else _as_vec(eval(a)).shape[0]
        if tangent is None:
            self._tangent = self._numeric_tangent
            self.numeric_tangent = True
        else:
            self._tangent = tangent
            self.numeric_tangent = False

    def __repr__(self):
        return f"Path(domain={self.domain}, dim={self.dim})"

    def contains(self, s: float) -> bool:
        a, b = self.domain
        slack = _DOMAIN_SLACK * max(1.0, abs(a), abs(b))
        return a - slack <= s <= b + slack

    def check(self, s: float) -> None:
        if not self.contains(s):
            raise DomainError(f"parameter {s!r} outside path domain {self.domain}")

    def eval(self, s: float) -> np.ndarray:
        return _as_vec(self._eval(float(s)), self.dim)

    def tangent(self, s: float) -> np.ndarray:
        return _as_vec(self._tangent(float(s)), self.dim)

    def eval_many(self, us) -> np.ndarray:
        us = np.asarray(us, dtype=float)
        if self.vectorized:
            return np.asarray(self._eval(us), dtype=float).reshape(len(us), self.dim)
        return np.array([self.eval(u) for u in us]).reshape(len(us), self.dim)

    def tangent_many(self, us) -> np.ndarray:
        us = np.asarray(us, dtype=float)
        if self.vectorized and not self.numeric_tangent:
            return np.asarray(self._tangent(us), dtype=float).reshape(len(us), self.dim)
        return np.array([self.tangent(u) for u in us]).reshape(len(us), self.dim)

    def _numeric_tangent(self, s):
        a, b = self.domain
        if b == a:
            return np.zeros(self.dim)
        h = 1e-6 * (b - a)
        f = self.eval
        if s - h < a:
            return (-3.0 * f(s) + 4.0 * f(s + h) - f(s + 2 * h)) / (2 * h)
        if s + h > b:
            return (3.0 * f(s) - 4.0 * f(s - h) + f(s - 2 * h)) / (2 * h)
        return (f(s + h) - f(s - h)) / (2 * h)

    # -- constructors -----------------------------------------------------

    @classmethod
    def line(cls, p0, p1, domain=(0.0, 1.0)) -> "Path":
        """Straight chart line with ``eval(a) == p0`` and ``eval(b) == p1`` exactly."""
        p0 = _as_vec(p0)
        p1 = _as_vec(p1, p0.shape[0])
        a, b = float(domain[0]), float(domain[1])
        span = b - a
        vel = (p1 - p0) / span if span > 0 else np.zeros_like(p0)

        def ev(u):
            w = (np.asarray(u, dtype=float) - a) / span if span > 0 else np.zeros_like(u)
            w = np.asarray(w)[..., None]
            return (1.0 - w) * p0 + w * p1

        def tg(u):
            u = np.asarray(u, dtype=float)
            return np.broadcast_to(vel, u.shape + vel.shape).copy()

        return cls((a, b), ev, tg, dim=p0.shape[0], vectorized=True)

    @classmethod
    def constant(cls, point, domain=(0.0, 1.0)) -> "Path":
        p = _as_vec(point)

        def ev(u):
            u = np.asarray(u, dtype=float)
            return np.broadcast_to(p, u.shape + p.shape).copy()

        def tg(u):
            u = np.asarray(u, dtype=float)
            return np.zeros(u.shape + p.shape)

        return cls(domain, ev, tg, dim=p.shape[0], vectorized=True)

    @classmethod
    def affine(cls, origin, velocity, domain) -> "Path":
        """``origin + s * velocity``."""
        o = _as_vec(origin)
        v = _as_vec(velocity, o.shape[0])

        def ev(u):
            u = np.asarray(u, dtype=float)[..., None]
            return o + u * v

        def tg(u):
            u = np.asarray(u, dtype=float)
            return np.broadcast_to(v, u.shape + v.shape).copy()

        return cls(domain, ev, tg, dim=o.shape[0], vectorized=True)

    @classmethod
    def polynomial(cls, coefficients, domain) -> "Path":
        """One coefficient list per coordinate, ascending powers of s."""
        polys = [np.polynomial.Polynomial(np.asarray(c, dtype=float)) for c in coefficients]
        derivs = [p.deriv() for p in polys]

        def ev(u):
            u = np.asarray(u, dtype=float)
            return np.stack([p(u) for p in polys], axis=-1)

        def tg(u):
            u = np.asarray(u, dtype=float)
            return np.stack([p(u) for p in derivs], axis=-1)

        return cls(domain, ev, tg, dim=len(polys), vectorized=True)

    @classmethod
    def tabulated(cls, params, points) -> "Path":
        """Cubic-spline interpolation of sampled points."""
        from scipy.interpolate import CubicSpline

        params = np.asarray(params, dtype=float)
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] != params.shape[0]:
            raise ValueError("table needs one point row per parameter sample")
        spline = CubicSpline(params, points, axis=0)
        deriv = spline.derivative()
        return cls((params[0], params[-1]), spline, deriv, dim=points.shape[1], vectorized=True)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Components of a vector attached at ``base``."""

    base: np.ndarray
    comps: np.ndarray

    def __post_init__(self):
        base = _as_vec(self.base)
        comps = _as_vec(self.comps, base.shape[0])
        if not np.all(np.isfinite(comps)):
            raise NumericError("tangent vector components must be finite")
        base.flags.writeable = False
        comps.flags.writeable = False
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "comps", comps)

    @property
    def dim(self) -> int:
        return self.comps.shape[0]

    def same_base(self, other: "TangentVector", tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.base - other.base), initial=0.0) <= tol)

    def with_comps(self, comps) -> "TangentVector":
        return TangentVector(self.base, comps)

    def __add__(self, other):
        _require_same_base(self, other)
        return TangentVector(self.base, self.comps + other.comps)

    def __sub__(self, other):
        _require_same_base(self, other)
        return TangentVector(self.base, self.comps - other.comps)

    def __neg__(self):
        return TangentVector(self.base, -self.comps)

    def __mul__(self, scalar):
        return TangentVector(self.base, float(scalar) * self.comps)

    __rmul__ = __mul__

    def __repr__(self):
        return f"TangentVector(base={self.base.tolist()}, comps={self.comps.tolist()})"


def _require_same_base(u, v, tol=1e-9):
    from .errors import PreconditionError

    if not u.same_base(v, tol):
        raise PreconditionError(f"vectors attached at different points: {u.base} vs {v.base}")


@dataclass(frozen=True, eq=False)
class FieldAlongPath:
    """A vector field ``value(s)`` attached at ``path.eval(s)``."""

    path: Path
    value: Callable[[float], TangentVector] = field(repr=False)

    def __call__(self, s: float) -> TangentVector:
        return self.value(s)

    @classmethod
    def from_components(cls, path: Path, comps: Callable[[float], np.ndarray]) -> "FieldAlongPath":
        return cls(path, lambda s: TangentVector(path.eval(s), comps(s)))


def path_point(p: Path, s: float) -> np.ndarray:
    p.check(s)
    return p.eval(s)


def path_tangent_vector(p: Path, s: float) -> TangentVector:
    p.check(s)
    return TangentVector(p.eval(s), p.tangent(s))
