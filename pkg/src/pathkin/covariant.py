"""Covariant derivative of vector fields along paths, by finite differences.

The field is re-evaluated at stencil points, so any pure callable works
(including the expensive deviation-vector pipeline). Fields are assumed
smooth; a kink inside the stencil is not detected and costs accuracy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyWarning, DomainError, NumericError
from .geometry import FieldAlongPath, ManifoldChart, TangentVector

__all__ = [
    "CovariantDerivativeConfig",
    "covariant_derivative",
    "second_covariant_derivative",
    "stencil_derivative",
]

_CENTRAL = {
    "central-2": ((-1, 1), (-0.5, 0.5)),
    "central-4": ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12)),
}


@dataclass(frozen=True)
class CovariantDerivativeConfig:
    fd_step: float = 1e-4
    scheme: str = "central-2"

    def __post_init__(self):
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if self.scheme not in _CENTRAL:
            raise ValueError(f"unknown scheme {self.scheme!r}; use one of {sorted(_CENTRAL)}")


def stencil_derivative(values, s: float, domain, cfg: CovariantDerivativeConfig) -> np.ndarray:
    """d/ds of the array-valued callable ``values`` at ``s``.

    Falls back to a one-sided second-order stencil (with an
    :class:`AccuracyWarning`) when the central stencil leaves ``domain``.
    """
    h = cfg.fd_step
    a, b = domain
    offsets, weights = _CENTRAL[cfg.scheme]
    reach = max(offsets) * h
    if s - reach >= a and s + reach <= b:
        acc = None
        for k, w in zip(offsets, weights):
            term = w * np.asarray(values(s + k * h), dtype=float)
            acc = term if acc is None else acc + term
        return acc / h
    if s + 2 * h <= b:
        sign = 1.0
    elif s - 2 * h >= a:
        sign = -1.0
    else:
        raise DomainError(f"path domain {domain} too short for fd_step {h}")
    warnings.warn(f"one-sided stencil used at s={s} (domain {domain})", AccuracyWarning, stacklevel=3)
    f0 = np.asarray(values(s), dtype=float)
    f1 = np.asarray(values(s + sign * h), dtype=float)
    f2 = np.asarray(values(s + 2 * sign * h), dtype=float)
    return sign * (-3.0 * f0 + 4.0 * f1 - f2) / (2 * h)


def covariant_derivative(chart: ManifoldChart, f: FieldAlongPath, s: float,
                         cfg: CovariantDerivativeConfig | None = None) -> TangentVector:
    """(Df/ds)^i = d f^i/ds + Gamma^i_jk x'^j f^k along ``f.path``."""
    cfg = cfg or CovariantDerivativeConfig()
    path = f.path
    path.check(s)
    df = stencil_derivative(lambda u: f(u).comps, s, path.domain, cfg)
    if not np.all(np.isfinite(df)):
        raise NumericError(f"non-finite field derivative at s={s}")
    x = path.eval(s)
    if chart.flat:
        return TangentVector(x, df)
    G = chart.christoffel(x)
    xdot = path.tangent(s)
    fs = f(s).comps
    return TangentVector(x, df + np.einsum("ijk,j,k->i", G, xdot, fs))


def second_covariant_derivative(chart: ManifoldChart, f: FieldAlongPath, s: float,
                                cfg: CovariantDerivativeConfig | None = None) -> TangentVector:
    cfg = cfg or CovariantDerivativeConfig()
    first = FieldAlongPath(f.path, lambda u: covariant_derivative(chart, f, u, cfg))
    return covariant_derivative(chart, first, s, cfg)
