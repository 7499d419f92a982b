"""Bundle metrics, the sign function and velocity-adapted bases."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateDirectionError, NumericError, PreconditionError
from .geometry import ManifoldChart, TangentVector

__all__ = [
    "BundleMetric",
    "AdaptedBasis",
    "epsilon",
    "scalar_product",
    "scalar_square",
    "adapted_basis",
    "orthogonal_completion",
    "first_component",
    "basis_components",
    "euclidean_metric",
    "minkowski_metric",
    "polar_metric",
    "constant_metric",
    "levi_civita_chart",
]

SYMMETRY_TOL = 1e-12
DET_TOL = 1e-12
NULL_TOL = 1e-10
SKIP_TOL = 1e-10


def epsilon(lam: float, zero_sign: int = 1) -> float:
    """Sign function: -1 for negative arguments, ``zero_sign`` at 0, else +1."""
    if lam < 0:
        return -1.0
    if lam == 0:
        return float(zero_sign)
    return 1.0


@dataclass(frozen=True, eq=False)
class BundleMetric:
    """Pointwise symmetric nondegenerate bilinear form ``g_ij(x)``."""

    at: Callable[[np.ndarray], np.ndarray]
    name: str = "metric"
    validate: bool = True

    def matrix(self, point) -> np.ndarray:
        G = np.asarray(self.at(np.asarray(point, dtype=float)), dtype=float)
        if self.validate:
            if G.ndim != 2 or G.shape[0] != G.shape[1]:
                raise NumericError(f"metric must be a square matrix, got shape {G.shape}")
            if not np.all(np.isfinite(G)):
                raise NumericError(f"non-finite metric at {point}")
            if np.max(np.abs(G - G.T), initial=0.0) > SYMMETRY_TOL * max(1.0, np.max(np.abs(G))):
                raise NumericError(f"metric not symmetric at {point}")
            if abs(np.linalg.det(G)) <= DET_TOL:
                raise NumericError(f"metric degenerate at {point}")
        return G

    def dot(self, u: TangentVector, v: TangentVector) -> float:
        return scalar_product(self, u, v)

    def square(self, v: TangentVector) -> float:
        return scalar_square(self, v)


def scalar_product(g: BundleMetric, u: TangentVector, v: TangentVector) -> float:
    if not u.same_base(v):
        raise PreconditionError(f"scalar product of vectors at {u.base.tolist()} and {v.base.tolist()}")
    return float(u.comps @ g.matrix(u.base) @ v.comps)


def scalar_square(g: BundleMetric, v: TangentVector) -> float:
    return scalar_product(g, v, v)


def euclidean_metric(dim: int) -> BundleMetric:
    eye = np.eye(dim)
    return BundleMetric(lambda x: eye, f"euclidean-{dim}")


def minkowski_metric() -> BundleMetric:
    """Signature (+,-,-,-) in coordinates (ct, x, y, z)."""
    eta = np.diag([1.0, -1.0, -1.0, -1.0])
    return BundleMetric(lambda x: eta, "minkowski")


def polar_metric() -> BundleMetric:
    return BundleMetric(lambda x: np.diag([1.0, float(x[0]) ** 2]), "polar-plane")


def constant_metric(matrix) -> BundleMetric:
    M = np.array(matrix, dtype=float)
    return BundleMetric(lambda x: M, "constant")


def levi_civita_chart(metric: BundleMetric, dim: int, fd_step: float = 1e-5, name: str = "levi-civita") -> ManifoldChart:
    """Chart whose connection is the Levi-Civita connection of ``metric``.

    Metric derivatives come from central differences with step ``fd_step``.
    """

    def connection(x):
        x = np.asarray(x, dtype=float)
        g = metric.matrix(x)
        ginv = np.linalg.inv(g)
        dg = np.empty((dim, dim, dim))  # dg[l, i, j] = d_l g_ij
        for l in range(dim):
            e = np.zeros(dim)
            e[l] = fd_step
            dg[l] = (metric.matrix(x + e) - metric.matrix(x - e)) / (2 * fd_step)
        # Gamma_{l j k} = 1/2 (d_j g_lk + d_k g_lj - d_l g_jk)
        lower = 0.5 * (np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg)
        return np.einsum("il,ljk->ijk", ginv, lower)

    return ManifoldChart(dim, connection, name)


@dataclass(frozen=True, eq=False)
class AdaptedBasis:
    """Basis at one point whose first vector is orthogonal to all others."""

    vectors: tuple
    signature1: float

    @property
    def base(self) -> np.ndarray:
        return self.vectors[0].base

    @property
    def first(self) -> TangentVector:
        return self.vectors[0]


def orthogonal_completion(g: BundleMetric, e1: TangentVector, skip_tol: float = SKIP_TOL) -> AdaptedBasis:
    """Complete ``e1`` (kept as given) to a g-orthogonal basis.

    Gram-Schmidt (with re-orthogonalization) over the chart axes in index
    order; an axis is skipped when its residual after projection has
    ``sqrt|g(w, w)| < skip_tol`` or is numerically zero.
    """
    dim = e1.dim
    sq1 = g.square(e1)
    if sq1 == 0.0:
        raise DegenerateDirectionError("cannot complete a null first vector")
    basis = [e1]
    squares = [sq1]
    G = g.matrix(e1.base)
    for axis in range(dim):
        if len(basis) == dim:
            break
        w = np.zeros(dim)
        w[axis] = 1.0
        # two projection passes; a single pass leaves cancellation noise that
        # can masquerade as a fresh direction when v1 is close to an axis
        for _ in range(2):
            for b, sq in zip(basis, squares):
                w = w - (w @ G @ b.comps) / sq * b.comps
        if np.max(np.abs(w)) < skip_tol:
            continue
        wsq = float(w @ G @ w)
        if np.sqrt(abs(wsq)) < skip_tol:
            continue
        w = w / np.sqrt(abs(wsq))
        basis.append(TangentVector(e1.base, w))
        squares.append(float(w @ G @ w))
    if len(basis) != dim:
        raise DegenerateDirectionError("Gram-Schmidt could not complete the basis")
    return AdaptedBasis(tuple(basis), sq1)


def adapted_basis(g: BundleMetric, v1: TangentVector, null_tol: float = NULL_TOL) -> AdaptedBasis:
    """Basis with first vector ``v1 / sqrt|g(v1, v1)|`` and the rest orthogonal to it.

    Raises :class:`DegenerateDirectionError` for (numerically) null ``v1``:
    the energy is then spread over all components and cannot be read off a
    single one.
    """
    sq = g.square(v1)
    scale = float(np.max(np.abs(v1.comps), initial=0.0))
    if abs(sq) < null_tol * scale**2 or scale == 0.0:
        raise DegenerateDirectionError(
            "null velocity: the relative energy is spread over all the components "
            "and cannot be connected with a single one"
        )
    lam1 = v1 * (1.0 / np.sqrt(abs(sq)))
    return orthogonal_completion(g, lam1)


def first_component(g: BundleMetric, a: TangentVector, basis: AdaptedBasis) -> float:
    """Component of ``a`` along the first basis vector: ``a.l1 / (l1)^2``."""
    l1 = basis.first
    return g.dot(a, l1) / g.square(l1)


def basis_components(g: BundleMetric, a: TangentVector, basis: AdaptedBasis) -> np.ndarray:
    """All components of ``a`` in an orthogonal basis."""
    return np.array([g.dot(a, b) / g.square(b) for b in basis.vectors])
