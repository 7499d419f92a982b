import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pathkin.errors import DegenerateDirectionError, NumericError, PreconditionError
from pathkin.geometry import TangentVector
from pathkin.metric import (
    BundleMetric,
    adapted_basis,
    basis_components,
    constant_metric,
    epsilon,
    euclidean_metric,
    first_component,
    minkowski_metric,
    polar_metric,
    scalar_product,
    scalar_square,
)

MINK = minkowski_metric()
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec4 = arrays(np.float64, 4, elements=finite)


def tv(*comps, base=None):
    comps = np.asarray(comps, dtype=float)
    return TangentVector(np.zeros(len(comps)) if base is None else base, comps)


def test_scalar_product_examples():
    assert scalar_product(MINK, tv(1, 0, 0, 0), tv(1, 0, 0, 0)) == 1.0
    assert scalar_product(MINK, tv(1, 1, 0, 0), tv(1, -1, 0, 0)) == 2.0
    V = 1.25 * np.array([1.0, 0.6, 0.0, 0.0])
    assert scalar_square(MINK, tv(*V)) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(PreconditionError):
        scalar_product(MINK, tv(1, 0, 0, 0), tv(1, 0, 0, 0, base=np.ones(4)))


def test_scalar_square_examples():
    n = np.array([0.36, 0.48, 0.8])
    assert abs(scalar_square(MINK, tv(1.0, *n))) <= 1e-15
    assert scalar_square(MINK, tv(0, 0, 0, 0)) == 0.0
    assert scalar_square(MINK, tv(0, 1, 0, 0)) == -1.0


def test_epsilon():
    assert epsilon(-3.0) == -1.0
    assert epsilon(0.0) == 1.0
    assert epsilon(0.0, -1) == -1.0
    assert epsilon(1.0) == 1.0


def test_metric_validation():
    with pytest.raises(NumericError, match="not symmetric"):
        BundleMetric(lambda x: np.array([[1.0, 0.5], [0.0, 1.0]])).matrix(np.zeros(2))
    with pytest.raises(NumericError, match="degenerate"):
        constant_metric(np.zeros((2, 2))).matrix(np.zeros(2))
    np.testing.assert_array_equal(polar_metric().matrix((2.0, 1.0)), np.diag([1.0, 4.0]))


@settings(max_examples=100, deadline=None)
@given(vec4, vec4, vec4, finite, finite)
def test_bilinear_and_symmetric(u, v, w, a, b):
    U, V, W = tv(*u), tv(*v), tv(*w)
    assert abs(MINK.dot(U, V) - MINK.dot(V, U)) <= 1e-14 * max(1.0, np.abs(u).max() * np.abs(v).max())
    lhs = MINK.dot(U * a + W * b, V)
    rhs = a * MINK.dot(U, V) + b * MINK.dot(W, V)
    scale = max(1.0, abs(a) * np.abs(u).max() * np.abs(v).max() + abs(b) * np.abs(w).max() * np.abs(v).max())
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_adapted_basis_examples():
    B = adapted_basis(MINK, tv(2, 0, 0, 0))
    np.testing.assert_array_equal(B.first.comps, [1, 0, 0, 0])
    assert B.signature1 == 1.0
    E = euclidean_metric(2)
    B2 = adapted_basis(E, tv(3, 4))
    np.testing.assert_allclose(B2.first.comps, [0.6, 0.8])
    assert abs(E.dot(B2.vectors[0], B2.vectors[1])) < 1e-15
    with pytest.raises(DegenerateDirectionError, match="spread over all the components"):
        adapted_basis(MINK, tv(1, 1, 0, 0))


def _check_basis(g, v, B):
    lam = B.vectors
    assert len(lam) == v.dim
    for b in lam[1:]:
        assert abs(g.dot(lam[0], b)) <= 1e-10
    assert abs(g.square(lam[0]) - epsilon(g.square(v))) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(vec4)
def test_adapted_basis_invariants_minkowski(v):
    V = tv(*v)
    scale = np.abs(v).max()
    assume(scale > 1e-3 and abs(MINK.square(V)) > 1e-3 * scale**2)
    _check_basis(MINK, V, adapted_basis(MINK, V))


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, 3, elements=finite))
def test_adapted_basis_invariants_euclidean(v):
    E = euclidean_metric(3)
    assume(np.abs(v).max() > 1e-3)
    _check_basis(E, tv(*v), adapted_basis(E, tv(*v)))


@settings(max_examples=100, deadline=None)
@given(vec4, vec4, st.floats(0.01, 100))
def test_first_component_scale_invariant_and_complete(v, a, k):
    V = tv(*v)
    scale = np.abs(v).max()
    assume(scale > 1e-3 and abs(MINK.square(V)) > 1e-3 * scale**2)
    A = tv(*a)
    B, Bk = adapted_basis(MINK, V), adapted_basis(MINK, V * k)
    c, ck = first_component(MINK, A, B), first_component(MINK, A, Bk)
    assert abs(c - ck) <= 1e-12 * max(1.0, abs(c))
    comps = basis_components(MINK, A, B)
    rebuilt = sum((b.comps * x for b, x in zip(B.vectors, comps)), np.zeros(4))
    assert np.max(np.abs(rebuilt - a)) <= 1e-10 * max(1.0, np.abs(a).max())


def test_basis_near_an_axis():
    # the second axis is almost parallel to v1 after projection
    V = tv(3.0, 1e-6, 0.0, 0.0)
    B = adapted_basis(MINK, V)
    gram = np.array([[MINK.dot(a, b) for b in B.vectors] for a in B.vectors])
    np.testing.assert_allclose(gram, np.diag(np.diag(gram)), atol=1e-10)
    assert np.all(np.abs(np.diag(gram)) > 0.5)


def test_first_component_examples():
    E = euclidean_metric(2)
    B = adapted_basis(E, tv(3, 4))
    assert first_component(E, B.first, B) == pytest.approx(1.0)
    assert first_component(E, tv(-0.8, 0.6), B) == pytest.approx(0.0, abs=1e-15)
    # timelike momentum in its own basis: p^1 = E11 / sqrt|V^2|
    V = tv(1.25, 0.75, 0, 0)
    p = V * 2.0
    assert first_component(MINK, p, adapted_basis(MINK, V)) == pytest.approx(2.0, rel=1e-14)
