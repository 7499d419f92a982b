import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from pathkin import _pycore, kernels

BACKENDS = kernels.available_backends()


def _random_problem(rng, n=33, d=3):
    A = rng.normal(size=(2 * n + 1, d, d))
    return A, 0.7 / n


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
@pytest.mark.parametrize("left", [False, True])
@pytest.mark.parametrize("keep", [False, True])
def test_backends_agree_rk4(left, keep):
    rng = np.random.default_rng(3)
    A, h = _random_problem(rng)
    cy = BACKENDS["cython"].rk4_propagate(A, h, left, keep)
    py = BACKENDS["python"].rk4_propagate(A, h, left, keep)
    np.testing.assert_allclose(np.asarray(cy), py, rtol=1e-13, atol=1e-13)


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
def test_backends_agree_contraction_and_simpson():
    rng = np.random.default_rng(4)
    G = rng.normal(size=(9, 4, 4, 4))
    T = rng.normal(size=(9, 4))
    np.testing.assert_allclose(np.asarray(BACKENDS["cython"].contract_connection(G, T)),
                               _pycore.contract_connection(G, T), rtol=1e-14, atol=1e-14)
    Z = rng.normal(size=(9, 4, 4))
    np.testing.assert_allclose(np.asarray(BACKENDS["cython"].simpson_transported(Z, T, 0.125)),
                               _pycore.simpson_transported(Z, T, 0.125), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_rk4_constant_matrix_matches_expm(name):
    from scipy.linalg import expm

    rng = np.random.default_rng(5)
    M = rng.normal(size=(3, 3))
    n = 64
    A = np.broadcast_to(M, (2 * n + 1, 3, 3)).copy()
    h = 1.0 / n
    Y = np.asarray(BACKENDS[name].rk4_propagate(A, h, False, False))
    np.testing.assert_allclose(Y, expm(-M), rtol=1e-8)
    Z = np.asarray(BACKENDS[name].rk4_propagate(A, h, True, False))
    np.testing.assert_allclose(Z, expm(M), rtol=1e-8)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_simpson_exact_on_cubics(name):
    n = 8
    u = np.linspace(0.0, 2.0, n + 1)
    Z = np.broadcast_to(np.eye(2), (n + 1, 2, 2)).copy()
    T = np.stack([u**3, 1.0 + 0 * u], axis=1)
    got = np.asarray(BACKENDS[name].simpson_transported(Z, T, 2.0 / n))
    np.testing.assert_allclose(got, [4.0, 2.0], rtol=1e-14)


def test_pure_python_switch():
    code = "import pathkin.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, PATHKIN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_reload_is_idempotent():
    mod = importlib.reload(kernels)
    assert mod.BACKEND in mod.available_backends()


def test_benchmark_script_runs():
    bench = os.path.join(os.path.dirname(__file__), os.pardir, "benchmarks", "bench_kernels.py")
    out = subprocess.run([sys.executable, bench, "--steps", "8", "--repeat", "1"],
                         capture_output=True, text=True, check=True)
    assert "polar transport [8]" in out.stdout
