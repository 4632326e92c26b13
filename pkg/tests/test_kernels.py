"""The numba kernels and the numpy fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from ncdegree import kernels
from ncdegree.kernels import LOG_FACTORIAL, numpy_backend as npk

from helpers import random_bipartite, random_single

nbk = kernels.numba_backend
pytestmark = pytest.mark.skipif(nbk is None, reason="numba not installed")


@pytest.fixture
def points(rng):
    return rng.uniform(-4, 4, 200), rng.uniform(-4, 4, 200)


@pytest.mark.parametrize("trunc", [0, 1, 5, 40])
def test_bra_coeffs(trunc, points):
    re, im = points
    re[0] = im[0] = 0.0
    a = nbk.bra_coeffs(re, im, trunc, LOG_FACTORIAL)
    b = npk.bra_coeffs(re, im, trunc, LOG_FACTORIAL)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("trunc", [0, 3, 12])
def test_q1_and_wigner(trunc, points, rng):
    s = random_single(rng, trunc)
    re, im = points
    for name in ("q1_values", "wigner_values"):
        a = getattr(nbk, name)(s.coeffs, re, im, LOG_FACTORIAL)
        b = getattr(npk, name)(s.coeffs, re, im, LOG_FACTORIAL)
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-14, err_msg=name)


def test_q2(points, rng):
    s = random_bipartite(rng, 3, 2)
    re, im = points
    a = nbk.q2_values(s.coeffs, re, im, im[::-1].copy(), re[::-1].copy(), LOG_FACTORIAL)
    b = npk.q2_values(s.coeffs, re, im, im[::-1].copy(), re[::-1].copy(), LOG_FACTORIAL)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-16)


def test_lattice_scans_pick_the_same_point(rng):
    axis = np.linspace(-3, 3, 25)
    s = random_single(rng, 4)
    assert nbk.lattice_max1(s.coeffs, axis, LOG_FACTORIAL)[1:] == \
        npk.lattice_max1(s.coeffs, axis, LOG_FACTORIAL)[1:]
    m = random_bipartite(rng, 2, 2)
    a = nbk.lattice_max2(m.coeffs, axis, LOG_FACTORIAL)
    b = npk.lattice_max2(m.coeffs, axis, LOG_FACTORIAL)
    assert a[1:] == b[1:]
    assert a[0] == pytest.approx(b[0], rel=1e-12)


@pytest.mark.parametrize("arity", [1, 2])
def test_nelder_mead_backends_agree(arity, rng):
    if arity == 1:
        mat = random_single(rng, 4).coeffs.reshape(-1, 1).copy()
        starts = rng.uniform(-2, 2, (12, 2))
    else:
        mat = random_bipartite(rng, 2, 1).coeffs
        starts = rng.uniform(-1.5, 1.5, (12, 4))
    d = starts.shape[1]
    args = (mat, arity, starts, 5.0, 5.0, 0.3, np.eye(d), 1e-10, 2000, LOG_FACTORIAL)
    xa, fa, ia, ca = nbk.multistart_nm(*args)
    xb, fb, ib, cb = npk.multistart_nm(*args)
    assert ca.all() and cb.all()
    # same algorithm; last-bit differences in exp/log can reorder ties late on
    np.testing.assert_allclose(fa, fb, rtol=0, atol=1e-12)


def test_wigner_survives_large_photon_numbers():
    c = np.zeros(257, dtype=complex)
    c[256] = 1.0
    re = np.array([0.0, 3.0, 8.0, 16.0, 20.0])
    im = np.zeros(5)
    for k in (nbk, npk):
        w = k.wigner_values(c, re, im, LOG_FACTORIAL)
        assert np.all(np.isfinite(w))
        assert w[0] == pytest.approx(2 / np.pi)
        assert np.all(np.abs(w) <= 2 / np.pi + 1e-12)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, NCDEGREE_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "import ncdegree.kernels as k; print(k.BACKEND_NAME)"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba():
    if os.environ.get("NCDEGREE_DISABLE_NUMBA", "") not in ("", "0"):
        pytest.skip("numba disabled for this run")
    assert kernels.BACKEND_NAME == "numba"
