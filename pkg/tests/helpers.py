"""Strategies and reference computations shared by the test modules."""

import math

import numpy as np
from hypothesis import strategies as st
from scipy.linalg import expm

from ncdegree.states import bipartite, single_mode

finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)


@st.composite
def single_states(draw, max_trunc=6):
    n = draw(st.integers(0, max_trunc))
    re = draw(st.lists(finite, min_size=n + 1, max_size=n + 1))
    im = draw(st.lists(finite, min_size=n + 1, max_size=n + 1))
    c = np.array(re) + 1j * np.array(im)
    if np.linalg.norm(c) < 1e-3:
        c[0] += 1.0
    return single_mode(c, normalize=True)


@st.composite
def bipartite_states(draw, max_trunc=3):
    na = draw(st.integers(0, max_trunc))
    nb = draw(st.integers(0, max_trunc))
    size = (na + 1) * (nb + 1)
    re = draw(st.lists(finite, min_size=size, max_size=size))
    im = draw(st.lists(finite, min_size=size, max_size=size))
    c = (np.array(re) + 1j * np.array(im)).reshape(na + 1, nb + 1)
    if np.linalg.norm(c) < 1e-3:
        c[0, 0] += 1.0
    return bipartite(c, normalize=True)


amplitudes = st.builds(complex, st.floats(-3, 3), st.floats(-3, 3))


def displacement(alpha, dim):
    """D(alpha) = exp(alpha a^dag - conj(alpha) a) as a dense matrix in a
    truncated space of dimension ``dim``."""
    a = np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def wigner_by_parity(alpha, coeffs, dim=80):
    """W(alpha) = (2/pi) <psi| D(alpha) (-1)^n D(alpha)^dag |psi>,
    computed in an enlarged space so the truncated displacement is accurate."""
    psi = np.zeros(dim, dtype=complex)
    psi[: len(coeffs)] = coeffs
    shifted = displacement(-alpha, dim) @ psi
    parity = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    return 2.0 / math.pi * float(np.sum(parity * np.abs(shifted) ** 2))


def coherent_overlap_by_displacement(beta, coeffs, dim=80):
    """<beta|psi> with |beta> = D(beta)|0> built by matrix exponential."""
    vac = np.zeros(dim, dtype=complex)
    vac[0] = 1.0
    ket = displacement(beta, dim) @ vac
    psi = np.zeros(dim, dtype=complex)
    psi[: len(coeffs)] = coeffs
    return complex(np.vdot(ket, psi))


def random_single(rng, trunc):
    c = rng.standard_normal(trunc + 1) + 1j * rng.standard_normal(trunc + 1)
    return single_mode(c, normalize=True)


def random_bipartite(rng, na, nb):
    c = rng.standard_normal((na + 1, nb + 1)) + 1j * rng.standard_normal((na + 1, nb + 1))
    return bipartite(c, normalize=True)


# criterion number -> "criterion N ... PASS|FAIL" line, filled by test_acceptance
ACCEPTANCE = {}
