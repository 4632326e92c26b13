"""Coherent-state overlaps, Husimi and Wigner functions, fidelity distances.

Conventions: ``|beta> = exp(-|beta|^2/2) sum_n beta^n / sqrt(n!) |n>``,
``Q(beta) = |<beta|psi>|^2 / pi`` for one mode and
``Q(alpha, beta) = |<alpha, beta|psi>|^2 / pi^2`` for two, and the Wigner
function is normalized to unit integral (vacuum peak ``2/pi``).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ArityError, DomainError, QuadratureConfigError
from .kernels import LOG_FACTORIAL, backend
from .states import BipartiteState, SingleModeState, State

MAX_OVERLAP_AMPLITUDE = 40.0
MAX_WIGNER_AMPLITUDE = 20.0
MAX_AXIS_INTERVALS = 2048
KERNEL_RADIUS = 3.5  # exp(-2 * 3.5**2) < 1e-10
MAX_QUADRATURE_STEP = 0.2

PhasePoint = Union[complex, Sequence[complex]]


@dataclass(frozen=True)
class GridSpec:
    """Square lattice ``center + (i*step, j*step)`` with |i*step|, |j*step| <= half_width."""

    half_width: float = 4.0
    step: float = 0.05
    center: complex = 0j

    def __post_init__(self):
        if not (self.half_width > 0 and self.step > 0):
            raise QuadratureConfigError("grid half_width and step must be positive")
        if not (math.isfinite(self.half_width) and math.isfinite(self.step)):
            raise QuadratureConfigError("grid half_width and step must be finite")
        if 2 * self.half_width / self.step > MAX_AXIS_INTERVALS + 1e-9:
            raise QuadratureConfigError(
                f"grid has {2 * self.half_width / self.step:.0f} intervals per axis "
                f"(limit {MAX_AXIS_INTERVALS})")
        object.__setattr__(self, "center", complex(self.center))

    @property
    def points_per_side(self) -> int:
        return int(math.floor(self.half_width / self.step + 1e-9))

    def offsets(self) -> np.ndarray:
        k = self.points_per_side
        return np.arange(-k, k + 1) * self.step

    def re_axis(self) -> np.ndarray:
        return self.center.real + self.offsets()

    def im_axis(self) -> np.ndarray:
        return self.center.imag + self.offsets()


def _points(p, arity):
    if isinstance(p, (complex, float, int, np.number)):
        amps = (complex(p),)
    else:
        amps = tuple(complex(z) for z in p)
    if len(amps) != arity:
        raise ArityError(f"expected {arity} amplitude(s), got {len(amps)}")
    for z in amps:
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DomainError("phase-space amplitudes must be finite")
    return amps


def _require_single(s):
    if not isinstance(s, SingleModeState):
        raise ArityError("expected a single-mode state")


def _require_bipartite(s):
    if not isinstance(s, BipartiteState):
        raise ArityError("expected a bipartite state")


def coherent_overlap(beta: complex, s: SingleModeState) -> complex:
    """<beta|psi> = exp(-|beta|^2/2) sum_n c_n conj(beta)^n / sqrt(n!)."""
    _require_single(s)
    (beta,) = _points(beta, 1)
    if abs(beta) > MAX_OVERLAP_AMPLITUDE:
        raise DomainError(f"|beta| = {abs(beta)} exceeds {MAX_OVERLAP_AMPLITUDE}")
    u = backend.bra_coeffs(np.array([beta.real]), np.array([beta.imag]),
                           s.truncation, LOG_FACTORIAL)
    return complex(u[0] @ s.coeffs)


def husimi_q(p: PhasePoint, s: SingleModeState) -> float:
    _require_single(s)
    (beta,) = _points(p, 1)
    if abs(beta) > MAX_OVERLAP_AMPLITUDE:
        raise DomainError(f"|beta| = {abs(beta)} exceeds {MAX_OVERLAP_AMPLITUDE}")
    q = backend.q1_values(s.coeffs, np.array([beta.real]), np.array([beta.imag]), LOG_FACTORIAL)
    return float(q[0]) / math.pi


def husimi_q2(p: PhasePoint, s: BipartiteState) -> float:
    _require_bipartite(s)
    alpha, beta = _points(p, 2)
    if max(abs(alpha), abs(beta)) > MAX_OVERLAP_AMPLITUDE:
        raise DomainError(f"amplitudes exceed {MAX_OVERLAP_AMPLITUDE}")
    q = backend.q2_values(s.coeffs, np.array([alpha.real]), np.array([alpha.imag]),
                          np.array([beta.real]), np.array([beta.imag]), LOG_FACTORIAL)
    return float(q[0]) / math.pi ** 2


def husimi_q_points(s: SingleModeState, re, im) -> np.ndarray:
    """Vectorized :func:`husimi_q` over arrays of real and imaginary parts."""
    _require_single(s)
    re = np.ascontiguousarray(re, dtype=float).ravel()
    im = np.ascontiguousarray(im, dtype=float).ravel()
    return backend.q1_values(s.coeffs, re, im, LOG_FACTORIAL) / math.pi


def husimi_q2_points(s: BipartiteState, alpha, beta) -> np.ndarray:
    _require_bipartite(s)
    alpha = np.asarray(alpha, dtype=complex).ravel()
    beta = np.asarray(beta, dtype=complex).ravel()
    q = backend.q2_values(s.coeffs, alpha.real.copy(), alpha.imag.copy(),
                          beta.real.copy(), beta.imag.copy(), LOG_FACTORIAL)
    return q / math.pi ** 2


def wigner(alpha: complex, s: SingleModeState) -> float:
    _require_single(s)
    (alpha,) = _points(alpha, 1)
    if abs(alpha) > MAX_WIGNER_AMPLITUDE:
        raise DomainError(f"|alpha| = {abs(alpha)} exceeds {MAX_WIGNER_AMPLITUDE}")
    w = backend.wigner_values(s.coeffs, np.array([alpha.real]), np.array([alpha.imag]),
                              LOG_FACTORIAL)
    return float(w[0])


def wigner_points(s: SingleModeState, re, im) -> np.ndarray:
    _require_single(s)
    re = np.ascontiguousarray(re, dtype=float).ravel()
    im = np.ascontiguousarray(im, dtype=float).ravel()
    if re.size and float(np.max(re * re + im * im)) > MAX_WIGNER_AMPLITUDE ** 2:
        raise DomainError(f"Wigner evaluation limited to |alpha| <= {MAX_WIGNER_AMPLITUDE}")
    return backend.wigner_values(s.coeffs, re, im, LOG_FACTORIAL)


def _trapezoid_weights(n):
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def _gaussian_convolution(s, xs, ys, bx, by, h):
    """(2/pi) h^2 sum_ij t_i t_j W(x_i + i y_j) exp(-2(x_i-bx)^2 - 2(y_j-by)^2)
    for every output point (bx[k], by[l]); t are trapezoid weights."""
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    w = wigner_points(s, gx.ravel(), gy.ravel()).reshape(gx.shape)
    w = w * _trapezoid_weights(xs.size)[:, None] * _trapezoid_weights(ys.size)[None, :]
    kx = np.exp(-2.0 * (bx[:, None] - xs[None, :]) ** 2)
    ky = np.exp(-2.0 * (by[:, None] - ys[None, :]) ** 2)
    return (2.0 / math.pi) * h * h * (kx @ w @ ky.T)


def _check_quadrature(step, half_width):
    if step > MAX_QUADRATURE_STEP:
        raise QuadratureConfigError(
            f"quadrature step {step} too coarse (limit {MAX_QUADRATURE_STEP})")
    if half_width < KERNEL_RADIUS:
        raise QuadratureConfigError(
            f"quadrature half-width {half_width} below the kernel radius {KERNEL_RADIUS}")


def q_from_w(beta: complex, s: SingleModeState, g: GridSpec | None = None) -> float:
    """Husimi Q at ``beta`` as the Gaussian smoothing of the Wigner function.

    Trapezoidal quadrature over the lattice ``g`` (default: half-width 4,
    step 0.05, centered on ``beta``); the lattice must cover the disk of
    radius 3.5 around ``beta``.
    """
    _require_single(s)
    (beta,) = _points(beta, 1)
    if g is None:
        g = GridSpec(4.0, 0.05, beta)
    _check_quadrature(g.step, g.half_width)
    reach = g.points_per_side * g.step
    off = beta - g.center
    if max(abs(off.real), abs(off.imag)) + KERNEL_RADIUS > reach + 1e-12:
        raise QuadratureConfigError(
            f"grid centered at {g.center} with reach {reach} does not cover "
            f"|alpha - beta| <= {KERNEL_RADIUS} around beta = {beta}")
    q = _gaussian_convolution(s, g.re_axis(), g.im_axis(),
                              np.array([beta.real]), np.array([beta.imag]), g.step)
    return float(q[0, 0])


def q_from_w_grid(s: SingleModeState, re_axis, im_axis, half_width=4.0, step=0.05):
    """:func:`q_from_w` over a whole output lattice, sharing one Wigner table.

    Returns an array of shape (len(re_axis), len(im_axis)).
    """
    _require_single(s)
    _check_quadrature(step, half_width)
    re_axis = np.asarray(re_axis, dtype=float)
    im_axis = np.asarray(im_axis, dtype=float)

    def fine(axis):
        lo = math.floor((axis.min() - half_width) / step)
        hi = math.ceil((axis.max() + half_width) / step)
        if hi - lo > 4 * MAX_AXIS_INTERVALS:
            raise QuadratureConfigError("Wigner table for the convolution is too large")
        return np.arange(lo, hi + 1) * step

    return _gaussian_convolution(s, fine(re_axis), fine(im_axis), re_axis, im_axis, step)


# -- fidelity and distances -------------------------------------------------

def _padded(a: State, b: State):
    if type(a) is not type(b):
        raise ArityError("fidelity needs two states with the same number of modes")
    ca, cb = a.coeffs, b.coeffs
    shape = tuple(max(x, y) for x, y in zip(ca.shape, cb.shape))
    pa = np.zeros(shape, dtype=np.complex128)
    pb = np.zeros(shape, dtype=np.complex128)
    pa[tuple(slice(0, n) for n in ca.shape)] = ca
    pb[tuple(slice(0, n) for n in cb.shape)] = cb
    return pa, pb


def fidelity(a: State, b: State) -> float:
    """|<a|b>|^2, zero-padding the smaller truncation."""
    pa, pb = _padded(a, b)
    f = abs(np.vdot(pa, pb)) ** 2
    return float(min(1.0, max(0.0, f)))


def _infidelity(a: State, b: State) -> float:
    """1 - F computed as ||b - <a|b> a||^2, which stays accurate (and exactly
    zero for identical inputs) where the difference 1 - F would cancel."""
    pa, pb = _padded(a, b)
    r = pb - np.vdot(pa, pb) * pa
    return float(min(1.0, max(0.0, np.vdot(r, r).real)))


def distance_bu(a: State, b: State) -> float:
    """Bures-Uhlmann distance sqrt(2 - 2 sqrt(F)), evaluated as
    sqrt(2 (1 - F) / (1 + sqrt(F)))."""
    return math.sqrt(2.0 * _infidelity(a, b) / (1.0 + math.sqrt(fidelity(a, b))))


def distance_hs(a: State, b: State) -> float:
    """Hilbert-Schmidt distance sqrt(2 - 2F)."""
    return math.sqrt(2.0 * _infidelity(a, b))


# -- grid dumps ---------------------------------------------------------------

def grid_csv(re_axis, im_axis, values) -> str:
    """``re,im,value`` rows, real part outer, 17 significant digits."""
    values = np.asarray(values, dtype=float)
    buf = io.StringIO()
    buf.write("re,im,value\n")
    for i, x in enumerate(re_axis):
        for j, y in enumerate(im_axis):
            buf.write(f"{float(x):.17g},{float(y):.17g},{values[i, j]:.17g}\n")
    return buf.getvalue()
