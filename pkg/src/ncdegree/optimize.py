"""Global maximization of Husimi Q-functions over one or two coherent amplitudes.

:func:`maximize_q` and :func:`maximize_q2` run Nelder-Mead on
``-log(Q + 1e-300)`` from every point of a lattice inside the search disk(s)
plus starts on the rings ``|beta| = sqrt(n)`` of occupied Fock levels.
:func:`brute_force_max` is an independent lattice scan used as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.optimize import minimize

from .errors import ArityError, BudgetError, ConvergenceError, DomainError
from .kernels import LOG_FACTORIAL, backend, numpy_backend
from .states import BipartiteState, SingleModeState, State

TIE_TOL = 1e-12
DISTINCT_TOL = 1e-9
BRUTE_FORCE_BUDGET = 1e9


@dataclass(frozen=True)
class OptimizerConfig:
    radius_margin: float = 3.0
    grid_per_axis: int = 9
    simplex_tol: float = 1e-10
    max_iters: int = 2000
    seed: int = 0

    def __post_init__(self):
        k = self.grid_per_axis
        if isinstance(k, bool) or int(k) != k or k < 3 or k % 2 == 0:
            raise DomainError(f"grid_per_axis must be an odd integer >= 3, got {k!r}")
        if not self.radius_margin > 0:
            raise DomainError("radius_margin must be positive")
        if not self.simplex_tol > 0:
            raise DomainError("simplex_tol must be positive")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise DomainError("max_iters must be a positive integer")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise DomainError("seed must fit in 64 bits")


@dataclass(frozen=True)
class MaxResult:
    """Outcome of a global maximization.

    ``spread`` is the gap between the best and the third-best distinct local
    maximum found (0 when fewer than two distinct values turned up).
    """

    q_max: float
    argmax: Tuple[complex, ...]
    starts_used: int
    converged_flag: bool
    spread: float
    iterations: int = 0
    converged_starts: int = 0
    radii: Tuple[float, ...] = field(default=())


def search_radius(truncation: int, cfg: OptimizerConfig) -> float:
    return math.sqrt(truncation) + cfg.radius_margin


def _disk_lattice(radius, k):
    axis = np.linspace(-radius, radius, k)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    keep = x * x + y * y <= radius * radius * (1 + 1e-12)
    return np.column_stack([x[keep], y[keep]])


def _ring_point(n, phi):
    r = math.sqrt(n)
    return r * math.cos(phi), r * math.sin(phi)


def _starts_single(s: SingleModeState, radius, k):
    pts = [_disk_lattice(radius, k)]
    ring = []
    for n in s.occupied():
        if n > 0:
            for phi in (0.0, math.pi / 4):
                ring.append(_ring_point(n, phi))
    if ring:
        pts.append(np.array(ring))
    return np.ascontiguousarray(np.vstack(pts))


def _starts_bipartite(s: BipartiteState, ra, rb, k):
    la = _disk_lattice(ra, k)
    lb = _disk_lattice(rb, k)
    grid = np.hstack([np.repeat(la, lb.shape[0], axis=0), np.tile(lb, (la.shape[0], 1))])
    ring = []
    for n, m in s.occupied():
        if n + m > 0:
            for phi in (0.0, math.pi / 4):
                ring.append(_ring_point(n, phi) + _ring_point(m, phi))
    pts = [grid]
    if ring:
        pts.append(np.array(ring))
    return np.ascontiguousarray(np.vstack(pts))


def _simplex_basis(d, seed):
    """Identity for seed 0, otherwise a seeded random orthogonal frame."""
    if seed == 0:
        return np.eye(d)
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def _tie_key(amps):
    norm = math.sqrt(sum(abs(z) ** 2 for z in amps))
    angle = 0.0
    for z in amps:
        if abs(z) > 1e-9:
            angle = math.atan2(z.imag, z.real) % (2 * math.pi)
            break
    return (round(norm, 6), round(angle, 9))


def _reduce(points, qvals, iters, conv, nstart, radii):
    """Pick the global best with a deterministic tie-break, independent of
    the order in which starts were processed."""
    arity = points.shape[1] // 2
    amps = [tuple(complex(p[2 * i], p[2 * i + 1]) for i in range(arity)) for p in points]
    qbest = float(np.max(qvals))
    ties = [i for i in range(len(qvals)) if qvals[i] >= qbest - TIE_TOL]
    win = min(ties, key=lambda i: (_tie_key(amps[i]), i))

    distinct = []
    for q in sorted((float(v) for v in qvals), reverse=True):
        if not distinct or distinct[-1] - q > DISTINCT_TOL:
            distinct.append(q)
        if len(distinct) == 3:
            break
    return MaxResult(
        q_max=float(qvals[win]),
        argmax=amps[win],
        starts_used=nstart,
        converged_flag=bool(conv[win]),
        spread=distinct[0] - distinct[-1],
        iterations=int(iters[win]),
        converged_starts=int(np.count_nonzero(conv)),
        radii=radii,
    )


def _finish(result):
    if result.converged_starts == 0:
        raise ConvergenceError(
            f"no start converged (best q_max = {result.q_max!r} at {result.argmax})", result)
    return result


def maximize_q(s: SingleModeState, cfg: OptimizerConfig | None = None) -> MaxResult:
    """max over beta of Q(beta) for a single-mode state, |beta| <= sqrt(N) + margin."""
    if not isinstance(s, SingleModeState):
        raise ArityError("maximize_q needs a single-mode state")
    cfg = cfg or OptimizerConfig()
    radius = search_radius(s.truncation, cfg)
    starts = _starts_single(s, radius, cfg.grid_per_axis)
    step = radius / (cfg.grid_per_axis - 1)
    mat = np.ascontiguousarray(s.coeffs.reshape(-1, 1))
    xs, _, iters, conv = backend.multistart_nm(
        mat, 1, starts, radius, radius, step, _simplex_basis(2, cfg.seed),
        cfg.simplex_tol, int(cfg.max_iters), LOG_FACTORIAL)
    q = backend.q1_values(s.coeffs, xs[:, 0].copy(), xs[:, 1].copy(), LOG_FACTORIAL) / math.pi
    return _finish(_reduce(xs, q, iters, conv, starts.shape[0], (radius,)))


def maximize_q2(s: BipartiteState, cfg: OptimizerConfig | None = None) -> MaxResult:
    """max over (alpha, beta) of Q(alpha, beta) for a two-mode state."""
    if not isinstance(s, BipartiteState):
        raise ArityError("maximize_q2 needs a bipartite state")
    cfg = cfg or OptimizerConfig()
    ra = search_radius(s.trunc_a, cfg)
    rb = search_radius(s.trunc_b, cfg)
    starts = _starts_bipartite(s, ra, rb, cfg.grid_per_axis)
    step = min(ra, rb) / (cfg.grid_per_axis - 1)
    xs, _, iters, conv = backend.multistart_nm(
        s.coeffs, 2, starts, ra, rb, step, _simplex_basis(4, cfg.seed),
        cfg.simplex_tol, int(cfg.max_iters), LOG_FACTORIAL)
    q = backend.q2_values(s.coeffs, xs[:, 0].copy(), xs[:, 1].copy(), xs[:, 2].copy(),
                          xs[:, 3].copy(), LOG_FACTORIAL) / math.pi ** 2
    return _finish(_reduce(xs, q, iters, conv, starts.shape[0], (ra, rb)))


def maximize(s: State, cfg: OptimizerConfig | None = None) -> MaxResult:
    if isinstance(s, SingleModeState):
        return maximize_q(s, cfg)
    return maximize_q2(s, cfg)


def brute_force_max(s: State, half_width: float = 4.0, step: float = 0.02) -> MaxResult:
    """Exhaustive lattice scan of Q on [-hw, hw]^(2*arity), then one bounded
    Powell refinement from the best lattice point.

    Independent of :func:`maximize_q`: no Nelder-Mead, and the refinement
    evaluates Q through the numpy kernels.
    """
    if not (half_width > 0 and step > 0):
        raise BudgetError("half_width and step must be positive")
    arity = s.arity
    evals = (2 * half_width / step) ** (2 * arity)
    if evals > BRUTE_FORCE_BUDGET:
        raise BudgetError(f"lattice scan needs {evals:.3g} evaluations "
                          f"(budget {BRUTE_FORCE_BUDGET:.0e})")
    k = int(round(2 * half_width / step)) + 1
    axis = np.linspace(-half_width, half_width, k)
    if arity == 1:
        coeffs = s.coeffs

        def qfun(x):
            return numpy_backend.q1_values(coeffs, x[0:1], x[1:2], LOG_FACTORIAL)[0]

        best, i, j = backend.lattice_max1(coeffs, axis, LOG_FACTORIAL)
        x0 = np.array([axis[i], axis[j]])
        scale = math.pi
    else:
        mat = s.coeffs

        def qfun(x):
            return numpy_backend.q2_values(mat, x[0:1], x[1:2], x[2:3], x[3:4],
                                           LOG_FACTORIAL)[0]

        best, i, j, m, n = backend.lattice_max2(mat, axis, LOG_FACTORIAL)
        x0 = np.array([axis[i], axis[j], axis[m], axis[n]])
        scale = math.pi ** 2

    bounds = [(x - 2 * step, x + 2 * step) for x in x0]
    res = minimize(lambda x: -qfun(x), x0, method="Powell", bounds=bounds,
                   options={"xtol": 1e-12, "ftol": 1e-15, "maxfev": 20000})
    xbest, qbest = x0, float(best)
    refined = float(qfun(res.x))
    if refined > qbest:
        xbest, qbest = res.x, refined
    amps = tuple(complex(xbest[2 * a], xbest[2 * a + 1]) for a in range(arity))
    return MaxResult(q_max=qbest / scale, argmax=amps, starts_used=1,
                     converged_flag=bool(res.success), spread=0.0,
                     iterations=int(res.nit), converged_starts=int(bool(res.success)),
                     radii=(half_width,) * arity)
