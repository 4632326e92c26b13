"""Scalar measures of single- and two-mode pure states.

The nonclassical degree is ``D = 1 - pi^k max Q`` with ``k`` the number of
modes, i.e. the smallest value of ``1 - |<coherent|psi>|^2`` over (products
of) coherent states. Entropies use the natural logarithm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .errors import ConvergenceError, DomainError, UndefinedStatisticError
from .kernels import LOG_FACTORIAL, MAX_FOCK
from .optimize import MaxResult, OptimizerConfig, maximize_q, maximize_q2
from .states import BipartiteState, SingleModeState, State

SCHMIDT_CUTOFF = 1e-12
MIN_MEAN_PHOTONS = 1e-12

REPORT_KEYS = ("degree", "q_max", "argmax", "entropy", "mandel_q", "converged",
               "closed_form_ref")


@dataclass(frozen=True)
class MeasureReport:
    degree: float
    q_max: float
    argmax: Tuple[complex, ...]
    entropy: Optional[float]
    mandel_q: Optional[float]
    converged: bool
    closed_form_ref: Optional[float] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Plain dict in the fixed serialization key order."""
        return {
            "degree": self.degree,
            "q_max": self.q_max,
            "argmax": [[z.real, z.imag] for z in self.argmax],
            "entropy": self.entropy,
            "mandel_q": self.mandel_q,
            "converged": self.converged,
            "closed_form_ref": self.closed_form_ref,
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


# -- closed forms ---------------------------------------------------------

def _fock_peak(n: int) -> float:
    """n^n e^-n / n!, the value of pi * max Q for |n>."""
    if n == 0:
        return 1.0
    return math.exp(n * math.log(n) - n - LOG_FACTORIAL[n])


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or not 0 <= n <= MAX_FOCK:
        raise DomainError(f"photon number must be an integer in 0..{MAX_FOCK}, got {n!r}")
    return int(n)


def _check_xi(xi):
    xi = float(xi)
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"xi = {xi!r} outside [0, 1]")
    return xi


def phi_degree_branches(xi: float) -> Tuple[Optional[float], float]:
    """Both candidate degrees for sqrt(xi)|0,0> +/- sqrt(1-xi)|1,1>.

    The first comes from the interior stationary point |alpha|^2 = |beta|^2 =
    1 - sqrt(xi/(1-xi)) and exists only for xi <= 1/2 (None otherwise); the
    second is the vacuum-point value 1 - xi.
    """
    xi = _check_xi(xi)
    interior = None
    if xi <= 0.5:
        interior = 1.0 - (1.0 - xi) * math.exp(-2.0 * (1.0 - math.sqrt(xi / (1.0 - xi))))
    return interior, 1.0 - xi


def closed_form_degree(family: str, n: int | None = None, xi: float | None = None) -> float:
    """Exact degree for ``fock_n`` (n), ``fock_nn`` (n), ``psi`` (xi) or ``phi`` (xi)."""
    if family == "fock_n":
        return 1.0 - _fock_peak(_check_n(n))
    if family == "fock_nn":
        return 1.0 - _fock_peak(_check_n(n)) ** 2
    if family == "psi":
        _check_xi(xi)
        return 1.0 - math.exp(-1.0)
    if family == "phi":
        interior, edge = phi_degree_branches(xi)
        return edge if interior is None else interior
    raise DomainError(f"unknown closed-form family {family!r}")


def closed_form_for(s: State) -> Optional[float]:
    """Closed-form degree for states built by a named constructor, else None."""
    return _closed_from_tag(s.family)


def _closed_from_tag(tag):
    if not tag:
        return None
    kind = tag[0]
    if kind == "fock":
        return closed_form_degree("fock_n", n=tag[1])
    if kind == "coherent":
        return 0.0
    if kind in ("psi", "phi"):
        return closed_form_degree(kind, xi=tag[2])
    if kind == "product":
        a, b = _closed_from_tag(tag[1]), _closed_from_tag(tag[2])
        if a is None or b is None:
            return None
        if tag[1][0] == tag[2][0] == "fock" and tag[1][1] == tag[2][1]:
            return closed_form_degree("fock_nn", n=tag[1][1])
        return compose_product_degree(a, b)
    return None


def compose_product_degree(d1: float, d2: float) -> float:
    """Degree of a product state from its factors: d1 + d2 - d1*d2."""
    for d in (d1, d2):
        if not 0.0 <= d <= 1.0:
            raise DomainError(f"degree {d!r} outside [0, 1]")
    return d1 + d2 - d1 * d2


# -- entropy and photon statistics -------------------------------------------

def schmidt_coefficients(s: BipartiteState) -> np.ndarray:
    lam = np.linalg.svd(s.coeffs, compute_uv=False)
    return lam[lam > SCHMIDT_CUTOFF]


def entanglement_entropy(s: BipartiteState) -> float:
    """Von Neumann entropy (nats) of either reduced state, -sum l^2 ln l^2."""
    if not isinstance(s, BipartiteState):
        raise DomainError("entanglement entropy needs a bipartite state")
    p = schmidt_coefficients(s) ** 2
    return float(max(0.0, -np.sum(p * np.log(p))))


def _photon_numbers(s: State):
    p = np.abs(s.coeffs) ** 2
    if isinstance(s, SingleModeState):
        return np.arange(p.size, dtype=float), p
    n = np.arange(p.shape[0], dtype=float)[:, None] + np.arange(p.shape[1], dtype=float)[None, :]
    return n.ravel(), p.ravel()


def mandel_q(s: State) -> float:
    """<n^2>/<n> - <n> - 1, with n the total photon number."""
    n, p = _photon_numbers(s)
    mean = float(np.dot(p, n))
    if mean <= MIN_MEAN_PHOTONS:
        raise UndefinedStatisticError(
            f"Mandel factor undefined: mean photon number {mean!r} is zero")
    second = float(np.dot(p, n * n))
    return second / mean - mean - 1.0


def _mandel_or_none(s):
    try:
        return mandel_q(s)
    except UndefinedStatisticError:
        return None


# -- nonclassical degree ---------------------------------------------------

def _report(s, res: MaxResult, arity, entropy):
    degree = 1.0 - math.pi ** arity * res.q_max
    return MeasureReport(
        degree=min(1.0, max(0.0, degree)),
        q_max=res.q_max,
        argmax=res.argmax,
        entropy=entropy,
        mandel_q=_mandel_or_none(s),
        converged=res.converged_flag,
        closed_form_ref=closed_form_for(s),
        diagnostics={"starts_used": res.starts_used, "spread": res.spread,
                     "iterations": res.iterations,
                     "converged_starts": res.converged_starts},
    )


def _run(s, maximizer, arity, entropy, cfg):
    try:
        res = maximizer(s, cfg)
    except ConvergenceError as exc:
        exc.report = _report(s, exc.result, arity, entropy)
        raise
    return _report(s, res, arity, entropy)


def nonclassical_degree(s: SingleModeState, cfg: OptimizerConfig | None = None) -> MeasureReport:
    """Degree of a single-mode state via global maximization of its Q-function.

    Raises :class:`ConvergenceError` (with ``.report`` marked unconverged)
    when no local search converged.
    """
    return _run(s, maximize_q, 1, None, cfg)


def nonclassical_degree2(s: BipartiteState, cfg: OptimizerConfig | None = None) -> MeasureReport:
    """Degree of a two-mode state; coherent product states are the reference set."""
    return _run(s, maximize_q2, 2, entanglement_entropy(s), cfg)


def measure(s: State, cfg: OptimizerConfig | None = None) -> MeasureReport:
    if isinstance(s, SingleModeState):
        return nonclassical_degree(s, cfg)
    return nonclassical_degree2(s, cfg)
