"""Closed-form and brute-force check battery behind ``ncdegree oracle``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional

import numpy as np

from .measures import (
    closed_form_degree, compose_product_degree, entanglement_entropy, mandel_q,
    nonclassical_degree, nonclassical_degree2,
)
from .optimize import OptimizerConfig, brute_force_max, maximize, search_radius
from .states import (
    bipartite, make_fock, make_phi_family, make_product, make_psi_family, single_mode,
)

GROUPS = ("fock", "fock_nn", "psi", "phi", "composition", "brute", "entropy", "mandel")

DEGREE_TOL = 1e-6
EXACT_TOL = 1e-12


@dataclass(frozen=True)
class Case:
    group: str
    name: str
    compute: Callable[[], float]
    reference: Callable[[], float]
    tol: float


@dataclass(frozen=True)
class Outcome:
    group: str
    name: str
    value: float
    reference: float
    delta: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.delta <= self.tol


def xi_grid(step=0.05):
    k = int(round(1.0 / step))
    return [round(i * step, 12) for i in range(k + 1)]


def entropy_formula(xi):
    """-(xi ln xi + (1 - xi) ln(1 - xi)) with 0 ln 0 = 0."""
    return -sum(p * math.log(p) for p in (xi, 1.0 - xi) if p > 0.0)


def random_single(rng, max_trunc):
    n = int(rng.integers(1, max_trunc + 1))
    c = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return single_mode(c, normalize=True)


def random_bipartite(rng, max_trunc):
    na, nb = (int(x) for x in rng.integers(1, max_trunc + 1, size=2))
    c = rng.standard_normal((na + 1, nb + 1)) + 1j * rng.standard_normal((na + 1, nb + 1))
    return bipartite(c, normalize=True)


def _degree(s, cfg):
    return lambda: (nonclassical_degree(s, cfg) if s.arity == 1
                    else nonclassical_degree2(s, cfg)).degree


def _const(x):
    return lambda: x


def _brute_case(name, s, cfg):
    if s.arity == 1:
        hw, step = search_radius(s.truncation, cfg), 0.02
    else:
        hw, step = max(search_radius(s.trunc_a, cfg), search_radius(s.trunc_b, cfg)), 0.1
    return Case("brute", name, lambda: maximize(s, cfg).q_max,
                lambda: brute_force_max(s, hw, step).q_max, DEGREE_TOL)


def battery(cfg: OptimizerConfig | None = None, seed: int = 0) -> List[Case]:
    cfg = cfg or OptimizerConfig()
    rng = np.random.default_rng(seed)
    cases: List[Case] = []

    for n in range(9):
        cases.append(Case("fock", f"|{n}>", _degree(make_fock(n), cfg),
                          _const(closed_form_degree("fock_n", n=n)), DEGREE_TOL))
    for n in range(5):
        s = make_product(make_fock(n), make_fock(n))
        cases.append(Case("fock_nn", f"|{n},{n}>", _degree(s, cfg),
                          _const(closed_form_degree("fock_nn", n=n)), DEGREE_TOL))
    for fam, make in (("psi", make_psi_family), ("phi", make_phi_family)):
        for sign in "+-":
            for xi in xi_grid():
                s = make(sign, xi)
                cases.append(Case(fam, f"{fam}{sign}({xi:g})", _degree(s, cfg),
                                  _const(closed_form_degree(fam, xi=xi)), DEGREE_TOL))

    for k in range(5):
        a, b = random_single(rng, 4), random_single(rng, 4)

        def composed(a=a, b=b):
            return compose_product_degree(nonclassical_degree(a, cfg).degree,
                                          nonclassical_degree(b, cfg).degree)

        cases.append(Case("composition", f"random pair {k}",
                          _degree(make_product(a, b), cfg), composed, DEGREE_TOL))

    for n in range(7):
        cases.append(_brute_case(f"|{n}>", make_fock(n), cfg))
    for n, m in ((0, 1), (0, 2), (1, 3), (0, 4)):
        c = np.zeros(max(n, m) + 1, dtype=complex)
        c[n] = c[m] = 1.0
        cases.append(_brute_case(f"(|{n}>+|{m}>)/sqrt2", single_mode(c, normalize=True), cfg))
    for xi in xi_grid(0.1):
        cases.append(_brute_case(f"psi+({xi:g})", make_psi_family("+", xi), cfg))
        cases.append(_brute_case(f"phi+({xi:g})", make_phi_family("+", xi), cfg))

    for fam, make in (("psi", make_psi_family), ("phi", make_phi_family)):
        for xi in xi_grid(0.1):
            s = make("+", xi)
            cases.append(Case("entropy", f"E {fam}+({xi:g})",
                              lambda s=s: entanglement_entropy(s),
                              _const(entropy_formula(xi)), EXACT_TOL))

    for n, m in ((0, 1), (1, 0), (1, 1), (2, 3), (4, 0)):
        s = make_product(make_fock(n), make_fock(m))
        cases.append(Case("mandel", f"q |{n},{m}>", lambda s=s: mandel_q(s),
                          _const(-1.0), EXACT_TOL))
    for xi in xi_grid(0.1):
        s = make_psi_family("-", xi)
        cases.append(Case("mandel", f"q psi-({xi:g})", lambda s=s: mandel_q(s),
                          _const(-1.0), EXACT_TOL))
        if xi < 1:  # phi(1) is the vacuum, where q is undefined
            s = make_phi_family("-", xi)
            cases.append(Case("mandel", f"q phi-({xi:g})", lambda s=s: mandel_q(s),
                              _const(2 * xi - 1), EXACT_TOL))
    return cases


def run(cases: Iterable[Case], only: Optional[Iterable[str]] = None,
        perturb: float = 0.0) -> List[Outcome]:
    """Evaluate the selected cases; ``perturb`` is added to every computed
    value (a self-check that the harness can fail)."""
    groups = set(only) if only else None
    out = []
    for case in cases:
        if groups is not None and case.group not in groups:
            continue
        value = case.compute() + perturb
        ref = case.reference()
        out.append(Outcome(case.group, case.name, value, ref, abs(value - ref), case.tol))
    return out


def format_table(outcomes: List[Outcome]) -> str:
    header = f"{'group':<12} {'case':<22} {'value':>16} {'reference':>16} {'|delta|':>10} {'tol':>8}  result"
    lines = [header, "-" * len(header)]
    for o in outcomes:
        lines.append(f"{o.group:<12} {o.name:<22} {o.value:>16.9g} {o.reference:>16.9g} "
                     f"{o.delta:>10.3g} {o.tol:>8.0e}  {'PASS' if o.passed else 'FAIL'}")
    npass = sum(o.passed for o in outcomes)
    lines.append(f"{npass}/{len(outcomes)} passed")
    return "\n".join(lines)
