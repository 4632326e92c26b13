"""Fock-basis pure states of one and two bosonic modes.

States are immutable: the coefficient arrays are copied on construction and
marked read-only. Global phase is left as given; nothing downstream depends
on it.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np
from scipy.stats import poisson

from .errors import BoundsError, DomainError, NormalizationError, ParseError, TruncationError
from .kernels import LOG_FACTORIAL

MAX_SINGLE = 256
MAX_PER_MODE = 64
NORM_TOL = 1e-9
LOAD_RENORM_TOL = 1e-6
COHERENT_TAIL_TOL = 1e-12
MAX_COHERENT_AMPLITUDE = 8.0


def _check_normalized(coeffs):
    if not np.all(np.isfinite(coeffs)):
        raise DomainError("state coefficients must be finite")
    norm2 = float(np.sum(np.abs(coeffs) ** 2))
    if abs(norm2 - 1.0) > NORM_TOL:
        raise NormalizationError(f"state is not normalized: sum |c|^2 = {norm2!r}")


def _frozen(coeffs, ndim):
    arr = np.array(coeffs, dtype=np.complex128, copy=True)
    if arr.ndim != ndim:
        raise DomainError(f"expected a {ndim}-d coefficient array, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError("coefficient array is empty")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SingleModeState:
    """Normalized coefficients c_n of |0>..|N> for one mode.

    ``family`` optionally tags states built by a named constructor so the
    matching closed-form degree can be looked up, e.g. ``("fock", 3)``.
    """

    coeffs: np.ndarray
    family: Optional[tuple] = None
    diagnostics: Mapping[str, Any] = field(default_factory=dict)

    arity = 1

    def __post_init__(self):
        arr = _frozen(self.coeffs, 1)
        if arr.shape[0] - 1 > MAX_SINGLE:
            raise BoundsError(f"single-mode truncation {arr.shape[0] - 1} exceeds {MAX_SINGLE}")
        _check_normalized(arr)
        object.__setattr__(self, "coeffs", arr)

    @property
    def truncation(self) -> int:
        return self.coeffs.shape[0] - 1

    def occupied(self, tol=1e-14):
        """Photon numbers carrying non-negligible amplitude."""
        return [int(n) for n in np.flatnonzero(np.abs(self.coeffs) > tol)]


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Normalized coefficients c[n, m] of |n>_a |m>_b."""

    coeffs: np.ndarray
    family: Optional[tuple] = None
    diagnostics: Mapping[str, Any] = field(default_factory=dict)

    arity = 2

    def __post_init__(self):
        arr = _frozen(self.coeffs, 2)
        na, nb = arr.shape[0] - 1, arr.shape[1] - 1
        if na > MAX_PER_MODE or nb > MAX_PER_MODE:
            raise BoundsError(f"per-mode truncation ({na}, {nb}) exceeds {MAX_PER_MODE}")
        _check_normalized(arr)
        object.__setattr__(self, "coeffs", arr)

    @property
    def trunc_a(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def trunc_b(self) -> int:
        return self.coeffs.shape[1] - 1

    def occupied(self, tol=1e-14):
        idx = np.argwhere(np.abs(self.coeffs) > tol)
        return [(int(n), int(m)) for n, m in idx]


State = Union[SingleModeState, BipartiteState]


def single_mode(coeffs, normalize=False, family=None) -> SingleModeState:
    """Wrap raw coefficients, optionally rescaling them to unit norm."""
    arr = np.asarray(coeffs, dtype=np.complex128)
    if normalize:
        norm = np.linalg.norm(arr)
        if not np.isfinite(norm) or norm == 0.0:
            raise NormalizationError("cannot normalize a zero or non-finite vector")
        arr = arr / norm
    return SingleModeState(arr, family=family)


def bipartite(coeffs, normalize=False, family=None) -> BipartiteState:
    arr = np.asarray(coeffs, dtype=np.complex128)
    if normalize:
        norm = np.linalg.norm(arr)
        if not np.isfinite(norm) or norm == 0.0:
            raise NormalizationError("cannot normalize a zero or non-finite matrix")
        arr = arr / norm
    return BipartiteState(arr, family=family)


def make_fock(n: int) -> SingleModeState:
    """Number state |n>, stored with truncation n."""
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"photon number must be an integer, got {n!r}")
    n = int(n)
    if n < 0 or n > MAX_SINGLE:
        raise BoundsError(f"photon number {n} outside 0..{MAX_SINGLE}")
    c = np.zeros(n + 1, dtype=np.complex128)
    c[n] = 1.0
    return SingleModeState(c, family=("fock", n))


def default_coherent_truncation(alpha) -> int:
    r = abs(complex(alpha))
    return min(MAX_SINGLE, math.ceil(r * r + 6 * r + 10))


def _required_truncation(mean):
    n = 0
    while n < MAX_SINGLE and poisson.sf(n, mean) >= COHERENT_TAIL_TOL:
        n += 1
    return n


def make_coherent(alpha, truncation: Optional[int] = None) -> SingleModeState:
    """Coherent state |alpha> cut at ``truncation`` and renormalized.

    The discarded Poisson tail must stay below 1e-12; its weight is kept in
    ``diagnostics["tail_weight"]``. ``truncation`` defaults to
    ceil(|alpha|^2 + 6|alpha| + 10).
    """
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise DomainError("coherent amplitude must be finite")
    r = abs(alpha)
    if r > MAX_COHERENT_AMPLITUDE:
        raise DomainError(f"|alpha| = {r} exceeds {MAX_COHERENT_AMPLITUDE}")
    if truncation is None:
        truncation = default_coherent_truncation(alpha)
    truncation = int(truncation)
    if truncation < 0 or truncation > MAX_SINGLE:
        raise BoundsError(f"truncation {truncation} outside 0..{MAX_SINGLE}")
    mean = r * r
    tail = float(poisson.sf(truncation, mean)) if mean > 0 else 0.0
    if tail >= COHERENT_TAIL_TOL:
        need = _required_truncation(mean)
        raise TruncationError(
            f"truncation {truncation} discards weight {tail:.3g} of |alpha={alpha}>; "
            f"need truncation >= {need}", required=need)
    n = np.arange(truncation + 1)
    if r == 0.0:
        c = np.zeros(truncation + 1, dtype=np.complex128)
        c[0] = 1.0
    else:
        mag = np.exp(-0.5 * mean + n * math.log(r) - 0.5 * LOG_FACTORIAL[: truncation + 1])
        c = mag * np.exp(1j * n * math.atan2(alpha.imag, alpha.real))
    raw_c0 = complex(c[0])
    c = c / np.linalg.norm(c)
    return SingleModeState(c, family=("coherent", alpha),
                           diagnostics={"tail_weight": tail, "raw_c0": raw_c0})


def _sign(sign) -> int:
    if sign in ("+", 1, +1.0):
        return 1
    if sign in ("-", "−", -1, -1.0):
        return -1
    raise DomainError(f"sign must be '+' or '-', got {sign!r}")


def _check_xi(xi):
    xi = float(xi)
    if not (0.0 <= xi <= 1.0):
        raise DomainError(f"xi = {xi!r} outside [0, 1]")
    return xi


def make_psi_family(sign, xi) -> BipartiteState:
    """sqrt(xi)|0,1> +/- sqrt(1-xi)|1,0>."""
    s = _sign(sign)
    xi = _check_xi(xi)
    c = np.zeros((2, 2), dtype=np.complex128)
    c[0, 1] = math.sqrt(xi)
    c[1, 0] = s * math.sqrt(1.0 - xi)
    return BipartiteState(c, family=("psi", s, xi))


def make_phi_family(sign, xi) -> BipartiteState:
    """sqrt(xi)|0,0> +/- sqrt(1-xi)|1,1>."""
    s = _sign(sign)
    xi = _check_xi(xi)
    c = np.zeros((2, 2), dtype=np.complex128)
    c[0, 0] = math.sqrt(xi)
    c[1, 1] = s * math.sqrt(1.0 - xi)
    return BipartiteState(c, family=("phi", s, xi))


def make_product(a: SingleModeState, b: SingleModeState) -> BipartiteState:
    if a.truncation > MAX_PER_MODE or b.truncation > MAX_PER_MODE:
        raise BoundsError(f"factor truncations ({a.truncation}, {b.truncation}) exceed "
                          f"the bipartite cap {MAX_PER_MODE}")
    family = None
    if a.family is not None and b.family is not None:
        family = ("product", a.family, b.family)
    return BipartiteState(np.outer(a.coeffs, b.coeffs), family=family)


# -- JSON file form ---------------------------------------------------------

def _pairs(arr):
    return [[float(z.real), float(z.imag)] for z in arr]


def state_to_dict(s: State) -> dict:
    if isinstance(s, SingleModeState):
        return {"kind": "single", "coeffs": _pairs(s.coeffs)}
    return {"kind": "bipartite", "coeffs": [_pairs(row) for row in s.coeffs]}


def render(s: State) -> str:
    """Serialize to the JSON file form (floats written with full precision)."""
    return json.dumps(state_to_dict(s))


def _complex_array(data, depth):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed coefficient array ({exc})") from None
    if arr.ndim != depth + 1 or arr.shape[-1] != 2:
        raise ParseError(f"coefficients must be nested [re, im] pairs of depth {depth}")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_dict(data: Mapping) -> State:
    """Build a state from the JSON file form, renormalizing small deviations."""
    if not isinstance(data, Mapping):
        raise ParseError("state file must contain a JSON object")
    kind = data.get("kind")
    if kind not in ("single", "bipartite"):
        raise ParseError(f"'kind' must be 'single' or 'bipartite', got {kind!r}")
    if "coeffs" not in data:
        raise ParseError("missing 'coeffs'")
    c = _complex_array(data["coeffs"], 1 if kind == "single" else 2)
    if not np.all(np.isfinite(c)):
        raise DomainError("state coefficients must be finite")
    norm2 = float(np.sum(np.abs(c) ** 2))
    if abs(norm2 - 1.0) > LOAD_RENORM_TOL:
        raise NormalizationError(
            f"sum |c|^2 = {norm2!r} deviates from 1 by more than {LOAD_RENORM_TOL}")
    if norm2 != 1.0:
        c = c / math.sqrt(norm2)
    return SingleModeState(c) if kind == "single" else BipartiteState(c)


def load_state(path) -> State:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read state file {str(path)!r}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {str(path)!r}: {exc.msg}", text, exc.pos) from None
    return state_from_dict(data)


def save_state(s: State, path) -> None:
    Path(path).write_text(render(s) + "\n")


# -- state mini-language ----------------------------------------------------

_INT = re.compile(r"\d+\Z")
_FLOAT = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\Z")


def _float_at(text, start, end):
    token = text[start:end]
    if not _FLOAT.match(token):
        raise ParseError(f"expected a real number, got {token!r}", text, start)
    return float(token)


def parse_state(text: str, truncation: Optional[int] = None) -> State:
    """Parse ``fock:n``, ``coh:re,im``, ``psi:{+|-}:xi``, ``phi:{+|-}:xi`` or
    ``file:PATH``. ``truncation`` only applies to ``coh``."""
    if not isinstance(text, str):
        raise ParseError("state specification must be a string")
    colon = text.find(":")
    if colon <= 0:
        raise ParseError("expected '<kind>:<arguments>'", text, max(colon, 0))
    kind = text[:colon]
    body = colon + 1

    if kind == "fock":
        token = text[body:]
        if not _INT.match(token):
            raise ParseError("expected a non-negative integer photon number", text, body)
        return make_fock(int(token))

    if kind == "coh":
        comma = text.find(",", body)
        if comma < 0:
            raise ParseError("expected 're,im'", text, len(text))
        alpha = complex(_float_at(text, body, comma), _float_at(text, comma + 1, len(text)))
        return make_coherent(alpha, truncation)

    if kind in ("psi", "phi"):
        if body >= len(text) or text[body] not in "+-":
            raise ParseError("expected sign '+' or '-'", text, body)
        if text[body + 1:body + 2] != ":":
            raise ParseError("expected ':' after the sign", text, body + 1)
        xi = _float_at(text, body + 2, len(text))
        make = make_psi_family if kind == "psi" else make_phi_family
        return make(text[body], xi)

    if kind == "file":
        if body >= len(text):
            raise ParseError("expected a file path", text, body)
        return load_state(text[body:])

    raise ParseError(f"unknown state kind {kind!r}", text, 0)
