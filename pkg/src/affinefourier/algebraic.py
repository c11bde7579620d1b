"""Algebraic integers: root finding, Pisot certification, power-sum traces.

The fractional part of ``alpha**k`` for a Pisot number is never taken from
``alpha**k`` in floating point.  It is read off from the conjugates instead:
``alpha**k - s_k = -sum(alpha_i**k for i >= 2)`` where ``s_k`` is the exact
integer trace.  That quantity is small and is computed to full relative
precision, which is what makes the Fourier scans at large ``k`` possible.
"""
from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "IntPolynomial",
    "PisotContext",
    "PisotRejection",
    "NumericFailure",
    "Mod1Value",
    "ThetaChoice",
    "roots",
    "certify_pisot",
    "trace",
    "alpha_pow_mod1",
    "theta_index",
    "geometric_theta",
    "newton_power_sums",
]

PISOT_MARGIN = 1e-8


class NumericFailure(RuntimeError):
    """A numerical routine did not reach its accuracy contract."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class PisotRejection(ValueError):
    """Raised by :func:`certify_pisot` when no certificate can be issued.

    ``indeterminate`` is True when a conjugate sits inside the margin band
    around the unit circle, so the verdict cannot be decided numerically.
    """

    def __init__(self, reason: str, indeterminate: bool = False):
        super().__init__(reason)
        self.reason = reason
        self.indeterminate = indeterminate


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------

_TERM = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*(x(?:\s*\^\s*(\d+))?)?")


@dataclass(frozen=True)
class IntPolynomial:
    """Monic polynomial with integer coefficients, highest degree first."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) < 2:
            raise ValueError("polynomial must have degree >= 1")
        if coeffs[0] != 1:
            raise ValueError(f"polynomial must be monic, leading coefficient is {coeffs[0]}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse ``"x^3 - x - 1"`` or a descending list ``"[1, 0, -1, -1]"``."""
        text = text.strip()
        if text.startswith("["):
            try:
                values = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed coefficient list: {text!r}") from exc
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
                raise ValueError(f"coefficients must be integers: {text!r}")
            return cls(tuple(values))
        return cls._parse_expression(text)

    @classmethod
    def _parse_expression(cls, text: str) -> "IntPolynomial":
        compact = text.replace(" ", "").replace("**", "^")
        if not compact or not re.fullmatch(r"[0-9x^+*\-]+", compact):
            raise ValueError(f"malformed polynomial: {text!r}")
        terms: dict[int, int] = {}
        pos = 0
        while pos < len(compact):
            m = _TERM.match(compact, pos)
            if m is None or m.end() == pos:
                raise ValueError(f"malformed polynomial: {text!r}")
            sign, digits, var, power = m.groups()
            if not digits and not var:
                raise ValueError(f"malformed polynomial: {text!r}")
            if pos > 0 and not sign:
                raise ValueError(f"malformed polynomial: {text!r}")
            coef = int(digits) if digits else 1
            if sign == "-":
                coef = -coef
            deg = 0 if not var else int(power) if power else 1
            terms[deg] = terms.get(deg, 0) + coef
            pos = m.end()
        degree = max(terms)
        return cls(tuple(terms.get(d, 0) for d in range(degree, -1, -1)))

    def __str__(self) -> str:
        parts = []
        n = self.degree
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            d = n - i
            mono = "" if d == 0 else "x" if d == 1 else f"x^{d}"
            mag = abs(c)
            body = mono if mag == 1 and mono else f"{mag}{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __call__(self, z):
        return np.polyval(np.asarray(self.coeffs, dtype=float), z)

    def derivative_at(self, z):
        n = self.degree
        dcoeffs = [c * (n - i) for i, c in enumerate(self.coeffs[:-1])]
        return np.polyval(np.asarray(dcoeffs, dtype=float), z)


def newton_power_sums(coeffs: Sequence[int], k_max: int) -> list[int]:
    """Power sums ``s_0..s_kmax`` of the roots of a monic integer polynomial.

    Seeds come from Newton's identities; beyond the degree the sums obey
    the linear recurrence given by the coefficients.
    """
    a = list(coeffs[1:])
    n = len(a)
    s = [n]
    for k in range(1, k_max + 1):
        acc = 0
        for i in range(1, min(k - 1, n) + 1):
            acc += a[i - 1] * s[k - i]
        if k <= n:
            acc += k * a[k - 1]
        s.append(-acc)
    return s


# --------------------------------------------------------------------------
# roots
# --------------------------------------------------------------------------


def _companion(coeffs: Sequence[int]) -> np.ndarray:
    n = len(coeffs) - 1
    C = np.zeros((n, n))
    C[0, :] = -np.asarray(coeffs[1:], dtype=float)
    if n > 1:
        C[1:, :-1] = np.eye(n - 1)
    return C


def roots(p: IntPolynomial, max_iter: int = 50) -> np.ndarray:
    """All roots of ``p``, sorted by decreasing modulus.

    Companion-matrix eigenvalues are polished by simultaneous Aberth
    iterations.  Roots whose imaginary part is at rounding level are returned
    with zero imaginary part.

    Raises
    ------
    NumericFailure
        If some residual ``|p(z)|`` exceeds ``1e-10 * (1 + max|coeff|)``.
    """
    if p.degree == 1:
        return np.array([complex(-p.coeffs[1])])
    z = np.linalg.eigvals(_companion(p.coeffs)).astype(complex)
    n = len(z)
    for _ in range(max_iter):
        pz = p(z)
        dpz = p.derivative_at(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            step = w / (1.0 - w * inv.sum(axis=1))
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(z))):
            break
    scale = np.maximum(1.0, np.abs(z))
    z = np.where(np.abs(z.imag) <= 1e-13 * scale, z.real + 0j, z)
    residuals = np.abs(p(z))
    limit = 1e-10 * (1 + max(abs(c) for c in p.coeffs))
    if not np.all(residuals <= limit * np.maximum(1.0, np.abs(z)) ** n):
        raise NumericFailure(f"root refinement failed for {p}", residuals=residuals)
    order = np.lexsort((-z.imag, -np.abs(z)))
    return z[order]


# --------------------------------------------------------------------------
# Pisot context
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Mod1Value:
    """Distance of ``alpha**k`` to the nearest integer and the signed offset."""

    value: float
    k: int
    offset: float


@dataclass
class PisotContext:
    """A certified Pisot number with its conjugates and exact traces."""

    minpoly: IntPolynomial
    alpha: float
    conjugates: tuple[complex, ...]
    conjugate_max: float
    _traces: list[int] = field(default_factory=list, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    @property
    def lam(self) -> float:
        return 1.0 / self.alpha

    def trace(self, k: int) -> int:
        if k < 0:
            raise ValueError("k must be non-negative")
        traces = self._traces
        if k < len(traces):
            return traces[k]
        with self._lock:
            if k >= len(self._traces):
                # compute-then-publish: readers only ever see complete lists
                self._traces = newton_power_sums(self.minpoly.coeffs, max(k, 2 * len(self._traces)))
            return self._traces[k]

    def conjugate_power_sum(self, k: int) -> float:
        """``sum(alpha_i**k for i >= 2)``, real by conjugate symmetry."""
        if not self.conjugates:
            return 0.0
        c = np.asarray(self.conjugates)
        return float(np.sum(c**k).real)

    def to_json(self, k_max: int = 0) -> str:
        return json.dumps(
            {
                "minpoly": str(self.minpoly),
                "coeffs": list(self.minpoly.coeffs),
                "alpha": self.alpha,
                "conjugates": [[z.real, z.imag] for z in self.conjugates],
                "conjugate_max": self.conjugate_max,
                "traces": [str(self.trace(k)) for k in range(k_max + 1)],
            }
        )


def _classify(p: IntPolynomial, rts: Sequence[complex], margin: float) -> PisotContext:
    rts = list(rts)
    mods = [abs(z) for z in rts]
    i_dom = max(range(len(rts)), key=lambda i: (mods[i], -abs(rts[i].imag)))
    alpha = rts[i_dom]
    if abs(alpha.imag) > 1e-12 * max(1.0, mods[i_dom]):
        raise PisotRejection("dominant root is not real")
    if alpha.real <= 1.0 + margin:
        if alpha.real >= 1.0 - margin and alpha.real > 0:
            raise PisotRejection("dominant root within margin of 1", indeterminate=True)
        raise PisotRejection("not expansive: dominant root is not > 1")
    others = [z for i, z in enumerate(rts) if i != i_dom]
    cmax = max((abs(z) for z in others), default=0.0)
    if cmax > 1.0 + margin:
        raise PisotRejection(f"conjugate outside the unit circle (modulus {cmax:.12g})")
    if cmax >= 1.0 - margin:
        raise PisotRejection(
            f"conjugate within margin of the unit circle (modulus {cmax:.12g})", indeterminate=True
        )
    others.sort(key=lambda z: (-abs(z), -z.imag))
    return PisotContext(p, float(alpha.real), tuple(complex(z) for z in others), float(cmax))


def certify_pisot(p: IntPolynomial, margin: float = PISOT_MARGIN) -> PisotContext:
    """Certify that the dominant root of ``p`` is a Pisot number.

    Irreducibility is the caller's responsibility.

    Raises
    ------
    PisotRejection
        With ``indeterminate=True`` when a conjugate modulus falls inside
        ``[1 - margin, 1 + margin]``.
    """
    return _classify(p, roots(p), margin)


def trace(ctx: PisotContext, k: int) -> int:
    """Exact integer ``sum_i alpha_i**k`` over all conjugates."""
    return ctx.trace(k)


def alpha_pow_mod1(ctx: PisotContext, k: int) -> Mod1Value:
    """Distance from ``alpha**k`` to the integers, via the conjugate sum."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return Mod1Value(0.0, 0, 0.0)
    offset = -ctx.conjugate_power_sum(k)
    if abs(offset) > 0.5:
        offset -= round(offset)
    return Mod1Value(abs(offset), k, offset)


# --------------------------------------------------------------------------
# geometric bound
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaChoice:
    theta: float
    N: int
    multiplier: float = 1.0


def theta_index(ctx: PisotContext, theta: float, multiplier: float = 1.0) -> int:
    """Smallest ``N`` with ``M (n-1) cmax**N < theta**N < 1/4``.

    Once it holds at ``N`` with ``cmax < theta`` it holds for every larger
    index, since both sides decay and the left decays faster.
    """
    cmax = ctx.conjugate_max
    if not (cmax < theta < 1.0):
        raise ValueError(f"theta must lie in (conjugate_max, 1) = ({cmax}, 1), got {theta}")
    coef = multiplier * max(ctx.degree - 1, 0)
    N = 1
    while not (coef * cmax**N < theta**N < 0.25):
        N += 1
    return N


def geometric_theta(
    ctx: PisotContext,
    multiplier: float = 1.0,
    grid: int = 32,
    screen: Callable[[float], bool] | None = None,
    verify_extra: int = 20,
) -> ThetaChoice:
    """Deterministic ``theta`` for the mod-1 decay bound.

    Scans ``cmax + j (1 - cmax)/grid`` upward and returns the first value
    that passes ``screen`` (if given) and whose bound is confirmed against
    :func:`alpha_pow_mod1` for ``k <= N + verify_extra``.  ``multiplier``
    bounds the largest integer the powers get multiplied by, so the bound
    covers ``dist(c alpha**k, Z)`` for ``|c| <= multiplier``.
    """
    cmax = ctx.conjugate_max
    for j in range(1, grid):
        theta = cmax + j * (1.0 - cmax) / grid
        if screen is not None and not screen(theta):
            continue
        N = theta_index(ctx, theta, multiplier)
        ok = all(
            multiplier * alpha_pow_mod1(ctx, k).value < theta**k
            for k in range(N, N + verify_extra + 1)
        )
        if ok:
            return ThetaChoice(theta, N, multiplier)
    raise NumericFailure("no admissible theta on the grid")
