"""Fourier lower bounds for the distance between a measure and its translates.

The transform of ``mu - T_t mu`` at ``xi`` is ``(1 - e(t xi)) mu_hat(xi)``
and a transform is bounded by the total variation, so
``||mu - T_t mu|| >= |1 - e(t xi)| |mu_hat(xi)|`` for every ``xi``.  With
``t_n = lam^n / 2`` and ``xi = alpha^n`` the first factor is exactly 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebraic import PisotContext
from .fourier import RayRestriction, erdos_scan, mu_hat
from .ifs import AffineIFS

__all__ = [
    "TvLowerBound",
    "SeparationScan",
    "tv_lower_bound",
    "separation_scan",
    "chaos_classify",
    "alpha_gradation",
    "CHAOTIC",
    "NO_EVIDENCE",
]

CHAOTIC = "chaotic-certified"
NO_EVIDENCE = "no-evidence"


@dataclass(frozen=True)
class TvLowerBound:
    t: float
    witness_xi: float | None
    bound: float


def tv_lower_bound(ifs: AffineIFS, t, xi_grid: Sequence, tol: float = 1e-12) -> TvLowerBound:
    """``max_xi |1 - e(t . xi)| |mu_hat(xi)|`` over a finite grid of frequencies."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    best, witness = 0.0, None
    for xi in xi_grid:
        x = np.atleast_1d(np.asarray(xi, dtype=float))
        if not np.any(x):
            raise ValueError("frequencies must be non-zero")
        shift = abs(1.0 - np.exp(2j * np.pi * np.mod(float(t @ x), 1.0)))
        if shift == 0.0:
            continue
        b = shift * abs(mu_hat(ifs, x, tol).value)
        if b > best or witness is None:
            best, witness = b, xi
    t_out = float(t[0]) if t.size == 1 else t
    return TvLowerBound(t_out, witness, float(best))


@dataclass(frozen=True, eq=False)
class SeparationScan:
    """Bounds ``||mu - T_{t_n} mu|| >= 2 |mu_hat(alpha^n)|`` for ``t_n = lam^n/2``."""

    n: np.ndarray
    t: np.ndarray
    witness: np.ndarray
    bounds: np.ndarray
    erdos_floor: float
    certified_bound: float

    @property
    def floor(self) -> float:
        return float(self.bounds.min())


def separation_scan(system, ctx: PisotContext, n_max: int, direct: bool = False) -> SeparationScan:
    """Translation bounds at ``t_n = lam^n/2`` with witnesses ``xi = alpha^n``.

    The values come from the split evaluator, so each bound is exactly twice
    the corresponding Erdős-scan value.  ``certified_bound`` is twice the
    scan's certified floor and holds for every ``n``.
    """
    ray = RayRestriction.from_system(system)
    scan = erdos_scan(ray, ctx, n_max, direct=direct)
    n = np.arange(n_max + 1)
    witness = np.array([float(ctx.trace(k)) - ctx.conjugate_power_sum(k) if k else 1.0 for k in n])
    bounds = 2.0 * scan.abs_values
    return SeparationScan(n, ctx.lam**n / 2.0, witness, bounds, scan.floor, 2.0 * scan.certified_bound)


def chaos_classify(ifs: AffineIFS, ctx: PisotContext | None, eps: float | None = None, n_max: int = 20) -> str:
    """``chaotic-certified`` if the translates by ``lam^n/2`` stay ``eps`` apart.

    Without a Pisot certificate there is no lower bound to offer and the
    answer is ``no-evidence``; the method never concludes the opposite.
    With ``eps=None`` the certified floor itself is used.
    """
    if ifs.dim != 1 or ifs.m != 2:
        raise ValueError("classification is for two-map systems on the line")
    if ctx is None:
        return NO_EVIDENCE
    if abs(ifs.A[0, 0] - ctx.alpha) > 1e-12 * ctx.alpha:
        return NO_EVIDENCE
    scan = separation_scan(ifs, ctx, n_max)
    level = scan.certified_bound
    if eps is None:
        eps = level
    return CHAOTIC if level > 0 and level >= eps else NO_EVIDENCE


def alpha_gradation(system, ctx: PisotContext, alpha_exponent: float, k_max: int, n_max: int) -> float:
    """``inf_{2<=k<=k_max, n<=n_max} k^a 2 sin(pi/k) |mu_hat(alpha^n)|``.

    Each term bounds ``k^a ||mu - T_{lam^n/k} mu||`` from below, using the
    witness ``xi = alpha^n`` where ``|1 - e(1/k)| = 2 sin(pi/k)``.
    """
    if alpha_exponent < 0:
        raise ValueError("exponent must be >= 0")
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    scan = erdos_scan(RayRestriction.from_system(system), ctx, n_max, direct=False)
    k = np.arange(2, k_max + 1, dtype=float)
    weights = k**alpha_exponent * 2.0 * np.sin(math.pi / k)
    return float(weights.min() * scan.abs_values.min())
