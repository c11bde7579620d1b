"""Transforms of measures induced on the line by determinantal measures.

A sequence ``omega in {0,1}^N`` is sent to ``sum_k omega_k lam^k`` and
``mu_T`` is pushed forward.  Its transform is the limit of

    det(I_n + D_n(lam t) T_{F_n}),   D_n = diag(e(lam^k t) - 1, k = 1..n),

which for a diagonal kernel ``p I`` is the Bernoulli product
``prod_k (p e(lam^k t) + 1 - p)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._linalg import det
from .detmeasure import Kernel, all_words, w_matrices

__all__ = [
    "InducedSystem",
    "DetTransformResult",
    "TraceAsymptotic",
    "ToeplitzApprox",
    "d_weights",
    "det_order",
    "nu_hat_det",
    "nu_hat_bruteforce",
    "nu_hat_trace_asymptotic",
    "toeplitz_an",
    "toeplitz_minor",
    "toeplitz_product_approx",
    "toeplitz_exact_pn",
    "toeplitz_minor_expansion",
    "det_lambda",
    "det_lambda_order",
    "positive_definite_check",
    "unitary_invariance_check",
]

N_MAX = 64
DEFAULT_TOL = 1e-10
STABLE_STEPS = 3
BRUTE_MAX = 14


@dataclass(frozen=True, eq=False)
class InducedSystem:
    lam: float
    kernel: Kernel

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise ValueError(f"lambda must lie in (0, 1), got {self.lam}")


@dataclass(frozen=True)
class DetTransformResult:
    """Value of a truncation ladder and how it got there."""

    value: complex
    n_used: int
    trace: list[tuple[int, complex]] = field(repr=False)
    stagnation: float
    converged: bool


def d_weights(lam: float, t: float, n: int) -> np.ndarray:
    """``e(lam^k t) - 1`` for ``k = 1..n``, written as ``2i sin(pi x) e^{i pi x}``."""
    x = np.mod(lam ** np.arange(1, n + 1) * t, 1.0)
    return 2j * np.sin(np.pi * x) * np.exp(1j * np.pi * x)


def det_order(kernel: Kernel, lam: float, t: float, n: int) -> complex:
    """``det(I_n + D_n(lam t) T_{F_n})``."""
    D = d_weights(lam, t, n)
    return complex(det(np.eye(n) + D[:, None] * kernel.leading(n)))


def _ladder(step, tol: float, n_max: int) -> DetTransformResult:
    if not tol > 0:
        raise ValueError("tol must be positive")
    trace = []
    prev = None
    quiet = 0
    delta = math.inf
    for n in range(2, n_max + 1):
        v = step(n)
        trace.append((n, v))
        if prev is not None:
            delta = abs(v - prev)
            quiet = quiet + 1 if delta < tol else 0
            if quiet >= STABLE_STEPS:
                return DetTransformResult(v, n, trace, delta, True)
        prev = v
    return DetTransformResult(trace[-1][1], n_max, trace, delta, False)


def nu_hat_det(sys: InducedSystem, t: float, tol: float = DEFAULT_TOL, n_max: int = N_MAX) -> DetTransformResult:
    """Transform of the induced measure as a limit of finite determinants.

    Orders ``n = 2, 3, ...`` are evaluated until three consecutive changes
    fall below ``tol``; otherwise the result has ``converged=False``.
    """
    return _ladder(lambda n: det_order(sys.kernel, sys.lam, t, n), tol, n_max)


@lru_cache(maxsize=64)
def _cylinder_table(kernel: Kernel, n: int) -> tuple[np.ndarray, np.ndarray]:
    words = all_words(n)
    return words, det(w_matrices(kernel, list(range(1, n + 1)), words))


def nu_hat_bruteforce(sys: InducedSystem, t, n: int) -> complex | np.ndarray:
    """``sum_omega e(t sum_k omega_k lam^k) det W(omega)`` over ``{0,1}^n``.

    The ``2^n`` determinants do not depend on ``t`` and are cached per
    kernel and order; ``t`` may be an array.
    """
    if not 1 <= n <= BRUTE_MAX:
        raise ValueError(f"enumeration order must lie in 1..{BRUTE_MAX}")
    words, probs = _cylinder_table(sys.kernel, n)
    points = words @ (sys.lam ** np.arange(1, n + 1))
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    phases = np.mod(np.outer(t_arr, points), 1.0)
    out = np.exp(2j * np.pi * phases) @ probs
    return complex(out[0]) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class TraceAsymptotic:
    value: complex
    det_value: complex
    gap: float


def nu_hat_trace_asymptotic(sys: InducedSystem, t: float, n: int) -> TraceAsymptotic:
    """``exp(sum_k (e(lam^k t) - 1) T_kk)``, the first-order surrogate of the determinant."""
    D = d_weights(sys.lam, t, n)
    diag = np.diag(sys.kernel.leading(n))
    value = complex(np.exp(np.sum(D * diag)))
    d = det_order(sys.kernel, sys.lam, t, n)
    return TraceAsymptotic(value, d, abs(value - d))


# --------------------------------------------------------------------------
# Toeplitz kernels p a^|i-j|
# --------------------------------------------------------------------------


def toeplitz_an(a: float, n: int) -> np.ndarray:
    """``A_n = (a^|i-j|)``, whose determinant is ``(1 - a^2)^(n-1)``."""
    i = np.arange(n)
    return a ** np.abs(i[:, None] - i[None, :]).astype(float)


def toeplitz_minor(a: float, n: int, k: int) -> float:
    """``T_n(k^)``: determinant of ``A_n`` with row and column ``k`` removed (1-based)."""
    if not 1 <= k <= n:
        raise ValueError("k must lie in 1..n")
    keep = [i for i in range(n) if i != k - 1]
    A = toeplitz_an(a, n)[np.ix_(keep, keep)]
    return float(det(A)) if keep else 1.0


@dataclass(frozen=True)
class ToeplitzApprox:
    product: complex
    det_value: complex
    dev: float


def toeplitz_product_approx(p: float, a: float, lam: float, t: float, n: int) -> ToeplitzApprox:
    """Bernoulli product ``prod_k (p e(lam^k t) + 1 - p)`` against ``det_n`` for ``T = p a^|i-j|``."""
    K = Kernel.toeplitz_general(p, a, check_order=max(n, 2))
    D = d_weights(lam, t, n)
    product = complex(np.prod(1.0 + p * D))
    d = det_order(K, lam, t, n)
    return ToeplitzApprox(product, d, abs(d - product))


def toeplitz_exact_pn(p: float, a: float, lam: float, t: float, n: int) -> complex:
    """The closed form ``P_n`` built from the minors of ``A_n``.

    ``P_n = 1 + p^(n-1) sum_k T_n(k^) prod_{j != k} D_j + p^n (1-a^2)^(n-1) prod_j D_j``
    with ``D_j = e(lam^j t) - 1``.  Only the principal minors of sizes
    ``n-1`` and ``n`` appear, so this is not ``det(I + D T_{F_n})`` for
    ``n >= 3``; compare :func:`toeplitz_minor_expansion`.
    """
    if not 1 <= n <= 16:
        raise ValueError("n must lie in 1..16")
    D = d_weights(lam, t, n)
    total = 0j
    for k in range(1, n + 1):
        others = np.prod(np.delete(D, k - 1))
        total += toeplitz_minor(a, n, k) * others
    return complex(1.0 + p ** (n - 1) * total + p**n * (1 - a * a) ** (n - 1) * np.prod(D))


def toeplitz_minor_expansion(p: float, a: float, lam: float, t: float, n: int) -> complex:
    """``sum_S p^|S| det(A_S) prod_{k in S} D_k`` over all ``S`` in ``{1..n}``.

    This is the full principal-minor expansion of ``det(I + D T_{F_n})``.
    """
    if not 1 <= n <= 16:
        raise ValueError("n must lie in 1..16")
    D = d_weights(lam, t, n)
    A = toeplitz_an(a, n)
    total = 1.0 + 0j
    for r in range(1, n + 1):
        subsets = np.array(list(itertools.combinations(range(n), r)))
        minors = det(A[subsets[:, :, None], subsets[:, None, :]])
        total += p**r * np.sum(minors * np.prod(D[subsets], axis=1))
    return complex(total)


# --------------------------------------------------------------------------
# det_lambda
# --------------------------------------------------------------------------


def det_lambda_order(kernel: Kernel, lam: float, t: float, n: int) -> complex:
    """``det((D_n + I_n) T_{F_n} + (I_n - T_{F_n}))`` at one truncation order."""
    T = kernel.leading(n)
    D = d_weights(lam, t, n)
    I = np.eye(n)
    return complex(det((D[:, None] * I + I) @ T + (I - T)))


def det_lambda(kernel: Kernel, lam: float, t: float, tol: float = DEFAULT_TOL, n_max: int = N_MAX) -> DetTransformResult:
    """Truncation limit of :func:`det_lambda_order`; ``t = 0`` gives 1 by definition."""
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if t == 0:
        return DetTransformResult(1.0 + 0j, 2, [(2, 1.0 + 0j)], 0.0, True)
    return _ladder(lambda n: det_lambda_order(kernel, lam, t, n), tol, n_max)


def positive_definite_check(kernel: Kernel, lam: float, grid: Sequence[float], tol: float = DEFAULT_TOL) -> float:
    """Smallest eigenvalue of the Gram matrix ``[F(t_i - t_j)]`` with ``F = det_lambda``."""
    grid = np.asarray(grid, dtype=float)
    m = grid.size
    if not 1 <= m <= 64:
        raise ValueError("grid must have 1..64 points")
    G = np.empty((m, m), dtype=complex)
    cache: dict[float, complex] = {}
    for i in range(m):
        for j in range(i, m):
            s = float(grid[i] - grid[j])
            if s not in cache:
                cache[s] = det_lambda(kernel, lam, s, tol).value
            G[i, j] = cache[s]
            G[j, i] = np.conj(cache[s])
    return float(np.linalg.eigvalsh(G)[0])


def unitary_invariance_check(kernel: Kernel, perm: Sequence[int], lam: float, t: float, N: int) -> float:
    """``|det_N(T) - det_N(U T U*)|`` at the truncation order ``N``."""
    if N < len(perm):
        raise ValueError("order must cover the permuted indices")
    return abs(det_lambda_order(kernel, lam, t, N) - det_lambda_order(kernel.permuted(perm), lam, t, N))
