"""Fourier transforms of IFS measures as infinite products.

``mu_hat(xi) = prod_{k>=1} m_B((A^t)^{-k} xi)`` with
``m_B(x) = sum_b p_b e(b . x)`` and ``e(x) = exp(2 pi i x)``.

Along a ray ``xi W`` of a scalar system ``A = lam^{-1} I`` the factors only
see the projections ``c_b = b . W``.  At Pisot frequencies ``xi = alpha^k``
the product splits into a finite head ``prod_{j<k} m_W(alpha^j)`` and the
``k``-independent tail ``prod_{n>=1} m_W(lam^n)``.  When the projections are
integers the head factors depend only on ``alpha^j mod 1``, which is taken
from the exact trace recurrence rather than from floating ``alpha**j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .algebraic import NumericFailure, PisotContext, alpha_pow_mod1, geometric_theta
from .ifs import AffineIFS, standard_simplex_ifs

__all__ = [
    "ProductEvaluation",
    "RayRestriction",
    "SplitEvaluation",
    "TailFloor",
    "ErdosScan",
    "m_B",
    "mu_hat",
    "mu_hat_ray",
    "mu_hat_at_alpha_k",
    "direct_product_mp",
    "cosine_tail_floor",
    "theta_product",
    "erdos_scan",
    "experimental_scan",
    "termwise_cosine_slack",
    "pisot_matrix_scan",
]

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-12
MAX_DEPTH = 20000
# a factor this small is a rounded exact zero, e.g. (1 + e(1/2))/2
ZERO_FACTOR = 1e-13


def _e(phase):
    """``exp(2 pi i phase)`` with the phase reduced mod 1 first."""
    return np.exp(2j * np.pi * np.mod(phase, 1.0))


@dataclass(frozen=True)
class ProductEvaluation:
    """A truncated product together with a bound on the neglected part.

    ``tail_bound`` bounds ``|log(remaining product)|``, so the true value
    lies within ``|value| * (exp(tail_bound) - 1)`` of ``value``.
    """

    value: complex
    depth: int
    tail_bound: float
    factors_logged: list | None = None


def m_B(ifs: AffineIFS, x) -> complex | np.ndarray:
    """``sum_b p_b exp(2 pi i b . x)``.

    ``x`` may be a single vector or an array of shape ``(..., d)``.
    """
    x = np.asarray(x, dtype=float)
    if ifs.dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    phases = x @ ifs.B.T
    out = _e(phases) @ ifs.p
    return complex(out) if np.ndim(out) == 0 else out


def _contraction_sum(Minv_t: np.ndarray) -> float:
    """Constant ``C`` with ``sum_{j>=1} ||M^j x|| <= C ||x||`` for ``M = (A^t)^{-1}``."""
    total = 0.0
    P = np.eye(Minv_t.shape[0])
    for _ in range(1, 500):
        P = P @ Minv_t
        q = np.linalg.norm(P, 2)
        total += q
        if q < 1.0:
            return total / (1.0 - q)
    raise NumericFailure("A^{-1} has no contracting power below 500")


def mu_hat(
    ifs: AffineIFS,
    xi,
    tol: float = DEFAULT_TOL,
    depth: int | None = None,
    log_factors: bool = False,
) -> ProductEvaluation:
    """Truncated infinite product for the transform of the IFS measure.

    Factors are taken until the certified bound on the remaining
    log-product drops below ``tol``.  With ``|m_B(x) - 1| <= 2 pi
    sum_b p_b |b . x|`` and ``|log(1+u)| <= 2|u|`` for ``|u| <= 1/2`` the
    remainder after ``K`` factors is at most
    ``4 pi (sum_b p_b ||b||) C ||x_K||`` where ``x_K = (A^t)^{-K} xi`` and
    ``C`` bounds ``sum_j ||(A^t)^{-j}||``.

    Parameters
    ----------
    depth : int, optional
        Fixed truncation order instead of the adaptive rule.  The reported
        ``tail_bound`` is then ``inf`` if the bound does not apply.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = np.atleast_1d(np.asarray(xi, dtype=float)).copy()
    if x.shape != (ifs.dim,):
        raise ValueError(f"frequency must have length {ifs.dim}")
    At = ifs.A.T
    C = _contraction_sum(np.linalg.inv(At))
    bavg = float(ifs.p @ np.linalg.norm(ifs.B, axis=1))
    coef = 2.0 * TWO_PI * bavg * C

    def bound(v):
        u = coef * np.linalg.norm(v)
        return u if u <= 1.0 else math.inf

    value = 1.0 + 0.0j
    logged = [] if log_factors else None
    K = 0
    limit = MAX_DEPTH if depth is None else depth
    while K < limit and (depth is not None or bound(x) >= tol):
        x = np.linalg.solve(At, x)
        f = m_B(ifs, x)
        value *= f
        K += 1
        if logged is not None:
            logged.append(f)
    tb = bound(x)
    if depth is None and tb >= tol:
        raise NumericFailure(f"tail bound {tb} not below {tol} at depth {K}")
    return ProductEvaluation(complex(value), K, float(tb), logged)


@dataclass(frozen=True, eq=False)
class RayRestriction:
    """A scalar system restricted to the frequency line ``{xi W}``."""

    base_ifs: AffineIFS
    direction: np.ndarray

    def __post_init__(self):
        W = np.atleast_1d(np.asarray(self.direction, dtype=float))
        if W.shape != (self.base_ifs.dim,):
            raise ValueError(f"direction must have length {self.base_ifs.dim}")
        if not np.any(W):
            raise ValueError("direction must be non-zero")
        if self.base_ifs.scalar_lambda() is None:
            raise ValueError("ray restriction needs a scalar matrix A = lam^{-1} I")
        W.setflags(write=False)
        object.__setattr__(self, "direction", W)

    @property
    def lam(self) -> float:
        return float(self.base_ifs.scalar_lambda())

    @property
    def projections(self) -> np.ndarray:
        """``c_b = b . W``."""
        return self.base_ifs.B @ self.direction

    @property
    def weights(self) -> np.ndarray:
        return self.base_ifs.p

    def integer_projections(self) -> np.ndarray | None:
        """The projections as integers, or None if some are not integral."""
        c = self.projections
        r = np.round(c)
        if np.all(np.abs(c - r) <= 1e-12 * np.maximum(1.0, np.abs(c))):
            return r.astype(np.int64)
        return None

    def m(self, s) -> complex | np.ndarray:
        """``m_{B,W}(s) = sum_b p_b e(c_b s)``."""
        s = np.asarray(s, dtype=float)
        out = _e(s[..., None] * self.projections) @ self.weights
        return complex(out) if np.ndim(out) == 0 else out

    @classmethod
    def simplex(cls, d: int, lam: float, direction: Sequence[float] | None = None) -> "RayRestriction":
        """Simplex system ``{0, e_1, ..., e_d}``, along ``[1, ..., 1]`` by default."""
        W = np.ones(d) if direction is None else direction
        return cls(standard_simplex_ifs(d, lam), W)

    @classmethod
    def from_system(cls, system) -> "RayRestriction":
        if isinstance(system, RayRestriction):
            return system
        if isinstance(system, AffineIFS) and system.dim == 1:
            return cls(system, [1.0])
        raise TypeError("expected a RayRestriction or a one-dimensional AffineIFS")


def mu_hat_ray(ray: RayRestriction, xi: float, tol: float = DEFAULT_TOL, start: int = 1) -> ProductEvaluation:
    """``prod_{n>=start} m_{B,W}(lam^n xi)`` with a certified tail bound."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    lam = ray.lam
    coef = 2.0 * TWO_PI * float(ray.weights @ np.abs(ray.projections)) / (1.0 - lam)
    x = float(xi) * lam ** (start - 1)
    value = 1.0 + 0.0j
    K = start - 1
    # bound on the factors n > K is coef * |xi lam^K| * lam
    while coef * abs(x) * lam >= tol:
        K += 1
        x *= lam
        value *= ray.m(x)
        if K - start > MAX_DEPTH:
            raise NumericFailure("ray product did not reach the tolerance")
    return ProductEvaluation(complex(value), K - start + 1, float(coef * abs(x) * lam))


# --------------------------------------------------------------------------
# Pisot frequencies
# --------------------------------------------------------------------------


def _alpha_mp(ctx: PisotContext):
    coeffs = [int(c) for c in ctx.minpoly.coeffs]
    return mpmath.findroot(lambda z: mpmath.polyval(coeffs, z), mpmath.mpf(ctx.alpha))


def direct_product_mp(ray: RayRestriction, ctx: PisotContext, k: int, extra: int | None = None) -> complex:
    """Direct product ``prod_{n>=1} m_{B,W}(lam^n alpha^k)`` in multiprecision.

    This is the oracle for the split evaluator: it never uses the trace
    recurrence, only ``alpha`` recomputed from the minimal polynomial at a
    working precision large enough that ``alpha^k`` keeps ~30 digits after
    the point.
    """
    c = ray.projections
    M = float(np.max(np.abs(c)))
    lam = ctx.lam
    if extra is None:
        extra = int(math.ceil(math.log(1e-20 / (TWO_PI * max(M, 1.0))) / math.log(lam))) + 1
    dps = 30 + int(math.ceil(k * math.log10(max(ctx.alpha, 2.0))))
    with mpmath.workdps(dps):
        alpha = _alpha_mp(ctx)
        cs = [mpmath.mpf(float(v)) for v in c]
        ps = [mpmath.mpf(float(v)) for v in ray.weights]
        x = alpha**k
        prod = mpmath.mpc(1)
        for _ in range(k + extra):
            x = x / alpha
            prod *= mpmath.fsum(p * mpmath.expjpi(2 * cb * x) for p, cb in zip(ps, cs))
        return complex(prod)


@dataclass(frozen=True)
class SplitEvaluation:
    """``mu_hat(alpha^k W)`` as head times tail, with the direct residual."""

    k: int
    value: complex
    head: complex
    tail: ProductEvaluation
    direct: complex | None = None
    residual: float | None = None


def _head_factors(ray: RayRestriction, ctx: PisotContext, k: int) -> np.ndarray:
    """``m_{B,W}(alpha^j)`` for ``j < k`` from the signed offsets of ``alpha^j``."""
    c = ray.integer_projections()
    if c is None:
        raise ValueError("split evaluation needs integer projections b . W")
    offsets = np.array([alpha_pow_mod1(ctx, j).offset for j in range(k)])
    return _e(offsets[:, None] * c) @ ray.weights


def _check_lambda(ray: RayRestriction, ctx: PisotContext):
    if abs(ray.lam * ctx.alpha - 1.0) > 1e-12:
        raise ValueError(f"system lambda {ray.lam} is not 1/alpha for alpha = {ctx.alpha}")


def mu_hat_at_alpha_k(
    system,
    ctx: PisotContext,
    k: int,
    tol: float = DEFAULT_TOL,
    direct: bool = True,
    tail: ProductEvaluation | None = None,
) -> SplitEvaluation:
    """Split evaluation of the transform at ``alpha^k`` along the ray.

    ``value = prod_{j<k} m(alpha^j) * prod_{n>=1} m(lam^n)``; with
    ``direct=True`` the multiprecision direct product is evaluated too and
    the residual reported.
    """
    ray = RayRestriction.from_system(system)
    _check_lambda(ray, ctx)
    if k < 0:
        raise ValueError("k must be non-negative")
    if tail is None:
        tail = mu_hat_ray(ray, 1.0, tol)
    head = complex(np.prod(_head_factors(ray, ctx, k))) if k else 1.0 + 0.0j
    value = head * tail.value
    if not direct:
        return SplitEvaluation(k, value, head, tail)
    d = direct_product_mp(ray, ctx, k)
    return SplitEvaluation(k, value, head, tail, d, abs(d - value))


# --------------------------------------------------------------------------
# certified floors
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TailFloor:
    """Certified lower bound for ``prod_{n>=start} |m_{B,W}(lam^n)|``.

    ``value = head * exp(-taylor)`` where ``head`` is the direct product of
    the factors ``start <= n < N`` and ``taylor`` bounds the log-loss of the
    factors ``n >= N``.  ``zero_index`` is set when a head factor vanishes.
    """

    value: float
    N: int
    start: int
    head: float
    taylor: float
    zero_index: int | None = None


def cosine_tail_floor(ray: RayRestriction, start: int = 1, scale: float = 1.0) -> TailFloor:
    """Constructive lower bound for ``prod_{n>=start} |m_{B,W}(scale lam^n)|``.

    For small ``x``, ``Re m(x) >= 1 - eps(x)`` with
    ``eps(x) = 2 pi^2 x^2 sum_b p_b c_b^2``.  ``N`` is the first index with
    ``eps(scale lam^N) <= lam^2/2``; from there on ``log|m| >= -2 eps``
    and the sum of ``eps`` is geometric.  Factors before ``N`` are
    evaluated directly.
    """
    lam = ray.lam
    if start < 0:
        raise ValueError("start must be >= 0")
    s2 = float(ray.weights @ ray.projections**2)
    eps0 = 2.0 * math.pi**2 * s2 * scale**2
    cut = min(lam**2 / 2.0, 0.5)
    N = start
    while eps0 * lam ** (2 * N) > cut:
        N += 1
    head = 1.0
    for n in range(start, N):
        f = abs(ray.m(scale * lam**n))
        if f <= ZERO_FACTOR:
            return TailFloor(0.0, N, start, 0.0, math.inf, zero_index=n)
        head *= f
    taylor = 2.0 * eps0 * lam ** (2 * N) / (1.0 - lam**2)
    return TailFloor(head * math.exp(-taylor), N, start, head, taylor)


def _cosine_profile(ray: RayRestriction):
    """Weights of the digits with ``c_b != 0`` and ``c_b == 0``."""
    c = ray.integer_projections()
    if c is None:
        raise ValueError("needs integer projections")
    p = ray.weights
    return float(p[c != 0].sum()), float(p[c == 0].sum())


def theta_product(ray: RayRestriction, theta: float, n_direct: int = 200) -> float:
    """Lower bound for ``prod_{n>=0} |g(theta^n)|``.

    ``g(x) = sum_{c_b = 0} p_b + sum_{c_b != 0} p_b cos(2 pi x)`` is the
    termwise lower bound of ``Re m_{B,W}(alpha^n)`` once
    ``M dist(alpha^n, Z) < theta^n``.  The first ``n_direct`` factors are
    evaluated directly, the rest through ``cos(y) >= 1 - y^2/2``.
    """
    p_nz, p_zero = _cosine_profile(ray)
    n = np.arange(n_direct)
    g = p_zero + p_nz * np.cos(TWO_PI * theta**n)
    prod = float(np.prod(np.abs(g)))
    eps0 = 2.0 * math.pi**2 * p_nz
    rest = eps0 * theta ** (2 * n_direct) / (1.0 - theta**2)
    if eps0 * theta ** (2 * n_direct) > 0.5:
        raise NumericFailure("theta too close to 1 for the Taylor tail")
    return prod * math.exp(-2.0 * rest)


def _theta_screen(ray: RayRestriction, n_direct: int = 200):
    p_nz, p_zero = _cosine_profile(ray)

    def ok(theta: float) -> bool:
        g = p_zero + p_nz * np.cos(TWO_PI * theta ** np.arange(n_direct))
        return bool(np.min(np.abs(g)) > 1e-12)

    return ok


@dataclass(frozen=True, eq=False)
class ErdosScan:
    """``|mu_hat(alpha^k W)|`` over a range of ``k`` with floors and residuals.

    ``floor`` is the empirical minimum.  ``certified_bound`` is the
    assembled lower bound ``tail_floor * min(min_{k<=N} H_k, H_N * theta_product)``
    with ``H_k = prod_{j<k} |m(alpha^j)|``; it holds for every ``k``,
    not only the scanned ones.
    """

    ctx: PisotContext
    k_range: range
    values: list[complex]
    floor: float
    split_residuals: list[float | None]
    tail: ProductEvaluation
    theta: float | None = None
    N: int | None = None
    head_constant: float | None = None
    tail_floor: float | None = None
    theta_product: float | None = None
    certified_bound: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def abs_values(self) -> np.ndarray:
        return np.abs(np.asarray(self.values))

    @property
    def tail_bound(self) -> float:
        return self.tail.tail_bound

    def rows(self):
        """``(k, re, im, abs, split_residual, depth)`` tuples for export."""
        for k, v, r in zip(self.k_range, self.values, self.split_residuals):
            yield k, v.real, v.imag, abs(v), r, k + self.tail.depth


def erdos_scan(
    system,
    ctx: PisotContext,
    k_max: int,
    tol: float = DEFAULT_TOL,
    direct: bool = True,
    grid: int = 32,
) -> ErdosScan:
    """Scan ``|mu_hat(alpha^k W)|`` for ``k = 0..k_max`` and certify a floor.

    ``system`` is a 1D ``AffineIFS`` or a :class:`RayRestriction` with
    integer projections and ``lam = 1/alpha``.

    Raises
    ------
    NumericFailure
        If a head factor vanishes or the certified bound is not positive.
    """
    ray = RayRestriction.from_system(system)
    _check_lambda(ray, ctx)
    c = ray.integer_projections()
    if c is None:
        raise ValueError("non-integer direction: use experimental_scan (no certificate)")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    tail = mu_hat_ray(ray, 1.0, tol)
    multiplier = float(np.max(np.abs(c)))
    choice = geometric_theta(ctx, multiplier=multiplier, grid=grid, screen=_theta_screen(ray))
    n_head = max(k_max, choice.N)
    factors = _head_factors(ray, ctx, n_head)
    mods = np.abs(factors)
    if np.any(mods <= ZERO_FACTOR):
        j = int(np.argmax(mods <= ZERO_FACTOR))
        raise NumericFailure(f"zero factor at alpha^{j}")
    H = np.concatenate([[1.0], np.cumprod(mods)])
    partial = np.concatenate([[1.0 + 0.0j], np.cumprod(factors)])
    values = [complex(partial[k] * tail.value) for k in range(k_max + 1)]
    residuals: list[float | None] = []
    for k in range(k_max + 1):
        if direct:
            residuals.append(abs(direct_product_mp(ray, ctx, k) - values[k]))
        else:
            residuals.append(None)
    floor = float(np.min(np.abs(values)))
    tf = cosine_tail_floor(ray, start=1)
    if tf.zero_index is not None:
        raise NumericFailure(f"zero factor at lam^{tf.zero_index}")
    G = theta_product(ray, choice.theta)
    head_constant = float(min(H[: choice.N + 1].min(), H[choice.N] * G))
    certified = tf.value * head_constant
    if not certified > 0:
        raise NumericFailure("certified bound is not positive")
    return ErdosScan(
        ctx=ctx,
        k_range=range(k_max + 1),
        values=values,
        floor=floor,
        split_residuals=residuals,
        tail=tail,
        theta=choice.theta,
        N=choice.N,
        head_constant=head_constant,
        tail_floor=tf.value,
        theta_product=G,
        certified_bound=certified,
        meta={"projections": c.tolist(), "weights": ray.weights.tolist(), "lambda": ray.lam},
    )


def experimental_scan(ray: RayRestriction, ctx: PisotContext, k_max: int) -> ErdosScan:
    """Values along a non-integer direction by direct product only.

    No split identity holds here and no floor is certified.
    """
    _check_lambda(ray, ctx)
    tail = mu_hat_ray(ray, 1.0)
    values = [direct_product_mp(ray, ctx, k) for k in range(k_max + 1)]
    return ErdosScan(
        ctx=ctx,
        k_range=range(k_max + 1),
        values=values,
        floor=float(np.min(np.abs(values))),
        split_residuals=[None] * (k_max + 1),
        tail=tail,
        meta={"experimental": True},
    )


def termwise_cosine_slack(ray: RayRestriction, ctx: PisotContext, k: int, depth: int = 60) -> np.ndarray:
    """``|f_n|^2 - (Re f_n)^2`` for the factors ``f_n = m(lam^n alpha^k)``, ``n = 1..depth``.

    For the simplex ray ``Re f_n = 1/(d+1) + d/(d+1) cos(2 pi lam^n alpha^k)``;
    the slack is ``(Im f_n)^2`` and must never be negative beyond rounding.
    """
    _check_lambda(ray, ctx)
    c = ray.integer_projections()
    if c is None:
        raise ValueError("needs integer projections")
    phases = []
    for n in range(1, depth + 1):
        if n <= k:
            phases.append(alpha_pow_mod1(ctx, k - n).offset)
        else:
            phases.append(ray.lam ** (n - k))
    f = _e(np.asarray(phases)[:, None] * c) @ ray.weights
    re = (np.cos(TWO_PI * np.asarray(phases)[:, None] * c)) @ ray.weights
    return np.abs(f) ** 2 - re**2


def pisot_matrix_scan(
    ctx: PisotContext,
    b: float,
    c: float,
    k_max: int,
    tol: float = DEFAULT_TOL,
    direct: bool = True,
    cross_tol: float = 1e-9,
) -> ErdosScan:
    """Scan the system ``A = [[alpha, 0], [b, c]]`` with simplex digits at ``alpha^k [1, 0]``.

    ``(A^t)^{-n} alpha^k [1, 0] = [alpha^{k-n}, 0]``, so the transform reduces
    to the one-variable product with projections ``{0, 1, 0}``.  The
    general-matrix evaluator :func:`mu_hat` is run at every ``k`` as a
    cross-check and its discrepancy stored in ``meta["cross_residuals"]``.
    """
    if not c > 1.0:
        raise ValueError(f"c must exceed 1 for A to be expansive, got {c}")
    A = np.array([[ctx.alpha, 0.0], [float(b), float(c)]])
    B = np.vstack([np.zeros(2), np.eye(2)])
    matrix_ifs = AffineIFS(A, B, np.full(3, 1.0 / 3.0))
    ray = RayRestriction.simplex(2, ctx.lam, direction=[1.0, 0.0])
    scan = erdos_scan(ray, ctx, k_max, tol=tol, direct=direct)
    cross = []
    for k in scan.k_range:
        xi = (ctx.trace(k) - ctx.conjugate_power_sum(k)) if k else 1.0
        general = mu_hat(matrix_ifs, [xi, 0.0], tol=tol)
        cross.append(abs(general.value - scan.values[k]))
    if max(cross) > cross_tol:
        raise NumericFailure(f"matrix evaluator disagrees with the reduced ray ({max(cross):.3g})", cross)
    scan.meta.update({"matrix": A.tolist(), "cross_residuals": cross})
    return scan
