"""Affine iterated function systems ``tau_b(x) = A^{-1}(x + b)``.

Also the symbolic encoding map and a chaos-game sampler used to cross-check
the Fourier products by Monte Carlo.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "AffineIFS",
    "EmpiricalMeasure",
    "standard_simplex_ifs",
    "bernoulli_ifs",
    "encode",
    "EncodedPoint",
    "chaos_game",
    "translated_ifs",
]

EXPANSIVE_MARGIN = 1e-8
BURN_IN = 64


@dataclass(frozen=True, eq=False)
class AffineIFS:
    """The triple ``(A, B, p)``: expansive matrix, digits and weights."""

    A: np.ndarray
    B: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        d = A.shape[0]
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1) if d == 1 else B.reshape(1, -1)
        if B.ndim != 2 or B.shape[1] != d:
            raise ValueError(f"digits must be vectors of length {d}")
        p = np.asarray(self.p, dtype=float).ravel()
        if B.shape[0] < 2:
            raise ValueError("an IFS needs at least two maps")
        if p.shape[0] != B.shape[0]:
            raise ValueError("one weight per digit is required")
        if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        eig = np.abs(np.linalg.eigvals(A))
        if np.any(eig <= 1.0 + EXPANSIVE_MARGIN):
            raise ValueError(f"A is not expansive (eigenvalue moduli {eig})")
        for name, value in (("A", A), ("B", B), ("p", p)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[0]

    @property
    def A_inv(self) -> np.ndarray:
        return np.linalg.inv(self.A)

    def scalar_lambda(self) -> float | None:
        """``lambda`` when ``A = lambda^{-1} I``, otherwise None."""
        a = self.A[0, 0]
        if np.allclose(self.A, a * np.eye(self.dim), rtol=0, atol=1e-15 * abs(a)):
            return 1.0 / a
        return None

    def apply(self, b: int, x) -> np.ndarray:
        """``tau_b(x)`` for a point or an ``(n, d)`` array of points."""
        x = np.asarray(x, dtype=float)
        return (x + self.B[b]) @ self.A_inv.T

    def bounding_radius(self) -> float:
        """Radius of a centred ball containing the attractor."""
        r = np.linalg.norm(self.A_inv, 2)
        bmax = np.max(np.linalg.norm(self.B, axis=1))
        if r < 1:
            return float(bmax * r / (1 - r))
        # non-normal A: use a power of A^{-1} that contracts in norm
        M = self.A_inv
        acc = r
        total = r
        for k in range(2, 200):
            M = M @ self.A_inv
            q = np.linalg.norm(M, 2)
            total += q
            if q < 1:
                return float(bmax * total / (1 - q))
            acc = q
        raise ValueError(f"could not bound the attractor (last norm {acc})")

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "A": self.A.ravel().tolist(),
            "B": self.B.tolist(),
            "p": self.p.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, spec: dict) -> "AffineIFS":
        d = int(spec["dim"])
        A = np.asarray(spec["A"], dtype=float).reshape(d, d)
        B = np.asarray(spec["B"], dtype=float).reshape(-1, d)
        p = spec.get("p")
        if p is None:
            p = np.full(B.shape[0], 1.0 / B.shape[0])
        return cls(A, B, p)

    @classmethod
    def from_json(cls, text: str) -> "AffineIFS":
        return cls.from_dict(json.loads(text))


def standard_simplex_ifs(d: int, lam: float) -> AffineIFS:
    """``A = lam^{-1} I``, digits ``{0, e_1, ..., e_d}``, uniform weights."""
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    B = np.vstack([np.zeros(d), np.eye(d)])
    return AffineIFS(np.eye(d) / lam, B, np.full(d + 1, 1.0 / (d + 1)))


def bernoulli_ifs(lam: float, digits: Sequence[float] = (-1.0, 1.0), p: Sequence[float] | None = None) -> AffineIFS:
    """Two-map system on the line, ``tau_i(x) = lam (x + b_i)``.

    ``digits=(-1, 1)`` is the Bernoulli convolution whose transform is
    ``prod cos(2 pi lam^n xi)``; ``digits=(0, 1)`` is the system coded by
    ``sum omega_k lam^k``.
    """
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if p is None:
        p = (0.5, 0.5)
    return AffineIFS([[1.0 / lam]], np.asarray(digits, dtype=float).reshape(-1, 1), p)


@dataclass(frozen=True)
class EncodedPoint:
    value: np.ndarray | float
    error_bound: float


def encode(ifs: AffineIFS, word: Sequence[int], tail: int = 0) -> EncodedPoint:
    """Image of a symbol sequence under the coding map.

    The point is ``sum_k A^{-k} b_{w_k}``; the finite ``word`` is continued
    by repeating the symbol ``tail`` forever, whose contribution is
    ``A^{-L}`` applied to the fixed point of ``tau_tail``.  For digits
    ``{0, 1}`` and a zero tail this is the power series ``sum w_k lam^k``.

    ``error_bound`` bounds the distance to the image of any sequence that
    shares the prefix, i.e. ``||A^{-L}|| * diam(attractor)``.
    """
    word = [int(w) for w in word]
    if any(w < 0 or w >= ifs.m for w in word) or not 0 <= tail < ifs.m:
        raise ValueError(f"letters must lie in 0..{ifs.m - 1}")
    Ainv = ifs.A_inv
    acc = np.zeros(ifs.dim)
    P = np.eye(ifs.dim)
    for w in word:
        P = P @ Ainv
        acc = acc + P @ ifs.B[w]
    fixed = np.linalg.solve(ifs.A - np.eye(ifs.dim), ifs.B[tail])
    acc = acc + P @ fixed
    if ifs.dim == 1:
        lam = abs(Ainv[0, 0])
        b = ifs.B[:, 0]
        diam = (b.max() - b.min()) * lam / (1 - lam)
        bound = lam ** len(word) * diam
        return EncodedPoint(float(acc[0]), float(bound))
    bound = np.linalg.norm(P, 2) * 2 * ifs.bounding_radius()
    return EncodedPoint(acc, float(bound))


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Samples from an IFS measure, with the seed that produced them."""

    samples: np.ndarray
    seed: int

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def characteristic(self, xi) -> complex:
        """Empirical ``mean(exp(2 pi i xi . x))``."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        phase = self.samples @ xi
        return complex(np.mean(np.exp(2j * np.pi * np.mod(phase, 1.0))))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x_{i + 1}" for i in range(self.dim)])
        for row in self.samples:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def chaos_game(ifs: AffineIFS, n: int, seed: int = 0) -> EmpiricalMeasure:
    """Draw ``n`` points of the invariant measure.

    Every sample is an independent chain started at the origin and run for
    ``BURN_IN`` random steps, so the bias is at most
    ``||A^{-1}||^64`` times the attractor diameter.  A Philox generator keeps
    runs reproducible from ``seed`` alone.
    """
    if n < 1:
        raise ValueError("sample count must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    x = np.zeros((n, ifs.dim))
    Ainv_t = ifs.A_inv.T
    for _ in range(BURN_IN):
        idx = rng.choice(ifs.m, size=n, p=ifs.p)
        x = (x + ifs.B[idx]) @ Ainv_t
    return EmpiricalMeasure(x, seed)


def translated_ifs(ifs: AffineIFS, t) -> AffineIFS:
    """System whose invariant measure is the translate ``T_t mu``.

    Digits become ``b + (A - I) t``, so that ``tau'_b(x + t) = tau_b(x) + t``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (ifs.dim,):
        raise ValueError(f"translation must have length {ifs.dim}")
    return AffineIFS(ifs.A, ifs.B + (ifs.A - np.eye(ifs.dim)) @ t, ifs.p)
