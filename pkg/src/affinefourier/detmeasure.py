"""Determinantal measures on ``{0,1}^N`` given by a kernel contraction ``T``.

The cylinder ``G(xi)`` fixing bits ``xi`` on a finite index set ``F`` has
probability ``det W(xi)`` where

    W(xi)_{ij} = xi_i delta_ij + (-1)^{xi_i} (delta_ij - T_ij),    i, j in F.

Indices are 1-based throughout, as coordinates of the sequence space.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._linalg import det

__all__ = [
    "Kernel",
    "KernelInvalid",
    "CylinderSpec",
    "ShiftRecursion",
    "w_matrix",
    "w_matrices",
    "cylinder_prob",
    "cylinder_probs",
    "consistency_check",
    "shift_recursion_check",
    "sample_configuration",
    "all_words",
]

PROB_BAND = 1e-12
SPECTRAL_SLACK = 1e-10
CHECK_ORDER = 24
MAX_SAMPLE_ORDER = 24


class KernelInvalid(ValueError):
    """The kernel is not a contraction with spectrum in ``[0, 1]``."""


@dataclass(frozen=True, eq=False)
class Kernel:
    """Infinite symmetric kernel ``T_{ij}``, ``i, j >= 1``.

    Variants
    --------
    ``diagonal``
        ``T = p I``.
    ``toeplitz``
        ``T_ij = (1-a)/(1+a) a^|i-j|``; the scaling puts the spectrum in
        ``[((1-a)/(1+a))^2, 1]``.
    ``toeplitz_general``
        ``T_ij = p a^|i-j|``; a contraction only for ``p <= (1-a)/(1+a)``.
    ``dense``
        A finite symmetric matrix, extended by zeros beyond its size.

    ``perm`` relabels the first ``len(perm)`` coordinates and ``shift``
    drops the first ``shift`` coordinates, so that
    ``entry(i, j) = base(s(i), s(j))`` with ``s(i) = perm(i) + shift``.
    """

    variant: str
    p: float | None = None
    a: float | None = None
    matrix: np.ndarray | None = None
    perm: tuple[int, ...] = ()
    shift: int = 0
    check_order: int = CHECK_ORDER

    def __post_init__(self):
        v = self.variant
        if v == "diagonal":
            if self.p is None or not 0 <= self.p <= 1:
                raise KernelInvalid(f"diagonal kernel needs p in [0, 1], got {self.p}")
        elif v == "toeplitz":
            if self.a is None or not 0 <= self.a < 1:
                raise KernelInvalid(f"toeplitz kernel needs a in [0, 1), got {self.a}")
        elif v == "toeplitz_general":
            if self.p is None or self.a is None or not (0 <= self.p <= 1 and 0 <= self.a < 1):
                raise KernelInvalid("toeplitz_general needs p in [0, 1] and a in [0, 1)")
        elif v == "dense":
            M = np.array(self.matrix, dtype=float)
            if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
                raise KernelInvalid("dense kernel needs a non-empty square matrix")
            if not np.allclose(M, M.T, rtol=0, atol=1e-14):
                raise KernelInvalid("dense kernel must be symmetric")
            M = (M + M.T) / 2
            M.setflags(write=False)
            object.__setattr__(self, "matrix", M)
        else:
            raise KernelInvalid(f"unknown kernel variant {v!r}")
        perm = tuple(int(i) for i in self.perm)
        if perm and sorted(perm) != list(range(1, len(perm) + 1)):
            raise KernelInvalid("perm must be a permutation of 1..m")
        object.__setattr__(self, "perm", perm)
        if self.shift < 0:
            raise KernelInvalid("shift must be >= 0")
        if self.check_order:
            self.spectral_check(self.check_order)

    # constructors ---------------------------------------------------------

    @classmethod
    def diagonal(cls, p: float) -> "Kernel":
        return cls("diagonal", p=float(p))

    @classmethod
    def toeplitz(cls, a: float) -> "Kernel":
        return cls("toeplitz", a=float(a))

    @classmethod
    def toeplitz_general(cls, p: float, a: float, check_order: int = CHECK_ORDER) -> "Kernel":
        return cls("toeplitz_general", p=float(p), a=float(a), check_order=check_order)

    @classmethod
    def dense(cls, matrix) -> "Kernel":
        return cls("dense", matrix=np.asarray(matrix, dtype=float))

    @classmethod
    def random_dense(cls, n: int, rng: np.random.Generator) -> "Kernel":
        """``Q diag(u) Q^t`` with Haar-ish ``Q`` and ``u`` uniform on ``[0, 1]``."""
        Q, R = np.linalg.qr(rng.standard_normal((n, n)))
        Q = Q * np.sign(np.diag(R))
        M = (Q * rng.uniform(0.0, 1.0, n)) @ Q.T
        return cls.dense((M + M.T) / 2)

    def permuted(self, perm: Sequence[int]) -> "Kernel":
        """Kernel ``U T U*`` for the permutation unitary ``U e_i = e_{perm^{-1}(i)}``."""
        if self.perm:
            raise KernelInvalid("kernel is already permuted")
        return Kernel(self.variant, self.p, self.a, self.matrix, tuple(perm), self.shift, 0)

    def shifted(self, k: int = 1) -> "Kernel":
        """Kernel ``T'_{ij} = T_{i+k, j+k}``."""
        if self.perm:
            raise KernelInvalid("shift a permuted kernel explicitly")
        return Kernel(self.variant, self.p, self.a, self.matrix, (), self.shift + k, 0)

    # access ---------------------------------------------------------------

    def _map(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if np.any(idx < 1):
            raise ValueError("kernel indices start at 1")
        if self.perm:
            perm = np.asarray(self.perm)
            inside = idx <= len(perm)
            idx = np.where(inside, perm[np.minimum(idx, len(perm)) - 1], idx)
        return idx + self.shift

    def _base(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        v = self.variant
        if v == "diagonal":
            return np.where(i == j, self.p, 0.0)
        if v == "toeplitz":
            a = self.a
            return (1 - a) / (1 + a) * a ** np.abs(i - j).astype(float)
        if v == "toeplitz_general":
            return self.p * self.a ** np.abs(i - j).astype(float)
        M = self.matrix
        n = M.shape[0]
        inside = (i <= n) & (j <= n)
        return np.where(inside, M[np.minimum(i, n) - 1, np.minimum(j, n) - 1], 0.0)

    def entry(self, i: int, j: int) -> float:
        r = self._map(np.array([i, j]))
        return float(self._base(r[0], r[1]))

    def block(self, F: Sequence[int]) -> np.ndarray:
        """Principal submatrix ``T_F`` on the (1-based) indices ``F``."""
        r = self._map(np.asarray(F, dtype=np.int64))
        return self._base(r[:, None], r[None, :]).astype(float)

    def leading(self, n: int) -> np.ndarray:
        """``T_{F_n}`` with ``F_n = {1, ..., n}``."""
        return self.block(np.arange(1, n + 1))

    def spectral_check(self, order: int) -> np.ndarray:
        """Eigenvalues of the leading block; raises if outside ``[0, 1]``."""
        if self.variant == "dense":
            order = max(order, self.matrix.shape[0])
        ev = np.linalg.eigvalsh(self.leading(order))
        if ev[0] < -SPECTRAL_SLACK or ev[-1] > 1 + SPECTRAL_SLACK:
            raise KernelInvalid(
                f"{self.variant} kernel (p={self.p}, a={self.a}) has eigenvalues "
                f"[{ev[0]:.6g}, {ev[-1]:.6g}] outside [0, 1] at order n={order}"
            )
        return ev

    # serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        out: dict = {"variant": self.variant}
        if self.p is not None:
            out["p"] = self.p
        if self.a is not None:
            out["a"] = self.a
        if self.matrix is not None:
            out["matrix"] = self.matrix.tolist()
        if self.perm:
            out["perm"] = list(self.perm)
        if self.shift:
            out["shift"] = self.shift
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, spec: dict) -> "Kernel":
        known = {"variant", "p", "a", "matrix", "perm", "shift"}
        extra = set(spec) - known
        if extra:
            raise KernelInvalid(f"unknown kernel fields {sorted(extra)}")
        matrix = spec.get("matrix")
        return cls(
            spec["variant"],
            p=None if spec.get("p") is None else float(spec["p"]),
            a=None if spec.get("a") is None else float(spec["a"]),
            matrix=None if matrix is None else np.asarray(matrix, dtype=float),
            perm=tuple(spec.get("perm", ())),
            shift=int(spec.get("shift", 0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "Kernel":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CylinderSpec:
    """Bits ``xi`` prescribed on the strictly increasing 1-based indices ``F``."""

    F: tuple[int, ...]
    xi: tuple[int, ...]

    def __post_init__(self):
        F = tuple(int(i) for i in self.F)
        xi = tuple(int(b) for b in self.xi)
        if len(F) != len(xi):
            raise ValueError("F and xi must have the same length")
        if any(i < 1 for i in F):
            raise ValueError("indices start at 1")
        if any(b not in (0, 1) for b in xi):
            raise ValueError("xi must be a 0/1 word")
        if any(F[k] >= F[k + 1] for k in range(len(F) - 1)):
            raise ValueError("F must be strictly increasing")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def from_dict(cls, spec: dict) -> "CylinderSpec":
        return cls(tuple(spec["F"]), tuple(spec["xi"]))


def all_words(n: int) -> np.ndarray:
    """Every 0/1 word of length ``n`` as rows of a ``(2^n, n)`` array."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)


def w_matrices(T: Kernel, F: Sequence[int], xis) -> np.ndarray:
    """Stack of ``W(xi)`` for an array of words ``xis`` of shape ``(m, #F)``.

    Entries are written as ``T_ii`` / ``1 - T_ii`` on the diagonal and
    ``+-T_ij`` off it, which equals the defining formula without the
    rounding of ``1 - (1 - T_ii)``.
    """
    xis = np.atleast_2d(np.asarray(xis, dtype=np.int64))
    n = len(F)
    TF = T.block(F) if n else np.zeros((0, 0))
    ones = (xis == 1)[:, :, None]
    W = np.where(ones, TF[None], -TF[None])
    idx = np.arange(n)
    diag = np.diag(TF)
    W[:, idx, idx] = np.where(xis == 1, diag, 1.0 - diag)
    return W


def w_matrix(T: Kernel, cyl: CylinderSpec) -> np.ndarray:
    return w_matrices(T, cyl.F, [cyl.xi])[0]


def _checked(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    bad = (values < -PROB_BAND) | (values > 1 + PROB_BAND)
    if np.any(bad):
        raise KernelInvalid(f"cylinder probability {values[bad].ravel()[0]!r} outside [0, 1]")
    return np.where(values < 0, 0.0, values)


def cylinder_probs(T: Kernel, F: Sequence[int], xis) -> np.ndarray:
    """``det W(xi)`` for each row of ``xis``, clamped from the band ``[-1e-12, 0)``."""
    if len(F) == 0:
        return np.ones(np.atleast_2d(xis).shape[0])
    return _checked(det(w_matrices(T, F, xis)))


def cylinder_prob(T: Kernel, cyl: CylinderSpec) -> float:
    """``mu_T(G(xi)) = det W(xi)``.

    Raises
    ------
    KernelInvalid
        If the determinant leaves ``[-1e-12, 1 + 1e-12]``.
    """
    return float(cylinder_probs(T, cyl.F, [cyl.xi])[0])


def consistency_check(T: Kernel, F: Sequence[int], k: int) -> float:
    """Largest additivity defect ``|P(xi+) + P(xi-) - P(xi)|`` over ``xi in {0,1}^F``.

    ``xi+`` and ``xi-`` extend ``xi`` by a 1 and a 0 at the index ``k``.
    """
    F = sorted(int(i) for i in F)
    if k in F:
        raise ValueError(f"index {k} already in F")
    G = sorted(F + [k])
    pos = G.index(k)
    words = all_words(len(F))
    ones = np.insert(words, pos, 1, axis=1)
    zeros = np.insert(words, pos, 0, axis=1)
    raw = lambda idx, w: det(w_matrices(T, idx, w)) if idx else np.ones(len(w))
    res = raw(G, ones) + raw(G, zeros) - raw(F, words)
    return float(np.max(np.abs(res)))


@dataclass(frozen=True)
class ShiftRecursion:
    """Residuals of ``W(0 xi) + W(1 xi) = [[1, 0], [*, 2 W'(xi)]]``.

    ``residual`` compares the first row with ``(1, 0, ..., 0)`` and the
    lower-right block with ``2 W'(xi)`` for ``T'_{ij} = T_{i+1,j+1}``.  The
    lower-left column equals ``-2 (-1)^{xi_i} T_{i+1,1}`` and is left free;
    it does not affect the determinant.  ``residual_one_sided`` is the same
    comparison with ``T'_{ij} = T_{i+1,j}``.  ``det_residual`` is
    ``|det W(0 xi) + det W(1 xi) - det W'(xi)|``.
    """

    residual: float
    residual_one_sided: float
    det_residual: float
    summed: np.ndarray = field(repr=False)


def shift_recursion_check(T: Kernel, F: Sequence[int], xi: Sequence[int]) -> ShiftRecursion:
    cyl = CylinderSpec(tuple(F), tuple(xi))
    n = len(cyl.F)
    G = [1] + [i + 1 for i in cyl.F]
    words = np.array([[0, *cyl.xi], [1, *cyl.xi]], dtype=np.int64)
    Ws = w_matrices(T, G, words)
    S = Ws[0] + Ws[1]
    first = np.zeros(n + 1)
    first[0] = 1.0
    row_res = np.max(np.abs(S[0] - first))
    Wp = w_matrix(T.shifted(1), cyl) if n else np.zeros((0, 0))
    lower = S[1:, 1:]
    res = max(row_res, float(np.max(np.abs(lower - 2 * Wp), initial=0.0)))
    # one-sided shift T'_{ij} = T_{i+1, j}
    if n:
        idx = np.asarray(cyl.F)
        rows = T.block(np.concatenate([idx + 1, idx]))[:n, n:]
        x = np.asarray(cyl.xi)
        W1 = np.diag(x.astype(float)) + np.where(x == 1, -1.0, 1.0)[:, None] * (np.eye(n) - rows)
        res1 = max(row_res, float(np.max(np.abs(lower - 2 * W1))))
        det_res = abs(float(det(Ws[0]) + det(Ws[1])) - float(det(Wp)))
    else:
        res1 = row_res
        det_res = abs(float(det(Ws[0]) + det(Ws[1])) - 1.0)
    return ShiftRecursion(float(res), float(res1), det_res, S)


def sample_configuration(T: Kernel, n: int, seed: int = 0) -> np.ndarray:
    """Draw the first ``n`` coordinates of ``mu_T`` by the chain rule.

    ``P(omega_i = 1 | omega_1..omega_{i-1})`` is the ratio of the cylinder
    probabilities on ``{1..i}`` and ``{1..i-1}``.
    """
    if not 1 <= n <= MAX_SAMPLE_ORDER:
        raise ValueError(f"n must lie in 1..{MAX_SAMPLE_ORDER}")
    rng = np.random.Generator(np.random.Philox(seed))
    word: list[int] = []
    prev = 1.0
    for i in range(1, n + 1):
        F = list(range(1, i + 1))
        p1 = float(det(w_matrices(T, F, [word + [1]]))[0])
        cond = p1 / prev if prev > 0 else 0.0
        if not -1e-9 <= cond <= 1 + 1e-9:
            raise KernelInvalid(f"conditional probability {cond!r} at index {i}")
        bit = int(rng.random() < cond)
        word.append(bit)
        prev = p1 if bit else prev - p1
    return np.array(word, dtype=np.int64)
