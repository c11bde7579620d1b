"""Determinants by Gaussian elimination with partial pivoting.

numpy's ``det`` goes through ``slogdet`` and an exponential, which perturbs
even diagonal inputs by an ulp or two.  Cylinder probabilities of product
measures are compared at zero tolerance, so elimination is done here and the
pivots are multiplied in row order.
"""
from __future__ import annotations

import numpy as np


def det(a) -> np.ndarray:
    """Determinant of a square matrix or a stack of them (``(..., n, n)``)."""
    a = np.array(a, copy=True)
    if a.dtype.kind not in "fc":
        a = a.astype(float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError("det expects (..., n, n) input")
    n = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape((-1, n, n))
    m = a.shape[0]
    if n == 0:
        return np.ones(batch, dtype=a.dtype)[()]
    sign = np.ones(m, dtype=a.dtype)
    rows = np.arange(m)
    for j in range(n - 1):
        piv = j + np.argmax(np.abs(a[:, j:, j]), axis=1)
        swap = piv != j
        if np.any(swap):
            r = rows[swap]
            tmp = a[r, j, :].copy()
            a[r, j, :] = a[r, piv[swap], :]
            a[r, piv[swap], :] = tmp
            sign[swap] = -sign[swap]
        pivot = a[:, j, j]
        safe = np.where(pivot == 0, 1, pivot)
        factors = a[:, j + 1 :, j] / safe[:, None]
        factors[pivot == 0] = 0
        nz = np.any(factors != 0, axis=1)
        if np.any(nz):
            a[nz, j + 1 :, j:] -= factors[nz, :, None] * a[nz, None, j, j:]
    out = sign.copy()
    for j in range(n):
        out = out * a[:, j, j]
    return out.reshape(batch)[()]
