"""Pure numpy jet kernels.

Fallback for the compiled ``_kernels`` extension; both expose the same
two functions with the same signatures:

``mul(a0, a1, a2, a3, b0, b1, b2, b3) -> (grad, hess, third)``
    derivative parts of the product of two jets.
``chain(f1, f2, f3, a1, a2, a3) -> (grad, hess, third)``
    derivative parts of ``f(a)`` given the first three derivatives of ``f``
    at ``a.value``.

``a3``/``b3`` may be ``None``; the third-order result is then ``None``.
Hessians come back bitwise symmetric and third-order tensors bitwise
invariant under index permutation.
"""
from functools import lru_cache

import numpy as np

BACKEND = "python"


@lru_cache(maxsize=None)
def _sorted_index(m):
    # flat index of the sorted representative of every (i, j, k)
    idx = np.empty((m, m, m), dtype=np.intp)
    for i in range(m):
        for j in range(m):
            for k in range(m):
                a, b, c = sorted((i, j, k))
                idx[i, j, k] = (a * m + b) * m + c
    return idx


def _sym3(t):
    return t.ravel()[_sorted_index(t.shape[0])]


def _spread(g, h):
    # g_i h_jk + g_j h_ik + g_k h_ij
    t = g[:, None, None] * h[None, :, :]
    return t + t.transpose(1, 0, 2) + t.transpose(1, 2, 0)


def mul(a0, a1, a2, a3, b0, b1, b2, b3):
    grad = a0 * b1 + b0 * a1
    o = np.outer(a1, b1)
    hess = a0 * b2 + b0 * a2 + (o + o.T)
    if a3 is None or b3 is None:
        return grad, hess, None
    third = a0 * b3 + b0 * a3 + _spread(a1, b2) + _spread(b1, a2)
    return grad, hess, _sym3(third)


def chain(f1, f2, f3, a1, a2, a3):
    grad = f1 * a1
    hess = f2 * np.outer(a1, a1) + f1 * a2
    if a3 is None:
        return grad, hess, None
    cube = a1[:, None, None] * a1[None, :, None] * a1[None, None, :]
    third = f3 * cube + f2 * _spread(a1, a2) + f1 * a3
    return grad, hess, _sym3(third)
