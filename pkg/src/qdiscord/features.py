"""Polynomial feature expansion.

Maps a parameter vector x in R^n to the vector of all monomials
x1^a1 ... xn^an of total degree a1 + ... + an <= L.  The expansion has
dimension C(n + L, n) and starts with the constant monomial 1, which
doubles as the bias feature for the downstream models.

Features are ordered graded-lexicographically: ascending total degree,
ties broken by lexicographic comparison of the exponent tuples.  Each
monomial is computed from a lower-degree one by a single multiplication,
so an expansion costs exactly D - 1 multiplies per sample.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator

import numpy as np

__all__ = [
    "feature_dim",
    "degree_for_dim",
    "enumerate_multi_indices",
    "feature_map",
    "feature_matrix",
]


def feature_dim(n: int, L: int) -> int:
    """Number of monomials in n variables of total degree <= L: C(n + L, n).

    Exact at any size; Python integers do not overflow.
    """
    if n < 1 or L < 1:
        raise ValueError(f"need n >= 1 and L >= 1, got n={n}, L={L}")
    return math.comb(n + L, n)


def degree_for_dim(n: int, dim: int, max_degree: int = 64) -> int:
    """Invert feature_dim: the L with C(n + L, n) == dim.

    The map is strictly increasing in L, so the answer is unique when it
    exists; raises ValueError otherwise.
    """
    for L in range(1, max_degree + 1):
        d = math.comb(n + L, n)
        if d == dim:
            return L
        if d > dim:
            break
    raise ValueError(f"no degree gives a {dim}-monomial expansion in {n} variables")


def _indices_of_degree(n: int, degree: int) -> Iterator[tuple[int, ...]]:
    if n == 1:
        yield (degree,)
        return
    for first in range(degree + 1):
        for rest in _indices_of_degree(n - 1, degree - first):
            yield (first,) + rest


def enumerate_multi_indices(n: int, L: int) -> list[tuple[int, ...]]:
    """All exponent tuples with total degree <= L, graded-lexicographic."""
    if n < 1 or L < 1:
        raise ValueError(f"need n >= 1 and L >= 1, got n={n}, L={L}")
    return [idx for d in range(L + 1) for idx in _indices_of_degree(n, d)]


@lru_cache(maxsize=32)
def _expansion_plan(n: int, L: int):
    """Per-(n, L) table: indices, and (parent, variable) pairs so that
    monomial[j] = monomial[parent[j]] * x[variable[j]] for every j >= 1."""
    indices = enumerate_multi_indices(n, L)
    position = {idx: j for j, idx in enumerate(indices)}
    parent = np.zeros(len(indices), dtype=np.intp)
    variable = np.zeros(len(indices), dtype=np.intp)
    for j, idx in enumerate(indices[1:], start=1):
        i = next(k for k, e in enumerate(idx) if e > 0)
        reduced = idx[:i] + (idx[i] - 1,) + idx[i + 1 :]
        parent[j] = position[reduced]
        variable[j] = i
    return tuple(indices), parent, variable


def feature_map(x: np.ndarray, L: int) -> np.ndarray:
    """Expand one parameter vector to its monomial features, shape (D,)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d parameter vector, got shape {x.shape}")
    return feature_matrix(x[None, :], L)[0]


def feature_matrix(X: np.ndarray, L: int) -> np.ndarray:
    """Expand a batch of parameter vectors row-wise, shape (M, D)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d batch, got shape {X.shape}")
    n = X.shape[1]
    _, parent, variable = _expansion_plan(n, L)
    out = np.empty((X.shape[0], parent.size), dtype=float)
    out[:, 0] = 1.0
    for j in range(1, parent.size):
        np.multiply(out[:, parent[j]], X[:, variable[j]], out=out[:, j])
    return out
