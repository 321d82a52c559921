#!/usr/bin/env python3
"""Fincke-Pohst enumeration of short vectors of a positive definite form."""

from fractions import Fraction
from math import ceil, floor
from typing import Iterator, List, Tuple

import numpy as np

from K3N_LAT import linalg


def _quadratic_completion(gram: np.ndarray) -> List[List[Fraction]]:
    """Write Q(x) as sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2.

    Raises:
        ValueError: If the form is not positive definite.
    """
    n = gram.shape[0]
    q = [[Fraction(gram[i, j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        if q[i][i] <= 0:
            raise ValueError("Form is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for m in range(k, n):
                q[k][m] -= q[k][i] * q[i][m]
    return q


def short_vectors(gram: np.ndarray, bound: Fraction,
                  include_zero: bool = False) -> Iterator[Tuple[int, ...]]:
    """Yield every integer vector x with x^T gram x <= bound.

    Both x and -x are yielded. The order is deterministic.

    Args:
        gram: Positive definite symmetric rational matrix.
        bound: Upper bound on the value of the form.
        include_zero: Whether to yield the zero vector.

    Yields:
        Tuples of integer coordinates.

    Raises:
        ValueError: If `gram` is not positive definite.
    """
    n = gram.shape[0]
    bound = Fraction(bound)
    if n == 0:
        if include_zero and bound >= 0:
            yield ()
        return
    if bound < 0:
        return
    q = _quadratic_completion(gram)
    x = [0] * n

    def search(i, remaining):
        center = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        t = remaining / q[i][i]
        s = linalg.isqrt_floor(t) + 1
        for xi in range(floor(center) - s, ceil(center) + s + 1):
            d = xi - center
            if d * d > t:
                continue
            x[i] = xi
            if i == 0:
                yield tuple(x)
            else:
                yield from search(i - 1, remaining - q[i][i] * d * d)
        x[i] = 0

    for v in search(n - 1, bound):
        if include_zero or any(v):
            yield v
