#!/usr/bin/env python3
"""Exact integer and rational linear algebra on numpy object arrays."""

from fractions import Fraction
from functools import reduce
from math import gcd, isqrt
from typing import List, Sequence, Tuple

import numpy as np
import sympy


def int_matrix(rows: Sequence, ncols: int = 0) -> np.ndarray:
    """Build a 2-dimensional integer matrix with `dtype=object`.

    Args:
        rows: Nested sequence of integers (or numpy rows).
        ncols: Number of columns, only used when `rows` is empty.

    Returns:
        The matrix, entries converted to Python integers.
    """
    rows = [[int(x) for x in row] for row in rows]
    if not rows:
        return np.zeros((0, ncols), dtype=object)
    return np.array(rows, dtype=object).reshape(len(rows), len(rows[0]))


def int_vector(values: Sequence) -> np.ndarray:
    """Build a 1-dimensional integer vector with `dtype=object`."""
    out = np.empty(len(values), dtype=object)
    for i, x in enumerate(values):
        out[i] = int(x)
    return out


def frac_vector(values: Sequence) -> np.ndarray:
    """Build a 1-dimensional rational vector with `dtype=object`."""
    out = np.empty(len(values), dtype=object)
    for i, x in enumerate(values):
        out[i] = Fraction(x)
    return out


def frac_matrix(rows: Sequence) -> np.ndarray:
    """Build a 2-dimensional rational matrix with `dtype=object`."""
    m = np.array(rows, dtype=object)
    out = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        out[idx] = Fraction(x)
    return out


def identity(n: int) -> np.ndarray:
    """Integer identity matrix of size `n`."""
    return np.eye(n, dtype=int).astype(object)


def is_integral(values: np.ndarray) -> bool:
    """Check that every entry of a rational array is an integer."""
    return all(Fraction(x).denominator == 1 for x in np.ravel(values))


def to_int(values: np.ndarray) -> np.ndarray:
    """Convert an integral rational array to an integer array.

    Raises:
        ValueError: If an entry is not an integer.
    """
    out = np.empty(np.shape(values), dtype=object)
    for idx, x in np.ndenumerate(np.asarray(values, dtype=object)):
        x = Fraction(x)
        if x.denominator != 1:
            raise ValueError(f"Non-integral entry: {x}")
        out[idx] = x.numerator
    return out


def exgcd(a: int, b: int) -> np.ndarray:
    """Extended GCD as a unimodular row operation.

    Args:
        a: An integer.
        b: An integer.

    Returns:
        A 2x2 integer matrix M of determinant 1 with M @ [a, b] = [g, 0],
        g = gcd(a, b) >= 0. If a divides b, M[0, 1] is 0.
    """
    if a == 0 and b == 0:
        return identity(2)
    a_sign = -1 if a < 0 else 1
    a *= a_sign
    b_sign = -1 if b < 0 else 1
    b *= b_sign

    # Euclid on the column [a, b], row operations tracked by the identity
    M = np.array([[a, 1, 0],
                  [b, 0, 1]], dtype=object)
    M = M[::-1]
    while M[1, 0] != 0:
        q = M[0, 0] // M[1, 0]
        M[0] -= q * M[1]
        M = M[::-1]

    g = M[0, 0]
    M = M[:, 1:]
    M *= [a_sign, b_sign]

    # Determinant fix, using M[0, 0] * a + M[0, 1] * b = g
    if g != 0:
        M[1] = [- b_sign * b // g, a_sign * a // g]

    return M


def _inv_2x2_det1(M: np.ndarray) -> np.ndarray:
    """Inverse of a 2x2 integer matrix of determinant 1."""
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=object)


def smith_normal_form(A: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Compute the Smith normal form of an integer matrix.

    Rows and columns are cleared with `exgcd` operations, then the diagonal
    is brought into a divisibility chain with gcd/lcm moves on pairs of
    entries. Zero diagonal entries are moved to the end.

    Args:
        A: An m x n integer matrix.

    Returns:
        A tuple (S, D, T, Sinv, Tinv) of integer matrices with
        A == S @ D @ T, D diagonal with non-negative entries
        d_1 | d_2 | ... followed by zeros, S and T unimodular with
        inverses Sinv and Tinv.
    """
    D = np.array(A, dtype=object).copy()
    if D.ndim != 2:
        raise ValueError(f"Expected a matrix, got shape {D.shape}")
    m, n = D.shape
    S, T = identity(m), identity(n)
    Sinv, Tinv = S.copy(), T.copy()

    def clear_row(i):
        if (D[i, i+1:] == 0).all():
            return False
        for j in range(i + 1, n):
            M = exgcd(D[i, i], D[i, j]).T
            D[:, [i, j]] = D[:, [i, j]] @ M
            T[[i, j]] = _inv_2x2_det1(M) @ T[[i, j]]
            Tinv[:, [i, j]] = Tinv[:, [i, j]] @ M
        return True

    def clear_col(i):
        if (D[i+1:, i] == 0).all():
            return False
        for j in range(i + 1, m):
            M = exgcd(D[i, i], D[j, i])
            D[[i, j]] = M @ D[[i, j]]
            S[:, [i, j]] = S[:, [i, j]] @ _inv_2x2_det1(M)
            Sinv[[i, j]] = M @ Sinv[[i, j]]
        return True

    k = min(m, n)
    for i in range(k):
        clear_col(i)
        while clear_row(i) and clear_col(i):
            pass

    def swap(i, j):
        D[[i, j]] = D[[j, i]]
        D[:, [i, j]] = D[:, [j, i]]
        S[:, [i, j]] = S[:, [j, i]]
        Sinv[[i, j]] = Sinv[[j, i]]
        T[[i, j]] = T[[j, i]]
        Tinv[:, [i, j]] = Tinv[:, [j, i]]

    def make_positive():
        for i in range(k):
            if D[i, i] < 0:
                D[i] = -D[i]
                S[:, i] = -S[:, i]
                Sinv[i] = -Sinv[i]

    def sort_diagonal(key):
        for i in range(k):
            best = min(range(i, k), key=lambda j: key(D[j, j]))
            if best != i:
                swap(i, best)

    make_positive()
    sort_diagonal(lambda d: (d == 0, d))
    rank = sum(1 for i in range(k) if D[i, i] != 0)

    # gcd/lcm moves: diag(a, b) -> diag(g, ab/g)
    for i in range(rank):
        for j in range(i + 1, rank):
            a, b = D[i, i], D[j, j]
            if b % a == 0:
                continue
            L = exgcd(a, b)
            x, y = L[0, 0], L[0, 1]
            g = x * a + y * b
            R = np.array([[1, -y * b // g], [1, x * a // g]], dtype=object)
            D[[i, j]] = L @ D[[i, j]]
            S[:, [i, j]] = S[:, [i, j]] @ _inv_2x2_det1(L)
            Sinv[[i, j]] = L @ Sinv[[i, j]]
            D[:, [i, j]] = D[:, [i, j]] @ R
            T[[i, j]] = _inv_2x2_det1(R) @ T[[i, j]]
            Tinv[:, [i, j]] = Tinv[:, [i, j]] @ R

    make_positive()
    sort_diagonal(lambda d: (d == 0, d))

    return S, D, T, Sinv, Tinv


def elementary_divisors(A: np.ndarray) -> List[int]:
    """Non-zero elementary divisors of an integer matrix, in chain order."""
    D = smith_normal_form(A)[1]
    return [int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]


def kernel(A: np.ndarray) -> np.ndarray:
    """Return a matrix whose columns are a basis of the integer null space.

    The basis is saturated, i.e. it spans a primitive sublattice of Z^n.
    """
    _, D, _, _, Tinv = smith_normal_form(A)
    rank = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    return Tinv[:, rank:]


def row_saturation(B: np.ndarray) -> np.ndarray:
    """Rows spanning the saturation of the row span of `B` in Z^n."""
    _, D, T, _, _ = smith_normal_form(B)
    rank = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    return T[:rank]


def to_sympy(A: np.ndarray) -> sympy.Matrix:
    """Convert an integer or rational object array to a sympy matrix."""
    A = np.atleast_2d(np.asarray(A, dtype=object))
    entries = []
    for x in A.flat:
        x = Fraction(x)
        entries.append(sympy.Rational(x.numerator, x.denominator))
    return sympy.Matrix(A.shape[0], A.shape[1], entries)


def from_sympy(M: sympy.Matrix) -> np.ndarray:
    """Convert a rational sympy matrix to a `Fraction` object array."""
    out = np.empty(M.shape, dtype=object)
    for i in range(M.shape[0]):
        for j in range(M.shape[1]):
            x = sympy.Rational(M[i, j])
            out[i, j] = Fraction(int(x.p), int(x.q))
    return out


def rational_inverse(A: np.ndarray) -> np.ndarray:
    """Exact inverse of a square rational matrix.

    Raises:
        ValueError: If the matrix is singular.
    """
    M = to_sympy(A)
    if M.det() == 0:
        raise ValueError("Singular matrix")
    return from_sympy(M.inv())


def rational_rank(A: np.ndarray) -> int:
    """Rank over the rationals."""
    if np.size(A) == 0:
        return 0
    return to_sympy(A).rank()


def determinant(A: np.ndarray) -> Fraction:
    """Exact determinant of a square rational matrix."""
    if np.shape(A)[0] == 0:
        return Fraction(1)
    x = sympy.Rational(to_sympy(A).det())
    return Fraction(int(x.p), int(x.q))


def solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact solution x of A @ x = b for a square invertible A."""
    x = rational_inverse(A) @ frac_vector(b)
    return x


def diagonalize(G: np.ndarray) -> Tuple[List[Fraction], np.ndarray]:
    """Diagonalize a symmetric rational form by congruence.

    Args:
        G: Symmetric n x n matrix.

    Returns:
        The diagonal entries and a rational basis change P (columns are the
        new basis vectors) with P.T @ G @ P diagonal.
    """
    A = frac_matrix(G)
    n = A.shape[0]
    P = frac_matrix(identity(n))
    diag = []
    for k in range(n):
        if A[k, k] == 0:
            j = next((j for j in range(k + 1, n) if A[j, j] != 0), None)
            if j is not None:
                A[[k, j]] = A[[j, k]]
                A[:, [k, j]] = A[:, [j, k]]
                P[:, [k, j]] = P[:, [j, k]]
            else:
                j = next((j for j in range(k + 1, n) if A[k, j] != 0), None)
                if j is None:
                    diag.append(Fraction(0))
                    continue
                A[k] += A[j]
                A[:, k] += A[:, j]
                P[:, k] += P[:, j]
        pivot = A[k, k]
        for j in range(k + 1, n):
            if A[k, j] != 0:
                c = A[k, j] / pivot
                A[j] -= c * A[k]
                A[:, j] -= c * A[:, k]
                P[:, j] -= c * P[:, k]
        diag.append(A[k, k])
    return diag, P


def inertia(G: np.ndarray) -> Tuple[int, int, int]:
    """Numbers of positive, negative and zero diagonal entries of `G`."""
    diag, _ = diagonalize(G)
    return (sum(1 for d in diag if d > 0), sum(1 for d in diag if d < 0),
            sum(1 for d in diag if d == 0))


def rational_gcd(values: Sequence) -> Fraction:
    """Non-negative generator of the Z-module spanned by rationals."""
    values = [Fraction(x) for x in values if x != 0]
    if not values:
        return Fraction(0)
    den = reduce(lambda a, b: a * b // gcd(a, b),
                 (x.denominator for x in values))
    num = reduce(gcd, (abs(x.numerator * (den // x.denominator))
                       for x in values))
    return Fraction(num, den)


def primitive_vector(v: Sequence) -> np.ndarray:
    """Positive rescaling of a non-zero rational vector to a primitive one."""
    g = rational_gcd(v)
    if g == 0:
        raise ValueError("Zero vector has no primitive rescaling")
    return to_int(frac_vector(v) / g)


def sign_canonical(v: np.ndarray) -> np.ndarray:
    """Flip the sign of `v` so that its first non-zero entry is positive."""
    for x in v:
        if x != 0:
            return -v if x < 0 else v
    return v


def isqrt_floor(x: Fraction) -> int:
    """Floor of the square root of a non-negative rational."""
    x = Fraction(x)
    if x < 0:
        raise ValueError(f"Negative radicand: {x}")
    # floor(sqrt(p/q)) == isqrt(p*q) // q
    return isqrt(x.numerator * x.denominator) // x.denominator


def is_square(x: int) -> bool:
    """Check that a non-negative integer is a perfect square."""
    return x >= 0 and isqrt(x) ** 2 == x
