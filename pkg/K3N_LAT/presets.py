"""Contains the named lattices and the worked-example sublattices of L2"""

import numpy as np

from K3N_LAT import linalg

# Positive definite E8, Bourbaki numbering of the Dynkin diagram
E8_EDGES = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]
E8_GRAM = [[2 if i == j else (-1 if (i, j) in E8_EDGES
                               or (j, i) in E8_EDGES else 0)
            for j in range(8)] for i in range(8)]

# Coordinates of L2 = 3U + 2E8(-1) + <-2>: U summands on (0, 1), (2, 3),
# (4, 5), the E8(-1) blocks on 6..13 and 14..21, the <-2> generator on 22
L2_RANK = 23
E_INDEX = 22


def unit(i: int, rank: int = L2_RANK) -> np.ndarray:
    """Standard basis vector of Z^rank."""
    v = linalg.int_vector([0] * rank)
    v[i] = 1
    return v


def _swap_reflection() -> np.ndarray:
    """Swap of the 2nd and 3rd U composed with the reflection in e2+f2."""
    m = linalg.identity(L2_RANK)
    m[:, 2] = -unit(5)
    m[:, 3] = -unit(4)
    m[:, 4] = unit(2)
    m[:, 5] = unit(3)
    return m


# Exchange of the isotropic rays m1, m2 of U(2)
U2_SWAP = [[0, 1], [1, 0]]


PRESETS = {
    # Zh + Ze with h = e1 + f1 of norm 2: two deformation types
    "ex-comp": {
        "ambient": "L2",
        "n": 2,
        "basis": [unit(0) + unit(1), unit(E_INDEX)],
        "names": ["h", "e"],
        "base": [1, 0],
        "candidates": [],
    },
    # U(2) spanned by e1+f1, e2+f2 where (e1, e2), (f1, f2) are the first
    # two hyperbolic planes
    "ex-nonsep": {
        "ambient": "L2",
        "n": 2,
        "basis": [unit(0) + unit(2), unit(1) + unit(3)],
        "names": ["m1", "m2"],
        "base": [1, 1],
        "candidates": [],
        "delta": 2 * unit(0) - 2 * unit(1) + unit(E_INDEX),
        # -1 composed with the swap: exchanges the two components of the
        # positive cone, so it lies outside O+(M)
        "phi": [[-x for x in row] for row in U2_SWAP],
    },
    # <2> + 3<-2> spanned by c = e1+f1, d = e2-f2, d' = e3-f3 and e
    "ex-four": {
        "ambient": "L2",
        "n": 2,
        "basis": [unit(0) + unit(1), unit(2) - unit(3), unit(4) - unit(5),
                  unit(E_INDEX)],
        "names": ["c", "d", "d'", "e"],
        "base": [1, 0, 0, 0],
        "candidates": [_swap_reflection()],
    },
}
