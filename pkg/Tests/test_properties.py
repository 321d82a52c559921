"""Tests randomized properties of the lattice, isometry, wall and chamber
functions"""

from fractions import Fraction
from math import gcd

import numpy as np
import pytest
from K3N_LAT import isometry, lattice
from K3N_LAT.chambers import Polyhedron, chamber_decomposition
from K3N_LAT.isometry import reflection
from K3N_LAT.lattice import make_lattice, sublattice
from K3N_LAT.walls import (WALLS_N2, ConeDescription,
                           enumerate_walls_in_cone, in_LnM,
                           in_LnM_by_signature)

from fixture import u

# Negative classes of the E8(-1) and <-2> blocks of L2
NEGATIVE_CLASSES = [[22], [6], [6, 8], [6, 14], [6, 22], [14, 22],
                    [6, 14, 22]]
ROOTS = [[6], [7], [13], [14], [6, 8], [14, 16], [22]]
SPINOR_LATTICES = ["U", "U+<-2>", "U+<2>", "2U+<-2>", "U+U(2)",
                   "U+<2>+<-2>+<-4>", "2U+U(2)", "<2>+<-2>+<-6>"]


def _sign_canonical(a, b):
    return (a, b) if a > 0 or (a == 0 and b > 0) else (-a, -b)


def test_lnm_criteria_agree(L2):
    """Test that the projection and signature L_n(M) tests agree"""
    rng = np.random.default_rng(2)
    checked = 0
    while checked < 1000:
        rank = int(rng.integers(1, 5))
        try:
            M = sublattice(L2, rng.integers(-1, 2, size=(rank, 23)).tolist())
            if M.is_degenerate:
                continue
            M_perp = lattice.orthogonal_complement(M)
        except ValueError:
            continue
        for _ in range(20):
            coords = rng.integers(-2, 3, size=23).tolist()
            if not any(coords):
                continue
            delta = L2.vector(coords)
            assert in_LnM(delta, M) == in_LnM_by_signature(delta, M, M_perp)
            checked += 1


def test_glue_identities_random():
    """Test the glue anti-isometry and order identity on random lattices"""
    rng = np.random.default_rng(3)
    checked = 0
    attempts = 0
    while checked < 200:
        attempts += 1
        assert attempts < 20000
        n = int(rng.integers(2, 6))
        gram = [[0] * n for _ in range(n)]
        for i in range(n):
            gram[i][i] = 2 * int(rng.integers(-2, 3))
            for j in range(i + 1, n):
                gram[i][j] = gram[j][i] = int(rng.integers(-1, 2))
        try:
            L = lattice.from_gram(gram)
            r = int(rng.integers(1, n))
            S = lattice.saturate(
                sublattice(L, rng.integers(-1, 2, size=(r, n)).tolist()))
            data = lattice.glue(S)
        except ValueError:
            continue
        assert data.is_anti_isometry()
        assert data.order_identity()
        checked += 1


def test_spinor_norm_of_products():
    """Test that both spinor norms are the product over the reflections"""
    rng = np.random.default_rng(5)
    lattices = [make_lattice(spec) for spec in SPINOR_LATTICES]
    checked = 0
    while checked < 1000:
        L = lattices[int(rng.integers(len(lattices)))]
        sigma = None
        expected = 1
        for _ in range(int(rng.integers(1, 6))):
            v = L.vector(rng.integers(-2, 3, size=L.rank).tolist())
            k = v.coords @ L.gram @ v.coords
            if k == 0:
                continue
            try:
                r = reflection(v)
            except ValueError:
                continue
            expected *= -1 if k > 0 else 1
            sigma = r if sigma is None else sigma @ r
        if sigma is None:
            continue
        assert isometry.real_spinor_norm(sigma) == expected
        assert isometry.real_spinor_norm(sigma, "orientation") == expected
        checked += 1


def _random_l2_isometry(rng, L2):
    """Product of reflections in (+-2)-classes and its count of positive
    ones."""
    sigma = None
    positive = 0
    for _ in range(int(rng.integers(1, 5))):
        i = int(rng.integers(3))
        k = int(rng.choice([0, 2]))
        root = ROOTS[int(rng.integers(len(ROOTS)))]
        v = u(2 * i) + k * u(2 * i + 1) + u(*root)
        if rng.integers(2):
            v = -v
        r = reflection(L2.vector(v))
        positive += k == 2
        sigma = r if sigma is None else sigma @ r
    return sigma, positive


def test_monodromy_is_a_subgroup(L2):
    """Test that Mon^2(L2) membership is multiplicative and matches the
    spinor norm"""
    rng = np.random.default_rng(7)
    for _ in range(200):
        sigma, p = _random_l2_isometry(rng, L2)
        tau, q = _random_l2_isometry(rng, L2)
        in_sigma = isometry.in_monodromy(sigma, 2)
        in_tau = isometry.in_monodromy(tau, 2)
        assert in_sigma == (p % 2 == 0)
        assert in_sigma == (isometry.real_spinor_norm(sigma) == 1)
        assert isometry.in_monodromy(sigma @ tau, 2) == (in_sigma == in_tau)


def _box_cases():
    cases = []
    for idx, n_class in enumerate(NEGATIVE_CLASSES):
        for k in (1, 2):
            for sign in (1, -1):
                cases.append((idx % 3, k, n_class, sign))
    return cases


@pytest.mark.parametrize("i, k, n_class, sign", _box_cases())
def test_walls_match_box_search(i, k, n_class, sign, L2):
    """Test the certified wall search against a brute force box search"""
    M = sublattice(L2, [u(2 * i) + k * u(2 * i + 1), u(*n_class)])
    g11, g22 = int(M.gram[0, 0]), int(M.gram[1, 1])
    assert M.gram[0, 1] == 0
    s = 1
    while g11 * s * s + g22 <= 0:
        s += 1
    C = ConeDescription(M, ((1, 0), (s, sign)))

    expected = set()
    for a in range(-50, 51):
        for b in range(-50, 51):
            if g11 * a * a + g22 * b * b not in (-2, -10) or gcd(a, b) != 1:
                continue
            v1, v2 = g11 * a, g11 * a * s + g22 * b * sign
            if not min(v1, v2) < 0 < max(v1, v2):
                continue
            if WALLS_N2.accepts(M.embed((a, b)), L2):
                expected.add(_sign_canonical(a, b))

    result = enumerate_walls_in_cone(M, C)
    assert result.certificate == "complete"
    assert result.classes == sorted(expected)


def _box_walls(M, rays, radius=50):
    """Wall classes of M cutting the open cone, by a box search."""
    G = [[int(x) for x in row] for row in M.gram]
    expected = set()
    for a in range(-radius, radius + 1):
        for b in range(-radius, radius + 1):
            if gcd(a, b) != 1:
                continue
            x = (a, b)
            nx = sum(x[i] * G[i][j] * x[j] for i in range(2)
                     for j in range(2))
            if nx not in (-2, -10):
                continue
            values = [sum(x[i] * G[i][j] * r[j] for i in range(2)
                          for j in range(2)) for r in rays]
            if not min(values) < 0 < max(values):
                continue
            if WALLS_N2.accepts(M.embed(x), M.ambient):
                expected.add(_sign_canonical(a, b))
    return sorted(expected)


def _cusp_cases():
    cases = []
    for idx, n_class in enumerate(NEGATIVE_CLASSES):
        for k in (1, 2, 3):
            for both in (True, False):
                cases.append((idx % 3, k, n_class, both))
    return cases


@pytest.mark.parametrize("i, k, n_class, both", _cusp_cases())
def test_walls_match_box_search_cusps(i, k, n_class, both, L2):
    """Test the certified wall search on cones with isotropic rays against a
    brute force box search"""
    M = sublattice(L2, [u(2 * i), k * u(2 * i + 1) + u(*n_class)])
    assert M.gram[0, 0] == 0 and M.gram[0, 1] == k
    m = -int(M.gram[1, 1]) // 2
    g = gcd(m, k)
    second = (m // g, k // g) if both else (m + 1, 1)
    rays = [(1, 0), second]
    result = enumerate_walls_in_cone(M, ConeDescription(M, tuple(rays)))
    assert result.certificate == "complete"
    assert result.classes == _box_walls(M, rays)


@pytest.mark.parametrize("rays", [[(1, -1), (1, 1)], [(1, 0), (2, 1)]])
def test_chamber_count_by_sweep(rays, M_comp):
    """Test the chamber count of random wall arrangements in a rank 2 cone
    against the crossing points along a segment"""
    rng = np.random.default_rng(11)
    region = Polyhedron(M_comp, [], sorted(rays), "positive_cone")
    G = [[int(x) for x in row] for row in M_comp.gram]
    r1, r2 = rays
    for _ in range(12):
        walls = set()
        for _ in range(int(rng.integers(1, 7))):
            a, b = (int(x) for x in rng.integers(-4, 5, size=2))
            if a == 0 and b == 0:
                continue
            g = gcd(a, b)
            walls.add(_sign_canonical(a // g, b // g))
        walls = sorted(walls)
        crossings = set()
        for w in walls:
            form = [G[0][0] * w[0] + G[0][1] * w[1],
                    G[1][0] * w[0] + G[1][1] * w[1]]
            f1 = form[0] * r1[0] + form[1] * r1[1]
            f2 = form[0] * r2[0] + form[1] * r2[1]
            if f1 * f2 < 0:
                crossings.add(Fraction(f1, f1 - f2))
        complex = chamber_decomposition(M_comp, region, walls)
        assert len(complex.chambers) == len(crossings) + 1
        assert len(complex.adjacency) == len(complex.chambers) - 1
