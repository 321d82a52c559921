#!/usr/bin/env python3
"""Vinberg domains, chamber decompositions and deformation types."""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from matplotlib import pyplot
from tqdm import tqdm

from K3N_LAT import linalg, polyhedra
from K3N_LAT.isometry import (Admissibility, Isometry, Verdict, check_Ln_shape,
                              gamma_membership, is_admissible, is_isometry)
from K3N_LAT.lattice import (GlueData, LatVector, Sublattice, glue,
                             make_lattice, sublattice)
from K3N_LAT.polyhedra import Ray
from K3N_LAT.presets import PRESETS
from K3N_LAT.shortvec import short_vectors
from K3N_LAT.walls import (WALLS_N2, ConeDescription, WallEnumeration,
                           WallSpec, dual_hyperplane_classes,
                           enumerate_walls_in_cone, in_Delta_M)

BUDGET_VARIABLE = "K3N_VINBERG_BUDGET"
DEFAULT_BUDGET = 5000
ROOTS_N2 = WallSpec(((-2, None),))


def vinberg_budget(budget: Optional[int] = None) -> int:
    """Budget of candidate vectors examined by Vinberg's algorithm, from the
    environment by default.

    Raises:
        ValueError: If the environment value is not a positive integer.
    """
    if budget is None:
        raw = os.environ.get(BUDGET_VARIABLE, str(DEFAULT_BUDGET))
        try:
            budget = int(raw)
        except ValueError:
            raise ValueError(f"{BUDGET_VARIABLE} must be an integer, "
                             f"got '{raw}'")
    if budget <= 0:
        raise ValueError(f"Vinberg budget must be positive, got {budget}")
    return budget


def _vec(v: Sequence) -> np.ndarray:
    return linalg.int_vector(v)


def _lex_positive(v: Sequence) -> bool:
    return next((x > 0 for x in v if x != 0), False)


@dataclass
class Polyhedron:
    """Convex cone of M bounded by root hyperplanes.

    Attributes:
        ambient: The hyperbolic sublattice M.
        facet_normals: Primitive inward normals in M coordinates.
        vertices: Primitive extreme rays in M coordinates, norm >= 0.
        certificate: 'complete', 'incomplete' or 'positive_cone'.
        examined: Number of candidate vectors examined.
    """
    ambient: Sublattice
    facet_normals: List[Ray]
    vertices: List[Ray]
    certificate: str = "complete"
    examined: int = 0

    @property
    def rows(self) -> List[Ray]:
        """Facet inequalities of the cone spanned by the vertices."""
        return polyhedra.cone_facets(self.vertices)

    @property
    def ideal_vertices(self) -> List[Ray]:
        G = self.ambient.gram
        return [v for v in self.vertices if _vec(v) @ G @ _vec(v) == 0]

    def cone(self, base: Optional[Sequence[int]] = None) -> ConeDescription:
        return ConeDescription(self.ambient, tuple(self.vertices),
                               tuple(self.facet_normals),
                               tuple(base) if base is not None else None)

    def is_consistent(self) -> bool:
        """Vertices pair non-negatively with the normals and are exactly the
        extreme rays of the facet system."""
        G = self.ambient.gram
        if any(_vec(n) @ G @ _vec(v) < 0
               for n in self.facet_normals for v in self.vertices):
            return False
        if len(self.facet_normals) < self.ambient.rank:
            return True
        rows = [tuple(int(x) for x in G @ _vec(n)) for n in self.facet_normals]
        return polyhedra.extreme_rays(rows) == sorted(self.vertices)

    def report(self) -> Dict:
        return {"facets": [list(n) for n in self.facet_normals],
                "vertices": [list(v) for v in self.vertices],
                "certificate": self.certificate,
                "examined": self.examined}


def default_base(M: Sublattice, radius: int = 10) -> Ray:
    """First vector of positive norm, ordered by sup norm then
    lexicographically.

    Raises:
        ValueError: If no positive vector is found within the radius.
    """
    G = M.gram
    for r in range(1, radius + 1):
        for v in product(range(-r, r + 1), repeat=M.rank):
            if max(abs(x) for x in v) == r and _vec(v) @ G @ _vec(v) > 0:
                return v
    raise ValueError(f"No vector of positive norm within radius {radius}")


def positive_cone_polyhedron(M: Sublattice,
                             base: Optional[Sequence[int]] = None
                             ) -> Polyhedron:
    """Positive cone of a rank 2 lattice with rational isotropic rays.

    Raises:
        ValueError: If M is not of rank 2 with -det a square, or the base
            is not positive.
    """
    if M.rank != 2:
        raise ValueError(f"Positive cone polyhedron needs rank 2, got "
                         f"{M.rank}")
    (a, b), (_, c) = [[int(x) for x in row] for row in M.gram]
    disc = b * b - a * c
    if disc <= 0 or not linalg.is_square(disc):
        raise ValueError(f"Isotropic rays are irrational (-det = {disc})")
    s = isqrt(disc)
    if a != 0:
        rays = [(-b + s, a), (-b - s, a)]
    else:
        rays = [(1, 0), (c, -2 * b)]
    base = _vec(base if base is not None else default_base(M))
    if base @ M.gram @ base <= 0:
        raise ValueError("Base point is not in the positive cone")
    oriented = []
    for r in rays:
        r = linalg.primitive_vector(r)
        if r @ M.gram @ base < 0:
            r = -r
        oriented.append(tuple(int(x) for x in r))
    return Polyhedron(M, [], sorted(oriented), "positive_cone")


def has_rational_positive_cone(M: Sublattice) -> bool:
    if M.rank != 2:
        return False
    (a, b), (_, c) = [[int(x) for x in row] for row in M.gram]
    return b * b - a * c > 0 and linalg.is_square(b * b - a * c)


def _check_reflective(spec: WallSpec):
    for k, div in spec.allowed:
        if (2 * (div or 1)) % (-k):
            raise ValueError(f"Roots of norm {k} and divisibility "
                             f"{div or 1} give non-integral reflections")


def _root_filter(M: Sublattice, spec: WallSpec):
    norms = set(spec.norms)
    L = M.ambient

    def accept(x, nx):
        return nx in norms and gcd(*(int(a) for a in x)) == 1 and \
            spec.accepts(M.embed(x), L)
    return accept


def _roots_up_to(M: Sublattice, spec: WallSpec, base: np.ndarray,
                 cap: Fraction) -> Tuple[List[Tuple[Fraction, Ray]], int]:
    """Roots r oriented towards base with (r, base)^2 / |r^2| <= cap.

    Returns:
        The sorted (distance, root) pairs and the number of candidate
        vectors examined.
    """
    G = linalg.frac_matrix(M.gram)
    N = base @ G @ base
    K = spec.max_abs_norm
    Gb = G @ base
    P = 2 * np.outer(Gb, Gb) / N - G
    accept = _root_filter(M, spec)
    out = []
    count = 0
    for x in short_vectors(P, 2 * cap * K / N + K):
        count += 1
        v = _vec(x)
        nv = v @ M.gram @ v
        pb = v @ M.gram @ base
        if pb < 0 or (pb == 0 and not _lex_positive(x)):
            continue
        if not accept(v, nv):
            continue
        t = Fraction(pb * pb, -nv)
        if t <= cap:
            out.append((t, x))
    return sorted(out), count


def _simple_roots(roots: Sequence[Ray]) -> List[Ray]:
    """Simple roots of a positive system: those that are not a sum of two
    positive roots."""
    positive = set(roots)
    simple = []
    for r in sorted(positive):
        if not any(tuple(a - b for a, b in zip(r, s)) in positive
                   for s in positive if s != r):
            simple.append(r)
    return simple


def _finite_volume(G: np.ndarray, normals: Sequence[Ray]
                   ) -> Tuple[bool, List[Ray]]:
    """Check that the cone cut by the normals lies in the closed positive
    cone, returning its extreme rays when the rows have full rank."""
    if not normals:
        return False, []
    rows = [tuple(int(x) for x in G @ _vec(n)) for n in normals]
    if linalg.rational_rank(linalg.int_matrix(rows)) < G.shape[0]:
        return False, []
    rays = polyhedra.extreme_rays(rows)
    if not rays:
        return False, []
    ok = all(_vec(r) @ G @ _vec(s) >= 0 for r in rays for s in rays)
    return ok, rays


def _facets_only(G: np.ndarray, normals: Sequence[Ray], rays: Sequence[Ray]
                 ) -> List[Ray]:
    rows = [tuple(int(x) for x in G @ _vec(n)) for n in normals]
    return [normals[i] for i in polyhedra.facet_indices(rows, rays)]


def _accept(G: np.ndarray, root: Ray, accepted: List[Ray]) -> bool:
    r = _vec(root)
    return all(r @ G @ _vec(a) >= 0 for a in accepted)


def _vinberg_rank2(M: Sublattice, spec: WallSpec, base: Ray) -> Polyhedron:
    """Vinberg's algorithm on the finite root list of a rational cone."""
    G = M.gram
    b = _vec(base)
    cone = positive_cone_polyhedron(M, base)
    roots = enumerate_walls_in_cone(M, cone.cone(base), spec).classes
    oriented = []
    for r in roots:
        pb = _vec(r) @ G @ b
        r = r if pb > 0 or (pb == 0 and _lex_positive(r)) else \
            tuple(-x for x in r)
        oriented.append((Fraction(int(pb) ** 2, -int(_vec(r) @ G @ _vec(r))),
                         r))
    accepted = []
    for _, r in sorted(oriented):
        if _accept(G, r, accepted):
            accepted.append(r)
    rows = cone.rows + [tuple(int(x) for x in G @ _vec(n)) for n in accepted]
    rays = polyhedra.extreme_rays(rows)
    return Polyhedron(M, _facets_only(G, accepted, rays), rays, "complete",
                      len(roots))


def vinberg_domain(M: Sublattice, root_norms: WallSpec = ROOTS_N2,
                   base: Optional[Sequence[int]] = None,
                   budget: Optional[int] = None,
                   verbose: bool = False) -> Polyhedron:
    """Fundamental polyhedron of the reflection group of the given roots.

    Roots are processed by increasing (r, base)^2 / |r^2|, then
    lexicographically. Those orthogonal to the base contribute the simple
    roots of their finite root system; a later root is accepted when it
    pairs non-negatively with every accepted one. The search stops when the
    accepted hyperplanes cut out a cone inside the closed positive cone.

    Args:
        M: Hyperbolic sublattice.
        root_norms: Reflective (norm, divisibility) pairs.
        base: Positive vector in M coordinates.
        budget: Maximum number of distinct candidate vectors examined.
        verbose: Whether to print progress.

    Returns:
        The polyhedron, flagged 'incomplete' when the budget ran out.

    Raises:
        ValueError: If a norm is not reflective or the base is not
            positive.
    """
    _check_reflective(root_norms)
    budget = vinberg_budget(budget)
    base = tuple(base) if base is not None else default_base(M)
    b = _vec(base)
    G = M.gram
    if b @ G @ b <= 0:
        raise ValueError("Base point is not in the positive cone")
    if verbose:
        print("### Vinberg : Starting ###", file=sys.stderr)
    if has_rational_positive_cone(M):
        domain = _vinberg_rank2(M, root_norms, base)
        if verbose:
            print("### Vinberg : Done ###", file=sys.stderr)
        return domain

    accepted = []
    examined = 0
    done = Fraction(-1)
    cap = Fraction(1)
    rays = []
    with tqdm(disable=not verbose) as progress:
        while True:
            roots, count = _roots_up_to(M, root_norms, b, cap)
            batch = [(t, r) for t, r in roots if t > done]
            # Search ellipsoids are nested: only the excess is new
            progress.update(count - examined)
            examined = count
            if examined > budget:
                break
            level0 = [r for t, r in batch if t == 0]
            accepted.extend(_simple_roots(level0))
            for t, r in batch:
                if t > 0 and _accept(G, r, accepted):
                    accepted.append(r)
            done = cap
            finite, rays = _finite_volume(G, accepted)
            if finite:
                if verbose:
                    print("### Vinberg : Done ###", file=sys.stderr)
                return Polyhedron(M, _facets_only(G, accepted, rays), rays,
                                  "complete", examined)
            cap *= 2
    if verbose:
        print("### Vinberg : Budget exhausted ###", file=sys.stderr)
    return Polyhedron(M, accepted, rays, "incomplete", examined)


@dataclass
class Chamber:
    """Chamber of a region cut by wall hyperplanes.

    Attributes:
        signs: Sign of each wall on the chamber.
        witness: Interior point in M coordinates, the sum of the vertices.
        vertices: Primitive extreme rays.
        simple: 'simple', 'not_simple' or 'unknown' once computed.
        simple_witness: Ambient class proving 'not_simple'.
    """
    signs: Tuple[int, ...]
    witness: Ray
    vertices: List[Ray]
    simple: Optional[str] = None
    simple_witness: Optional[Ray] = None


@dataclass
class ChamberComplex:
    """Chambers of a region with adjacency, symmetries and orbits."""
    ambient: Sublattice
    region: Polyhedron
    walls: List[Ray]
    chambers: List[Chamber]
    adjacency: List[Tuple[int, int, int]] = field(default_factory=list)
    symmetries: List[Tuple[Isometry, Verdict]] = field(default_factory=list)
    orbits: List[List[int]] = field(default_factory=list)
    orbit_interval: Tuple[int, int] = (0, 0)

    @property
    def forms(self) -> List[np.ndarray]:
        G = self.ambient.gram
        return [G @ _vec(w) for w in self.walls]

    def locate(self, x: Sequence) -> Optional[int]:
        """Chamber whose sign vector is realized strictly by x."""
        x = _vec(x)
        signs = []
        for a in self.forms:
            v = a @ x
            if v == 0:
                return None
            signs.append(1 if v > 0 else -1)
        signs = tuple(signs)
        return next((i for i, c in enumerate(self.chambers)
                     if c.signs == signs), None)


def chamber_decomposition(M: Sublattice, region: Polyhedron,
                          walls: Sequence[Sequence[int]],
                          verbose: bool = False) -> ChamberComplex:
    """Cut a region by the wall hyperplanes.

    Args:
        M: Hyperbolic sublattice.
        region: Full-dimensional polyhedron of M.
        walls: Wall classes in M coordinates.
        verbose: Whether to show progress.

    Returns:
        The chambers, sorted by sign vector with '+' first, and their
        adjacency.
    """
    G = M.gram
    walls = [tuple(int(x) for x in w) for w in walls]
    forms = [tuple(int(x) for x in G @ _vec(w)) for w in walls]
    cells = [((), list(region.vertices), list(region.rows))]
    if verbose:
        print("### Chambers : Starting ###", file=sys.stderr)
    for a in tqdm(forms, disable=not verbose):
        nxt = []
        for signs, rays, rows in cells:
            s = polyhedra.sign_on(rays, a)
            sides = (s,) if s != 0 else (1, -1)
            for side in sides:
                row = tuple(side * x for x in a)
                new = rays if s != 0 else \
                    polyhedra.add_halfspace(rows, rays, row)
                nxt.append((signs + (side,), new, rows + [row]))
        cells = nxt

    chambers = []
    for signs, rays, _ in sorted(cells, key=lambda c: tuple(-s for s in c[0])):
        witness = tuple(int(x) for x in
                        linalg.primitive_vector(polyhedra.ray_sum(rays)))
        chambers.append(Chamber(signs, witness, sorted(rays)))
    complex = ChamberComplex(M, region, walls, chambers)
    complex.adjacency = adjacency_graph(complex)
    if verbose:
        print("### Chambers : Done ###", file=sys.stderr)
    return complex


def adjacency_graph(complex: ChamberComplex) -> List[Tuple[int, int, int]]:
    """Pairs of chambers separated by exactly one wall.

    The pair is kept when the point where the segment between the two
    witnesses crosses the wall lies strictly inside the region and strictly
    on the common side of every other wall.

    Returns:
        Edges (i, j, wall index) with i < j, sorted.
    """
    forms = complex.forms
    region_rows = [_vec(r) for r in complex.region.rows]
    edges = []
    for i, ci in enumerate(complex.chambers):
        for j in range(i + 1, len(complex.chambers)):
            cj = complex.chambers[j]
            diff = [k for k, (s, t) in enumerate(zip(ci.signs, cj.signs))
                    if s != t]
            if len(diff) != 1:
                continue
            w = diff[0]
            x, y = _vec(ci.witness), _vec(cj.witness)
            ax, ay = forms[w] @ x, forms[w] @ y
            z = abs(ax) * y + abs(ay) * x
            if forms[w] @ z != 0:
                continue
            if any((forms[k] @ z) * ci.signs[k] <= 0
                   for k in range(len(forms)) if k != w):
                continue
            if any(r @ z <= 0 for r in region_rows):
                continue
            edges.append((i, j, w))
    return edges


def _pairing_permutations(gram: List[List[int]]) -> List[Tuple[int, ...]]:
    """Permutations p with gram[p(i)][p(j)] = gram[i][j]."""
    n = len(gram)
    out = []
    perm = []
    used = [False] * n

    def extend(i):
        if i == n:
            out.append(tuple(perm))
            return
        for j in range(n):
            if used[j] or gram[j][j] != gram[i][i]:
                continue
            if any(gram[perm[k]][j] != gram[k][i] for k in range(i)):
                continue
            used[j] = True
            perm.append(j)
            extend(i + 1)
            perm.pop()
            used[j] = False

    extend(0)
    return out


def polyhedron_symmetries(M: Sublattice, P: Polyhedron, n: int,
                          candidates: Sequence[np.ndarray] = (),
                          data: Optional[GlueData] = None,
                          verbose: bool = False
                          ) -> List[Tuple[Isometry, Verdict]]:
    """Isometries of M permuting the vertices of P, with their verdicts.

    Only maps induced by vertex permutations are searched. When the
    vertices do not span M_Q the identity alone is returned.

    Args:
        M: Hyperbolic primitive sublattice of L_n.
        P: Polyhedron with computed vertices.
        n: The K3^[n] parameter.
        candidates: Ambient isometries tried as extensions on M-perp.
        data: Glue data of M, computed when omitted.
        verbose: Whether to show progress.

    Returns:
        The isometries, identity first, with Gamma(M) verdicts.
    """
    G = M.gram
    lattice = M.lattice
    V = [_vec(v) for v in P.vertices]
    basis = []
    for i in range(len(V)):
        trial = basis + [i]
        if linalg.rational_rank(linalg.int_matrix([V[k] for k in trial])) \
                == len(trial):
            basis = trial
    maps = [Isometry(linalg.identity(M.rank), lattice)]
    if len(basis) == M.rank:
        gram = [[int(v @ G @ w) for w in V] for v in V]
        Binv = linalg.rational_inverse(
            linalg.int_matrix([V[k] for k in basis]).T)
        for perm in _pairing_permutations(gram):
            if perm == tuple(range(len(V))):
                continue
            img = linalg.int_matrix([V[perm[k]] for k in basis]).T
            g = img @ Binv
            if not linalg.is_integral(g):
                continue
            g = linalg.to_int(g)
            if any((g @ V[i] != V[perm[i]]).any() for i in range(len(V))):
                continue
            if is_isometry(g, lattice):
                maps.append(Isometry(g, lattice))
    data = data or glue(M)
    return [(phi, gamma_membership(phi, M, n, candidates, data))
            for phi in tqdm(maps, disable=not verbose)]


def _root(parent: List[int], i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return parent[i]


def _orbit_partition(complex: ChamberComplex, verdicts: Sequence[str]
                     ) -> List[List[int]]:
    parent = list(range(len(complex.chambers)))
    for phi, verdict in complex.symmetries:
        if verdict.verdict not in verdicts:
            continue
        for i, c in enumerate(complex.chambers):
            j = complex.locate(phi.apply(c.witness))
            if j is not None:
                parent[_root(parent, i)] = _root(parent, j)
    groups = {}
    for i in range(len(parent)):
        groups.setdefault(_root(parent, i), []).append(i)
    return sorted(groups.values())


def chamber_orbits(complex: ChamberComplex
                   ) -> Tuple[List[List[int]], Tuple[int, int]]:
    """Orbits of the chambers under the member symmetries.

    Returns:
        The orbits under the 'member' symmetries and the interval
        [lower, upper] of the orbit count, the lower end also using the
        'undecided' ones.
    """
    orbits = _orbit_partition(complex, ("member",))
    lower = _orbit_partition(complex, ("member", "undecided"))
    return orbits, (len(lower), len(orbits))


def _isotropic_pair(K: Sublattice) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Two isotropic vectors of K with non-zero pairing, if a small one
    exists."""
    G = K.ambient.gram
    n = K.ambient.rank
    pool = list(K.basis)
    for i in range(K.rank):
        for j in range(i + 1, K.rank):
            pool.extend([K.basis[i] + K.basis[j], K.basis[i] - K.basis[j]])
    for i in range(n):
        for j in range(i, n):
            for s in (1, -1):
                v = _vec([0] * n)
                v[i] += 1
                v[j] += s
                if any(v):
                    pool.append(v)
    iso = [v for v in pool if v @ G @ v == 0 and K.contains(v)]
    for i, u in enumerate(iso):
        for w in iso[i + 1:]:
            if u @ G @ w != 0:
                return u, w
    return None


def _lift_dual_class(y: Ray, k: int, M: Sublattice, data: GlueData,
                     spec: WallSpec, pair, radius: int = 12
                     ) -> Optional[np.ndarray]:
    """A class of Delta_M(L_n) of norm k projecting to G^-1 y in M*."""
    L = M.ambient
    A_M = data.A_S
    h = A_M.coordinates_of_pairing(y)
    if h not in data.gamma:
        return None
    v = linalg.rational_inverse(M.gram) @ _vec(y)
    x = data.representatives[(h, data.gamma[h])]
    x_M = M.embed(linalg.solve(M.gram, M.pairing_rows @ _vec(x)))
    delta0 = linalg.to_int(_vec(x) - x_M + M.embed(v))
    u, w = pair
    G = L.gram
    n0 = delta0 @ G @ delta0
    alpha, beta, m = delta0 @ G @ u, delta0 @ G @ w, u @ G @ w
    steps = sorted(product(range(-radius, radius + 1), repeat=2),
                   key=lambda p: (max(abs(p[0]), abs(p[1])), p))
    for a, b in steps:
        if n0 + 2 * a * alpha + 2 * b * beta + 2 * a * b * m != k:
            continue
        cand = delta0 + a * u + b * w
        if in_Delta_M(LatVector(cand, L), M, spec):
            return cand
    return None


def simplicity_flag(chamber: Chamber, M: Sublattice, n: int,
                    spec: WallSpec = WALLS_N2,
                    data: Optional[GlueData] = None
                    ) -> Tuple[str, Optional[Ray]]:
    """Decide whether some class of Delta_M(L_n) has its hyperplane
    meeting the chamber.

    A class delta projects to an element of M* in the glue subgroup with
    norm between (delta, delta) and 0; when no such element cuts the
    chamber the flag is 'simple'. An element that lifts to an explicit
    class gives 'not_simple' with that class as witness.

    Returns:
        The flag and the witness in ambient coordinates.
    """
    check_Ln_shape(M.ambient, n)
    data = data or glue(M)
    C = ConeDescription(M, tuple(chamber.vertices))
    H = set(data.H_S)
    pair = None
    seen = False
    for k in spec.norms:
        found = dual_hyperplane_classes(M, C, -k, H).classes
        if not found:
            continue
        seen = True
        if pair is None:
            pair = _isotropic_pair(data.K)
            if pair is None:
                break
        for y in found:
            delta = _lift_dual_class(y, k, M, data, spec, pair)
            if delta is not None:
                return "not_simple", tuple(int(x) for x in delta)
    return ("unknown" if seen else "simple"), None


@dataclass
class DeformationReport:
    """Deformation types of pairs of type M.

    Attributes:
        admissibility: The admissibility report of M.
        region: Vinberg domain or positive cone.
        region_kind: 'vinberg' or 'positive_cone'.
        walls: Enumeration of the remaining walls inside the region.
        complex: Chambers with symmetries and orbits.
    """
    admissibility: Admissibility
    region: Polyhedron
    region_kind: str
    walls: WallEnumeration
    complex: ChamberComplex

    @property
    def orbit_count(self) -> Optional[int]:
        lower, upper = self.complex.orbit_interval
        return lower if lower == upper else None

    def report(self) -> Dict:
        c = self.complex
        out = {
            "admissible": self.admissibility.report(),
            "region": self.region_kind,
            "vinberg": self.region.report(),
            "walls": self.walls.report(c.ambient),
            "chambers": [{"signs": list(ch.signs),
                          "witness": list(ch.witness),
                          "vertices": [list(v) for v in ch.vertices]}
                         for ch in c.chambers],
            "adjacency": [list(e) for e in c.adjacency],
            "symmetries": [{"matrix": phi.tolist(),
                            "verdict": v.verdict,
                            "generic_verdict": v.generic_verdict,
                            "certificate": v.certificate.get("kind"),
                            "psi": v.certificate.get("psi")}
                           for phi, v in c.symmetries],
            "symmetry_search": "vertex_permutations",
            "orbits": c.orbits,
            "per_chamber_simple_flag": [
                {"flag": ch.simple,
                 "witness": list(ch.simple_witness)
                 if ch.simple_witness else None}
                for ch in c.chambers],
        }
        if self.orbit_count is not None:
            out["orbit_count"] = self.orbit_count
        else:
            out["orbit_interval"] = list(c.orbit_interval)
        return out


def deformation_types(M: Sublattice, n: int, spec: WallSpec = WALLS_N2,
                      base: Optional[Sequence[int]] = None,
                      candidates: Sequence[np.ndarray] = (),
                      budget: Optional[int] = None,
                      verbose: bool = False) -> DeformationReport:
    """Chambers of M modulo Gamma_M.

    The region is the positive cone when it is rational of rank 2, the
    Vinberg domain of the reflective part of the wall spec otherwise. The other
    walls cut the region into chambers; symmetries of the region identify
    them.

    Raises:
        ValueError: If M is not admissible or the Vinberg search is
            incomplete.
    """
    adm = is_admissible(M, n)
    if not adm:
        raise ValueError(f"Sublattice is not admissible: {adm.failed} "
                         "clause fails")
    base = tuple(base) if base is not None else default_base(M)
    if has_rational_positive_cone(M):
        region, kind = positive_cone_polyhedron(M, base), "positive_cone"
        wall_spec = spec
    else:
        reflective = [p for p in spec.allowed if (2 * (p[1] or 1)) % -p[0]
                      == 0]
        if not reflective:
            raise ValueError("No reflective wall norm to build a domain")
        region = vinberg_domain(M, WallSpec(tuple(reflective)), base, budget,
                                verbose)
        if region.certificate != "complete":
            raise ValueError(f"Vinberg search incomplete after "
                             f"{region.examined} candidates")
        kind = "vinberg"
        rest = tuple(p for p in spec.allowed if p not in reflective)
        wall_spec = WallSpec(rest, spec.predicate) if rest else None

    if wall_spec is not None:
        walls = enumerate_walls_in_cone(M, region.cone(base), wall_spec,
                                        verbose=verbose)
    else:
        walls = WallEnumeration([], "complete", Fraction(0))
    complex = chamber_decomposition(M, region, walls.classes, verbose)
    data = glue(M)
    complex.symmetries = polyhedron_symmetries(M, region, n, candidates,
                                               data, verbose)
    complex.orbits, complex.orbit_interval = chamber_orbits(complex)
    for chamber in complex.chambers:
        chamber.simple, chamber.simple_witness = simplicity_flag(
            chamber, M, n, spec, data)
    return DeformationReport(adm, region, kind, walls, complex)


def chamber_table(complex: ChamberComplex) -> pd.DataFrame:
    """One row per chamber: signs, witness, vertices, orbit, simplicity."""
    orbit_of = {i: k for k, orbit in enumerate(complex.orbits) for i in orbit}
    return pd.DataFrame([{
        "chamber": i,
        "signs": "".join("+" if s > 0 else "-" for s in c.signs),
        "witness": str(list(c.witness)),
        "vertices": str([list(v) for v in c.vertices]),
        "orbit": orbit_of.get(i),
        "simple": c.simple,
    } for i, c in enumerate(complex.chambers)])


def plot_fan(complex: ChamberComplex, path: str) -> None:
    """Draw the chambers of a rank 2 complex as a fan, colored by orbit.

    Raises:
        ValueError: If the lattice is not of rank 2.
    """
    if complex.ambient.rank != 2:
        raise ValueError(f"Fan plot needs rank 2, got {complex.ambient.rank}")
    orbit_of = {i: k for k, orbit in enumerate(complex.orbits) for i in orbit}
    colors = pyplot.get_cmap("tab10")
    fig = pyplot.figure(figsize=(6, 6))
    for i, c in enumerate(complex.chambers):
        ends = [np.array([float(x) for x in v]) /
                np.linalg.norm([float(x) for x in v]) for v in c.vertices]
        xs = [0.0] + [p[0] for p in ends]
        ys = [0.0] + [p[1] for p in ends]
        pyplot.fill(xs, ys, color=colors(orbit_of.get(i, 0) % 10), alpha=0.5)
        mid = sum(ends) / len(ends)
        pyplot.text(mid[0] * 0.6, mid[1] * 0.6, f"K{i}")
    for w in complex.walls:
        a = complex.ambient.gram @ _vec(w)
        d = np.array([float(-a[1]), float(a[0])])
        d = d / np.linalg.norm(d)
        pyplot.plot([-d[0], d[0]], [-d[1], d[1]], "k--", linewidth=0.8)
    pyplot.axis("equal")
    fig.savefig(path)
    pyplot.close(fig)


if __name__ == "__main__":
    cli = argparse.ArgumentParser()
    cli.add_argument("preset", type=str, choices=sorted(PRESETS),
                     help="Worked-example sublattice")
    cli.add_argument("--csv", type=str, help="Chamber table output")
    args = cli.parse_args()

    preset = PRESETS[args.preset]
    M = sublattice(make_lattice(preset["ambient"]), preset["basis"])
    result = deformation_types(M, preset["n"], base=preset["base"],
                               candidates=preset["candidates"], verbose=True)
    if args.csv:
        chamber_table(result.complex).to_csv(args.csv, sep=";", index=False)
    print(json.dumps(result.report(), indent=2, sort_keys=True))
