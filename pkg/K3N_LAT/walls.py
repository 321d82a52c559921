#!/usr/bin/env python3
"""Wall divisor predicates and certified enumeration of wall classes."""

import argparse
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import (Callable, Dict, Iterable, List, Optional, Sequence, Set,
                    Tuple)

import numpy as np
from tqdm import tqdm

from K3N_LAT import linalg
from K3N_LAT.lattice import (Coordinates, LatVector, Lattice, Sublattice,
                             divisibility, make_lattice, orthogonal_complement,
                             project, signature, sublattice)
from K3N_LAT.polyhedra import Ray
from K3N_LAT.shortvec import short_vectors

_SPEC_ITEM = re.compile(r"\s*(-?\d+)(?::div(\d+))?\s*")


@dataclass(frozen=True)
class WallSpec:
    """Allowed (norm, divisibility) pairs of wall classes.

    A divisibility of None accepts any value. The optional predicate takes
    ambient coordinates and the ambient lattice and is applied on top of
    the numerical conditions.

    Raises:
        ValueError: If no pair is given or a norm is not negative even.
    """
    allowed: Tuple[Tuple[int, Optional[int]], ...]
    predicate: Optional[Callable[[np.ndarray, Lattice], bool]] = None

    def __post_init__(self):
        if not self.allowed:
            raise ValueError("Empty wall spec")
        for k, div in self.allowed:
            if k >= 0 or k % 2:
                raise ValueError(f"Wall norm must be negative even, got {k}")
            if div is not None and div <= 0:
                raise ValueError(f"Divisibility must be positive, got {div}")

    @classmethod
    def parse(cls, text: str) -> "WallSpec":
        """Parse a comma separated list such as '-2,-10:div2'.

        Raises:
            SyntaxError: If an item is malformed, with its position.
        """
        allowed = []
        pos = 0
        for item in text.split(","):
            match = _SPEC_ITEM.fullmatch(item)
            if match is None:
                err = SyntaxError(f"Malformed wall spec item '{item}' at "
                                  f"position {pos}")
                err.offset = pos
                err.text = text
                raise err
            div = int(match.group(2)) if match.group(2) else None
            allowed.append((int(match.group(1)), div))
            pos += len(item) + 1
        return cls(tuple(sorted(set(allowed), key=lambda p: (-p[0],
                                                             p[1] or 0))))

    @property
    def norms(self) -> List[int]:
        return sorted({k for k, _ in self.allowed}, reverse=True)

    @property
    def max_abs_norm(self) -> int:
        return max(-k for k, _ in self.allowed)

    def restricted(self, norms: Iterable[int]) -> Optional["WallSpec"]:
        """Sub-spec on the given norms, None when nothing is left."""
        keep = tuple(p for p in self.allowed if p[0] in set(norms))
        return WallSpec(keep, self.predicate) if keep else None

    def accepts(self, v: Sequence, L: Lattice) -> bool:
        """Check a primitive ambient vector against the allowed pairs."""
        v = linalg.int_vector(v)
        k = v @ L.gram @ v
        ok = any(k == norm and (div is None or divisibility(v, L) == div)
                 for norm, div in self.allowed)
        if ok and self.predicate is not None:
            return bool(self.predicate(v, L))
        return ok

    def __str__(self):
        return ",".join(str(k) if div is None else f"{k}:div{div}"
                        for k, div in self.allowed)


WALLS_N2 = WallSpec(((-2, None), (-10, 2)))


def _is_primitive_vector(v: Sequence) -> bool:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g == 1


def is_wall_divisor_n2(delta: LatVector) -> bool:
    """Wall divisor test on L_2: norm -2, or norm -10 and divisibility 2.

    Raises:
        ValueError: If `delta` is zero or not primitive.
    """
    if not any(delta.coords):
        raise ValueError("Wall test on the zero vector")
    if not _is_primitive_vector(delta.coords):
        raise ValueError(f"{delta} is not primitive")
    return WALLS_N2.accepts(delta.coords, delta.lattice)


def in_LnM(delta: LatVector, M: Sublattice) -> bool:
    """Check that both orthogonal projections of delta are negative.

    Raises:
        ValueError: If `delta` is zero.
    """
    if not any(delta.coords):
        raise ValueError("L_n(M) test on the zero vector")
    d_M, d_perp = project(delta, M)
    return d_M.norm() < 0 and d_perp.norm() < 0


def _drops_one_negative(S: Sublattice, delta: np.ndarray) -> bool:
    """Check that S ∩ delta-perp is non-degenerate with one negative less."""
    pos, neg = signature(S)
    K = linalg.kernel(linalg.int_matrix([S.pairing_rows @ delta]))
    if K.shape[1] == S.rank:
        return False
    G = K.T @ S.gram @ K
    return linalg.inertia(G) == (pos, neg - 1, 0)


def in_LnM_by_signature(delta: LatVector, M: Sublattice,
                        M_perp: Sublattice = None) -> bool:
    """L_n(M) test through the signatures of M ∩ delta-perp and
    M-perp ∩ delta-perp.

    Args:
        delta: Ambient vector.
        M: Non-degenerate primitive sublattice.
        M_perp: Its orthogonal complement, computed when omitted.

    Raises:
        ValueError: If `delta` is zero.
    """
    if not any(delta.coords):
        raise ValueError("L_n(M) test on the zero vector")
    M_perp = M_perp or orthogonal_complement(M)
    return (_drops_one_negative(M, delta.coords)
            and _drops_one_negative(M_perp, delta.coords))


def in_Delta_M(delta: LatVector, M: Sublattice, spec: WallSpec = WALLS_N2
               ) -> bool:
    """Membership in Delta_M(L_n) = L_n(M) ∩ Delta(L_n)."""
    if not any(delta.coords) or not _is_primitive_vector(delta.coords):
        return False
    return spec.accepts(delta.coords, delta.lattice) and in_LnM(delta, M)


@dataclass(frozen=True, eq=False)
class ConeDescription:
    """Rational polyhedral cone in the closed positive cone of M.

    Attributes:
        ambient: The hyperbolic sublattice M.
        rays: Primitive generators in M coordinates, norm >= 0.
        facets: Inward facet normals in M coordinates, may be empty.
        base: Reference point for the signed output, defaults to the first
            ray.

    Raises:
        ValueError: If there is no ray or the rays do not lie in one
            component of the closed positive cone.
    """
    ambient: Sublattice
    rays: Tuple[Ray, ...]
    facets: Tuple[Ray, ...] = ()
    base: Optional[Ray] = None

    def __post_init__(self):
        if not self.rays:
            raise ValueError("Empty cone")
        G = self.ambient.gram
        rays = []
        for r in self.rays:
            if len(r) != self.ambient.rank:
                raise ValueError(f"Ray {tuple(r)} has the wrong length")
            if not any(r):
                raise ValueError("Zero ray")
            rays.append(tuple(int(x) for x in linalg.primitive_vector(r)))
        object.__setattr__(self, "rays", tuple(rays))
        for i, r in enumerate(rays):
            if linalg.int_vector(r) @ G @ linalg.int_vector(r) < 0:
                raise ValueError(f"Ray {r} is outside the positive cone")
            for s in rays[i + 1:]:
                if linalg.int_vector(r) @ G @ linalg.int_vector(s) < 0:
                    raise ValueError(f"Rays {r} and {s} are not in the same "
                                     "cone component")

    @property
    def reference(self) -> Ray:
        return tuple(self.base) if self.base is not None else self.rays[0]

    def values(self, form: Sequence) -> List:
        """Values of a linear form (row in M coordinates) on the rays."""
        return [sum(a * x for a, x in zip(form, r)) for r in self.rays]


def _form_of(delta: LatVector, C: ConeDescription) -> np.ndarray:
    return C.ambient.pairing_rows @ delta.coords


def meets_cone(delta: LatVector, C: ConeDescription, open: bool = True
               ) -> bool:
    """Check whether delta-perp meets the (relatively open) cone.

    With open=True the hyperplane must contain a point with every ray
    coefficient positive; otherwise a non-trivial non-negative combination
    suffices.
    """
    values = C.values(_form_of(delta, C))
    if open:
        return all(v == 0 for v in values) or \
            (min(values) < 0 < max(values))
    return min(values) <= 0 <= max(values)


@dataclass
class WallEnumeration:
    """Wall classes in M coordinates with their completeness certificate.

    Attributes:
        classes: Sorted classes in M coordinates.
        certificate: 'complete' when the search bound was derived,
            'bounded_search' when a user bound was used.
        bound: The bound on the majorant form.
    """
    classes: List[Ray]
    certificate: str
    bound: Fraction

    def report(self, M: Sublattice) -> Dict:
        return {"classes": [list(c) for c in self.classes],
                "ambient": [[int(x) for x in M.embed(c)]
                            for c in self.classes],
                "certificate": self.certificate,
                "bound": str(self.bound)}


def _search_points(F: np.ndarray, rays: Sequence[np.ndarray], K: Fraction
                   ) -> List[np.ndarray]:
    """Non-ideal rays and the horoball entry points towards each cusp.

    A hyperplane x-perp with (x, x) >= -K and (x, q) != 0 stays out of the
    horoball (y, y) / (y, q)^2 > K / g^2 of the cusp q, g being the
    generator of the values (x, q).
    """
    points = [r for r in rays if r @ F @ r > 0]
    for q in rays:
        if q @ F @ q != 0:
            continue
        g = linalg.rational_gcd(F @ q)
        for r in rays:
            m = r @ F @ q
            if m == 0:
                continue
            s = max(Fraction(0), (K * m * m / (g * g) - r @ F @ r) / (2 * m))
            points.append(r + s * q)
    return points


def _hyperplane_search(F: np.ndarray, rays: Sequence[Ray], K: Fraction,
                       accept: Callable[[np.ndarray, Fraction], bool],
                       bound: Optional[Fraction] = None,
                       verbose: bool = False
                       ) -> Tuple[Set[Ray], Fraction, str]:
    """Integer vectors x of norm >= -K whose hyperplane cuts the open cone.

    Every such x satisfies 2 (x, h)^2 / (h, h) - (x, x) <= 2 A / (h, h) + K,
    with h the sum of the rays and A = K (max_v (h, v)^2 / (v, v) - (h, h))
    over the search points v.

    Args:
        F: Rational Gram matrix of a hyperbolic form.
        rays: Full rank ray generators.
        K: Bound on the absolute norm.
        accept: Filter on (x, norm of x).
        bound: User bound on the majorant form.
        verbose: Whether to show progress.

    Returns:
        The accepted vectors (both signs), the bound and the certificate.
    """
    F = linalg.frac_matrix(F)
    R = [linalg.frac_vector(r) for r in rays]
    h = sum(R[1:], R[0])
    N = h @ F @ h
    points = _search_points(F, R, K)
    A = K * (max((h @ F @ v) ** 2 / (v @ F @ v) for v in points) - N)
    Fh = F @ h
    P = 2 * np.outer(Fh, Fh) / N - F
    if bound is None:
        bound, certificate = 2 * A / N + K, "complete"
    else:
        bound, certificate = Fraction(bound), "bounded_search"

    found = set()
    for x in tqdm(short_vectors(P, bound), disable=not verbose):
        v = linalg.int_vector(x)
        values = [v @ F @ r for r in R]
        if not (min(values) < 0 < max(values)):
            continue
        nx = v @ F @ v
        if -K <= nx < 0 and accept(v, nx):
            found.add(x)
    return found, bound, certificate


def _signed_view(found: Set[Ray], F: np.ndarray, reference: Ray,
                 signed: bool) -> List[Ray]:
    if signed:
        ref = linalg.int_vector(reference)
        return sorted(x for x in found
                      if linalg.int_vector(x) @ F @ ref >= 0)
    return sorted({tuple(int(a) for a in
                         linalg.sign_canonical(linalg.int_vector(x)))
                   for x in found})


def _check_cone(M: Sublattice, C: ConeDescription):
    if C.ambient is not M and not np.array_equal(C.ambient.basis, M.basis):
        raise ValueError("Cone lives on another sublattice")
    if linalg.rational_rank(linalg.int_matrix(C.rays)) != M.rank:
        raise ValueError("Cone is not full-dimensional")


def enumerate_walls_in_cone(M: Sublattice, C: ConeDescription,
                            spec: WallSpec = WALLS_N2, signed: bool = False,
                            bound: Optional[Fraction] = None,
                            verbose: bool = False) -> WallEnumeration:
    """Primitive wall classes of M whose hyperplanes meet the open cone.

    Norms are read in M, divisibility in the ambient lattice.

    Args:
        M: Hyperbolic sublattice.
        C: Full-dimensional cone of M.
        spec: Allowed norms and divisibilities.
        signed: Keep the classes pairing non-negatively with the cone's
            reference point instead of one class per sign pair.
        bound: Replace the derived search bound.
        verbose: Whether to show progress.

    Returns:
        The classes in M coordinates and the certificate.

    Raises:
        ValueError: If the cone is not full-dimensional or belongs to
            another sublattice.
    """
    _check_cone(M, C)
    if verbose:
        print("### Wall enumeration : Starting ###", file=sys.stderr)
    L = M.ambient
    norms = set(spec.norms)

    def accept(v, nv):
        return nv in norms and _is_primitive_vector(v) and \
            spec.accepts(M.embed(v), L)

    if M.rank < 2:
        return WallEnumeration([], "complete", Fraction(0))
    found, used, certificate = _hyperplane_search(
        M.gram, C.rays, Fraction(spec.max_abs_norm), accept, bound, verbose)
    classes = _signed_view(found, M.gram, C.reference, signed)
    if verbose:
        print("### Wall enumeration : Done ###", file=sys.stderr)
    return WallEnumeration(classes, certificate, used)


def dual_hyperplane_classes(M: Sublattice, C: ConeDescription,
                            max_norm: int,
                            classes: Optional[Set[Coordinates]] = None,
                            bound: Optional[Fraction] = None,
                            verbose: bool = False) -> WallEnumeration:
    """Elements of M* of norm in (-max_norm, 0) whose hyperplanes meet the
    open cone.

    An element is given by its integer pairings y with the basis of M, so
    that it equals G^-1 y and its norm is y G^-1 y.

    Args:
        M: Hyperbolic sublattice.
        C: Full-dimensional cone of M.
        max_norm: Strict bound on the absolute norm.
        classes: Discriminant classes (in the discriminant group of M) to
            keep, all when omitted.
        bound: Replace the derived search bound.
        verbose: Whether to show progress.

    Returns:
        The pairing vectors, one per sign pair.
    """
    _check_cone(M, C)
    A_M = M.lattice.discriminant
    G = M.gram
    Ginv = linalg.rational_inverse(G)
    rays = [tuple(int(x) for x in G @ linalg.int_vector(r)) for r in C.rays]

    def accept(y, ny):
        if ny <= -max_norm:
            return False
        return classes is None or A_M.coordinates_of_pairing(y) in classes

    if M.rank < 2:
        return WallEnumeration([], "complete", Fraction(0))
    found, used, certificate = _hyperplane_search(
        Ginv, rays, Fraction(max_norm), accept, bound, verbose)
    return WallEnumeration(_signed_view(found, Ginv, (), False),
                           certificate, used)


def from_json_cone(M: Sublattice, rays: Sequence[Sequence[int]],
                   base: Optional[Sequence[int]] = None) -> ConeDescription:
    return ConeDescription(M, tuple(tuple(int(x) for x in r) for r in rays),
                           base=tuple(base) if base is not None else None)


if __name__ == "__main__":
    cli = argparse.ArgumentParser()
    cli.add_argument("lattice", type=str, help="Ambient lattice spec")
    cli.add_argument("sublattice", type=str, help="JSON basis rows")
    cli.add_argument("cone", type=str, help="JSON rays in M coordinates")
    cli.add_argument("--norms", type=str, default=str(WALLS_N2),
                     help="Allowed norms, e.g. '-2,-10:div2'")
    cli.add_argument("--signed", action="store_true")
    args = cli.parse_args()

    M = sublattice(make_lattice(args.lattice), json.loads(args.sublattice))
    C = from_json_cone(M, json.loads(args.cone))
    result = enumerate_walls_in_cone(M, C, WallSpec.parse(args.norms),
                                     signed=args.signed, verbose=True)
    print(json.dumps(result.report(M), indent=2))
