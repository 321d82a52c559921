#!/usr/bin/env python3
"""Even lattices, sublattices, discriminant groups and glue data."""

import argparse
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd, prod
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from K3N_LAT import linalg, presets

Coordinates = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Lattice:
    """Integral lattice given by a symmetric even Gram matrix.

    Attributes:
        gram: Symmetric integer matrix with even diagonal.
        label: Display string, the canonical spec when built by
            `make_lattice`.
    """
    gram: np.ndarray
    label: str = ""

    def __post_init__(self):
        g = self.gram
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"Gram matrix must be square, got {g.shape}")
        if not (g == g.T).all():
            raise ValueError("Gram matrix is not symmetric")
        odd = [i for i in range(g.shape[0]) if g[i, i] % 2]
        if odd:
            raise ValueError(f"Odd lattice: diagonal entry {odd[0]} is "
                             f"{g[odd[0], odd[0]]}")

    @property
    def rank(self) -> int:
        return self.gram.shape[0]

    @cached_property
    def det(self) -> int:
        return int(linalg.determinant(self.gram))

    @property
    def is_degenerate(self) -> bool:
        return self.det == 0

    def vector(self, coords: Sequence) -> "LatVector":
        return LatVector(linalg.int_vector(coords), self)

    def unit(self, i: int) -> "LatVector":
        return LatVector(presets.unit(i, self.rank), self)

    def same_form(self, other: "Lattice") -> bool:
        return self is other or (self.gram.shape == other.gram.shape
                                 and (self.gram == other.gram).all())

    @cached_property
    def discriminant(self) -> "DiscriminantGroup":
        return discriminant_group(self)

    @cached_property
    def orthogonal_basis(self) -> Tuple[List[Fraction], np.ndarray]:
        """Exact congruence diagonalization of the Gram matrix."""
        return linalg.diagonalize(self.gram)


@dataclass(frozen=True, eq=False)
class LatVector:
    """Integral vector of a lattice, in the lattice's coordinates."""
    coords: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise ValueError(f"Vector of length {len(self.coords)} in a "
                             f"lattice of rank {self.lattice.rank}")

    def _check(self, other):
        if not self.lattice.same_form(other.lattice):
            raise ValueError("Lattice mismatch")

    def __add__(self, other):
        self._check(other)
        return LatVector(self.coords + other.coords, self.lattice)

    def __sub__(self, other):
        self._check(other)
        return LatVector(self.coords - other.coords, self.lattice)

    def __neg__(self):
        return LatVector(-self.coords, self.lattice)

    def __rmul__(self, k: int):
        return LatVector(int(k) * self.coords, self.lattice)

    def __eq__(self, other):
        return (isinstance(other, LatVector)
                and self.lattice.same_form(other.lattice)
                and (self.coords == other.coords).all())

    def __hash__(self):
        return hash(self.tuple())

    def tuple(self) -> Coordinates:
        return tuple(int(x) for x in self.coords)

    def __repr__(self):
        return f"LatVector{self.tuple()}"


@dataclass(frozen=True, eq=False)
class QVector:
    """Rational vector in the coordinates of a lattice."""
    coords: np.ndarray
    lattice: Lattice

    def __add__(self, other):
        return QVector(self.coords + other.coords, self.lattice)

    def __eq__(self, other):
        return (isinstance(other, (QVector, LatVector))
                and self.lattice.same_form(other.lattice)
                and all(Fraction(a) == Fraction(b)
                        for a, b in zip(self.coords, other.coords)))

    def __hash__(self):
        return hash(tuple(Fraction(x) for x in self.coords))

    def norm(self) -> Fraction:
        return Fraction(self.coords @ self.lattice.gram @ self.coords)

    def is_integral(self) -> bool:
        return linalg.is_integral(self.coords)

    def to_lattice(self) -> LatVector:
        """Convert to a `LatVector`.

        Raises:
            ValueError: If a coordinate is not an integer.
        """
        return LatVector(linalg.to_int(self.coords), self.lattice)

    def __repr__(self):
        return f"QVector({', '.join(str(Fraction(x)) for x in self.coords)})"


@dataclass(frozen=True, eq=False)
class Sublattice:
    """Sublattice of an ambient lattice spanned by the rows of `basis`.

    Attributes:
        ambient: The ambient lattice.
        basis: r x rank integer matrix, rows in ambient coordinates.
    """
    ambient: Lattice
    basis: np.ndarray

    def __post_init__(self):
        if self.basis.ndim != 2 or self.basis.shape[1] != self.ambient.rank:
            raise ValueError(f"Basis of shape {self.basis.shape} in a "
                             f"lattice of rank {self.ambient.rank}")
        if len(linalg.elementary_divisors(self.basis)) != self.rank:
            raise ValueError("Basis rows are linearly dependent")

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def gram(self) -> np.ndarray:
        return self.basis @ self.ambient.gram @ self.basis.T

    @cached_property
    def lattice(self) -> Lattice:
        return Lattice(linalg.int_matrix(self.gram, 0))

    @property
    def is_degenerate(self) -> bool:
        return self.lattice.is_degenerate

    @cached_property
    def _snf(self):
        return linalg.smith_normal_form(self.basis)

    @cached_property
    def pairing_rows(self) -> np.ndarray:
        """Rows b_i^T G: pairing of ambient vectors with the basis."""
        return self.basis @ self.ambient.gram

    def embed(self, coords: Sequence) -> np.ndarray:
        """Ambient coordinates of a vector given in the basis."""
        return np.asarray(coords, dtype=object) @ self.basis

    def coordinates(self, v: Sequence) -> Optional[np.ndarray]:
        """Coordinates of an ambient vector in the basis.

        Args:
            v: Integer or rational ambient coordinates.

        Returns:
            The rational coordinates, or None if `v` is not in the rational
            span of the basis.
        """
        S, D, _, Sinv, Tinv = self._snf
        w = Tinv.T @ linalg.frac_vector(v)
        if any(x != 0 for x in w[self.rank:]):
            return None
        y = linalg.frac_vector([w[i] / D[i, i] for i in range(self.rank)])
        return Sinv.T @ y

    def contains(self, v: Sequence) -> bool:
        a = self.coordinates(v)
        return a is not None and linalg.is_integral(a)


def _reduced(y: np.ndarray) -> np.ndarray:
    """Rational vector with every coordinate reduced into [0, 1)."""
    return linalg.frac_vector([x - (x.numerator // x.denominator) for x in y])


@dataclass(frozen=True, eq=False)
class DiscriminantGroup:
    """Discriminant group L*/L with its finite quadratic form.

    Elements are tuples of residues modulo the invariant factors.

    Attributes:
        lattice: The lattice L.
        invariant_factors: d_1 | d_2 | ... | d_s, each > 1.
        generators: Dual representatives g_i, coordinates in [0, 1), each
            the least such representative among the generators of <g_i>.
        qform: (g_i, g_i) mod 2.
        pairing: (g_i, g_j) mod 1.
        coordinate_map: Integer rows turning a pairing vector (x, b_j)_j
            into residues.
    """
    lattice: Lattice
    invariant_factors: Tuple[int, ...]
    generators: Tuple[np.ndarray, ...]
    qform: Tuple[Fraction, ...]
    pairing: np.ndarray
    coordinate_map: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def length(self) -> int:
        return len(self.invariant_factors)

    @property
    def zero(self) -> Coordinates:
        return (0,) * self.length

    def reduce(self, t: Sequence[int]) -> Coordinates:
        return tuple(int(x) % d for x, d in zip(t, self.invariant_factors))

    def add(self, t: Coordinates, u: Coordinates) -> Coordinates:
        return self.reduce([a + b for a, b in zip(t, u)])

    def neg(self, t: Coordinates) -> Coordinates:
        return self.reduce([-a for a in t])

    def coordinates_of_pairing(self, p: Sequence) -> Coordinates:
        """Class of the dual vector whose pairings with the basis are `p`."""
        return self.reduce(self.coordinate_map @ linalg.int_vector(p))

    def coordinates(self, y: Sequence) -> Coordinates:
        """Class of a dual vector given in lattice coordinates.

        Raises:
            ValueError: If `y` is not in the dual lattice.
        """
        p = self.lattice.gram @ linalg.frac_vector(y)
        return self.coordinates_of_pairing(linalg.to_int(p))

    def element(self, t: Sequence[int]) -> np.ndarray:
        """Dual representative of a class, coordinates reduced into [0, 1)."""
        y = linalg.frac_vector([0] * self.lattice.rank)
        for k, g in zip(t, self.generators):
            y = y + int(k) * g
        return _reduced(y)

    def q(self, t: Sequence[int]) -> Fraction:
        y = self.element(t)
        return Fraction(y @ self.lattice.gram @ y) % 2

    def b(self, t: Sequence[int], u: Sequence[int]) -> Fraction:
        return Fraction(self.element(t) @ self.lattice.gram
                        @ self.element(u)) % 1

    def elements(self) -> List[Coordinates]:
        return list(product(*(range(d) for d in self.invariant_factors)))


def discriminant_group(L: Lattice) -> DiscriminantGroup:
    """Compute the discriminant group of a non-degenerate lattice.

    Args:
        L: The lattice.

    Returns:
        The discriminant group, generators ordered by invariant factor and
        normalized within their cyclic factors.

    Raises:
        ValueError: If `L` is degenerate.
    """
    if L.rank and L.is_degenerate:
        raise ValueError("Degenerate lattice has no finite discriminant group")
    _, D, _, Sinv, Tinv = linalg.smith_normal_form(L.gram)
    keep = [i for i in range(L.rank) if D[i, i] > 1]
    factors = tuple(int(D[i, i]) for i in keep)
    cmap = Sinv[keep] if keep else np.zeros((0, L.rank), dtype=object)
    gens = []
    for row, i in enumerate(keep):
        d = factors[row]
        g = linalg.frac_vector(Tinv[:, i]) / d
        # Least reduced representative among the generators of <g>
        unit, g = min(((k, _reduced(k * g)) for k in range(1, d)
                       if gcd(k, d) == 1), key=lambda c: tuple(c[1]))
        cmap[row] = cmap[row] * pow(unit, -1, d)
        gens.append(g)
    gram = L.gram
    qform = tuple(Fraction(g @ gram @ g) % 2 for g in gens)
    pairing = np.empty((len(gens), len(gens)), dtype=object)
    for i, g in enumerate(gens):
        for j, h in enumerate(gens):
            pairing[i, j] = Fraction(g @ gram @ h) % 1
    return DiscriminantGroup(L, factors, tuple(gens), qform, pairing, cmap)


# Lattice spec grammar
# expr := term ("+" term)*
# term := atom ("(" integer ")")?
# atom := "U" | "E8" | "<" integer ">" | "LK3" | "L2" | "Ln(" integer ")"
#       | integer ["*"] atom

@dataclass(frozen=True)
class SpecTerm:
    count: int
    atom: str
    arg: Optional[int] = None
    scale: int = 1


class _SpecParser:
    """Recursive descent parser over a lattice spec string."""

    NAMES = ("LK3", "Ln(", "L2", "E8", "U")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        err = SyntaxError(f"{message} at position {self.pos}")
        err.offset = self.pos
        err.text = self.text
        return err

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos:self.pos + 1]

    def expect(self, s: str):
        self.skip()
        if not self.text.startswith(s, self.pos):
            raise self.error(f"Expected '{s}'")
        self.pos += len(s)

    def integer(self) -> int:
        self.skip()
        start = self.pos
        if self.peek() in "+-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        token = self.text[start:self.pos]
        if not token.lstrip("+-"):
            self.pos = start
            raise self.error("Expected an integer")
        return int(token)

    def atom(self) -> Tuple[int, str, Optional[int]]:
        self.skip()
        if self.peek().isdigit():
            count = self.integer()
            if count <= 0:
                raise self.error("Repetition count must be positive")
            if self.peek() == "*":
                self.pos += 1
            inner, name, arg = self.atom()
            return count * inner, name, arg
        if self.peek() == "<":
            self.pos += 1
            k = self.integer()
            self.expect(">")
            return 1, "<>", k
        for name in self.NAMES:
            if self.text.startswith(name, self.pos):
                self.pos += len(name)
                if name == "Ln(":
                    n = self.integer()
                    self.expect(")")
                    return 1, "Ln", n
                return 1, name, None
        raise self.error("Unknown lattice atom")

    def term(self) -> SpecTerm:
        count, name, arg = self.atom()
        scale = 1
        if self.peek() == "(":
            self.pos += 1
            scale = self.integer()
            self.expect(")")
        return SpecTerm(count, name, arg, scale)

    def parse(self) -> List[SpecTerm]:
        terms = [self.term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.term())
        self.skip()
        if self.pos != len(self.text):
            raise self.error("Unexpected character")
        return terms


def parse_spec(text: str) -> List[SpecTerm]:
    """Parse a lattice spec into terms.

    Raises:
        SyntaxError: If the text does not follow the grammar; the message
            gives the position.
    """
    return _SpecParser(text).parse()


def print_spec(terms: Sequence[SpecTerm]) -> str:
    """Canonical text of parsed spec terms."""
    out = []
    for t in terms:
        if t.atom == "<>":
            s = f"<{t.arg}>"
        elif t.atom == "Ln":
            s = f"Ln({t.arg})"
        else:
            s = t.atom
        if t.count > 1:
            s = f"{t.count}{s}"
        if t.scale != 1:
            s = f"{s}({t.scale})"
        out.append(s)
    return "+".join(out)


def canonical_spec(text: str) -> str:
    """Reprint a lattice spec in canonical form."""
    return print_spec(parse_spec(text))


def _block_diagonal(blocks: Sequence[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=object)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def _atom_gram(name: str, arg: Optional[int]) -> np.ndarray:
    hyperbolic = linalg.int_matrix([[0, 1], [1, 0]])
    e8 = linalg.int_matrix(presets.E8_GRAM)
    lk3 = _block_diagonal([hyperbolic] * 3 + [-e8] * 2)
    if name == "U":
        return hyperbolic
    if name == "E8":
        return e8
    if name == "<>":
        return linalg.int_matrix([[arg]])
    if name == "LK3":
        return lk3
    if name == "L2":
        return _block_diagonal([lk3, linalg.int_matrix([[-2]])])
    return _block_diagonal([lk3, linalg.int_matrix([[2 - 2 * arg]])])


def from_gram(gram: Sequence, label: str = "") -> Lattice:
    """Build a non-degenerate even lattice from a Gram matrix.

    Raises:
        ValueError: If the form is odd, not symmetric or degenerate.
    """
    L = Lattice(linalg.int_matrix(gram), label)
    if L.is_degenerate:
        raise ValueError("Degenerate form: det(gram) = 0")
    return L


def direct_sum(*lattices: Lattice) -> Lattice:
    """Orthogonal direct sum."""
    return Lattice(_block_diagonal([L.gram for L in lattices]),
                   "+".join(L.label for L in lattices if L.label))


def rescale(L: Lattice, k: int) -> Lattice:
    """The lattice L(k): Gram multiplied by k."""
    return Lattice(k * L.gram, f"{L.label}({k})" if L.label else "")


def make_lattice(spec: str) -> Lattice:
    """Build the lattice described by a spec string.

    Args:
        spec: Text following the lattice spec grammar, e.g.
            "3U+2E8(-1)+<-2>".

    Returns:
        The lattice, labelled with the canonical spec.

    Raises:
        SyntaxError: If `spec` does not follow the grammar.
        ValueError: If the resulting form is odd or degenerate.
    """
    terms = parse_spec(spec)
    blocks = []
    for t in terms:
        g = _atom_gram(t.atom, t.arg) * t.scale
        blocks.extend([g] * t.count)
    gram = _block_diagonal(blocks)
    odd = [i for i in range(gram.shape[0]) if gram[i, i] % 2]
    if odd:
        raise ValueError(f"Odd lattice: diagonal entry {odd[0]} is "
                         f"{gram[odd[0], odd[0]]}")
    return from_gram(gram, print_spec(terms))


def _coords(v: Union[LatVector, Sequence]) -> np.ndarray:
    return v.coords if isinstance(v, (LatVector, QVector)) else \
        np.asarray(v, dtype=object)


def inner(v: LatVector, w: LatVector) -> int:
    """Bilinear form v^T G w.

    Raises:
        ValueError: If the vectors belong to different lattices.
    """
    if not v.lattice.same_form(w.lattice):
        raise ValueError("Lattice mismatch")
    return v.coords @ v.lattice.gram @ w.coords


def norm(v: LatVector) -> int:
    return inner(v, v)


def signature(L: Union[Lattice, Sublattice]) -> Tuple[int, int]:
    """Signature (pos, neg) by exact rational diagonalization."""
    if isinstance(L, Sublattice):
        L = L.lattice
    diag = L.orthogonal_basis[0]
    return (sum(1 for d in diag if d > 0), sum(1 for d in diag if d < 0))


def divisibility(v: Union[LatVector, Sequence], L: Lattice = None) -> int:
    """Positive generator of the ideal (v, L).

    Args:
        v: A lattice vector, or raw coordinates together with `L`.
        L: The lattice when `v` is given by coordinates.

    Raises:
        ValueError: If `v` is zero.
    """
    if isinstance(v, LatVector):
        L = v.lattice
    if not any(_coords(v)):
        raise ValueError("Divisibility of the zero vector")
    d = 0
    for a in L.gram @ linalg.int_vector(_coords(v)):
        d = gcd(d, int(a))
    return d


def sublattice(ambient: Lattice, basis: Sequence) -> Sublattice:
    """Build a sublattice from basis rows in ambient coordinates."""
    return Sublattice(ambient, linalg.int_matrix(basis, ambient.rank))


def orthogonal_complement(S: Sublattice) -> Sublattice:
    """Saturated basis of {x : (x, s) = 0 for s in S}.

    Raises:
        ValueError: If the induced form on the complement is degenerate.
    """
    K = linalg.kernel(S.pairing_rows)
    comp = Sublattice(S.ambient, linalg.int_matrix(K.T, S.ambient.rank))
    if comp.rank and comp.is_degenerate:
        raise ValueError("Degenerate orthogonal complement")
    return comp


def is_primitive(S: Sublattice) -> bool:
    """Check that ambient/S is torsion free (elementary divisors all 1)."""
    return all(d == 1 for d in linalg.elementary_divisors(S.basis))


def saturate(S: Sublattice) -> Sublattice:
    """Primitive closure of `S`, same rational span."""
    if S.rank == 0:
        return S
    return Sublattice(S.ambient, linalg.row_saturation(S.basis))


def saturation_index(S: Sublattice) -> int:
    """Index of `S` in its saturation."""
    return prod(linalg.elementary_divisors(S.basis))


def project(v: Union[LatVector, Sequence], S: Sublattice
            ) -> Tuple[QVector, QVector]:
    """Orthogonal projections of an ambient vector onto S_Q and S_Q-perp.

    Raises:
        ValueError: If `S` is degenerate.
    """
    if S.rank and S.is_degenerate:
        raise ValueError("Degenerate sublattice")
    x = linalg.frac_vector(_coords(v))
    if S.rank == 0:
        return (QVector(0 * x, S.ambient), QVector(x, S.ambient))
    a = linalg.solve(S.gram, S.pairing_rows @ x)
    vs = a @ S.basis
    return QVector(vs, S.ambient), QVector(x - vs, S.ambient)


@dataclass(frozen=True, eq=False)
class GlueData:
    """Glue group H_L = L/(S + K) inside A_S + A_K.

    Attributes:
        S: Primitive sublattice.
        K: Its orthogonal complement.
        A_S: Discriminant group of S.
        A_K: Discriminant group of K.
        pairs: Elements (h_S, h_K) of H_L, sorted.
        representatives: Ambient lattice vector for each element.
        generators: Elements generating H_L.
    """
    S: Sublattice
    K: Sublattice
    A_S: DiscriminantGroup
    A_K: DiscriminantGroup
    pairs: Tuple[Tuple[Coordinates, Coordinates], ...]
    representatives: Dict[Tuple[Coordinates, Coordinates], np.ndarray]
    generators: Tuple[Tuple[Coordinates, Coordinates], ...]

    @property
    def order(self) -> int:
        return len(self.pairs)

    @cached_property
    def gamma(self) -> Dict[Coordinates, Coordinates]:
        """The isomorphism H_S -> H_K."""
        return dict(self.pairs)

    @property
    def H_S(self) -> List[Coordinates]:
        return sorted(self.gamma)

    @property
    def H_K(self) -> List[Coordinates]:
        return sorted(self.gamma.values())

    def is_anti_isometry(self) -> bool:
        return all((self.A_K.q(hk) + self.A_S.q(hs)) % 2 == 0
                   for hs, hk in self.pairs)

    def order_identity(self) -> bool:
        """|A_S| |A_K| = |A_L| |H|^2."""
        A_L = self.S.ambient.discriminant
        return self.A_S.order * self.A_K.order == A_L.order * self.order ** 2

    @cached_property
    def change_of_basis_inverse(self) -> np.ndarray:
        """Inverse of the matrix whose columns are the S and K bases."""
        C = np.vstack([self.S.basis, self.K.basis]).T
        return linalg.rational_inverse(C)


def glue_classes(S: Sublattice, A_S: DiscriminantGroup,
                 x: Sequence) -> Coordinates:
    """Class of the projection of an ambient vector to S in A_S."""
    return A_S.coordinates_of_pairing(S.pairing_rows @ linalg.int_vector(x))


def glue(S: Sublattice) -> GlueData:
    """Compute the glue data of a primitive non-degenerate sublattice.

    Args:
        S: Primitive sublattice of its ambient lattice.

    Returns:
        The glue group with the anti-isometry gamma = p_K o p_S^-1.

    Raises:
        ValueError: If `S` is not primitive or a form is degenerate.
    """
    if not is_primitive(S):
        raise ValueError("Glue needs a primitive sublattice")
    if S.rank and S.is_degenerate:
        raise ValueError("Degenerate sublattice")
    K = orthogonal_complement(S)
    A_S = S.lattice.discriminant
    A_K = K.lattice.discriminant
    n = S.ambient.rank

    zero = (A_S.zero, A_K.zero)
    reps = {zero: linalg.int_vector([0] * n)}
    gens = []
    for j in range(n):
        u = presets.unit(j, n)
        g = (glue_classes(S, A_S, u), glue_classes(K, A_K, u))
        if g in reps:
            continue
        gens.append(g)
        # Old subgroup plus multiples of g
        frontier = list(reps.items())
        while frontier:
            nxt = []
            for (hs, hk), x in frontier:
                h = (A_S.add(hs, g[0]), A_K.add(hk, g[1]))
                if h not in reps:
                    reps[h] = x + u
                    nxt.append((h, reps[h]))
            frontier = nxt
    pairs = tuple(sorted(reps))
    return GlueData(S, K, A_S, A_K, pairs, reps, tuple(gens))


if __name__ == "__main__":
    cli = argparse.ArgumentParser()
    cli.add_argument("spec", type=str, help="Lattice spec, e.g. '3U+<-2>'")
    args = cli.parse_args()

    L = make_lattice(args.spec)
    A = discriminant_group(L)
    print(json.dumps({"label": L.label, "rank": L.rank, "det": L.det,
                      "signature": signature(L),
                      "invariant_factors": A.invariant_factors}, indent=2))
