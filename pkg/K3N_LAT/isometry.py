#!/usr/bin/env python3
"""Isometries: discriminant action, spinor norm, monodromy and gluing."""

import argparse
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from K3N_LAT import linalg
from K3N_LAT.lattice import (Coordinates, DiscriminantGroup, GlueData,
                             LatVector, Lattice, Sublattice, glue,
                             is_primitive, make_lattice, signature)


@dataclass(frozen=True, eq=False)
class Isometry:
    """Isometry of a lattice, acting on column coordinates.

    Raises:
        ValueError: If the matrix has the wrong size or does not preserve
            the form.
    """
    matrix: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        if not is_isometry(self.matrix, self.lattice):
            raise ValueError("Matrix does not preserve the Gram form")

    def __matmul__(self, other: "Isometry") -> "Isometry":
        if not self.lattice.same_form(other.lattice):
            raise ValueError("Lattice mismatch")
        return Isometry(self.matrix @ other.matrix, self.lattice)

    def __neg__(self) -> "Isometry":
        return Isometry(-self.matrix, self.lattice)

    def __eq__(self, other):
        return (isinstance(other, Isometry)
                and self.lattice.same_form(other.lattice)
                and (self.matrix == other.matrix).all())

    def __hash__(self):
        return hash(tuple(int(x) for x in self.matrix.flat))

    def inverse(self) -> "Isometry":
        return Isometry(linalg.to_int(linalg.rational_inverse(self.matrix)),
                        self.lattice)

    def apply(self, v: Sequence) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=object)

    def is_identity(self) -> bool:
        return (self.matrix == linalg.identity(self.lattice.rank)).all()

    def tolist(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.matrix]


def identity(L: Lattice) -> Isometry:
    return Isometry(linalg.identity(L.rank), L)


def is_isometry(m: np.ndarray, L: Lattice) -> bool:
    """Check m^T G m = G.

    Raises:
        ValueError: If `m` is not square of size rank(L).
    """
    m = np.asarray(m, dtype=object)
    if m.shape != (L.rank, L.rank):
        raise ValueError(f"Matrix of shape {m.shape} on a lattice of rank "
                         f"{L.rank}")
    return bool((m.T @ L.gram @ m == L.gram).all())


def reflection(delta: LatVector) -> Isometry:
    """Reflection x -> x - 2 (x, delta) / (delta, delta) delta.

    Raises:
        ValueError: If `delta` is isotropic or the reflection is not
            integral on the lattice.
    """
    L = delta.lattice
    k = delta.coords @ L.gram @ delta.coords
    if k == 0:
        raise ValueError("Reflection in an isotropic vector")
    row = L.gram @ delta.coords
    m = linalg.frac_matrix(linalg.identity(L.rank))
    for i in range(L.rank):
        for j in range(L.rank):
            m[i, j] -= Fraction(2 * delta.coords[i] * row[j], k)
    if not linalg.is_integral(m):
        raise ValueError(f"Reflection in a vector of norm {k} is not "
                         "integral")
    return Isometry(linalg.to_int(m), L)


def _eigenlattice(sigma: Isometry, eigenvalue: int) -> Sublattice:
    n = sigma.lattice.rank
    K = linalg.kernel(sigma.matrix - eigenvalue * linalg.identity(n))
    return Sublattice(sigma.lattice, linalg.int_matrix(K.T, n))


def fixed_lattice(sigma: Isometry) -> Sublattice:
    """Primitive sublattice L ∩ ker(sigma - id)."""
    return _eigenlattice(sigma, 1)


def coinvariant_lattice(sigma: Isometry) -> Sublattice:
    """Primitive sublattice L ∩ ker(sigma + id)."""
    return _eigenlattice(sigma, -1)


@dataclass(frozen=True, eq=False)
class DiscriminantAction:
    """Induced action on a discriminant group.

    Attributes:
        group: The discriminant group.
        matrix: Column j holds the residues of the image of generator j.
    """
    group: DiscriminantGroup
    matrix: np.ndarray

    def apply(self, t: Sequence[int]) -> Coordinates:
        if not self.group.length:
            return ()
        return self.group.reduce(self.matrix @ linalg.int_vector(t))

    def is_scalar(self, c: int) -> bool:
        return all(self.apply(t) == self.group.reduce([c * x for x in t])
                   for t in _unit_elements(self.group))

    def is_identity(self) -> bool:
        return self.is_scalar(1)

    def preserves_form(self) -> bool:
        gens = _unit_elements(self.group)
        A = self.group
        return all(A.q(self.apply(t)) == A.q(t) for t in gens) and \
            all(A.b(self.apply(t), self.apply(u)) == A.b(t, u)
                for t, u in combinations(gens, 2))


def _unit_elements(A: DiscriminantGroup) -> List[Coordinates]:
    return [tuple(1 if i == j else 0 for i in range(A.length))
            for j in range(A.length)]


def discriminant_action(sigma: Isometry) -> DiscriminantAction:
    """Action of `sigma` on the canonical discriminant generators."""
    A = sigma.lattice.discriminant
    cols = [A.coordinates(sigma.matrix @ g) for g in A.generators]
    matrix = linalg.int_matrix(list(zip(*cols)), len(cols)) if cols \
        else np.zeros((0, 0), dtype=object)
    return DiscriminantAction(A, matrix)


def is_stable(sigma: Isometry) -> bool:
    """Check that `sigma` acts trivially on the discriminant group."""
    return discriminant_action(sigma).is_identity()


def _spinor_by_reflections(sigma: Isometry) -> int:
    """Spinor norm from a Cartan-Dieudonne factorization.

    The orthogonal basis vectors are moved back one at a time; each step
    multiplies by -1 per reflection vector of positive norm.
    """
    L = sigma.lattice
    G = linalg.frac_matrix(L.gram)
    _, P = L.orthogonal_basis
    cur = linalg.frac_matrix(sigma.matrix)
    sign = 1

    def reflect(cur, d):
        k = d @ G @ d
        return cur - np.outer(d, (2 / k) * (d @ G @ cur))

    for i in range(L.rank):
        v = P[:, i]
        w = cur @ v
        d = w - v
        if not any(d):
            continue
        if d @ G @ d != 0:
            cur = reflect(cur, d)
            sign *= -1 if d @ G @ d > 0 else 1
        else:
            # Isotropic difference: reflect in w + v, then in v
            s = w + v
            cur = reflect(reflect(cur, s), v)
            sign *= (-1 if s @ G @ s > 0 else 1) * (-1 if v @ G @ v > 0 else 1)
    return sign


def _spinor_by_orientation(sigma: Isometry) -> int:
    """Sign of the determinant of sigma projected onto a positive subspace."""
    L = sigma.lattice
    G = linalg.frac_matrix(L.gram)
    diag, P = L.orthogonal_basis
    pos = [i for i, d in enumerate(diag) if d > 0]
    if not pos:
        return 1
    images = [linalg.frac_matrix(sigma.matrix) @ P[:, i] for i in pos]
    A = np.empty((len(pos), len(pos)), dtype=object)
    for a, j in enumerate(pos):
        for b, y in enumerate(images):
            A[a, b] = (y @ G @ P[:, j]) / diag[j]
    return 1 if linalg.determinant(A) > 0 else -1


def real_spinor_norm(sigma: Isometry, method: str = "reflections") -> int:
    """Real spinor norm, +1 exactly on isometries preserving the
    orientation of a maximal positive definite subspace.

    Args:
        sigma: The isometry.
        method: 'reflections' for a Cartan-Dieudonne factorization,
            'orientation' for the positive-subspace determinant.

    Raises:
        ValueError: If the method is unknown or the form is degenerate.
    """
    if sigma.lattice.is_degenerate:
        raise ValueError("Spinor norm on a degenerate lattice")
    if method == "reflections":
        return _spinor_by_reflections(sigma)
    elif method == "orientation":
        return _spinor_by_orientation(sigma)
    else:
        raise ValueError(f"Unknown spinor norm method: {method}")


def in_O_plus(sigma: Isometry) -> bool:
    return _spinor_by_orientation(sigma) == 1


def check_Ln_shape(L: Lattice, n: int) -> None:
    """Check rank, signature and discriminant form of L_n.

    Raises:
        ValueError: If `L` is not shaped like L_n.
    """
    if n < 2:
        raise ValueError(f"L_n needs n >= 2, got {n}")
    if L.rank != 23 or signature(L) != (3, 20):
        raise ValueError(f"Lattice of rank {L.rank} is not L_{n}-shaped")
    A = L.discriminant
    if A.invariant_factors != (2 * n - 2,):
        raise ValueError(f"Discriminant group {A.invariant_factors} is not "
                         f"that of L_{n}")


def in_monodromy(sigma: Isometry, n: int) -> bool:
    """Membership in Mon^2(L_n): O+ and discriminant action +-1.

    Raises:
        ValueError: If the lattice is not L_n-shaped.
    """
    check_Ln_shape(sigma.lattice, n)
    action = discriminant_action(sigma)
    if not (action.is_scalar(1) or action.is_scalar(-1)):
        return False
    return in_O_plus(sigma)


def monodromy_is_O_plus(n: int) -> bool:
    """Check that every isometry of A_{L_n} is +-1, so Mon^2 = O+."""
    order = 2 * n - 2
    # q(u g) = u^2 q(g) with q(g) = -1/order mod 2
    units = [u for u in range(order)
             if (u * u - 1) % (2 * order) == 0 and gcd(u, order) == 1]
    return all(u in (1 % order, (order - 1) % order) for u in units)


def involution_from_sublattice(M: Sublattice) -> Optional[Isometry]:
    """The map +1 on M_Q and -1 on its complement, when integral.

    Returns:
        The involution, or None when it is not integral on the ambient
        lattice.

    Raises:
        ValueError: If `M` is not primitive or is degenerate.
    """
    if not is_primitive(M):
        raise ValueError("Sublattice is not primitive")
    L = M.ambient
    if M.rank == 0:
        return Isometry(-linalg.identity(L.rank), L)
    if M.is_degenerate:
        raise ValueError("Degenerate sublattice")
    # iota(x) = 2 p_M(x) - x
    proj = M.basis.T @ linalg.rational_inverse(M.gram) @ M.pairing_rows
    m = 2 * proj - linalg.frac_matrix(linalg.identity(L.rank))
    if not linalg.is_integral(m):
        return None
    return Isometry(linalg.to_int(m), L)


@dataclass
class Admissibility:
    """Admissibility of an invariant sublattice, with the failed clause."""
    hyperbolic: bool
    involution: Optional[Isometry] = None
    monodromy: bool = False
    failed: Optional[str] = None

    def __bool__(self):
        return self.failed is None

    def report(self) -> Dict:
        return {"admissible": bool(self), "hyperbolic": self.hyperbolic,
                "involution_integral": self.involution is not None,
                "in_monodromy": self.monodromy, "failed": self.failed}


def is_admissible(M: Sublattice, n: int) -> Admissibility:
    """Check that M is hyperbolic and that iota_M exists in Mon^2(L_n).

    Raises:
        ValueError: If `M` is not primitive.
    """
    if not is_primitive(M):
        raise ValueError("Sublattice is not primitive")
    hyperbolic = (M.rank > 0 and not M.is_degenerate
                  and signature(M) == (1, M.rank - 1))
    if not hyperbolic:
        return Admissibility(False, failed="hyperbolic")
    iota = involution_from_sublattice(M)
    if iota is None:
        return Admissibility(True, failed="involution")
    if not in_monodromy(iota, n):
        return Admissibility(True, iota, False, failed="monodromy")
    return Admissibility(True, iota, True)


def restrict(sigma: Isometry, S: Sublattice) -> Isometry:
    """Isometry of S induced by an ambient isometry preserving S.

    Raises:
        ValueError: If `sigma` does not preserve S.
    """
    cols = []
    for b in S.basis:
        a = S.coordinates(sigma.matrix @ b)
        if a is None or not linalg.is_integral(a):
            raise ValueError("Isometry does not preserve the sublattice")
        cols.append(linalg.to_int(a))
    m = linalg.int_matrix(list(zip(*cols)), S.rank) if cols \
        else np.zeros((0, 0), dtype=object)
    return Isometry(m, S.lattice)


def _check_complementary(phi: Isometry, psi: Isometry, data: GlueData):
    if not (phi.lattice.same_form(data.S.lattice)
            and psi.lattice.same_form(data.K.lattice)):
        raise ValueError("Inputs are not complementary to the glue data")


def glue_obstruction(phi: Isometry, psi: Isometry, data: GlueData
                     ) -> Optional[Coordinates]:
    """First h in H_S with gamma(phi h) != psi(gamma h), if any."""
    _check_complementary(phi, psi, data)
    act_s = discriminant_action(phi)
    act_k = discriminant_action(psi)
    for hs in data.H_S:
        image = act_s.apply(hs)
        if image not in data.gamma or \
                data.gamma[image] != act_k.apply(data.gamma[hs]):
            return hs
    return None


def extend_isometry(phi: Isometry, psi: Isometry, data: GlueData
                    ) -> Optional[Isometry]:
    """Glue isometries of S and K to an isometry of the ambient lattice.

    Args:
        phi: Isometry of S (coordinates in the basis of S).
        psi: Isometry of K = S-perp (coordinates in the basis of K).
        data: Glue data of S.

    Returns:
        The isometry phi + psi of L, or None when the glue compatibility
        fails.

    Raises:
        ValueError: If the inputs do not act on S and K.
    """
    if glue_obstruction(phi, psi, data) is not None:
        return None
    r, k = data.S.rank, data.K.rank
    block = np.zeros((r + k, r + k), dtype=object)
    block[:r, :r] = phi.matrix
    block[r:, r:] = psi.matrix
    C = np.vstack([data.S.basis, data.K.basis]).T
    m = C @ block @ data.change_of_basis_inverse
    if not linalg.is_integral(m):
        return None
    return Isometry(linalg.to_int(m), data.S.ambient)


def extend_stable(sigma: Isometry, S: Sublattice) -> Isometry:
    """Extend a stable isometry of S by the identity on S-perp.

    Raises:
        ValueError: If `sigma` is not stable or S is not primitive.
    """
    if not is_stable(sigma):
        raise ValueError("Isometry is not stable")
    data = glue(S)
    ext = extend_isometry(sigma, identity(data.K.lattice), data)
    if ext is None:
        raise ValueError("Stable isometry failed to extend")
    return ext


def gamma_representatives(delta: LatVector, iota: Isometry
                          ) -> Tuple[LatVector, LatVector]:
    """Integral representatives delta + iota(delta), delta - iota(delta).

    Raises:
        ValueError: If `iota` is not an involution.
    """
    if not (iota @ iota).is_identity():
        raise ValueError("Isometry is not an involution")
    image = iota.apply(delta.coords)
    return (LatVector(delta.coords + image, delta.lattice),
            LatVector(delta.coords - image, delta.lattice))


@dataclass
class Verdict:
    """Three-valued membership of an M-isometry in Gamma(M).

    Attributes:
        verdict: 'member', 'non_member' or 'undecided' for the full group.
        generic_verdict: The same question with psi restricted to +-id.
        certificate: Evidence for the verdicts.
    """
    verdict: str
    generic_verdict: str
    certificate: Dict = field(default_factory=dict)


def _orthogonal_part(A: DiscriminantGroup, H: Sequence[Coordinates]
                     ) -> List[Coordinates]:
    return [x for x in A.elements() if all(A.b(x, h) == 0 for h in H)]


def _norm_two_vector(K: Sublattice) -> Optional[np.ndarray]:
    """A vector of norm 2 in K among small basis and ambient combinations."""
    G = K.ambient.gram
    n = K.ambient.rank
    pool = list(K.basis)
    for i, j in combinations(range(K.rank), 2):
        pool.extend([K.basis[i] + K.basis[j], K.basis[i] - K.basis[j]])
    for i, j in combinations(range(n), 2):
        for s in (1, -1):
            v = linalg.int_vector([0] * n)
            v[i], v[j] = 1, s
            pool.append(v)
    for v in pool:
        if v @ G @ v == 2 and K.contains(v):
            return v
    return None


def _surjectivity_certificate(phi: Isometry, data: GlueData, n: int
                              ) -> Optional[Dict]:
    """Existence of psi with phi + psi in Mon^2 via O(K) -> O(A_K).

    Needs K even indefinite with rank(K) >= l(A_K) + 2, the induced map on
    H_K to extend to A_K, a stable reflection of spinor norm -1 on K and
    Mon^2(L_n) = O+(L_n).
    """
    if not monodromy_is_O_plus(n):
        return None
    K, A_K = data.K, data.A_K
    pos, neg = signature(K)
    if not (pos and neg and K.rank >= A_K.length + 2):
        return None
    H_K = data.H_K
    if len(H_K) != A_K.order:
        perp = _orthogonal_part(A_K, H_K)
        if set(perp) & set(H_K) != {A_K.zero} or \
                len(perp) * len(H_K) != A_K.order:
            return None
    v = _norm_two_vector(K)
    if v is None:
        return None
    return {"kind": "surjectivity", "rank": K.rank,
            "length": A_K.length, "signature": [pos, neg],
            "spinor_fixer": [int(x) for x in v]}


def gamma_membership(phi: Isometry, M: Sublattice, n: int,
                     candidates: Sequence[np.ndarray] = (),
                     data: GlueData = None) -> Verdict:
    """Decide whether an isometry of M extends to an element of Mon^2.

    Args:
        phi: Isometry of M in the basis of M.
        M: Primitive sublattice of L_n.
        n: The K3^[n] parameter.
        candidates: Ambient isometries whose restriction to M-perp is
            tried as psi.
        data: Glue data of M, computed when omitted.

    Returns:
        The verdict for Gamma(M) and for the restriction psi = +-id.
    """
    data = data or glue(M)
    act = discriminant_action(phi)
    for h in data.H_S:
        if act.apply(h) not in data.gamma:
            cert = {"kind": "glue_subgroup", "element": list(h),
                    "image": list(act.apply(h))}
            return Verdict("non_member", "non_member", cert)

    K_lat = data.K.lattice
    trials = [("id", identity(K_lat)), ("-id", -identity(K_lat))]
    for i, c in enumerate(candidates):
        sigma = Isometry(linalg.int_matrix(c), M.ambient)
        try:
            trials.append((f"candidate_{i}", restrict(sigma, data.K)))
        except ValueError:
            continue

    tried = []
    member = None
    for label, psi in trials:
        entry = {"psi": label}
        obstruction = glue_obstruction(phi, psi, data)
        ext = extend_isometry(phi, psi, data) if obstruction is None \
            else None
        if ext is None:
            entry["compatible"] = False
            if obstruction is not None:
                entry["obstruction"] = list(obstruction)
        else:
            entry["compatible"] = True
            entry["monodromy"] = in_monodromy(ext, n)
            entry["minus_monodromy"] = in_monodromy(-ext, n)
            if entry["monodromy"] and member is None:
                member = (label, ext)
        tried.append(entry)

    generic = [t for t in tried if t["psi"] in ("id", "-id")]
    if any(t.get("monodromy") for t in generic):
        generic_verdict = "member"
    else:
        generic_verdict = "non_member"
    cert = {"tried": tried}
    if member is not None:
        cert.update({"kind": "extension", "psi": member[0],
                     "matrix": member[1].tolist()})
        return Verdict("member", generic_verdict, cert)
    surj = _surjectivity_certificate(phi, data, n)
    if surj is not None:
        cert.update(surj)
        return Verdict("member", generic_verdict, cert)
    if all(not t["compatible"] for t in generic):
        cert["kind"] = "discriminant"
    return Verdict("undecided", generic_verdict, cert)


if __name__ == "__main__":
    cli = argparse.ArgumentParser()
    cli.add_argument("lattice", type=str, help="Lattice spec, e.g. 'L2'")
    cli.add_argument("matrix", type=str, help="JSON integer matrix")
    cli.add_argument("--n", type=int, default=2, help="K3^[n] parameter")
    args = cli.parse_args()

    L = make_lattice(args.lattice)
    sigma = Isometry(linalg.int_matrix(json.loads(args.matrix)), L)
    print(json.dumps({"stable": is_stable(sigma),
                      "spinor_norm": real_spinor_norm(sigma),
                      "in_monodromy": in_monodromy(sigma, args.n)}, indent=2))
