#!/usr/bin/env python3
"""Double description of exact rational polyhedral cones."""

from typing import FrozenSet, List, Sequence, Tuple

from K3N_LAT import linalg

Ray = Tuple[int, ...]


def _dot(row: Sequence, ray: Sequence) -> int:
    return sum(a * b for a, b in zip(row, ray))


def _primitive(v: Sequence) -> Ray:
    return tuple(int(x) for x in linalg.primitive_vector(list(v)))


def zero_set(rows: Sequence[Sequence], ray: Sequence) -> FrozenSet[int]:
    """Indices of the inequalities that are tight at `ray`."""
    return frozenset(i for i, row in enumerate(rows) if _dot(row, ray) == 0)


def add_halfspace(rows: Sequence[Sequence], rays: Sequence[Ray],
                  a: Sequence) -> List[Ray]:
    """Intersect a pointed cone with the half-space {x : a.x >= 0}.

    Args:
        rows: Inequalities (a_i . x >= 0) of the current cone.
        rays: Extreme rays of the current cone.
        a: The new inequality.

    Returns:
        Extreme rays of the intersection, as primitive integer tuples in
        lexicographic order.
    """
    dim = len(a)
    values = [_dot(a, r) for r in rays]
    positive = [r for r, v in zip(rays, values) if v > 0]
    negative = [r for r, v in zip(rays, values) if v < 0]
    result = {r for r, v in zip(rays, values) if v >= 0}
    if not negative:
        return sorted(result)

    zsets = {r: zero_set(rows, r) for r in rays}
    for p in positive:
        for m in negative:
            common = zsets[p] & zsets[m]
            if len(common) < dim - 2:
                continue
            # Adjacent iff no third ray is tight on the common face
            if any(common <= zsets[r] for r in rays if r != p and r != m):
                continue
            new = [_dot(a, p) * x - _dot(a, m) * y for x, y in zip(m, p)]
            result.add(_primitive(new))
    return sorted(result)


def extreme_rays(rows: Sequence[Sequence]) -> List[Ray]:
    """Extreme rays of the cone {x : rows . x >= 0}.

    Args:
        rows: Integer inequalities, at least `dim` of them and of full rank.

    Returns:
        Primitive integer generators of the extreme rays, sorted.

    Raises:
        ValueError: If the cone is not pointed (rows not of full rank).
    """
    rows = [tuple(int(x) for x in row) for row in rows]
    if not rows:
        raise ValueError("Cone is not pointed: no inequalities")
    dim = len(rows[0])

    # Greedy choice of a basis among the rows
    chosen = []
    for i, row in enumerate(rows):
        trial = chosen + [i]
        if linalg.rational_rank(linalg.int_matrix([rows[j] for j in trial])) \
                == len(trial):
            chosen = trial
        if len(chosen) == dim:
            break
    if len(chosen) < dim:
        raise ValueError("Cone is not pointed: inequalities of rank "
                         f"{len(chosen)} < {dim}")

    inverse = linalg.rational_inverse(
        linalg.int_matrix([rows[j] for j in chosen]))
    rays = sorted(_primitive(inverse[:, k]) for k in range(dim))
    used = [rows[j] for j in chosen]
    for i, row in enumerate(rows):
        if i in chosen:
            continue
        rays = add_halfspace(used, rays, row)
        used.append(row)
        if not rays:
            break
    return rays


def cone_facets(rays: Sequence[Sequence]) -> List[Ray]:
    """Facet inequalities of the cone generated by full-rank `rays`."""
    return extreme_rays(rays)


def facet_indices(rows: Sequence[Sequence], rays: Sequence[Ray]) -> List[int]:
    """Indices of the rows defining facets of the cone with these rays.

    Rows that are positive multiples of an earlier facet row are skipped.
    """
    if not rays:
        return []
    dim = len(rays[0])
    seen = set()
    out = []
    for i, row in enumerate(rows):
        tight = [r for r in rays if _dot(row, r) == 0]
        if len(tight) < dim - 1:
            continue
        if tight and linalg.rational_rank(linalg.int_matrix(tight)) != dim - 1:
            continue
        key = _primitive(row)
        if key in seen:
            continue
        seen.add(key)
        out.append(i)
    return out


def sign_on(rays: Sequence[Ray], a: Sequence) -> int:
    """Sign of the linear form `a` on a cone given by its rays.

    Returns:
        1 or -1 if the form has that sign on the interior, 0 if the form
        takes both signs (its hyperplane cuts the interior).
    """
    values = [_dot(a, r) for r in rays]
    if all(v >= 0 for v in values) and any(v > 0 for v in values):
        return 1
    if all(v <= 0 for v in values) and any(v < 0 for v in values):
        return -1
    return 0


def ray_sum(rays: Sequence[Ray]) -> Ray:
    """Sum of the rays: an interior point of a full-dimensional cone."""
    return tuple(sum(col) for col in zip(*rays))
