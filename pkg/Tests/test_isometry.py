"""Tests the isometry.py functions"""

import numpy as np
import pytest
from K3N_LAT import isometry, linalg
from K3N_LAT.isometry import Isometry, identity, reflection
from K3N_LAT.lattice import glue, make_lattice, orthogonal_complement, \
    sublattice
from K3N_LAT.presets import PRESETS, U2_SWAP

from fixture import u


def test_isometry_check(L2):
    """Test that non-isometries and wrong shapes are rejected"""
    m = linalg.identity(23)
    m[0, 0] = 2
    with pytest.raises(ValueError):
        Isometry(m, L2)
    with pytest.raises(ValueError):
        isometry.is_isometry(linalg.identity(3), L2)


def test_isometry_algebra():
    """Test composition, inverse and negation"""
    U = make_lattice("U")
    swap = Isometry(linalg.int_matrix([[0, 1], [1, 0]]), U)
    assert (swap @ swap).is_identity()
    assert swap.inverse() == swap
    assert (-swap) @ (-swap) == identity(U)
    with pytest.raises(ValueError):
        swap @ identity(make_lattice("<2>+<-2>"))


def test_reflection_root(L2):
    """Test the reflection in a (-2)-class"""
    r = reflection(L2.vector(u(22)))
    assert list(r.apply(u(22))) == list(-u(22))
    assert list(r.apply(u(0))) == list(u(0))
    assert isometry.fixed_lattice(r).rank == 22
    assert isometry.coinvariant_lattice(r).rank == 1


@pytest.mark.parametrize("indices", [[0], [6, 22], [0, 0, 1]])
def test_reflection_invalid(indices, L2):
    """Test that isotropic and non-integral reflections are rejected"""
    with pytest.raises(ValueError):
        reflection(L2.vector(u(*indices)))


def test_reflection_norm_four_divisibility_two():
    """Test that a (-4)-class of divisibility 2 reflects integrally"""
    L = make_lattice("U+<-4>")
    r = reflection(L.vector([0, 0, 1]))
    assert r.tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, -1]]


@pytest.mark.parametrize("param", [
    {"in": [22], "out": 1},
    {"in": [6], "out": 1},
    {"in": [0, 1], "out": -1},
    {"in": [2, 3], "out": -1},
])
def test_spinor_norm_of_reflections(param, L2):
    """Test that reflections in positive classes have spinor norm -1"""
    r = reflection(L2.vector(u(*param["in"])))
    assert isometry.real_spinor_norm(r) == param["out"]
    assert isometry.real_spinor_norm(r, "orientation") == param["out"]
    assert isometry.in_O_plus(r) == (param["out"] == 1)


def test_spinor_norm_minus_identity():
    """Test that -id reverses the orientation of three positive directions"""
    L = make_lattice("L2")
    assert isometry.real_spinor_norm(-identity(L)) == -1
    U2 = make_lattice("2U")
    assert isometry.real_spinor_norm(-identity(U2)) == 1


def test_spinor_norm_unknown_method(L2):
    """Test that an unknown spinor norm method is rejected"""
    with pytest.raises(ValueError):
        isometry.real_spinor_norm(identity(L2), "determinant")


def test_discriminant_action_minus_identity():
    """Test the discriminant action of -id on Ln(3)"""
    L = make_lattice("Ln(3)")
    action = isometry.discriminant_action(-identity(L))
    assert action.is_scalar(-1)
    assert not action.is_identity()
    assert action.preserves_form()
    assert not isometry.is_stable(-identity(L))


def test_discriminant_action_l2(L2):
    """Test that every isometry of L2 acts as +-1 on Z/2"""
    action = isometry.discriminant_action(-identity(L2))
    assert action.is_identity()
    assert isometry.is_stable(reflection(L2.vector(u(0, 1))))


def test_check_ln_shape():
    """Test the L_n shape check"""
    isometry.check_Ln_shape(make_lattice("L2"), 2)
    isometry.check_Ln_shape(make_lattice("Ln(5)"), 5)
    with pytest.raises(ValueError):
        isometry.check_Ln_shape(make_lattice("LK3"), 2)
    with pytest.raises(ValueError):
        isometry.check_Ln_shape(make_lattice("Ln(3)"), 2)
    with pytest.raises(ValueError):
        isometry.check_Ln_shape(make_lattice("L2"), 1)


@pytest.mark.parametrize("param", [
    {"in": [22], "out": True},
    {"in": [0, 1], "out": False},
])
def test_in_monodromy(param, L2):
    """Test monodromy membership of reflections on L2"""
    r = reflection(L2.vector(u(*param["in"])))
    assert isometry.in_monodromy(r, 2) == param["out"]
    assert isometry.in_monodromy(identity(L2), 2)


def test_in_monodromy_minus_identity():
    """Test that -id is not a monodromy operator"""
    L = make_lattice("Ln(3)")
    assert not isometry.in_monodromy(-identity(L), 3)


@pytest.mark.parametrize("param", [
    {"in": 2, "out": True},
    {"in": 3, "out": True},
    {"in": 4, "out": True},
    {"in": 9, "out": True},
    {"in": 7, "out": False},
])
def test_monodromy_is_o_plus(param):
    """Test when every isometry of the discriminant form is +-1"""
    assert isometry.monodromy_is_O_plus(param["in"]) == param["out"]


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_admissible(name, request):
    """Test that the preset sublattices are admissible"""
    M = request.getfixturevalue({"ex-comp": "M_comp",
                                 "ex-nonsep": "M_nonsep",
                                 "ex-four": "M_four"}[name])
    adm = isometry.is_admissible(M, 2)
    assert adm
    assert adm.report()["failed"] is None
    iota = adm.involution
    assert (iota @ iota).is_identity()
    assert isometry.fixed_lattice(iota).rank == M.rank


def test_not_hyperbolic(L2):
    """Test that a negative definite sublattice fails the hyperbolic
    clause"""
    adm = isometry.is_admissible(sublattice(L2, [u(22)]), 2)
    assert not adm
    assert adm.failed == "hyperbolic"


def test_involution_not_integral(L2):
    """Test that <4> spanned by e1 + 2f1 has no integral involution"""
    M = sublattice(L2, [u(0, 1, 1)])
    assert isometry.involution_from_sublattice(M) is None
    assert isometry.is_admissible(M, 2).failed == "involution"


def test_not_primitive(L2):
    """Test that admissibility needs a primitive sublattice"""
    with pytest.raises(ValueError):
        isometry.is_admissible(sublattice(L2, [2 * u(0, 1)]), 2)


def test_restrict(L2, M_comp):
    """Test that r_e restricts to diag(1, -1) on <h, e>"""
    r = reflection(L2.vector(u(22)))
    phi = isometry.restrict(r, M_comp)
    assert phi.tolist() == [[1, 0], [0, -1]]
    with pytest.raises(ValueError):
        isometry.restrict(reflection(L2.vector(u(2, 3))),
                          sublattice(L2, [u(2)]))


def test_extend_isometry(L2, M_comp):
    """Test that diag(1, -1) + id glues to the reflection in e"""
    data = glue(M_comp)
    phi = Isometry(linalg.int_matrix([[1, 0], [0, -1]]), M_comp.lattice)
    ext = isometry.extend_isometry(phi, identity(data.K.lattice), data)
    assert ext == reflection(L2.vector(u(22)))
    assert isometry.glue_obstruction(phi, identity(data.K.lattice),
                                     data) is None


def test_extend_isometry_mismatch(M_comp, M_four):
    """Test that extend_isometry() rejects non-complementary inputs"""
    data = glue(M_comp)
    with pytest.raises(ValueError):
        isometry.extend_isometry(identity(M_four.lattice),
                                 identity(data.K.lattice), data)


def test_extend_stable(L2, M_four):
    """Test that the identity of M extends to the identity of L2"""
    ext = isometry.extend_stable(identity(M_four.lattice), M_four)
    assert ext == identity(L2)


@pytest.mark.parametrize("psi", [1, -1])
def test_nonseparating_swap_obstruction(psi, M_nonsep):
    """Test that the chamber swap of U(2) does not glue with +-id"""
    data = glue(M_nonsep)
    phi = Isometry(linalg.int_matrix(PRESETS["ex-nonsep"]["phi"]),
                   M_nonsep.lattice)
    K_id = identity(data.K.lattice)
    psi = K_id if psi == 1 else -K_id
    assert isometry.glue_obstruction(phi, psi, data) is not None
    assert isometry.extend_isometry(phi, psi, data) is None


def test_nonseparating_phi_orientation(M_nonsep):
    """Test that the ex-nonsep phi is -1 times the swap of the isotropic rays
    and exchanges the components of the positive cone"""
    swap = Isometry(linalg.int_matrix(U2_SWAP), M_nonsep.lattice)
    phi = Isometry(linalg.int_matrix(PRESETS["ex-nonsep"]["phi"]),
                   M_nonsep.lattice)
    assert phi == -swap
    assert isometry.in_O_plus(swap)
    assert not isometry.in_O_plus(phi)
    assert list(phi.apply((1, 1))) == [-1, -1]


def test_gamma_representatives(L2, M_nonsep):
    """Test the representatives of 2e1 - 2e2 + e and their norms"""
    iota = isometry.involution_from_sublattice(M_nonsep)
    delta = L2.vector(2 * u(0) - 2 * u(1) + u(22))
    plus, minus = isometry.gamma_representatives(delta, iota)
    n_plus = plus.coords @ L2.gram @ plus.coords
    n_minus = minus.coords @ L2.gram @ minus.coords
    assert n_plus == -16
    assert n_minus == -24
    assert 4 * (delta.coords @ L2.gram @ delta.coords) == n_plus + n_minus
    assert M_nonsep.contains(plus.coords)
    assert orthogonal_complement(M_nonsep).contains(minus.coords)


def test_gamma_representatives_not_involution(L2):
    """Test that gamma_representatives() needs an involution"""
    with pytest.raises(ValueError):
        isometry.gamma_representatives(L2.vector(u(0)), _order_three(L2))


def _order_three(L2):
    """Cyclic permutation of the first three hyperbolic planes."""
    m = np.zeros((23, 23), dtype=object)
    for i in range(6, 23):
        m[i, i] = 1
    for k in range(3):
        j = (k + 1) % 3
        m[2 * j, 2 * k] = 1
        m[2 * j + 1, 2 * k + 1] = 1
    return Isometry(m, L2)


def test_gamma_membership_extension(M_comp):
    """Test that r_e on <h, e> extends with psi = id"""
    phi = Isometry(linalg.int_matrix([[1, 0], [0, -1]]), M_comp.lattice)
    verdict = isometry.gamma_membership(phi, M_comp, 2)
    assert verdict.verdict == "member"
    assert verdict.generic_verdict == "member"
    assert verdict.certificate["kind"] == "extension"
    assert verdict.certificate["psi"] == "id"


def test_gamma_membership_nonseparating(M_nonsep):
    """Test that the chamber swap of U(2) is in Gamma only through a
    non-trivial psi"""
    phi = Isometry(linalg.int_matrix(PRESETS["ex-nonsep"]["phi"]),
                   M_nonsep.lattice)
    verdict = isometry.gamma_membership(phi, M_nonsep, 2)
    assert verdict.generic_verdict == "non_member"
    assert verdict.verdict == "member"
    assert verdict.certificate["kind"] == "surjectivity"
    assert all(not t["compatible"] for t in verdict.certificate["tried"])


def test_gamma_membership_candidate(M_four):
    """Test that the swap d <-> d' is a member through its candidate"""
    perm = linalg.int_matrix([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0],
                              [0, 0, 0, 1]])
    phi = Isometry(perm, M_four.lattice)
    verdict = isometry.gamma_membership(phi, M_four, 2,
                                        PRESETS["ex-four"]["candidates"])
    assert verdict.verdict == "member"
    assert verdict.generic_verdict == "non_member"
