"""Tests the chambers.py functions"""

import pandas as pd
import pytest
from K3N_LAT import chambers
from K3N_LAT.chambers import Polyhedron
from K3N_LAT.lattice import sublattice
from K3N_LAT.walls import WallSpec, in_Delta_M

from fixture import u


def test_vinberg_budget_default(monkeypatch):
    """Test the default Vinberg budget and its environment override"""
    monkeypatch.delenv(chambers.BUDGET_VARIABLE, raising=False)
    assert chambers.vinberg_budget() == chambers.DEFAULT_BUDGET
    monkeypatch.setenv(chambers.BUDGET_VARIABLE, "7")
    assert chambers.vinberg_budget() == 7
    assert chambers.vinberg_budget(3) == 3


@pytest.mark.parametrize("raw", ["x", "0", "-5"])
def test_vinberg_budget_invalid(raw, monkeypatch):
    """Test that a bad budget in the environment is rejected"""
    monkeypatch.setenv(chambers.BUDGET_VARIABLE, raw)
    with pytest.raises(ValueError):
        chambers.vinberg_budget()


def test_default_base(M_comp, M_nonsep):
    """Test the first positive vector by sup norm"""
    assert chambers.default_base(M_comp) == (-1, 0)
    assert chambers.default_base(M_nonsep) == (-1, -1)


def test_has_rational_positive_cone(M_comp, M_nonsep, M_four, L2):
    """Test which preset sublattices have rational isotropic rays"""
    assert chambers.has_rational_positive_cone(M_comp)
    assert chambers.has_rational_positive_cone(M_nonsep)
    assert not chambers.has_rational_positive_cone(M_four)
    assert not chambers.has_rational_positive_cone(
        sublattice(L2, [u(0, 1), u(2, 3)]))


def test_positive_cone_polyhedron(M_comp, M_nonsep):
    """Test the positive cone rays oriented towards the base"""
    P = chambers.positive_cone_polyhedron(M_comp, (1, 0))
    assert P.vertices == [(1, -1), (1, 1)]
    assert P.certificate == "positive_cone"
    assert P.ideal_vertices == [(1, -1), (1, 1)]
    Q = chambers.positive_cone_polyhedron(M_nonsep, (1, 1))
    assert Q.vertices == [(0, 1), (1, 0)]
    R = chambers.positive_cone_polyhedron(M_comp, (-1, 0))
    assert R.vertices == [(-1, -1), (-1, 1)]


def test_positive_cone_polyhedron_invalid(L2, M_comp, M_four):
    """Test that high rank, irrational cones and bad bases are rejected"""
    with pytest.raises(ValueError):
        chambers.positive_cone_polyhedron(M_four)
    with pytest.raises(ValueError):
        chambers.positive_cone_polyhedron(sublattice(L2, [u(0, 1), u(2, 3)]))
    with pytest.raises(ValueError):
        chambers.positive_cone_polyhedron(M_comp, (0, 1))


def test_vinberg_domain_four(M_four):
    """Test the Vinberg domain of <2> + 3<-2> in L2"""
    P = chambers.vinberg_domain(M_four, base=(1, 0, 0, 0))
    assert P.certificate == "complete"
    assert sorted(P.facet_normals) == sorted([
        (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
        (1, -1, -1, 0), (1, -1, 0, -1), (1, 0, -1, -1)])
    assert sorted(P.vertices) == [(1, -1, 0, 0), (1, 0, -1, 0),
                                  (1, 0, 0, -1), (1, 0, 0, 0),
                                  (2, -1, -1, -1)]
    assert P.is_consistent()
    assert P.report()["certificate"] == "complete"


def test_vinberg_domain_rank2(M_comp):
    """Test that the rank 2 domain is cut by the root e"""
    P = chambers.vinberg_domain(M_comp, base=(1, 0))
    assert P.certificate == "complete"
    assert P.facet_normals == [(0, 1)]
    assert P.vertices == [(1, -1), (1, 0)]


def test_vinberg_domain_budget(M_four):
    """Test that a tiny budget leaves the domain incomplete"""
    P = chambers.vinberg_domain(M_four, base=(1, 0, 0, 0), budget=1)
    assert P.certificate == "incomplete"
    assert P.examined > 1


def test_vinberg_domain_counts_distinct_candidates(M_four, monkeypatch):
    """Test that candidates seen in an earlier round are not counted again"""
    counts = []
    roots_up_to = chambers._roots_up_to

    def recording(*args):
        roots, count = roots_up_to(*args)
        counts.append(count)
        return roots, count

    monkeypatch.setattr(chambers, "_roots_up_to", recording)
    P = chambers.vinberg_domain(M_four, base=(1, 0, 0, 0))
    assert P.certificate == "complete"
    assert counts == sorted(counts)
    assert P.examined == counts[-1]


def test_vinberg_domain_invalid(M_four):
    """Test that non-reflective norms and non-positive bases are rejected"""
    with pytest.raises(ValueError):
        chambers.vinberg_domain(M_four, WallSpec(((-10, 2),)),
                                base=(1, 0, 0, 0))
    with pytest.raises(ValueError):
        chambers.vinberg_domain(M_four, base=(0, 1, 0, 0))


def test_chamber_decomposition_no_walls(M_comp):
    """Test that a region without walls is one chamber"""
    region = chambers.positive_cone_polyhedron(M_comp, (1, 0))
    complex = chambers.chamber_decomposition(M_comp, region, [])
    assert len(complex.chambers) == 1
    assert complex.chambers[0].signs == ()
    assert complex.chambers[0].witness == (1, 0)
    assert complex.adjacency == []


def test_report_comp(report_comp):
    """Test the deformation types of <2> + <-2> in L2"""
    c = report_comp.complex
    assert report_comp.region_kind == "positive_cone"
    assert report_comp.walls.classes == [(0, 1), (2, -3), (2, 3)]
    assert [ch.signs for ch in c.chambers] == [
        (1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, 1, -1)]
    assert c.adjacency == [(0, 1, 1), (0, 2, 0), (2, 3, 2)]
    assert [phi.tolist() for phi, _ in c.symmetries] == [
        [[1, 0], [0, 1]], [[1, 0], [0, -1]]]
    assert all(v.verdict == "member" for _, v in c.symmetries)
    assert c.orbits == [[0, 2], [1, 3]]
    assert report_comp.orbit_count == 2


def test_report_comp_witnesses(report_comp):
    """Test that every witness lies in its own chamber"""
    c = report_comp.complex
    for i, chamber in enumerate(c.chambers):
        assert c.locate(chamber.witness) == i
    assert c.locate((1, 0)) is None


def test_report_nonsep(L2, report_nonsep, M_nonsep):
    """Test that U(2) in L2 has one chamber, not simple"""
    c = report_nonsep.complex
    assert report_nonsep.walls.classes == []
    assert len(c.chambers) == 1
    assert report_nonsep.orbit_count == 1
    chamber = c.chambers[0]
    assert chamber.simple == "not_simple"
    assert in_Delta_M(L2.vector(list(chamber.simple_witness)), M_nonsep)


def test_report_four(report_four):
    """Test the six chambers of <2> + 3<-2> and their five orbits"""
    c = report_four.complex
    assert report_four.region_kind == "vinberg"
    assert report_four.walls.classes == [(0, 0, 2, -1), (0, 2, 0, -1),
                                         (2, -2, -2, -1), (2, 0, 0, -3)]
    assert report_four.walls.certificate == "complete"
    assert len(c.chambers) == 6
    assert len(c.adjacency) == 6
    assert len(c.symmetries) == 2
    assert all(v.verdict == "member" for _, v in c.symmetries)
    assert c.orbit_interval == (5, 5)
    assert report_four.orbit_count == 5


P0, P1, P1_, P2, P3 = ((1, 0, 0, 0), (1, -1, 0, 0), (1, 0, -1, 0),
                       (1, 0, 0, -1), (2, -1, -1, -1))
Q1, Q1_, Q2, Q3 = ((3, -1, 0, -2), (3, 0, -1, -2), (3, -1, -1, -2),
                   (3, 0, 0, -2))


def test_report_four_chambers(report_four):
    """Test the sign vectors, vertices, edges and orbits of the six chambers
    of <2> + 3<-2>"""
    c = report_four.complex
    expected = [
        ((1, 1, 1, 1), [P0, P1, P1_, Q2]),
        ((1, 1, -1, 1), [P1, P1_, P3, Q2]),
        ((1, -1, 1, 1), [P0, P1_, Q1_, Q2]),
        ((-1, 1, 1, 1), [P0, P1, Q1, Q2]),
        ((-1, -1, 1, 1), [P0, Q1, Q1_, Q2, Q3]),
        ((-1, -1, 1, -1), [P2, Q1, Q1_, Q2, Q3]),
    ]
    assert [(ch.signs, sorted(ch.vertices)) for ch in c.chambers] == \
        [(signs, sorted(vertices)) for signs, vertices in expected]
    assert c.adjacency == [(0, 1, 2), (0, 2, 1), (0, 3, 0), (2, 4, 0),
                           (3, 4, 1), (4, 5, 3)]
    assert c.orbits == [[0], [1], [2, 3], [4], [5]]


def test_report_four_adjacency(report_four):
    """Test that adjacent chambers differ in the sign of their wall only"""
    c = report_four.complex
    for i, j, w in c.adjacency:
        diff = [k for k, (s, t) in
                enumerate(zip(c.chambers[i].signs, c.chambers[j].signs))
                if s != t]
        assert diff == [w]


def test_adjacency_graph(report_comp):
    """Test that adjacency_graph() recomputes the edges of <2> + <-2>"""
    assert chambers.adjacency_graph(report_comp.complex) == [
        (0, 1, 1), (0, 2, 0), (2, 3, 2)]


def test_report_json(report_comp, report_four):
    """Test the report dictionaries"""
    out = report_comp.report()
    assert out["region"] == "positive_cone"
    assert out["orbit_count"] == 2
    assert len(out["per_chamber_simple_flag"]) == 4
    assert all(f["flag"] in ("simple", "not_simple", "unknown")
               for f in out["per_chamber_simple_flag"])
    assert report_four.report()["region"] == "vinberg"
    assert report_four.report()["symmetry_search"] == "vertex_permutations"


def test_deformation_types_not_admissible(L2):
    """Test that a negative definite sublattice is rejected"""
    with pytest.raises(ValueError):
        chambers.deformation_types(sublattice(L2, [u(22)]), 2)


def test_deformation_types_budget(M_four):
    """Test that an incomplete Vinberg search is an error"""
    with pytest.raises(ValueError):
        chambers.deformation_types(M_four, 2, base=(1, 0, 0, 0), budget=1)


def test_chamber_orbits_without_symmetries(M_comp, report_comp):
    """Test that the identity alone leaves every chamber in its own orbit"""
    c = report_comp.complex
    bare = chambers.ChamberComplex(M_comp, c.region, c.walls, c.chambers,
                                   c.adjacency, c.symmetries[:1])
    orbits, interval = chambers.chamber_orbits(bare)
    assert orbits == [[0], [1], [2], [3]]
    assert interval == (4, 4)


def test_chamber_table(report_comp, tmp_path):
    """Test the chamber table and its CSV output"""
    table = chambers.chamber_table(report_comp.complex)
    assert list(table["signs"]) == ["+++", "+-+", "-++", "-+-"]
    assert list(table["orbit"]) == [0, 1, 0, 1]
    path = tmp_path / "chambers.csv"
    table.to_csv(path, sep=";", index=False)
    assert len(pd.read_csv(path, sep=";")) == 4


def test_plot_fan(report_comp, report_four, tmp_path):
    """Test the fan plot of a rank 2 complex"""
    path = tmp_path / "fan.png"
    chambers.plot_fan(report_comp.complex, str(path))
    assert path.exists()
    with pytest.raises(ValueError):
        chambers.plot_fan(report_four.complex, str(tmp_path / "four.png"))


def test_polyhedron_is_consistent(M_comp):
    """Test that a vertex outside a facet is inconsistent"""
    P = Polyhedron(M_comp, [(0, 1)], [(1, 0), (1, 1)])
    assert not P.is_consistent()
