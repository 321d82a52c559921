import pytest

from K3N_LAT import presets
from K3N_LAT.chambers import deformation_types
from K3N_LAT.lattice import make_lattice, sublattice


def _preset_sublattice(name):
    p = presets.PRESETS[name]
    return sublattice(make_lattice(p["ambient"]), p["basis"])


def u(*indices):
    """Sum of standard basis vectors of L2, repeated indices add up."""
    v = presets.unit(indices[0])
    for i in indices[1:]:
        v = v + presets.unit(i)
    return v


@pytest.fixture(scope="session")
def L2():
    return make_lattice("L2")


@pytest.fixture(scope="session")
def M_comp():
    return _preset_sublattice("ex-comp")


@pytest.fixture(scope="session")
def M_nonsep():
    return _preset_sublattice("ex-nonsep")


@pytest.fixture(scope="session")
def M_four():
    return _preset_sublattice("ex-four")


@pytest.fixture(scope="session")
def report_comp(M_comp):
    p = presets.PRESETS["ex-comp"]
    return deformation_types(M_comp, 2, base=p["base"])


@pytest.fixture(scope="session")
def report_nonsep(M_nonsep):
    p = presets.PRESETS["ex-nonsep"]
    return deformation_types(M_nonsep, 2, base=p["base"])


@pytest.fixture(scope="session")
def report_four(M_four):
    p = presets.PRESETS["ex-four"]
    return deformation_types(M_four, 2, base=p["base"],
                             candidates=p["candidates"])
