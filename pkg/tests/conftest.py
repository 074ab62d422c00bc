import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

warnings.filterwarnings("ignore", message=".*TBB.*")

from plasmon_shift import CouplingSpectrum, SphereSystem
from plasmon_shift.gridutil import geometric_ladder, merge_grids

from oracles import PoleReservoir

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def gold_sphere_h1():
    return SphereSystem(radius_nm=20.0, gap_nm=1.0, dipole_debye=24.0)


@pytest.fixture(scope="session")
def gold_sphere_h2():
    return SphereSystem(radius_nm=20.0, gap_nm=2.0, dipole_debye=24.0)


@pytest.fixture(scope="session")
def two_line_reservoir():
    """Two narrow lines in the optical range; closed-form dispersion partner."""
    return PoleReservoir([(1.2e-3, 3.5, 0.08), (8.0e-4, 5.2, 0.12)])


@pytest.fixture(scope="session")
def two_line_spectrum(two_line_reservoir):
    grid = merge_grids(
        np.geomspace(0.02, 1.0, 300),
        np.linspace(1.0, 9.0, 3000),
        geometric_ladder(3.5, 1e-4, 1.2, 1.02),
        geometric_ladder(5.2, 1e-4, 1.2, 1.02),
        np.geomspace(9.0, 200.0, 800),
        lo=0.02,
        hi=200.0,
    )
    return CouplingSpectrum(
        omega_ev=grid,
        g_ev=np.asarray(two_line_reservoir.g(grid)),
        includes_vacuum=True,
        source="synthetic",
    )


@pytest.fixture(scope="session")
def silver_table_path():
    return DATA_DIR / "silver_sample.csv"
