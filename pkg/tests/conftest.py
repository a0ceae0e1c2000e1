import numpy as np
import pytest

from tripod_eit.atom_model import AtomSpec, DriveConfig, angular

# acceptance lines collected during the session and printed in the summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def atom():
    return AtomSpec.rb87()


@pytest.fixture(scope="session")
def gamma4(atom):
    return atom.gamma4


@pytest.fixture(scope="session")
def reference_drives(gamma4):
    """Coupling on resonance, signal at half the coupling Rabi frequency."""
    return DriveConfig(omega_p=0.245 * gamma4, omega_c=gamma4, omega_s=0.3 * gamma4,
                       delta_p=0.5 * gamma4, delta_c=0.0, delta_s=0.5 * gamma4)


@pytest.fixture(scope="session")
def wide_grid():
    return angular(np.linspace(-30.0, 30.0, 2001))


@pytest.fixture(scope="session")
def reference_spectrum(atom, reference_drives, wide_grid):
    from tripod_eit.response import sweep
    return sweep(atom, reference_drives, "probe", wide_grid)


@pytest.fixture(scope="session")
def broadened_drives(reference_drives):
    width = angular(0.1)
    return reference_drives.replace(width_p=width, width_c=width, width_s=width)


@pytest.fixture(scope="session")
def broadened_grid():
    return angular(np.linspace(-30.0, 30.0, 601))


@pytest.fixture(scope="session")
def broadened_spectrum(atom, broadened_drives, broadened_grid):
    """Linewidth- and Maxwell-broadened probe spectrum at 300 K, with the doubling check."""
    from tripod_eit.broadening import DopplerSettings, doppler_average
    return doppler_average(atom, broadened_drives, "probe", broadened_grid, DopplerSettings(300.0))
