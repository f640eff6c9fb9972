import pytest

from bellsynth.biphoton import biphoton_amplitude, joint_spectral_amplitude
from bellsynth.config import RunConfig


@pytest.fixture(scope="session")
def cw_setup():
    return RunConfig.load("cw_fig3").setup()


@pytest.fixture(scope="session")
def pulsed_setup():
    return RunConfig.load("pulsed_fig4").setup()


@pytest.fixture(scope="session")
def cw_spectrum(cw_setup):
    return joint_spectral_amplitude(cw_setup)


@pytest.fixture(scope="session")
def pulsed_spectrum(pulsed_setup):
    return joint_spectral_amplitude(pulsed_setup)


@pytest.fixture(scope="session")
def cw_pi(cw_setup):
    return biphoton_amplitude(cw_setup)


@pytest.fixture(scope="session")
def pulsed_pi(pulsed_setup):
    return biphoton_amplitude(pulsed_setup)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
