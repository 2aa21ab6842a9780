import numpy as np
import pytest

from coneflats.cartan import make_basis
from coneflats.config import PipelineConfig, validate_config
from coneflats.dressing import SimpleElement, dress_frame
from coneflats.frames import ExtendedFrame
from coneflats.grids import GridBox
from coneflats.lorentz import QuadraticForm, random_isotropic_line


@pytest.fixture(scope="session")
def basis3():
    return make_basis(3)


@pytest.fixture(scope="session")
def channel_basis3():
    return make_basis(3, "channel", p=1)


@pytest.fixture(scope="session")
def form3():
    return QuadraticForm(3)


@pytest.fixture(scope="session")
def small_box():
    # enough interior for second-order stencils, cheap for unit tests
    return GridBox.cube(3, 1.0, 9)


@pytest.fixture(scope="session")
def default_box():
    return GridBox.cube(3, 1.0, 21)


@pytest.fixture(scope="session")
def main_element(basis3):
    rng = np.random.default_rng(252)
    return SimpleElement(0.5, random_isotropic_line(3, "real", rng))


@pytest.fixture(scope="session")
def sphere_element():
    rng = np.random.default_rng(24)
    return SimpleElement(0.7j, random_isotropic_line(3, "split", rng))


@pytest.fixture(scope="session")
def pair_element():
    rng = np.random.default_rng(24)
    return SimpleElement(0.8, random_isotropic_line(3, "real", rng))


@pytest.fixture(scope="session")
def dressed_frame(basis3, main_element):
    return dress_frame(ExtendedFrame(basis3), main_element)


@pytest.fixture(scope="session")
def c_default():
    return np.array([0.6, 0.8, 1.0])


# Session-scoped full-size verification runs shared by the acceptance suite.

@pytest.fixture(scope="session")
def semisimple_report():
    from coneflats.pipeline import run_verify

    return run_verify(PipelineConfig())


@pytest.fixture(scope="session")
def channel_report():
    from coneflats.pipeline import run_verify

    return run_verify(validate_config({"variant": "channel"}))


# acceptance tests append their one-line outcomes here; re-emitted after the
# run so the lines stay visible under output capture
CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
