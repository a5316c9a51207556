import pytest

from emission_pide import (AbatementFunction, GridSpec, JumpSpec, ModelParams, NormalJumps,
                           solve_surface)
from emission_pide.analytic import HopfColeParams


def diffusion_model():
    # T=2, sigma=4, c=0.02, penalty=100: linear abatement, no jumps
    return ModelParams(2.0, 100.0, 4.0, AbatementFunction.linear(0.02))


def jump_model(sigma=1.0, intensity=1.0):
    # T=1, penalty=1, r(a)=a, standard normal jumps
    jumps = JumpSpec(intensity, NormalJumps(0.0, 1.0)) if intensity > 0 else None
    return ModelParams(1.0, 1.0, sigma, AbatementFunction.linear(1.0), jumps=jumps)


@pytest.fixture(scope="session")
def diffusion_params():
    return diffusion_model()


@pytest.fixture(scope="session")
def hopf_cole():
    return HopfColeParams(2.0, 4.0, 0.02, 100.0)


@pytest.fixture(scope="session")
def diffusion_surface(diffusion_params):
    return solve_surface(diffusion_params, GridSpec.from_steps(20.0, 0.02, 2.0, 0.02))


@pytest.fixture(scope="session")
def jump_params():
    return jump_model()


@pytest.fixture(scope="session")
def jump_surface(jump_params):
    return solve_surface(jump_params, GridSpec.from_steps(30.0, 0.02, 1.0, 0.02))


@pytest.fixture(scope="session")
def jump_surface_l20(jump_params):
    return solve_surface(jump_params, GridSpec.from_steps(20.0, 0.02, 1.0, 0.02))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[k])
