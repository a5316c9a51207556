import numpy as np
import pytest

from emission_pide import AbatementFunction, GridSpec, JumpSpec, ModelParams, NormalJumps, validate
from emission_pide.model import PointMassJumps, TabulatedJumps, shift_map

from conftest import jump_model


def test_section4_example_validates():
    report = validate(jump_model(), GridSpec.from_steps(30.0, 0.02, 1.0, 0.02))
    assert report.ok, report.problems
    assert GridSpec.from_steps(30.0, 0.02, 1.0, 0.02).M == 50


def test_no_jumps_grid_condition_vacuous():
    params = jump_model(intensity=0.0)
    assert params.jumps is None and params.intensity == 0.0
    assert validate(params, GridSpec.from_steps(5.0, 0.05, 1.0, 0.1)).ok


def test_degenerate_grid_reported():
    report = validate(jump_model(intensity=0.0), GridSpec(l=1.0, N=2, M=4, T=1.0))
    assert "N >= 3 violated" in report.problems
    with pytest.raises(ValueError, match="N >= 3"):
        report.raise_if_failed()


@pytest.mark.parametrize("kwargs", [
    dict(horizon=0.0, penalty=1.0, sigma=1.0),
    dict(horizon=1.0, penalty=-1.0, sigma=1.0),
    dict(horizon=1.0, penalty=1.0, sigma=-0.5),
])
def test_model_rejects_bad_scalars(kwargs):
    with pytest.raises(ValueError):
        ModelParams(abatement=AbatementFunction.linear(1.0), **kwargs)


def test_callable_sigma_needs_growth_constants():
    with pytest.raises(ValueError, match="growth"):
        ModelParams(1.0, 1.0, lambda t, x: 1 + 0 * x, AbatementFunction.linear(1.0))


def test_growth_bound_spot_check():
    sigma = lambda t, x: np.sqrt(1.0 + 0.5 * x ** 2)
    grid = GridSpec.from_steps(4.0, 0.1, 1.0, 0.25)
    ok = ModelParams(1.0, 1.0, sigma, AbatementFunction.linear(1.0), growth=(1.0, 0.5))
    bad = ModelParams(1.0, 1.0, sigma, AbatementFunction.linear(1.0), growth=(1.0, 0.1))
    assert validate(ok, grid).ok
    assert any("growth" not in p and "x^2" in p for p in validate(bad, grid).problems)


def test_zero_sigma_rejected_for_solving():
    params = ModelParams(1.0, 1.0, 0.0, AbatementFunction.linear(1.0))
    assert "sigma > 0 violated on grid" in validate(params, GridSpec.from_steps(2.0, 0.1, 1.0, 0.5)).problems


def test_grid_nodes():
    g = GridSpec.from_steps(20.0, 0.02, 2.0, 0.02)
    assert (g.N, g.M) == (2000, 100)
    x = g.x
    assert x[0] == -20.0 and x[g.N // 2] == 0.0
    assert np.all(np.diff(x) > 0)
    assert np.max(np.abs(np.diff(x) - g.dx)) <= 2.0 ** -48 * g.l
    assert g.tau[-1] == g.T and g.tau[0] == 0.0
    assert g.level(0.0) == g.M and g.level(g.T) == 0 and g.level(1.9) == 5


def test_grid_structure_rejected():
    with pytest.raises(ValueError):
        GridSpec(l=-1.0, N=10, M=10, T=1.0)
    with pytest.raises(ValueError):
        GridSpec.from_steps(1.0, 0.3, 1.0, 0.1)


def test_jump_spec_invariants():
    with pytest.raises(ValueError):
        JumpSpec(0.0)
    with pytest.raises(ValueError):
        JumpSpec(1.0, terminals=(1.0, -1.0))
    spec = JumpSpec(1.0, NormalJumps())
    k1, k2 = spec.quadrature_interval()
    assert k1 == pytest.approx(-4.753424, abs=1e-5) and k2 == pytest.approx(-k1, abs=1e-10)
    assert spec.is_shift


def test_distributions_moments():
    assert NormalJumps(0.5, 2.0).second_moment == pytest.approx(4.25)
    y = np.linspace(-8, 8, 4001)
    tab = TabulatedJumps(y, np.exp(-y ** 2 / 2))
    assert tab.first_moment == pytest.approx(0.0, abs=1e-12)
    assert tab.second_moment == pytest.approx(1.0, abs=1e-5)
    assert tab.cdf(0.0) == pytest.approx(0.5)
    assert PointMassJumps(0.3).second_moment == pytest.approx(0.09)


def test_compensator_generic_map_matches_shift():
    spec_shift = JumpSpec(2.0, NormalJumps(0.3, 1.0))
    spec_generic = JumpSpec(2.0, NormalJumps(0.3, 1.0), jump_map=lambda t, x, y: y + 0 * x)
    x = np.array([-1.0, 0.0, 2.0])
    assert np.allclose(spec_shift.compensator(0.0, x), 0.6)
    assert np.allclose(spec_generic.compensator(0.0, x), 0.6, atol=1e-3)
    assert shift_map(0.0, np.zeros(3), 1.5).shape == (3,)
