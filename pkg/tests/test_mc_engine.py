import csv

import numpy as np
import pytest

from emission_pide import (AbatementFunction, CallSpec, JumpSpec, ModelParams, PointMassJumps,
                           mc_martingale_check, price_call_mc, simulate_path, simulate_paths)
from emission_pide.mc_engine import McEstimate, PathExitError, martingale_holds, write_estimates_csv


def test_paths_do_not_depend_on_batch_size(jump_surface, jump_params):
    one = simulate_paths(jump_surface, jump_params, 0.0, 0.0, 1.0, 0.02, 1, seed=5)
    many = simulate_paths(jump_surface, jump_params, 0.0, 0.0, 1.0, 0.02, 20, seed=5)
    assert np.array_equal(one.states[0], many.states[0])
    assert np.array_equal(one.jump_counts[0], many.jump_counts[0])


def test_same_seed_same_path(jump_surface, jump_params):
    a = simulate_path(jump_surface, jump_params, 0.0, 0.0, 1.0, 0.02, seed=42)
    b = simulate_path(jump_surface, jump_params, 0.0, 0.0, 1.0, 0.02, seed=42)
    c = simulate_path(jump_surface, jump_params, 0.0, 0.0, 1.0, 0.02, seed=43)
    assert np.array_equal(a.states, b.states) and np.array_equal(a.jump_sizes, b.jump_sizes)
    assert not np.array_equal(a.states, c.states)


def test_frozen_noise_follows_euler_ode(diffusion_surface):
    # sigma = 0, no jumps: X_{k+1} = X_k - c alpha(t_k, X_k) dt
    params = ModelParams(2.0, 100.0, 0.0, AbatementFunction.linear(0.02))
    path = simulate_path(diffusion_surface, params, 1.0, 0.0, 2.0, 0.02, seed=0)
    x = 1.0
    for k in range(100):
        assert path.states[k] == pytest.approx(x, abs=1e-12)
        x = x - 0.02 * float(diffusion_surface(0.02 * k, x)) * 0.02
    assert path.jump_times.size == 0


def test_constant_state_without_noise_or_abatement(diffusion_surface):
    params = ModelParams(2.0, 100.0, 0.0, AbatementFunction.linear(0.0))
    path = simulate_path(diffusion_surface, params, 0.7, 0.0, 2.0, 0.02, seed=3)
    assert np.all(path.states == 0.7)


def test_point_mass_jumps_are_compensated(diffusion_surface):
    # jumps of +1 at rate 2 minus drift 2 dt: E X_1 = X_0
    params = ModelParams(2.0, 100.0, 0.0, AbatementFunction.linear(0.0),
                         jumps=JumpSpec(2.0, PointMassJumps(1.0)))
    bundle = simulate_paths(diffusion_surface, params, 0.0, 0.0, 1.0, 0.01, 4000, seed=9)
    final = bundle.states[:, -1]
    counts = bundle.jump_counts.sum(axis=1)
    assert np.allclose(final, counts - 2.0, atol=1e-9)
    assert abs(final.mean()) <= 3 * np.sqrt(2.0 / 4000)


def test_path_record(tmp_path, jump_surface, jump_params):
    path = simulate_path(jump_surface, jump_params, 0.0, 0.0, 1.0, 0.02, seed=1)
    assert path.times.size == 51 and path.times[-1] == 1.0
    assert np.all((path.prices >= 0) & (path.prices <= 1))
    assert path.jump_flags.sum() == path.jump_times.size
    out = tmp_path / "path.csv"
    path.to_csv(out)
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "X", "A", "jump_flag"] and len(rows) == 52


def test_exit_detection(jump_surface, jump_params):
    with pytest.raises(PathExitError):
        simulate_path(jump_surface, jump_params, 29.99, 0.0, 1.0, 0.02, seed=0)
    bundle = simulate_paths(jump_surface, jump_params, 0.0, 0.0, 1.0, 0.02, 200, seed=0, bound=0.5)
    assert bundle.exit_fraction > 0.5


def test_step_must_divide_interval(jump_surface, jump_params):
    with pytest.raises(ValueError):
        simulate_paths(jump_surface, jump_params, 0.0, 0.0, 1.0, 0.03, 2, seed=0)


def test_estimate_interval():
    est = McEstimate.from_samples(np.array([1.0, 2.0, 3.0, 4.0]), seed=0)
    assert est.mean == 2.5
    assert est.half_width_95 == pytest.approx(1.96 * np.std([1, 2, 3, 4], ddof=1) / 2)
    assert est.ci_low < est.mean < est.ci_high


def test_write_estimates(tmp_path):
    out = tmp_path / "e.csv"
    write_estimates_csv(out, [McEstimate(1.0, 0.1, 10, 3)])
    assert out.read_text().splitlines()[1] == "1,0.90000000000000002,1.1000000000000001,10,3"


def test_mc_call_endpoints(diffusion_surface, diffusion_params):
    zero = price_call_mc(diffusion_surface, diffusion_params, CallSpec(25.0, 0.0), 25.0, 1000, 0.02, seed=1)
    assert zero.mean == 0.0 and zero.half_width_95 == 0.0
    est = price_call_mc(diffusion_surface, diffusion_params, CallSpec(25.0, 1.0), 25.0, 4000, 0.02, seed=1)
    assert 0.0 < est.mean < 75.0


def test_martingale_jump_model(jump_surface, jump_params):
    est = mc_martingale_check(jump_surface, jump_params, 0.2, -0.5, 0.8, 4000, 0.02, seed=2)
    assert martingale_holds(est, float(jump_surface(0.2, -0.5)), 1.0)


def test_martingale_rejects_bad_times(jump_surface, jump_params):
    with pytest.raises(ValueError):
        mc_martingale_check(jump_surface, jump_params, 0.8, 0.0, 0.2, 10, 0.02, seed=0)
