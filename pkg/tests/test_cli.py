import csv
from pathlib import Path

import numpy as np
import pytest

from emission_pide.cli import main
from emission_pide.config import RunConfig, parse_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _config(tmp_path, base, **overrides):
    """Copy a shipped config with some keys replaced."""
    lines = []
    for line in (CONFIGS / base).read_text().splitlines():
        key = line.split("=", 1)[0].strip()
        if "=" in line and not line.lstrip().startswith("#") and key in overrides:
            continue
        lines.append(line)
    lines += [f"{k} = {v}" for k, v in overrides.items()]
    path = tmp_path / f"run_{len(list(tmp_path.glob('run_*')))}.cfg"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_solve_diffusion_slices(tmp_path):
    assert main(["solve", "--config", str(CONFIGS / "diffusion.cfg"), "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "alpha_slices.csv")[1:]
    assert [float(r[0]) for r in rows] == [1.9, 1.6, 1.3, 1.0, 0.7, 0.4]
    for r in rows:
        v = np.array(r[1:], dtype=float)
        assert np.all(np.diff(v) >= -1e-12) and v.min() >= 0 and v.max() <= 100


def test_solve_jump_slices(tmp_path):
    cfg = _config(tmp_path, "jumps.cfg", l=12)
    assert main(["solve", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "alpha_slices.csv")[1:]
    assert len(rows) == 5
    v = np.array([r[1:] for r in rows], dtype=float)
    assert v.min() >= 0 and v.max() <= 1


def test_solve_single_step(tmp_path):
    cfg = _config(tmp_path, "jumps.cfg", l=4, dt=1.0)
    assert main(["solve", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert len(_rows(tmp_path / "alpha_surface.csv")) == 3  # header + two levels


def test_price_expiring_contract(tmp_path):
    cfg = _config(tmp_path, "diffusion.cfg", maturities=0, n_mc=100)
    assert main(["price", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, row = _rows(tmp_path / "call_prices.csv")
    assert header == ["tau", "pde_price", "mc_mean", "mc_ci_low", "mc_ci_high"]
    assert float(row[1]) == 0.0 and float(row[2]) == 0.0


def test_price_zero_strike_is_spot(tmp_path):
    # with K = 0 the call is the allowance itself, a martingale
    cfg = _config(tmp_path, "diffusion.cfg", strike=0, dt=0.02, mc_dt=0.02, n_mc=4000,
                  maturities="0, 0.5, 1.0")
    assert main(["price", "--config", cfg, "--out", str(tmp_path)]) == 0
    for row in _rows(tmp_path / "call_prices.csv")[1:]:
        pde, mc, lo, hi = (float(v) for v in row[1:])
        assert pde == pytest.approx(25.0, abs=0.5)
        assert abs(mc - 25.0) <= (hi - lo) / 2 + 1.0


def test_simulate_is_deterministic(tmp_path):
    cfg = _config(tmp_path, "jumps.cfg", l=12)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(b)]) == 0
    assert (a / "path.csv").read_bytes() == (b / "path.csv").read_bytes()
    assert (a / "path_summary.csv").read_bytes() == (b / "path_summary.csv").read_bytes()
    prices = np.array([r[2] for r in _rows(a / "path.csv")[1:]], dtype=float)
    assert prices.min() >= 0 and prices.max() <= 1
    assert main(["simulate", "--config", cfg, "--out", str(b), "--seed", "8"]) == 0
    assert (a / "path.csv").read_bytes() != (b / "path.csv").read_bytes()


def test_simulate_frozen_state(tmp_path):
    cfg = _config(tmp_path, "jumps.cfg", l=4, sigma=0, jump_intensity=0, abatement_c=0)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
    states = {r[1] for r in _rows(tmp_path / "path.csv")[1:]}
    assert states == {"0"}


def test_truncate_report(tmp_path, capsys):
    cfg = _config(tmp_path, "jumps.cfg")
    assert main(["truncate", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, row = _rows(tmp_path / "truncation.csv")
    assert header == ["kappa_T", "zeta_T", "l", "eps1", "eps2"]
    assert float(row[2]) == pytest.approx(80 ** 0.5, abs=1e-12)
    assert "kappa_T" in capsys.readouterr().out

    loose = _config(tmp_path, "jumps.cfg", eps1=0.2, eps2=0.2)
    assert main(["truncate", "--config", loose, "--out", str(tmp_path)]) == 0
    assert float(_rows(tmp_path / "truncation.csv")[1][2]) < float(row[2])

    no_abatement = _config(tmp_path, "jumps.cfg", abatement_c=0)
    assert main(["truncate", "--config", no_abatement, "--out", str(tmp_path)]) == 0
    k, z = _rows(tmp_path / "truncation.csv")[1][:2]
    assert k == z


def test_compare_sensitivity(tmp_path):
    cfg = _config(tmp_path, "jumps.cfg", l=10)
    assert main(["compare", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "comparison.csv")
    x = np.array(rows[0][2:], dtype=float)
    slices = {(float(r[0]), float(r[1])): np.array(r[2:], dtype=float) for r in rows[1:]}
    assert len(slices) == 4
    centre = np.abs(x) <= 0.5
    steepness = {k: np.max(np.diff(v)[centre[1:]]) for k, v in slices.items()}
    assert max(steepness, key=steepness.get) == (0.3, 0.0)


def test_compare_repeated_pair(tmp_path):
    cfg = _config(tmp_path, "jumps.cfg", l=6, compare_pairs="1:1, 1:1")
    assert main(["compare", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "comparison.csv")
    assert len(rows) == 3 and rows[1] == rows[2]


def test_unknown_key_fails(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("horizon = 1\nvolatility = 2\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "unknown key" in capsys.readouterr().err


def test_invalid_model_fails(tmp_path):
    cfg = _config(tmp_path, "jumps.cfg", l=4, sigma=0)
    assert main(["solve", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert main(["solve", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_parse_config():
    values = parse_config("a = 1\n".replace("a", "horizon") + "# note\ncompare_pairs = 1:0, 0.3:1\n")
    assert values == {"horizon": 1.0, "compare_pairs": [(1.0, 0.0), (0.3, 1.0)]}
    with pytest.raises(ValueError, match="line 1"):
        parse_config("sigma\n")
    with pytest.raises(ValueError, match="required"):
        RunConfig({}).require("strike")
