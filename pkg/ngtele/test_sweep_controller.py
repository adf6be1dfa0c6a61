#!/usr/bin/env python3
"""
Sweep controller tests: configuration validation, grid ordering, worker
determinism and the per-mode row layouts
"""

import numpy as np
import pytest
from pydantic import ValidationError

from core.herald import HeraldSpec
from core.parameter_config import classical_squeezing_threshold, default_squeezing_grid, default_transmissivity_grid
from core.phase_space import ThermalSqueezeParams
from core.sweep_controller import (
    TABLE1_COLUMNS,
    TABLE1_QUANTITIES,
    SweepConfig,
    SweepController,
    region_flags,
)
from core.teleport import InputState, TeleportReport


def _run(**values):
    return SweepController(SweepConfig(**values), sweep_id="test", show_progress=False).run()


def _fake_report(F, F_base):
    return TeleportReport(spec=HeraldSpec.from_label("sym-1-PS", 0.5), params=ThermalSqueezeParams(0.3, 1.0),
                          input=InputState.coherent(), F=F, F_base=F_base, P=0.1)


# =====================================================================
# CONFIGURATION
# =====================================================================

def test_config_defaults():
    config = SweepConfig()
    assert config.r_values[0] == 0.0 and config.r_values[-1] == 1.5
    assert len(config.T_values) == 100 and config.T_values[-1] == 1.0
    np.testing.assert_array_equal(config.r_values, default_squeezing_grid())
    np.testing.assert_array_equal(config.T_values, default_transmissivity_grid())
    assert config.kappa_values[0] == 0.5 and config.kappa_values[-1] == 1.5 and len(config.kappa_values) == 201
    assert config.input_state == InputState.coherent()
    assert SweepConfig(input="sqvac").input_state.epsilon == 1.7


@pytest.mark.parametrize("values", [
    {"specs": ["sym-1-XX"]},
    {"specs": []},
    {"kappa": 0.3},
    {"grid_r": "0:1"},
    {"grid_t": "0:1:0.1"},
    {"grid_t": "0.5:1.2:0.1"},
    {"grid_kappa": "0.4:1:0.1"},
    {"workers": 0},
    {"objective": "P"},
])
def test_config_rejects_invalid_values(values):
    with pytest.raises(ValidationError):
        SweepConfig(**values)


def test_region_flags():
    assert region_flags(None) == {"gray": False, "black": False}
    assert region_flags(_fake_report(0.6, 0.55)) == {"gray": True, "black": False}
    assert region_flags(_fake_report(0.45, 0.40)) == {"gray": False, "black": True}
    assert region_flags(_fake_report(0.45, 0.47)) == {"gray": False, "black": False}


# =====================================================================
# MODES
# =====================================================================

def test_fid_scan_rows_follow_the_grid():
    result = _run(mode="fid-scan", specs=["sym-1-PS", "sym-1-PC"], grid_r="0.2:0.6:0.2", grid_t="0.2:1:0.2")
    assert [row["spec"] for row in result.rows] == ["sym-1-PS"] * 3 + ["sym-1-PC"] * 3
    assert [row["r"] for row in result.rows[:3]] == [0.2, 0.4, 0.6]
    assert set(result.extras["r_th"]) == {"sym-1-PS", "sym-1-PC"}
    assert result.extras["r_th"]["sym-1-PS"] is None
    for row in result.rows:
        assert row["r_th"] == result.extras["r_th"][row["spec"]]
    assert result.columns[-1] == "r_th"
    assert result.progress.status == "completed"
    assert result.progress.processed_points == 6
    for row in result.rows:
        assert row["deltaF"] == pytest.approx(row["F"] - row["F_base"])


def test_workers_do_not_change_results():
    values = dict(mode="r-profile", specs=["sym-1-PS", "asym-1-PA"], grid_t="0.1:1:0.1", r=0.5)
    serial = _run(workers=1, **values)
    parallel = _run(workers=4, **values)
    assert serial.rows == parallel.rows


def test_r_profile_defaults_to_operating_squeezing():
    result = _run(mode="r-profile", specs=["sym-1-PS"], grid_t="0.5:1:0.25")
    assert [row["T"] for row in result.rows] == [0.5, 0.75, 1.0]
    assert all(row["r"] == 0.64 for row in result.rows)


def test_kappa_scan_with_fixed_squeezing():
    result = _run(mode="kappa-scan", specs=["sym-1-PS"], r=0.5, grid_kappa="0.5:1:0.25", grid_t="0.2:1:0.2")
    assert [row["kappa"] for row in result.rows] == [0.5, 0.75, 1.0]
    baselines = [row["F_base"] for row in result.rows]
    assert baselines == sorted(baselines, reverse=True)


@pytest.mark.slow
def test_kappa_scan_two_photon_subtraction_collapses_to_vacuum_at_high_kappa():
    # the optimum leaves the grid toward T -> 0, where the resource is replaced by vacuum
    result = _run(mode="kappa-scan", specs=["sym-2-PS"], r=0.3, grid_kappa="1:1.1:0.05", grid_t="0.01:1:0.01")
    for row in result.rows:
        assert row["T_opt"] < 0.01
        assert row["F"] == pytest.approx(0.5, abs=1e-6)


def test_heatmap_rows_and_missing_points():
    result = _run(mode="heatmap", specs=["sym-1-PS"], kappa=0.5, grid_r="0:0.5:0.5", grid_t="0.5:1:0.5")
    assert [(row["r"], row["T"]) for row in result.rows] == [(0.0, 0.5), (0.0, 1.0), (0.5, 0.5), (0.5, 1.0)]
    # subtraction from the vacuum never fires
    assert result.rows[0]["F"] is None and not result.rows[0]["gray"]
    assert result.columns[-2:] == ["gray", "black"]


@pytest.mark.slow
def test_heatmap_regions_split_at_the_classical_threshold():
    kappa = 1.0
    threshold = classical_squeezing_threshold(kappa)
    result = _run(mode="heatmap", specs=["sym-1-PS"], kappa=kappa, grid_r="0.05:0.8:0.05", grid_t="0.1:1:0.1")
    assert any(row["black"] or row["gray"] for row in result.rows)
    for row in result.rows:
        if row["black"]:
            assert row["r"] <= threshold + 1e-9
            assert row["F"] < 0.5 and row["deltaF"] > 0
        if row["gray"]:
            assert row["r"] >= threshold - 1e-9
            assert row["F"] > 0.5 and row["deltaF"] > 0


@pytest.mark.slow
def test_table1_layout():
    result = _run(mode="table1", grid_r="0.2:0.7:0.05", grid_t="0.1:0.9:0.1", refine_iterations=1)
    assert result.columns == ["quantity"] + [name for name, _, _ in TABLE1_COLUMNS]
    assert [row["quantity"] for row in result.rows] == list(TABLE1_QUANTITIES)
    r_max = result.rows[0]
    assert all(r_max[name] > 0 for name, _, _ in TABLE1_COLUMNS)
