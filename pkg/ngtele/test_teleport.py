#!/usr/bin/env python3
"""
Teleportation fidelity tests: closed-form baselines, heralded resources and
the classical ceiling
"""

import math

import numpy as np
import pytest

from core.exceptions import ParameterDomainError
from core.herald import HeraldSpec, normalized_char
from core.optimizer import evaluate, optimize_over_T
from core.parameter_config import CLASSICAL_FIDELITY_BOUND, classical_squeezing_threshold, make_grid
from core.phase_space import ThermalSqueezeParams
from core.teleport import (
    InputState,
    fidelity,
    fidelity_by_quadrature,
    fidelity_tmst_closed_form,
    report,
)

COHERENT = InputState.coherent()
SQUEEZED = InputState.squeezed_vacuum(1.7)

SUBTRACTION_SPECS = ("sym-1-PS", "sym-2-PS", "asym-1-PS", "asym-2-PS", "asym-1,2-PS", "asym-2,1-PS")
ADDITION_SPECS = ("sym-1-PA", "asym-1-PA", "sym-2-PA")


def _plain_tmst(params):
    """Vacuum herald at unit transmissivity: the bare resource"""
    return normalized_char(HeraldSpec(0, 0, 0, 0), params)


def test_input_state_validation():
    assert InputState.coherent(1.0, 2.0).label == "coherent"
    assert InputState.squeezed_vacuum(1.7).label == "sqvac(eps=1.7)"
    with pytest.raises(ParameterDomainError):
        InputState(kind="cat")
    with pytest.raises(ParameterDomainError):
        InputState.squeezed_vacuum(float("inf"))


@pytest.mark.parametrize("input_state", [COHERENT, SQUEEZED, InputState.squeezed_vacuum(0.4)])
def test_bare_resource_matches_closed_form(input_state, rng):
    for r, kappa in zip(rng.uniform(0.0, 1.5, 20), rng.uniform(0.5, 1.5, 20)):
        params = ThermalSqueezeParams(r, kappa)
        expected = fidelity_tmst_closed_form(params, input_state)
        assert fidelity(_plain_tmst(params), input_state) == pytest.approx(expected, abs=1e-12)


def test_baseline_values():
    assert fidelity_tmst_closed_form(ThermalSqueezeParams(0.0, 0.5), COHERENT) == pytest.approx(0.5)
    reference = fidelity_tmst_closed_form(ThermalSqueezeParams(0.64, 0.51), COHERENT)
    assert reference == pytest.approx(1.0 / (1.0 + 1.02 * math.exp(-1.28)))
    assert reference == pytest.approx(0.779, abs=3e-3)


def test_baseline_monotonicity():
    values_r = [fidelity_tmst_closed_form(ThermalSqueezeParams(r, 0.51), COHERENT) for r in np.linspace(0, 1.5, 16)]
    assert all(np.diff(values_r) > 0)
    values_kappa = [fidelity_tmst_closed_form(ThermalSqueezeParams(0.64, k), COHERENT) for k in np.linspace(0.5, 1.5, 11)]
    assert all(np.diff(values_kappa) < 0)


def test_operating_point_of_photon_subtraction(tmst_reference):
    rep = report(HeraldSpec.from_label("sym-1-PS", 0.78), tmst_reference, COHERENT)
    assert rep.F == pytest.approx(0.81, abs=0.01)
    assert rep.deltaF == pytest.approx(3.3e-2, abs=2e-3)
    assert rep.R == pytest.approx(8.2e-4, abs=6e-5)
    assert rep.R == pytest.approx(rep.deltaF * rep.P)


def test_operating_point_of_photon_catalysis():
    rep = report(HeraldSpec.from_label("sym-1-PC", 0.18), ThermalSqueezeParams(0.26, 0.5), COHERENT)
    assert rep.F == pytest.approx(0.70, abs=0.01)
    assert rep.P == pytest.approx(4.1e-2, abs=2e-3)
    assert rep.R == pytest.approx(2.9e-3, abs=2e-4)


def test_catalysis_at_unit_transmissivity_changes_nothing(tmst_reference):
    rep = report(HeraldSpec.from_label("sym-1-PC", 1.0), tmst_reference, COHERENT)
    assert rep.deltaF == pytest.approx(0.0, abs=1e-12)
    assert rep.P == pytest.approx(1.0)


def test_fidelity_does_not_depend_on_displacement(tmst_reference):
    resource = normalized_char(HeraldSpec.from_label("sym-1-PS", 0.78), tmst_reference)
    assert fidelity(resource, InputState.coherent(3.0, -2.0)) == fidelity(resource, COHERENT)


def test_report_row(tmst_reference):
    row = report(HeraldSpec.from_label("asym-1-PA", 0.5), tmst_reference, COHERENT).as_row()
    assert row["spec"] == "asym-1-PA"
    assert (row["T1"], row["T2"]) == (0.5, 1.0)
    assert row["deltaF"] == pytest.approx(row["F"] - row["F_base"])


@pytest.mark.parametrize("kappa", [0.75, 1.0])
def test_subtraction_from_classical_resource_stays_classical(kappa):
    threshold = classical_squeezing_threshold(kappa)
    for r in np.linspace(0.02, threshold, 5):
        params = ThermalSqueezeParams(r, kappa)
        for T in (0.1, 0.4, 0.7, 0.95):
            rep = report(HeraldSpec.from_label("sym-1-PS", T), params, COHERENT)
            assert rep.F <= CLASSICAL_FIDELITY_BOUND + 1e-9


@pytest.mark.slow
@pytest.mark.parametrize("label", SUBTRACTION_SPECS)
@pytest.mark.parametrize("kappa", [0.75, 1.0])
def test_subtraction_never_beats_the_classical_bound_from_classical_resources(label, kappa):
    template = HeraldSpec.from_label(label)
    checked = 0
    for r in np.linspace(0.0, classical_squeezing_threshold(kappa), 20):
        params = ThermalSqueezeParams(r, kappa)
        for T in np.linspace(0.05, 0.95, 20):
            rep = evaluate(template, params, COHERENT, T)
            if rep is not None:
                assert rep.F <= CLASSICAL_FIDELITY_BOUND + 1e-9
                checked += 1
    assert checked == 400


@pytest.mark.slow
@pytest.mark.parametrize("label", ADDITION_SPECS)
def test_addition_never_helps_coherent_inputs(label):
    template = HeraldSpec.from_label(label)
    grid = np.linspace(0.05, 1.0, 20)
    for r in make_grid(0.05, 1.0, 0.05):
        params = ThermalSqueezeParams(r, 0.51)
        result = optimize_over_T(template, params, COHERENT, T_grid=grid)
        assert result.value <= fidelity_tmst_closed_form(params, COHERENT) + 1e-9


def test_classical_thresholds():
    assert classical_squeezing_threshold(0.5) == 0.0
    assert classical_squeezing_threshold(0.75) == pytest.approx(0.2027, abs=1e-4)
    assert classical_squeezing_threshold(1.0) == pytest.approx(0.3466, abs=1e-4)


@pytest.mark.parametrize("r", [0.2, 0.5, 0.8])
def test_subtraction_beats_and_addition_trails_the_baseline(r):
    params = ThermalSqueezeParams(r, 0.51)
    grid = np.linspace(0.05, 1.0, 20)
    subtraction = optimize_over_T(HeraldSpec.from_label("sym-1-PS"), params, COHERENT, T_grid=grid)
    addition = optimize_over_T(HeraldSpec.from_label("sym-1-PA"), params, COHERENT, T_grid=grid)
    baseline = fidelity_tmst_closed_form(params, COHERENT)
    assert subtraction.value > baseline
    assert addition.value <= baseline + 1e-9


@pytest.mark.parametrize("r", [0.3, 0.6, 0.9])
def test_two_photon_subtraction_beats_one(r):
    params = ThermalSqueezeParams(r, 0.51)
    grid = np.linspace(0.05, 1.0, 20)
    one = optimize_over_T(HeraldSpec.from_label("sym-1-PS"), params, COHERENT, T_grid=grid)
    two = optimize_over_T(HeraldSpec.from_label("sym-2-PS"), params, COHERENT, T_grid=grid)
    assert two.value > one.value


@pytest.mark.slow
def test_addition_can_help_squeezed_inputs():
    grid = np.linspace(0.05, 1.0, 20)
    gains = []
    for r in np.arange(0.1, 1.01, 0.1):
        params = ThermalSqueezeParams(r, 0.51)
        result = optimize_over_T(HeraldSpec.from_label("sym-1-PA"), params, SQUEEZED, T_grid=grid)
        gains.append(result.value - fidelity_tmst_closed_form(params, SQUEEZED))
    assert max(gains) > 1e-4


@pytest.mark.slow
@pytest.mark.parametrize("label, T", [("sym-1-PS", 0.78), ("asym-1-PA", 0.4), ("sym-1-PC", 0.18)])
@pytest.mark.parametrize("input_state", [COHERENT, SQUEEZED])
def test_closed_form_matches_quadrature(label, T, input_state, tmst_reference):
    resource = normalized_char(HeraldSpec.from_label(label, T), tmst_reference)
    assert fidelity(resource, input_state) == pytest.approx(fidelity_by_quadrature(resource, input_state), abs=1e-7)
