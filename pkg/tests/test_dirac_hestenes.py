import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stalab import algebra as ga
from stalab.connections import ConnectionField, TetradField
from stalab.dirac_hestenes import (GaugeModel, SpinorField, active_gauge_lagrangian_check, dh_lagrangian,
                                   dh_residual, dh_residual_norm, passive_gauge_lagrangian_check,
                                   spin_dirac_operator)
from stalab.fields import central_partials, constant_field, product_field, reverse_field
from stalab.rotor_gauge import RotorField, rotor_presets

FLAT = GaugeModel.flat()
MODELS = {
    "flat": FLAT,
    "rotating": GaugeModel(TetradField.rotating(0.5), ConnectionField.rotating_levi_civita(0.5)),
    "torsional": GaugeModel.flat(ConnectionField.torsional(0.4)),
}
masses = st.floats(0.1, 3.0)


def test_linear_spinor_rejects_odd_coefficients():
    with pytest.raises(ga.ContractViolation):
        SpinorField.linear(ga.GAMMA[1], np.zeros((4, 16)))
    with pytest.raises(ValueError):
        SpinorField.linear(np.zeros(8), np.zeros((4, 16)))


def test_constant_spinor_has_zero_operator(events):
    psi = SpinorField.wrap(constant_field(ga.blade(1, 2, coeff=0.4) + ga.blade()))
    assert np.allclose(spin_dirac_operator(psi, FLAT, events), 0)
    assert np.allclose(dh_residual_norm(psi, 0.0, FLAT, events), 0)


@settings(max_examples=20, deadline=None)
@given(masses)
def test_rest_plane_wave(m):
    x = np.random.default_rng(0).uniform(-2, 2, size=(10, 4))
    psi = SpinorField.rest_plane_wave(m)
    assert np.allclose(psi.partials(x), central_partials(psi.fn, x, 1e-5), atol=1e-8)
    expect = -m * ga.geometric_product(ga.geometric_product(ga.GAMMA_UP[0], ga.blade(2, 1)), psi.fn(x))
    assert np.allclose(spin_dirac_operator(psi, FLAT, x), expect, atol=1e-13)
    assert dh_residual_norm(psi, m, FLAT, x).max() <= 1e-10
    L = dh_lagrangian(psi, m, FLAT, x)
    assert np.ptp(L) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(masses, st.floats(-0.9, 0.9))
def test_boosted_plane_wave_in_rotated_gauge(m, v):
    x = np.random.default_rng(1).uniform(-2, 2, size=(10, 4))
    model = FLAT.active(RotorField.boost(v))
    assert dh_residual_norm(SpinorField.boosted_plane_wave(m, v), m, model, x).max() <= 1e-10


@pytest.mark.parametrize("name", sorted(MODELS))
def test_operator_is_odd(name, events):
    out = spin_dirac_operator(SpinorField.generic_even(), MODELS[name], events)
    assert ga.is_grade(out, (1, 3))


@pytest.mark.parametrize("model", sorted(MODELS))
@pytest.mark.parametrize("rotor", sorted(rotor_presets()))
def test_gauge_covariance_of_operator(model, rotor, events):
    base, R = MODELS[model], rotor_presets()[rotor]
    psi = SpinorField.generic_even(3)
    Rx = R.fn(events)
    D = spin_dirac_operator(psi, base, events)
    passive = spin_dirac_operator(product_field(psi, reverse_field(R)), base.passive(R), events)
    assert np.abs(passive - ga.geometric_product(D, ga.reverse(Rx))).max() <= 1e-10
    active = spin_dirac_operator(product_field(R, psi), base.active(R), events)
    assert np.abs(active - ga.geometric_product(Rx, D)).max() <= 1e-10


def test_torsion_term_is_residual_difference(events):
    model = MODELS["torsional"]
    psi = SpinorField.generic_even()
    diff = dh_residual(psi, 1.3, model, events) - dh_residual(psi, 1.3, model, events, include_torsion=False)
    T = 0.4 * ga.GAMMA_UP[0]
    expect = 0.5 * ga.geometric_product(ga.geometric_product(T, psi.fn(events)), model.right(events, 0, 2, 1))
    assert np.abs(diff - expect).max() <= 1e-14
    assert np.allclose(model.torsion_covector(events), T)
    assert np.allclose(dh_residual(psi, 1.3, FLAT, events),
                       dh_residual(psi, 1.3, FLAT, events, include_torsion=False))


def test_right_factors_follow_printed_order():
    assert np.allclose(FLAT.right(np.zeros(4), 0, 2, 1), ga.blade(0, 2, 1))
    assert np.allclose(FLAT.right(np.zeros(4), 2, 1), ga.blade(2, 1))


def test_zero_spinor_lagrangian(events):
    zero = SpinorField.wrap(constant_field(np.zeros(16)))
    assert np.array_equal(dh_lagrangian(zero, 1.0, FLAT, events), np.zeros(len(events)))


@pytest.mark.parametrize("model", sorted(MODELS))
@pytest.mark.parametrize("rotor", sorted(rotor_presets()))
def test_lagrangian_gauge_invariance(model, rotor, events):
    base, R = MODELS[model], rotor_presets()[rotor]
    psi = SpinorField.generic_even()
    assert passive_gauge_lagrangian_check(R, psi, 1.3, base, events)["deviation"] <= 1e-10
    rep = active_gauge_lagrangian_check(R, psi, 1.3, base, events)
    assert rep["transform_connection"] and rep["deviation"] <= 1e-10


def test_lagrangian_identity_and_constant_rotors(events):
    psi = SpinorField.generic_even()
    assert active_gauge_lagrangian_check(RotorField.identity(), psi, 1.3, FLAT, events)["deviation"] == 0.0
    for name in ("boost-0.6", "rotation"):
        assert active_gauge_lagrangian_check(rotor_presets()[name], psi, 1.3, FLAT, events)["deviation"] <= 1e-12


def test_untransformed_connection_breaks_invariance(events):
    psi = SpinorField.generic_even()
    rep = active_gauge_lagrangian_check(rotor_presets()["local-product"], psi, 1.3, FLAT, events, False)
    assert rep["deviation"] > 1e-3
