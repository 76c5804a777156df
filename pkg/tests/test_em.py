import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grade_part, rotors, velocities
from stalab import algebra as ga
from stalab.boosts import boost_matrix, frame_triple, rotor_from_velocity
from stalab.em import (ProbeCharge, WorldlineAborted, bivector_from_tensor, boosted_coulomb_closed_form,
                       coulomb_field, eb_decompose, from_eb, integrate_worldline,
                       lienard_wiechert_uniform, maxwell_action_density, moving_charge_prime_frame,
                       pullback_field, tensor_from_bivector)
from stalab.fields import SingularityError, constant_field


def _E(F):
    return eb_decompose(F).E


def test_coulomb_on_axis(events):
    F = coulomb_field(1.0)
    assert np.allclose(_E(F(np.array([0.3, 1.0, 0.0, 0.0]))), [1, 0, 0], atol=1e-15)
    # 1/r² at r = 2
    assert np.allclose(_E(F(np.array([0.0, 0.0, 2.0, 0.0]))), [0, 0.25, 0], atol=1e-15)
    assert np.abs(eb_decompose(F(events)).B).max() == 0.0


def test_coulomb_singular_at_origin():
    with pytest.raises(SingularityError):
        coulomb_field(1.0)(np.zeros(4))


def test_pullback_identity_reproduces_field(events):
    F = coulomb_field(2.0)
    assert np.allclose(pullback_field(np.eye(4), F)(events), F(events), atol=1e-15)


def test_pullback_transverse_event():
    L, _ = boost_matrix(0.6)
    s = eb_decompose(pullback_field(L, coulomb_field(1.0))(np.array([0.0, 0.0, 1.0, 0.0])))
    assert np.allclose(s.E, [0, 1.25, 0], atol=1e-14)
    assert np.allclose(s.B, [0, 0, -0.75], atol=1e-14)


def test_zero_velocity_oracles_equal_coulomb(events):
    F = coulomb_field(1.0)(events)
    assert np.allclose(boosted_coulomb_closed_form(1.0, 0.0)(events), F, atol=1e-14)
    assert np.allclose(lienard_wiechert_uniform(1.0, (0, 0, 0))(events), F, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(velocities, st.floats(-2, 2))
def test_oracle_triangle(v, shift):
    x = np.array([[0.2, 1.1, -0.7, 0.4], [-1.0, -0.5, 1.3, -0.9]])
    L, _ = boost_matrix(v)
    a = pullback_field(L, coulomb_field(1.0))(x)
    b = boosted_coulomb_closed_form(1.0, v)(x)
    c = lienard_wiechert_uniform(1.0, (-v, 0.0, 0.0))(x)
    scale = ga.norm(a)[:, None]
    assert np.abs((a - b) / scale).max() < 1e-12
    assert np.abs((a - c) / scale).max() < 1e-12
    # stationary in the co-moving sense: shift time and charge position together
    y = x + shift * np.array([1.0, -v, 0.0, 0.0])
    assert np.allclose(lienard_wiechert_uniform(1.0, (-v, 0.0, 0.0))(y), c, atol=1e-12)


@given(velocities)
def test_magnetic_field_is_v_cross_e(v):
    x = np.array([0.4, 0.9, -1.2, 0.5])
    s = eb_decompose(boosted_coulomb_closed_form(1.0, v)(x))
    assert np.allclose(s.B, np.cross([-v, 0, 0], s.E), atol=1e-12)


@given(grade_part(2))
def test_eb_round_trip(F):
    s = eb_decompose(F)
    assert np.abs(s.reconstruct() - F).max() < 1e-14
    assert np.abs(from_eb(s.E, s.B) - F).max() < 1e-14


@given(grade_part(2))
def test_tensor_round_trip(F):
    T = tensor_from_bivector(F)
    assert np.allclose(T, -np.swapaxes(T, -1, -2))
    assert np.abs(bivector_from_tensor(T) - F).max() < 1e-14


def test_pure_electric_split():
    s = eb_decompose(ga.blade(1, 0, coeff=1.7))
    assert np.allclose(s.E, [1.7, 0, 0]) and np.allclose(s.B, 0)


def test_eb_decompose_rejects_non_bivector():
    with pytest.raises(ga.ContractViolation):
        eb_decompose(ga.blade(1))


def test_prime_frame_split_matches_moving_charge():
    rng = np.random.default_rng(3)
    x = rng.uniform(-2, 2, size=(20, 4))
    x[:, 1:] += np.sign(x[:, 1:])
    v = 0.6
    F = coulomb_field(1.0)(x)
    ref = moving_charge_prime_frame(1.0, v, x)
    split = eb_decompose(F, frame_triple(v).prime)
    assert np.allclose(split.E, ref.E, atol=1e-14) and np.allclose(split.B, ref.B, atol=1e-14)
    # the same components from the g-frame split of the sandwiched field
    moved = eb_decompose(ga.sandwich(rotor_from_velocity(-v), F))
    assert np.allclose(moved.E, ref.E, atol=1e-14) and np.allclose(moved.B, ref.B, atol=1e-14)


def test_action_density_values():
    assert maxwell_action_density(ga.blade(0, 1)) == pytest.approx(-1.0)
    assert maxwell_action_density(np.zeros(ga.N_BLADES)) == 0.0


@given(grade_part(2), rotors())
def test_action_density_rotor_invariant(F, R):
    a = maxwell_action_density(F)
    b = maxwell_action_density(ga.sandwich(R, F))
    assert abs(a - b) <= 1e-10 * (1 + abs(a) + ga.norm(F) ** 2)


def test_free_worldline_is_straight():
    v = np.array([1.25, 0.75, 0.0, 0.0])
    traj = integrate_worldline(ProbeCharge(1.0, 1.0, np.zeros(4), v), constant_field(np.zeros(16)), 0.1, 20)
    assert traj.shape == (21, 9)
    assert np.allclose(traj[:, 1:5], traj[:, :1] * v, atol=1e-13)
    assert np.allclose(traj[:, 5:], v)


def test_uniform_electric_field_hyperbolic_motion():
    a = 0.7
    F = constant_field(ga.blade(1, 0, coeff=a))
    traj = integrate_worldline(ProbeCharge(1.0, 1.0, np.zeros(4), np.array([1.0, 0, 0, 0])), F, 0.01, 200)
    tau = traj[:, 0]
    assert np.allclose(traj[:, 1], np.sinh(a * tau) / a, atol=1e-9)
    assert np.allclose(traj[:, 2], -(np.cosh(a * tau) - 1) / a, atol=1e-9)


def test_worldline_aborts_at_singularity():
    charge = ProbeCharge(1.0, 1.0, np.array([0.0, 1.0, 0.0, 0.0]), np.array([1.0, 0, 0, 0]))
    with pytest.raises(WorldlineAborted) as info:
        integrate_worldline(charge, coulomb_field(1.0), 0.05, 400)
    assert info.value.trajectory.shape[1] == 9


def test_probe_charge_validation():
    with pytest.raises(ValueError):
        ProbeCharge(0.0, 1.0, np.zeros(4), np.array([1.0, 0, 0, 0]))
    with pytest.raises(ValueError):
        ProbeCharge(1.0, 0.0, np.zeros(4), np.array([1.0, 0, 0, 0]))
