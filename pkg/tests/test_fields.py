import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stalab import algebra as ga
from stalab.boosts import boost_matrix
from stalab.em import coulomb_field, pullback_field
from stalab.fields import (EventGrid, Field, SampledField, central_partials, constant_field,
                           convergence_study, dirac_operator_flat, dirac_split, grid_partials,
                           maxwell_residual, product_field, residual_report, reverse_field, sample,
                           sandwich_field)

ZERO = constant_field(np.zeros(ga.N_BLADES))
CENTER = (0.0, 2.0, 1.0, 0.5)


def linear_field(B, mu=0):
    return Field(lambda x: x[..., mu, None] * B, None, None, "linear")


def test_constant_field_has_zero_dirac(events):
    F = constant_field(ga.blade(0, 2, coeff=3.0))
    assert np.abs(dirac_operator_flat(F, events)).max() == 0.0
    assert np.abs(dirac_operator_flat(F.without_partials(), events)).max() < 1e-10


def test_linear_field_dirac_exact(events):
    B = ga.blade(1, 2)
    dF = dirac_operator_flat(linear_field(B), events, h=1e-2)
    expect = ga.geometric_product(ga.GAMMA_UP[0], B)
    assert np.allclose(dF, expect, atol=1e-12)
    w, c = dirac_split(central_partials(linear_field(B).fn, events, 1e-2))
    assert np.allclose(w + c, dF, atol=1e-12)
    assert ga.is_grade(w[0], 3) and np.allclose(c, 0, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.floats(-0.9, 0.9))
def test_grid_split_matches_grades(v):
    grid = EventGrid.centered(CENTER, 0.1, 5)
    s = sample(pullback_field(boost_matrix(v)[0], coulomb_field(1.0)), grid)
    parts, valid = grid_partials(s)
    dF, _ = dirac_operator_flat(s)
    w, c = dirac_split(parts)
    assert np.abs(ga.grade_project(dF, 3) - w)[valid].max() < 1e-12
    assert np.abs(ga.grade_project(dF, 1) - c)[valid].max() < 1e-12


def test_coulomb_residual_second_order():
    study = convergence_study(coulomb_field(1.0), ZERO, CENTER, (0.1, 0.05, 0.025), 17)
    assert all(3.6 <= r <= 4.4 for r in study.ratios)
    assert study.common_events > 0


def test_wrong_field_detected():
    F = coulomb_field(1.0)
    bad = Field(lambda x: F.fn(x) + x[..., 1, None] * ga.blade(2, 3), None, F.singular_distance, "bad")
    res = maxwell_residual(bad, ZERO, EventGrid.centered(CENTER, 0.05, 9))
    assert res.l2() > 0.5


def test_grid_budget_and_validation():
    with pytest.raises(ValueError):
        EventGrid.centered(CENTER, 0.1, 34)
    with pytest.raises(ValueError):
        EventGrid((0, 0, 0, 0), -1.0, (3, 3, 3, 3))
    with pytest.raises(ValueError):
        SampledField(EventGrid.centered(CENTER, 0.1, 3), np.zeros((3, 3, 3, 2, 16)))


def test_singular_events_are_excluded():
    grid = EventGrid.centered((0, 0, 0, 0), 0.1, 5)
    s = sample(coulomb_field(1.0), grid)
    assert not s.valid[2, 2, 2, 2]
    assert np.count_nonzero(~s.valid) > 1
    res = maxwell_residual(coulomb_field(1.0), ZERO, grid)
    assert res.excluded == res.valid.size and np.isnan(res.l2())
    res = maxwell_residual(coulomb_field(1.0), ZERO, EventGrid.centered((0, 0, 0, 0), 0.1, 11))
    assert 0 < res.excluded < res.valid.size and np.isfinite(res.l2())


def test_spacings_must_refine():
    with pytest.raises(ValueError):
        convergence_study(coulomb_field(1.0), ZERO, CENTER, (0.1, 0.07), 9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_product_rule_partials(seed):
    rng = np.random.default_rng(seed)
    A0, A1, C = rng.normal(size=(3, 16))
    e1, e2 = np.eye(4)[1], np.eye(4)[2]
    a = Field(lambda x: A0 + np.sin(x[..., 1, None]) * A1,
              lambda x: np.cos(x[..., 1, None, None]) * e1[:, None] * A1)
    b = Field(lambda x: (1 + x[..., 2, None]) * C,
              lambda x: np.broadcast_to(e2[:, None] * C, x.shape[:-1] + (4, 16)).copy())
    x = rng.uniform(-1, 1, size=(3, 4))
    for f in (product_field(a, b), reverse_field(a), sandwich_field(a, b)):
        fd = central_partials(f.fn, x, 1e-5)
        assert np.allclose(f.partials(x), fd, atol=1e-7 * (1 + np.abs(fd).max()))


def test_residual_report_shape():
    L, _ = boost_matrix(0.6)
    rep = residual_report("t", pullback_field(L, coulomb_field(1.0)), ZERO, CENTER, 0.1, 9)
    assert set(rep) == {"scenario", "h", "residual_l2", "residual_linf", "excluded_points", "convergence_order"}
    assert 1.8 < rep["convergence_order"] < 2.2
