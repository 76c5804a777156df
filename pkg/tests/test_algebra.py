import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.linalg import expm

from conftest import grade_part, multivectors, rotors
from stalab import algebra as ga
from stalab.algebra import GAMMA, TAU, ContractViolation, Multivector


def mr(a):
    return ga.matrix_rep(a)


def test_generator_squares_and_anticommutators():
    for mu in range(4):
        for nu in range(4):
            anti = ga.geometric_product(GAMMA[mu], GAMMA[nu]) + ga.geometric_product(GAMMA[nu], GAMMA[mu])
            expected = np.zeros(16)
            expected[0] = 2 * ga.ETA[mu, nu]
            assert np.array_equal(anti, expected)


def test_distinct_generators_anticommute():
    g12 = ga.geometric_product(GAMMA[1], GAMMA[2])
    assert np.array_equal(g12, ga.wedge(GAMMA[1], GAMMA[2]))
    assert np.array_equal(ga.geometric_product(GAMMA[2], GAMMA[1]), -g12)


def test_null_product_of_boost_idempotents():
    b = ga.blade(0, 1)
    out = ga.geometric_product(ga.blade() + b, ga.blade() - b)
    assert np.allclose(out, 0.0, atol=0)
    assert np.allclose(mr(ga.blade() + b) @ mr(ga.blade() - b), 0.0, atol=1e-15)


@given(multivectors, multivectors)
def test_matrix_rep_is_homomorphism(a, b):
    assert np.allclose(mr(ga.geometric_product(a, b)), mr(a) @ mr(b), atol=1e-12, rtol=0)


def test_matrix_rep_basics():
    assert np.allclose(mr(ga.blade()), np.eye(4))
    assert np.allclose(mr(GAMMA[0]) @ mr(GAMMA[0]), np.eye(4))


@given(multivectors, multivectors, multivectors)
def test_associativity(a, b, c):
    lhs = ga.geometric_product(ga.geometric_product(a, b), c)
    rhs = ga.geometric_product(a, ga.geometric_product(b, c))
    assert np.allclose(lhs, rhs, atol=1e-12 * max(1.0, np.abs(lhs).max()), rtol=0)


def test_wedge_and_contraction_examples():
    assert np.array_equal(ga.wedge(GAMMA[0], GAMMA[1]), ga.blade(0, 1))
    assert not np.any(ga.wedge(GAMMA[0], GAMMA[0]))
    assert np.array_equal(ga.left_contraction(GAMMA[1], ga.blade(1, 2)), -GAMMA[2])


@given(grade_part(1), multivectors)
def test_vector_product_splits_into_contraction_and_wedge(v, b):
    split = ga.left_contraction(v, b) + ga.wedge(v, b)
    assert np.allclose(ga.geometric_product(v, b), split, atol=1e-12)


def test_reverse_grade_projection_scalar_product():
    assert np.array_equal(ga.reverse(ga.blade(0, 1)), -ga.blade(0, 1))
    a = ga.blade() + GAMMA[0] + ga.blade(0, 1)
    assert np.array_equal(ga.grade_project(a, 1), GAMMA[0])
    assert ga.scalar_product(ga.blade(0, 1), ga.blade(0, 1)) == -1.0
    for k in (-1, 5):
        with pytest.raises(ContractViolation):
            ga.grade_project(a, k)


@given(multivectors, multivectors)
def test_reverse_is_antiautomorphism(a, b):
    lhs = ga.reverse(ga.geometric_product(a, b))
    rhs = ga.geometric_product(ga.reverse(b), ga.reverse(a))
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_hodge_star_contract_on_all_blades():
    for i in range(16):
        for j in range(16):
            if ga.GRADE[i] != ga.GRADE[j]:
                continue
            A, B = np.eye(16)[i], np.eye(16)[j]
            assert np.array_equal(ga.wedge(A, ga.hodge_star(B)), ga.scalar_product(A, B) * TAU)


def test_hodge_star_of_one_and_double_star_on_bivectors():
    assert np.array_equal(ga.hodge_star(ga.blade()), TAU)
    for b in np.flatnonzero(ga.GRADE == 2):
        B = np.eye(16)[b]
        assert np.array_equal(ga.hodge_star(ga.hodge_star(B)), -B)
    F = ga.blade(0, 1)
    assert np.array_equal(ga.wedge(F, ga.hodge_star(F)), ga.scalar_product(F, F) * TAU)


@given(multivectors)
def test_pseudoscalar_commutes_with_even(a):
    e = ga.even_part(a)
    assert np.allclose(ga.geometric_product(TAU, e), ga.geometric_product(e, TAU), atol=1e-12)


def test_exp_bivector_boost():
    chi = math.atanh(0.6)
    R = ga.exp_bivector(ga.blade(1, 0, coeff=chi / 2))
    expected = math.cosh(chi / 2) * ga.blade() + math.sinh(chi / 2) * ga.blade(1, 0)
    assert np.allclose(R, expected, atol=1e-15)
    assert np.allclose(ga.sandwich(R, GAMMA[0]), 1.25 * GAMMA[0] + 0.75 * GAMMA[1], atol=1e-14)
    assert np.array_equal(ga.exp_bivector(np.zeros(16)), ga.blade())


def test_exp_bivector_quarter_turn_against_matrices():
    # the sandwich turns by twice the exponent's angle
    R = ga.exp_bivector(ga.blade(2, 1, coeff=math.pi / 4))
    out = ga.sandwich(R, GAMMA[1])
    assert np.allclose(np.abs(out), np.abs(GAMMA[2]), atol=1e-14)
    assert np.allclose(mr(out), mr(R) @ mr(GAMMA[1]) @ mr(ga.reverse(R)), atol=1e-14)
    half = ga.exp_bivector(ga.blade(2, 1, coeff=math.pi / 2))
    assert np.allclose(ga.sandwich(half, GAMMA[1]), -GAMMA[1], atol=1e-14)


def test_exp_bivector_series_branch():
    B = ga.blade(0, 1, coeff=0.3) + ga.blade(2, 3, coeff=0.2) + ga.blade(1, 2, coeff=-0.4)
    R = ga.exp_bivector(B)
    assert ga.rotor_defect(R) < 1e-12
    assert np.allclose(mr(R), expm(mr(B)), atol=1e-12)


def test_exp_bivector_rejects_non_bivectors():
    with pytest.raises(ContractViolation):
        ga.exp_bivector(GAMMA[0])


@settings(max_examples=100)
@given(rotors(), multivectors)
def test_sandwich_isometry_and_grades(R, a):
    ga.assert_rotor(R)
    out = ga.sandwich(R, a)
    assert np.isclose(ga.scalar_product(out, out), ga.scalar_product(a, a), atol=1e-9 * (1 + np.abs(a).max() ** 2) * 50)
    for k in range(5):
        assert np.allclose(ga.grade_project(out, k), ga.sandwich(R, ga.grade_project(a, k)), atol=1e-9)
    assert np.array_equal(ga.sandwich(ga.blade(), a), a)


def test_assert_rotor_rejects_non_unit():
    with pytest.raises(ContractViolation):
        ga.assert_rotor(2.0 * ga.blade())
    with pytest.raises(ContractViolation):
        ga.assert_rotor(GAMMA[0])


def test_multivector_wrapper_and_json():
    a = Multivector.from_blade(0) + 2.0
    b = Multivector.from_blade(1)
    assert (a * b).allclose(ga.geometric_product(a.coeffs, b.coeffs))
    assert (b ^ b).allclose(0.0)
    assert (b << Multivector.from_blade(1, 2)).allclose(-GAMMA[2])
    assert (~Multivector.from_blade(0, 1)).allclose(-ga.blade(0, 1))
    text = a.to_json()
    assert json.loads(text)[0] == 2.0
    assert Multivector.from_json(text).allclose(a)
    with pytest.raises(ContractViolation):
        Multivector.from_json("[1, 2]")
    with pytest.raises(ValueError):
        a.coeffs[0] = 1.0
