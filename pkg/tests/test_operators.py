"""
Tests for the structure algebra, involutions, operator exponentials and op_norm.
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conelab.algebras import make_algebra
from conelab.elements import Element, LinOp
from conelab.errors import StructureResidualError
from conelab.jordan import exp, inverse, jb_norm, l_operator, random_element, random_positive, u_operator
from conelab.operators import (
    commutator,
    dagger,
    derivation_residual,
    in_structure_algebra,
    is_automorphism,
    op_exp,
    op_norm,
    overline,
    random_derivation,
    require_str,
    sigma,
    sigma_star,
    sinh_ad_apply,
    sinh_ad_oracle,
    split_str,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


# ============= Cartan splitting =============

def test_split_of_multiplication_operator(algebra, rng):
    v = random_element(algebra, rng)
    parts = split_str(l_operator(v))
    np.testing.assert_allclose(parts.l_part.coords, v.coords, atol=1e-13)
    np.testing.assert_allclose(parts.der_part.entries, 0.0, atol=1e-13)
    assert parts.derivation_residual == pytest.approx(0.0, abs=1e-13)


def test_split_of_inner_derivation(algebra, rng):
    a, b = random_element(algebra, rng), random_element(algebra, rng)
    d = commutator(l_operator(a), l_operator(b))
    parts = split_str(d, strict=True)
    np.testing.assert_allclose(parts.l_part.coords, 0.0, atol=1e-12)
    np.testing.assert_allclose(parts.der_part.entries, d.entries, atol=1e-12)
    assert parts.derivation_residual < 1e-10
    np.testing.assert_allclose(parts.reconstruct().entries, d.entries, atol=1e-12)


@given(seed=seeds)
def test_str_members_have_small_residual(algebra, seed):
    rng = np.random.default_rng(seed)
    h = l_operator(random_element(algebra, rng)) + random_derivation(algebra, rng)
    assert in_structure_algebra(h) < 1e-9


def test_dense_operator_is_not_in_str(sym3, rng):
    h = LinOp(sym3, rng.normal(size=(sym3.dim, sym3.dim)))
    assert in_structure_algebra(h) > 1e-3
    with pytest.raises(StructureResidualError):
        require_str(h)
    with pytest.raises(StructureResidualError):
        dagger(h)


def test_zero_operator_is_in_str(sym2):
    assert in_structure_algebra(LinOp.zeros(sym2)) == 0.0


def test_rn_has_no_inner_derivations():
    algebra = make_algebra("rn:4")
    np.testing.assert_allclose(random_derivation(algebra, 7).entries, 0.0, atol=1e-14)


# ============= Involutions =============

def test_dagger_flips_derivation_part(algebra, rng):
    x = random_element(algebra, rng)
    d = random_derivation(algebra, rng)
    h = l_operator(x) + d
    np.testing.assert_allclose(dagger(h).entries, (l_operator(x) - d).entries, atol=1e-12)
    np.testing.assert_allclose(dagger(dagger(h)).entries, h.entries, atol=1e-12)
    np.testing.assert_allclose(sigma_star(h).entries, (d - l_operator(x)).entries, atol=1e-12)


def test_dagger_is_coordinate_transpose(algebra, rng):
    # trace-orthonormal bases make L_x symmetric and derivations antisymmetric
    h = l_operator(random_element(algebra, rng)) + random_derivation(algebra, rng)
    np.testing.assert_allclose(dagger(h).entries, h.entries.T, atol=1e-12)


def test_overline_is_minus_dagger_on_str(algebra, rng):
    h = l_operator(random_element(algebra, rng)) + random_derivation(algebra, rng)
    np.testing.assert_allclose(overline(h).entries, -dagger(h).entries, atol=1e-12)


# ============= Exponentials =============

def test_exp_of_derivation_is_automorphism(algebra, rng):
    d = random_derivation(algebra, rng)
    k = op_exp(d)
    assert is_automorphism(k) < 1e-8
    unit = Element.unit(algebra)
    np.testing.assert_allclose(k.apply(unit).coords, unit.coords, atol=1e-12)
    np.testing.assert_allclose(sigma(k).entries, k.entries, atol=1e-10)


def test_exp_of_multiplication_moves_unit_to_exp(algebra, rng):
    x = random_element(algebra, rng)
    np.testing.assert_allclose(
        op_exp(l_operator(x)).apply(Element.unit(algebra)).coords,
        exp(x).coords,
        atol=1e-10 * (1.0 + exp(x).norm2()),
    )


def test_dense_operator_is_not_an_automorphism(sym2, rng):
    k = LinOp(sym2, np.eye(sym2.dim) + 0.5 * rng.normal(size=(3, 3)))
    assert is_automorphism(k) > 1e-3


def test_sigma_inverts_quadratic_representation(algebra, rng):
    x = random_positive(algebra, rng, 0.6)
    np.testing.assert_allclose(sigma(u_operator(x)).entries, u_operator(inverse(x)).entries, atol=1e-8)


def test_sigma_is_an_involution(algebra, rng):
    g = op_exp(l_operator(random_element(algebra, rng, 0.5)) + random_derivation(algebra, rng, scale=0.5))
    np.testing.assert_allclose(sigma(sigma(g)).entries, g.entries, atol=1e-8)


# ============= Operator norm =============

def test_op_norm_of_identity(algebra):
    estimate = op_norm(LinOp.identity(algebra))
    assert estimate.estimate == pytest.approx(1.0, abs=1e-12)
    assert estimate.lower_bound == pytest.approx(1.0, abs=1e-12)


def test_op_norm_of_multiplication_is_element_norm(algebra, rng):
    v = random_element(algebra, rng)
    estimate, lower = op_norm(l_operator(v), seed=3)
    assert lower <= estimate
    assert estimate == pytest.approx(jb_norm(v), rel=1e-9)


def test_op_norm_witness_is_feasible(sym3, rng):
    h = LinOp(sym3, rng.normal(size=(sym3.dim, sym3.dim)))
    result = op_norm(h, restarts=6, iterations=20, seed=11)
    assert jb_norm(result.witness) <= 1.0 + 1e-12
    assert jb_norm(h.apply(result.witness)) == pytest.approx(result.estimate, rel=1e-12)
    assert result.lower_bound <= result.estimate


def test_op_norm_without_iterations_reports_best_start(sym2):
    h = LinOp(sym2, np.diag([2.0, -1.0, 0.5]))
    result = op_norm(h, restarts=0, iterations=0)
    assert result.estimate == result.lower_bound


def test_op_norm_extra_start_is_used(sym2, rng):
    h = l_operator(random_element(sym2, rng)) + random_derivation(sym2, rng)
    plain = op_norm(h, restarts=0, iterations=0)
    witness = op_norm(h, restarts=8, iterations=20, seed=1).witness
    boosted = op_norm(h, restarts=0, iterations=0, extra_starts=[witness])
    assert boosted.lower_bound >= plain.lower_bound


@given(c=st.sampled_from([0.25, 7.0, -3.0]), seed=seeds)
def test_op_norm_is_absolutely_homogeneous(sym3, c, seed):
    h = LinOp(sym3, np.random.default_rng(seed).normal(size=(sym3.dim, sym3.dim)))
    base = op_norm(h, restarts=6, iterations=20, seed=5)
    scaled = op_norm(h * c, restarts=6, iterations=20, seed=5)
    assert scaled.lower_bound == pytest.approx(abs(c) * base.lower_bound, rel=1e-12)
    assert scaled.estimate == pytest.approx(abs(c) * base.estimate, rel=1e-6)


# ============= sinh(ad)/ad =============

def test_sinh_ad_quadrature_matches_eigen_oracle(algebra, rng):
    x, y = random_element(algebra, rng), random_element(algebra, rng)
    np.testing.assert_allclose(sinh_ad_apply(x, y).coords, sinh_ad_oracle(x, y).coords, atol=1e-9)


def test_sinh_ad_at_zero_is_identity(algebra, rng):
    y = random_element(algebra, rng)
    zero = Element.zero(algebra)
    np.testing.assert_allclose(sinh_ad_apply(zero, y).coords, y.coords, atol=1e-13)
    np.testing.assert_allclose(sinh_ad_oracle(zero, y).coords, y.coords, atol=1e-12)


def test_derivation_residual_of_multiplication(sym2):
    # L_1 is the identity: I(a o b) != a o b + a o b
    assert derivation_residual(LinOp.identity(sym2), strict=True) > 0.5
