"""
Tests for elements, spectral theory, functional calculus and norms.
"""

import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from conelab.algebras import make_algebra
from conelab.elements import Element, LinOp
from conelab.errors import AlgebraMismatchError, DomainError, SingularElementError
from conelab.jordan import (
    GaugeFunction,
    element_norm,
    exp,
    functional_derivative,
    gauge_norm,
    in_cone,
    inv_sqrt,
    inverse,
    jb_norm,
    log,
    power,
    random_element,
    random_positive,
    sorted_moduli,
    spectral_decompose,
    sqrt,
    trace,
    trace_inner,
    u_bilinear,
    u_operator,
    v_operator,
    l_operator,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


# ============= Elements and operators =============

def test_element_is_read_only(sym2):
    x = Element.unit(sym2)
    with pytest.raises(ValueError):
        x.coords[0] = 5.0


def test_element_shape_checked(sym2):
    with pytest.raises(ValueError):
        Element(sym2, np.zeros(4))


def test_mixing_algebras_raises(sym2, spin4):
    with pytest.raises(AlgebraMismatchError):
        Element.unit(sym2) + Element.unit(make_algebra("sym:3"))
    with pytest.raises(AlgebraMismatchError):
        LinOp.identity(spin4).apply(Element.unit(sym2))


def test_singular_operator_inverse(sym2):
    with pytest.raises(SingularElementError):
        LinOp.zeros(sym2).inverse()


def test_u_operator_is_sandwich_in_sym(sym3, rng):
    xm, ym = (m + m.T for m in rng.normal(size=(2, 3, 3)))
    x, y = Element.from_matrix(sym3, xm), Element.from_matrix(sym3, ym)
    np.testing.assert_allclose(u_operator(x).apply(y).to_matrix(), xm @ ym @ xm, atol=1e-11)


@given(seed=seeds)
def test_fundamental_formula(algebra, seed):
    rng = np.random.default_rng(seed)
    x, y = random_element(algebra, rng), random_element(algebra, rng)
    ux, uy = u_operator(x).entries, u_operator(y).entries
    lhs = u_operator(Element(algebra, ux @ y.coords)).entries
    scale = np.linalg.norm(ux) ** 2 * np.linalg.norm(uy)
    assert np.linalg.norm(lhs - ux @ uy @ ux) <= 1e-9 * scale


def test_u_bilinear_polarizes_u(algebra, rng):
    x, y = random_element(algebra, rng), random_element(algebra, rng)
    expected = 0.5 * (u_operator(x + y).entries - u_operator(x).entries - u_operator(y).entries)
    np.testing.assert_allclose(u_bilinear(x, y).entries, expected, atol=1e-11)
    np.testing.assert_allclose(u_bilinear(x, Element.unit(algebra)).entries, l_operator(x).entries, atol=1e-12)


def test_v_identities(algebra, rng):
    a, b, z = (random_element(algebra, rng) for _ in range(3))
    la, lb = l_operator(a).entries, l_operator(b).entries
    v_ab, v_ba = v_operator(a, b).entries, v_operator(b, a).entries
    np.testing.assert_allclose(v_ab - v_ba, 2.0 * (la @ lb - lb @ la), atol=1e-10)
    np.testing.assert_allclose(v_ab + v_ba, 2.0 * l_operator(a.circ(b)).entries, atol=1e-10)
    np.testing.assert_allclose(v_operator(a, b).apply(z).coords, u_bilinear(a, z).apply(b).coords, atol=1e-10)


# ============= Spectral theory =============

def test_spectrum_of_unit(algebra):
    np.testing.assert_allclose(spectral_decompose(Element.unit(algebra)).eigenvalues, np.ones(algebra.rank))


def test_spin3_eigenvalues():
    algebra = make_algebra("spin:3")
    np.testing.assert_allclose(spectral_decompose(Element(algebra, [2.0, 1.0, 0.0])).eigenvalues, [3.0, 1.0])


def test_sym2_eigenvalues(sym2):
    x = Element.from_matrix(sym2, [[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(spectral_decompose(x).eigenvalues, [1.0, -1.0], atol=1e-14)


@given(seed=seeds)
def test_idempotent_system_and_reconstruction(algebra, seed):
    x = random_element(algebra, np.random.default_rng(seed), 2.0)
    spec = spectral_decompose(x)
    c = spec.idempotents
    assert np.all(np.diff(spec.eigenvalues) <= 0.0)
    np.testing.assert_allclose(c.sum(axis=0), algebra.unit_coords, atol=1e-8)
    for i in range(algebra.rank):
        for j in range(algebra.rank):
            target = c[i] if i == j else np.zeros(algebra.dim)
            np.testing.assert_allclose(algebra.product(c[i], c[j]), target, atol=1e-8)
    np.testing.assert_allclose(spec.reconstruct().coords, x.coords, atol=1e-8 * (1.0 + x.norm2()))


def test_sym_eigenvalues_match_scipy(sym3, rng):
    m = rng.normal(size=(3, 3))
    m = m + m.T
    np.testing.assert_allclose(
        np.sort(spectral_decompose(Element.from_matrix(sym3, m)).eigenvalues),
        scipy.linalg.eigh(m, eigvals_only=True),
        atol=1e-11,
    )


def test_blocks_group_repeated_eigenvalues(sym3):
    x = Element.from_matrix(sym3, np.diag([2.0, 2.0, 5.0]))
    blocks = spectral_decompose(x).blocks()
    assert [round(value, 12) for value, _ in blocks] == [5.0, 2.0]
    np.testing.assert_allclose(blocks[1][1].to_matrix(), np.diag([1.0, 1.0, 0.0]), atol=1e-12)


def test_trace_and_trace_inner(algebra, rng):
    x, y = random_element(algebra, rng), random_element(algebra, rng)
    assert trace(x) == pytest.approx(spectral_decompose(x).eigenvalues.sum(), abs=1e-10)
    assert trace_inner(x, y) == pytest.approx(x.coords @ algebra.gram @ y.coords, abs=1e-10)
    assert trace(Element.unit(algebra)) == pytest.approx(algebra.rank)


# ============= Functional calculus =============

def test_exp_matches_scipy_in_sym(sym3, rng):
    m = rng.normal(size=(3, 3))
    m = m + m.T
    expected = scipy.linalg.expm(m)
    np.testing.assert_allclose(exp(Element.from_matrix(sym3, m)).to_matrix(), expected, atol=1e-10 * np.abs(expected).max())


@given(seed=seeds)
def test_exp_log_roundtrip(algebra, seed):
    x = random_element(algebra, np.random.default_rng(seed))
    np.testing.assert_allclose(log(exp(x)).coords, x.coords, atol=1e-8 * (1.0 + x.norm2()))


def test_sqrt_inverse_and_power(algebra, rng):
    p = random_positive(algebra, rng)
    root = sqrt(p)
    np.testing.assert_allclose(root.circ(root).coords, p.coords, atol=1e-10)
    np.testing.assert_allclose(p.circ(inverse(p)).coords, algebra.unit_coords, atol=1e-9)
    np.testing.assert_allclose(power(p, 0.5).coords, root.coords, atol=1e-12)
    np.testing.assert_allclose(power(p, -1).coords, inverse(p).coords, atol=1e-10)
    np.testing.assert_allclose(inv_sqrt(p).circ(root).coords, algebra.unit_coords, atol=1e-10)


def test_domain_errors(sym2):
    x = Element.from_matrix(sym2, np.diag([1.0, -1.0]))
    with pytest.raises(DomainError) as info:
        log(x)
    assert info.value.eigenvalue == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        sqrt(Element.zero(sym2))
    with pytest.raises(SingularElementError):
        inverse(Element.from_matrix(sym2, np.diag([1.0, 0.0])))


def test_in_cone(sym2):
    assert in_cone(Element.unit(sym2))
    assert not in_cone(Element.from_matrix(sym2, np.diag([1.0, 0.0])))
    assert not in_cone(Element.from_matrix(sym2, [[1.0, 2.0], [2.0, 1.0]]))


def test_functional_derivative_of_exp_matches_finite_differences(algebra, rng):
    x, h = random_element(algebra, rng), random_element(algebra, rng)
    analytic = functional_derivative(x, np.exp, np.exp, h).coords
    step = 1e-4
    numeric = (exp(x + step * h).coords - exp(x - step * h).coords) / (2.0 * step)
    np.testing.assert_allclose(analytic, numeric, atol=1e-6 * (1.0 + np.linalg.norm(numeric)))


def test_functional_derivative_repeated_eigenvalues(sym2):
    h = Element.from_matrix(sym2, [[0.3, 1.0], [1.0, -0.2]])
    # exp is differentiated at the unit: the derivative is e * h
    out = functional_derivative(Element.unit(sym2), np.exp, np.exp, h)
    np.testing.assert_allclose(out.coords, math.e * h.coords, atol=1e-12)


# ============= Norms =============

def test_sorted_moduli_tie_break():
    np.testing.assert_allclose(sorted_moduli([-3.0, 3.0, 1.0]), [3.0, 3.0, 1.0])


@pytest.mark.parametrize(
    "text, values, expected",
    [
        ("sup", [1.0, -4.0, 2.0], 4.0),
        ("lp:1", [1.0, -4.0, 2.0], 7.0),
        ("lp:2", [3.0, -4.0], 5.0),
        ("kyfan:2", [1.0, -4.0, 2.0], 6.0),
    ],
)
def test_gauge_values(text, values, expected):
    assert GaugeFunction.parse(text)(values) == pytest.approx(expected)


@given(seed=seeds, text=st.sampled_from(["sup", "lp:1", "lp:3", "kyfan:2"]))
def test_gauge_permutation_and_sign_invariance(seed, text):
    rng = np.random.default_rng(seed)
    gauge = GaugeFunction.parse(text)
    values = rng.normal(size=4)
    moved = rng.permutation(values) * rng.choice([-1.0, 1.0], 4)
    s = float(rng.normal())
    assert gauge(moved) == pytest.approx(gauge(values), rel=1e-12)
    assert gauge(s * values) == pytest.approx(abs(s) * gauge(values), rel=1e-12)


def test_gauge_rejects_bad_parameters():
    with pytest.raises(ValueError):
        GaugeFunction.parse("lp:0.5")
    with pytest.raises(ValueError):
        GaugeFunction.parse("nope")


def test_element_norms(sym2):
    x = Element.from_matrix(sym2, np.diag([3.0, -4.0]))
    assert jb_norm(x) == pytest.approx(4.0)
    assert element_norm(x) == pytest.approx(4.0)
    assert gauge_norm(x, GaugeFunction.parse("lp:2")) == pytest.approx(5.0)
    assert jb_norm(Element.unit(sym2)) == pytest.approx(1.0)
