from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from podles import groupoid as gp
from podles.groupoid import GS, INF, O1, AlgebraElement

W = 12

naturals = st.integers(min_value=0, max_value=W)


@st.composite
def arrows(draw, tag=O1):
    if draw(st.integers(0, 9)) == 0:
        return (INF, draw(st.integers(-3, 3)) if tag == O1 else 0)
    m = draw(naturals)
    k = draw(naturals)
    return (m, k - m)


@st.composite
def elements(draw, tag=O1):
    # Gaussian-integer coefficients keep every sum of products exact
    terms = draw(st.lists(st.tuples(arrows(tag), st.integers(-4, 4), st.integers(-4, 4)), max_size=6))
    return AlgebraElement({a: complex(re, im) for a, re, im in terms}, tag)


unit_all = gp.one(range(2 * W + 8)) + AlgebraElement({(INF, 0): 1.0})


@given(elements(), elements(), elements())
def test_associativity_exact(f, g, h):
    assert (f * g) * h == f * (g * h)


@given(elements(), elements())
def test_involution_anti_homomorphism(f, g):
    assert (f * g).star == g.star * f.star
    assert f.star.star == f


@given(elements())
def test_unit_laws(f):
    assert f * unit_all == f
    assert unit_all * f == f


@given(elements(), elements(), st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_bilinearity(f, g, c):
    lhs = (c * f + g) * g
    rhs = c * (f * g) + g * g
    assert lhs.distance(rhs) <= 1e-12 * max(1.0, lhs.max_abs())


@given(elements(GS), elements(GS), elements(GS))
def test_gs_is_closed_subalgebra(f, g, h):
    prod = f * g
    assert prod.tag == GS
    assert all(n == 0 for (m, n) in prod.support() if m == INF)
    assert (f * g) * h == f * (g * h)


def test_mixed_tags_rejected():
    with pytest.raises(ValueError):
        AlgebraElement.basis(0, 1, tag=O1) * AlgebraElement.basis(0, 1, tag=GS)


@pytest.mark.parametrize("arrow,tag,ok", [
    ((0, 0), O1, True), ((2, -2), O1, True), ((2, -3), O1, False), ((INF, 5), O1, True),
    ((INF, 5), GS, False), ((INF, 0), GS, True), ((1.5, 0), O1, False),
])
def test_is_arrow(arrow, tag, ok):
    assert gp.is_arrow(arrow, tag) is ok


def test_compose_and_inverse():
    assert gp.compose((1, 2), (3, 4)) == (1, 6)
    assert gp.compose((INF, 2), (INF, -5)) == (INF, -3)
    with pytest.raises(gp.NotComposable):
        gp.compose((1, 2), (2, 4))
    assert gp.compose((3, 2), gp.inverse((3, 2))) == (3, 0)


def test_basis_convolution_rule():
    a = AlgebraElement.basis(1, 2)
    b = AlgebraElement.basis(3, 4)
    assert a * b == AlgebraElement.basis(1, 6)
    assert b * a == AlgebraElement()
    assert a.star == AlgebraElement.basis(3, -2)


@given(elements())
def test_records_roundtrip(f):
    assert AlgebraElement.from_records(f.to_records(), f.tag) == f


def test_records_schema():
    f = AlgebraElement({(INF, -1): 2 - 1j, (0, 3): 0.5})
    recs = f.to_records()
    assert recs == [{"m": 0, "n": 3, "re": 0.5, "im": 0.0}, {"m": "inf", "n": -1, "re": 2.0, "im": -1.0}]


# twisted convolution by a coboundary 2-cocycle zeta(a, b) = exp(i(h(a) + h(b) - h(ab)))

def _h(a):
    m, n = a
    return 0.37 * n * n + 0.11 * (0 if m == INF else m) * n


def zeta(a, b):
    return cmath.exp(1j * (_h(a) + _h(b) - _h(gp.compose(a, b))))


@given(elements(), elements(), elements())
def test_twisted_associativity(f, g, h):
    lhs = gp.convolve(gp.convolve(f, g, zeta), h, zeta)
    rhs = gp.convolve(f, gp.convolve(g, h, zeta), zeta)
    assert lhs.distance(rhs) <= 1e-11 * max(1.0, lhs.max_abs())


def test_twisted_zeta_is_nontrivial_but_cohomologous():
    a, b = (1, 2), (3, -1)
    assert abs(zeta(a, b) - 1) > 1e-3
    # the twist is undone by rescaling e_a -> exp(i h(a)) e_a
    phase = lambda f: AlgebraElement({x: c * cmath.exp(1j * _h(x)) for x, c in f.terms.items()})
    f, g = AlgebraElement.basis(*a), AlgebraElement.basis(*b)
    assert phase(gp.convolve(f, g, zeta)).distance(phase(f) * phase(g)) < 1e-14


@given(elements())
def test_twisted_involution_is_involutive(f):
    assert gp.involute(gp.involute(f, zeta), zeta).distance(f) <= 1e-12 * max(1.0, f.max_abs())


# KMS measures and the modular structure

@pytest.mark.parametrize("hbar", [0.1, 0.5, 2.0])
def test_geometric_measure(hbar):
    mu = gp.kms_measure(gp.GEOMETRIC, hbar)
    assert mu(0) == pytest.approx(1 - math.exp(-hbar))
    assert mu(3) / mu(2) == pytest.approx(math.exp(-hbar))
    assert mu(INF) == 0.0
    assert mu.total_mass(5000) == pytest.approx(1.0, abs=1e-12)


def test_dirac_measures_and_errors():
    assert gp.kms_measure(gp.DIRAC0)(0) == 1.0
    assert gp.kms_measure(gp.DIRAC0)(1) == 0.0
    assert gp.kms_measure(gp.DIRACINF)(INF) == 1.0
    with pytest.raises(ValueError):
        gp.kms_measure(gp.GEOMETRIC)
    with pytest.raises(ValueError):
        gp.kms_measure("POISSON", 1.0)


def test_kms_condition_random_pairs(rng):
    from podles.suites import kms_residual
    mu = gp.kms_measure(gp.GEOMETRIC, 0.5)
    worst = max(kms_residual(gp.random_element(rng, 30), gp.random_element(rng, 30), 0.5, mu) for _ in range(200))
    assert worst < 1e-12


def test_kms_fails_for_wrong_temperature(rng):
    from podles.suites import kms_residual
    mu = gp.kms_measure(gp.GEOMETRIC, 0.5)
    f = AlgebraElement.basis(0, 1)
    g = AlgebraElement.basis(1, -1)
    assert kms_residual(f, g, 0.5, mu) < 1e-15
    assert kms_residual(f, g, 0.7, mu) > 1e-3


def test_automorphism_group_law():
    f = AlgebraElement({(2, 3): 1.0, (INF, -2): 1j})
    a = gp.automorphism_c1(0.3, gp.automorphism_c1(0.4, f))
    b = gp.automorphism_c1(0.7, f)
    assert a.distance(b) < 1e-15
    assert gp.automorphism_c1(-1j * 0.5, AlgebraElement.basis(0, 2))[(0, 2)] == pytest.approx(math.exp(1.0))


def test_coboundary_face_convention():
    phi = lambda m: 0.0 if m == INF else m * m
    d = gp.coboundary(phi)
    assert d((1, 2)) == 1 - 9
    assert d((2, 0)) == 0
    assert gp.c1((4, -3)) == -3


@given(elements(), elements())
def test_modular_conjugation(f, g):
    hb = 0.5
    J = lambda x: gp.modular_conjugation(x, hb)
    assert J(J(f)).distance(f) <= 1e-12 * max(1.0, f.max_abs())
    assert J(gp.modular_operator_power(f, hb, 0.5)).distance(f.star) <= 1e-12 * max(1.0, f.max_abs())
    mu = gp.kms_measure(gp.GEOMETRIC, hb)
    lhs = gp.gns_inner(J(f), J(g), mu)
    rhs = gp.gns_inner(g, f, mu)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_modular_operator_eigenvalues():
    # |m, k> = e_{m, k-m} has eigenvalue exp(-hbar (m - k))
    hb = 0.5
    for m, k in [(0, 0), (3, 1), (1, 4)]:
        e = AlgebraElement.basis(m, k - m)
        assert gp.modular_operator(e, hb)[(m, k - m)] == pytest.approx(math.exp(-hb * (m - k)))


def test_modular_operator_is_polar_part_of_involution():
    # <S f, S f> = <f, D f> for the GNS inner product
    hb, mu = 0.5, gp.kms_measure(gp.GEOMETRIC, 0.5)
    f = AlgebraElement({(0, 2): 1.0, (3, -1): 2j, (1, 1): -0.5})
    lhs = gp.gns_inner(f.star, f.star, mu)
    rhs = gp.gns_inner(f, gp.modular_operator(f, hb), mu)
    assert lhs == pytest.approx(rhs, rel=1e-13)


# finite realizations

@pytest.mark.parametrize("N", [2, 5, 64])
def test_shift_products(N):
    S = gp.shift_element(N - 1)
    ref = np.eye(N)
    ref[N - 1, N - 1] = 0
    assert np.array_equal(gp.shift_realization(S.star * S, N), ref)
    ref = np.eye(N)
    ref[0, 0] = 0
    assert np.array_equal(gp.shift_realization(S * S.star, N), ref)


def test_shift_contains_germ_at_infinity():
    assert gp.shift_element(3)[(INF, -1)] == 1
    assert gp.shift_element(3, with_infinity=False)[(INF, -1)] == 0
    assert gp.evaluation_map(gp.shift_element(3)) == {-1: 1}


def test_truncation_error():
    with pytest.raises(gp.TruncationError):
        gp.shift_realization(AlgebraElement.basis(3, 1), 4)
    assert not gp.guard_band_ok(AlgebraElement.basis(3, 1), 4)
    assert gp.guard_band_ok(AlgebraElement.basis(2, 1), 4)


@given(elements(), elements())
def test_realization_is_star_homomorphism(f, g):
    N = 2 * W + 8
    R = lambda x: gp.shift_realization(x, N)
    assert np.abs(R(f * g) - R(f) @ R(g)).max(initial=0) < 1e-12
    assert np.array_equal(R(f.star), R(f).conj().T)


@given(elements(), elements())
def test_symbol_map_is_homomorphism(f, g):
    lhs = gp.evaluation_map(f * g)
    rhs = gp.laurent_product(gp.evaluation_map(f), gp.evaluation_map(g))
    assert lhs == rhs


def test_window_and_table():
    arrows_gs = gp.arrows_in_window(3, GS)
    assert len(arrows_gs) == 16 + 1
    assert (INF, 0) in arrows_gs
    table = gp.composition_table(arrows_gs)
    assert table[((1, 1), (2, 1))] == (1, 2)
    assert table[((1, 1), (1, 1))] is None
    assert table[((INF, 0), (INF, 0))] == (INF, 0)


def test_random_element_is_seeded():
    a = gp.random_element(np.random.default_rng(3), 10)
    b = gp.random_element(np.random.default_rng(3), 10)
    assert a == b and len(a) > 0
    g = gp.random_element(np.random.default_rng(3), 10, GS)
    assert g.tag == GS
