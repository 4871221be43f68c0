from __future__ import annotations

import math

import numpy as np
import pytest

from podles import groupoid as gp
from podles import sphere
from podles.groupoid import GS, INF


@pytest.fixture
def params():
    return sphere.QuantumSphereParams(0.5)


def test_params(params):
    assert params.q == pytest.approx(math.exp(-0.25))
    with pytest.raises(ValueError):
        sphere.QuantumSphereParams(0.0)
    with pytest.raises(ValueError):
        sphere.QuantumSphereParams(0.5, c=0.1)


@pytest.mark.parametrize("hbar", [0.1, 0.5, 1.3])
@pytest.mark.parametrize("M", [3, 10, 30])
def test_relations(hbar, M):
    p = sphere.QuantumSphereParams(hbar)
    rep = sphere.check_relations(sphere.build_generators(p, M), p)
    assert rep.window == M - 2 and not rep.empty
    assert set(rep.residuals) == {"q2 a*a = t(1-t)", "q2 a a* = q2 t(1-q2 t)", "a t = q2 t a"}
    assert rep.max_residual < 1e-12


def test_relations_fail_with_wrong_q(params):
    gen = sphere.build_generators(sphere.QuantumSphereParams(0.6), 20)
    assert sphere.check_relations(gen, params).max_residual > 1e-3


def test_generators(params):
    gen = sphere.build_generators(params, 5)
    assert gen.tau.tag == GS
    assert gen.tau[(2, 0)] == pytest.approx(params.q ** 4)
    assert gen.alpha[(0, 1)] == pytest.approx(math.sqrt(1 - params.q ** 2))
    assert gen.alpha_star == gen.alpha.star
    assert gen.tau.star == gen.tau
    with pytest.raises(ValueError):
        sphere.build_generators(params, 0)


def test_alpha_coefficient_small_hbar():
    q = math.exp(-1e-9)
    assert sphere.alpha_coefficient(0, q) == pytest.approx(math.sqrt(2e-9), rel=1e-6)


@pytest.mark.parametrize("which", ["tau", "alpha", "alpha*"])
def test_rho_two_routes(params, which):
    N = 20
    gen = sphere.build_generators(params, N if which == "tau" else N - 1)
    el = {"tau": gen.tau, "alpha": gen.alpha, "alpha*": gen.alpha_star}[which]
    assert np.allclose(sphere.rep_rho(el, N), sphere.rep_rho_direct(which, params, N), atol=1e-15, rtol=0)


def test_rho_errors(params):
    with pytest.raises(ValueError):
        sphere.rep_rho_direct("beta", params, 4)
    with pytest.raises(ValueError):
        sphere.rep_rho_direct("tau", params, 1)
    with pytest.raises(gp.TruncationError):
        sphere.rep_rho(sphere.build_generators(params, 10).alpha, 10)


def test_spectrum_is_bohr_sommerfeld(params):
    N = 64
    ev = np.sort(np.linalg.eigvalsh(sphere.rep_rho(sphere.build_generators(params, N).tau, N)))[::-1]
    assert np.abs(ev - np.exp(-0.5 * np.arange(N))).max() < 1e-12


def test_counit(params):
    gen = sphere.build_generators(params, 10)
    assert sphere.rep_counit(gen.tau) == 0
    assert sphere.rep_counit(gen.alpha) == 0
    one = gp.one(range(10), GS) + gp.AlgebraElement({(INF, 0): 1.0}, GS)
    assert sphere.rep_counit(one) == 1
    ws = sphere.words(gen, 2)
    for a, fa in ws.items():
        for b, fb in ws.items():
            assert sphere.rep_counit(fa * fb) == sphere.rep_counit(fa) * sphere.rep_counit(fb)


def test_haar_state(params):
    M = 30
    gen = sphere.build_generators(params, M)
    h = 0.5
    ref = (1 - math.exp(-h)) * (1 - math.exp(-2 * M * h)) / (1 - math.exp(-2 * h))
    assert sphere.haar_state(gen.tau, params) == pytest.approx(ref, rel=1e-14)
    assert sphere.haar_state(gen.alpha, params) == 0


def test_haar_state_positive_on_words(params):
    gen = sphere.build_generators(params, 12)
    for w in sphere.words(gen, 3).values():
        v = sphere.haar_state(w.star * w, params)
        assert v.real >= 0 and abs(v.imag) < 1e-15


def test_words_count(params):
    ws = sphere.words(sphere.build_generators(params, 4), 3)
    assert len(ws) == 3 + 9 + 27
    assert ws["ta"] == ws["t"] * ws["a"]
