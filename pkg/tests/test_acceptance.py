"""The eleven acceptance criteria, each at its stated tolerance and runtime budget."""

from __future__ import annotations

import math
import subprocess
import sys
import time

import numpy as np

from podles import geometry as geo
from podles import groupoid as gp
from podles import polarization as pol
from podles import sphere
from podles.groupoid import GS, INF, O1
from podles.polarization import CUSTOM_WEIGHTS, UNIT_WEIGHTS, SectionIndex
from podles.special import asymptotic_ratio, dilog, inversion_residual
from podles.suites import kms_residual

HBAR = 0.5
SEED = 20240601


def test_01_algebra_axioms(criterion):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst = 0.0
    unit = gp.one(range(31)) + gp.AlgebraElement({(INF, 0): 1.0})
    for _ in range(200):
        f, g, h = (gp.random_element(rng, 30, O1, integer=True) for _ in range(3))
        worst = max(
            worst,
            ((f * g) * h).distance(f * (g * h)),
            (f * g).star.distance(g.star * f.star),
            (f * unit).distance(f),
            (unit * f).distance(f),
        )
    elapsed = time.perf_counter() - start
    criterion(1, worst < 1e-14 and elapsed < 1.0, f"max coefficient residual {worst:.3g}, {elapsed:.2f}s")


def test_02_sphere_relations(criterion):
    start = time.perf_counter()
    params = sphere.QuantumSphereParams(HBAR)
    report = sphere.check_relations(sphere.build_generators(params, 30), params)
    elapsed = time.perf_counter() - start
    ok = not report.empty and report.max_residual < 1e-12 and elapsed < 1.0
    criterion(2, ok, f"max relation residual {report.max_residual:.3g} on m < {report.window}, {elapsed:.2f}s")


def test_03_kms(criterion):
    rng = np.random.default_rng(SEED)
    mu = gp.kms_measure(gp.GEOMETRIC, HBAR)
    worst = max(kms_residual(gp.random_element(rng, 30), gp.random_element(rng, 30), HBAR, mu) for _ in range(200))
    criterion(3, worst < 1e-12, f"max relative KMS residual {worst:.3g} over 200 pairs")


def test_04_spectral_match(criterion):
    N = 64
    tau = sphere.build_generators(sphere.QuantumSphereParams(HBAR), N).tau
    assert gp.guard_band_ok(tau, N)
    ev = np.sort(np.linalg.eigvalsh(sphere.rep_rho(tau, N)))[::-1]
    leaves = pol.bs_leaves(HBAR, N - 1)[:-1]
    dev = max(abs(e - leaf.tau(HBAR)) for e, leaf in zip(ev, leaves))
    criterion(4, dev < 1e-12, f"max |eig - exp(-hbar n)| = {dev:.3g}, N = {N}")


def test_05_leaf_groupoid(criterion):
    lg = pol.leaf_groupoid(HBAR, 30)
    n_pairs = len(lg.leaves) ** 2
    criterion(5, len(lg.mismatches) == 0, f"{len(lg.mismatches)} mismatches over {n_pairs} leaf pairs")


def test_06_symplectic_groupoid(criterion):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    mult, cocycle = 0.0, 0.0
    for k in range(100):
        chart = geo.SYMPLECTIC if k % 2 == 0 else geo.SINGULAR
        g1, g2 = geo.random_composable_pair(rng, chart)
        u1, v1 = rng.normal(size=(2, 4))
        u2 = geo.composable_lift(g1, g2, u1, rng.normal(size=2))
        v2 = geo.composable_lift(g1, g2, v1, rng.normal(size=2))
        mult = max(mult, abs(geo.multiplicativity_residual(g1, g2, u1, u2, v1, v2)))
        g12 = geo.multiply(g1, g2)
        cocycle = max(cocycle, abs(geo.modular_function(g12) - geo.modular_function(g1) - geo.modular_function(g2)))
    path = 0.0
    for _ in range(10):
        x, y = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        val = geo.integrate_cocycle(lambda t: x + t * (y - x), steps=10_000)
        path = max(path, abs(val - (math.log1p(abs(y) ** 2) - math.log1p(abs(x) ** 2))))
    elapsed = time.perf_counter() - start
    ok = mult < 1e-8 and cocycle < 1e-12 and path < 1e-6 and elapsed < 10.0
    criterion(6, ok, f"multiplicativity {mult:.3g}, cocycle {cocycle:.3g}, path integral {path:.3g}, {elapsed:.2f}s")


def test_07_dilogarithm(criterion):
    t = np.geomspace(1e-4, 1e4, 500)
    rel = float(inversion_residual(t).max())
    at_minus_one = abs(dilog(-1.0) + math.pi ** 2 / 12)
    criterion(7, rel < 1e-12 and at_minus_one < 1e-13,
              f"inversion residual {rel:.3g} on 500 points, |Li2(-1) + pi^2/12| = {at_minus_one:.3g}")


def test_08_norm_integrals(criterion):
    norms = pol.SectionNorms(HBAR)
    worst = 0.0
    for m in range(6):
        for n in range(6):
            i = SectionIndex(m, n)
            direct = pol.tensor_grid_scalar_product(i, i, HBAR)
            worst = max(worst, abs(direct / pol.scalar_product_groupoid(i, i, norms) - 1))
    positive = all(math.isfinite(v) and v > 0
                   for m in range(41) for v in (norms.A(m), norms.ell(m), norms.r(m)))
    criterion(8, worst < 1e-8 and positive, f"tensor grid vs l_m r_n: {worst:.3g}; all norms positive to m = 40: {positive}")


def test_09_asymptotic_ratio(criterion):
    start = time.perf_counter()
    details, ok = [], True
    for weights in (UNIT_WEIGHTS, CUSTOM_WEIGHTS):
        norms = pol.SectionNorms(HBAR, weights)
        dev = [abs(norms.ratio(n) / asymptotic_ratio(n, HBAR, weights.lambda_inf, weights.rho_inf) - 1)
               for n in range(20, 41)]
        monotone = all(b < a for a, b in zip(dev, dev[1:]))
        ok &= dev[-1] < 0.05 and monotone
        details.append(f"{weights.name}: dev(40) = {dev[-1]:.3g}, monotone = {monotone}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30.0
    criterion(9, ok, "; ".join(details) + f", {elapsed:.2f}s")


def test_10_hilbert_bridge(criterion):
    norms = pol.SectionNorms(HBAR)
    mu = pol.bridge_measure(norms)
    hom = iso = eig = 0.0
    for m in range(11):
        for n in range(11):
            i = SectionIndex(m, n)
            e = pol.hilbert_bridge(i, norms)
            norm2 = pol.scalar_product_groupoid(i, i, norms).real
            iso = max(iso, abs(gp.gns_inner(e, e, mu).real / norm2 - 1))
            recon = math.exp(-HBAR * (m - n)) * math.exp(HBAR * (norms.phi(m) - norms.phi(n)))
            eig = max(eig, abs(pol.modular_eigenvalue_groupoid(i, norms) / recon - 1))
            for k in range(11):
                coeff, out = pol.convolve_sections(SectionIndex(m, k), SectionIndex(k, n), norms)
                lhs = coeff * pol.hilbert_bridge(out, norms)
                rhs = pol.hilbert_bridge(SectionIndex(m, k), norms) * pol.hilbert_bridge(SectionIndex(k, n), norms)
                hom = max(hom, lhs.distance(rhs) / lhs.max_abs())
    phi_gap = abs(norms.phi(40) - norms.phi(INF))
    ok = hom < 1e-8 and iso < 1e-8 and eig < 1e-8 and phi_gap < 0.05 and norms.phi(INF) == -0.5
    criterion(10, ok, f"homomorphism {hom:.3g}, isometry {iso:.3g}, eigenvalues {eig:.3g}, |phi(40) - phi(oo)| = {phi_gap:.3g}")


def test_11_determinism(criterion, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        res = subprocess.run([sys.executable, "-m", "podles", "kms", "--seed", "7", "--out", str(path)],
                             capture_output=True, text=True)
        assert res.returncode == 0, res.stderr
        outs.append(path.read_bytes())
    criterion(11, outs[0] == outs[1] and len(outs[0]) > 0, f"two runs, {len(outs[0])} bytes each, identical = {outs[0] == outs[1]}")
