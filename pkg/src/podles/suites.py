"""Verification batteries run by the command line, one per suite name.

Every check reduces to a residual and a tolerance; status is pass iff
residual <= tolerance. Random instances come from numpy's PCG64 generator
seeded with ``RunConfig.seed``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import geometry as geo
from . import groupoid as gp
from . import polarization as pol
from . import sphere
from .special import QuadratureError, QuadratureSpec, dilog, inversion_residual

SUITES = ("algebra", "kms", "podles", "geometry", "bs-leaves", "norms", "asymptotics", "bridge")
N_RANDOM = 200


@dataclass(frozen=True)
class RunConfig:
    hbar: float = 0.5
    truncation: int = 64
    cutoff: int = 30
    window: int = 30
    nmax: int = 40
    seed: int = 0
    quad_nodes: int = 24
    rel_tol: float = 1e-10
    format: str = "json"

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar}")
        if self.truncation < 2:
            raise ValueError("truncation must be >= 2")
        if self.cutoff < 3:
            raise ValueError("cutoff must be >= 3 so the relation window is non-empty")
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if self.nmax < 20:
            raise ValueError("nmax must be >= 20 (monotonicity is checked on 20..nmax)")
        if self.format not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.format!r}")
        self.quad  # validates the quadrature fields

    @property
    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(nodes_per_panel=self.quad_nodes, rel_tol=self.rel_tol)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    anchor: str

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class SuiteReport:
    suite: str
    config: RunConfig
    checks: list[Check]
    table: list[dict] = field(default_factory=list)
    wall_time: float = 0.0

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda c: c.name)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> dict:
        n_pass = sum(c.passed for c in self.checks)
        return {
            "suite": self.suite,
            "n_checks": len(self.checks),
            "n_pass": n_pass,
            "n_fail": len(self.checks) - n_pass,
            "status": "pass" if self.passed else "fail",
        }


def _guarded(name: str, tol: float, anchor: str, compute: Callable[[], float]) -> Check:
    """Run one check; quadrature failures become a failing check instead of a crash."""
    try:
        res = float(compute())
    except QuadratureError:
        res = math.inf
    if math.isnan(res):
        res = math.inf
    return Check(name, res, tol, anchor)


def _rel(a: complex, b: complex, scale: float | None = None) -> float:
    den = scale if scale is not None else max(abs(a), abs(b))
    return abs(a - b) / den if den > 0 else abs(a - b)


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------

def _algebra(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    W = cfg.window
    triples = [[gp.random_element(rng, W, gp.O1, integer=True) for _ in range(3)] for _ in range(N_RANDOM)]
    unit = gp.one(range(W + 1)) + gp.AlgebraElement({(gp.INF, 0): 1.0})

    def assoc():
        return max(((f * g) * h).distance(f * (g * h)) for f, g, h in triples)

    def anti():
        return max((f * g).star.distance(g.star * f.star) for f, g, _ in triples)

    def invol():
        return max(f.star.star.distance(f) for f, _, _ in triples)

    def units():
        return max(max((f * unit).distance(f), (unit * f).distance(f)) for f, _, _ in triples)

    N = cfg.truncation
    S = gp.shift_element(N - 1)

    def shift_isometry():
        lhs = gp.shift_realization(S.star * S, N)
        ref = np.eye(N)
        ref[N - 1, N - 1] = 0
        return np.abs(lhs - ref).max()

    def shift_coisometry():
        lhs = gp.shift_realization(S * S.star, N)
        ref = np.eye(N)
        ref[0, 0] = 0
        return np.abs(lhs - ref).max()

    def realization_hom():
        worst = 0.0
        for f, g, _ in triples[:50]:
            if not (gp.guard_band_ok(f, N) and gp.guard_band_ok(g, N)):
                continue
            lhs = gp.shift_realization(f * g, N)
            rhs = gp.shift_realization(f, N) @ gp.shift_realization(g, N)
            worst = max(worst, np.abs(lhs - rhs).max())
        return worst

    def symbol_hom():
        worst = 0.0
        for f, g, _ in triples:
            lhs = gp.evaluation_map(f * g)
            rhs = gp.laurent_product(gp.evaluation_map(f), gp.evaluation_map(g))
            keys = set(lhs) | set(rhs)
            worst = max([worst] + [abs(lhs.get(k, 0) - rhs.get(k, 0)) for k in keys])
        return worst

    hb = cfg.hbar
    mu = gp.kms_measure(gp.GEOMETRIC, hb)
    pairs = [(gp.random_element(rng, W, gp.O1), gp.random_element(rng, W, gp.O1)) for _ in range(N_RANDOM)]

    def jj():
        return max(gp.modular_conjugation(gp.modular_conjugation(f, hb), hb).distance(f) / f.max_abs() for f, _ in pairs)

    def polar():
        worst = 0.0
        for f, _ in pairs:
            lhs = gp.modular_conjugation(gp.modular_operator_power(f, hb, 0.5), hb)
            worst = max(worst, lhs.distance(f.star) / f.max_abs())
        return worst

    def j_antiunitary():
        worst = 0.0
        for f, g in pairs:
            f, g = f.restrict(lambda a: a[0] != gp.INF), g.restrict(lambda a: a[0] != gp.INF)
            lhs = gp.gns_inner(gp.modular_conjugation(f, hb), gp.modular_conjugation(g, hb), mu)
            rhs = gp.gns_inner(g, f, mu)
            worst = max(worst, _rel(lhs, rhs, max(abs(rhs), 1e-300)))
        return worst

    return [
        _guarded("associativity", 1e-14, "e_a * e_b = e_ab on composable arrows", assoc),
        _guarded("involution_anti_homomorphism", 1e-14, "(f*g)^* = g^* * f^*", anti),
        _guarded("involution_involutive", 1e-14, "f^** = f", invol),
        _guarded("unit_laws", 1e-14, "sum of units is a two-sided unit", units),
        _guarded("shift_isometry", 1e-14, "S^*S = 1 - E_{N-1,N-1} on the truncation", shift_isometry),
        _guarded("shift_coisometry", 1e-14, "SS^* = 1 - E_{00}", shift_coisometry),
        _guarded("realization_homomorphism", 1e-12, "e_{m,n} -> E[m, m+n]", realization_hom),
        _guarded("symbol_homomorphism", 1e-12, "sigma: f -> sum f(oo, n) x^n", symbol_hom),
        _guarded("modular_conjugation_squared", 1e-12, "J^2 = 1", jj),
        _guarded("polar_decomposition", 1e-12, "S = J D^(1/2)", polar),
        _guarded("modular_conjugation_antiunitary", 1e-12, "<Jf, Jg> = <g, f>", j_antiunitary),
    ], []


# ---------------------------------------------------------------------------
# kms
# ---------------------------------------------------------------------------

def _abs_element(f: gp.AlgebraElement) -> gp.AlgebraElement:
    return gp.AlgebraElement({a: abs(c) for a, c in f.terms.items()}, f.tag)


def kms_residual(f: gp.AlgebraElement, g: gp.AlgebraElement, hbar: float, mu: gp.UnitMeasure) -> float:
    """|phi(f * A(-i hbar) g) - phi(g * f)| relative to phi(|g| * |f|)."""
    lhs = gp.weight_state(f * gp.automorphism_c1(-1j * hbar, g), mu)
    rhs = gp.weight_state(g * f, mu)
    scale = abs(gp.weight_state(_abs_element(g) * _abs_element(f), mu))
    return _rel(lhs, rhs, scale if scale > 0 else 1.0)


def _kms(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    hb = cfg.hbar
    pairs = [(gp.random_element(rng, cfg.window, gp.O1), gp.random_element(rng, cfg.window, gp.O1))
             for _ in range(N_RANDOM)]
    geo_mu = gp.kms_measure(gp.GEOMETRIC, hb)
    inf_mu = gp.kms_measure(gp.DIRACINF)
    residuals = [kms_residual(f, g, hb, geo_mu) for f, g in pairs]

    def trace_at_infinity():
        return max(kms_residual(f, g, 0.0, inf_mu) for f, g in pairs)

    table = [{"pair": i, "residual": r} for i, r in enumerate(residuals)]
    return [
        _guarded("kms_geometric", 1e-12, "phi(f * A(-i hbar) g) = phi(g * f)", lambda: max(residuals)),
        _guarded("kms_dirac_infinity", 1e-12, "beta = 0: phi is a trace", trace_at_infinity),
        _guarded("geometric_mass", 1e-12, "sum exp(-n hbar)(1 - exp(-hbar)) = 1",
                 lambda: abs(geo_mu.total_mass(4000) - 1.0)),
    ], table


# ---------------------------------------------------------------------------
# podles
# ---------------------------------------------------------------------------

def _podles(cfg: RunConfig):
    params = sphere.QuantumSphereParams(cfg.hbar)
    gen = sphere.build_generators(params, cfg.cutoff)
    report = sphere.check_relations(gen, params)
    checks = [_guarded(f"relation {k}", 1e-12, k, lambda v=v: v) for k, v in report.residuals.items()]

    N = cfg.truncation
    big = sphere.build_generators(params, N)
    # alpha's top arrow (M-1, 1) needs M <= N - 1 to fit the guard band
    band = sphere.build_generators(params, N - 1)

    def spectrum():
        ev = np.sort(np.linalg.eigvalsh(sphere.rep_rho(big.tau, N)))[::-1]
        ref = np.exp(-cfg.hbar * np.arange(N))
        return np.abs(ev - ref).max()

    def two_routes():
        return max(
            np.abs(sphere.rep_rho(big.tau, N) - sphere.rep_rho_direct("tau", params, N)).max(),
            np.abs(sphere.rep_rho(band.alpha, N) - sphere.rep_rho_direct("alpha", params, N)).max(),
            np.abs(sphere.rep_rho(band.alpha_star, N) - sphere.rep_rho_direct("alpha*", params, N)).max(),
        )

    def rep_relations():
        q2 = params.q ** 2
        T = sphere.rep_rho_direct("tau", params, N)
        A = sphere.rep_rho_direct("alpha", params, N)
        I = np.eye(N)
        r1 = q2 * A.conj().T @ A - T @ (I - T)
        r2 = q2 * A @ A.conj().T - q2 * T @ (I - q2 * T)
        r3 = A @ T - q2 * T @ A
        # the last basis vector sees the truncation in A A^*
        return max(np.abs(r1).max(), np.abs(r2[: N - 1, : N - 1]).max(), np.abs(r3).max())

    ws = sphere.words(gen, 3)

    def counit_character():
        worst = 0.0
        for a, fa in ws.items():
            for b, fb in ws.items():
                if len(a) + len(b) > 3:
                    continue
                worst = max(worst, abs(sphere.rep_counit(fa * fb) - sphere.rep_counit(fa) * sphere.rep_counit(fb)))
        return worst

    def haar_tau():
        h, M = cfg.hbar, cfg.cutoff
        ref = -math.expm1(-h) * -math.expm1(-2 * M * h) / -math.expm1(-2 * h)
        return abs(sphere.haar_state(gen.tau, params) - ref)

    def haar_positive():
        vals = [sphere.haar_state(w.star * w, params) for w in ws.values()]
        return max(max(0.0, -v.real) + abs(v.imag) for v in vals)

    checks += [
        _guarded("spectrum_rho_tau", 1e-12, "spectrum of rho(tau) is exp(-hbar n)", spectrum),
        _guarded("rho_two_routes", 1e-12, "rho via e_{m,n} -> E[m,m+n] equals the direct formulas", two_routes),
        _guarded("rho_relations", 1e-12, "relations hold in the representation rho", rep_relations),
        _guarded("counit_character", 1e-14, "character at the point N", counit_character),
        _guarded("haar_state_tau", 1e-14, "phi(tau) = sum q^{2m} mu_hbar(m)", haar_tau),
        _guarded("haar_state_positive", 1e-14, "phi(w^* w) >= 0", haar_positive),
    ]
    return checks, []


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

def _geometry(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    table = []
    mult, cocycle, inverse_res = [], [], []
    for k in range(100):
        chart = geo.SYMPLECTIC if k % 2 == 0 else geo.SINGULAR
        g1, g2 = geo.random_composable_pair(rng, chart)
        u1, v1 = rng.normal(size=4), rng.normal(size=4)
        u2 = geo.composable_lift(g1, g2, u1, rng.normal(size=2))
        v2 = geo.composable_lift(g1, g2, v1, rng.normal(size=2))
        r = abs(geo.multiplicativity_residual(g1, g2, u1, u2, v1, v2))
        mult.append(r)
        table.append(_geo_row(g1, "multiplicativity", r))
        g12 = geo.multiply(g1, g2)
        c = abs(geo.modular_function(g12) - geo.modular_function(g1) - geo.modular_function(g2))
        cocycle.append(c)
        table.append(_geo_row(g1, "modular_cocycle", c))
        e = geo.multiply(g1, geo.inverse(g1))
        inverse_res.append(max(abs(e.fiber), abs(e.base - g1.base)))

    def closedness():
        worst = 0.0
        for k in range(20):
            chart = geo.SYMPLECTIC if k % 2 == 0 else geo.SINGULAR
            p = geo.random_point(rng, chart, scale=1.0)
            X, Y, Z = rng.normal(size=(3, 4))
            r = abs(geo.exterior_derivative(p, X, Y, Z))
            table.append(_geo_row(p, "closedness", r))
            worst = max(worst, r)
        return worst

    def covariance():
        worst = 0.0
        for _ in range(50):
            p = geo.random_point(rng, geo.SYMPLECTIC)
            u, v = rng.normal(size=(2, 4))
            q = geo.to_chart(p, geo.SINGULAR)
            a = geo.symplectic_form(p, u, v)
            b = geo.symplectic_form(q, geo.push_tangent(p, u, geo.SINGULAR), geo.push_tangent(p, v, geo.SINGULAR))
            worst = max(worst, abs(a - b) / max(1.0, abs(a)))
        return worst

    def cotangent_path():
        worst = 0.0
        for _ in range(10):
            x, y = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
            val = geo.integrate_cocycle(lambda t: x + t * (y - x), steps=10_000)
            ref = math.log1p(abs(y) ** 2) - math.log1p(abs(x) ** 2)
            worst = max(worst, abs(val - ref))
        return worst

    checks = [
        _guarded("multiplicativity", 1e-8, "Omega is multiplicative", lambda: max(mult)),
        _guarded("modular_cocycle", 1e-12, "log(1+|y|^2)/(1+|x|^2) is a cocycle", lambda: max(cocycle)),
        _guarded("inverse_law", 1e-12, "g g^-1 = l(g)", lambda: max(inverse_res)),
        _guarded("closedness", 1e-8, "d Omega = 0", closedness),
        _guarded("chart_covariance", 1e-12, "Omega agrees across charts", covariance),
        _guarded("cotangent_path_integral", 1e-6, "int <chi, c> = log (1+|y|^2)/(1+|x|^2)", cotangent_path),
    ]
    return checks, table


def _geo_row(p: geo.ChartPoint, name: str, residual: float) -> dict:
    return {
        "chart": p.chart, "base_re": p.base.real, "base_im": p.base.imag,
        "fiber_re": p.fiber.real, "fiber_im": p.fiber.imag, "check_name": name, "residual": residual,
    }


# ---------------------------------------------------------------------------
# bs-leaves
# ---------------------------------------------------------------------------

def _bs_leaves(cfg: RunConfig):
    hb, W = cfg.hbar, cfg.window
    leaves = pol.bs_leaves(hb, W)
    lg = pol.leaf_groupoid(hb, W, seed=cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    def holonomy():
        worst = 0.0
        for leaf in leaves[:-1]:
            k = pol.circle_action(leaf.levels(hb)[0]) / (2 * math.pi * hb)
            worst = max(worst, abs(k - round(k)))
        return worst

    def spectrum():
        N = max(cfg.truncation, W + 1)
        gen = sphere.build_generators(sphere.QuantumSphereParams(hb), N)
        ev = np.sort(np.linalg.eigvalsh(sphere.rep_rho(gen.tau, N)))[::-1][: W + 1]
        return max(abs(e - leaf.tau(hb)) for e, leaf in zip(ev, leaves))

    def products():
        worst = 0.0
        finite = [lf for lf in lg.leaves if not lf.is_infinite]
        for a in finite:
            for b in finite:
                if lg.compose_leaves(a, b) is not None:
                    worst = max(worst, pol.leaf_product_check(lg, a, b, rng))
        return worst

    table = [{"n": leaf.n_plus if not leaf.is_infinite else "inf", "tau": leaf.tau(hb)} for leaf in leaves]
    return [
        _guarded("leaf_groupoid_isomorphism", 0.0, "BS leaf groupoid coincides with G_S", lambda: len(lg.mismatches)),
        _guarded("bohr_sommerfeld_holonomy", 1e-9, "F = exp(hbar n) - 1", holonomy),
        _guarded("tau_spectrum", 1e-12, "spectrum of rho(tau) is tau = exp(-hbar n)", spectrum),
        _guarded("leaf_products", 1e-9, "products of points land on the composed leaf", products),
    ], table


# ---------------------------------------------------------------------------
# norms, asymptotics, bridge
# ---------------------------------------------------------------------------

def _norms_for(cfg: RunConfig, weights: pol.WeightPair = pol.UNIT_WEIGHTS) -> pol.SectionNorms:
    return pol.SectionNorms(cfg.hbar, weights, cfg.quad)


def _norms(cfg: RunConfig):
    hb = cfg.hbar
    norms = _norms_for(cfg)
    fine = norms.refined()
    idx = [pol.SectionIndex(m, n) for m in range(6) for n in range(6)]

    def oracle_diag():
        return max(_rel(pol.tensor_grid_scalar_product(i, i, hb), pol.scalar_product_groupoid(i, i, norms)) for i in idx)

    def oracle_offdiag():
        worst = 0.0
        for i in idx[:12]:
            for j in idx[:12]:
                if i != j:
                    val = pol.tensor_grid_scalar_product(i, j, hb)
                    scale = math.sqrt(norms.ell(i.m) * norms.r(i.n) * norms.ell(j.m) * norms.r(j.n))
                    worst = max(worst, abs(val) / scale)
        return worst

    def positivity():
        bad = 0
        for m in range(cfg.nmax + 1):
            for v in (norms.A(m), norms.ell(m), norms.r(m)):
                bad += not (math.isfinite(v) and v > 0)
        return bad

    def refinement():
        worst = 0.0
        for m in range(0, cfg.nmax + 1, 5):
            for k in ("log_A", "log_ell", "log_r"):
                worst = max(worst, abs(math.expm1(getattr(norms, k)(m) - getattr(fine, k)(m))))
        return worst

    def r_below_ell():
        return max(0.0, max(norms.log_r(m) - norms.log_ell(m) for m in range(cfg.nmax + 1)))

    def gram_symmetry():
        return max(abs(pol.scalar_product_symplectic(i, i, norms) - pol.scalar_product_symplectic(i.swapped, i.swapped, norms))
                   / abs(pol.scalar_product_symplectic(i, i, norms)) for i in idx)

    def f_hat():
        worst = 0.0
        for i in idx:
            out = pol.apply_f_hat({(i.m, i.n): 1.0}, hb)
            worst = max(worst, abs(out[(i.m, i.n)] - pol.quantized_f(i, hb)))
        return worst

    def direct_convolution():
        x, y = 0.7 + 0.2j, -0.3 + 0.9j
        i1, i2 = pol.SectionIndex(0, 1), pol.SectionIndex(1, 2)
        coeff, out = pol.convolve_sections(i1, i2, norms)
        ref = coeff * pol.section_value(out, x, y, hb)
        return _rel(pol.direct_convolution(i1, i2, x, y, hb), ref)

    table = []
    for m in range(cfg.nmax + 1):
        table.append({
            "m": m, "n": m, "A_m": norms.A(m), "ell_m": norms.ell(m), "r_m": norms.r(m),
            "ratio": norms.ratio(m),
            "asymptotic_ref": pol.asymptotic_reference(m, norms) if m >= 1 else math.nan,
            "phi_m": norms.phi(m),
        })
    return [
        _guarded("tensor_grid_oracle", 1e-8, "||sigma_mn||^2 = l_m r_n", oracle_diag),
        _guarded("orthogonality_oracle", 1e-10, "sigma_mn are orthogonal", oracle_offdiag),
        _guarded("norms_positive_finite", 0.0, "sigma_mn are normalizable", positivity),
        _guarded("node_doubling", max(cfg.rel_tol, 1e-12) * 100, "quadrature convergence gate", refinement),
        _guarded("r_below_ell_unit_weights", 0.0, "1/(1+t) < 1", r_below_ell),
        _guarded("symplectic_gram_symmetry", 1e-10, "symmetric in x <-> y, D = 1", gram_symmetry),
        _guarded("f_hat_monomial", 1e-15, "f_hat sigma_mn = hbar(m + 1/2) sigma_mn", f_hat),
        _guarded("direct_convolution_oracle", 1e-8, "sigma_mk * sigma_kn = l_k sigma_mn", direct_convolution),
    ], table


def _asymptotics(cfg: RunConfig):
    hb, n_top = cfg.hbar, cfg.nmax
    checks, table = [], []
    for weights in (pol.UNIT_WEIGHTS, pol.CUSTOM_WEIGHTS):
        norms = _norms_for(cfg, weights)
        devs = {}
        for n in range(1, n_top + 1):
            ref = pol.asymptotic_reference(n, norms)
            devs[n] = norms.ratio(n) / ref - 1.0
            table.append({"weights": weights.name, "n": n, "ratio": norms.ratio(n), "asymptotic": ref,
                          "rel_deviation": devs[n]})
        tail = [abs(devs[n]) for n in range(20, n_top + 1)]
        checks.append(_guarded(f"deviation_at_nmax[{weights.name}]", 0.05,
                               "r_n/l_n ~ exp(-hbar(n+1/2)) sqrt(rho/Lambda)", lambda d=devs: abs(d[n_top])))
        checks.append(_guarded(f"monotone_decay[{weights.name}]", 0.0, "leading-order approach",
                               lambda t=tail: sum(b >= a for a, b in zip(t, t[1:]))))
    return checks, table


def _bridge(cfg: RunConfig):
    hb = cfg.hbar
    K = min(cfg.window, 10)
    checks = []
    for weights in (pol.UNIT_WEIGHTS, pol.CUSTOM_WEIGHTS):
        norms = _norms_for(cfg, weights)
        mu = pol.bridge_measure(norms)
        tag = weights.name

        def homomorphism(norms=norms):
            worst = 0.0
            for m in range(K + 1):
                for k in range(K + 1):
                    for n in range(K + 1):
                        coeff, out = pol.convolve_sections(pol.SectionIndex(m, k), pol.SectionIndex(k, n), norms)
                        lhs = coeff * pol.hilbert_bridge(out, norms)
                        rhs = pol.hilbert_bridge(pol.SectionIndex(m, k), norms) * pol.hilbert_bridge(pol.SectionIndex(k, n), norms)
                        worst = max(worst, lhs.distance(rhs) / lhs.max_abs())
            return worst

        def isometry(norms=norms, mu=mu):
            worst = 0.0
            for m in range(K + 1):
                for n in range(K + 1):
                    i = pol.SectionIndex(m, n)
                    e = pol.hilbert_bridge(i, norms)
                    worst = max(worst, _rel(gp.gns_inner(e, e, mu), pol.scalar_product_groupoid(i, i, norms)))
            return worst

        def eigen(norms=norms):
            worst = 0.0
            for m in range(K + 1):
                for n in range(K + 1):
                    i = pol.SectionIndex(m, n)
                    recon = math.exp(-hb * (m - n) + hb * (norms.phi(m) - norms.phi(n)))
                    worst = max(worst, _rel(pol.modular_eigenvalue_groupoid(i, norms), recon))
            return worst

        def cocycle(norms=norms):
            phi = lambda m: norms.phi(m)
            dphi = gp.coboundary(phi)
            return max(abs(pol.modular_cocycle(a, norms) - gp.c1(a) - dphi(a))
                       for a in gp.arrows_in_window(K, gp.GS, include_infinity=False))

        def involution(norms=norms):
            return max(pol.hilbert_bridge(pol.SectionIndex(m, n), norms).star.distance(
                pol.hilbert_bridge(pol.SectionIndex(n, m), norms)) / pol.hilbert_bridge(pol.SectionIndex(n, m), norms).max_abs()
                for m in range(K + 1) for n in range(K + 1))

        checks += [
            _guarded(f"bridge_homomorphism[{tag}]", 1e-8, "e(sigma_mn) = e_{m,n-m} sqrt(l_m l_n)", homomorphism),
            _guarded(f"bridge_isometry[{tag}]", 1e-8, "mu(n) l_m l_n = ||sigma_mn||^2", isometry),
            _guarded(f"bridge_involution[{tag}]", 1e-12, "e(sigma_mn)^* = e(sigma_nm)", involution),
            _guarded(f"modular_eigenvalues[{tag}]", 1e-8, "l_n r_m / l_m r_n", eigen),
            _guarded(f"modular_cocycle_class[{tag}]", 1e-8, "c = c1 + d*phi", cocycle),
            _guarded(f"phi_limit[{tag}]", 0.05, "lim phi(m) = phi(oo)",
                     lambda norms=norms: abs(norms.phi(cfg.nmax) - norms.phi(gp.INF))),
        ]

    def quantized_d():
        return max(_quantized_d_ratio(pol.SectionIndex(m, n), hb) for m in range(K + 1) for n in range(K + 1))

    checks.append(_guarded("quantized_D_matches_modular_operator", 1e-12,
                           "D sigma_mn = exp(-hbar(m-n)) sigma_mn", quantized_d))
    return checks, []


def _quantized_d_ratio(i: pol.SectionIndex, hbar: float) -> float:
    """|D eigenvalue of e_{m,n-m} minus quantized_D(m, n)|, relative."""
    e = gp.AlgebraElement({(i.m, i.n - i.m): 1.0})
    d = gp.modular_operator(e, hbar)[(i.m, i.n - i.m)].real
    return _rel(d, pol.quantized_D(i, hbar))


def dilog_checks() -> list[Check]:
    t = np.geomspace(1e-3, 1e3, 500)
    return [
        Check("dilog_inversion", float(inversion_residual(t).max()), 1e-12, "Li2(-t) + Li2(-1/t) = -pi^2/6 - log^2 t / 2"),
        Check("dilog_at_minus_one", abs(dilog(-1.0) + math.pi ** 2 / 12), 1e-13, "Li2(-1) = -pi^2/12"),
    ]


_RUNNERS = {
    "algebra": _algebra,
    "kms": _kms,
    "podles": _podles,
    "geometry": _geometry,
    "bs-leaves": _bs_leaves,
    "norms": _norms,
    "asymptotics": _asymptotics,
    "bridge": _bridge,
}


def run_suite(name: str, cfg: RunConfig) -> SuiteReport:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    checks, table = _RUNNERS[name](cfg)
    if name == "norms":
        checks = checks + dilog_checks()
    return SuiteReport(name, cfg, checks, table)
