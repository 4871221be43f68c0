"""Bohr-Sommerfeld leaves, polarized sections and the bridge to the groupoid algebra.

Real polarization: the leaves |x|^2 = F_+, |y|^2 = F_- are Bohr-Sommerfeld iff
F_+- = exp(hbar n_+-) - 1. Through the leaf morphism
(x, y) -> (log(1+|x|^2), log((1+|y|^2)/(1+|x|^2))) they form a groupoid that is
the Sheu groupoid G_S.

Complex polarization: the polarized sections

    sigma_{m,n}(x, y) = xbar^m y^n exp((Li2(-|x|^2) + Li2(-|y|^2)) / (2 hbar))

are orthogonal for both scalar products considered here; all norms reduce, by
the angular integrals, to the radial integrals

    A_m = 2 pi int t^m (1+t)^(-1/2) W(t) dt
    l_m = 2 pi int t^m sqrt(Lambda(t)) W(t) dt
    r_m = 2 pi int t^m (1+t)^(-1) sqrt(rho(t)) W(t) dt,   W(t) = exp(Li2(-t)/hbar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import geometry as geo
from .groupoid import (
    GS, INF, O1, AlgebraElement, NotComposable, arrows_in_window, compose, custom_measure,
)
from .special import QuadratureSpec, asymptotic_ratio, dilog, dilog_neg_exp, log_weighted_integral

TWO_PI = 2 * math.pi


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------

def _one(t):
    return np.ones_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class WeightPair:
    """Radial densities Lambda(t), rho(t) of t = |.|^2 with their limits at infinity."""

    Lambda: Callable = _one
    rho: Callable = _one
    lambda_inf: float = 1.0
    rho_inf: float = 1.0
    name: str = "unit"


UNIT_WEIGHTS = WeightPair()

# Lambda -> 1 keeps the Haar normalization, rho -> 2 moves phi(oo) by log(2)/2
CUSTOM_WEIGHTS = WeightPair(
    Lambda=lambda t: (2.0 + t) / (1.0 + t),
    rho=lambda t: (3.0 + 2.0 * t) / (1.0 + t),
    lambda_inf=1.0,
    rho_inf=2.0,
    name="custom",
)


def _log_density(func: Callable, s):
    t = np.exp(np.minimum(s, 700.0))
    return np.log(np.asarray(func(t), dtype=float) * np.ones_like(t))


# ---------------------------------------------------------------------------
# Bohr-Sommerfeld leaves and the leaf groupoid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BSLeaf:
    """Leaf encoded by its arrow (m, n) = (n_plus, n_minus), or the leaf over N.

    Levels: |x|^2 = exp(hbar m) - 1 and |y|^2 = exp(hbar (m + n)) - 1, so that the
    leaf morphism sends the leaf to (hbar m, hbar n).
    """

    n_plus: int | float
    n_minus: int

    def __post_init__(self):
        if self.n_plus != INF and (self.n_plus < 0 or self.n_plus + self.n_minus < 0):
            raise ValueError(f"not a leaf: ({self.n_plus}, {self.n_minus})")
        if self.n_plus == INF and self.n_minus != 0:
            raise ValueError("the leaf over N only carries n_minus = 0")

    @property
    def is_infinite(self) -> bool:
        return self.n_plus == INF

    @property
    def is_unit(self) -> bool:
        return self.n_minus == 0

    @property
    def arrow(self) -> tuple:
        return (self.n_plus, self.n_minus)

    def levels(self, hbar: float) -> tuple[float, float]:
        if self.is_infinite:
            return (math.inf, math.inf)
        return math.expm1(hbar * self.n_plus), math.expm1(hbar * (self.n_plus + self.n_minus))

    def tau(self, hbar: float) -> float:
        """tau = 1/(1+|x|^2) on the source leaf."""
        return 0.0 if self.is_infinite else math.exp(-hbar * self.n_plus)


INF_LEAF = BSLeaf(INF, 0)


def bs_level(n: int, hbar: float) -> float:
    return math.expm1(hbar * n)


def bs_leaves(hbar: float, n_max: int) -> list[BSLeaf]:
    """Unit leaves n = 0..n_max (tau = exp(-hbar n)) followed by the leaf over N."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    return [BSLeaf(n, 0) for n in range(n_max + 1)] + [INF_LEAF]


def theta(x: complex, y: complex, dx: complex, dy: complex) -> float:
    """The local primitive Theta of Omega evaluated on (dx, dy)."""
    def part(a, da):
        if a == 0:
            return 0.0
        # (1/2i) log(1+|a|^2) (dabar/abar - da/a) = log(1+|a|^2) Im(da/a) * (-1)
        return -math.log1p(abs(a) ** 2) * (da / a).imag
    return part(x, dx) - part(y, dy)


def circle_action(level: float, steps: int = 256) -> float:
    """int Theta around the circle |x|^2 = level (trapezoid on a periodic integrand)."""
    r = math.sqrt(level)
    th = np.linspace(0.0, TWO_PI, steps, endpoint=False)
    vals = [theta(r * complex(math.cos(a), math.sin(a)), 0j,
                  1j * r * complex(math.cos(a), math.sin(a)), 0j) for a in th]
    return float(np.sum(vals) * TWO_PI / steps)


def is_bohr_sommerfeld(level: float, hbar: float, tol: float = 1e-9) -> bool:
    """Holonomy of the leaf circle is trivial: action in 2 pi hbar Z."""
    k = circle_action(level) / (TWO_PI * hbar)
    return abs(k - round(k)) < tol


@dataclass
class LeafGroupoid:
    hbar: float
    n_max: int
    leaves: list[BSLeaf]
    points: dict                        # leaf -> sampled groupoid element on it
    coords: dict                        # leaf -> (s, t) from the leaf morphism, or None over N
    mismatches: list = field(default_factory=list)

    def to_gs(self, leaf: BSLeaf) -> tuple:
        st = self.coords[leaf]
        if st is None:
            return (INF, 0)
        s, t = st
        return (int(round(s / self.hbar)), int(round(t / self.hbar)))

    def compose_leaves(self, a: BSLeaf, b: BSLeaf, tol: float = 1e-9):
        """Composition in the action groupoid of R on R u {oo}, read off leaf coordinates."""
        ca, cb = self.coords[a], self.coords[b]
        if ca is None or cb is None:
            return (INF, 0) if ca is None and cb is None else None
        (s, t), (s2, t2) = ca, cb
        if abs(s + t - s2) > tol * max(1.0, abs(s2)):
            return None
        return (s, t + t2)


def leaf_groupoid(hbar: float, n_max: int, seed: int = 0) -> LeafGroupoid:
    """Sample one groupoid element on every BS leaf of the window and compare with G_S.

    Leaf coordinates come from :func:`podles.geometry.leaf_morphism`; the table of
    leaf compositions is compared exhaustively with the G_S table on arrows with
    m, m+n <= n_max plus the unit over N.
    """
    rng = np.random.default_rng(seed)
    leaves = [BSLeaf(a, b - a) for a in range(n_max + 1) for b in range(n_max + 1)] + [INF_LEAF]
    points, coords = {}, {}
    for leaf in leaves:
        if leaf.is_infinite:
            g = geo.ChartPoint(geo.SINGULAR, 0j, complex(*rng.normal(size=2)))
        else:
            fp, fm = leaf.levels(hbar)
            x = math.sqrt(fp) * np.exp(1j * rng.uniform(0, TWO_PI))
            y = math.sqrt(fm) * np.exp(1j * rng.uniform(0, TWO_PI))
            g = geo.from_pair(x, y)
        points[leaf] = g
        coords[leaf] = geo.leaf_morphism(g)
    lg = LeafGroupoid(hbar, n_max, leaves, points, coords)

    images = {leaf: lg.to_gs(leaf) for leaf in leaves}
    if sorted(images.values(), key=str) != sorted(arrows_in_window(n_max, GS), key=str) \
            or len(set(images.values())) != len(leaves):
        lg.mismatches.append(("bijection", None, None))
    for a in leaves:
        for b in leaves:
            st = lg.compose_leaves(a, b)
            try:
                expected = compose(images[a], images[b])
            except NotComposable:
                expected = None
            if st is None:
                got = None
            elif st == (INF, 0):
                got = (INF, 0)
            else:
                got = (int(round(st[0] / hbar)), int(round(st[1] / hbar)))
            if got != expected:
                lg.mismatches.append((a, b, got, expected))
    return lg


def leaf_product_check(lg: LeafGroupoid, a: BSLeaf, b: BSLeaf, rng: np.random.Generator) -> float:
    """Multiply points of composable leaves a, b in T*S^2; distance of the product's leaf from a.b."""
    g1 = lg.points[a]
    _, y1 = geo.to_pair(g1)
    _, fm = b.levels(lg.hbar)
    y2 = math.sqrt(fm) * np.exp(1j * rng.uniform(0, TWO_PI))
    g2 = geo.from_pair(y1, y2)
    prod = geo.multiply(g1, g2)
    s, t = geo.leaf_morphism(prod)
    exp_s, exp_t = lg.compose_leaves(a, b)
    return max(abs(s - exp_s), abs(t - exp_t))


# ---------------------------------------------------------------------------
# Complex polarization: sections, norms, quantized observables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectionIndex:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError(f"section indices must be natural, got ({self.m}, {self.n})")

    @property
    def swapped(self) -> "SectionIndex":
        return SectionIndex(self.n, self.m)


@dataclass(frozen=True)
class NormValues:
    A_m: float
    A_n: float
    ell_m: float
    r_m: float
    ell_n: float
    r_n: float


class SectionNorms:
    """Radial integrals A_m, l_m, r_m for one (hbar, weights, quadrature) choice.

    Values are computed on demand in log form and kept; each index is written once.
    """

    def __init__(self, hbar: float, weights: WeightPair = UNIT_WEIGHTS, spec: QuadratureSpec | None = None):
        if not hbar > 0:
            raise ValueError(f"hbar must be positive, got {hbar}")
        self.hbar = hbar
        self.weights = weights
        self.spec = spec or QuadratureSpec()
        self._cache: dict[tuple[str, int], float] = {}

    def _log(self, kind: str, m: int) -> float:
        key = (kind, m)
        if key not in self._cache:
            w = self.weights
            if kind == "A":
                log_f = lambda s: m * s - 0.5 * np.logaddexp(0.0, s)
            elif kind == "ell":
                log_f = lambda s: m * s + 0.5 * _log_density(w.Lambda, s)
            elif kind == "r":
                log_f = lambda s: m * s - np.logaddexp(0.0, s) + 0.5 * _log_density(w.rho, s)
            else:
                raise ValueError(kind)
            self._cache[key] = math.log(TWO_PI) + log_weighted_integral(log_f, self.hbar, self.spec)
        return self._cache[key]

    def log_A(self, m: int) -> float:
        return self._log("A", m)

    def log_ell(self, m: int) -> float:
        return self._log("ell", m)

    def log_r(self, m: int) -> float:
        return self._log("r", m)

    def A(self, m: int) -> float:
        return math.exp(self.log_A(m))

    def ell(self, m: int) -> float:
        return math.exp(self.log_ell(m))

    def r(self, m: int) -> float:
        return math.exp(self.log_r(m))

    def ratio(self, m: int) -> float:
        """r_m / l_m."""
        return math.exp(self.log_r(m) - self.log_ell(m))

    def phi(self, m) -> float:
        """phi(m) = log(r_m/l_m)/hbar + m; phi(oo) = -1/2 + log(rho(oo)/Lambda(oo))/(2 hbar).

        The value at oo is the limit of phi(m) implied by the saddle-point ratio
        r_m/l_m ~ exp(-hbar(m+1/2)) sqrt(rho(oo)/Lambda(oo)).
        """
        if m == INF:
            w = self.weights
            return -0.5 + 0.5 * math.log(w.rho_inf / w.lambda_inf) / self.hbar
        return (self.log_r(m) - self.log_ell(m)) / self.hbar + m

    def refined(self) -> "SectionNorms":
        return SectionNorms(self.hbar, self.weights, self.spec.refined())


def section_norms(idx: SectionIndex, norms: SectionNorms) -> NormValues:
    m, n = idx.m, idx.n
    return NormValues(norms.A(m), norms.A(n), norms.ell(m), norms.r(m), norms.ell(n), norms.r(n))


def section_value(idx: SectionIndex, x, y, hbar: float):
    """sigma_{m,n}(x, y) at arrays of points."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    w = (dilog(-np.abs(x) ** 2) + dilog(-np.abs(y) ** 2)) / (2 * hbar)
    return np.conj(x) ** idx.m * y ** idx.n * np.exp(w)


def apply_f_hat(poly: dict[tuple[int, int], complex], hbar: float) -> dict[tuple[int, int], complex]:
    """hbar xbar d/dxbar psi + (hbar/2) psi on psi = sum c_{mn} xbar^m y^n."""
    return {(m, n): c * (hbar * m + 0.5 * hbar) for (m, n), c in poly.items()}


def quantized_f(idx: SectionIndex, hbar: float) -> float:
    """Eigenvalue of the quantization of log(1+|x|^2): hbar (m + 1/2)."""
    return hbar * (idx.m + 0.5)


def quantized_tau(idx: SectionIndex, hbar: float) -> float:
    return math.exp(-quantized_f(idx, hbar))


def quantized_D(idx: SectionIndex, hbar: float) -> float:
    """Modular function D = l*tau / r*tau quantized: exp(-hbar (m - n))."""
    return math.exp(-hbar * (idx.m - idx.n))


def scalar_product_symplectic(i1: SectionIndex, i2: SectionIndex, norms: SectionNorms) -> complex:
    """Symplectic scalar product of monomial sections: A_m A_n on the diagonal, else 0."""
    if i1 != i2:
        return 0j
    return complex(norms.A(i1.m) * norms.A(i1.n))


def scalar_product_groupoid(i1: SectionIndex, i2: SectionIndex, norms: SectionNorms) -> complex:
    """Scalar product built from the Haar system and rho V: l_m r_n on the diagonal, else 0."""
    if i1 != i2:
        return 0j
    return complex(norms.ell(i1.m) * norms.r(i1.n))


def convolve_sections(i1: SectionIndex, i2: SectionIndex, norms: SectionNorms):
    """sigma_{m,k} *_Lambda sigma_{j,n} = delta_{kj} l_k sigma_{m,n}; returns (coefficient, index)."""
    if i1.n != i2.m:
        return 0.0, None
    return norms.ell(i1.n), SectionIndex(i1.m, i2.n)


def involute_section(idx: SectionIndex) -> SectionIndex:
    """sigma*(x, y) = conj(sigma(y, x)) maps sigma_{m,n} to sigma_{n,m}."""
    return idx.swapped


def modular_eigenvalue_groupoid(idx: SectionIndex, norms: SectionNorms) -> float:
    """Eigenvalue of S^dagger S on sigma_{m,n} for the groupoid scalar product."""
    m, n = idx.m, idx.n
    return math.exp(norms.log_ell(n) + norms.log_r(m) - norms.log_ell(m) - norms.log_r(n))


def modular_eigenvalue_symplectic(idx: SectionIndex, norms: SectionNorms) -> float:
    m, n = idx.m, idx.n
    return math.exp(norms.log_A(n) + norms.log_A(m) - norms.log_A(m) - norms.log_A(n))


# ---------------------------------------------------------------------------
# Bridge onto the convolution algebra of O1
# ---------------------------------------------------------------------------

def hilbert_bridge(idx: SectionIndex, norms: SectionNorms) -> AlgebraElement:
    """e(sigma_{m,n}) = sqrt(l_m l_n) e_{m, n-m}."""
    c = math.exp(0.5 * (norms.log_ell(idx.m) + norms.log_ell(idx.n)))
    return AlgebraElement({(idx.m, idx.n - idx.m): c}, O1)


def bridge_measure(norms: SectionNorms):
    """mu(m) = r_m / l_m on the naturals, 0 at INF (its limit)."""
    return custom_measure(lambda m: 0.0 if m == INF else norms.ratio(m))


def asymptotic_reference(n: int, norms: SectionNorms) -> float:
    w = norms.weights
    return asymptotic_ratio(n, norms.hbar, w.lambda_inf, w.rho_inf)


def modular_cocycle_phi(m_max: int, norms: SectionNorms) -> tuple[list[float], float]:
    if m_max < 5:
        raise ValueError("m_max must be >= 5")
    return [norms.phi(m) for m in range(m_max + 1)], norms.phi(INF)


# ---------------------------------------------------------------------------
# Direct quadrature oracles (independent of the radial reduction above)
# ---------------------------------------------------------------------------

def _log_grid(step: float, lo: float = -40.0, hi: float = 40.0):
    u = np.arange(lo, hi + step / 2, step)
    return u, np.exp(u)


def tensor_grid_scalar_product(i1: SectionIndex, i2: SectionIndex, hbar: float,
                               weights: WeightPair = UNIT_WEIGHTS, step: float = 0.1,
                               n_angles: int = 16) -> complex:
    """<sigma_1, sigma_2> with the Haar/rho weight, by trapezoid on a tensor grid.

    Radial variables u = log|x|^2, u' = log|y|^2 on a 2-D grid carrying the full
    coupled weight sqrt(rho(y) Lambda(x) / D(x,y)) / sqrt((1+|x|^2)(1+|y|^2));
    the two angles on a uniform periodic grid.
    """
    u, t = _log_grid(step)
    tx, ty = t[:, None], t[None, :]
    D = (1 + ty) / (1 + tx)
    dens = np.sqrt(weights.rho(ty) * weights.Lambda(tx) / D) / np.sqrt((1 + tx) * (1 + ty))
    wx = dilog_neg_exp(u)[:, None] / hbar
    wy = dilog_neg_exp(u)[None, :] / hbar
    # |x|^{m1+m2} |y|^{n1+n2} with |x| = sqrt(t); d^2x = dt dtheta = e^u du dtheta
    logmag = (0.5 * (i1.m + i2.m) + 1) * np.log(tx) + (0.5 * (i1.n + i2.n) + 1) * np.log(ty) + wx + wy
    ref = logmag.max()
    radial = np.sum(dens * np.exp(logmag - ref)) * step * step
    th = np.linspace(0.0, TWO_PI, n_angles, endpoint=False)
    # conj(xbar^m1) xbar^m2 -> e^{i(m1-m2)theta};  conj(y^n1) y^n2 -> e^{i(n2-n1)theta}
    ang_x = np.sum(np.exp(1j * (i1.m - i2.m) * th)) * TWO_PI / n_angles
    ang_y = np.sum(np.exp(1j * (i2.n - i1.n) * th)) * TWO_PI / n_angles
    return complex(radial * ang_x * ang_y * math.exp(ref))


def direct_convolution(i1: SectionIndex, i2: SectionIndex, x: complex, y: complex, hbar: float,
                       weights: WeightPair = UNIT_WEIGHTS, step: float = 0.05,
                       n_angles: int = 32) -> complex:
    """(sigma_1 *_Lambda sigma_2)(x, y) = int d^2z sqrt(Lambda(z)) sigma_1(x, z) sigma_2(z, y), on a polar grid."""
    u, t = _log_grid(step)
    th = np.linspace(0.0, TWO_PI, n_angles, endpoint=False)
    z = np.sqrt(t)[:, None] * np.exp(1j * th)[None, :]
    vals = section_value(i1, x, z, hbar) * section_value(i2, z, y, hbar)
    vals = vals * np.sqrt(weights.Lambda(np.abs(z) ** 2))
    # d^2z = dt dtheta = e^u du dtheta
    return complex(np.sum(vals * t[:, None]) * step * TWO_PI / n_angles)


def modular_cocycle(arrow: tuple, norms: SectionNorms) -> float:
    """c_(rho,Lambda)(m, n) = log(eigenvalue on sigma_{m,m+n}) / hbar; equals c1 + d*phi."""
    m, n = arrow
    if m == INF:
        return 0.0
    return math.log(modular_eigenvalue_groupoid(SectionIndex(m, m + n), norms)) / norms.hbar
