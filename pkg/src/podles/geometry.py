"""The symplectic groupoid of the Poisson sphere, modelled on T*S^2 in two charts.

Symplectic chart (z, p_N) covers S^2 minus the north pole N; singular chart
(w, p_S) covers S^2 minus the south pole and contains the fibre over N at w = 0.
On the overlap w = 1/z and p_N = -w^2 p_S.

Away from N the groupoid is the pair groupoid of C through

    phi(z, p_N) = (x, y) = (z, z + (1 + |z|^2) conj(p_N)),

so source/target are x/y, multiplication is (x, y)(y, y') = (x, y'), inversion is
the flip, and the symplectic form is omega(x) - omega(y) with
omega(x) = dx ^ dxbar / (i (1 + |x|^2)).

Tangent vectors are real 4-vectors (d Re base, d Im base, d Re fiber, d Im fiber)
in the coordinates of the point's chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

SYMPLECTIC = "symplectic"
SINGULAR = "singular"

COMPOSE_TOL = 1e-9


class GeometryError(ValueError):
    pass


class NotComposableError(GeometryError):
    def __init__(self, mismatch: float):
        super().__init__(f"target/source mismatch {mismatch:.3e}")
        self.mismatch = mismatch


@dataclass(frozen=True)
class ChartPoint:
    chart: str
    base: complex
    fiber: complex

    def __post_init__(self):
        if self.chart not in (SYMPLECTIC, SINGULAR):
            raise ValueError(f"unknown chart {self.chart!r}")
        object.__setattr__(self, "base", complex(self.base))
        object.__setattr__(self, "fiber", complex(self.fiber))


def unit(chart: str, base: complex) -> ChartPoint:
    return ChartPoint(chart, base, 0j)


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------

def to_chart(p: ChartPoint, chart: str) -> ChartPoint:
    if p.chart == chart:
        return p
    if p.base == 0:
        raise GeometryError(f"point at base 0 of the {p.chart} chart is not in the {chart} chart")
    b = 1.0 / p.base
    # the transition has the same form both ways: p_other = -base^2 p
    return ChartPoint(chart, b, -p.base ** 2 * p.fiber)


def push_tangent(p: ChartPoint, v, chart: str) -> np.ndarray:
    """Differential of the chart transition applied to tangent vector ``v`` at ``p``."""
    v = np.asarray(v, dtype=float)
    if p.chart == chart:
        return v
    db = complex(v[0], v[1])
    dp = complex(v[2], v[3])
    b, f = p.base, p.fiber
    db_new = -db / b ** 2
    dp_new = -2 * b * f * db - b ** 2 * dp
    return np.array([db_new.real, db_new.imag, dp_new.real, dp_new.imag])


def to_pair(p: ChartPoint) -> tuple[complex, complex]:
    """phi: point -> (x, y) in C x C (only off the fibre over N)."""
    p = to_chart(p, SYMPLECTIC)
    z = p.base
    return z, z + (1 + abs(z) ** 2) * p.fiber.conjugate()


def from_pair(x: complex, y: complex) -> ChartPoint:
    x, y = complex(x), complex(y)
    return ChartPoint(SYMPLECTIC, x, (y - x).conjugate() / (1 + abs(x) ** 2))


def _sigma_s(w: complex, p: complex) -> complex:
    return -(1 + abs(w) ** 2) * p.conjugate()


# ---------------------------------------------------------------------------
# Groupoid structure
# ---------------------------------------------------------------------------

def source(p: ChartPoint) -> complex:
    return p.base


def target(p: ChartPoint) -> complex:
    """r = z + (1+|z|^2) conj(p_N), or w / (1 + sigma_S conj(w)) in the singular chart."""
    if p.chart == SYMPLECTIC:
        return p.base + (1 + abs(p.base) ** 2) * p.fiber.conjugate()
    w = p.base
    den = 1 + _sigma_s(w, p.fiber) * w.conjugate()
    if den == 0:
        raise GeometryError(f"target has a pole at w={w}, p_S={p.fiber}")
    return w / den


def _product(chart: str, base: complex, p1: complex, p2: complex) -> complex:
    """Fibre coordinate of g1 g2, given g1 = (base, p1) and g2 = (target(g1), p2)."""
    if chart == SYMPLECTIC:
        mid = base + (1 + abs(base) ** 2) * p1.conjugate()
        return p1 + (1 + abs(mid) ** 2) / (1 + abs(base) ** 2) * p2
    u = 1 + _sigma_s(base, p1) * base.conjugate()
    mid = base / u
    return p1 + p2 * (1 + abs(mid) ** 2) / (1 + abs(base) ** 2) * u.conjugate() / u


def composable(g1: ChartPoint, g2: ChartPoint, tol: float = COMPOSE_TOL) -> bool:
    g2 = to_chart(g2, g1.chart)
    return abs(target(g1) - source(g2)) < tol


def multiply(g1: ChartPoint, g2: ChartPoint, tol: float = COMPOSE_TOL) -> ChartPoint:
    """(z, p) (z', p') = (z, p + (1+|z'|^2)/(1+|z|^2) p') in the symplectic chart.

    g2 is expressed in g1's chart; its source is snapped to target(g1) once the
    mismatch is below ``tol``.
    """
    if g2.chart != g1.chart:
        if g2.base == 0:
            g1 = to_chart(g1, g2.chart)
        else:
            g2 = to_chart(g2, g1.chart)
    mismatch = abs(target(g1) - source(g2))
    if not mismatch < tol:
        raise NotComposableError(mismatch)
    return ChartPoint(g1.chart, g1.base, _product(g1.chart, g1.base, g1.fiber, g2.fiber))


def inverse(g: ChartPoint) -> ChartPoint:
    """Inversion, the flip (x, y) -> (y, x) of the pair groupoid."""
    if g.chart == SYMPLECTIC:
        x, y = to_pair(g)
        return from_pair(y, x)
    w, p = g.base, g.fiber
    u = 1 + _sigma_s(w, p) * w.conjugate()
    w2 = w / u
    return ChartPoint(SINGULAR, w2, -p * (1 + abs(w) ** 2) / (1 + abs(w2) ** 2) * u / u.conjugate())


# ---------------------------------------------------------------------------
# Symplectic form
# ---------------------------------------------------------------------------

def _omega(x: complex, dx1: complex, dx2: complex) -> float:
    # dx ^ dxbar / (i (1+|x|^2)) evaluated on two real vectors
    return 2.0 * (dx1 * dx2.conjugate()).imag / (1 + abs(x) ** 2)


def pair_differential(p: ChartPoint, v) -> tuple[complex, complex]:
    """(dx, dy) of a symplectic-chart tangent vector under phi."""
    if p.chart != SYMPLECTIC:
        raise GeometryError("pair_differential needs a symplectic-chart point")
    z, f = p.base, p.fiber
    dz = complex(v[0], v[1])
    df = complex(v[2], v[3])
    dy = dz + 2 * (z.conjugate() * dz).real * f.conjugate() + (1 + abs(z) ** 2) * df.conjugate()
    return dz, dy


def _omega_singular(p: ChartPoint, u, v) -> float:
    w, f = p.base, p.fiber
    n = 1 + abs(w) ** 2
    sig = -n * f.conjugate()
    uu = 1 + sig * w.conjugate()
    w2 = w / uu
    n2 = 1 + abs(w2) ** 2

    def forms(V):
        dw = complex(V[0], V[1])
        dp = complex(V[2], V[3])
        dsig = -2 * (w.conjugate() * dw).real * f.conjugate() - n * dp.conjugate()
        du = w.conjugate() * dsig + sig * dw.conjugate()
        return dw, dsig, du

    def wedge(a1, b1, a2, b2):
        return a1 * b2 - a2 * b1

    dw1, ds1, du1 = forms(u)
    dw2, ds2, du2 = forms(v)
    ww = wedge(dw1, dw1.conjugate(), dw2, dw2.conjugate())
    rest = (
        -wedge(dw1, ds1.conjugate(), dw2, ds2.conjugate()) / uu.conjugate()
        - wedge(ds1, dw1.conjugate(), ds2, dw2.conjugate()) / uu
        + wedge(du1, du1.conjugate(), du2, du2.conjugate()) / abs(uu) ** 2
    )
    val = ((1 / abs(uu) ** 2 - 1) * ww / (n * n2) - rest / n2) / 1j
    return val.real


def symplectic_form(p: ChartPoint, u, v) -> float:
    """Omega_p(u, v) = omega(x)(dx_u, dx_v) - omega(y)(dy_u, dy_v).

    Symplectic-chart points go through phi; singular-chart points use the same
    form rewritten in (w, p_S), which stays smooth on the fibre over N.
    """
    if p.chart == SINGULAR:
        return _omega_singular(p, u, v)
    x, y = to_pair(p)
    dx1, dy1 = pair_differential(p, u)
    dx2, dy2 = pair_differential(p, v)
    return _omega(x, dx1, dx2) - _omega(y, dy1, dy2)


def _shift(p: ChartPoint, v, eps: float) -> ChartPoint:
    return ChartPoint(p.chart, p.base + eps * complex(v[0], v[1]), p.fiber + eps * complex(v[2], v[3]))


def exterior_derivative(p: ChartPoint, X, Y, Z, h: float = 1e-4) -> float:
    """dOmega(X, Y, Z) for constant coordinate fields, by five-point central differences."""
    def d(V, A, B):
        f = lambda e: symplectic_form(_shift(p, V, e), A, B)
        return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)
    return d(X, Y, Z) - d(Y, X, Z) + d(Z, X, Y)


def _re_dot(a: complex, da: complex) -> float:
    # d|a|^2 / 2
    return (a.conjugate() * da).real


def _target_and_differential(chart: str, b: complex, f: complex, db: complex, df: complex):
    """target(b, f) and its differential, plus the pieces reused by the product."""
    n = 1 + abs(b) ** 2
    dn = 2 * _re_dot(b, db)
    if chart == SYMPLECTIC:
        m = b + n * f.conjugate()
        dm = db + dn * f.conjugate() + n * df.conjugate()
        return m, dm, None
    sig = -n * f.conjugate()
    dsig = -dn * f.conjugate() - n * df.conjugate()
    u = 1 + sig * b.conjugate()
    du = dsig * b.conjugate() + sig * db.conjugate()
    if u == 0:
        raise GeometryError(f"target has a pole at w={b}, p_S={f}")
    m = b / u
    dm = db / u - b * du / u ** 2
    return m, dm, (u, du)


def target_differential(p: ChartPoint, v) -> complex:
    _, dm, _ = _target_and_differential(p.chart, p.base, p.fiber, complex(v[0], v[1]), complex(v[2], v[3]))
    return dm


def product_differential(g1: ChartPoint, g2: ChartPoint, u1, u2) -> np.ndarray:
    """d m at (g1, g2) applied to a tangent vector (u1, u2) of the composable pairs.

    Both points must be in the same chart. The product depends on g2 only through
    its fibre coordinate, since its base is pinned to target(g1).
    """
    b, p1, p2 = g1.base, g1.fiber, g2.fiber
    db, dp1, dp2 = complex(u1[0], u1[1]), complex(u1[2], u1[3]), complex(u2[2], u2[3])
    n = 1 + abs(b) ** 2
    dn = 2 * _re_dot(b, db)
    m, dm, extra = _target_and_differential(g1.chart, b, p1, db, dp1)
    n2 = 1 + abs(m) ** 2
    dn2 = 2 * _re_dot(m, dm)
    if extra is None:
        F = n2 / n
        dF = F * (dn2 / n2 - dn / n)
    else:
        u, du = extra
        F = n2 / n * u.conjugate() / u
        dF = F * (dn2 / n2 - dn / n + du.conjugate() / u.conjugate() - du / u)
    dp = dp1 + dp2 * F + p2 * dF
    return np.array([db.real, db.imag, dp.real, dp.imag])


def multiplicativity_residual(g1: ChartPoint, g2: ChartPoint, u1, u2, v1, v2) -> float:
    """(d0* - d1* + d2*) Omega on (g1, g2) with d0 = pr2, d1 = m, d2 = pr1."""
    g12 = multiply(g1, g2)
    mu = product_differential(g1, g2, u1, u2)
    mv = product_differential(g1, g2, v1, v2)
    return (symplectic_form(g2, u2, v2)
            - symplectic_form(g12, mu, mv)
            + symplectic_form(g1, u1, v1))


def composable_lift(g1: ChartPoint, g2: ChartPoint, u1, fiber_dir) -> np.ndarray:
    """Tangent vector at g2 whose base part matches d target(u1), completing (u1, u2)."""
    db = target_differential(g1, u1)
    return np.array([db.real, db.imag, fiber_dir[0], fiber_dir[1]])


def random_point(rng: np.random.Generator, chart: str = SYMPLECTIC, scale: float = 1.5) -> ChartPoint:
    """Gaussian sample; singular-chart samples stay away from the target pole."""
    while True:
        b = complex(*rng.normal(scale=scale, size=2))
        f = complex(*rng.normal(scale=0.5, size=2))
        if chart == SYMPLECTIC or abs(1 + _sigma_s(b, f) * b.conjugate()) > 0.3:
            return ChartPoint(chart, b, f)


def random_composable_pair(rng: np.random.Generator, chart: str = SYMPLECTIC) -> tuple[ChartPoint, ChartPoint]:
    g1 = random_point(rng, chart)
    g2 = ChartPoint(chart, target(g1), complex(*rng.normal(scale=0.5, size=2)))
    return g1, g2


# ---------------------------------------------------------------------------
# Modular vector field and modular function
# ---------------------------------------------------------------------------

def modular_vector_field(z: complex) -> np.ndarray:
    """i(z d_z - zbar d_zbar) as a real vector: the rotation zdot = i z."""
    z = complex(z)
    return np.array([-z.imag, z.real])


def modular_flow(z: complex, t: float) -> complex:
    return complex(z) * complex(math.cos(t), math.sin(t))


def modular_function(g: ChartPoint) -> float:
    """log (1 + |y|^2) / (1 + |x|^2), written in either chart."""
    if g.chart == SYMPLECTIC:
        x, y = to_pair(g)
        return math.log1p(abs(y) ** 2) - math.log1p(abs(x) ** 2)
    w, p = g.base, g.fiber
    num = abs(w) ** 2 + abs(1 - (1 + abs(w) ** 2) * w.conjugate() * p.conjugate()) ** 2
    return math.log(num) - math.log1p(abs(w) ** 2)


def leaf_morphism(g: ChartPoint) -> tuple[float, float] | None:
    """(log(1+|x|^2), log((1+|y|^2)/(1+|x|^2))); None on the fibre over N."""
    if g.chart == SINGULAR and g.base == 0:
        return None
    x, _ = to_pair(g)
    return math.log1p(abs(x) ** 2), modular_function(to_chart(g, SYMPLECTIC))


def poisson_coefficient(z) -> np.ndarray:
    """pi^{ab} in real coordinates z = a + ib: pi = (1+|z|^2)/2 d_a ^ d_b."""
    return 0.5 * (1 + np.abs(z) ** 2)


def cotangent_lift(z, zdot) -> tuple[np.ndarray, np.ndarray]:
    """Covector c with pi#(c) = zdot, where pi#(c)^a = pi^{ab} c_b."""
    P = poisson_coefficient(z)
    zdot = np.asarray(zdot, dtype=complex)
    return -zdot.imag / P, zdot.real / P


def integrate_cocycle(path: Callable, steps: int = 10_000, velocity: Callable | None = None) -> float:
    """int_0^1 <chi(gamma(t)), c(t)> dt along the cotangent lift of a base path.

    ``path`` maps an array of times in [0, 1] to points z of the symplectic leaf.
    Without ``velocity`` the derivative is taken with second-order differences.
    Trapezoid rule: error O(steps^-2).
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    t = np.linspace(0.0, 1.0, steps + 1)
    z = np.asarray(path(t), dtype=complex)
    if not np.all(np.isfinite(z)):
        raise GeometryError("path leaves the symplectic chart")
    zdot = np.asarray(velocity(t), dtype=complex) if velocity else np.gradient(z, t, edge_order=2)
    ca, cb = cotangent_lift(z, zdot)
    integrand = -z.imag * ca + z.real * cb
    return float(np.trapezoid(integrand, t))


@dataclass(frozen=True)
class HaarDensity:
    """Density Lambda of the left Haar system on the source fibres, with its limit at N."""

    func: Callable[[complex], float]
    at_infinity: float = 1.0

    def value(self, chart: str, base: complex) -> float:
        if chart == SYMPLECTIC:
            return float(self.func(base))
        if base == 0:
            return float(self.at_infinity)
        return float(self.func(1 / base))


def haar_volume_ratio(g: ChartPoint, density: HaarDensity) -> float:
    """Modular cocycle of the Haar system: 2 c_V(g) - (log Lambda(r(g)) - log Lambda(l(g)))."""
    lam_t = density.value(g.chart, target(g))
    lam_s = density.value(g.chart, source(g))
    return 2 * modular_function(g) - (math.log(lam_t) - math.log(lam_s))
