"""Convolution algebras of the Cuntz groupoid O1 and the Sheu subgroupoid G_S.

O1 is the action groupoid of Z translating Z u {oo} (oo fixed), restricted to the
compactified naturals. An arrow (m, n) has source m and target m + n; the point
at infinity is ``INF`` (a float infinity, so ``INF + n == INF`` and every natural
compares below it). G_S keeps only the unit (INF, 0) over infinity.

Elements of the convolution algebra are finitely supported functions on arrows,
stored in canonical form (no coefficients below ``ZERO_TOL``). Convolution of
finitely supported functions is exact index arithmetic, so nothing is truncated
here; only :func:`shift_realization` cuts to a finite matrix.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

INF = math.inf
O1 = "O1"
GS = "GS"
ZERO_TOL = 1e-14

Arrow = tuple  # (m, n) with m an int or INF


class NotComposable(Exception):
    pass


class TruncationError(ValueError):
    """An element does not fit the guard band of a finite matrix realization."""


def is_arrow(a, tag: str = O1) -> bool:
    m, n = a
    if m == INF:
        return tag == O1 or n == 0
    return int(m) == m and m >= 0 and m + n >= 0


def source(a: Arrow):
    return a[0]


def target(a: Arrow):
    return a[0] + a[1]


def compose(a: Arrow, b: Arrow) -> Arrow:
    """(m, n)(m + n, q) = (m, n + q); raises NotComposable otherwise."""
    if target(a) != source(b):
        raise NotComposable(f"target of {a} is {target(a)}, source of {b} is {source(b)}")
    return (a[0], a[1] + b[1])


def inverse(a: Arrow) -> Arrow:
    return (target(a), -a[1])


def unit(m) -> Arrow:
    return (m, 0)


def _key(a: Arrow) -> Arrow:
    m, n = a
    return (INF if m == INF else int(m), int(n))


class AlgebraElement:
    """Finitely supported complex function on the arrows of O1 or G_S."""

    __slots__ = ("_terms", "tag")

    def __init__(self, terms: Mapping[Arrow, complex] | Iterable = (), tag: str = O1):
        if tag not in (O1, GS):
            raise ValueError(f"unknown groupoid tag {tag!r}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Arrow, complex] = defaultdict(complex)
        for a, c in items:
            a = _key(a)
            if not is_arrow(a, tag):
                raise ValueError(f"{a} is not an arrow of {tag}")
            acc[a] += complex(c)
        self._terms = {a: c for a, c in acc.items() if abs(c) > ZERO_TOL}
        self.tag = tag

    @classmethod
    def basis(cls, m, n, coeff: complex = 1.0, tag: str = O1) -> "AlgebraElement":
        return cls({(m, n): coeff}, tag)

    @property
    def terms(self) -> dict[Arrow, complex]:
        return dict(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms.items(), key=lambda kv: (kv[0][0], kv[0][1])))

    def __len__(self):
        return len(self._terms)

    def __getitem__(self, a: Arrow) -> complex:
        return self._terms.get(_key(a), 0j)

    def support(self) -> list[Arrow]:
        return [a for a, _ in self]

    def _check(self, other: "AlgebraElement"):
        if self.tag != other.tag:
            raise ValueError(f"mixed groupoid tags {self.tag} and {other.tag}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(list(self._terms.items()) + list(other._terms.items()), self.tag)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __rmul__(self, c: complex) -> "AlgebraElement":
        return AlgebraElement({a: c * v for a, v in self._terms.items()}, self.tag)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        return other * self

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.tag == other.tag and self.distance(other) == 0.0

    def __hash__(self):
        return hash((self.tag, frozenset(self._terms)))

    def distance(self, other: "AlgebraElement") -> float:
        """Largest coefficient difference, after dropping differences below ZERO_TOL."""
        keys = set(self._terms) | set(other._terms)
        d = max((abs(self[a] - other[a]) for a in keys), default=0.0)
        return d if d > ZERO_TOL else 0.0

    def max_abs(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def restrict(self, keep: Callable[[Arrow], bool]) -> "AlgebraElement":
        return AlgebraElement({a: c for a, c in self._terms.items() if keep(a)}, self.tag)

    def retag(self, tag: str) -> "AlgebraElement":
        return AlgebraElement(self._terms, tag)

    @property
    def star(self) -> "AlgebraElement":
        return involute(self)

    def __repr__(self):
        body = " + ".join(f"({c:.6g})e[{m},{n}]" for (m, n), c in self)
        return f"AlgebraElement<{self.tag}>({body or '0'})"

    # JSON fixtures: [{m: int | "inf", n: int, re: float, im: float}, ...]
    def to_records(self) -> list[dict]:
        return [
            {"m": "inf" if m == INF else m, "n": n, "re": c.real, "im": c.imag}
            for (m, n), c in self
        ]

    @classmethod
    def from_records(cls, records: Iterable[Mapping], tag: str = O1) -> "AlgebraElement":
        terms = []
        for r in records:
            m = INF if r["m"] == "inf" else int(r["m"])
            terms.append(((m, int(r["n"])), complex(r["re"], r["im"])))
        return cls(terms, tag)


def one(support: Iterable, tag: str = O1) -> AlgebraElement:
    """Sum of the units e_{m,0} over ``support`` (a truncation of the identity)."""
    return AlgebraElement({(m, 0): 1.0 for m in support}, tag)


def convolve(f: AlgebraElement, g: AlgebraElement,
             zeta: Callable[[Arrow, Arrow], complex] | None = None) -> AlgebraElement:
    """Twisted convolution: e_a * e_b = zeta(a, b) e_{ab} for composable a, b."""
    f._check(g)
    by_source: dict = defaultdict(list)
    for b, cb in g._terms.items():
        by_source[b[0]].append((b, cb))
    out: dict[Arrow, complex] = defaultdict(complex)
    for a, ca in f._terms.items():
        for b, cb in by_source.get(target(a), ()):
            ab = (a[0], a[1] + b[1])
            out[ab] += ca * cb * (1.0 if zeta is None else zeta(a, b))
    return AlgebraElement(out, f.tag)


def involute(f: AlgebraElement, zeta: Callable[[Arrow, Arrow], complex] | None = None) -> AlgebraElement:
    """f*(g) = conj(f(g^-1)) conj(zeta(g, g^-1)); on the basis e_{m,n}* = e_{m+n,-n}."""
    out = {}
    for a, c in f._terms.items():
        ai = inverse(a)
        phase = 1.0 if zeta is None else zeta(ai, a).conjugate()
        out[ai] = c.conjugate() * phase
    return AlgebraElement(out, f.tag)


def c1(a: Arrow) -> float:
    """The cocycle c1(m, n) = n."""
    return float(a[1])


def coboundary(phi: Callable) -> Callable[[Arrow], float]:
    """Groupoid coboundary of a function on units, phi(source) - phi(target)."""
    return lambda a: phi(source(a)) - phi(target(a))


def automorphism_c1(t: complex, f: AlgebraElement) -> AlgebraElement:
    """A_{c1}(t) e_{m,n} = exp(i t n) e_{m,n}; complex t gives the analytic continuation."""
    return AlgebraElement({a: c * cmath.exp(1j * t * a[1]) for a, c in f._terms.items()}, f.tag)


# ---------------------------------------------------------------------------
# Measures on units, KMS weights, GNS inner products
# ---------------------------------------------------------------------------

GEOMETRIC = "GEOMETRIC"
DIRAC0 = "DIRAC0"
DIRACINF = "DIRACINF"
CUSTOM = "CUSTOM"


@dataclass(frozen=True)
class UnitMeasure:
    """Measure on the compactified naturals, closed-form family or explicit weights."""

    family: str
    hbar: float | None = None
    weights: Callable[[object], float] | None = None

    def __call__(self, m) -> float:
        if self.family == GEOMETRIC:
            if m == INF:
                return 0.0
            return math.exp(-m * self.hbar) * -math.expm1(-self.hbar)
        if self.family == DIRAC0:
            return 1.0 if m == 0 else 0.0
        if self.family == DIRACINF:
            return 1.0 if m == INF else 0.0
        return float(self.weights(m))

    def total_mass(self, n_terms: int = 2000) -> float:
        if self.family == GEOMETRIC:
            return -math.expm1(-self.hbar * n_terms)
        if self.family in (DIRAC0, DIRACINF):
            return 1.0
        return math.fsum(self(m) for m in range(n_terms)) + self(INF)


def kms_measure(family: str, hbar: float | None = None) -> UnitMeasure:
    """The (c1, beta)-KMS probability measures: GEOMETRIC(hbar) (beta = -hbar), DIRAC0 (beta = -oo), DIRACINF (beta = 0)."""
    if family == GEOMETRIC:
        if hbar is None or not hbar > 0:
            raise ValueError(f"GEOMETRIC measure needs hbar > 0, got {hbar}")
        return UnitMeasure(GEOMETRIC, hbar=hbar)
    if family in (DIRAC0, DIRACINF):
        return UnitMeasure(family)
    raise ValueError(f"unknown KMS family {family!r}")


def custom_measure(weights: Callable[[object], float]) -> UnitMeasure:
    return UnitMeasure(CUSTOM, weights=weights)


def weight_state(f: AlgebraElement, mu: UnitMeasure) -> complex:
    """phi_mu(f) = sum over units of f(m, 0) mu(m)."""
    return sum((c * mu(a[0]) for a, c in f._terms.items() if a[1] == 0), 0j)


def gns_inner(f: AlgebraElement, g: AlgebraElement, mu: UnitMeasure) -> complex:
    """<f, g> = phi_mu(f* * g), antilinear in f."""
    return weight_state(convolve(involute(f), g), mu)


def modular_operator(f: AlgebraElement, hbar: float) -> AlgebraElement:
    """D|m,n> = exp(-hbar (m - n)) |m,n> where |m,n> = e_{m,n-m}."""
    return AlgebraElement({a: c * math.exp(hbar * a[1]) for a, c in f._terms.items()}, f.tag)


def modular_operator_power(f: AlgebraElement, hbar: float, power: float) -> AlgebraElement:
    return AlgebraElement({a: c * math.exp(power * hbar * a[1]) for a, c in f._terms.items()}, f.tag)


def modular_conjugation(f: AlgebraElement, hbar: float) -> AlgebraElement:
    """J|m,n> = exp(hbar (m - n)/2) |n,m>, antilinear, so that J D^(1/2) = involution."""
    out = {}
    for a, c in f._terms.items():
        out[inverse(a)] = c.conjugate() * math.exp(-0.5 * hbar * a[1])
    return AlgebraElement(out, f.tag)


# ---------------------------------------------------------------------------
# Concrete realizations
# ---------------------------------------------------------------------------

def shift_element(size: int, with_infinity: bool = True, tag: str = O1) -> AlgebraElement:
    """The shift sum_{m < size} e_{1+m,-1}, optionally with its value at the arrow (INF, -1)."""
    terms = {(1 + m, -1): 1.0 for m in range(size)}
    if with_infinity:
        terms[(INF, -1)] = 1.0
    return AlgebraElement(terms, tag)


def shift_realization(f: AlgebraElement, N: int) -> np.ndarray:
    """Matrix of f acting on span{|0>, ..., |N-1>} in the ground-state GNS space l^2(N).

    e_{m,n}|p> = delta_{m+n,p} |m>, i.e. e_{m,n} is the matrix unit E[m, m+n].
    Arrows over INF act by zero on l^2(N). Any finite arrow with m or m+n >= N
    raises TruncationError.
    """
    mat = np.zeros((N, N), dtype=complex)
    for (m, n), c in f._terms.items():
        if m == INF:
            continue
        if m >= N or m + n >= N:
            raise TruncationError(f"arrow ({m}, {n}) lies outside the dimension-{N} guard band")
        mat[m, m + n] += c
    return mat


def guard_band_ok(f: AlgebraElement, N: int) -> bool:
    return all(m == INF or (m < N and m + n < N) for (m, n) in f._terms)


def evaluation_map(f: AlgebraElement) -> dict[int, complex]:
    """Fourier coefficients of sigma(f)(x) = sum_m f(INF, m) x^m.

    For G_S elements the result has at most the constant coefficient.
    """
    return {n: c for (m, n), c in f if m == INF}


def laurent_product(p: Mapping[int, complex], q: Mapping[int, complex]) -> dict[int, complex]:
    out: dict[int, complex] = defaultdict(complex)
    for i, a in p.items():
        for j, b in q.items():
            out[i + j] += a * b
    return {k: v for k, v in out.items() if abs(v) > ZERO_TOL}


def arrows_in_window(nmax: int, tag: str = GS, include_infinity: bool = True) -> list[Arrow]:
    """All arrows with m, m + n <= nmax, plus the INF unit (and nothing else over INF)."""
    out = [(m, k - m) for m in range(nmax + 1) for k in range(nmax + 1)]
    if include_infinity:
        out.append((INF, 0))
    return [a for a in out if is_arrow(a, tag)]


def composition_table(arrows: Iterable[Arrow]) -> dict[tuple[Arrow, Arrow], Arrow | None]:
    arrows = list(arrows)
    table = {}
    for a in arrows:
        for b in arrows:
            try:
                table[(a, b)] = compose(a, b)
            except NotComposable:
                table[(a, b)] = None
    return table


def random_element(rng: np.random.Generator, nmax: int, tag: str = O1, n_terms: int = 6,
                   integer: bool = False, with_infinity: bool = True) -> AlgebraElement:
    """Random element supported on arrows with m, m+n <= nmax (plus arrows over INF).

    ``integer`` draws Gaussian-integer coefficients so that sums of products stay exact.
    """
    arrows = arrows_in_window(nmax, tag, include_infinity=False)
    if with_infinity:
        arrows += [(INF, k) for k in range(-2, 3)] if tag == O1 else [(INF, 0)]
    idx = rng.choice(len(arrows), size=min(n_terms, len(arrows)), replace=False)
    if integer:
        coeffs = rng.integers(-3, 4, size=(len(idx), 2))
    else:
        coeffs = rng.normal(size=(len(idx), 2))
    return AlgebraElement({arrows[i]: complex(*c) for i, c in zip(idx, coeffs)}, tag)
