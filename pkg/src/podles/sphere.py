"""The standard Podles sphere (c = 0) inside the convolution algebra of G_S."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .groupoid import (
    GS, INF, AlgebraElement, GEOMETRIC, convolve, involute, kms_measure,
    shift_realization, weight_state,
)


@dataclass(frozen=True)
class QuantumSphereParams:
    hbar: float = 0.5
    c: float = 0.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.c != 0:
            raise ValueError("only the standard sphere c = 0 is supported")

    @property
    def q(self) -> float:
        return math.exp(-self.hbar / 2)


@dataclass(frozen=True)
class GeneratorPair:
    tau: AlgebraElement
    alpha: AlgebraElement
    cutoff: int

    @property
    def alpha_star(self) -> AlgebraElement:
        return involute(self.alpha)


def tau_coefficient(m: int, q: float) -> float:
    return q ** (2 * m)


def alpha_coefficient(m: int, q: float) -> float:
    return q ** m * math.sqrt(-math.expm1(2 * (m + 1) * math.log(q)))


def build_generators(params: QuantumSphereParams, M: int) -> GeneratorPair:
    """tau = sum_{m<M} q^{2m} e_{m,0},  alpha = sum_{m<M} q^m (1 - q^{2(m+1)})^{1/2} e_{m,1}."""
    if M < 1:
        raise ValueError("cutoff M must be >= 1")
    q = params.q
    tau = AlgebraElement({(m, 0): tau_coefficient(m, q) for m in range(M)}, GS)
    alpha = AlgebraElement({(m, 1): alpha_coefficient(m, q) for m in range(M)}, GS)
    return GeneratorPair(tau, alpha, M)


@dataclass
class RelationReport:
    window: int                 # residuals taken over arrows with m < window
    residuals: dict[str, float]

    @property
    def empty(self) -> bool:
        return self.window <= 0

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def check_relations(gen: GeneratorPair, params: QuantumSphereParams) -> RelationReport:
    """Residuals of q^2 a*a = t(1-t), q^2 a a* = q^2 t(1 - q^2 t), a t = q^2 t a.

    Only arrows with m < M - 2 are reported; above that the cutoff of the series
    changes the coefficients.
    """
    q2 = params.q ** 2
    tau, alpha, alpha_s = gen.tau, gen.alpha, gen.alpha_star
    tau2 = convolve(tau, tau)
    lhs_rhs = {
        "q2 a*a = t(1-t)": (q2 * convolve(alpha_s, alpha), tau - tau2),
        "q2 a a* = q2 t(1-q2 t)": (q2 * convolve(alpha, alpha_s), q2 * tau - (q2 * q2) * tau2),
        "a t = q2 t a": (convolve(alpha, tau), q2 * convolve(tau, alpha)),
    }
    window = gen.cutoff - 2
    residuals = {}
    for name, (lhs, rhs) in lhs_rhs.items():
        diff = (lhs - rhs).restrict(lambda a: a[0] != INF and a[0] < window)
        residuals[name] = diff.max_abs()
    return RelationReport(window, residuals)


def rep_rho_direct(which: str, params: QuantumSphereParams, N: int) -> np.ndarray:
    """rho(tau) psi_n = q^{2n} psi_n,  rho(alpha) psi_n = q^{n-1} (1 - q^{2n})^{1/2} psi_{n-1}."""
    if N < 2:
        raise ValueError("N must be >= 2")
    q = params.q
    if which == "tau":
        return np.diag([q ** (2 * n) for n in range(N)]).astype(complex)
    if which == "alpha":
        mat = np.zeros((N, N), dtype=complex)
        for n in range(1, N):
            mat[n - 1, n] = q ** (n - 1) * math.sqrt(1 - q ** (2 * n))
        return mat
    if which == "alpha*":
        return rep_rho_direct("alpha", params, N).conj().T
    raise ValueError(f"unknown generator {which!r}")


def rep_rho(f: AlgebraElement, N: int) -> np.ndarray:
    """rho through the ground-state realization e_{m,n} -> E[m, m+n]."""
    if N < 2:
        raise ValueError("N must be >= 2")
    return shift_realization(f, N)


def rep_counit(f: AlgebraElement) -> complex:
    """The one-dimensional representation: value of f at the unit over INF.

    This is the character of C*(G_S) = sigma^{-1}(C); it sends tau and alpha to
    their limits at infinity, both zero (the degenerate point where tau = 0).
    """
    return f[(INF, 0)]


def haar_state(f: AlgebraElement, params: QuantumSphereParams) -> complex:
    """phi(f) = sum_m f(m, 0) exp(-m hbar)(1 - exp(-hbar))."""
    return weight_state(f, kms_measure(GEOMETRIC, params.hbar))


def words(gen: GeneratorPair, max_len: int = 3) -> dict[str, AlgebraElement]:
    """All products of tau, alpha, alpha* of length 1..max_len, keyed by spelling."""
    letters = {"t": gen.tau, "a": gen.alpha, "A": gen.alpha_star}
    out = dict(letters)
    frontier = dict(letters)
    for _ in range(max_len - 1):
        nxt = {}
        for w, el in frontier.items():
            for s, g in letters.items():
                nxt[w + s] = convolve(el, g)
        out.update(nxt)
        frontier = nxt
    return out
