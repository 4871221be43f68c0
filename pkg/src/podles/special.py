"""Dilogarithm on the negative axis and dilogarithm-weighted quadrature on [0, oo).

Every section norm in the package is an integral of the form

    int_0^oo f(t) exp(Li2(-t) / hbar) dt

The weight decays like exp(-(log t)^2 / (2 hbar)) for large t, so beyond a split
point the integral is carried out in the variable s = log t, where the weight is
Gaussian and the panel sum can be truncated with a certified stopping rule.
Integrands that grow like t^m with large m overflow doubles in the tail, so the
driver accumulates in log-scaled form; ``log_weighted_integral`` exposes that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

PI2_6 = math.pi ** 2 / 6.0

# 0.6**80 / 80**2 ~ 3e-22, enough for the series on |t| <= 0.6
_SERIES_TERMS = 80
_INV_K2 = 1.0 / np.arange(1, _SERIES_TERMS + 1, dtype=float) ** 2


class QuadratureError(RuntimeError):
    """Panel summation did not settle within ``max_panels``."""

    def __init__(self, message: str, partial_sum: float, last_panel: float):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.last_panel = last_panel


@dataclass(frozen=True)
class QuadratureSpec:
    split_point: float = 1.0
    nodes_per_panel: int = 24
    rel_tol: float = 1e-10
    max_panels: int = 400

    def __post_init__(self):
        if not self.split_point > 0:
            raise ValueError(f"split_point must be positive, got {self.split_point}")
        if self.nodes_per_panel < 2:
            raise ValueError(f"nodes_per_panel must be >= 2, got {self.nodes_per_panel}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_panels < 1:
            raise ValueError(f"max_panels must be >= 1, got {self.max_panels}")

    def refined(self) -> "QuadratureSpec":
        """Same policy with twice the nodes per panel (convergence gate)."""
        return replace(self, nodes_per_panel=2 * self.nodes_per_panel)


# ---------------------------------------------------------------------------
# Dilogarithm
# ---------------------------------------------------------------------------

def _series(t):
    """sum_k t^k / k^2 by Horner; accurate for |t| <= 0.6."""
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    for c in _INV_K2[::-1]:
        acc = (acc + c) * t
    return acc


def _landen(t):
    """Li2(t) = -Li2(t/(t-1)) - log(1-t)^2 / 2, valid for t < 0."""
    t = np.asarray(t, dtype=float)
    u = t / (t - 1.0)
    return -_series(u) - 0.5 * np.log1p(-t) ** 2


def _dilog_unit(t):
    # t in [-1, 0]
    return np.where(t >= -0.5, _series(np.maximum(t, -0.5)), _landen(np.minimum(t, -0.5)))


def dilog(t):
    """Real dilogarithm Li2(t) = -int_0^t log(1-u)/u du for t <= 0.

    Power series on [-1/2, 0], Landen's identity on [-1, -1/2), and the inversion
    relation Li2(-t) = -Li2(-1/t) - pi^2/6 - (log t)^2/2 for t < -1.
    Accepts scalars or arrays.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr > 0) or np.any(np.isnan(arr)):
        raise ValueError("dilog is implemented on the branch t <= 0 only")
    inner = arr >= -1.0
    safe_inv = np.where(inner, -1.0, arr)
    out = np.where(
        inner,
        _dilog_unit(np.where(inner, arr, -1.0)),
        -_dilog_unit(1.0 / safe_inv) - PI2_6 - 0.5 * np.log(-safe_inv) ** 2,
    )
    if np.ndim(t) == 0:
        return float(out)
    return out


def dilog_neg_exp(s):
    """Li2(-e^s) for real s, without forming e^s when s > 0."""
    s = np.asarray(s, dtype=float)
    neg = np.minimum(s, 0.0)
    pos = np.maximum(s, 0.0)
    low = dilog(-np.exp(neg))
    high = -dilog(-np.exp(-pos)) - PI2_6 - 0.5 * pos ** 2
    out = np.where(s <= 0, low, high)
    if out.ndim == 0:
        return float(out)
    return out


def inversion_residual(t):
    """|Li2(-t) + Li2(-1/t) + pi^2/6 + (log t)^2/2| for t > 0."""
    t = np.asarray(t, dtype=float)
    return np.abs(dilog(-t) + dilog(-1.0 / t) + PI2_6 + 0.5 * np.log(t) ** 2)


# ---------------------------------------------------------------------------
# Weighted quadrature
# ---------------------------------------------------------------------------

def _gauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _panel_width(hbar: float) -> float:
    # the tail weight is Gaussian in log t with standard deviation sqrt(hbar)
    return min(1.0, math.sqrt(hbar))


class _ScaledSum:
    """Running sum stored as value * exp(ref) so huge terms never overflow."""

    def __init__(self):
        self.ref = -math.inf
        self.acc = 0.0

    def add(self, weights, sign, logmag) -> float:
        top = float(np.max(logmag))
        if top == -math.inf:
            return 0.0
        if top > self.ref:
            self.acc = self.acc * math.exp(self.ref - top) if self.ref > -math.inf else 0.0
            self.ref = top
        contrib = float(np.sum(weights * sign * np.exp(logmag - self.ref)))
        self.acc += contrib
        return contrib

    def value(self) -> float:
        if self.acc == 0.0:
            return 0.0
        return self.acc * math.exp(self.ref)

    def log_value(self) -> float:
        if self.acc <= 0.0:
            raise ValueError("log of a non-positive integral")
        return math.log(self.acc) + self.ref


def _integrate(evaluate, hbar: float, spec: QuadratureSpec) -> _ScaledSum:
    """evaluate(t, s) -> (sign, log|f|) at nodes t = e^s; weight applied here."""
    if not hbar > 0:
        raise ValueError(f"hbar must be positive, got {hbar}")
    x, w = _gauss(spec.nodes_per_panel)
    h = _panel_width(hbar)
    total = _ScaledSum()

    n_head = max(1, math.ceil(spec.split_point / h))
    edges = np.linspace(0.0, spec.split_point, n_head + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        t = a + (b - a) * x
        s = np.log(t)
        sign, logf = evaluate(t, s)
        total.add((b - a) * w, sign, logf + dilog(-t) / hbar)

    s0 = math.log(spec.split_point)
    quiet = 0
    contrib = 0.0
    for k in range(spec.max_panels):
        a = s0 + k * h
        s = a + h * x
        t = np.exp(np.minimum(s, 700.0))
        sign, logf = evaluate(t, s)
        logmag = logf + s + dilog_neg_exp(s) / hbar
        contrib = total.add(h * w, sign, logmag)
        rising = logmag[-1] > logmag[0]
        if abs(contrib) <= spec.rel_tol * abs(total.acc) and not rising:
            quiet += 1
            if quiet == 2:
                return total
        else:
            quiet = 0
    raise QuadratureError(
        f"tail did not settle after {spec.max_panels} panels",
        partial_sum=total.value(),
        last_panel=contrib * math.exp(total.ref) if total.ref > -math.inf else 0.0,
    )


def weighted_integral(f: Callable, hbar: float, spec: QuadratureSpec | None = None) -> float:
    """int_0^oo f(t) exp(Li2(-t)/hbar) dt for a vectorized integrand ``f``."""
    spec = spec or QuadratureSpec()

    def evaluate(t, s):
        v = np.asarray(f(t), dtype=float) * np.ones_like(t)
        with np.errstate(divide="ignore"):
            return np.sign(v), np.log(np.abs(v))

    return _integrate(evaluate, hbar, spec).value()


def log_weighted_integral(log_f: Callable, hbar: float, spec: QuadratureSpec | None = None) -> float:
    """log of int_0^oo f(t) exp(Li2(-t)/hbar) dt for positive f.

    ``log_f`` receives s = log t (an array) and returns log f(e^s).
    """
    spec = spec or QuadratureSpec()

    def evaluate(t, s):
        return np.ones_like(s), np.asarray(log_f(s), dtype=float) * np.ones_like(s)

    return _integrate(evaluate, hbar, spec).log_value()


def asymptotic_ratio(n: int, hbar: float, lambda_inf: float = 1.0, rho_inf: float = 1.0) -> float:
    """Leading saddle-point term of r_n / l_n: exp(-hbar (n + 1/2)) sqrt(rho_inf / lambda_inf)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.exp(-hbar * (n + 0.5)) * math.sqrt(rho_inf / lambda_inf)
