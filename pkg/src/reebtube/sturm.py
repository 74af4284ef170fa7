"""Singular Sturm-Liouville machinery for u'' + q u = 0 with q ~ -3/(4 t^2).

The branch vanishing at t = 0 behaves like t^{3/2}; first-zero solvers seed it
slightly off the singularity and the closed-form comparison radius covers the
four sign cases of the quadratic bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .flow import StepFailure


@dataclass(frozen=True)
class SingularPotential:
    """q(t) = -3/(4 t^2) + q_tilde(t) with q_tilde continuous on [0, T)."""
    q_tilde: Callable[[float], float]
    T: float
    label: str = ""

    def q(self, t: float) -> float:
        return -0.75 / (t * t) + self.q_tilde(t)


@dataclass(frozen=True)
class BoundFit:
    """Comparison-theorem inputs: either a Schwarzian or a curvature bound."""
    variant: str
    params: tuple

    @staticmethod
    def schwarzian(k1: float, k2: float) -> "BoundFit":
        return BoundFit("schwarzian", (float(k1), float(k2)))

    @staticmethod
    def curvature(A: float, C: float) -> "BoundFit":
        if A < 1.0 - 1e-12 or C < 1.0 - 1e-12:
            raise ValueError("curvature bounds satisfy A >= 1, C >= 1")
        return BoundFit("curvature", (float(A), float(C)))

    @property
    def k1(self):
        assert self.variant == "schwarzian"
        return self.params[0]

    @property
    def k2(self):
        assert self.variant == "schwarzian"
        return self.params[1]


@dataclass(frozen=True)
class ZeroResult:
    t: float | None
    horizon: float
    eps_delta: float = 0.0     # change of the zero when the seed point halves

    @property
    def found(self) -> bool:
        return self.t is not None


def _integrate_branch(pot: SingularPotential, T: float, eps: float,
                      rtol: float = 1e-12, terminal: bool = True):
    def rhs(t, y):
        return [y[1], -pot.q(t) * y[0]]

    def zero_event(t, y):
        return y[0]
    zero_event.terminal = terminal
    zero_event.direction = -1.0

    y0 = [eps ** 1.5, 1.5 * math.sqrt(eps)]
    sol = solve_ivp(rhs, (eps, T), y0, method="DOP853", rtol=rtol, atol=1e-14,
                    dense_output=True, events=zero_event)
    if sol.status == -1:
        raise StepFailure(f"singular branch integration failed: {sol.message}")
    return sol


def singular_first_zero(pot: SingularPotential, T: float | None = None,
                        eps: float = 1e-6) -> ZeroResult:
    """First zero of the u(0) = 0 branch on (0, T), or not-found at the horizon.

    The result is re-computed with the seed at eps/2 and the difference is
    reported for robustness checking.
    """
    T = pot.T if T is None else T

    def one(e):
        sol = _integrate_branch(pot, T, e)
        if sol.t_events[0].size == 0:
            return None
        t0 = float(sol.t_events[0][0])
        lo = max(e, t0 * (1 - 1e-6))
        hi = min(T, t0 * (1 + 1e-6))
        u = lambda t: sol.sol(t)[0]
        if u(lo) * u(hi) < 0:
            return brentq(u, lo, hi, xtol=1e-12)
        return t0

    t1 = one(eps)
    t2 = one(eps / 2.0)
    if t1 is None or t2 is None:
        return ZeroResult(None, T)
    return ZeroResult(t2, T, abs(t1 - t2))


@lru_cache(maxsize=1)
def bessel_j23_root() -> float:
    """First positive root of the Bessel function of order 2/3.

    The function is evaluated by its ascending series (30 terms, ample for
    arguments below 8) and the root bracketed on [2, 5] is polished by Brent.
    """
    nu = 2.0 / 3.0

    def J(x):
        half = x / 2.0
        acc, term = 0.0, half ** nu / math.gamma(nu + 1.0)
        for m in range(30):
            acc += term
            term *= -(half * half) / ((m + 1.0) * (m + 1.0 + nu))
        return acc

    return float(brentq(J, 2.0, 5.0, xtol=1e-14, rtol=8.9e-16))


def r_star(k1: float, k2: float) -> float:
    """Closed-form comparison radius for the bound -3/(4t^2) + k1 t + k2 t^2."""
    if not (math.isfinite(k1) and math.isfinite(k2)):
        raise ValueError("bound coefficients must be finite")
    if k1 <= 0.0 and k2 <= 0.0:
        return math.inf
    if k2 > 0.0 and k1 <= 0.0:
        return math.sqrt(2.0 * math.pi) / k2 ** 0.25
    if k1 > 0.0 and k2 <= 0.0:
        return (1.5 * bessel_j23_root()) ** (2.0 / 3.0) / k1 ** (1.0 / 3.0)
    return (-k1 + math.sqrt(8.0 * math.pi * k2 ** 1.5 + k1 * k1)) / (2.0 * k2)


@dataclass(frozen=True)
class InterlaceReport:
    ok: bool
    zeros: tuple
    zeros_dominating: tuple
    counterexample: tuple | None = None


def sturm_interlace_check(pot: SingularPotential, pot_bar: SingularPotential,
                          interval: tuple, eps: float = 1e-6) -> InterlaceReport:
    """Between consecutive zeros of the q-branch there is a zero of the
    q_bar-branch whenever q <= q_bar on the interval.

    The initial zero at t = 0 counts, so the first positive zero of the
    dominated solution must already be preceded by one of the dominating
    solution.
    """
    lo, hi = interval
    grid = np.linspace(max(lo, 1e-3), hi, 200)
    gap = np.array([pot_bar.q_tilde(t) - pot.q_tilde(t) for t in grid])
    if np.any(gap < -1e-10):
        raise ValueError("pointwise domination q <= q_bar fails on the interval")

    def zeros_of(p):
        sol = _integrate_branch(p, hi, eps, terminal=False)
        return tuple(float(t) for t in sol.t_events[0])

    z = zeros_of(pot)
    zbar = zeros_of(pot_bar)
    pairs = list(zip((0.0,) + z, z))
    for t1, t2 in pairs:
        inside = [t for t in zbar if t1 < t < t2]
        if not inside:
            return InterlaceReport(False, z, zbar, (t1, t2))
    return InterlaceReport(True, z, zbar)


def schwarzian_to_potential(sample, label: str = "") -> SingularPotential:
    """Potential with 2q = S built from a sampled Schwarzian derivative.

    The regular part q_tilde = S/2 + 3/(4 t^2) = S_reg/2 is interpolated by a
    cubic spline and extended by its boundary values outside the window.
    """
    from scipy.interpolate import CubicSpline
    rs = np.asarray(sample.r, dtype=float)
    qt = 0.5 * np.asarray(sample.S_reg, dtype=float)
    spline = CubicSpline(rs, qt)
    lo, hi = rs[0], rs[-1]

    def q_tilde(t):
        t = min(max(t, lo), hi)
        return float(spline(t))

    return SingularPotential(q_tilde, T=float(hi), label=label)
